"""Outcome of a property check, printable as ``key=value`` records."""

from __future__ import annotations

from dataclasses import dataclass, field


@dataclass
class Failure:
    seed: object
    counterexample: str
    expected: str
    actual: str


@dataclass
class Report:
    property: str
    trials: int = 0
    failures: list = field(default_factory=list)
    elapsed: float = 0.0
    stats: dict = field(default_factory=dict)
    witness: object = None

    @property
    def passed(self) -> bool:
        return not self.failures

    def fail(self, seed, counterexample, expected, actual) -> None:
        self.failures.append(Failure(seed, str(counterexample), str(expected), str(actual)))

    def records(self) -> list:
        lines = [
            f"property={self.property}",
            f"status={'pass' if self.passed else 'fail'}",
            f"trials={self.trials}",
            f"failures={len(self.failures)}",
            f"elapsed={self.elapsed:.3f}",
        ]
        for key in sorted(self.stats):
            lines.append(f"stat.{key}={self.stats[key]}")
        for i, f in enumerate(self.failures[:20]):
            lines.append(f"failure.{i}.seed={f.seed}")
            lines.append(f"failure.{i}.term={f.counterexample}")
            lines.append(f"failure.{i}.expected={f.expected}")
            lines.append(f"failure.{i}.actual={f.actual}")
        return lines

    def summary(self) -> str:
        verdict = "PASS" if self.passed else "FAIL"
        text = f"{verdict} {self.property}: {self.trials} trials, {len(self.failures)} failures, {self.elapsed:.2f}s"
        if self.failures:
            f = self.failures[0]
            text += f"\n  first failure (seed {f.seed}): {f.counterexample}\n  expected {f.expected}, got {f.actual}"
        return text
