"""``ocbv``: evaluate, translate, compare and property-check Open CBV terms.

Exit status: 0 on success, 1 when a check or relation fails, 2 on a parse
error or bad usage, 3 when the input is outside the calculus' language,
4 when an equivalence search exceeds its budget.
"""

from __future__ import annotations

import argparse
import sys
from typing import Optional

from .engines import NORMAL, RULES_OF, Rule, default_fuel, evaluate
from .equiv import ClassTooLarge, float_equiv, seq_struct_equiv, struct_equiv
from .harness import PROPERTIES, GenConfig, check_property
from .sequent import (
    LAM_BAR,
    MU_TILDE,
    evaluate_seq,
    parse_command,
    print_command,
)
from .terms import LanguageError, ParseError, has_es, in_kernel, parse_term, print_term, unfold
from .translations import from_sequent, staged_vsub_eval, to_kernel, to_sequent

EXIT_OK, EXIT_FAIL, EXIT_PARSE, EXIT_LANGUAGE, EXIT_BUDGET = 0, 1, 2, 3, 4

SEQ_RULES = (LAM_BAR, MU_TILDE)


def _read(text: str) -> str:
    return sys.stdin.read() if text == "-" else text


def _positive(text: str) -> int:
    n = int(text)
    if n <= 0:
        raise argparse.ArgumentTypeError("must be positive")
    return n


def _emit(fmt: str, text_lines: list, records: list) -> None:
    print("\n".join(text_lines if fmt == "text" else records))


# -- eval -------------------------------------------------------------------

def run_eval(text: str, calc: str, fuel: Optional[int], trace: bool, fmt: str) -> int:
    fuel = default_fuel() if fuel is None else fuel
    if calc == "vseq":
        src = text.strip()
        c = parse_command(src) if src.startswith("<") else to_sequent(to_kernel(parse_term(src)))
        d = evaluate_seq(c, fuel=fuel)
        end = print_command(d.end)
        counts = [(r, d.counts[r]) for r in SEQ_RULES]
        lines = d.trace_lines() if trace else []
    else:
        t = parse_term(text)
        d = evaluate(t, calc, fuel=fuel)
        end = print_term(d.end)
        counts = [(r.value, d.counts[r]) for r in RULES_OF[calc]]
        lines = d.trace_lines() if trace else []
    normal = d.status == NORMAL
    summary = " ".join(f"{k}={v}" for k, v in counts)
    text_out = lines + [
        end if normal else "FUEL-EXHAUSTED",
        f"status: {'normal' if normal else 'fuel exhausted'} after {len(d)} steps",
        f"counts: {summary}",
    ]
    records = [f"calc={calc}", f"status={d.status}", f"steps={len(d)}"]
    records += [f"count.{k}={v}" for k, v in counts]
    records.append(f"term={end}")
    records += [f"trace.{i}={line}" for i, line in enumerate(lines)]
    _emit(fmt, text_out, records)
    return EXIT_OK


# -- translate --------------------------------------------------------------

def run_translate(text: str, source: str, target: str, fmt: str) -> int:
    if source == "vseq":
        c = parse_command(text)
        if target != "vsubk":
            return _unsupported(source, target)
        out = print_term(from_sequent(c))
    else:
        t = parse_term(text)
        if source == "vsubk" and not in_kernel(t):
            raise LanguageError("input is not a vsubk term")
        if target == "vsubk":
            out = print_term(t if source == "vsubk" else to_kernel(t))
        elif target == "vseq":
            out = print_command(to_sequent(t if source == "vsubk" else to_kernel(t)))
        elif target == "pure":
            out = print_term(unfold(t))
        else:
            return _unsupported(source, target)
    _emit(fmt, [out], [f"from={source}", f"to={target}", f"term={out}"])
    return EXIT_OK


def _unsupported(source: str, target: str) -> int:
    print(f"no translation from {source} to {target}", file=sys.stderr)
    return EXIT_PARSE


# -- equiv ------------------------------------------------------------------

def run_equiv(left: str, right: str, rel: str, method: str, fmt: str) -> int:
    if rel == "structseq":
        same = seq_struct_equiv(parse_command(left), parse_command(right))
    else:
        t, u = parse_term(left), parse_term(right)
        same = float_equiv(t, u) if method == "float" else struct_equiv(t, u)
    verdict = "EQUIV" if same else "NOT-EQUIV"
    _emit(fmt, [verdict], [f"rel={rel}", f"verdict={verdict}"])
    return EXIT_OK


# -- compare ----------------------------------------------------------------

def _relation(ok: Optional[bool]) -> str:
    return "n/a" if ok is None else ("hold" if ok else "violated")


def run_compare(text: str, fuel: Optional[int], fmt: str) -> int:
    t = parse_term(text)
    if has_es(t):
        raise LanguageError("compare expects an ES-free term")
    fuel = default_fuel() if fuel is None else fuel
    plot = evaluate(t, "plot", fuel=fuel)
    fire = evaluate(t, "fire", fuel=fuel)
    vsub = staged_vsub_eval(t, fuel=fuel)
    shuf = evaluate(t, "shuf", fuel=fuel)
    kernel = evaluate(to_kernel(t), "vsubk", fuel=fuel)
    seq = evaluate_seq(to_sequent(to_kernel(t)), fuel=fuel)

    rows = [
        ("plot", plot.status, len(plot), f"BetaAbs={plot.count(Rule.BETA_ABS)} BetaVar={plot.count(Rule.BETA_VAR)}"),
        ("fire", fire.status, len(fire), f"BetaAbs={fire.count(Rule.BETA_ABS)} BetaInert={fire.count(Rule.BETA_INERT)}"),
        ("vsub", vsub.status, len(vsub), _vsub_counts(vsub)),
        ("shuf", shuf.status, len(shuf), f"BetaShuf={shuf.count(Rule.BETA_SHUF)} sigma={shuf.count(Rule.SIGMA_L, Rule.SIGMA_R)}"),
        ("vsubk", kernel.status, len(kernel), _vsub_counts(kernel)),
        ("vseq", seq.status, len(seq), f"LamBar={seq.counts[LAM_BAR]} MuTilde={seq.counts[MU_TILDE]}"),
    ]

    def when(*ds):
        return all(d.status == NORMAL for d in ds)

    f = len(fire)
    relations = [
        ("fire-vsub: m = |d|f", _relation(vsub.m == f if when(fire, vsub) else None)),
        ("fire-vsub: eλ = |d|βλ", _relation(vsub.count(Rule.EXP_ABS) == fire.count(Rule.BETA_ABS) if when(fire, vsub) else None)),
        ("fire-vsub: |d|f <= |e| <= 2|d|f", _relation(f <= len(vsub) <= 2 * f if when(fire, vsub) else None)),
        ("shuf-vsub: e = |d|βshuf", _relation(vsub.e == shuf.count(Rule.BETA_SHUF) if when(shuf, vsub) else None)),
        ("vsub-vsubk: m equal", _relation(kernel.m == vsub.m if when(vsub, kernel) else None)),
        # the simulation accounts for e + m exponential steps; finishing the
        # translated normal form may take more, with no bound in general
        ("vsub-vsubk: e_k >= e + m", _relation(kernel.e >= vsub.e + vsub.m if when(vsub, kernel) else None)),
        ("vsubk-vseq: λ̄ = m, μ̃ = e", _relation(
            (seq.counts[LAM_BAR], seq.counts[MU_TILDE]) == (kernel.m, kernel.e) if when(kernel, seq) else None
        )),
    ]
    # at equal fuel the longer simulations may run out first, so a mix is not a violation
    statuses = {d.status for d in (fire, vsub, shuf, kernel, seq)}
    relations.append(("termination agrees", "hold" if len(statuses) == 1 else "mixed"))
    text_out = [f"{'calc':<6} {'status':<15} {'steps':>6}  counts"]
    for name, status, n, counts in rows:
        shown = "normal" if status == NORMAL else "FUEL-EXHAUSTED"
        text_out.append(f"{name:<6} {shown:<15} {n:>6}  {counts}")
    text_out.append("")
    text_out += [f"{verdict:<9} {label}" for label, verdict in relations]
    records = []
    for name, status, n, counts in rows:
        records += [f"{name}.status={status}", f"{name}.steps={n}"]
        records += [f"{name}.count.{kv.split('=')[0]}={kv.split('=')[1]}" for kv in counts.split()]
    records += [f"relation.{i}={verdict} {label}" for i, (label, verdict) in enumerate(relations)]
    _emit(fmt, text_out, records)
    return EXIT_FAIL if any(v == "violated" for _, v in relations) else EXIT_OK


def _vsub_counts(d) -> str:
    return f"m={d.m} eλ={d.count(Rule.EXP_ABS)} evar={d.count(Rule.EXP_VAR)}"


# -- check ------------------------------------------------------------------

def run_check(name: str, trials: int, seed: int, max_size: int, fmt: str) -> int:
    if name == "list":
        for prop, (language, _) in PROPERTIES.items():
            print(f"{prop}\t{language}")
        return EXIT_OK
    if name not in PROPERTIES:
        print(f"unknown property {name!r}; try 'check list'", file=sys.stderr)
        return EXIT_PARSE
    report = check_property(name, GenConfig(seed=seed, max_size=max_size), trials)
    _emit(fmt, [report.summary()], report.records())
    return EXIT_OK if report.passed else EXIT_FAIL


# -- entry point ------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="ocbv", description="Open call-by-value calculi toolkit")
    p.add_argument("--format", choices=("text", "records"), default="text")
    sub = p.add_subparsers(dest="command", required=True)

    ev = sub.add_parser("eval", help="reduce a term to normal form")
    ev.add_argument("term", help="term text, or - for stdin")
    ev.add_argument("--calc", required=True, choices=("plot", "fire", "vsub", "vsubk", "shuf", "vseq"))
    ev.add_argument("--strategy", choices=("det",), default="det")
    ev.add_argument("--fuel", type=_positive)
    ev.add_argument("--trace", action="store_true")

    tr = sub.add_parser("translate", help="move a term between calculi")
    tr.add_argument("term")
    tr.add_argument("--from", dest="source", required=True, choices=("vsub", "vsubk", "vseq"))
    tr.add_argument("--to", dest="target", required=True, choices=("vsubk", "vseq", "pure"))

    eq = sub.add_parser("equiv", help="decide structural equivalence")
    eq.add_argument("left")
    eq.add_argument("right")
    eq.add_argument("--rel", choices=("struct", "structseq"), default="struct")
    eq.add_argument("--method", choices=("float", "search"), default="float")

    cp = sub.add_parser("compare", help="run one ES-free term in every calculus")
    cp.add_argument("term")
    cp.add_argument("--fuel", type=_positive)

    ck = sub.add_parser("check", help="run a named property ('check list' lists them)")
    ck.add_argument("property")
    ck.add_argument("--trials", type=_positive, default=1000)
    ck.add_argument("--seed", type=int, default=0)
    ck.add_argument("--max-size", type=_positive, default=25)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    fmt = args.format
    try:
        if args.command == "eval":
            return run_eval(_read(args.term), args.calc, args.fuel, args.trace, fmt)
        if args.command == "translate":
            return run_translate(_read(args.term), args.source, args.target, fmt)
        if args.command == "equiv":
            return run_equiv(_read(args.left), _read(args.right), args.rel, args.method, fmt)
        if args.command == "compare":
            return run_compare(_read(args.term), args.fuel, fmt)
        return run_check(args.property, args.trials, args.seed, args.max_size, fmt)
    except ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except LanguageError as exc:
        print(f"language error: {exc}", file=sys.stderr)
        return EXIT_LANGUAGE
    except ClassTooLarge as exc:
        print(f"search budget exceeded: {exc}", file=sys.stderr)
        return EXIT_BUDGET


if __name__ == "__main__":
    sys.exit(main())
