"""The value sequent calculus: commands, environments, append, reduction.

Concrete syntax (ours; there is no standard ASCII form)::

    command := "<" value "|" env ">"
    value   := var | "\\" var "." command
    env     := "#" | "mu~" var "." command | value "." env

``#`` is the empty environment (the output marker).
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import Callable, Optional, Union

from .engines import FUELLED, NORMAL, StaleSite, default_fuel
from .terms import Tokens, fresh


@dataclass(frozen=True)
class SVar:
    name: str


@dataclass(frozen=True)
class SAbs:
    binder: str
    body: "Command"


@dataclass(frozen=True)
class Eps:
    pass


@dataclass(frozen=True)
class MuTilde:
    binder: str
    body: "Command"


@dataclass(frozen=True)
class Stack:
    head: "SeqValue"
    tail: "Env"


@dataclass(frozen=True)
class Command:
    value: "SeqValue"
    env: "Env"


SeqValue = Union[SVar, SAbs]
Env = Union[Eps, MuTilde, Stack]
EPS = Eps()

LAM_BAR, MU_TILDE = "LamBar", "MuTilde"


# -- binding ----------------------------------------------------------------

def fv_cmd(c: Command) -> frozenset:
    return fv_value(c.value) | fv_env(c.env)


def fv_value(v: SeqValue) -> frozenset:
    if isinstance(v, SVar):
        return frozenset((v.name,))
    return fv_cmd(v.body) - {v.binder}


def fv_env(e: Env) -> frozenset:
    if isinstance(e, Eps):
        return frozenset()
    if isinstance(e, MuTilde):
        return fv_cmd(e.body) - {e.binder}
    return fv_value(e.head) | fv_env(e.tail)


def subst_cmd(c: Command, x: str, v: SeqValue) -> Command:
    """Capture-avoiding ``c{x:=v}``."""
    return _sc(c, x, v, fv_value(v))


def _sc(c, x, v, fvv):
    return Command(_sv(c.value, x, v, fvv), _se(c.env, x, v, fvv))


def _sv(w, x, v, fvv):
    if isinstance(w, SVar):
        return v if w.name == x else w
    binder, body = _bind(w.binder, w.body, x, fvv)
    if binder == x:
        return w
    return SAbs(binder, _sc(body, x, v, fvv))


def _se(e, x, v, fvv):
    if isinstance(e, Eps):
        return e
    if isinstance(e, Stack):
        return Stack(_sv(e.head, x, v, fvv), _se(e.tail, x, v, fvv))
    binder, body = _bind(e.binder, e.body, x, fvv)
    if binder == x:
        return e
    return MuTilde(binder, _sc(body, x, v, fvv))


def _bind(binder, body, x, fvv):
    if binder != x and binder in fvv and x in fv_cmd(body):
        new = fresh(binder)
        return new, rename_cmd(body, binder, new)
    return binder, body


def rename_cmd(c: Command, x: str, y: str) -> Command:
    return _sc(c, x, SVar(y), frozenset((y,)))


def canonical_cmd(c: Command):
    """Hashable alpha-invariant key."""
    return _kc(c, {}, 0)


def _kc(c, env, depth):
    return ("<>", _kv(c.value, env, depth), _ke(c.env, env, depth))


def _kv(v, env, depth):
    if isinstance(v, SVar):
        level = env.get(v.name)
        return ("f", v.name) if level is None else ("b", level)
    inner = dict(env)
    inner[v.binder] = depth
    return ("\\", _kc(v.body, inner, depth + 1))


def _ke(e, env, depth):
    if isinstance(e, Eps):
        return ("eps",)
    if isinstance(e, Stack):
        return (".", _kv(e.head, env, depth), _ke(e.tail, env, depth))
    inner = dict(env)
    inner[e.binder] = depth
    return ("mu", _kc(e.body, inner, depth + 1))


def alpha_eq_cmd(c: Command, d: Command) -> bool:
    return canonical_cmd(c) == canonical_cmd(d)


def size_cmd(c: Command) -> int:
    return size_value(c.value) + size_env(c.env)


def size_value(v: SeqValue) -> int:
    return 1 if isinstance(v, SVar) else 1 + size_cmd(v.body)


def size_env(e: Env) -> int:
    if isinstance(e, Eps):
        return 1
    if isinstance(e, MuTilde):
        return 1 + size_cmd(e.body)
    return 1 + size_value(e.head) + size_env(e.tail)


def output_markers(c: Command) -> int:
    """Occurrences of the empty environment outside every abstraction."""
    n, e = 0, c.env
    while True:
        if isinstance(e, Eps):
            return n + 1
        if isinstance(e, Stack):
            e = e.tail
        else:
            return n + output_markers(e.body)


def validate(c: Command) -> None:
    """Check well-formedness: types of every node and one output marker per command."""
    if not isinstance(c, Command):
        raise TypeError(f"not a command: {c!r}")
    _validate_value(c.value)
    e = c.env
    while isinstance(e, Stack):
        _validate_value(e.head)
        e = e.tail
    if isinstance(e, MuTilde):
        validate(e.body)
    elif not isinstance(e, Eps):
        raise TypeError(f"not an environment: {e!r}")
    if output_markers(c) != 1:
        raise ValueError("a command must have exactly one output marker")


def _validate_value(v) -> None:
    if isinstance(v, SAbs):
        validate(v.body)
    elif not isinstance(v, SVar):
        raise TypeError(f"not a value: {v!r}")


# -- append -----------------------------------------------------------------

def append_cmd(c: Command, e: Env) -> Command:
    """``c@e``: plug ``e`` into the output marker of ``c``."""
    return Command(c.value, append_env(c.env, e))


def append_env(e0: Env, e: Env) -> Env:
    if isinstance(e0, Eps):
        return e
    if isinstance(e0, Stack):
        return Stack(e0.head, append_env(e0.tail, e))
    binder, body = e0.binder, e0.body
    if binder in fv_env(e):
        new = fresh(binder)
        body = rename_cmd(body, binder, new)
        binder = new
    return MuTilde(binder, append_cmd(body, e))


# -- reduction --------------------------------------------------------------

@dataclass(frozen=True)
class SeqSite:
    depth: int  # how many mu~ bodies to enter along the environment spine
    rule: str

    def __str__(self) -> str:
        return f"{self.rule} @ mu~^{self.depth}"


def _root_rule(c: Command) -> Optional[str]:
    if isinstance(c.env, MuTilde):
        return MU_TILDE
    if isinstance(c.value, SAbs) and isinstance(c.env, Stack):
        return LAM_BAR
    return None


def _mu_child(c: Command) -> Optional[MuTilde]:
    e = c.env
    while isinstance(e, Stack):
        e = e.tail
    return e if isinstance(e, MuTilde) else None


def enumerate_seq_redexes(c: Command, rules=None) -> list:
    """Redexes under ``C ::= [] | D<mu~x.C>``, outermost first."""
    out, depth = [], 0
    while c is not None:
        rule = _root_rule(c)
        if rule is not None and (rules is None or rule in rules):
            out.append(SeqSite(depth, rule))
        mu = _mu_child(c)
        c = mu.body if mu is not None else None
        depth += 1
    return out


def contract_cmd(c: Command, rule: str) -> Command:
    if rule == MU_TILDE:
        if not isinstance(c.env, MuTilde):
            raise StaleSite("mu~: environment is not mu~x.c")
        return subst_cmd(c.env.body, c.env.binder, c.value)
    if rule == LAM_BAR:
        if not (isinstance(c.value, SAbs) and isinstance(c.env, Stack)):
            raise StaleSite("lambda-bar: expected <\\x.c | v.e>")
        lam = c.value
        return Command(c.env.head, append_env(MuTilde(lam.binder, lam.body), c.env.tail))
    raise ValueError(f"unknown sequent rule {rule!r}")


def _rebuild(c: Command, depth: int, fn) -> Command:
    if depth == 0:
        return fn(c)
    heads, e = [], c.env
    while isinstance(e, Stack):
        heads.append(e.head)
        e = e.tail
    if not isinstance(e, MuTilde):
        raise StaleSite("no mu~ at this depth")
    new: Env = MuTilde(e.binder, _rebuild(e.body, depth - 1, fn))
    for h in reversed(heads):
        new = Stack(h, new)
    return Command(c.value, new)


def command_at(c: Command, depth: int) -> Command:
    for _ in range(depth):
        mu = _mu_child(c)
        if mu is None:
            raise StaleSite("no mu~ at this depth")
        c = mu.body
    return c


def step_seq(c: Command, site: SeqSite) -> Command:
    return _rebuild(c, site.depth, lambda sub: contract_cmd(sub, site.rule))


def seq_reducts(c: Command, rules=None) -> list:
    return [(s, step_seq(c, s)) for s in enumerate_seq_redexes(c, rules)]


@dataclass
class SeqDerivation:
    start: Command
    steps: list = field(default_factory=list)  # [(SeqSite, Command)]
    status: str = NORMAL

    @property
    def end(self) -> Command:
        return self.steps[-1][1] if self.steps else self.start

    @property
    def counts(self) -> Counter:
        c = Counter({LAM_BAR: 0, MU_TILDE: 0})
        for site, _ in self.steps:
            c[site.rule] += 1
        return c

    def __len__(self) -> int:
        return len(self.steps)

    def trace_lines(self) -> list:
        return [f"{site.rule} @ mu~^{site.depth} : {print_command(c)}" for site, c in self.steps]


def evaluate_seq(
    c: Command,
    strategy: Optional[Callable] = None,
    fuel: Optional[int] = None,
    rules=None,
    debug: bool = False,
) -> SeqDerivation:
    fuel = default_fuel() if fuel is None else fuel
    if fuel <= 0:
        raise ValueError("fuel must be positive")
    d = SeqDerivation(c)
    cur = c
    while True:
        sites = enumerate_seq_redexes(cur, rules)
        if not sites:
            d.status = NORMAL
            return d
        if len(d.steps) >= fuel:
            d.status = FUELLED
            return d
        site = sites[0] if strategy is None else strategy(cur, sites)
        cur = step_seq(cur, site)
        if debug:
            validate(cur)
        d.steps.append((site, cur))


# -- text -------------------------------------------------------------------

def print_command(c: Command) -> str:
    return "<" + print_value(c.value) + " | " + print_env(c.env) + ">"


def print_value(v: SeqValue) -> str:
    if isinstance(v, SVar):
        return v.name
    return "\\" + v.binder + "." + print_command(v.body)


def print_env(e: Env) -> str:
    if isinstance(e, Eps):
        return "#"
    if isinstance(e, MuTilde):
        return "mu~" + e.binder + "." + print_command(e.body)
    return print_value(e.head) + " . " + print_env(e.tail)


def parse_command(text: str) -> Command:
    toks = Tokens(text)
    c = _command(toks)
    toks.done()
    validate(c)
    return c


def _command(toks: Tokens) -> Command:
    toks.expect("<")
    v = _value(toks)
    toks.expect("|")
    e = _env(toks)
    toks.expect(">")
    return Command(v, e)


def _value(toks: Tokens) -> SeqValue:
    if toks.at("\\"):
        toks.i += 1
        x = toks.ident()
        toks.expect(".")
        return SAbs(x, _command(toks))
    if toks.peek()[0] != "ident":
        raise toks.fail({"identifier", "'\\'"})
    return SVar(toks.ident())


def _env(toks: Tokens) -> Env:
    if toks.at("#"):
        toks.i += 1
        return EPS
    if toks.at("mu~"):
        toks.i += 1
        x = toks.ident()
        toks.expect(".")
        return MuTilde(x, _command(toks))
    if toks.peek()[0] == "ident" or toks.at("\\"):
        v = _value(toks)
        toks.expect(".")
        return Stack(v, _env(toks))
    raise toks.fail({"'#'", "'mu~'", "identifier", "'\\'"})
