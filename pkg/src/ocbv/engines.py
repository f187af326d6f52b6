"""Redex enumeration, contraction and fuelled evaluation.

Calculi: ``plot`` (naive Open CBV), ``fire`` (fireballs), ``vsub`` (value
substitution at a distance), ``vsubk`` (its kernel) and ``shuf`` (shuffling).
A redex is addressed by a path of child selectors from the root; evaluation
contexts are never built, each calculus just decides which children it
descends into.
"""

from __future__ import annotations

import enum
import os
from collections import Counter
from dataclasses import dataclass, field
from typing import Callable, Iterable, Optional, Sequence

from .terms import (
    ES,
    Abs,
    App,
    LanguageError,
    Term,
    Var,
    free_vars,
    fresh,
    has_es,
    in_kernel,
    is_inert,
    is_value,
    peel,
    print_term,
    rename,
    size,
    substitute,
    wrap,
)

CALCULI = ("plot", "fire", "vsub", "vsubk", "shuf")

FUN, ARG, ES_BODY, ES_DEF, LAM_BODY = "FunOf", "ArgOf", "BodyOfES", "DefOfES", "BodyOfAbs"

DEFAULT_FUEL = 1000


def default_fuel() -> int:
    """1000, unless ``OCBV_FUEL`` says otherwise."""
    raw = os.environ.get("OCBV_FUEL")
    if raw:
        value = int(raw)
        if value <= 0:
            raise ValueError("OCBV_FUEL must be positive")
        return value
    return DEFAULT_FUEL


class Rule(str, enum.Enum):
    BETA_ABS = "BetaAbs"
    BETA_VAR = "BetaVar"
    BETA_INERT = "BetaInert"
    MULT = "Mult"
    EXP_ABS = "ExpAbs"
    EXP_VAR = "ExpVar"
    BETA_SHUF = "BetaShuf"
    SIGMA_L = "SigmaL"
    SIGMA_R = "SigmaR"

    def __str__(self) -> str:
        return self.value


RULES_OF = {
    "plot": (Rule.BETA_ABS, Rule.BETA_VAR),
    "fire": (Rule.BETA_ABS, Rule.BETA_INERT),
    "vsub": (Rule.MULT, Rule.EXP_ABS, Rule.EXP_VAR),
    "vsubk": (Rule.MULT, Rule.EXP_ABS, Rule.EXP_VAR),
    "shuf": (Rule.BETA_SHUF, Rule.SIGMA_L, Rule.SIGMA_R),
}

M_RULES = frozenset({Rule.MULT})
E_RULES = frozenset({Rule.EXP_ABS, Rule.EXP_VAR})
SIGMA_RULES = frozenset({Rule.SIGMA_L, Rule.SIGMA_R})


@dataclass(frozen=True)
class RedexSite:
    path: tuple
    rule: Rule

    def __str__(self) -> str:
        return f"{self.rule.value} @ [{', '.join(self.path)}]"


class StaleSite(ValueError):
    """The addressed subterm is not a redex of the requested rule."""


# -- language guards --------------------------------------------------------

def check_language(t: Term, calc: str) -> None:
    if calc not in RULES_OF:
        raise ValueError(f"unknown calculus {calc!r}")
    if calc in ("plot", "fire", "shuf") and has_es(t):
        raise LanguageError(f"{calc} terms cannot contain explicit substitutions")
    if calc == "vsubk" and not in_kernel(t):
        raise LanguageError("vsubk terms must apply only to values")


# -- root matching ----------------------------------------------------------

def _root_rules(t: Term, calc: str) -> list:
    found = []
    if calc in ("plot", "fire"):
        if isinstance(t, App) and isinstance(t.fun, Abs):
            if isinstance(t.arg, Abs):
                found.append(Rule.BETA_ABS)
            elif calc == "plot" and isinstance(t.arg, Var):
                found.append(Rule.BETA_VAR)
            elif calc == "fire" and is_inert(t.arg):
                found.append(Rule.BETA_INERT)
    elif calc in ("vsub", "vsubk"):
        if isinstance(t, App):
            if isinstance(peel(t.fun)[0], Abs):
                found.append(Rule.MULT)
        elif isinstance(t, ES):
            core = peel(t.defn)[0]
            if isinstance(core, Abs):
                found.append(Rule.EXP_ABS)
            elif isinstance(core, Var):
                found.append(Rule.EXP_VAR)
    else:
        if isinstance(t, App):
            if isinstance(t.fun, Abs) and is_value(t.arg):
                found.append(Rule.BETA_SHUF)
            if isinstance(t.fun, App) and isinstance(t.fun.fun, Abs):
                found.append(Rule.SIGMA_L)
            if is_value(t.fun) and isinstance(t.arg, App) and isinstance(t.arg.fun, Abs):
                found.append(Rule.SIGMA_R)
    return found


def _children(t: Term, calc: str):
    """Children that sit in evaluation (or balanced) position, left to right."""
    if isinstance(t, App):
        yield FUN, t.fun
        if calc == "shuf" and isinstance(t.fun, Abs):
            yield (FUN, LAM_BODY), t.fun.body
        yield ARG, t.arg
    elif isinstance(t, ES):
        yield ES_BODY, t.body
        yield ES_DEF, t.defn


def enumerate_redexes(t: Term, calc: str, rules: Optional[Iterable[Rule]] = None) -> list:
    """All redexes of ``t`` in ``calc``, leftmost-outermost first."""
    check_language(t, calc)
    allowed = None if rules is None else frozenset(rules)
    out: list = []
    _collect(t, calc, (), allowed, out)
    return out


def _collect(t, calc, path, allowed, out):
    for rule in _root_rules(t, calc):
        if allowed is None or rule in allowed:
            out.append(RedexSite(path, rule))
    for sel, child in _children(t, calc):
        sub = path + (sel if isinstance(sel, tuple) else (sel,))
        _collect(child, calc, sub, allowed, out)


# -- contraction ------------------------------------------------------------

def subterm_at(t: Term, path: Sequence[str]) -> Term:
    for sel in path:
        t = _child(t, sel)
    return t


def _child(t: Term, sel: str) -> Term:
    if sel == FUN and isinstance(t, App):
        return t.fun
    if sel == ARG and isinstance(t, App):
        return t.arg
    if sel == ES_BODY and isinstance(t, ES):
        return t.body
    if sel == ES_DEF and isinstance(t, ES):
        return t.defn
    if sel == LAM_BODY and isinstance(t, Abs):
        return t.body
    raise StaleSite(f"selector {sel} does not apply to {print_term(t)}")


def replace_at(t: Term, path: Sequence[str], new: Term) -> Term:
    if not path:
        return new
    sel, rest = path[0], path[1:]
    if sel == FUN and isinstance(t, App):
        return App(replace_at(t.fun, rest, new), t.arg)
    if sel == ARG and isinstance(t, App):
        return App(t.fun, replace_at(t.arg, rest, new))
    if sel == ES_BODY and isinstance(t, ES):
        return ES(replace_at(t.body, rest, new), t.binder, t.defn)
    if sel == ES_DEF and isinstance(t, ES):
        return ES(t.body, t.binder, replace_at(t.defn, rest, new))
    if sel == LAM_BODY and isinstance(t, Abs):
        return Abs(t.binder, replace_at(t.body, rest, new))
    raise StaleSite(f"selector {sel} does not apply to {print_term(t)}")


def freshen_spine(t: Term, avoid: frozenset) -> Term:
    """Rename the binders of the ES spine on top of ``t`` away from ``avoid``."""
    if not isinstance(t, ES):
        return t
    binder, body = t.binder, t.body
    if binder in avoid:
        new = fresh(binder)
        body = rename(body, binder, new)
        binder = new
    return ES(freshen_spine(body, avoid), binder, t.defn)


def contract(t: Term, rule: Rule) -> Term:
    """Fire ``rule`` at the root of ``t``."""
    if rule in (Rule.BETA_ABS, Rule.BETA_VAR, Rule.BETA_INERT, Rule.BETA_SHUF):
        if not (isinstance(t, App) and isinstance(t.fun, Abs)):
            raise StaleSite(f"{rule}: not a beta-redex")
        ok = {
            Rule.BETA_ABS: isinstance(t.arg, Abs),
            Rule.BETA_VAR: isinstance(t.arg, Var),
            Rule.BETA_INERT: not has_es(t.arg) and is_inert(t.arg),
            Rule.BETA_SHUF: is_value(t.arg),
        }[rule]
        if not ok:
            raise StaleSite(f"{rule}: argument has the wrong shape")
        return substitute(t.fun.body, t.fun.binder, t.arg)

    if rule == Rule.SIGMA_L:
        if not (isinstance(t, App) and isinstance(t.fun, App) and isinstance(t.fun.fun, Abs)):
            raise StaleSite("SigmaL: expected ((\\x.t) u) s")
        lam, u, s = t.fun.fun, t.fun.arg, t.arg
        x, body = lam.binder, lam.body
        if x in free_vars(s):
            x = fresh(x)
            body = rename(body, lam.binder, x)
        return App(Abs(x, App(body, s)), u)

    if rule == Rule.SIGMA_R:
        if not (
            isinstance(t, App)
            and is_value(t.fun)
            and isinstance(t.arg, App)
            and isinstance(t.arg.fun, Abs)
        ):
            raise StaleSite("SigmaR: expected v ((\\x.s) u)")
        v, lam, u = t.fun, t.arg.fun, t.arg.arg
        x, body = lam.binder, lam.body
        if x in free_vars(v):
            x = fresh(x)
            body = rename(body, lam.binder, x)
        return App(Abs(x, App(v, body)), u)

    if rule == Rule.MULT:
        if not isinstance(t, App):
            raise StaleSite("Mult: expected an application")
        fun = freshen_spine(t.fun, free_vars(t.arg))
        core, spine = peel(fun)
        if not isinstance(core, Abs):
            raise StaleSite("Mult: function part is not L<\\x.t>")
        return wrap(ES(core.body, core.binder, t.arg), spine)

    if rule in (Rule.EXP_ABS, Rule.EXP_VAR):
        if not isinstance(t, ES):
            raise StaleSite(f"{rule}: expected an explicit substitution")
        defn = freshen_spine(t.defn, free_vars(t.body) - {t.binder})
        core, spine = peel(defn)
        want = Abs if rule == Rule.EXP_ABS else Var
        if not isinstance(core, want):
            raise StaleSite(f"{rule}: definition is not L<{'abstraction' if want is Abs else 'variable'}>")
        return wrap(substitute(t.body, t.binder, core), spine)

    raise ValueError(f"unknown rule {rule!r}")


def step(t: Term, site: RedexSite) -> Term:
    return replace_at(t, site.path, contract(subterm_at(t, site.path), site.rule))


# -- derivations ------------------------------------------------------------

NORMAL, FUELLED = "Normal", "Fuelled"


@dataclass
class Derivation:
    calc: str
    start: Term
    steps: list = field(default_factory=list)  # [(RedexSite, Term)]
    status: str = NORMAL

    @property
    def end(self) -> Term:
        return self.steps[-1][1] if self.steps else self.start

    @property
    def counts(self) -> Counter:
        return step_counts(self)

    def __len__(self) -> int:
        return len(self.steps)

    def count(self, *rules: Rule) -> int:
        c = self.counts
        return sum(c[r] for r in rules)

    @property
    def m(self) -> int:
        return self.count(Rule.MULT)

    @property
    def e(self) -> int:
        return self.count(Rule.EXP_ABS, Rule.EXP_VAR)

    def trace_lines(self) -> list:
        return [
            f"{site.rule.value} @ [{', '.join(site.path)}] : {print_term(term)}"
            for site, term in self.steps
        ]


def step_counts(d: Derivation) -> Counter:
    c = Counter({r: 0 for r in Rule})
    for site, _ in d.steps:
        c[site.rule] += 1
    return c


Chooser = Callable[[Term, list], RedexSite]


def evaluate(
    t: Term,
    calc: str,
    strategy: Optional[Chooser] = None,
    fuel: Optional[int] = None,
    rules: Optional[Iterable[Rule]] = None,
    size_limit: Optional[int] = None,
) -> Derivation:
    """Reduce until normal or out of fuel.

    ``strategy`` picks one site among the enumerated ones; by default the
    first (leftmost-outermost).  ``rules`` restricts the reduction to a
    subset of the calculus rules.  ``size_limit``, when given, stops the run
    as ``Fuelled`` once a term grows past that many constructors.
    """
    fuel = default_fuel() if fuel is None else fuel
    if fuel <= 0:
        raise ValueError("fuel must be positive")
    rules = None if rules is None else frozenset(rules)
    d = Derivation(calc, t)
    cur = t
    while True:
        sites = enumerate_redexes(cur, calc, rules)
        if not sites:
            d.status = NORMAL
            return d
        if len(d.steps) >= fuel or (size_limit is not None and size(cur) > size_limit):
            d.status = FUELLED
            return d
        site = sites[0] if strategy is None else strategy(cur, sites)
        cur = step(cur, site)
        d.steps.append((site, cur))


def reducts(t: Term, calc: str, rules: Optional[Iterable[Rule]] = None) -> list:
    """``[(site, result)]`` for every one-step reduct."""
    return [(s, step(t, s)) for s in enumerate_redexes(t, calc, rules)]


def _normal_form(t: Term, rules) -> Term:
    cur = t
    while True:
        sites = enumerate_redexes(cur, "vsub", rules)
        if not sites:
            return cur
        cur = step(cur, sites[0])


def m_normal_form(t: Term) -> Term:
    """The multiplicative normal form (``->m`` terminates)."""
    return _normal_form(t, M_RULES)


def e_normal_form(t: Term) -> Term:
    """The exponential normal form (``->e`` terminates)."""
    return _normal_form(t, E_RULES)
