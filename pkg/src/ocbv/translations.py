"""Translations between the calculi and the derivation-level simulations.

Each simulation builds the target derivation step by step and re-checks
the relation it promises (unfolding, ``≡`` or syntactic identity) as it
goes.  When a simulation has to be repaired by ``≡``, the repair is carried
over to the real derivation by finding a matching step of the same rule on
the real term (``≡`` is a strong bisimulation), so the returned target is an
honest derivation with no equivalence steps inside.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from .engines import (
    E_RULES,
    FUELLED,
    M_RULES,
    NORMAL,
    Derivation,
    RedexSite,
    Rule,
    enumerate_redexes,
    evaluate,
    m_normal_form,
    step,
    subterm_at,
)
from .equiv import float_equiv, transport_step
from .sequent import (
    EPS,
    LAM_BAR,
    MU_TILDE,
    Command,
    MuTilde,
    SAbs,
    SeqDerivation,
    Stack,
    SVar,
    alpha_eq_cmd,
    append_cmd,
    enumerate_seq_redexes,
    print_command,
    step_seq,
)
from .terms import (
    ES,
    Abs,
    App,
    LanguageError,
    Term,
    Var,
    alpha_eq,
    clean_decompose,
    free_vars,
    fresh,
    has_es,
    in_kernel,
    is_fireball,
    print_term,
    rename,
    unfold,
    wrap,
)


class SimulationError(AssertionError):
    """A simulation could not be built: the corresponding theorem would be false."""


# -- term translations ------------------------------------------------------

def to_kernel(t: Term) -> Term:
    """Kernel translation: every argument is named by a fresh ES."""
    if isinstance(t, Var):
        return t
    if isinstance(t, Abs):
        return Abs(t.binder, to_kernel(t.body))
    if isinstance(t, App):
        x = fresh()
        return ES(App(to_kernel(t.fun), Var(x)), x, to_kernel(t.arg))
    return ES(to_kernel(t.body), t.binder, to_kernel(t.defn))


def to_sequent_value(v: Term):
    if isinstance(v, Var):
        return SVar(v.name)
    if isinstance(v, Abs):
        return SAbs(v.binder, to_sequent(v.body))
    raise LanguageError(f"not a value: {print_term(v)}")


def to_sequent(t: Term) -> Command:
    """Kernel terms to commands; ES become mu~ appended to their definition."""
    if isinstance(t, (Var, Abs)):
        return Command(to_sequent_value(t), EPS)
    if isinstance(t, App):
        if not isinstance(t.arg, (Var, Abs)):
            raise LanguageError(f"not a kernel term: {print_term(t)}")
        return append_cmd(to_sequent(t.fun), Stack(to_sequent_value(t.arg), EPS))
    return append_cmd(to_sequent(t.defn), MuTilde(t.binder, to_sequent(t.body)))


def from_sequent_value(v) -> Term:
    if isinstance(v, SVar):
        return Var(v.name)
    return Abs(v.binder, from_sequent(v.body))


def from_sequent(c: Command) -> Term:
    """Commands back to kernel terms; environments read as evaluation contexts."""
    return _plug_env(c.env, from_sequent_value(c.value))


def _plug_env(e, t: Term) -> Term:
    while isinstance(e, Stack):
        t = App(t, from_sequent_value(e.head))
        e = e.tail
    if isinstance(e, MuTilde):
        return ES(from_sequent(e.body), e.binder, t)
    return t


# -- witnesses --------------------------------------------------------------

@dataclass
class SimulationWitness:
    source: object
    target: object
    residue: object
    relation_checked: str
    notes: dict = field(default_factory=dict)


def _append(d: Derivation, site: RedexSite, term: Term) -> None:
    d.steps.append((site, term))


# -- fireballs in value substitution ----------------------------------------

def _float_to_spine_bottom(t: Term, path, binder_hint: str):
    """Move the ES sitting at ``path`` inside a clean body to the bottom of the spine.

    The body of a clean term is pure, so the ES can only have applications
    above it; AppLeft/AppRight carry it up (renaming its binder fresh).
    """
    new = subterm_at(t, path)
    assert isinstance(new, ES)
    x = fresh(binder_hint)
    inner = ES(rename(new.body, new.binder, x), x, new.defn)
    # rebuild the path with the ES removed, then wrap it around the result
    def strip(s, p):
        if not p:
            return inner.body
        sel, rest = p[0], p[1:]
        if sel == "FunOf":
            return App(strip(s.fun, rest), s.arg)
        if sel == "ArgOf":
            return App(s.fun, strip(s.arg, rest))
        raise SimulationError("ES must be reached through applications only")

    return ES(strip(t, path), x, inner.defn)


def simulate_fire_step(t: Term, rule: Rule, path: Optional[tuple] = None):
    """Project one fireball step of ``unfold(t)`` onto the clean term ``t``.

    Returns ``(steps, s)`` where ``steps`` are the vsub steps taken on ``t``
    (Mult, and ExpAbs for an abstraction argument) and ``s`` is clean with
    ``unfold(s)`` the fireball contractum.  For an inert argument the Mult
    step is followed by an ``≡``-repair that is not listed among ``steps``.
    """
    dec = clean_decompose(t)
    if dec is None:
        raise SimulationError(f"not clean: {print_term(t)}")
    pure = unfold(t)
    sites = enumerate_redexes(pure, "fire", {rule})
    if path is not None:
        sites = [s for s in sites if s.path == tuple(path)]
    if not sites:
        raise SimulationError(f"no {rule} redex in the unfolding of {print_term(t)}")
    site = sites[0]
    expected = step(pure, site)

    # the same position in the body of t is a beta-redex; spine bindings are
    # inert, so the redex cannot come from inside a binding
    m_path = tuple(("BodyOfES",) * len(dec.bindings)) + site.path
    redex = subterm_at(t, m_path)
    if not (isinstance(redex, App) and isinstance(redex.fun, Abs)):
        raise SimulationError("redex of the unfolding is not visible in the body")
    m_site = RedexSite(m_path, Rule.MULT)
    after_m = step(t, m_site)
    steps = [(m_site, after_m)]
    if rule == Rule.BETA_ABS:
        e_site = RedexSite(m_path, Rule.EXP_ABS)
        s = step(after_m, e_site)
        steps.append((e_site, s))
    else:
        # float the new ES out of the body to become the innermost binding
        body_path = site.path
        dec_after = _peel_n(after_m, len(dec.bindings))
        floated = _float_to_spine_bottom(dec_after, body_path, redex.fun.binder)
        s = wrap(floated, dec.bindings)
        if not float_equiv(after_m, s):
            raise SimulationError("≡-repair does not preserve ≡")
    if clean_decompose(s) is None:
        raise SimulationError(f"result not clean: {print_term(s)}")
    if not alpha_eq(unfold(s), expected):
        raise SimulationError(
            f"unfolding mismatch: {print_term(unfold(s))} vs {print_term(expected)}"
        )
    return steps, s


def _peel_n(t: Term, n: int) -> Term:
    for _ in range(n):
        t = t.body
    return t


def simulate_fire_derivation(d: Derivation) -> SimulationWitness:
    """Build a vsub derivation with ``Mult = |d|`` and ``ExpAbs = |d|_betaλ``.

    The clean term ``s`` of each step is tracked alongside a real vsub term
    ``r ≡ s``; each step on ``s`` is matched by a step of the same rule on ``r``.
    """
    if d.calc != "fire" or has_es(d.start):
        raise ValueError("expects a fireball derivation from a pure term")
    e = Derivation("vsub", d.start)
    s = r = d.start
    for site, after in d.steps:
        steps, s_next = simulate_fire_step(s, site.rule, site.path)
        for (vsite, vterm), is_last in zip(steps, [False] * (len(steps) - 1) + [True]):
            target = s_next if is_last else vterm
            found = transport_step(r, target, {vsite.rule})
            if found is None:
                raise SimulationError(
                    f"no {vsite.rule} step of {print_term(r)} matches {print_term(target)}"
                )
            r = found[1]
            _append(e, found[0], r)
        s = s_next
        if not alpha_eq(unfold(s), after):
            raise SimulationError("clean term drifted from the fireball derivation")
    e.status = NORMAL if not enumerate_redexes(e.end, "vsub") else FUELLED
    return SimulationWitness(d, e, s, "target end ≡ residue; residue clean; unfold(residue) = source end")


def complete_with_evar(e: Derivation, fuel: int = 100_000) -> Derivation:
    """Extend ``e`` with ExpVar steps only, until no ExpVar redex is left."""
    tail = evaluate(e.end, "vsub", fuel=fuel, rules={Rule.EXP_VAR})
    out = Derivation("vsub", e.start, list(e.steps) + list(tail.steps), tail.status)
    if tail.status == NORMAL and enumerate_redexes(out.end, "vsub"):
        out.status = FUELLED
    return out


def staged_vsub_eval(t: Term, fuel: Optional[int] = None) -> Derivation:
    """``{Mult, ExpAbs}`` to exhaustion, then ``ExpVar`` only."""
    first = evaluate(t, "vsub", fuel=fuel, rules={Rule.MULT, Rule.EXP_ABS})
    if first.status == FUELLED:
        return first
    remaining = None if fuel is None else max(fuel - len(first), 1)
    second = evaluate(first.end, "vsub", fuel=remaining, rules={Rule.EXP_VAR})
    d = Derivation("vsub", t, list(first.steps) + list(second.steps), second.status)
    if fuel is not None and len(d) > fuel:
        d.steps = d.steps[:fuel]
        d.status = FUELLED
    if d.status == NORMAL and enumerate_redexes(d.end, "vsub"):
        # ExpVar steps cannot create Mult or ExpAbs redexes; if they did, say so
        raise SimulationError(f"staged evaluation left redexes in {print_term(d.end)}")
    return d


# -- shuffling in value substitution ----------------------------------------

@dataclass
class ShufStepEvidence:
    rule: Rule
    source_mnf: Term
    target_mnf: Term
    e_site: Optional[RedexSite] = None
    m_steps: int = 0


def project_shuf_step(t: Term, site: RedexSite) -> ShufStepEvidence:
    """Relate the m-normal forms of ``t`` and of its shuffling reduct."""
    u = step(t, site)
    mt, mu = m_normal_form(t), m_normal_form(u)
    ev = ShufStepEvidence(site.rule, mt, mu)
    if site.rule in (Rule.SIGMA_L, Rule.SIGMA_R):
        if not float_equiv(mt, mu):
            raise SimulationError(f"sigma step: m-normal forms not ≡ for {print_term(t)}")
        return ev
    for e_site in enumerate_redexes(mt, "vsub", E_RULES):
        after = step(mt, e_site)
        m_run = evaluate(after, "vsub", fuel=10**6, rules=M_RULES)
        if alpha_eq(m_run.end, mu):
            ev.e_site, ev.m_steps = e_site, len(m_run)
            return ev
    raise SimulationError(f"BetaShuf step: no e-step relates the m-normal forms of {print_term(t)}")


def project_shuf_derivation(d: Derivation) -> SimulationWitness:
    """A vsub derivation with as many e-steps as ``d`` has BetaShuf steps."""
    if d.calc != "shuf" or has_es(d.start):
        raise ValueError("expects a shuffling derivation from a pure term")
    start = d.start
    first = evaluate(start, "vsub", fuel=10**6, rules=M_RULES)
    e = Derivation("vsub", start, list(first.steps))
    r = first.end  # r ≡ m-nf(current source term)
    prev = start
    for site, after in d.steps:
        if site.rule == Rule.BETA_SHUF:
            target = m_normal_form(after)
            matched = None
            for e_site in enumerate_redexes(r, "vsub", E_RULES):
                r1 = step(r, e_site)
                m_run = evaluate(r1, "vsub", fuel=10**6, rules=M_RULES)
                if float_equiv(m_run.end, target):
                    matched = (e_site, r1, m_run)
                    break
            if matched is None:
                raise SimulationError(f"cannot project BetaShuf step from {print_term(prev)}")
            e_site, r1, m_run = matched
            _append(e, e_site, r1)
            e.steps.extend(m_run.steps)
            r = m_run.end
        prev = after
    residue = m_normal_form(d.end)
    if not float_equiv(r, residue):
        raise SimulationError("projection drifted from the m-normal form")
    e.status = NORMAL if not enumerate_redexes(r, "vsub") else FUELLED
    return SimulationWitness(d, e, residue, "target end ≡ m-nf(source end)")


# -- value substitution in its kernel ---------------------------------------

def simulate_vsub_in_kernel(d: Derivation) -> SimulationWitness:
    """Mult -> Mult then ExpVar; ExpAbs -> ExpAbs; ExpVar -> ExpVar; all up to ``≡``."""
    if d.calc not in ("vsub", "vsubk"):
        raise ValueError("expects a vsub derivation")
    start = to_kernel(d.start)
    e = Derivation("vsubk", start)
    r = start
    for site, after in d.steps:
        target = to_kernel(after)
        if site.rule == Rule.MULT:
            found = None
            for m_site in enumerate_redexes(r, "vsubk", M_RULES):
                r1 = step(r, m_site)
                hit = transport_step(r1, target, {Rule.EXP_VAR}, calc="vsubk")
                if hit is not None:
                    found = (m_site, r1, hit)
                    break
            if found is None:
                raise SimulationError(f"kernel: no Mult;ExpVar pair for {print_term(r)}")
            m_site, r1, (v_site, r2) = found
            _append(e, m_site, r1)
            _append(e, v_site, r2)
            r = r2
        else:
            hit = transport_step(r, target, {site.rule}, calc="vsubk")
            if hit is None:
                raise SimulationError(f"kernel: no {site.rule} step for {print_term(r)}")
            _append(e, *hit)
            r = hit[1]
    e.status = NORMAL if not enumerate_redexes(r, "vsubk") else FUELLED
    return SimulationWitness(d, e, to_kernel(d.end), "target end ≡ kernel(source end)")


# -- kernel in sequents -----------------------------------------------------

def simulate_kernel_in_seq(d: Derivation) -> SeqDerivation:
    """Step-for-step image: Mult -> LamBar, ExpAbs/ExpVar -> MuTilde."""
    if d.calc not in ("vsub", "vsubk") or not in_kernel(d.start):
        raise ValueError("expects a derivation over kernel terms")
    c = to_sequent(d.start)
    out = SeqDerivation(c)
    for site, after in d.steps:
        want = LAM_BAR if site.rule == Rule.MULT else MU_TILDE
        target = to_sequent(after)
        hit = None
        for s in enumerate_seq_redexes(c, {want}):
            c2 = step_seq(c, s)
            if alpha_eq_cmd(c2, target):
                hit = (s, c2)
                break
        if hit is None:
            raise SimulationError(
                f"sequent: no {want} step from {print_command(c)} to {print_command(target)}"
            )
        out.steps.append(hit)
        c = hit[1]
    out.status = d.status
    return out
