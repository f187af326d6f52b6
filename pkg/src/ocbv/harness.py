"""Random and exhaustive inputs, plus one named check per metatheorem.

Every check in ``PROPERTIES`` takes a single input and records failures on
a ``Report``; ``check_property`` runs it over seeded random inputs (trial
``i`` uses seed ``cfg.seed + i``) or over every input up to a size.
"""

from __future__ import annotations

import random
import time
from dataclasses import dataclass, replace
from functools import lru_cache
from typing import Callable, Iterator, Optional

from .engines import (
    E_RULES,
    FUELLED,
    M_RULES,
    NORMAL,
    SIGMA_RULES,
    Derivation,
    Rule,
    enumerate_redexes,
    evaluate,
    reducts,
    step,
)
from .equiv import (
    check_bisim_step,
    check_seq_bisim_step,
    deep_float_equiv,
    equiv_neighbors,
    float_equiv,
    seq_equiv_neighbors,
    seq_struct_equiv,
)
from .report import Report
from .sequent import (
    EPS,
    LAM_BAR,
    MU_TILDE,
    Command,
    MuTilde,
    SAbs,
    Stack,
    SVar,
    alpha_eq_cmd,
    append_cmd,
    append_env,
    canonical_cmd,
    enumerate_seq_redexes,
    fv_cmd,
    print_command,
    seq_reducts,
    step_seq,
    validate,
)
from .terms import (
    ES,
    Abs,
    App,
    Term,
    Var,
    alpha_eq,
    canonical,
    clean_decompose,
    count_es,
    free_vars,
    has_es,
    in_kernel,
    is_fireball,
    is_harmless,
    print_term,
    size,
    unfold,
)
from .translations import (
    SimulationError,
    complete_with_evar,
    from_sequent,
    project_shuf_derivation,
    simulate_fire_derivation,
    simulate_kernel_in_seq,
    simulate_vsub_in_kernel,
    staged_vsub_eval,
    to_kernel,
    to_sequent,
)

PURE, WITH_ES, VSUBK, SEQUENT = "Pure", "WithES", "Vsubk", "Sequent"
LANGUAGES = (PURE, WITH_ES, VSUBK, SEQUENT)

# runs whose terms grow past this many constructors count as not normalizing
SIZE_LIMIT = 4000


@dataclass(frozen=True)
class GenConfig:
    seed: int = 0
    max_size: int = 12
    free_var_pool: tuple = ("x", "y", "z")
    language: str = PURE
    abstraction_bias: float = 0.35

    def __post_init__(self):
        if self.max_size < 1:
            raise ValueError("max_size must be at least 1")
        if not 0.0 <= self.abstraction_bias <= 1.0:
            raise ValueError("abstraction_bias must lie in [0, 1]")
        if self.language not in LANGUAGES:
            raise ValueError(f"unknown language {self.language!r}")
        if not self.free_var_pool:
            raise ValueError("free_var_pool must not be empty")


BINDER_POOL = ("x", "y", "z", "w", "a", "b")


# -- random generation ------------------------------------------------------

def gen_term(cfg: GenConfig):
    """A random term (or command, for ``Sequent``) of size at most ``cfg.max_size``."""
    rng = random.Random(cfg.seed)
    if cfg.language == SEQUENT:
        sizes = [n for n in range(2, max(cfg.max_size, 2) + 1) if _cmd_ok(n)]
        return _gen_cmd(rng, rng.choice(sizes), [], cfg)
    n = rng.randint(1, cfg.max_size)
    return _gen(rng, n, [], cfg)


def _pick_var(rng, scope, cfg) -> str:
    if scope and rng.random() < 0.7:
        return rng.choice(scope)
    return rng.choice(cfg.free_var_pool)


def _gen(rng, n, scope, cfg) -> Term:
    if n == 1:
        return Var(_pick_var(rng, scope, cfg))
    if n == 2:
        x = rng.choice(BINDER_POOL)
        return Abs(x, _gen(rng, 1, scope + [x], cfg))
    bias = cfg.abstraction_bias
    with_es = cfg.language in (WITH_ES, VSUBK)
    options = [("abs", bias), ("app", (1 - bias) * (0.6 if with_es else 1.0))]
    if with_es:
        options.append(("es", (1 - bias) * 0.4))
    total = sum(w for _, w in options) or 1.0
    r = rng.random() * total
    kind = options[-1][0]
    for name, w in options:
        if r < w:
            kind = name
            break
        r -= w
    if kind == "abs":
        x = rng.choice(BINDER_POOL)
        return Abs(x, _gen(rng, n - 1, scope + [x], cfg))
    k = rng.randint(1, n - 2)
    if kind == "app":
        if cfg.language == VSUBK:
            arg = _gen_value(rng, k, scope, cfg)
        else:
            arg = _gen(rng, k, scope, cfg)
        return App(_gen(rng, n - 1 - k, scope, cfg), arg)
    x = rng.choice(BINDER_POOL)
    return ES(_gen(rng, n - 1 - k, scope + [x], cfg), x, _gen(rng, k, scope, cfg))


def _gen_value(rng, n, scope, cfg) -> Term:
    if n == 1:
        return Var(_pick_var(rng, scope, cfg))
    x = rng.choice(BINDER_POOL)
    return Abs(x, _gen(rng, n - 1, scope + [x], cfg))


@lru_cache(maxsize=None)
def _cmd_ok(n: int) -> bool:
    return n >= 2 and any(_val_ok(a) and _env_ok(n - a) for a in range(1, n))


@lru_cache(maxsize=None)
def _val_ok(n: int) -> bool:
    return n == 1 or (n >= 3 and _cmd_ok(n - 1))


@lru_cache(maxsize=None)
def _env_ok(n: int) -> bool:
    if n == 1:
        return True
    if n < 3:
        return False
    return _cmd_ok(n - 1) or any(_val_ok(a) and _env_ok(n - 1 - a) for a in range(1, n - 1))


def _gen_cmd(rng, n, scope, cfg) -> Command:
    splits = [a for a in range(1, n) if _val_ok(a) and _env_ok(n - a)]
    a = rng.choice(splits)
    return Command(_gen_svalue(rng, a, scope, cfg), _gen_env(rng, n - a, scope, cfg))


def _gen_svalue(rng, n, scope, cfg):
    if n == 1:
        return SVar(_pick_var(rng, scope, cfg))
    x = rng.choice(BINDER_POOL)
    return SAbs(x, _gen_cmd(rng, n - 1, scope + [x], cfg))


def _gen_env(rng, n, scope, cfg):
    if n == 1:
        return EPS
    options = []
    if _cmd_ok(n - 1):
        options.append("mu")
    stacks = [a for a in range(1, n - 1) if _val_ok(a) and _env_ok(n - 1 - a)]
    if stacks:
        options.append("stack")
    if rng.choice(options) == "mu":
        x = rng.choice(BINDER_POOL)
        return MuTilde(x, _gen_cmd(rng, n - 1, scope + [x], cfg))
    a = rng.choice(stacks)
    return Stack(_gen_svalue(rng, a, scope, cfg), _gen_env(rng, n - 1 - a, scope, cfg))


# -- exhaustive enumeration -------------------------------------------------

def _bname(depth: int) -> str:
    return f"v{depth}"


def enumerate_terms(max_size: int, free=("y", "z"), language: str = PURE) -> Iterator[Term]:
    """Every term of size ``<= max_size`` up to alpha (binders named by depth)."""
    for n in range(1, max_size + 1):
        yield from _terms_of(n, 0, tuple(free), language)


@lru_cache(maxsize=None)
def _terms_of(n: int, depth: int, free: tuple, language: str) -> tuple:
    out = []
    if n == 1:
        out.extend(Var(_bname(i)) for i in range(depth))
        out.extend(Var(x) for x in free)
        return tuple(out)
    x = _bname(depth)
    out.extend(Abs(x, b) for b in _terms_of(n - 1, depth + 1, free, language))
    for k in range(1, n - 1):
        funs = _terms_of(n - 1 - k, depth, free, language)
        if language == VSUBK:
            args = tuple(a for a in _terms_of(k, depth, free, language) if isinstance(a, (Var, Abs)))
        else:
            args = _terms_of(k, depth, free, language)
        out.extend(App(f, a) for f in funs for a in args)
        if language in (WITH_ES, VSUBK):
            bodies = _terms_of(n - 1 - k, depth + 1, free, language)
            defs = _terms_of(k, depth, free, language)
            out.extend(ES(b, x, d) for b in bodies for d in defs)
    return tuple(out)


def enumerate_commands(max_size: int, free=("y", "z")) -> Iterator[Command]:
    for n in range(2, max_size + 1):
        yield from _cmds_of(n, 0, tuple(free))


@lru_cache(maxsize=None)
def _cmds_of(n, depth, free) -> tuple:
    out = []
    for a in range(1, n):
        for v in _svals_of(a, depth, free):
            for e in _envs_of(n - a, depth, free):
                out.append(Command(v, e))
    return tuple(out)


@lru_cache(maxsize=None)
def _svals_of(n, depth, free) -> tuple:
    if n == 1:
        return tuple(SVar(_bname(i)) for i in range(depth)) + tuple(SVar(x) for x in free)
    x = _bname(depth)
    return tuple(SAbs(x, c) for c in _cmds_of(n - 1, depth + 1, free))


@lru_cache(maxsize=None)
def _envs_of(n, depth, free) -> tuple:
    if n == 1:
        return (EPS,)
    x = _bname(depth)
    out = [MuTilde(x, c) for c in _cmds_of(n - 1, depth + 1, free)]
    for a in range(1, n - 1):
        for v in _svals_of(a, depth, free):
            for e in _envs_of(n - 1 - a, depth, free):
                out.append(Stack(v, e))
    return tuple(out)


# -- rewriting-theory oracles -----------------------------------------------

def strongly_confluent(t, one_step: Callable, key: Callable) -> Optional[str]:
    """``None`` if every peak closes in exactly one step on each side."""
    succ = {}
    for u in one_step(t):
        succ.setdefault(key(u), u)
    items = list(succ.items())
    closures = {}
    for i, (ku, u) in enumerate(items):
        for ks, s in items[i + 1:]:
            if ku not in closures:
                closures[ku] = {key(r) for r in one_step(u)}
            if ks not in closures:
                closures[ks] = {key(r) for r in one_step(s)}
            if not closures[ku] & closures[ks]:
                return f"peak {ku} / {ks} does not close in one step"
    return None


def strongly_commute(t, step1: Callable, step2: Callable, key: Callable) -> Optional[str]:
    """``u <-1 t ->2 s`` implies ``u != s`` and ``u ->2 r <-1 s``."""
    left = {key(u): u for u in step1(t)}
    right = {key(s): s for s in step2(t)}
    for ku, u in left.items():
        closes_u = None
        for ks, s in right.items():
            if ku == ks:
                return "the two kinds of step reach the same term"
            if closes_u is None:
                closes_u = {key(r) for r in step2(u)}
            if not closes_u & {key(r) for r in step1(s)}:
                return "commutation square does not close"
    return None


def term_steps(calc: str, rules=None) -> Callable:
    return lambda t: [u for _, u in reducts(t, calc, rules)]


def cmd_steps(rules=None) -> Callable:
    return lambda c: [d for _, d in seq_reducts(c, rules)]


def reach_graph(t: Term, calc: str, node_cap: int = 20_000, rules=None):
    """Alpha-quotiented reachability graph: ``(nodes, edges)`` or ``None`` past the cap.

    ``edges[k]`` lists ``(rule, k2)``.
    """
    start = canonical(t)
    nodes = {start: t}
    edges = {}
    todo = [start]
    while todo:
        k = todo.pop()
        out = []
        for site, u in reducts(nodes[k], calc, rules):
            ku = canonical(u)
            out.append((site.rule, ku))
            if ku not in nodes:
                if len(nodes) >= node_cap or size(u) > SIZE_LIMIT:
                    return None
                nodes[ku] = u
                todo.append(ku)
        edges[k] = out
    return nodes, edges


def _acyclic_order(edges) -> Optional[list]:
    """Reverse topological order (sinks first), or ``None`` on a cycle."""
    state, order = {}, []
    for root in edges:
        if root in state:
            continue
        stack = [(root, iter(edges[root]))]
        state[root] = 1
        while stack:
            node, it = stack[-1]
            advanced = False
            for _, nxt in it:
                s = state.get(nxt)
                if s == 1:
                    return None
                if s is None:
                    state[nxt] = 1
                    stack.append((nxt, iter(edges[nxt])))
                    advanced = True
                    break
            if not advanced:
                state[node] = 2
                order.append(node)
                stack.pop()
    return order


def all_maximal_derivations(t: Term, calc: str, fuel: int = 50, cap: int = 10_000):
    """Every derivation from ``t`` following every choice, depth-first.

    Returns ``(derivations, truncated)``; ``truncated`` is set if some
    derivation hit ``fuel`` or the total hit ``cap``.
    """
    out, truncated = [], False

    def go(cur, steps):
        nonlocal truncated
        if len(out) >= cap:
            truncated = True
            return
        sites = enumerate_redexes(cur, calc)
        if not sites:
            out.append(Derivation(calc, t, list(steps), NORMAL))
            return
        if len(steps) >= fuel:
            truncated = True
            out.append(Derivation(calc, t, list(steps), FUELLED))
            return
        for s in sites:
            nxt = step(cur, s)
            steps.append((s, nxt))
            go(nxt, steps)
            steps.pop()

    go(t, [])
    return out, truncated


def random_chooser(rng: random.Random):
    return lambda _t, sites: rng.choice(sites)


def _eval(t, calc, rng=None, fuel=1000, rules=None):
    return evaluate(
        t, calc, None if rng is None else random_chooser(rng), fuel=fuel, rules=rules, size_limit=SIZE_LIMIT
    )


def _random_equiv_walk(t: Term, rng: random.Random, hops: int) -> Term:
    u = t
    for _ in range(hops):
        ns = equiv_neighbors(u)
        if not ns:
            break
        u = rng.choice(ns)
    return u


def _random_seq_walk(c: Command, rng: random.Random, hops: int) -> Command:
    d = c
    for _ in range(hops):
        ns = seq_equiv_neighbors(d)
        if not ns:
            break
        d = rng.choice(ns)
    return d


# -- the checks -------------------------------------------------------------
#
# Each takes (input, rng, report, seed) and returns False when the input is
# not eligible (e.g. it does not normalize), so that it does not count as a trial.

def _p_open_harmony(t, rng, rep, seed):
    normal = not enumerate_redexes(t, "fire")
    if normal != is_fireball(t):
        rep.fail(seed, print_term(t), f"fireball={is_fireball(t)}", f"normal={normal}")


def _diamond(calc, rules=None):
    def check(t, rng, rep, seed):
        err = strongly_confluent(t, term_steps(calc, rules), canonical)
        if err:
            rep.fail(seed, print_term(t), "strong confluence", err)
    return check


def _commute(calc, rules1, rules2):
    def check(t, rng, rep, seed):
        err = strongly_commute(t, term_steps(calc, rules1), term_steps(calc, rules2), canonical)
        if err:
            rep.fail(seed, print_term(t), "strong commutation", err)
    return check


def _p_fire_diamond(t, rng, rep, seed):
    _diamond("fire")(t, rng, rep, seed)
    _diamond("fire", {Rule.BETA_INERT})(t, rng, rep, seed)


def _p_vsub_diamond(t, rng, rep, seed):
    _diamond("vsub")(t, rng, rep, seed)
    _diamond("vsub", M_RULES)(t, rng, rep, seed)
    _diamond("vsub", E_RULES)(t, rng, rep, seed)


def _terminates(calc, rules, fuel=10_000):
    def check(t, rng, rep, seed):
        d = evaluate(t, calc, random_chooser(rng), fuel=fuel, rules=rules, size_limit=SIZE_LIMIT)
        if d.status != NORMAL:
            rep.fail(seed, print_term(t), "termination", f"no normal form after {len(d)} steps")
    return check


def _p_vsub_e_le_m(t, rng, rep, seed):
    d = _eval(t, "vsub", rng, fuel=300)
    m = e = 0
    for site, _ in d.steps:
        if site.rule == Rule.MULT:
            m += 1
        else:
            e += 1
        if e > m:
            rep.fail(seed, print_term(t), "|d|e <= |d|m on every prefix", f"e={e} m={m}")
            return
    if not has_es(t) and d.status == NORMAL and e != m - count_es(d.end):
        rep.fail(seed, print_term(t), "|d|e = |d|m - #ES(end)", f"e={e} m={m} es={count_es(d.end)}")


def _p_eqstruct_bisim(t, rng, rep, seed):
    u = _random_equiv_walk(t, rng, rng.randint(1, 4))
    for label in (Rule.MULT, Rule.EXP_ABS, Rule.EXP_VAR):
        for a, b in ((t, u), (u, t)):
            r = check_bisim_step(a, b, label, decide=float_equiv)
            for f in r.failures:
                rep.fail(seed, f.counterexample, f.expected, f.actual)


def _p_eqstruct_postpone(t, rng, rep, seed):
    """A mixed walk of steps and ≡-moves is matched by a pure derivation."""
    cur, real = t, t
    counts_mixed = {r: 0 for r in (Rule.MULT, Rule.EXP_ABS, Rule.EXP_VAR)}
    real_steps = []
    for _ in range(rng.randint(1, 8)):
        if rng.random() < 0.5:
            ns = equiv_neighbors(cur)
            if ns:
                cur = rng.choice(ns)
            continue
        rs = reducts(cur, "vsub")
        if not rs:
            break
        site, cur = rng.choice(rs)
        counts_mixed[site.rule] += 1
        match = None
        for s2, r2 in reducts(real, "vsub", {site.rule}):
            if float_equiv(r2, cur):
                match = (s2, r2)
                break
        if match is None:
            rep.fail(seed, print_term(t), "postponed step", f"no {site.rule} step matches")
            return
        real_steps.append(match[0].rule)
        real = match[1]
    counts_real = {r: real_steps.count(r) for r in counts_mixed}
    if counts_real != counts_mixed or not float_equiv(real, cur):
        rep.fail(seed, print_term(t), f"counts {counts_mixed} and ≡ end", f"counts {counts_real}")


_NORMALITY = {
    "m": M_RULES,
    "eλ": {Rule.EXP_ABS},
    "evar": {Rule.EXP_VAR},
    "e": E_RULES,
    "vsub": None,
}


def _p_eqstruct_normal_pres(t, rng, rep, seed):
    u = _random_equiv_walk(t, rng, rng.randint(1, 4))
    for name, rules in _NORMALITY.items():
        a = not enumerate_redexes(t, "vsub", rules)
        b = not enumerate_redexes(u, "vsub", rules)
        if a != b:
            rep.fail(seed, f"{print_term(t)} ≡ {print_term(u)}", f"{name}-normal agrees", f"{a} vs {b}")


def _p_unfold_equiv(t, rng, rep, seed):
    u = _random_equiv_walk(t, rng, rng.randint(1, 4))
    if not alpha_eq(unfold(t), unfold(u)):
        rep.fail(seed, f"{print_term(t)} ≡ {print_term(u)}", "same unfolding", print_term(unfold(u)))


def _p_shuf_disjoint(t, rng, rep, seed):
    beta = {canonical(u) for _, u in reducts(t, "shuf", {Rule.BETA_SHUF})}
    sigma = {canonical(u) for _, u in reducts(t, "shuf", SIGMA_RULES)}
    if beta & sigma:
        rep.fail(seed, print_term(t), "BetaShuf and sigma reducts differ", "a shared reduct")


def _shuf_paths(t: Term, node_cap: int = 5000):
    """For a normalizing shuf term: the BetaShuf counts and lengths of all normalizing paths.

    Returns ``None`` when the reachable graph is too large, or ``"cycle"``.
    """
    g = reach_graph(t, "shuf", node_cap)
    if g is None:
        return None
    nodes, edges = g
    order = _acyclic_order(edges)
    if order is None:
        return "cycle"
    info = {}
    for k in order:  # sinks first
        if not edges[k]:
            info[k] = {(0, 0)}
            continue
        acc = set()
        for rule, k2 in edges[k]:
            b = 1 if rule == Rule.BETA_SHUF else 0
            acc |= {(beta + b, length + 1) for beta, length in info[k2]}
        info[k] = acc
    return info[canonical(t)]


def _p_shuf_weak_eq_strong(t, rng, rep, seed):
    d = _eval(t, "shuf", rng, fuel=200)
    if d.status != NORMAL:
        return False
    g = reach_graph(t, "shuf", 5000)
    if g is None:
        return False
    if _acyclic_order(g[1]) is None:
        rep.fail(seed, print_term(t), "normalizable implies strongly normalizable", "a reduction cycle")


def _p_shuf_beta_count_invariant(t, rng, rep, seed):
    d = _eval(t, "shuf", rng, fuel=200)
    if d.status != NORMAL:
        return False
    paths = _shuf_paths(t)
    if paths is None:
        return False
    if paths == "cycle":
        rep.fail(seed, print_term(t), "no cycles", "cycle")
        return
    betas = {b for b, _ in paths}
    lengths = {n for _, n in paths}
    if len(betas) != 1:
        rep.fail(seed, print_term(t), "one BetaShuf count", sorted(betas))
    if len(lengths) > 1:
        rep.stats["terms_with_length_variance"] = rep.stats.get("terms_with_length_variance", 0) + 1


def _normalizing(t, calc, rng, fuel=1000):
    d = _eval(t, calc, rng, fuel=fuel)
    return d if d.status == NORMAL else None


def _p_fire_vsub_counts(t, rng, rep, seed):
    d = _normalizing(t, "fire", None)
    if d is None:
        return False
    try:
        w = simulate_fire_derivation(d)
    except SimulationError as exc:
        rep.fail(seed, print_term(t), "a simulation", str(exc))
        return
    e = w.target
    c, cd = e.counts, d.counts
    if c[Rule.MULT] != len(d) or c[Rule.EXP_ABS] != cd[Rule.BETA_ABS] or c[Rule.EXP_VAR] != 0:
        rep.fail(seed, print_term(t), f"m={len(d)} eλ={cd[Rule.BETA_ABS]} evar=0", dict(c))
        return
    if clean_decompose(w.residue) is None or not alpha_eq(unfold(w.residue), d.end):
        rep.fail(seed, print_term(t), "clean residue unfolding to the end", print_term(w.residue))
    if not float_equiv(e.end, w.residue):
        rep.fail(seed, print_term(t), "target end ≡ residue", print_term(e.end))
    full = complete_with_evar(e)
    g = len(full) - len(e)
    if full.status != NORMAL:
        rep.fail(seed, print_term(t), "ExpVar completion reaches a vsub normal form", print_term(full.end))
    if g > c[Rule.MULT] - c[Rule.EXP_ABS]:
        rep.fail(seed, print_term(t), f"|g|evar <= {c[Rule.MULT] - c[Rule.EXP_ABS]}", g)
    rep.stats["fire_steps_total"] = rep.stats.get("fire_steps_total", 0) + len(d)


def _p_fire_vsub_linear(t, rng, rep, seed):
    d = _normalizing(t, "fire", None)
    if d is None:
        return False
    try:
        full = complete_with_evar(simulate_fire_derivation(d).target)
    except SimulationError as exc:
        rep.fail(seed, print_term(t), "a simulation", str(exc))
        return
    n = len(d)
    if not (n <= len(full) <= 2 * n) or full.status != NORMAL:
        rep.fail(seed, print_term(t), f"{n} <= |e| <= {2 * n}, e normalizing", f"|e|={len(full)} {full.status}")
    # any other vsub-normalizing derivation has the same length (strong confluence)
    other = _eval(t, "vsub", rng)
    if other.status == NORMAL and len(other) != len(full):
        rep.fail(seed, print_term(t), f"vsub length {len(full)}", len(other))


def _p_shuf_vsub_counts(t, rng, rep, seed):
    d = _normalizing(t, "shuf", rng)
    if d is None:
        return False
    try:
        w = project_shuf_derivation(d)
    except SimulationError as exc:
        rep.fail(seed, print_term(t), "a projection", str(exc))
        return
    beta = d.counts[Rule.BETA_SHUF]
    if w.target.e != beta:
        rep.fail(seed, print_term(t), f"e-steps = {beta}", w.target.e)
    if enumerate_redexes(w.target.end, "vsub") or enumerate_redexes(w.residue, "vsub"):
        rep.fail(seed, print_term(t), "vsub-normal projection of a shuf-normal end", print_term(w.target.end))
    rep.stats["beta_total"] = rep.stats.get("beta_total", 0) + beta


def _p_vsub_kernel_counts(t, rng, rep, seed):
    d = _eval(t, "vsub", rng, fuel=60)
    try:
        w = simulate_vsub_in_kernel(d)
    except SimulationError as exc:
        rep.fail(seed, print_term(t), "a kernel simulation", str(exc))
        return
    c, cd = w.target.counts, d.counts
    want = (cd[Rule.MULT], cd[Rule.EXP_ABS], cd[Rule.EXP_VAR] + cd[Rule.MULT])
    got = (c[Rule.MULT], c[Rule.EXP_ABS], c[Rule.EXP_VAR])
    if want != got:
        rep.fail(seed, print_term(t), f"(m, eλ, evar) = {want}", got)
    if not float_equiv(w.target.end, w.residue):
        rep.fail(seed, print_term(t), "kernel end ≡ kernel(source end)", print_term(w.target.end))
    if d.status == NORMAL:
        s = w.target.end
        if enumerate_redexes(s, "vsubk", M_RULES):
            rep.fail(seed, print_term(t), "m-normal kernel image", print_term(s))
        tail = evaluate(s, "vsubk", fuel=100_000, rules=E_RULES)
        if enumerate_redexes(tail.end, "vsubk"):
            rep.fail(seed, print_term(t), "e-normal form is vsubk-normal", print_term(tail.end))
        rep.stats["final_e_steps_max"] = max(rep.stats.get("final_e_steps_max", 0), len(tail))


def _p_kernel_seq_bisim(t, rng, rep, seed):
    d = _eval(t, "vsubk", rng, fuel=60)
    try:
        sd = simulate_kernel_in_seq(d)
    except SimulationError as exc:
        rep.fail(seed, print_term(t), "a sequent simulation", str(exc))
        return
    if sd.counts[LAM_BAR] != d.m or sd.counts[MU_TILDE] != d.e:
        rep.fail(seed, print_term(t), f"λ̄={d.m} μ̃={d.e}", dict(sd.counts))
    if d.status == NORMAL and enumerate_seq_redexes(sd.end):
        rep.fail(seed, print_term(t), "normal image", print_command(sd.end))
    # converse direction on every term of the run: each sequent step comes from a kernel step
    for term in [d.start] + [u for _, u in d.steps]:
        images = {canonical_cmd(to_sequent(u)) for _, u in reducts(term, "vsubk")}
        for _, c2 in seq_reducts(to_sequent(term)):
            if canonical_cmd(c2) not in images:
                rep.fail(seed, print_term(term), "every sequent step is an image", print_command(c2))
                return


def _p_seq_diamond(c, rng, rep, seed):
    for rules in (None, {LAM_BAR}, {MU_TILDE}):
        err = strongly_confluent(c, cmd_steps(rules), canonical_cmd)
        if err:
            rep.fail(seed, print_command(c), f"strong confluence {rules or 'vseq'}", err)


def _p_seq_commute(c, rng, rep, seed):
    err = strongly_commute(c, cmd_steps({LAM_BAR}), cmd_steps({MU_TILDE}), canonical_cmd)
    if err:
        rep.fail(seed, print_command(c), "strong commutation", err)


def _p_seqbar_bisim(c, rng, rep, seed):
    d = _random_seq_walk(c, rng, rng.randint(1, 4))
    for rule in (LAM_BAR, MU_TILDE):
        for a, b in ((c, d), (d, c)):
            r = check_seq_bisim_step(a, b, rule)
            for f in r.failures:
                rep.fail(seed, f.counterexample, f.expected, f.actual)


def _p_eqstruct_to_seqbar(t, rng, rep, seed):
    for u in equiv_neighbors(t):
        if not in_kernel(u):
            continue
        if not seq_struct_equiv(to_sequent(t), to_sequent(u)):
            rep.fail(seed, f"{print_term(t)} ≡ {print_term(u)}", "images ≅", "not ≅")


def _p_kernel_roundtrip(t, rng, rep, seed):
    back = from_sequent(to_sequent(t))
    if not alpha_eq(back, t):
        rep.fail(seed, print_term(t), print_term(t), print_term(back))


def _p_kernel_roundtrip_equiv(t, rng, rep, seed):
    back = from_sequent(to_sequent(t))
    if not float_equiv(back, t):
        # ≡ is closed by evaluation contexts only; ES moved under a lambda escape it
        rep.stats["weak_equiv_misses"] = rep.stats.get("weak_equiv_misses", 0) + 1
    if not deep_float_equiv(back, t):
        rep.fail(seed, print_term(t), "round trip ≡ input under every context", print_term(back))


def _p_seq_roundtrip(c, rng, rep, seed):
    back = to_sequent(from_sequent(c))
    if not alpha_eq_cmd(back, c):
        rep.fail(seed, print_command(c), print_command(c), print_command(back))


def _p_kernel_translation(t, rng, rep, seed):
    k = to_kernel(t)
    if not in_kernel(k) or free_vars(k) != free_vars(t):
        rep.fail(seed, print_term(t), "kernel term with the same free variables", print_term(k))
        return
    c = to_sequent(k)
    validate(c)
    if fv_cmd(c) != free_vars(k):
        rep.fail(seed, print_term(t), "sequent image keeps free variables", print_command(c))


def _p_append_assoc(c, rng, rep, seed):
    cfg = GenConfig(seed=rng.randrange(2**32), max_size=6, language=SEQUENT)
    e1 = _as_env(gen_term(cfg))
    e2 = _as_env(gen_term(replace(cfg, seed=cfg.seed + 1)))
    lhs = append_cmd(append_cmd(c, e1), e2)
    rhs = append_cmd(c, append_env(e1, e2))
    if not alpha_eq_cmd(lhs, rhs):
        rep.fail(seed, print_command(c), print_command(rhs), print_command(lhs))


def _as_env(c: Command):
    """Reuse a random command as an environment: ``mu~x.c``."""
    return MuTilde("x", c)


def _p_append_commutes(c, rng, rep, seed):
    cfg = GenConfig(seed=rng.randrange(2**32), max_size=6, language=SEQUENT)
    e0 = rng.choice([EPS, _as_env(gen_term(cfg)), Stack(SVar(rng.choice(("x", "y"))), EPS)])
    targets = {canonical_cmd(d) for _, d in seq_reducts(append_cmd(c, e0))}
    for site, c2 in seq_reducts(c):
        if canonical_cmd(append_cmd(c2, e0)) not in targets:
            rep.fail(seed, print_command(c), f"{site} survives appending", "no matching step")


def _p_harmless_preserved(t, rng, rep, seed):
    d = _eval(t, "vsub", rng, fuel=300)
    if d.status != NORMAL:
        return False
    k = to_kernel(d.end)
    if not is_harmless(k):
        # the all-subterm reading fails as soon as an ES sits under a lambda
        rep.stats["full_scan_violations"] = rep.stats.get("full_scan_violations", 0) + 1
    if not is_harmless(k, weak=True) or enumerate_redexes(k, "vsubk", M_RULES):
        rep.fail(seed, print_term(t), "harmless m-normal kernel image", print_term(k))
        return
    cur = k
    for _ in range(200):
        rs = reducts(cur, "vsubk", E_RULES)
        if not rs:
            break
        _, cur = rng.choice(rs)
        if not is_harmless(cur, weak=True) or enumerate_redexes(cur, "vsubk", M_RULES):
            rep.fail(seed, print_term(t), "e-steps keep harmless and m-normal", print_term(cur))
            return


def _p_staged(t, rng, rep, seed):
    d = _normalizing(t, "vsub", rng)
    if d is None:
        return False
    s = staged_vsub_eval(t, fuel=2000)
    if s.status != NORMAL:
        rep.fail(seed, print_term(t), "staged run normalizes", s.status)
        return
    triple = lambda x: (len(x), x.m, x.e)
    if triple(s) != triple(d):
        rep.fail(seed, print_term(t), triple(d), triple(s))
    if s.count(Rule.EXP_ABS) < d.count(Rule.EXP_ABS):
        rep.fail(seed, print_term(t), f"staged eλ >= {d.count(Rule.EXP_ABS)}", s.count(Rule.EXP_ABS))
    # stages really are separated
    seen_var = False
    for site, _ in s.steps:
        if site.rule == Rule.EXP_VAR:
            seen_var = True
        elif seen_var:
            rep.fail(seed, print_term(t), "no Mult/ExpAbs after ExpVar", str(site))
            return


PROPERTIES = {
    "open-harmony": (PURE, _p_open_harmony),
    "plot-diamond": (PURE, _diamond("plot")),
    "fire-diamond": (PURE, _p_fire_diamond),
    "fire-commute": (PURE, _commute("fire", {Rule.BETA_ABS}, {Rule.BETA_INERT})),
    "fire-inert-SN": (PURE, _terminates("fire", {Rule.BETA_INERT})),
    "vsub-diamond": (WITH_ES, _p_vsub_diamond),
    "vsub-m-e-commute": (WITH_ES, _commute("vsub", M_RULES, E_RULES)),
    "vsub-m-SN": (WITH_ES, _terminates("vsub", M_RULES)),
    "vsub-e-SN": (WITH_ES, _terminates("vsub", E_RULES)),
    "vsub-e-le-m": (PURE, _p_vsub_e_le_m),
    "eqstruct-bisim": (WITH_ES, _p_eqstruct_bisim),
    "eqstruct-postpone": (WITH_ES, _p_eqstruct_postpone),
    "eqstruct-normal-pres": (WITH_ES, _p_eqstruct_normal_pres),
    "shuf-disjoint": (PURE, _p_shuf_disjoint),
    "shuf-sigma-SN": (PURE, _terminates("shuf", SIGMA_RULES)),
    "shuf-weak-eq-strong": (PURE, _p_shuf_weak_eq_strong),
    "shuf-beta-count-invariant": (PURE, _p_shuf_beta_count_invariant),
    "fire-vsub-counts": (PURE, _p_fire_vsub_counts),
    "fire-vsub-linear": (PURE, _p_fire_vsub_linear),
    "shuf-vsub-counts": (PURE, _p_shuf_vsub_counts),
    "vsub-kernel-counts": (WITH_ES, _p_vsub_kernel_counts),
    "kernel-seq-bisim": (VSUBK, _p_kernel_seq_bisim),
    "seq-diamond": (SEQUENT, _p_seq_diamond),
    "vseq-diamond": (SEQUENT, _p_seq_diamond),
    "seq-commute": (SEQUENT, _p_seq_commute),
    "seqbar-bisim": (SEQUENT, _p_seqbar_bisim),
    "kernel-roundtrip": (VSUBK, _p_kernel_roundtrip),
    "append-assoc": (SEQUENT, _p_append_assoc),
    "append-commutes-reduction": (SEQUENT, _p_append_commutes),
    "unfold-equiv": (WITH_ES, _p_unfold_equiv),
    "harmless-preserved": (WITH_ES, _p_harmless_preserved),
    # additional checks beyond the registered list
    "eqstruct-to-seqbar": (VSUBK, _p_eqstruct_to_seqbar),
    "kernel-roundtrip-equiv": (VSUBK, _p_kernel_roundtrip_equiv),
    "seq-roundtrip": (SEQUENT, _p_seq_roundtrip),
    "kernel-translation": (WITH_ES, _p_kernel_translation),
    "staged-eval": (PURE, _p_staged),
}


def property_language(name: str) -> str:
    if name not in PROPERTIES:
        raise KeyError(f"unknown property {name!r}")
    return PROPERTIES[name][0]


def check_property(
    name: str,
    cfg: GenConfig,
    trials: int,
    max_attempts: Optional[int] = None,
) -> Report:
    """Run ``name`` on ``trials`` eligible random inputs drawn from ``cfg``.

    The input language is fixed by the property; ``cfg.language`` is
    overridden accordingly.  Ineligible inputs (say, non-normalizing ones
    for a count law) are skipped, up to ``max_attempts`` draws in total.
    """
    if name not in PROPERTIES:
        raise KeyError(f"unknown property {name!r}")
    language, check = PROPERTIES[name]
    cfg = replace(cfg, language=language)
    rep = Report(name)
    started = time.perf_counter()
    attempts = 0
    limit = max_attempts if max_attempts is not None else 50 * trials + 100
    while rep.trials < trials and attempts < limit:
        seed = cfg.seed + attempts
        attempts += 1
        item = gen_term(replace(cfg, seed=seed))
        rng = random.Random(seed ^ 0x5EED)
        if check(item, rng, rep, seed) is False:
            continue
        rep.trials += 1
    rep.stats["attempts"] = attempts
    rep.elapsed = time.perf_counter() - started
    if rep.trials < trials:
        rep.fail(None, "-", f"{trials} eligible inputs", f"only {rep.trials} in {attempts} draws")
    return rep


def check_exhaustive(name: str, items, label: str = "") -> Report:
    """Run ``name`` on every item of ``items`` (no randomness is involved)."""
    language, check = PROPERTIES[name]
    rep = Report(name + (f"[{label}]" if label else ""))
    started = time.perf_counter()
    rng = random.Random(0)
    for i, item in enumerate(items):
        if check(item, rng, rep, i) is False:
            continue
        rep.trials += 1
    rep.elapsed = time.perf_counter() - started
    return rep
