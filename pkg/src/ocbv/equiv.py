"""Structural equivalences: ``≡`` on terms with ES and ``≅`` on commands.

``≡`` is generated by four axioms closed under the evaluation contexts of
the value substitution calculus::

    Com       t[y:=s][x:=u]  ≡  t[x:=u][y:=s]   y ∉ fv(u), x ∉ fv(s)
    AppLeft   t[x:=u] s      ≡  (t s)[x:=u]     x ∉ fv(s)
    AppRight  t (s[x:=u])    ≡  (t s)[x:=u]     x ∉ fv(t)
    ESAssoc   t[x:=u[y:=s]]  ≡  t[x:=u][y:=s]   y ∉ fv(t)

Side conditions that alpha-renaming can satisfy are satisfied that way.
Every axiom preserves the constructor multiset, so classes are finite and
``struct_equiv`` decides ``≡`` by breadth-first search.  ``float_equiv``
is a faster decision used by the simulations: it floats every ES to the
top and compares the resulting ES spines modulo independent swaps.
"""

from __future__ import annotations

from collections import Counter, deque
from typing import Optional

from .engines import Rule, enumerate_redexes, step
from .report import Report
from .sequent import (
    Command,
    MuTilde,
    Stack,
    canonical_cmd,
    enumerate_seq_redexes,
    fv_cmd,
    fv_env,
    fv_value,
    print_command,
    rename_cmd,
    step_seq,
)
from .terms import (
    ES,
    Abs,
    App,
    Term,
    Var,
    canonical,
    free_vars,
    fresh,
    print_term,
    rename,
    wrap,
)

DEFAULT_CAP = 100_000

COM, APP_LEFT, APP_RIGHT, ES_ASSOC, SEQ_MU_MU = "Com", "AppLeft", "AppRight", "ESAssoc", "SeqMuMu"


class ClassTooLarge(RuntimeError):
    """The equivalence class exceeded the exploration cap."""


# -- one-axiom neighbours ---------------------------------------------------

def _root_neighbors(t: Term):
    """``(axiom, term)`` pairs for axiom instances rooted at ``t``."""
    if isinstance(t, App):
        f, s = t.fun, t.arg
        if isinstance(f, ES):  # AppLeft, left to right
            body, x = f.body, f.binder
            if x in free_vars(s):
                x = fresh(x)
                body = rename(body, f.binder, x)
            yield APP_LEFT, ES(App(body, s), x, f.defn)
        if isinstance(s, ES):  # AppRight, left to right
            body, x = s.body, s.binder
            if x in free_vars(f):
                x = fresh(x)
                body = rename(body, s.binder, x)
            yield APP_RIGHT, ES(App(f, body), x, s.defn)
    if not isinstance(t, ES):
        return
    x, u = t.binder, t.defn
    if isinstance(t.body, App):  # AppLeft / AppRight, right to left
        a, b = t.body.fun, t.body.arg
        if x not in free_vars(b):
            yield APP_LEFT, App(ES(a, x, u), b)
        if x not in free_vars(a):
            yield APP_RIGHT, App(a, ES(b, x, u))
    if isinstance(t.body, ES):
        inner = t.body
        core, y, s = inner.body, inner.binder, inner.defn
        # Com: t[y:=s][x:=u] -> t[x:=u][y:=s]
        if x not in free_vars(s):
            if y == x or y in free_vars(u):
                ny = fresh(y)
                core, y = rename(core, inner.binder, ny), ny
            yield COM, ES(ES(core, x, u), y, s)
        # ESAssoc, right to left: t[y:=s][x:=u] -> t[y:=s[x:=u]]
        core, y = inner.body, inner.binder
        if x not in free_vars(core) - {y}:
            if y == x or y in free_vars(u):
                ny = fresh(y)
                core, y = rename(core, inner.binder, ny), ny
            yield ES_ASSOC, ES(core, y, ES(s, x, u))
    if isinstance(u, ES):  # ESAssoc, left to right: t[x:=u'[y:=s]] -> t[x:=u'][y:=s]
        body, y = t.body, u.binder
        inner_body = u.body
        if y in free_vars(body) - {x} or y == x:
            ny = fresh(y)
            inner_body, y = rename(inner_body, u.binder, ny), ny
        yield ES_ASSOC, ES(ES(body, x, inner_body), y, u.defn)


def _neighbors(t: Term):
    yield from _root_neighbors(t)
    if isinstance(t, App):
        for ax, n in _neighbors(t.fun):
            yield ax, App(n, t.arg)
        for ax, n in _neighbors(t.arg):
            yield ax, App(t.fun, n)
    elif isinstance(t, ES):
        for ax, n in _neighbors(t.body):
            yield ax, ES(n, t.binder, t.defn)
        for ax, n in _neighbors(t.defn):
            yield ax, ES(t.body, t.binder, n)


def equiv_neighbors(t: Term, with_axioms: bool = False) -> list:
    """Terms one axiom application away from ``t``, in either direction."""
    out = list(_neighbors(t))
    return out if with_axioms else [n for _, n in out]


def constructor_profile(t: Term) -> Counter:
    c = Counter()
    stack = [t]
    while stack:
        s = stack.pop()
        c[type(s).__name__] += 1
        if isinstance(s, Abs):
            stack.append(s.body)
        elif isinstance(s, App):
            stack.extend((s.fun, s.arg))
        elif isinstance(s, ES):
            stack.extend((s.body, s.defn))
    return c


def equiv_class(t: Term, cap: int = DEFAULT_CAP) -> dict:
    """``canonical key -> representative`` for the whole ``≡``-class of ``t``."""
    profile = constructor_profile(t)
    seen = {canonical(t): t}
    queue = deque([t])
    while queue:
        cur = queue.popleft()
        for n in equiv_neighbors(cur):
            key = canonical(n)
            if key in seen:
                continue
            if constructor_profile(n) != profile:
                raise AssertionError("an axiom changed the constructor multiset")
            seen[key] = n
            if len(seen) > cap:
                raise ClassTooLarge(f"equivalence class larger than {cap}")
            queue.append(n)
    return seen


def struct_equiv(t: Term, u: Term, cap: int = DEFAULT_CAP) -> bool:
    """Decide ``t ≡ u`` by breadth-first closure of ``t``'s class."""
    target = canonical(u)
    if canonical(t) == target:
        return True
    if constructor_profile(t) != constructor_profile(u):
        return False
    seen = {canonical(t)}
    queue = deque([t])
    while queue:
        cur = queue.popleft()
        for n in equiv_neighbors(cur):
            key = canonical(n)
            if key == target:
                return True
            if key in seen:
                continue
            seen.add(key)
            if len(seen) > cap:
                raise ClassTooLarge(f"equivalence class larger than {cap}")
            queue.append(n)
    return False


# -- float-out decision -----------------------------------------------------

def float_out(t: Term):
    """``(P, spine)`` with ``t ≡ P[spine]`` and no ES left in evaluation position of ``P``.

    ``spine`` lists ``(binder, definition)`` innermost first; its binders are
    renamed fresh so that no two coincide.
    """
    if isinstance(t, (Var, Abs)):
        return t, []
    if isinstance(t, App):
        pf, bf = float_out(t.fun)
        pa, ba = float_out(t.arg)
        return App(pf, pa), bf + ba
    pb, bb = float_out(t.body)
    x = fresh(t.binder)
    pb = rename(pb, t.binder, x)
    bb = [(y, rename(d, t.binder, x)) for y, d in bb]
    pd, bd = float_out(t.defn)
    return pb, bb + [(x, pd)] + bd


def float_equiv(t: Term, u: Term) -> bool:
    """Decide ``t ≡ u`` through float-out forms."""
    if canonical(t) == canonical(u):
        return True
    pt, st = float_out(t)
    pu, su = float_out(u)
    if len(st) != len(su):
        return False
    return _match_spines(pt, list(st), pu, list(su))


def _float_deep(t: Term) -> Term:
    p, spine = float_out(t)
    return wrap(_float_inside(p), [(x, _float_inside(d)) for x, d in spine])


def _float_inside(t: Term) -> Term:
    if isinstance(t, Abs):
        return Abs(t.binder, _float_deep(t.body))
    if isinstance(t, App):
        return App(_float_inside(t.fun), _float_inside(t.arg))
    return t


def deep_float_equiv(t: Term, u: Term) -> bool:
    """Equivalence under the ≡ axioms closed by *all* contexts, abstraction bodies included.

    Spines under abstractions are compared in float-out order, so a ``True``
    answer is always right; a reordering of independent ES inside a body can
    be missed.
    """
    return float_equiv(_float_deep(t), _float_deep(u))


def _subst_names(t: Term, mapping: dict) -> Term:
    for old, new in mapping.items():
        t = rename(t, old, new)
    return t


def _signatures(p: Term, spine: list) -> list:
    """Name-free description of each spine entry: its definition and who uses it.

    Entries of two ≡ spines can only be matched when their signatures agree,
    which prunes the search to (nearly always) a single candidate.
    """
    names = {y for y, _ in spine}

    def blur(t, keep):
        for z in free_vars(t) & names:
            t = rename(t, z, "@" if z == keep else "?")
        return repr(canonical(t))

    out = []
    for i, (y, d) in enumerate(spine):
        uses = sorted(blur(inner, y) for _, inner in spine[:i] if y in free_vars(inner))
        in_core = blur(p, y) if y in free_vars(p) else ""
        out.append((blur(d, None), tuple(uses), in_core))
    return out


def _match_spines(pa: Term, sa: list, pb: Term, sb: list) -> bool:
    siga, sigb = _signatures(pa, sa), _signatures(pb, sb)
    if sorted(siga) != sorted(sigb):
        return False
    return _match(pa, list(zip(sa, siga)), pb, list(zip(sb, sigb)))


def _match(pa: Term, sa: list, pb: Term, sb: list) -> bool:
    if not sa:
        return canonical(pa) == canonical(pb)
    # the outermost entry of sa refers to no binder of its spine
    (xa, da), sig = sa[-1]
    key = canonical(da)
    names_b = {y for (y, _), _ in sb}
    for i, ((yb, db), sig_b) in enumerate(sb):
        if sig_b != sig or free_vars(db) & names_b or canonical(db) != key:
            continue
        rest = [((y, rename(d, yb, xa)), g) for (y, d), g in sb[:i] + sb[i + 1:]]
        if _match(pa, sa[:-1], rename(pb, yb, xa), rest):
            return True
    return False


# -- sequent side -----------------------------------------------------------

def _split_d(c: Command):
    """``c = D<mu~x.c'>``: return ``(value, heads, mu)`` or ``None``."""
    heads, e = [], c.env
    while isinstance(e, Stack):
        heads.append(e.head)
        e = e.tail
    if not isinstance(e, MuTilde):
        return None
    return c.value, heads, e


def _plug_d(value, heads, env) -> Command:
    for h in reversed(heads):
        env = Stack(h, env)
    return Command(value, env)


def _fv_d(value, heads) -> frozenset:
    out = fv_value(value)
    for h in heads:
        out |= fv_value(h)
    return out


def _seq_root_neighbors(c: Command):
    outer = _split_d(c)
    if outer is None:
        return
    v, heads, mu = outer
    x = mu.binder
    inner = _split_d(mu.body)
    if inner is None:
        return
    v2, heads2, mu2 = inner
    if x in _fv_d(v2, heads2):
        return
    y, body = mu2.binder, mu2.body
    if y == x or y in _fv_d(v, heads):
        ny = fresh(y)
        body, y = rename_cmd(body, mu2.binder, ny), ny
    yield _plug_d(v2, heads2, MuTilde(y, _plug_d(v, heads, MuTilde(x, body))))


def seq_equiv_neighbors(c: Command) -> list:
    out = list(_seq_root_neighbors(c))
    parts = _split_d(c)
    if parts is not None:
        v, heads, mu = parts
        for n in seq_equiv_neighbors(mu.body):
            out.append(_plug_d(v, heads, MuTilde(mu.binder, n)))
    return out


def seq_struct_equiv(c: Command, d: Command, cap: int = DEFAULT_CAP) -> bool:
    target = canonical_cmd(d)
    start = canonical_cmd(c)
    if start == target:
        return True
    seen = {start}
    queue = deque([c])
    while queue:
        cur = queue.popleft()
        for n in seq_equiv_neighbors(cur):
            key = canonical_cmd(n)
            if key == target:
                return True
            if key in seen:
                continue
            seen.add(key)
            if len(seen) > cap:
                raise ClassTooLarge(f"equivalence class larger than {cap}")
            queue.append(n)
    return False


# -- bisimulation checks ----------------------------------------------------

def check_bisim_step(
    t: Term, u: Term, label: Rule, calc: str = "vsub", decide=struct_equiv
) -> Report:
    """Every ``label``-step of ``t`` is matched by a ``label``-step of ``u`` up to ``≡``."""
    report = Report(f"bisim-{label.value}")
    u_reducts = [step(u, s) for s in enumerate_redexes(u, calc, {label})]
    for site in enumerate_redexes(t, calc, {label}):
        report.trials += 1
        t2 = step(t, site)
        if not any(decide(t2, u2) for u2 in u_reducts):
            report.fail(
                None,
                f"{print_term(t)} ≡ {print_term(u)}",
                f"a {label.value} step of the right side matching {site}",
                "none found",
            )
    return report


def check_seq_bisim_step(c: Command, d: Command, rule: str) -> Report:
    report = Report(f"seq-bisim-{rule}")
    d_reducts = [step_seq(d, s) for s in enumerate_seq_redexes(d, {rule})]
    for site in enumerate_seq_redexes(c, {rule}):
        report.trials += 1
        c2 = step_seq(c, site)
        if not any(seq_struct_equiv(c2, d2) for d2 in d_reducts):
            report.fail(
                None,
                f"{print_command(c)} ≅ {print_command(d)}",
                f"a {rule} step of the right side matching {site}",
                "none found",
            )
    return report


def transport_step(r: Term, target: Term, labels, calc: str = "vsub") -> Optional[tuple]:
    """Find ``r -> r'`` with a rule in ``labels`` and ``r' ≡ target``."""
    for site in enumerate_redexes(r, calc, labels):
        r2 = step(r, site)
        if float_equiv(r2, target):
            return site, r2
    return None
