"""Terms with explicit substitutions: syntax, binding, classifiers, text I/O.

A single datatype covers the pure lambda terms, the terms with explicit
substitutions (ES) and the kernel fragment where every argument is a value.
Binders are plain strings.  Fresh names carry a ``#n`` suffix, which user
input cannot spell except through printed output fed back in; the parser
bumps the counter past any such suffix it sees, so freshness is preserved.
"""

from __future__ import annotations

import enum
import itertools
import re
import threading
from dataclasses import dataclass
from typing import Iterator, Optional, Union


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Abs:
    binder: str
    body: "Term"


@dataclass(frozen=True)
class App:
    fun: "Term"
    arg: "Term"


@dataclass(frozen=True)
class ES:
    """``body[binder:=defn]``: binds ``binder`` in ``body`` only."""

    body: "Term"
    binder: str
    defn: "Term"


Term = Union[Var, Abs, App, ES]


# -- fresh names ------------------------------------------------------------

class _FreshSupply:
    def __init__(self) -> None:
        self._lock = threading.Lock()
        self._next = 0

    def take(self) -> int:
        with self._lock:
            n = self._next
            self._next += 1
            return n

    def reserve(self, n: int) -> None:
        with self._lock:
            if n >= self._next:
                self._next = n + 1


_supply = _FreshSupply()


def fresh(base: str = "") -> str:
    """A name never seen before, derived from ``base`` (``x`` -> ``x#17``)."""
    root = base.split("#", 1)[0]
    return f"{root}#{_supply.take()}"


def _note_name(name: str) -> None:
    if "#" in name:
        _supply.reserve(int(name.rsplit("#", 1)[1]))


# -- basic queries ----------------------------------------------------------

def free_vars(t: Term) -> frozenset:
    if isinstance(t, Var):
        return frozenset((t.name,))
    if isinstance(t, Abs):
        return free_vars(t.body) - {t.binder}
    if isinstance(t, App):
        return free_vars(t.fun) | free_vars(t.arg)
    return (free_vars(t.body) - {t.binder}) | free_vars(t.defn)


def size(t: Term) -> int:
    """Number of constructors."""
    if isinstance(t, Var):
        return 1
    if isinstance(t, Abs):
        return 1 + size(t.body)
    if isinstance(t, App):
        return 1 + size(t.fun) + size(t.arg)
    return 1 + size(t.body) + size(t.defn)


def is_value(t: Term) -> bool:
    return isinstance(t, (Var, Abs))


def has_es(t: Term) -> bool:
    if isinstance(t, Var):
        return False
    if isinstance(t, Abs):
        return has_es(t.body)
    if isinstance(t, App):
        return has_es(t.fun) or has_es(t.arg)
    return True


def in_kernel(t: Term) -> bool:
    """Every application argument, at any depth, is a value."""
    if isinstance(t, Var):
        return True
    if isinstance(t, Abs):
        return in_kernel(t.body)
    if isinstance(t, App):
        return is_value(t.arg) and in_kernel(t.fun) and in_kernel(t.arg)
    return in_kernel(t.body) and in_kernel(t.defn)


def count_es(t: Term) -> int:
    if isinstance(t, Var):
        return 0
    if isinstance(t, Abs):
        return count_es(t.body)
    if isinstance(t, App):
        return count_es(t.fun) + count_es(t.arg)
    return 1 + count_es(t.body) + count_es(t.defn)


def subterms(t: Term) -> Iterator[Term]:
    """Every subterm, including those under abstractions."""
    stack = [t]
    while stack:
        s = stack.pop()
        yield s
        if isinstance(s, Abs):
            stack.append(s.body)
        elif isinstance(s, App):
            stack.extend((s.arg, s.fun))
        elif isinstance(s, ES):
            stack.extend((s.defn, s.body))


# -- substitution and alpha-equivalence -------------------------------------

def substitute(t: Term, x: str, u: Term) -> Term:
    """Capture-avoiding ``t{x:=u}``; ``u`` may be any term."""
    return _subst(t, x, u, free_vars(u))


def rename(t: Term, x: str, y: str) -> Term:
    """Replace free ``x`` by the variable ``y`` (``y`` assumed fresh)."""
    return _subst(t, x, Var(y), frozenset((y,)))


def _subst(t: Term, x: str, u: Term, fvu: frozenset) -> Term:
    if isinstance(t, Var):
        return u if t.name == x else t
    if isinstance(t, App):
        return App(_subst(t.fun, x, u, fvu), _subst(t.arg, x, u, fvu))
    if isinstance(t, Abs):
        if t.binder == x:
            return t
        binder, body = _avoid(t.binder, t.body, x, fvu)
        return Abs(binder, _subst(body, x, u, fvu))
    defn = _subst(t.defn, x, u, fvu)
    if t.binder == x:
        return ES(t.body, t.binder, defn)
    binder, body = _avoid(t.binder, t.body, x, fvu)
    return ES(_subst(body, x, u, fvu), binder, defn)


def _avoid(binder: str, body: Term, x: str, fvu: frozenset):
    if binder in fvu and x in free_vars(body):
        new = fresh(binder)
        return new, rename(body, binder, new)
    return binder, body


def canonical(t: Term):
    """A hashable key identifying ``t`` up to alpha-equivalence.

    Bound occurrences become de Bruijn levels, free ones keep their name.
    """
    return _canon(t, {}, 0)


def _canon(t: Term, env: dict, depth: int):
    if isinstance(t, Var):
        level = env.get(t.name)
        return ("f", t.name) if level is None else ("b", level)
    if isinstance(t, App):
        return ("@", _canon(t.fun, env, depth), _canon(t.arg, env, depth))
    if isinstance(t, Abs):
        inner = dict(env)
        inner[t.binder] = depth
        return ("\\", _canon(t.body, inner, depth + 1))
    inner = dict(env)
    inner[t.binder] = depth
    return ("[]", _canon(t.body, inner, depth + 1), _canon(t.defn, env, depth))


def alpha_eq(t: Term, u: Term) -> bool:
    return canonical(t) == canonical(u)


# -- classifiers ------------------------------------------------------------

class FireClass(enum.Enum):
    ABS_FIREBALL = "AbsFireball"
    INERT = "Inert"
    NOT_FIREBALL = "NotFireball"


class LanguageError(ValueError):
    """A term lies outside the language an operation expects."""


def is_inert(t: Term) -> bool:
    """``i ::= x | i f`` (ES-free)."""
    while isinstance(t, App):
        if not is_fireball(t.arg):
            return False
        t = t.fun
    return isinstance(t, Var)


def is_fireball(t: Term) -> bool:
    return isinstance(t, Abs) or is_inert(t)


def classify_fire(t: Term) -> FireClass:
    if has_es(t):
        raise LanguageError("classify_fire expects a term without explicit substitutions")
    if isinstance(t, Abs):
        return FireClass.ABS_FIREBALL
    if is_inert(t):
        return FireClass.INERT
    return FireClass.NOT_FIREBALL


def unfold(t: Term) -> Term:
    """Run every ES as a meta-level substitution."""
    if isinstance(t, Var):
        return t
    if isinstance(t, Abs):
        return Abs(t.binder, unfold(t.body))
    if isinstance(t, App):
        return App(unfold(t.fun), unfold(t.arg))
    return substitute(unfold(t.body), t.binder, unfold(t.defn))


@dataclass(frozen=True)
class CleanDecomposition:
    body: Term
    bindings: tuple  # ((binder, inert term), ...), innermost first

    def rebuild(self) -> Term:
        t = self.body
        for x, i in self.bindings:
            t = ES(t, x, i)
        return t


def peel(t: Term):
    """Split ``t = L<core>`` with ``L`` a maximal ES spine.

    Returns ``(core, bindings)`` with bindings innermost first.
    """
    spine = []
    while isinstance(t, ES):
        spine.append((t.binder, t.defn))
        t = t.body
    spine.reverse()
    return t, spine


def wrap(core: Term, bindings) -> Term:
    for x, d in bindings:
        core = ES(core, x, d)
    return core


def clean_decompose(t: Term) -> Optional[CleanDecomposition]:
    """The body/bindings split of a clean term, or ``None`` if not clean."""
    body, spine = peel(t)
    if has_es(body):
        return None
    for _, i in spine:
        if has_es(i) or not is_inert(i):
            return None
    return CleanDecomposition(body, tuple(spine))


def is_harmless(t: Term, weak: bool = False) -> bool:
    """Every ``u[x:=L<v>]`` inside ``t`` has ``u = s v'`` with ``x`` not free in ``s``.

    With ``weak`` set, subterms under an abstraction are not inspected.
    """
    todo = [t]
    while todo:
        s = todo.pop()
        if isinstance(s, Abs):
            if not weak:
                todo.append(s.body)
            continue
        if isinstance(s, App):
            todo += [s.fun, s.arg]
            continue
        if not isinstance(s, ES):
            continue
        todo += [s.body, s.defn]
        core, _ = peel(s.defn)
        if not is_value(core):
            continue
        u = s.body
        if not (isinstance(u, App) and is_value(u.arg)):
            return False
        if s.binder in free_vars(u.fun):
            return False
    return True


# -- printing ---------------------------------------------------------------

def print_term(t: Term) -> str:
    """Concrete syntax; binder names are printed as they are."""
    if isinstance(t, Var):
        return t.name
    if isinstance(t, Abs):
        return "\\" + t.binder + "." + print_term(t.body)
    if isinstance(t, App):
        fun = print_term(t.fun)
        if isinstance(t.fun, Abs):
            fun = "(" + fun + ")"
        arg = print_term(t.arg)
        if isinstance(t.arg, (App, Abs)):
            arg = "(" + arg + ")"
        return fun + " " + arg
    body = print_term(t.body)
    if isinstance(t.body, (App, Abs)):
        body = "(" + body + ")"
    return body + "[" + t.binder + ":=" + print_term(t.defn) + "]"


# -- parsing ----------------------------------------------------------------

class ParseError(ValueError):
    def __init__(self, message: str, offset: int, expected: frozenset):
        self.offset = offset
        self.expected = expected
        exp = ", ".join(sorted(expected))
        super().__init__(f"{message} at byte {offset} (expected one of: {exp})")


IDENT = r"[a-zA-Z][a-zA-Z0-9_']*(?:#[0-9]+)?|#[0-9]+"
_TOKEN = re.compile(
    r"(?P<kw>mu~)|(?P<ident>" + IDENT + r")|(?P<sym>:=|\\|λ|\.|\(|\)|\[|\]|<|\||>|#)"
)
_SPACE = re.compile(r"\s*")


class Tokens:
    """Minimal tokenizer shared by the term and command parsers."""

    def __init__(self, text: str):
        self.text = text
        self.toks = []  # (kind, value, char offset)
        pos = 0
        while True:
            m = _SPACE.match(text, pos)
            pos = m.end()
            if pos == len(text):
                break
            m = _TOKEN.match(text, pos)
            if not m:
                self.toks.append(("bad", text[pos], pos))
                break
            if m.group("kw"):
                self.toks.append(("sym", "mu~", m.start()))
            elif m.group("ident"):
                self.toks.append(("ident", m.group("ident"), m.start("ident")))
            else:
                sym = m.group("sym")
                self.toks.append(("sym", "\\" if sym == "λ" else sym, m.start("sym")))
            pos = m.end()
        self.i = 0

    def offset(self) -> int:
        char = self.toks[self.i][2] if self.i < len(self.toks) else len(self.text)
        return len(self.text[:char].encode("utf-8"))

    def peek(self):
        return self.toks[self.i] if self.i < len(self.toks) else ("eof", "", len(self.text))

    def at(self, value: str) -> bool:
        kind, v, _ = self.peek()
        return kind == "sym" and v == value

    def fail(self, expected) -> ParseError:
        kind, v, _ = self.peek()
        what = "end of input" if kind == "eof" else f"unexpected {v!r}"
        return ParseError(what, self.offset(), frozenset(expected))

    def expect(self, value: str) -> None:
        if not self.at(value):
            raise self.fail({repr(value)})
        self.i += 1

    def ident(self) -> str:
        kind, v, _ = self.peek()
        if kind != "ident":
            raise self.fail({"identifier"})
        self.i += 1
        _note_name(v)
        return v

    def done(self) -> None:
        if self.peek()[0] != "eof":
            raise self.fail({"end of input"})


_ATOM_START = {"identifier", "'('"}


def parse_term(text: str) -> Term:
    toks = Tokens(text)
    t = _term(toks)
    toks.done()
    return t


def _term(toks: Tokens) -> Term:
    if toks.at("\\"):
        return _lam(toks)
    return _app(toks)


def _lam(toks: Tokens) -> Term:
    toks.expect("\\")
    binders = [toks.ident()]
    while toks.peek()[0] == "ident":
        binders.append(toks.ident())
    toks.expect(".")
    body = _term(toks)
    for x in reversed(binders):
        body = Abs(x, body)
    return body


def _starts_atom(toks: Tokens) -> bool:
    return toks.peek()[0] == "ident" or toks.at("(")


def _app(toks: Tokens) -> Term:
    if not _starts_atom(toks):
        raise toks.fail(_ATOM_START | {"'\\'"})
    t = _atom(toks)
    while True:
        if _starts_atom(toks):
            t = App(t, _atom(toks))
        elif toks.at("\\"):
            # a trailing abstraction extends to the right as far as possible
            return App(t, _lam(toks))
        else:
            return t


def _atom(toks: Tokens) -> Term:
    if toks.at("("):
        toks.i += 1
        t = _term(toks)
        toks.expect(")")
    else:
        t = Var(toks.ident())
    while toks.at("["):
        toks.i += 1
        x = toks.ident()
        toks.expect(":=")
        d = _term(toks)
        toks.expect("]")
        t = ES(t, x, d)
    return t
