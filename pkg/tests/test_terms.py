import pytest
from hypothesis import assume, given

import oracle
from ocbv.terms import (
    ES,
    Abs,
    App,
    FireClass,
    LanguageError,
    ParseError,
    Var,
    alpha_eq,
    classify_fire,
    clean_decompose,
    free_vars,
    fresh,
    in_kernel,
    is_harmless,
    parse_term,
    print_term,
    rename,
    size,
    substitute,
    unfold,
)
from strategies import NAMES, es_terms, kernel_terms, pure_terms, seeded, values

x, y, z, w = Var("x"), Var("y"), Var("z"), Var("w")
DELTA = Abs("x", App(x, x))
P = parse_term


# -- parsing and printing ---------------------------------------------------

def test_parse_lambda_body_extends_right():
    assert P(r"\x.x x") == Abs("x", App(x, x))


def test_parse_es_atom():
    assert P("(x z)[z:=y]") == ES(App(x, z), "z", y)


def test_parse_example_t():
    t = P(r"((\y.\x.x x) (z z)) (\x.x x)")
    assert t == App(App(Abs("y", DELTA), App(z, z)), DELTA)


def test_application_is_left_associative():
    assert P("x y z") == App(App(x, y), z)


def test_multi_binder_lambda():
    assert P(r"\x y.x") == Abs("x", Abs("y", x))


def test_es_binds_only_the_atom():
    assert P("x y[y:=z]") == App(x, ES(y, "y", z))


def test_stacked_es():
    assert P("x[x:=y][y:=z]") == ES(ES(x, "x", y), "y", z)


def test_unicode_lambda_accepted():
    assert P("λx.x") == Abs("x", x)


def test_trailing_lambda_argument():
    assert P(r"x \y.y") == App(x, Abs("y", y))


def test_print_examples():
    assert print_term(Abs("x", x)) == r"\x.x"
    assert print_term(ES(x, "y", z)) == "x[y:=z]"
    assert print_term(App(DELTA, DELTA)) == r"(\x.x x) (\x.x x)"


@pytest.mark.parametrize(
    "text, offset",
    [("(x", 2), ("x)", 1), (r"\.x", 1), ("x[y=z]", 3), ("", 0), ("x y .", 4), ("1x", 0)],
)
def test_parse_errors_report_offset(text, offset):
    with pytest.raises(ParseError) as info:
        P(text)
    assert info.value.offset == offset
    assert info.value.expected


def test_parse_error_offset_counts_bytes():
    with pytest.raises(ParseError) as info:
        P("λx.)")
    assert info.value.offset == len("λx.".encode())


def test_fresh_names_round_trip():
    t = P("(x #0)[#0:=y]")
    assert print_term(t) == "(x #0)[#0:=y]"
    # the parser bumps the supply past names it has seen
    assert fresh("x") != "x#0" and fresh("") not in {"#0"}


@given(es_terms())
def test_print_parse_round_trip(t):
    assert alpha_eq(P(print_term(t)), t)


@given(seeded("WithES", 25))
def test_print_parse_round_trip_generated(t):
    assert P(print_term(t)) == t


# -- binding ----------------------------------------------------------------

def test_free_vars_examples():
    assert free_vars(x) == {"x"}
    assert free_vars(ES(x, "x", y)) == {"y"}
    assert free_vars(App(Abs("x", x), z)) == {"z"}


def test_substitute_examples():
    assert substitute(x, "x", DELTA) == DELTA
    captured = substitute(Abs("y", x), "x", y)
    assert isinstance(captured, Abs) and captured.binder != "y" and captured.body == y
    assert substitute(DELTA, "y", App(z, z)) == DELTA


def test_substitute_goes_through_es():
    t = substitute(ES(App(x, y), "x", y), "y", z)
    assert alpha_eq(t, ES(App(x, z), "x", z))


def test_alpha_eq_examples():
    assert alpha_eq(Abs("x", x), Abs("y", y))
    assert alpha_eq(ES(x, "y", z), ES(x, "w", z))
    assert not alpha_eq(P(r"\x.x y"), P(r"\y.y y"))


@given(es_terms(), NAMES, es_terms())
def test_substitute_matches_nameless_oracle(t, name, u):
    got = oracle.to_db(substitute(t, name, u))
    assert got == oracle.replace_free(oracle.to_db(t), name, oracle.to_db(u))


@given(es_terms(), es_terms())
def test_alpha_eq_matches_nameless_oracle(t, u):
    assert alpha_eq(t, u) == (oracle.to_db(t) == oracle.to_db(u))


@given(es_terms(), NAMES)
def test_renaming_a_binder_is_alpha_invisible(t, name):
    assume(isinstance(t, (Abs, ES)))
    new = fresh(t.binder)
    body = rename(t.body, t.binder, new)
    moved = Abs(new, body) if isinstance(t, Abs) else ES(body, new, t.defn)
    assert alpha_eq(moved, t)


@given(es_terms(), values(), es_terms(6))
def test_substitution_composes(t, v, wv):
    # t{x:=v}{y:=w} = t{y:=w}{x:=v{y:=w}} when x is not free in w
    assume("x" not in free_vars(wv))
    lhs = substitute(substitute(t, "x", v), "y", wv)
    rhs = substitute(substitute(t, "y", wv), "x", substitute(v, "y", wv))
    assert alpha_eq(lhs, rhs)


# -- classification -----------------------------------------------------------

@pytest.mark.parametrize(
    "text, cls",
    [
        (r"x (\y.y)", FireClass.INERT),
        (r"(z (\x.x)) (z z) (\y.z y)", FireClass.INERT),
        (r"(\x.x) y", FireClass.NOT_FIREBALL),
        (r"\x.(\y.y) x", FireClass.ABS_FIREBALL),
        ("x", FireClass.INERT),
        (r"x ((\y.y) z)", FireClass.NOT_FIREBALL),
    ],
)
def test_classify_fire(text, cls):
    assert classify_fire(P(text)) == cls


def test_classify_rejects_es():
    with pytest.raises(LanguageError):
        classify_fire(P("x[x:=y]"))


def test_kernel_membership():
    assert in_kernel(P("(x #0)[#0:=y]"))
    assert not in_kernel(P("x (y z)"))


# -- unfolding, cleanliness, harmlessness -------------------------------------

def test_unfold_examples():
    assert alpha_eq(unfold(P(r"(x x)[x:=\y.y]")), P(r"(\y.y) (\y.y)"))
    t = P(r"(\x.x x) z")
    assert unfold(t) == t
    assert unfold(P(r"x[y:=(\x.x x) (\x.x x)]")) == x


@given(es_terms())
def test_unfold_matches_nameless_oracle(t):
    assert oracle.to_db(unfold(t)) == oracle.unfold(oracle.to_db(t))


@given(es_terms(), values())
def test_unfold_commutes_with_value_substitution(t, v):
    assert alpha_eq(unfold(substitute(t, "x", v)), substitute(unfold(t), "x", unfold(v)))


def test_clean_decompose_examples():
    d = clean_decompose(P("(x x)[x:=z w]"))
    assert d.body == App(x, x) and d.bindings == (("x", App(z, w)),)
    t = P(r"\x.x")
    assert clean_decompose(t).body == t and not clean_decompose(t).bindings
    assert clean_decompose(P(r"x[y:=(\z.z) w]")) is None


@given(es_terms())
def test_clean_decomposition_rebuilds_and_unfolds(t):
    d = clean_decompose(t)
    if d is None:
        return
    assert d.rebuild() == t
    s = d.body
    for name, i in d.bindings:
        s = substitute(s, name, i)
    assert alpha_eq(unfold(t), s)


def test_harmless_examples():
    assert is_harmless(P(r"(x y)[y:=\z.z]"))
    assert not is_harmless(P(r"(y x)[y:=\z.z]"))
    assert is_harmless(P(r"(\x.x x) (y y)"))


def test_weak_harmlessness_ignores_abstraction_bodies():
    t = P(r"\a.z[b:=\c.c]")
    assert not is_harmless(t)
    assert is_harmless(t, weak=True)


# -- sizes ------------------------------------------------------------------

def test_size_counts_constructors():
    assert size(P(r"(\x.x) y[y:=z]")) == 6


@given(kernel_terms())
def test_kernel_strategy_stays_in_kernel(t):
    assert in_kernel(t)


@given(pure_terms())
def test_pure_terms_are_their_own_unfolding(t):
    assert unfold(t) == t
