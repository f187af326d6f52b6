from collections import Counter

import pytest
from hypothesis import given

import oracle
from ocbv.engines import (
    ARG,
    ES_BODY,
    FUN,
    FUELLED,
    LAM_BODY,
    NORMAL,
    Derivation,
    RedexSite,
    Rule,
    StaleSite,
    e_normal_form,
    enumerate_redexes,
    evaluate,
    m_normal_form,
    reducts,
    step,
    step_counts,
)
from ocbv.harness import all_maximal_derivations
from ocbv.terms import LanguageError, alpha_eq, count_es, parse_term
from strategies import es_terms, kernel_terms, pure_terms, seeded

P = parse_term
DELTA = r"(\x.x x)"
T = P(rf"((\y.{DELTA}) (z z)) {DELTA}")
U = P(rf"{DELTA} ((\y.{DELTA}) (z z))")


def run(t, calc, n):
    """The first ``n`` terms of the deterministic run."""
    d = evaluate(t, calc, fuel=n)
    return [(site, term) for site, term in d.steps]


# -- the worked examples ------------------------------------------------------

def test_t_is_plot_normal():
    assert enumerate_redexes(T, "plot") == []
    assert enumerate_redexes(U, "plot") == []


def test_fire_run_of_t():
    assert enumerate_redexes(T, "fire") == [RedexSite((FUN,), Rule.BETA_INERT)]
    steps = run(T, "fire", 3)
    dd = P(f"{DELTA} {DELTA}")
    assert [s.rule for s, _ in steps] == [Rule.BETA_INERT, Rule.BETA_ABS, Rule.BETA_ABS]
    assert all(alpha_eq(term, dd) for _, term in steps)


def test_vsub_run_of_t():
    steps = run(T, "vsub", 3)
    expected = [
        (Rule.MULT, (FUN,), rf"{DELTA}[y:=z z] {DELTA}"),
        (Rule.MULT, (), rf"(x x)[x:={DELTA}][y:=z z]"),
        (Rule.EXP_ABS, (ES_BODY,), rf"({DELTA} {DELTA})[y:=z z]"),
    ]
    for (site, term), (rule, path, text) in zip(steps, expected):
        assert site.rule == rule and site.path == path
        assert alpha_eq(term, P(text))


def test_shuf_run_of_t():
    steps = run(T, "shuf", 3)
    assert steps[0][0] == RedexSite((), Rule.SIGMA_L)
    assert alpha_eq(steps[0][1], P(rf"(\y.{DELTA} {DELTA}) (z z)"))
    for site, term in steps[1:]:
        assert site == RedexSite((FUN, LAM_BODY), Rule.BETA_SHUF)
        assert alpha_eq(term, steps[0][1])


def test_shuf_run_of_u_starts_with_sigma_r():
    assert enumerate_redexes(U, "shuf")[0].rule == Rule.SIGMA_R


@pytest.mark.parametrize("calc", ["fire", "vsub", "shuf"])
@pytest.mark.parametrize("term", [T, U], ids=["t", "u"])
def test_divergent_examples_are_fuelled(calc, term):
    assert evaluate(term, calc, fuel=100).status == FUELLED


def test_step_examples():
    t = P(rf"(x x)[x:={DELTA}][y:=z z]")
    (site,) = enumerate_redexes(t, "vsub")
    assert alpha_eq(step(t, site), P(rf"({DELTA} {DELTA})[y:=z z]"))


def test_identity_in_vsub():
    t = P(r"(\x.x) (\y.y)")
    assert enumerate_redexes(t, "vsub") == [RedexSite((), Rule.MULT)]
    d = evaluate(t, "vsub", fuel=10)
    assert d.status == NORMAL and alpha_eq(d.end, P(r"\y.y"))
    assert d.counts[Rule.MULT] == 1 and d.counts[Rule.EXP_ABS] == 1 and len(d) == 2


def test_fireball_is_fire_normal():
    d = evaluate(P(r"x (\y.y)"), "fire", fuel=10)
    assert d.status == NORMAL and len(d) == 0


def test_step_counts_of_empty_derivation():
    assert all(v == 0 for v in step_counts(Derivation("vsub", T)).values())


def test_trace_format():
    d = evaluate(P(r"(\x.x) (\y.y)"), "vsub")
    assert d.trace_lines() == [r"Mult @ [] : x[x:=\y.y]", r"ExpAbs @ [] : \y.y"]


# -- contexts and guards ------------------------------------------------------

def test_plot_and_fire_do_not_reduce_under_lambda():
    t = P(r"\z.(\x.x) (\y.y)")
    assert enumerate_redexes(t, "plot") == enumerate_redexes(t, "fire") == []


def test_shuf_reduces_inside_applied_abstraction_only():
    assert enumerate_redexes(P(r"\z.(\x.x) (\y.y)"), "shuf") == []
    sites = enumerate_redexes(P(r"(\z.(\x.x) (\y.y)) w"), "shuf")
    assert RedexSite((FUN, LAM_BODY), Rule.BETA_SHUF) in sites


def test_shuf_nested_balanced_abstractions():
    t = P(r"(\a.(\b.(\x.x) (\y.y)) a) w")
    sites = enumerate_redexes(t, "shuf")
    assert RedexSite((FUN, LAM_BODY, FUN, LAM_BODY), Rule.BETA_SHUF) in sites
    assert evaluate(t, "shuf").status == NORMAL


def test_es_definitions_are_evaluation_positions():
    t = P(r"x[x:=(\y.y) z]")
    assert [s.path for s in enumerate_redexes(t, "vsub")] == [("DefOfES",)]


def test_language_guards():
    with pytest.raises(LanguageError):
        enumerate_redexes(P("x[x:=y]"), "fire")
    with pytest.raises(LanguageError):
        enumerate_redexes(P("x (y z)"), "vsubk")


def test_stale_site():
    with pytest.raises(StaleSite):
        step(P("x y"), RedexSite((ARG,), Rule.MULT))


def test_fuel_from_environment(monkeypatch):
    monkeypatch.setenv("OCBV_FUEL", "7")
    assert len(evaluate(T, "fire")) == 7
    with pytest.raises(ValueError):
        evaluate(T, "fire", fuel=0)


def test_mult_keeps_substitution_context_binders_apart():
    # the L around the abstraction binds y, which is free in the argument
    t = P(r"(\x.x y)[y:=z] y")
    sites = enumerate_redexes(t, "vsub")
    assert sites == [RedexSite((), Rule.MULT), RedexSite((FUN,), Rule.EXP_VAR)]
    assert alpha_eq(step(t, sites[0]), P("(x y#9)[x:=y][y#9:=z]"))


def test_exp_abs_moves_the_context_outside():
    t = P(r"(x x)[x:=(\a.a)[b:=z]]")
    site = enumerate_redexes(t, "vsub")[0]
    assert site == RedexSite((), Rule.EXP_ABS)
    assert alpha_eq(step(t, site), P(r"((\a.a) (\a.a))[b:=z]"))


# -- normal forms -------------------------------------------------------------

def test_m_normal_form_examples():
    assert alpha_eq(m_normal_form(P(r"((\x.x y) z) w")), P("(x y)[x:=z] w"))
    t = P("x y")
    assert m_normal_form(t) == t


def test_e_normal_form_examples():
    assert e_normal_form(P("x[y:=z]")) == P("x")
    assert alpha_eq(e_normal_form(P("(x y)[x:=z]")), P("z y"))


@given(es_terms())
def test_m_normal_form_agrees_with_restricted_evaluation(t):
    nf = m_normal_form(t)
    assert not enumerate_redexes(nf, "vsub", {Rule.MULT})
    assert alpha_eq(nf, evaluate(t, "vsub", rules={Rule.MULT}, fuel=10_000).end)


# -- reference comparison -----------------------------------------------------

@pytest.mark.parametrize("calc", ["plot", "fire"])
@given(t=pure_terms())
def test_reducts_match_nameless_oracle(calc, t):
    mine = Counter(oracle.to_db(u) for _, u in reducts(t, calc))
    ref = Counter(oracle.reducts(oracle.to_db(t), calc))
    assert mine == ref


@given(kernel_terms())
def test_vsubk_stays_in_kernel(t):
    for _, u in reducts(t, "vsubk"):
        enumerate_redexes(u, "vsubk")  # raises if the kernel is left


@given(seeded("Pure", 16))
def test_e_le_m_from_es_free_start(t):
    d = evaluate(t, "vsub", fuel=200, size_limit=3000)
    m = e = 0
    for site, _ in d.steps:
        m += site.rule == Rule.MULT
        e += site.rule != Rule.MULT
        assert e <= m
    if d.status == NORMAL:
        assert e == m - count_es(d.end)


# -- strategy invariance ------------------------------------------------------

@given(seeded("WithES", 10))
def test_vsub_normalizing_runs_share_m_and_e(t):
    ds, truncated = all_maximal_derivations(t, "vsub", fuel=40, cap=400)
    normal = [d for d in ds if d.status == NORMAL]
    assert len({(d.m, d.e, len(d)) for d in normal}) <= 1


@given(seeded("Pure", 12))
def test_fire_normalizing_runs_share_counts(t):
    ds, _ = all_maximal_derivations(t, "fire", fuel=40, cap=400)
    normal = [d for d in ds if d.status == NORMAL]
    assert len({(d.count(Rule.BETA_ABS), d.count(Rule.BETA_INERT)) for d in normal}) <= 1


def test_exp_abs_count_alone_is_not_strategy_invariant():
    # an ExpVar step can turn a later ExpAbs into an ExpVar and vice versa
    t = P(r"(x x)[x:=z[z:=\a.a]]")
    ds, _ = all_maximal_derivations(t, "vsub", fuel=20, cap=100)
    splits = {(d.count(Rule.EXP_ABS), d.count(Rule.EXP_VAR)) for d in ds}
    assert len(splits) > 1
    assert len({d.e for d in ds}) == 1


def test_all_maximal_derivations_examples():
    ds, truncated = all_maximal_derivations(P("x"), "vsub")
    assert len(ds) == 1 and len(ds[0]) == 0 and not truncated
    ds, _ = all_maximal_derivations(P(r"(\x.x) (\y.y)"), "vsub")
    assert all(d.counts[Rule.MULT] == 1 and d.counts[Rule.EXP_ABS] == 1 for d in ds)
    ds, truncated = all_maximal_derivations(T, "fire", fuel=5)
    assert truncated and all(d.status == FUELLED for d in ds)


def test_shuf_lengths_vary_but_beta_count_does_not():
    t = P(rf"(\y.z) ({DELTA} (z z)) {DELTA}")
    ds, truncated = all_maximal_derivations(t, "shuf", fuel=30)
    assert not truncated
    assert len({len(d) for d in ds}) > 1
    assert len({d.count(Rule.BETA_SHUF) for d in ds}) == 1

