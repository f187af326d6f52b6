from hypothesis import strategies as st

from ocbv.harness import GenConfig, gen_term
from ocbv.terms import ES, Abs, App, Var

NAMES = st.sampled_from(["x", "y", "z", "w"])
VARS = NAMES.map(Var)


def pure_terms(max_leaves=12):
    return st.recursive(
        VARS,
        lambda kids: st.one_of(
            st.builds(Abs, NAMES, kids),
            st.builds(App, kids, kids),
        ),
        max_leaves=max_leaves,
    )


def es_terms(max_leaves=12):
    return st.recursive(
        VARS,
        lambda kids: st.one_of(
            st.builds(Abs, NAMES, kids),
            st.builds(App, kids, kids),
            st.builds(ES, kids, NAMES, kids),
        ),
        max_leaves=max_leaves,
    )


def kernel_terms(max_leaves=12):
    def extend(kids):
        values = st.one_of(VARS, st.builds(Abs, NAMES, kids))
        return st.one_of(
            st.builds(Abs, NAMES, kids),
            st.builds(App, kids, values),
            st.builds(ES, kids, NAMES, kids),
        )

    return st.recursive(VARS, extend, max_leaves=max_leaves)


def values():
    return st.one_of(VARS, st.builds(Abs, NAMES, es_terms(6)))


def seeded(language, max_size=14):
    """Draw through the library's own generator (exercises its binder reuse)."""
    return st.integers(0, 2**32 - 1).map(
        lambda s: gen_term(GenConfig(seed=s, max_size=max_size, language=language))
    )
