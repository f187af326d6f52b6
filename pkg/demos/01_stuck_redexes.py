# %% [markdown]
# Two open terms that plain call-by-value gets wrong.
#
# With free variables around, an argument like `z z` is normal but is not a
# value, so the redex `(\y. ...) (z z)` is stuck and plain evaluation stops.
# The four open calculi all see that these terms diverge.

# %%
from ocbv.engines import evaluate
from ocbv.sequent import evaluate_seq
from ocbv.terms import parse_term, print_term
from ocbv.translations import to_kernel, to_sequent

delta = r"(\x.x x)"
t = parse_term(rf"((\y.{delta}) (z z)) {delta}")
u = parse_term(rf"{delta} ((\y.{delta}) (z z))")

for name, term in (("t", t), ("u", u)):
    print(name, "=", print_term(term))
    for calc in ("plot", "fire", "vsub", "shuf"):
        d = evaluate(term, calc, fuel=100)
        print(f"  {calc:<5} {d.status:<8} after {len(d)} steps")
    d = evaluate_seq(to_sequent(to_kernel(term)), fuel=100)
    print(f"  vseq  {d.status:<8} after {len(d)} steps")

# %% [markdown]
# The first few steps of `t` in each open calculus.

# %%
for calc in ("fire", "vsub", "shuf"):
    print(calc)
    for line in evaluate(t, calc, fuel=3).trace_lines():
        print("  ", line)
