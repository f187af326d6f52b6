# %% [markdown]
# From terms to commands.
#
# The kernel translation names every argument with an explicit
# substitution; the kernel then maps onto sequent commands, where
# multiplicative steps become lambda-bar steps and exponential steps become
# mu-tilde steps.

# %%
from ocbv.engines import evaluate
from ocbv.equiv import float_equiv
from ocbv.sequent import print_command
from ocbv.terms import alpha_eq, parse_term, print_term
from ocbv.translations import from_sequent, simulate_kernel_in_seq, to_kernel, to_sequent

t = parse_term(r"(\x.x x) ((\y.y) (\z.z))")
k = to_kernel(t)
print("term   ", print_term(t))
print("kernel ", print_term(k))
print("command", print_command(to_sequent(k)))

d = evaluate(k, "vsubk")
s = simulate_kernel_in_seq(d)
for (ks, _), (ss, _) in zip(d.steps, s.steps):
    print(f"{str(ks):<22} | {ss}")
print("end:", print_command(s.end))

# %% [markdown]
# Going back from commands is exact on commands, but not on terms: an ES
# sitting on the head of an application comes back floated over it.
# The two are structurally equivalent.

# %%
t = parse_term("x[x:=y] z")
back = from_sequent(to_sequent(t))
print(print_term(t), "->", print_term(back))
print("alpha-equal:", alpha_eq(t, back), " structurally equivalent:", float_equiv(t, back))
