"""
Four ways to write one transform
================================

Each scheme is a list of 4x4 polynomial matrices acting on the quad
(LL, HL, LH, HH).  All four multiply out to the same total matrix, but they
differ in how many barriers they need and how much arithmetic each does.
"""

from wavelift import build_all, count_ops, verify_equivalence
from wavelift.schemes import dump
from wavelift.wavelets import builtin, load_custom

for name in ("cdf53", "cdf97"):
    w = builtin(name)
    schemes = build_all(w)
    print("\n" + name)
    print("{:<12} {:>6} {:>10}".format("scheme", "steps", "MACs/quad"))
    for sname, s in schemes.items():
        c = count_ops(s)
        print("{:<12} {:>6} {:>10}".format(sname, c.steps, c.macs_per_quad))
    # exact check: the products agree entry by entry over the rationals
    base = schemes["sep-lifting"]
    print("equivalent:", all(verify_equivalence(base, s) for s in schemes.values()))

# the adapted scheme keeps the neighbour-reading part first in each step,
# followed by constant-only parts that stay inside the worker's own rows
print()
print(dump(build_all(builtin("cdf53"))["ns-adapted"]))

# a custom wavelet from text; a Haar-like pair with a single constant tap
haar = load_custom("""
name = haar
predict[1] = -1
update[1]  = 1/2
""")
print()
for sname, s in build_all(haar).items():
    print(sname, count_ops(s).macs_per_quad)
