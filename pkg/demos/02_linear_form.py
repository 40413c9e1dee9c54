"""
A linear form in two logarithms
===============================

For eps = u + iv, alpha = eps / conj(eps) lies on the unit circle and
min{|Re eps^n|, |Im eps^n|} is governed by how close n arg(alpha) gets to a
multiple of pi/2.  Everything below is certified with interval arithmetic.
"""

from fractions import Fraction

from expdio.linear_forms import (LaurentParams, admissible_a, angle_min_lower_bound, build_form,
                                 class_verdict, exponent_threshold, laurent_verdict, load_profile,
                                 min_xy_actual, min_xy_bound)
from expdio.representations import Representation

rep = Representation(85, 6, 7)
inst = build_form(rep, 51)
lam = inst.abs_lam()
print(f"n = 51: |Lambda| in [{float(lam.lo):.6e}, {float(lam.hi):.6e}]")

# the exact min{X, Y} against the pi form Z^(n/2) |Lambda| / pi
b = min_xy_bound(inst, lam.lo)
print(min_xy_actual(inst) >= b.pi_form)

# continued fractions bound the angle uniformly over odd n
ab = angle_min_lower_bound(rep, 983)
print(f"min |2 n xi - k pi| over n <= 983 is at least {float(ab.lower):.3e} (support q = {ab.support})")

# %%
# The explicit parameter rule at c = 4e10+5 fails condition III.
c = 4 * 10 ** 10 + 5
a1, a2 = admissible_a(Fraction("7.7"), c)
p = LaurentParams.from_rule(8, Fraction("7.7"), Fraction("0.56"), Fraction("0.1166"), 4, 2,
                            float(a1.hi), float(a2.hi))
v = class_verdict(c, 771, 771, p)
print(p.K, p.R2, p.S2, v.failed, float(v.lhs.mid), float(v.rhs.mid))

# %%
# A searched, certified profile does work, with somewhat weaker thresholds.
prof = load_profile(c)
print(f"theta for n >= 771: {float(prof.theta_uniform(771)):.4f}")
for y in (6, 10, 602):
    print(y, exponent_threshold(prof, "r", y).bound, exponent_threshold(prof, "z", y).bound)

# the same block's parameters, applied to one concrete form
blk = next(b for b in prof.blocks if b.lo <= 1001 <= b.hi)
print(laurent_verdict(build_form(rep, 1001), blk.params).lambda_lower)
