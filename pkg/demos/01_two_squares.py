"""
Sums of two squares and the witness (a, b)
==========================================

Every admissible c splits as u^2 + v^2 with u even and v odd.  Raising
u + iv to an odd power r gives a pair with a^2 + b^2 = c^r.
"""

from expdio.lucas import LucasPair, lucas_term
from expdio.representations import decompose, factor, residue_class_filter, witness_from

# 85 = 5 * 17 has two primitive representations
c = 85
print(factor(c).factors)
reps = decompose(c)
for rep in reps:
    print(f"{c} = {rep.u}^2 + {rep.v}^2")

# residue conditions: c = 5 (mod 8) and no prime factor = 3 (mod 4)
print(residue_class_filter(85).passes, residue_class_filter(89).passes)

# the witness for r = 3, checked exactly
w = witness_from(reps[0], 3)
print(w.a, w.b, w.check())

# b is v times a Lucas number and a is u times a Lehmer number
rep = reps[0]
print(w.b == rep.v * abs(lucas_term(LucasPair.lucas(rep.u, rep.v), 3)))
print(w.a == rep.u * abs(lucas_term(LucasPair.lehmer(rep.u, rep.v), 3)))

# large c: Pollard-Brent does the factoring, Cornacchia the splitting
# 4e10+5 itself has prime factors = 3 (mod 4), so step to the next value that splits
big = 4 * 10 ** 10 + 5
while not (residue_class_filter(big).passes and decompose(big)):
    big += 8
print(big, factor(big).factors)
print([(r.u, r.v) for r in decompose(big)][:3])
