"""
Discriminants of trinomials and the curve criterion
===================================================

b^y - b^2 = c^z - c^r is a curve f(X) = g(Y).  Whether it has finitely many
integer points depends on how many roots of disc(f + lam) in lam are simple.
"""

from expdio.curves import dls_certify, stickelberger_disc
from expdio.poly import Poly, discriminant

# closed form versus the subresultant route
d = stickelberger_disc("b-side", y=6)
print(d.poly)
print(d(3) == discriminant(Poly.monomial(6) - Poly.monomial(2) + 3))

# gcd(z, r) > 1 changes the shape of the c-side formula
print(stickelberger_disc("c-side", z=9, r=3).poly, stickelberger_disc("c-side", z=9, r=3).matches_printed)

# the criterion tries both orientations
for y, z, r in ((6, 5, 3), (10, 7, 3)):
    cert = dls_certify(y, z, r)
    print((y, z, r), cert.verdict, {k: o.verdict for k, o in cert.orientations.items()})
