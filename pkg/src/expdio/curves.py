"""Trinomial discriminants and the irreducibility/genus criterion for
curves f(x) = g(y).

The curve attached to exponents (y, z, r) is b^y - b^2 = c^z - c^r.  Root
counts are computed algebraically with squarefree parts and gcds, never by
numerical root finding.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

from .certificates import Certificate, register_replay
from .poly import Poly, discriminant, interpolate, poly_gcd, squarefree_part


def trinomial_disc_poly(n: int, k: int, a: int) -> Poly:
    """disc(X^n + a X^k + lam) as a polynomial in lam.

    General trinomial formula with d = gcd(n, k), N = n/d, K = k/d:
    (-1)^(n(n-1)/2) lam^(k-1) [n^N lam^(N-K) - (-1)^N (n-k)^(N-K) k^K a^N]^d
    """
    if not 0 < k < n:
        raise ValueError("need 0 < k < n")
    d = math.gcd(n, k)
    big_n, big_k = n // d, k // d
    const = (-1) ** big_n * (n - k) ** (big_n - big_k) * k ** big_k * a ** big_n
    bracket = Poly.monomial(big_n - big_k, n ** big_n) - const
    sign = (-1) ** (n * (n - 1) // 2)
    return Poly.monomial(k - 1, sign) * bracket ** d


@dataclass
class TrinomialDisc:
    shape: str  # "b-side" or "c-side"
    params: dict
    poly: Poly
    printed: Poly  # the closed form as usually displayed for this shape
    matches_printed: bool

    def __call__(self, lam):
        return self.poly(lam)


def _printed_b_side(y: int) -> Poly:
    h = y // 2
    inner = Poly.monomial(h - 1, y ** h) - 2 * (y - 2) ** (h - 1)
    return Poly.monomial(1, -1) * inner * inner


def _printed_c_side(z: int, r: int) -> Poly:
    sign = (-1) ** (z * (z - 1) // 2)
    inner = Poly.monomial(z - r, z ** z) - (z - r) ** (z - r) * r ** r
    return Poly.monomial(r - 1, sign) * inner


def stickelberger_disc(shape: str, **params) -> TrinomialDisc:
    """Discriminant of X^y - X^2 + lam (b-side) or X^z - X^r + lam (c-side).

    The exact polynomial comes from the general trinomial formula.  The
    single-bracket closed form is also returned; for the c-side it is only
    valid when gcd(z, r) = 1, and ``matches_printed`` records whether the two
    agree.
    """
    if shape == "b-side":
        y = params["y"]
        if y < 6 or y % 4 != 2:
            raise ValueError("b-side needs y = 2 (mod 4), y >= 6")
        poly = trinomial_disc_poly(y, 2, -1)
        printed = _printed_b_side(y)
    elif shape == "c-side":
        z, r = params["z"], params["r"]
        if not (z > r >= 3 and z % 2 and r % 2):
            raise ValueError("c-side needs odd z > r >= 3")
        poly = trinomial_disc_poly(z, r, -1)
        printed = _printed_c_side(z, r)
    else:
        raise ValueError("shape must be 'b-side' or 'c-side'")
    return TrinomialDisc(shape, dict(params), poly, printed, poly == printed)


def disc_oracle(f: Poly) -> int:
    """Discriminant by the subresultant route, independent of the formula."""
    if f.degree > 64:
        raise ValueError("oracle limited to desk-scale degrees")
    return discriminant(f)


def disc_in_lambda(f: Poly) -> Poly:
    """disc(f + lam) as a polynomial in lam, by exact interpolation."""
    n = f.degree
    xs = list(range(-(n // 2) - 1, n - n // 2 + 1))  # n + 1 nodes; degree <= n - 1
    ys = [disc_oracle(f + x) for x in xs]
    p = interpolate(xs, ys)
    return Poly(int(a) for a in p.c) if all(getattr(a, "denominator", 1) == 1 for a in p.c) else p


@dataclass
class DLSResult:
    orientation: str
    n: int
    m: int
    distinct_roots: int
    qualifying: int
    threshold: float
    exception: bool
    verdict: str  # "irreducible+positive-genus" or "inconclusive"

    def to_dict(self) -> dict:
        return dict(self.__dict__)


def dls_criterion(D: Poly, E: Poly, n: int, m: int, orientation: str = "custom") -> DLSResult:
    """Apply the root-count criterion to D = disc(f + lam), E = disc(g + lam)."""
    sq = squarefree_part(D)
    distinct = sq.degree
    common = poly_gcd(sq, E).degree if not E.is_zero() else distinct
    qualifying = distinct - common
    exception = m == 2 or (m == 3 and n == 3)
    passes = 2 * qualifying >= n and not exception
    return DLSResult(orientation, n, m, distinct, qualifying, n / 2, exception,
                     "irreducible+positive-genus" if passes else "inconclusive")


def dls_from_polys(f: Poly, g: Poly) -> DLSResult:
    return dls_criterion(disc_in_lambda(f), disc_in_lambda(g), f.degree, g.degree)


@dataclass
class DLSCertificate:
    y: int
    z: int
    r: int
    orientations: dict = field(default_factory=dict)

    @property
    def verdict(self) -> str:
        ok = any(o.verdict == "irreducible+positive-genus" for o in self.orientations.values())
        return "irreducible+positive-genus" if ok else "inconclusive"

    def certificate(self) -> Certificate:
        return Certificate(
            claim="dls", module="curves",
            inputs={"y": self.y, "z": self.z, "r": self.r},
            parameters={"orientations": sorted(self.orientations)},
            verdict=self.verdict, assumptions=["external: Davenport-Lewis-Schinzel criterion"],
            trace=[o.to_dict() for _, o in sorted(self.orientations.items())],
        )


def dls_certify(y: int, z: int, r: int) -> DLSCertificate:
    """Counts for both role assignments on b^y - b^2 = c^z - c^r.

    orientation "b-as-f": f = X^y - X^2 (n = y), g = X^z - X^r (m = z)
    orientation "c-as-f": f = X^z - X^r (n = z), g = X^y - X^2 (m = y)
    """
    if y < 6 or not z > r >= 3:
        raise ValueError("need y >= 6 and z > r >= 3")
    Db = stickelberger_disc("b-side", y=y).poly if y % 4 == 2 else trinomial_disc_poly(y, 2, -1)
    Ec = trinomial_disc_poly(z, r, -1)
    cert = DLSCertificate(y, z, r)
    cert.orientations["b-as-f"] = dls_criterion(Db, Ec, y, z, "b-as-f")
    cert.orientations["c-as-f"] = dls_criterion(Ec, Db, z, y, "c-as-f")
    return cert


@register_replay("dls")
def _replay_dls(cert: Certificate) -> str:
    i = cert.inputs
    return dls_certify(i["y"], i["z"], i["r"]).verdict
