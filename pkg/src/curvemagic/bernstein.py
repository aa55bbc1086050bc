"""A multiple of the Bernstein polynomial from contact data alone.

After the shift y -> y - sigma/n (sigma the sum of the branches) the smallest
branch valuation delta equals the smallest contact.  The Newton weight of
x^k y^l is k/(n delta) + l/n.  The multiple is

    (s + 1) * M^A(s) * M^B(s) * M^C(s)

where M_r(s) = prod_lambda (s + 1 + (1+r)/lambda) runs over the distinct
nonzero eigenvalues of A, M^A collects r in [0, pi) on the lattice (1/d)N,
M^B collects the weights of the monomials x^k y^l (l <= n-2) of small
weight, and M^C collects M_r(s-1) for r in (delta, pi).
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from math import ceil, floor
from typing import Iterable, Mapping

from .bouquet import Bouquet, CharExponents, MultiplicityData, char_multiplicities, lagrange_coords
from .division import vec_valuation
from .errors import InputError, NotThroughOrigin, NotTransverse
from .magic import spectrum
from .puiseux import INF, PuiseuxSeries, YPoly
from .scalars import Q, format_rational
from .tree import build_tree


class SPolynomial:
    """Monic polynomial in s stored as its multiset of rational roots."""

    __slots__ = ("roots",)

    def __init__(self, roots: Iterable | Mapping = ()):
        if isinstance(roots, Mapping):
            self.roots = Counter({Q(r): k for r, k in roots.items() if k})
        else:
            self.roots = Counter(Q(r) for r in roots)

    @classmethod
    def linear(cls, c) -> "SPolynomial":
        """s + c."""
        return cls([-Q(c)])

    @property
    def degree(self) -> int:
        return sum(self.roots.values())

    def __mul__(self, other: "SPolynomial") -> "SPolynomial":
        return SPolynomial(self.roots + other.roots)

    def __eq__(self, other):
        return isinstance(other, SPolynomial) and self.roots == other.roots

    def __hash__(self):
        return hash(frozenset(self.roots.items()))

    def divides(self, other: "SPolynomial") -> bool:
        """Multiset inclusion of the roots."""
        return all(other.roots[r] >= k for r, k in self.roots.items())

    def factors(self) -> list[tuple[Fraction, int]]:
        """[(c, k)] for the factors (s + c)^k, sorted by c."""
        return sorted((-r, k) for r, k in self.roots.items())

    def coefficients(self) -> list[Fraction]:
        """Expanded coefficients, lowest degree first."""
        poly = [Q(1)]
        for r, k in self.roots.items():
            for _ in range(k):
                poly = [(poly[i - 1] if i else 0) - r * (poly[i] if i < len(poly) else 0)
                        for i in range(len(poly) + 1)]
        return poly

    def __call__(self, s):
        out = Q(1)
        for r, k in self.roots.items():
            out *= (s - r) ** k
        return out

    def saito_truncated(self) -> "SPolynomial":
        """Keep only roots in (-2, 0)."""
        return SPolynomial({r: k for r, k in self.roots.items() if -2 < r < 0})

    def __str__(self):
        parts = []
        for c, k in self.factors():
            base = "s" if c == 0 else f"(s + {format_rational(c)})" if c > 0 else \
                f"(s - {format_rational(-c)})"
            parts.append(base if k == 1 else f"{base}^{k}")
        return " * ".join(parts) if parts else "1"

    def __repr__(self):
        return f"SPolynomial({self})"


@dataclass(frozen=True)
class NewtonWeightData:
    n: int
    delta: Fraction
    d: int

    def weight(self, k, l) -> Fraction:
        return Q(k) / (self.n * self.delta) + Q(l, self.n)


# --------------------------------------------------------- shift and weights


def tschirnhaus_poly(f: YPoly) -> tuple[YPoly, PuiseuxSeries]:
    """f(y + sigma/n) with sigma = -coefficient of y^(n-1); returns (f shifted, sigma/n)."""
    n = f.degree
    s = f.coeff(n - 1).scale(Q(-1, n))
    return f.taylor_shift(s), s


def tschirnhaus_shift(b: Bouquet) -> Bouquet:
    """Branches a_i - sigma/n, so that they sum to 0."""
    poly = None
    if b.poly is not None:
        # the exact polynomial gives an exact shift
        poly, s = tschirnhaus_poly(b.poly)
    else:
        sig = PuiseuxSeries.zero()
        for a in b.branches:
            sig = sig + a
        s = sig.scale(Q(1, b.n))
    return Bouquet(tuple(a - s for a in b.branches), b.mult, poly)


def rho_weight(w: YPoly, nw: NewtonWeightData) -> Fraction:
    """Smallest Newton weight of a monomial of w (a lower bound past truncations)."""
    best = None
    for l, c in enumerate(w.coeffs):
        cands = [nw.weight(k, l) for k in c.terms]
        if c.trunc != INF:
            cands.append(nw.weight(c.trunc, l))
        if cands:
            m = min(cands)
            best = m if best is None else min(best, m)
    if best is None:
        raise InputError("the zero polynomial has no weight")
    return best


def euler_operator(w: YPoly, nw: NewtonWeightData) -> YPoly:
    """(x/(n delta)) w'_x + (y/n) w'_y: multiplies x^k y^l by its weight."""
    out = []
    for l, c in enumerate(w.coeffs):
        out.append(PuiseuxSeries({e: v * nw.weight(e, l) for e, v in c.terms.items()}, c.trunc))
    return YPoly(out)


def h_polynomial(f: YPoly, nw: NewtonWeightData) -> YPoly:
    """f - (y/n) f'_y - (x/(n delta)) f'_x."""
    return f - euler_operator(f, nw)


def compare_weights_check(b: Bouquet, w: YPoly, prec=None) -> tuple[Fraction, Fraction, bool]:
    """(val(w), n delta rho(w) - sup m_i, val >= bound)."""
    m = b.multiplicities
    delta = min(a.exact_valuation() for a in b.branches)
    nw = NewtonWeightData(b.n, delta, b.ramification)
    val = vec_valuation(lagrange_coords(b, w, prec))
    bound = b.n * delta * rho_weight(w, nw) - max(m.row_sums)
    return val, bound, val >= bound


@dataclass
class DivisionStep:
    """w h = w2 f + lam f'_y + w_tilde with w_tilde zero-sum."""

    w2: YPoly
    lam: PuiseuxSeries
    w_tilde: YPoly
    rho_w: Fraction
    rho_w2: Fraction | None
    val_w_tilde: object
    threshold: Fraction   # n delta rho(w) + delta

    def bounds_hold(self) -> bool:
        ok = self.lam.val_lb() > self.threshold
        ok = ok and (self.rho_w2 is None or self.rho_w2 > self.rho_w)
        return ok and self.val_w_tilde > self.threshold


def division_step(b: Bouquet, w: YPoly, prec=None) -> DivisionStep:
    """One weighted division of w h by f, for a bouquet with an exact polynomial."""
    if b.poly is None:
        raise InputError("the division step needs the exact defining polynomial")
    sb = tschirnhaus_shift(b)
    f = sb.poly
    n = sb.n
    delta = sb.multiplicities.min_contact()
    nw = NewtonWeightData(n, delta, sb.ramification)
    h = h_polynomial(f, nw)
    w2, rem = (w * h).divmod(f)
    lam = rem.coeff(n - 1).scale(Q(1, n))
    w_tilde = rem - f.diff_y() * lam
    rho_w = rho_weight(w, nw)
    thr = n * delta * rho_w + delta
    rho_w2 = None if all(c.is_exact_zero() for c in w2.coeffs) else rho_weight(w2, nw)
    if all(c.is_exact_zero() for c in w_tilde.coeffs):
        val_wt = INF
    else:
        val_wt = vec_valuation(lagrange_coords(sb, w_tilde, prec if prec is not None else thr + 2))
    return DivisionStep(w2, lam, w_tilde, rho_w, rho_w2, val_wt, thr)


# ------------------------------------------------------------ the products


def m_r(Lambda: Iterable, r) -> SPolynomial:
    """prod over distinct lambda of (s + 1 + (1+r)/lambda)."""
    r = Q(r)
    return SPolynomial([-1 - (1 + r) / Q(lam) for lam in sorted(set(Lambda))])


def _lattice(lo, hi, d: int, lo_open: bool) -> list[Fraction]:
    """Points k/d in [lo, hi) (or (lo, hi)) with k >= 0."""
    k0 = max(0, floor(Q(lo) * d) if not lo_open else floor(Q(lo) * d) + 1)
    if not lo_open and Q(k0, d) < lo:
        k0 += 1
    out = []
    k = k0
    while Q(k, d) < hi:
        out.append(Q(k, d))
        k += 1
    return out


def m_gros_A(Lambda, pi, d: int) -> SPolynomial:
    out = SPolynomial()
    for r in _lattice(0, Q(pi), d, False):
        out = out * m_r(Lambda, r)
    return out


def m_gros_B(n: int, delta, sup_mi, b_range: str = "displayed") -> SPolynomial:
    """prod (s + (k+1)/(n delta) + (l+1)/n).

    ``displayed``: 0 <= l <= n-2, k >= 0, k + l delta < sup m_i.
    ``prose``: all (k, l) with k/(n delta) + l/n < sup m_i / (n delta).
    """
    delta, sup_mi = Q(delta), Q(sup_mi)
    nd = n * delta
    roots = []
    if b_range == "displayed":
        for l in range(0, n - 1):
            k = 0
            while k + l * delta < sup_mi:
                roots.append(-(Q(k + 1) / nd + Q(l + 1, n)))
                k += 1
    elif b_range == "prose":
        limit = sup_mi / nd
        l = 0
        while Q(l, n) < limit:
            k = 0
            while Q(k) / nd + Q(l, n) < limit:
                roots.append(-(Q(k + 1) / nd + Q(l + 1, n)))
                k += 1
            l += 1
    else:
        raise ValueError(f"unknown range {b_range!r}")
    return SPolynomial(roots)


def m_gros_C(Lambda, delta, pi, d: int) -> SPolynomial:
    """prod over r in (delta, pi) of M_r(s - 1): roots -(1+r)/lambda."""
    out = SPolynomial()
    for r in _lattice(Q(delta), Q(pi), d, True):
        out = out * SPolynomial([-(1 + r) / Q(lam) for lam in sorted(set(Lambda))])
    return out


@dataclass(frozen=True)
class BernsteinMultiple:
    s_plus_1: SPolynomial
    A: SPolynomial
    B: SPolynomial
    C: SPolynomial
    Lambda: tuple[Fraction, ...]
    n: int
    delta: Fraction
    pi: Fraction
    sup_mi: Fraction
    d: int
    saito: bool = False

    @property
    def total(self) -> SPolynomial:
        t = self.s_plus_1 * self.A * self.B * self.C
        return t.saito_truncated() if self.saito else t


def _contact_data(x) -> tuple[MultiplicityData, int, bool]:
    """(contacts, d, came_from_branches)."""
    if isinstance(x, Bouquet):
        if not x.is_reduced:
            raise InputError("the Bernstein multiple needs a reduced bouquet")
        return x.multiplicities, x.ramification, True
    if isinstance(x, CharExponents):
        return char_multiplicities(x), x.n, False
    if isinstance(x, MultiplicityData):
        return x, x.ramification, False
    raise TypeError(f"unsupported input {type(x).__name__}")


def bernstein_multiple(x, *, saito: bool = False, b_range: str = "displayed") -> BernsteinMultiple:
    """(s+1) M^A M^B M^C for a bouquet, contact table or characteristic exponents."""
    m, d, from_branches = _contact_data(x)
    m.check_ultrametric()
    delta = m.min_contact()
    if delta <= 0:
        raise NotThroughOrigin("some pair of branches has contact 0")
    if from_branches and delta < 1:
        raise NotTransverse(f"smallest contact {delta} < 1: the y-degree exceeds the multiplicity")
    n = m.n
    t = build_tree(m)
    sp = spectrum(m)
    Lam = tuple(sp.nonzero_values())
    lam0 = t.gamma[t.root] * n
    if lam0 != n * delta or min(Lam) != lam0:
        raise AssertionError("smallest eigenvalue differs from n delta")
    rs = m.row_sums
    pi = max(rs[i] + m.m(i, j) for i in range(n) for j in range(n) if i != j)
    sup_mi = max(rs)
    return BernsteinMultiple(
        s_plus_1=SPolynomial.linear(1),
        A=m_gros_A(Lam, pi, d),
        B=m_gros_B(n, delta, sup_mi, b_range),
        C=m_gros_C(Lam, delta, pi, d),
        Lambda=Lam, n=n, delta=delta, pi=pi, sup_mi=sup_mi, d=d, saito=saito,
    )


def divisibility_check(multiple: SPolynomial | BernsteinMultiple, b: SPolynomial) -> bool:
    if isinstance(multiple, BernsteinMultiple):
        multiple = multiple.total
    return b.divides(multiple)


__all__ = [
    "BernsteinMultiple", "DivisionStep", "NewtonWeightData", "SPolynomial", "bernstein_multiple",
    "compare_weights_check", "divisibility_check", "division_step", "euler_operator",
    "h_polynomial", "m_gros_A", "m_gros_B", "m_gros_C", "m_r", "rho_weight", "tschirnhaus_poly",
    "tschirnhaus_shift",
]
