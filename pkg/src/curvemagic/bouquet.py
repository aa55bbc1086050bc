"""Bouquets of branches, contact multiplicities and Lagrange coordinates.

Indices are 0-based throughout the library; the JSON layer shifts to 1-based.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from math import gcd, lcm
from typing import Sequence

from .errors import InputError, InsufficientPrecision, NotUltrametric
from .puiseux import INF, PuiseuxSeries, YPoly, product_of_linear
from .scalars import Q, zeta


@dataclass(frozen=True)
class MultiplicityData:
    """Symmetric table of contacts m_ij (i != j); the diagonal is ignored.

    ``d`` is the ramification datum used by the weight lattice; when absent it
    defaults to the lcm of the denominators of the off-diagonal entries.
    """

    matrix: tuple[tuple[Fraction, ...], ...]
    d: int | None = None

    def __post_init__(self):
        n = len(self.matrix)
        if n < 2:
            raise InputError("need at least two branches")
        rows = []
        for i, row in enumerate(self.matrix):
            if len(row) != n:
                raise InputError("multiplicity matrix must be square")
            rows.append(tuple(Q(0) if i == j else Q(row[j]) for j in range(n)))
        for i in range(n):
            for j in range(i + 1, n):
                if rows[i][j] != rows[j][i]:
                    raise InputError(f"asymmetric entry ({i + 1},{j + 1})")
                if rows[i][j] < 0:
                    raise InputError(f"negative multiplicity at ({i + 1},{j + 1})")
        object.__setattr__(self, "matrix", tuple(rows))

    @classmethod
    def from_entries(cls, n: int, entries, d: int | None = None) -> "MultiplicityData":
        """From (i, j, m) triples with 1-based indices; every pair must appear."""
        mat = [[None] * n for _ in range(n)]
        for i, j, m in entries:
            if not (1 <= i <= n and 1 <= j <= n) or i == j:
                raise InputError(f"bad index pair ({i},{j})")
            m = Q(m)
            for a, b in ((i, j), (j, i)):
                if mat[a - 1][b - 1] is not None and mat[a - 1][b - 1] != m:
                    raise InputError(f"conflicting entries for ({i},{j})")
                mat[a - 1][b - 1] = m
        for i in range(n):
            mat[i][i] = Q(0)
            for j in range(n):
                if mat[i][j] is None:
                    raise InputError(f"missing entry ({i + 1},{j + 1})")
        return cls(tuple(tuple(r) for r in mat), d)

    @property
    def n(self) -> int:
        return len(self.matrix)

    def m(self, i: int, j: int) -> Fraction:
        return self.matrix[i][j]

    @cached_property
    def row_sums(self) -> tuple[Fraction, ...]:
        """m_i = sum_{j != i} m_ij."""
        return tuple(sum(r, Q(0)) for r in self.matrix)

    def pairs(self):
        n = self.n
        return ((i, j) for i in range(n) for j in range(i + 1, n))

    def min_contact(self) -> Fraction:
        return min(self.matrix[i][j] for i, j in self.pairs())

    def max_contact(self) -> Fraction:
        return max(self.matrix[i][j] for i, j in self.pairs())

    @property
    def ramification(self) -> int:
        if self.d is not None:
            return self.d
        return lcm(*[self.matrix[i][j].denominator for i, j in self.pairs()])

    def ultrametric_witness(self) -> tuple[int, int, int] | None:
        """A triple whose minimum contact is attained only once, else None."""
        n, M = self.n, self.matrix
        for i in range(n):
            for j in range(i + 1, n):
                for k in range(j + 1, n):
                    vals = sorted((M[i][j], M[j][k], M[i][k]))
                    if vals[0] != vals[1]:
                        return (i, j, k)
        return None

    def check_ultrametric(self) -> None:
        w = self.ultrametric_witness()
        if w is not None:
            i, j, k = w
            raise NotUltrametric(
                f"min(m{i+1}{j+1}, m{j+1}{k+1}, m{k+1}{i+1}) is attained once", w)

    def permute(self, perm: Sequence[int]) -> "MultiplicityData":
        """Entry (i, j) of the result is m(perm[i], perm[j])."""
        M = self.matrix
        return MultiplicityData(tuple(tuple(M[p][q] for q in perm) for p in perm), self.d)


@dataclass(frozen=True)
class CharExponents:
    """Characteristic exponents (beta_0 = n, beta_1, ..., beta_g) of an irreducible germ."""

    betas: tuple[int, ...]

    def __post_init__(self):
        b = tuple(int(x) for x in self.betas)
        object.__setattr__(self, "betas", b)
        if len(b) < 2:
            raise InputError("need beta_0 and at least beta_1")
        if b[0] < 2:
            raise InputError("beta_0 must be at least 2")
        if any(y >= x for y, x in zip(b[1:], b[2:])):
            raise InputError("exponents must increase strictly")
        if b[1] <= b[0]:
            raise InputError("beta_1 must exceed beta_0")
        eps = self.eps
        if eps[-1] != 1:
            raise InputError("gcd of all exponents must be 1")
        if any(eps[k] >= eps[k - 1] for k in range(1, len(eps))):
            raise InputError("the successive gcds must decrease strictly")

    @property
    def n(self) -> int:
        return self.betas[0]

    @property
    def g(self) -> int:
        return len(self.betas) - 1

    @cached_property
    def eps(self) -> tuple[int, ...]:
        """eps_k = gcd(beta_0, ..., beta_k)."""
        out, cur = [], 0
        for b in self.betas:
            cur = gcd(cur, b)
            out.append(cur)
        return tuple(out)

    @cached_property
    def n_k(self) -> tuple[int, ...]:
        """n_k = eps_{k-1} / eps_k for k = 1..g."""
        e = self.eps
        return tuple(e[k - 1] // e[k] for k in range(1, len(e)))


@dataclass(frozen=True)
class Bouquet:
    """Distinct branches a_1..a_n; optional multiplicities mu_i and source polynomial."""

    branches: tuple[PuiseuxSeries, ...]
    mult: tuple[int, ...] | None = None
    poly: YPoly | None = field(default=None, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "branches", tuple(self.branches))
        if len(self.branches) < 2:
            raise InputError("a bouquet has at least two branches")
        if self.mult is not None:
            mult = tuple(int(m) for m in self.mult)
            if len(mult) != len(self.branches) or any(m < 1 for m in mult):
                raise InputError("multiplicities must be positive, one per branch")
            object.__setattr__(self, "mult", None if all(m == 1 for m in mult) else mult)

    @property
    def n(self) -> int:
        return len(self.branches)

    @property
    def mu(self) -> tuple[int, ...]:
        return self.mult or (1,) * self.n

    @property
    def is_reduced(self) -> bool:
        return self.mult is None

    def branch_valuations(self) -> tuple:
        return tuple(a.val_lb() if a.terms else a.trunc for a in self.branches)

    def passes_through_origin(self) -> bool:
        return all(a.val_lb() > 0 for a in self.branches)

    @property
    def ramification(self) -> int:
        return lcm(*[a.d for a in self.branches])

    @property
    def trunc(self):
        return min(a.trunc for a in self.branches)

    def difference(self, i: int, j: int) -> PuiseuxSeries:
        return self.branches[i] - self.branches[j]

    @cached_property
    def multiplicities(self) -> MultiplicityData:
        return multiplicities(self)

    @cached_property
    def eps_at_roots(self) -> tuple[PuiseuxSeries, ...]:
        """E_i = prod_{j != i} (a_i - a_j), the value of df/dy at a_i (reduced f)."""
        out = []
        for i in range(self.n):
            p = PuiseuxSeries.const(Q(1))
            for j in range(self.n):
                if j != i:
                    p = p * self.difference(i, j)
            out.append(p)
        return tuple(out)

    @cached_property
    def eps_polys(self) -> tuple[YPoly, ...]:
        """eps_i = prod_{j != i} (y - a_j)."""
        return tuple(product_of_linear([a for j, a in enumerate(self.branches) if j != i])
                     for i in range(self.n))

    @cached_property
    def reduced_poly(self) -> YPoly:
        """prod (y - a_i); the exact source polynomial when known and reduced."""
        if self.poly is not None and self.mult is None:
            return self.poly
        return product_of_linear(self.branches)

    @cached_property
    def full_poly(self) -> YPoly:
        """prod (y - a_i)^{mu_i}."""
        if self.poly is not None:
            return self.poly
        return product_of_linear(self.branches, self.mult)

    def truncated(self, t) -> "Bouquet":
        return Bouquet(tuple(a.truncate(t) for a in self.branches), self.mult, self.poly)


def multiplicities(b: Bouquet) -> MultiplicityData:
    """m_ij = nu(a_i - a_j); InsufficientPrecision when a difference is unresolved."""
    n = b.n
    mat = [[Q(0)] * n for _ in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            diff = b.difference(i, j)
            if not diff.terms:
                if diff.is_exact():
                    raise InputError(f"branches {i + 1} and {j + 1} coincide")
                raise InsufficientPrecision(
                    f"branches {i + 1} and {j + 1} agree below x^{diff.trunc}", )
            mat[i][j] = mat[j][i] = diff.exact_valuation()
    return MultiplicityData(tuple(tuple(r) for r in mat), b.ramification)


def bouquet_from_char_exponents(c: CharExponents, order=None) -> Bouquet:
    """Branches phi(xi^i x^(1/n)) for phi(t) = sum_{k>=1} t^beta_k, xi = zeta_n, i = 1..n."""
    n = c.n
    branches = []
    for i in range(1, n + 1):
        terms = {Q(bk, n): zeta(n, i * bk) for bk in c.betas[1:]}
        s = PuiseuxSeries(terms)
        branches.append(s.truncate(order) if order is not None else s)
    return Bouquet(tuple(branches))


def char_multiplicities(c: CharExponents) -> MultiplicityData:
    """Closed form: m_ij = beta_k / n for the first k with n_1...n_k not dividing |i - j|."""
    n = c.n
    mat = [[Q(0)] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            if i == j:
                continue
            diff, prod = abs(i - j), 1
            for k, nk in enumerate(c.n_k, start=1):
                prod *= nk
                if diff % prod:
                    mat[i][j] = Q(c.betas[k], n)
                    break
    return MultiplicityData(tuple(tuple(r) for r in mat), n)


def char_diagonal(c: CharExponents) -> Fraction:
    """m_i = sum_k (eps_{k-1} - eps_k) beta_k / n (the same for every i)."""
    e = c.eps
    return sum((Q((e[k - 1] - e[k]) * c.betas[k], c.n) for k in range(1, c.g + 1)),
               Q(0))


def milnor_number(m: MultiplicityData) -> Fraction:
    """sum_i m_i - n + 1."""
    return sum(m.row_sums, Q(0)) - m.n + 1


# ------------------------------------------------------- Lagrange coordinates


def lagrange_coords(b: Bouquet, w: YPoly, prec=None) -> list[PuiseuxSeries]:
    """Coordinates w_i = w(a_i) / E_i of a polynomial of y-degree < n."""
    if w.degree >= b.n:
        raise InputError(f"polynomial of y-degree {w.degree} is not below n = {b.n}")
    return [w(a).div(E, prec) for a, E in zip(b.branches, b.eps_at_roots)]


def lagrange_recompose(b: Bouquet, coords: Sequence[PuiseuxSeries]) -> YPoly:
    """sum_i w_i eps_i."""
    total = YPoly([])
    for c, e in zip(coords, b.eps_polys):
        total = total + e * c
    return total


def vector_valuation(coords: Sequence[PuiseuxSeries]):
    """val = min nu(w_i); an AtLeast-style bound is returned as the truncation."""
    return min(c.val_lb() for c in coords)


def val_weight(b: Bouquet, w: YPoly, prec=None):
    return vector_valuation(lagrange_coords(b, w, prec))


def val_weight_formula(b: Bouquet, w: YPoly):
    """inf_i nu(w(a_i)) - m_i, the same number computed without division."""
    m = b.multiplicities
    return min(w(a).exact_valuation() - mi for a, mi in zip(b.branches, m.row_sums))


def as_multiplicity_data(x) -> MultiplicityData:
    if isinstance(x, MultiplicityData):
        return x
    if isinstance(x, Bouquet):
        return x.multiplicities
    if isinstance(x, CharExponents):
        return char_multiplicities(x)
    raise TypeError(f"cannot read multiplicities from {type(x).__name__}")


__all__ = [
    "Bouquet", "CharExponents", "MultiplicityData", "as_multiplicity_data",
    "bouquet_from_char_exponents", "char_diagonal", "char_multiplicities",
    "lagrange_coords", "lagrange_recompose", "milnor_number", "multiplicities",
    "val_weight", "val_weight_formula", "vector_valuation",
]
