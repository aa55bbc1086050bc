"""Division by the partial derivatives in Lagrange coordinates.

For a bouquet a_1..a_n through the origin every polynomial of y-degree < n is
sum w_i eps_i with eps_i = prod_{j != i}(y - a_j).  In these coordinates

* ``u f'_x + v f'_y = w f`` becomes ``Acal U = W`` with v_i = u_i a'_i;
* ``u f'_x + v f'_y = w``   becomes ``Acal U = Bcal W`` with
  v_i = u_i a'_i + w_i / E_i,

where Acal has off-diagonal -(a'_i - a'_j)/(a_i - a_j) and valuation -1 with
leading part A/x.  Both systems are solved by a graded correction: at each
step the lowest nonzero slice R0 x^rho of the residual is cancelled by
U += x^(rho+1) (A|F)^{-1} R0, which strictly raises the residual valuation.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import lcm
from typing import Callable, Sequence

from .bouquet import Bouquet, MultiplicityData, lagrange_coords, lagrange_recompose
from .errors import InputError, InsufficientPrecision, NotThroughOrigin, NotZeroSum
from .magic import FInverse, magic_from_multiplicities, matvec, restrict_to_F, spectrum
from .puiseux import INF, PuiseuxSeries, YPoly
from .scalars import Q, canon
from .tree import Tree, reconstruct_multiplicities

Vector = list  # of PuiseuxSeries


# -------------------------------------------------------------- vectors


def vec_valuation(v: Sequence[PuiseuxSeries]):
    """min_i nu(v_i); coordinates without known terms contribute their truncation."""
    return min(c.val_lb() for c in v)


def vec_in_form(v: Sequence[PuiseuxSeries], r) -> list:
    """Coefficients of x^r in every coordinate."""
    return [c.coeff(r) for c in v]


def vec_sum(v: Sequence[PuiseuxSeries]) -> PuiseuxSeries:
    total = PuiseuxSeries.zero()
    for c in v:
        total = total + c
    return total


def is_zero_sum_vector(v: Sequence[PuiseuxSeries]) -> bool:
    """No known term in sum_i v_i."""
    return vec_sum(v).is_zero()


def reduce_mod_fy(w: Sequence[PuiseuxSeries]) -> tuple[Vector, PuiseuxSeries]:
    """Project to zero-sum by subtracting lambda (1,...,1) = lambda f'_y; returns (w', lambda)."""
    n = len(w)
    lam = vec_sum(w).scale(Q(1, n))
    return [c - lam for c in w], lam


def reduce_poly_mod_fy(b: Bouquet, w: YPoly) -> tuple[YPoly, YPoly]:
    """w = q f'_y + rem with deg rem < n - 1, for the reduced polynomial f."""
    fy = b.reduced_poly.diff_y()
    return w.divmod(fy)


# ------------------------------------------------------- complete matrices


def _check_origin(b: Bouquet) -> None:
    if not b.passes_through_origin():
        raise NotThroughOrigin("every branch must have positive valuation")


def _quotients(b: Bouquet, prec) -> list[list[PuiseuxSeries | None]]:
    """q_ij = (a'_i - a'_j) / (a_i - a_j), known below ``prec``."""
    n = b.n
    der = [a.derivative() for a in b.branches]
    q: list[list] = [[None] * n for _ in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            q[i][j] = q[j][i] = (der[i] - der[j]).div(b.difference(i, j), prec)
    return q


def complete_matrix(b: Bouquet, prec, mu: Sequence[int] | None = None) -> list[list[PuiseuxSeries]]:
    """Acal (or Acal_mu when mu is given): off-diagonal -mu_i q_ij, columns summing to 0."""
    n = b.n
    w = [1] * n if mu is None else list(mu)
    q = _quotients(b, prec)
    rows = [[PuiseuxSeries.zero()] * n for _ in range(n)]
    for i in range(n):
        diag = PuiseuxSeries.zero()
        for j in range(n):
            if j != i:
                rows[i][j] = q[i][j].scale(Q(-w[i]))
                diag = diag + q[i][j].scale(Q(w[j]))
        rows[i][i] = diag
    return rows


def leading_part(Acal: Sequence[Sequence[PuiseuxSeries]]) -> list[list]:
    """Coefficient of x^{-1} in every entry."""
    return [[e.coeff(-1) for e in row] for row in Acal]


def b_matrix(b: Bouquet, prec) -> list[list[PuiseuxSeries]]:
    """Bcal: off-diagonal -(E_i - E_j)/((a_i - a_j) E_i E_j), rows summing to 0."""
    n = b.n
    m = b.multiplicities
    # (E_i - E_j)/(E_i E_j) = 1/E_j - 1/E_i
    extra = m.max_contact()
    inv = [E.inverse(Q(prec) + extra) for E in b.eps_at_roots]
    rows = [[PuiseuxSeries.zero()] * n for _ in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            p = (inv[j] - inv[i]).div(b.difference(i, j), prec)
            rows[i][j] = rows[j][i] = -p
    for i in range(n):
        diag = PuiseuxSeries.zero()
        for j in range(n):
            if j != i:
                diag = diag - rows[i][j]
        rows[i][i] = diag
    return rows


def apply(M: Sequence[Sequence[PuiseuxSeries]], v: Sequence[PuiseuxSeries], prec=None) -> Vector:
    """M v, dropping terms at exponents >= prec when given."""
    out = []
    for row in M:
        acc = PuiseuxSeries.zero()
        for a, x in zip(row, v):
            if not x.is_exact_zero():
                acc = acc + a.mul(x, prec)
        out.append(acc)
    return out


# --------------------------------------------------------- graded solver


@dataclass
class GradedSolve:
    U: Vector
    residual: Vector
    steps: int


def graded_solve(Acal, rhs: Sequence[PuiseuxSeries], finv: Callable, order) -> GradedSolve:
    """U zero-sum with val(rhs - Acal U) >= order.

    Walks the exponent lattice upward; at each exponent rho the slice of the
    residual is computed from the terms of U found so far, and a nonzero slice
    R0 adds x^(rho+1) finv(R0) to U.  Raises InsufficientPrecision when a
    needed slice is not known.
    """
    order = Q(order)
    n = len(rhs)
    D = lcm(*[c.d for c in rhs], *[a.d for row in Acal for a in row])
    step = Q(1, D)
    found: list[tuple[Fraction, list]] = []
    first = [None] * n

    def known_below(i):
        t = rhs[i].trunc
        for j in range(n):
            if first[j] is not None:
                t = min(t, Acal[i][j].trunc + first[j])
        return t

    def slice_at(rho):
        out = []
        for i in range(n):
            c = rhs[i].terms.get(rho, 0)
            row = Acal[i]
            for e, V in found:
                for j, vj in enumerate(V):
                    if vj:
                        a = row[j].terms.get(rho - e)
                        if a is not None:
                            c = c - a * vj
            out.append(c)
        return out

    known = [c.val_lb() for c in rhs if c.terms]
    rho = min(known) if known else order
    while rho < order:
        if any(rho >= known_below(i) for i in range(n)):
            raise InsufficientPrecision(f"residual slice at x^{rho} is not fully known")
        R0 = slice_at(rho)
        if any(c != 0 for c in R0):
            V = finv(R0)
            found.append((rho + 1, V))
            for j, vj in enumerate(V):
                if vj and first[j] is None:
                    first[j] = rho + 1
        rho += step
    low = min(known_below(i) for i in range(n))
    if low < order:
        raise InsufficientPrecision(f"residual only known below x^{low}, need x^{order}")
    U = [PuiseuxSeries({e: V[j] for e, V in found}) for j in range(n)]
    if low == INF:
        corr = apply(Acal, U)
        R = [r - c for r, c in zip(rhs, corr)]
    else:
        R = [PuiseuxSeries.zero(order) for _ in range(n)]
    return GradedSolve(U, R, len(found))


# ------------------------------------------------------------- results


@dataclass
class DivisionResult:
    """Lagrange coordinates of (u, v) and of the residual cofactor.

    For ``solve_wf`` the identity u F'_x + v F'_y - w F = -F * sum R_i eps_i
    holds, F = prod (y - a_i)^{mu_i}; for ``solve_w`` the right side is
    -f * sum R_i eps_i with the reduced f.
    """

    bouquet: Bouquet
    u: Vector
    v: Vector
    residual: Vector
    order: Fraction
    steps: int = 0
    extra_v: YPoly | None = field(default=None, repr=False)

    @property
    def residual_valuation(self):
        return vec_valuation(self.residual)

    @property
    def exact(self) -> bool:
        return all(r.is_exact_zero() for r in self.residual)

    def u_poly(self) -> YPoly:
        return lagrange_recompose(self.bouquet, self.u)

    def v_poly(self) -> YPoly:
        v = lagrange_recompose(self.bouquet, self.v)
        return v + self.extra_v if self.extra_v is not None else v


def _coords(b: Bouquet, w, prec) -> Vector:
    if isinstance(w, YPoly):
        return lagrange_coords(b, w, prec)
    if len(w) != b.n:
        raise InputError("coordinate vector has the wrong length")
    return [c if isinstance(c, PuiseuxSeries) else PuiseuxSeries.const(c) for c in w]


def _coords_with_order(b: Bouquet, w, order, extra) -> tuple[Vector, Fraction]:
    """Coordinates known below order + extra; a default order is val(w) + 1."""
    if order is not None:
        order = Q(order)
        return _coords(b, w, order + extra), order
    if not isinstance(w, YPoly):
        W = _coords(b, w, None)
        return W, vec_valuation(W) + 1
    lv = w.lower_valuation()
    if lv == INF:
        return _coords(b, w, None), Q(0)
    guess = Q(lv) - max(b.multiplicities.row_sums) + 1 + extra
    for step in range(8):
        W = _coords(b, w, guess)
        known = [c.val_lb() for c in W if c.terms]
        if known:
            break
        if all(c.is_exact_zero() for c in W):
            return W, Q(0)
        # cancellation in w(a_i): widen the window
        guess += 2 ** step
    else:
        raise InsufficientPrecision("valuation of w not resolved")
    order = min(known) + 1
    if min(c.trunc for c in W) < order + extra:
        W = _coords(b, w, order + extra)
    return W, order


def _finv(b: Bouquet, mu) -> FInverse:
    return restrict_to_F(b.multiplicities, mu)


def solve_wf(b: Bouquet, w, order=None) -> DivisionResult:
    """Solve u F'_x + v F'_y = w F for zero-sum w, with (u, v) zero-sum.

    ``w`` is a coordinate vector or a polynomial of y-degree <= n - 2.  The
    residual cofactor is pushed to valuation >= ``order`` (default val(w) + 1).
    """
    _check_origin(b)
    mu = b.mult
    if isinstance(w, YPoly) and w.degree >= b.n - 1:
        raise NotZeroSum("w has y-degree >= n - 1: reduce it modulo f'_y first")
    W, order = _coords_with_order(b, w, order, 1)
    if not is_zero_sum_vector(W):
        raise NotZeroSum("w is not zero-sum")
    if all(c.is_exact_zero() for c in W):
        zero = [PuiseuxSeries.zero() for _ in range(b.n)]
        return DivisionResult(b, zero, list(zero), list(zero), order)
    r = vec_valuation(W)
    Acal = complete_matrix(b, order - r + 1, mu)
    sol = graded_solve(Acal, W, _finv(b, mu), order)
    der = [a.derivative() for a in b.branches]
    v = [u * d for u, d in zip(sol.U, der)]
    return DivisionResult(b, sol.U, v, sol.residual, order, sol.steps)


def f_squared_certificate(b: Bouquet, order=None) -> DivisionResult:
    """(u, v) with u f'_x + v f'_y = f^2 (up to the residual), for a reduced bouquet.

    Uses w = f - (y/n - sigma/n^2) f'_y, whose coordinates are sigma/n^2 - a_i/n,
    and then v_total = v + (y/n - sigma/n^2) f.
    """
    if not b.is_reduced:
        raise InputError("the certificate is stated for reduced bouquets")
    n = b.n
    sig = PuiseuxSeries.zero()
    for a in b.branches:
        sig = sig + a
    W = [sig.scale(Q(1, n * n)) - a.scale(Q(1, n)) for a in b.branches]
    res = solve_wf(b, W, order)
    shift = YPoly([-sig.scale(Q(1, n * n)), PuiseuxSeries.const(Q(1, n))])
    res.extra_v = shift * b.reduced_poly
    return res


def solve_w(b: Bouquet, w, order=None) -> DivisionResult:
    """Solve u f'_x + v f'_y = w for any w of y-degree < n, with (u, v) zero-sum.

    The residual cofactor reaches valuation >= ``order`` (default val(w) + 1).
    """
    _check_origin(b)
    if not b.is_reduced:
        raise InputError("solve_w is stated for reduced bouquets")
    m = b.multiplicities
    pi = weight_constants(m, b).pi
    # w_i / E_i is carried pi beyond the order: multiplying back by f'_y can
    # lower the valuation of the polynomial identity by up to pi
    W, order = _coords_with_order(b, w, order, 2 * pi + 1)
    if all(c.is_exact_zero() for c in W):
        zero = [PuiseuxSeries.zero() for _ in range(b.n)]
        return DivisionResult(b, zero, list(zero), list(zero), order)
    r = vec_valuation(W)
    Bcal = b_matrix(b, order - r + 1)
    exact = all(c.is_exact() for c in W) and all(e.is_exact() for row in Bcal for e in row)
    rhs = apply(Bcal, W, None if exact else order)
    r2 = vec_valuation(rhs)
    Acal = complete_matrix(b, order - min(r2, r) + 1)
    sol = graded_solve(Acal, rhs, _finv(b, None), order)
    der = [a.derivative() for a in b.branches]
    v = [u * d + wi.div(E, order + pi) for u, d, wi, E in zip(sol.U, der, W, b.eps_at_roots)]
    if any(c.val_lb() < order and c.trunc < order for c in v):
        raise InsufficientPrecision("v coordinates not known to the requested order")
    return DivisionResult(b, sol.U, v, sol.residual, order, sol.steps)


# ---------------------------------------------------------------- nabla


def nabla(b: Bouquet, w, order=None) -> tuple[Vector, DivisionResult]:
    """nabla w = -(u'_x + v'_y) where (u, v) solves u F'_x + v F'_y = w F.

    In coordinates: -u'_i - (Acal_red U)_i, which is -u'_i - w_i when the
    bouquet is reduced.  Coordinates are known below ``order``.
    """
    res = solve_wf(b, w, order)
    order = res.order
    W = _coords(b, w, order + 1)
    du = [u.derivative() for u in res.u]
    if b.is_reduced:
        wbar = W
    else:
        r = vec_valuation(res.u)
        Ared = complete_matrix(b, order - r + 2)
        wbar = apply(Ared, res.u)
    out = [-(a + c) for a, c in zip(du, wbar)]
    if not res.exact:
        out = [c.truncate(order) for c in out]
    return out, res


@dataclass(frozen=True)
class GradedNabla:
    """The slice of nabla sending in_r(w) to in_r(nabla w), on zero-sum vectors."""

    r: Fraction
    A: tuple
    finv: FInverse
    mu: tuple | None
    eigenvalues: tuple[Fraction, ...] | None

    def __call__(self, W: Sequence) -> list:
        X = self.finv(W)
        if self.mu is None:
            return [-w - (1 + self.r) * x for w, x in zip(W, X)]
        AX = matvec(self.A, X)
        return [-(a + (1 + self.r) * x) for a, x in zip(AX, X)]


def gr_nabla(m: MultiplicityData | Tree, r, mu: Sequence[int] | None = None) -> GradedNabla:
    """-I - (1+r)(A|F)^{-1}, or -(A + (1+r)I)(A_mu|F)^{-1} with multiplicities."""
    if isinstance(m, Tree):
        m = reconstruct_multiplicities(m)
    r = Q(r)
    if mu is not None and all(x == 1 for x in mu):
        mu = None
    finv = restrict_to_F(m, mu)
    A = magic_from_multiplicities(m).rows
    eig = None
    if mu is None:
        eig = tuple(sorted(-1 - (1 + r) / lam for lam in spectrum(m).nonzero_values()))
    return GradedNabla(r, A, finv, tuple(mu) if mu else None, eig)


# ------------------------------------------------------- weight constants


@dataclass(frozen=True)
class WeightConstants:
    pi: Fraction       # sup over i != j of m_i + m_ij
    delta: Fraction    # inf nu(a_i)
    theta: Fraction    # pi - 1
    tau: Fraction      # pi - delta


def weight_constants(m: MultiplicityData, b: Bouquet | None = None) -> WeightConstants:
    """delta comes from the branches when given, else it is the smallest contact."""
    rs = m.row_sums
    n = m.n
    pi = max(rs[i] + m.m(i, j) for i in range(n) for j in range(n) if i != j)
    if b is not None:
        delta = min(a.exact_valuation() for a in b.branches)
    else:
        delta = m.min_contact()
    return WeightConstants(pi, delta, pi - 1, pi - delta)


# ---------------------------------------------------- degree below 2n


@dataclass
class LowDegreeSplit:
    w0: YPoly
    w1: YPoly
    val_w0_formula: Fraction
    val_w1: object
    val_w1_bound: Fraction


def _val(s: PuiseuxSeries):
    return INF if s.is_exact_zero() else s.exact_valuation()


def decompose_deg_lt_2n(b: Bouquet, g: YPoly, prec=None) -> LowDegreeSplit:
    """g = w_0 + w_1 f with deg w_i < n; valuations of both parts."""
    f = b.reduced_poly
    w1, w0 = g.divmod(f)
    m = b.multiplicities
    mi = m.row_sums
    n = b.n
    ga = [_val(g(a)) for a in b.branches]
    val_w0 = min(x - mi[i] for i, x in enumerate(ga))
    gy = g.diff_y()
    terms = [_val(gy(a)) - 2 * mi[i] for i, a in enumerate(b.branches)]
    for i in range(n):
        for k in range(n):
            if k == i:
                continue
            for j in range(n):
                terms.append(ga[j] - mi[i] - mi[j] - m.m(i, k))
    bound = min(terms)
    val_w1 = None
    if w1.degree < n:
        coords = lagrange_coords(b, w1, prec)
        val_w1 = vec_valuation(coords)
    return LowDegreeSplit(w0, w1, val_w0, val_w1, bound)


__all__ = [
    "DivisionResult", "GradedNabla", "GradedSolve", "LowDegreeSplit", "WeightConstants", "apply",
    "b_matrix", "complete_matrix", "decompose_deg_lt_2n", "f_squared_certificate", "gr_nabla",
    "graded_solve", "is_zero_sum_vector", "leading_part", "nabla", "reduce_mod_fy",
    "reduce_poly_mod_fy", "solve_w", "solve_wf", "vec_in_form", "vec_sum", "vec_valuation",
    "weight_constants",
]
