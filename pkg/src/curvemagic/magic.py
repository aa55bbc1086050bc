"""Magic matrices of a bouquet, their cluster decomposition and exact spectrum.

The matrix A has off-diagonal entries -m_ij and row sums zero.  With branch
multiplicities mu the weighted matrix A_mu has off-diagonal -mu_i m_ij and
diagonal sum_{k != i} mu_k m_ki, so its column sums vanish.  Both are sums of
gamma(T) times block matrices attached to clusters, which commute and act by
a scalar on explicit subspaces; the spectrum is read off the tree.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .bouquet import MultiplicityData
from .errors import NotThroughOrigin, NotZeroSum
from .scalars import Q
from .tree import Tree, build_tree, cluster_key

Matrix = tuple[tuple[Fraction, ...], ...]


# ----------------------------------------------------------- small helpers


def mat(rows) -> Matrix:
    return tuple(tuple(Q(x) for x in r) for r in rows)


def zeros(n: int) -> Matrix:
    return tuple((Q(0),) * n for _ in range(n))


def identity(n: int) -> Matrix:
    return tuple(tuple(Q(int(i == j)) for j in range(n)) for i in range(n))


def madd(a: Matrix, b: Matrix) -> Matrix:
    return tuple(tuple(x + y for x, y in zip(r, s)) for r, s in zip(a, b))


def mscale(c, a: Matrix) -> Matrix:
    return tuple(tuple(c * x for x in r) for r in a)


def matmul(a: Matrix, b: Matrix) -> Matrix:
    cols = list(zip(*b))
    return tuple(tuple(sum((x * y for x, y in zip(r, c)), Q(0)) for c in cols) for r in a)


def matvec(a: Matrix, v: Sequence) -> list:
    out = []
    for r in a:
        acc = Q(0)
        for x, y in zip(r, v):
            if x and y != 0:
                acc = acc + x * y
        out.append(acc)
    return out


def row_sums(a: Matrix) -> list[Fraction]:
    return [sum(r, Q(0)) for r in a]


def col_sums(a: Matrix) -> list[Fraction]:
    return [sum(c, Q(0)) for c in zip(*a)]


def is_symmetric(a: Matrix) -> bool:
    return all(a[i][j] == a[j][i] for i in range(len(a)) for j in range(i))


def is_magic0(a: Matrix) -> bool:
    """Symmetric with every row (hence column) summing to 0."""
    return is_symmetric(a) and all(s == 0 for s in row_sums(a))


def is_exceptional(a: Matrix) -> bool:
    """Every column sums to 0."""
    return all(s == 0 for s in col_sums(a))


def is_zero_sum(v: Sequence) -> bool:
    return sum(v, Q(0)) == 0


# ------------------------------------------------------------ constructors


@dataclass(frozen=True)
class MagicMatrix:
    """An n x n rational matrix tagged with its kind ('magic0' or 'exceptional')."""

    rows: Matrix
    kind: str = "magic0"

    @property
    def n(self) -> int:
        return len(self.rows)

    def __matmul__(self, other):
        if isinstance(other, MagicMatrix):
            return matmul(self.rows, other.rows)
        return matvec(self.rows, other)


def magic_from_multiplicities(m: MultiplicityData, mu: Sequence[int] | None = None) -> MagicMatrix:
    n = m.n
    if mu is None or all(x == 1 for x in mu):
        rows = [[-m.m(i, j) if i != j else m.row_sums[i] for j in range(n)] for i in range(n)]
        return MagicMatrix(mat(rows), "magic0")
    rows = [[-mu[i] * m.m(i, j) if i != j else
             sum((mu[k] * m.m(k, i) for k in range(n) if k != i), Q(0))
             for j in range(n)] for i in range(n)]
    return MagicMatrix(mat(rows), "exceptional")


def sigma(T, mu: Sequence[int] | None = None) -> Fraction:
    """n(T), or sum_{i in T} mu_i."""
    return Q(len(T)) if mu is None else Q(sum(mu[i] for i in T))


def block_matrix(T, n: int, mu: Sequence[int] | None = None) -> Matrix:
    """A(T) (or A_mu(T)): supported on T x T, off-diagonal -mu_i, diagonal sum of the others."""
    w = [1] * n if mu is None else list(mu)
    rows = [[Q(0)] * n for _ in range(n)]
    for i in T:
        for j in T:
            rows[i][j] = Q(-w[i]) if i != j else Q(sum(w[k] for k in T if k != i))
    return mat(rows)


def tree_decomposition(t: Tree, mu: Sequence[int] | None = None) -> Matrix:
    total = zeros(t.n)
    for T, g in t.gamma.items():
        total = madd(total, mscale(g, block_matrix(T, t.n, mu)))
    return total


def tree_decomposition_check(A: MagicMatrix | Matrix, t: Tree, mu: Sequence[int] | None = None) -> bool:
    rows = A.rows if isinstance(A, MagicMatrix) else A
    return tree_decomposition(t, mu) == rows


def product_rules_check(T1, T2, n: int, mu: Sequence[int] | None = None) -> bool:
    """Disjoint clusters multiply to 0; for T1 inside T2 the blocks commute with
    product sigma(T2) A(T1)."""
    T1, T2 = frozenset(T1), frozenset(T2)
    A1, A2 = block_matrix(T1, n, mu), block_matrix(T2, n, mu)
    p12, p21 = matmul(A1, A2), matmul(A2, A1)
    if not T1 & T2:
        return p12 == zeros(n) and p21 == zeros(n)
    if T2 < T1:
        T1, T2, A1 = T2, T1, A2
    elif not T1 <= T2:
        raise ValueError("clusters must be nested or disjoint")
    return p12 == p21 == mscale(sigma(T2, mu), A1)


# ------------------------------------------------------------------ spectrum


@dataclass(frozen=True)
class Eigenspace:
    value: Fraction
    cluster: frozenset | None   # None for the kernel line spanned by omega
    basis: tuple[tuple[Fraction, ...], ...]

    @property
    def multiplicity(self) -> int:
        return len(self.basis)


@dataclass(frozen=True)
class Spectrum:
    """Eigenspaces in cluster order; the first is the kernel line of omega (or omega_mu)."""

    n: int
    spaces: tuple[Eigenspace, ...]

    def eigenvalues(self) -> dict[Fraction, int]:
        """Distinct eigenvalue -> total multiplicity."""
        out: dict[Fraction, int] = {}
        for s in self.spaces:
            out[s.value] = out.get(s.value, 0) + s.multiplicity
        return dict(sorted(out.items()))

    def nonzero_values(self) -> list[Fraction]:
        return sorted({s.value for s in self.spaces if s.value != 0})

    def pairs(self):
        for s in self.spaces:
            for v in s.basis:
                yield s.value, v


def _weighted_indicator(B, n: int, mu: Sequence[int] | None) -> list[Fraction]:
    v = [Q(0)] * n
    for i in B:
        v[i] = Q(1 if mu is None else mu[i])
    return v


def cluster_eigenspace_basis(t: Tree, T: frozenset, mu: Sequence[int] | None = None) -> list[list[Fraction]]:
    """Zero-sum vectors on T that are proportional to omega_mu on every child of T.

    Blocks are the children and the leftover singletons; with block vectors
    b_1..b_k the basis is sigma(B_j) b_1 - sigma(B_1) b_j for j >= 2.
    """
    blocks = list(t.children[T]) + [frozenset([r]) for r in sorted(t.remainder(T))]
    blocks.sort(key=cluster_key)
    b1 = blocks[0]
    v1 = _weighted_indicator(b1, t.n, mu)
    s1 = sigma(b1, mu)
    out = []
    for B in blocks[1:]:
        vb = _weighted_indicator(B, t.n, mu)
        sb = sigma(B, mu)
        out.append([sb * x - s1 * y for x, y in zip(v1, vb)])
    return out


def cluster_eigenvalue(t: Tree, T: frozenset, mu: Sequence[int] | None = None) -> Fraction:
    """sum over clusters S containing T of gamma(S) sigma(S)."""
    return sum((g * sigma(S, mu) for S, g in t.gamma.items() if T <= S), Q(0))


def cluster_multiplicity(t: Tree, T: frozenset) -> int:
    """(n(T) - 1) - sum over children S of (n(S) - 1)."""
    return (len(T) - 1) - sum(len(S) - 1 for S in t.children[T])


def spectrum_from_tree(t: Tree, mu: Sequence[int] | None = None) -> Spectrum:
    n = t.n
    spaces = [Eigenspace(Q(0), None, (tuple(_weighted_indicator(range(n), n, mu)),))]
    for T in t.rameaux:
        basis = cluster_eigenspace_basis(t, T, mu)
        if basis:
            spaces.append(Eigenspace(cluster_eigenvalue(t, T, mu), T, tuple(tuple(v) for v in basis)))
    return Spectrum(n, tuple(spaces))


def spectrum(m: MultiplicityData, mu: Sequence[int] | None = None) -> Spectrum:
    return spectrum_from_tree(build_tree(m), mu)


# --------------------------------------------------- inverse on zero-sum


class FInverse:
    """The inverse of A restricted to zero-sum vectors, as a polynomial in A.

    With M(z) = prod_{lambda in Lambda} (z - lambda) over the distinct nonzero
    eigenvalues, q(z) = (M(0) - M(z)) / (z M(0)) satisfies q(lambda) = 1/lambda,
    and A is diagonalisable with F a sum of its nonzero eigenspaces.
    """

    def __init__(self, A: Matrix, eigenvalues: Sequence[Fraction]):
        self.A = A
        self.eigenvalues = sorted(set(eigenvalues))
        M = [Q(1)]
        for lam in self.eigenvalues:
            # multiply by (z - lam)
            M = [(M[k - 1] if k > 0 else 0) - lam * (M[k] if k < len(M) else 0)
                 for k in range(len(M) + 1)]
        m0 = M[0]
        # q(z) = -(M(z) - M(0)) / (z M(0))
        self.q = [-c / m0 for c in M[1:]]

    def __call__(self, v: Sequence) -> list:
        if not is_zero_sum(v):
            raise NotZeroSum("vector is not zero-sum")
        acc = [x * self.q[-1] for x in v]
        for c in reversed(self.q[:-1]):
            acc = matvec(self.A, acc)
            acc = [a + c * x for a, x in zip(acc, v)]
        return acc


def restrict_to_F(m: MultiplicityData | Tree, mu: Sequence[int] | None = None) -> FInverse:
    """(A|F)^{-1} (or (A_mu|F)^{-1}); NotThroughOrigin when A is singular on F."""
    if isinstance(m, Tree):
        from .tree import reconstruct_multiplicities

        t, m = m, reconstruct_multiplicities(m)
    else:
        t = build_tree(m)
    if not t.passes_through_origin():
        raise NotThroughOrigin("the smallest contact is 0: A is singular on zero-sum vectors")
    A = magic_from_multiplicities(m, mu).rows
    return FInverse(A, spectrum_from_tree(t, mu).nonzero_values())


def matrix_from_magic(A: Matrix, mu: Sequence[int] | None = None) -> MultiplicityData:
    """Recover the contacts from the off-diagonal entries."""
    n = len(A)
    w = [1] * n if mu is None else list(mu)
    return MultiplicityData(tuple(tuple(Q(0) if i == j else -A[i][j] / w[i]
                                        for j in range(n)) for i in range(n)))


__all__ = [
    "Eigenspace", "FInverse", "MagicMatrix", "Spectrum", "block_matrix", "cluster_eigenspace_basis",
    "cluster_eigenvalue", "cluster_multiplicity", "col_sums", "identity", "is_exceptional",
    "is_magic0", "is_symmetric", "is_zero_sum", "madd", "magic_from_multiplicities", "mat",
    "matmul", "matrix_from_magic", "matvec", "mscale", "product_rules_check", "restrict_to_F",
    "row_sums", "sigma", "spectrum", "spectrum_from_tree", "tree_decomposition",
    "tree_decomposition_check", "zeros",
]
