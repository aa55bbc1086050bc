"""Laminar family of clusters ("rameaux") with heights, built from contacts.

A cluster T (|T| >= 2) is a set with m_ij > m_ik = m_jk for all i != j in T
and k outside T; the full index set always counts as one.  The weight gamma(T)
is alpha(T) minus alpha of the smallest strictly larger cluster, where alpha(T)
is the smallest contact inside T, so that m_ij = sum over clusters containing
i and j of gamma.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Mapping

from .bouquet import MultiplicityData
from .errors import InputError, NotInteger
from .scalars import Q

Cluster = frozenset


def cluster_key(T: frozenset) -> tuple:
    return (min(T), -len(T), tuple(sorted(T)))


@dataclass(frozen=True)
class Tree:
    """Clusters with positive weights (the root may have weight 0)."""

    n: int
    gamma: Mapping[frozenset, Fraction]

    def __post_init__(self):
        g = {frozenset(T): Q(v) for T, v in dict(self.gamma).items()}
        object.__setattr__(self, "gamma", dict(sorted(g.items(), key=lambda kv: cluster_key(kv[0]))))
        root = frozenset(range(self.n))
        if root not in self.gamma:
            raise InputError("the full index set must be a cluster")
        for T, v in self.gamma.items():
            if len(T) < 2 or not T <= root:
                raise InputError(f"bad cluster {sorted(T)}")
            if v < 0 or (v == 0 and T != root):
                raise InputError(f"cluster {sorted(T)} needs a positive weight")
        items = list(self.gamma)
        for a in items:
            for b in items:
                if a & b and not (a <= b or b <= a):
                    raise InputError("clusters must be nested or disjoint")

    @property
    def root(self) -> frozenset:
        return frozenset(range(self.n))

    @property
    def rameaux(self) -> tuple[frozenset, ...]:
        return tuple(self.gamma)

    def parent(self, T: frozenset) -> frozenset | None:
        best = None
        for S in self.gamma:
            if T < S and (best is None or len(S) < len(best)):
                best = S
        return best

    @cached_property
    def children(self) -> dict[frozenset, tuple[frozenset, ...]]:
        ch: dict = {T: [] for T in self.gamma}
        for T in self.gamma:
            p = self.parent(T)
            if p is not None:
                ch[p].append(T)
        return {T: tuple(sorted(v, key=cluster_key)) for T, v in ch.items()}

    def alpha(self, T: frozenset) -> Fraction:
        """Sum of gamma over clusters containing T: the smallest contact inside T."""
        return sum((v for S, v in self.gamma.items() if T <= S), Q(0))

    def remainder(self, T: frozenset) -> frozenset:
        """Elements of T not covered by any child."""
        covered = frozenset().union(*self.children[T]) if self.children[T] else frozenset()
        return T - covered

    def passes_through_origin(self) -> bool:
        return self.gamma[self.root] > 0

    def __eq__(self, other):
        return isinstance(other, Tree) and self.n == other.n and self.gamma == other.gamma

    def __hash__(self):
        return hash((self.n, tuple(self.gamma.items())))


def build_tree(m: MultiplicityData) -> Tree:
    """Threshold sweep: the classes of {m_ij >= t} for every distinct value t."""
    m.check_ultrametric()
    n = m.n
    values = sorted({m.m(i, j) for i, j in m.pairs()})
    clusters: dict[frozenset, Fraction] = {frozenset(range(n)): values[0]}
    for t in values:
        seen = set()
        for i in range(n):
            if i in seen:
                continue
            cls = frozenset([i] + [j for j in range(n) if j != i and m.m(i, j) >= t])
            seen |= cls
            if len(cls) >= 2 and cls not in clusters:
                clusters[cls] = min(m.m(a, b) for a in cls for b in cls if a < b)
    # heights alpha -> weights gamma
    gamma = {}
    for T, a in clusters.items():
        parents = [S for S in clusters if T < S]
        if parents:
            P = min(parents, key=len)
            gamma[T] = a - clusters[P]
        else:
            gamma[T] = a
    return Tree(n, gamma)


def reconstruct_multiplicities(t: Tree) -> MultiplicityData:
    n = t.n
    mat = [[Q(0)] * n for _ in range(n)]
    for T, g in t.gamma.items():
        for i in T:
            for j in T:
                if i != j:
                    mat[i][j] += g
    return MultiplicityData(tuple(tuple(r) for r in mat))


@dataclass(frozen=True)
class Bifurcation:
    """A cluster of positive inner contacts in the smooth-branch picture."""

    members: frozenset
    alpha: Fraction       # inner contact: smallest m_ij inside
    alpha_out: Fraction   # largest contact with the outside (0 for the full set)
    parent: frozenset | None

    @property
    def gamma(self) -> Fraction:
        return self.alpha - self.alpha_out

    @property
    def height(self) -> Fraction:
        return self.alpha - 1


def smooth_bifurcations(m: MultiplicityData) -> list[Bifurcation]:
    """Clusters with all inner contacts positive, for integer contacts (smooth branches)."""
    if any(m.m(i, j).denominator != 1 for i, j in m.pairs()):
        raise NotInteger("integer contacts are required")
    t = build_tree(m)
    out = []
    for T in t.rameaux:
        a = t.alpha(T)
        if a <= 0:
            continue
        if T == t.root:
            a_out, par = Q(0), None
        else:
            a_out = max(m.m(i, k) for i in T for k in range(m.n) if k not in T)
            par = None
            if a_out > 0:
                par = frozenset(T | {k for i in T for k in range(m.n) if k != i and m.m(i, k) >= a_out})
        out.append(Bifurcation(T, a, a_out, par))
    return out


def laminar_family_from_sets(n: int, sets: Iterable[Iterable[int]], weights: Iterable) -> Tree:
    return Tree(n, {frozenset(s): Q(w) for s, w in zip(sets, weights)})


__all__ = [
    "Bifurcation", "Tree", "build_tree", "cluster_key", "laminar_family_from_sets",
    "reconstruct_multiplicities", "smooth_bifurcations",
]
