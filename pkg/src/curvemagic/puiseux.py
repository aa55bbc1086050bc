"""Truncated Puiseux series, polynomials in y over them, Newton-Puiseux.

A :class:`PuiseuxSeries` is a finite set of known terms ``c x^e`` together
with a truncation ``trunc``: every exponent >= trunc is unknown.  Exact data
(polynomials, monomials) carry ``trunc = inf``.  Arithmetic propagates the
truncation so that every reported term is guaranteed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from math import lcm
from typing import Iterable, Mapping, Sequence

from .errors import InsufficientPrecision, NotDistinguished, NotReduced
from .scalars import MPQ, Q, Cyclo, canon, roots_in_cyclotomic, scalar_key

INF = math.inf


@dataclass(frozen=True)
class AtLeast:
    """Valuation known only from below: no terms below ``bound`` are known."""

    bound: object

    def __str__(self):
        return f">= {self.bound}"


def _is_zero(c) -> bool:
    return c == 0


class PuiseuxSeries:
    """Series in x^(1/d) with scalar coefficients, known below ``trunc``."""

    __slots__ = ("terms", "trunc", "_d")

    def __init__(self, terms: Mapping | Iterable = (), trunc=INF, d: int | None = None):
        if isinstance(terms, Mapping):
            items = terms.items()
        else:
            items = terms
        if trunc != INF:
            trunc = Q(trunc)
        clean = {}
        for e, c in items:
            e = Q(e)
            if e >= trunc or _is_zero(c):
                continue
            clean[e] = canon(c)
        self.terms = dict(sorted(clean.items()))
        self.trunc = trunc
        dd = d or 1
        for e in self.terms:
            dd = lcm(dd, e.denominator)
        self._d = dd

    # -- constructors ----------------------------------------------
    @classmethod
    def zero(cls, trunc=INF) -> "PuiseuxSeries":
        return cls({}, trunc)

    @classmethod
    def const(cls, c, trunc=INF) -> "PuiseuxSeries":
        return cls({Q(0): c}, trunc)

    @classmethod
    def monomial(cls, c, e, trunc=INF) -> "PuiseuxSeries":
        return cls({Q(e): c}, trunc)

    @classmethod
    def _raw(cls, terms: dict, trunc, d: int) -> "PuiseuxSeries":
        # terms already sorted, nonzero and canonical
        s = object.__new__(cls)
        s.terms = terms
        s.trunc = trunc
        s._d = d
        return s

    # -- inspection ------------------------------------------------
    @property
    def d(self) -> int:
        """Ramification: lcm of the denominators of the known exponents."""
        return self._d

    def is_exact(self) -> bool:
        return self.trunc == INF

    def is_zero(self) -> bool:
        """True when no term is known (the series may still be nonzero beyond trunc)."""
        return not self.terms

    def is_exact_zero(self) -> bool:
        return not self.terms and self.trunc == INF

    def valuation(self):
        """Exponent of the first term, or :class:`AtLeast` when none is known."""
        if self.terms:
            return next(iter(self.terms))
        return AtLeast(self.trunc)

    def val_lb(self):
        """Lower bound for the valuation (exact when a term is known)."""
        if self.terms:
            return next(iter(self.terms))
        return self.trunc

    def exact_valuation(self) -> Fraction:
        if not self.terms:
            raise InsufficientPrecision(
                f"valuation unknown: no term below {self.trunc}")
        return next(iter(self.terms))

    def leading(self):
        """(exponent, coefficient) of the first term."""
        e = self.exact_valuation()
        return e, self.terms[e]

    def coeff(self, e):
        e = Q(e)
        if e >= self.trunc:
            raise InsufficientPrecision(f"coefficient of x^{e} unknown (trunc {self.trunc})")
        return self.terms.get(e, Q(0))

    def conductor(self) -> int:
        m = 1
        for c in self.terms.values():
            if isinstance(c, Cyclo):
                m = lcm(m, c.m)
        return m

    def is_rational_power_series(self) -> bool:
        return all(e.denominator == 1 and not isinstance(c, Cyclo)
                   for e, c in self.terms.items())

    # -- truncation ------------------------------------------------
    def truncate(self, t) -> "PuiseuxSeries":
        if t == INF or t >= self.trunc:
            return self
        t = Q(t)
        return PuiseuxSeries._raw({e: c for e, c in self.terms.items() if e < t}, t, self._d)

    def cap(self, t) -> "PuiseuxSeries":
        """Like truncate, but an exact series with no term at or beyond t stays exact."""
        if self.trunc == INF and (not self.terms or next(reversed(self.terms)) < t):
            return self
        return self.truncate(t)

    # -- arithmetic ------------------------------------------------
    def __neg__(self):
        return PuiseuxSeries._raw({e: -c for e, c in self.terms.items()}, self.trunc, self._d)

    def __add__(self, other):
        if not isinstance(other, PuiseuxSeries):
            other = PuiseuxSeries.const(other)
        trunc = min(self.trunc, other.trunc)
        out = dict(self.terms) if self.trunc == trunc else {
            e: c for e, c in self.terms.items() if e < trunc}
        for e, c in other.terms.items():
            if e >= trunc:
                break
            out[e] = out[e] + c if e in out else c
        terms = {e: c if type(c) is MPQ else canon(c) for e, c in sorted(out.items()) if c}
        return PuiseuxSeries._raw(terms, trunc, lcm(self._d, other._d))

    __radd__ = __add__

    def __sub__(self, other):
        if not isinstance(other, PuiseuxSeries):
            other = PuiseuxSeries.const(other)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c, shift=0) -> "PuiseuxSeries":
        """c * x^shift * self."""
        if _is_zero(c):
            return PuiseuxSeries.zero(self.trunc + shift if self.trunc != INF else INF)
        shift = Q(shift)
        trunc = self.trunc + shift if self.trunc != INF else INF
        terms = {e + shift: canon(v * c) for e, v in self.terms.items()}
        return PuiseuxSeries._raw(terms, trunc, lcm(self._d, shift.denominator))

    def __mul__(self, other):
        return self.mul(other)

    def mul(self, other, prec=None) -> "PuiseuxSeries":
        """Product, with terms at exponents >= prec dropped when prec is given."""
        if not isinstance(other, PuiseuxSeries):
            out = self.scale(other)
            return out if prec is None else out.truncate(prec)
        a, b = self, other
        va, vb = a.val_lb(), b.val_lb()
        trunc = min(va + b.trunc, vb + a.trunc)
        if prec is not None:
            trunc = min(trunc, Q(prec))
        if not a.terms or not b.terms:
            return PuiseuxSeries.zero(trunc)
        # exact monomial times series is a shift
        if len(a.terms) == 1 and a.trunc == INF:
            (e, c), = a.terms.items()
            return b.scale(c, e).truncate(trunc)
        if len(b.terms) == 1 and b.trunc == INF:
            (e, c), = b.terms.items()
            return a.scale(c, e).truncate(trunc)
        out: dict = {}
        bt = list(b.terms.items())
        for ea, ca in a.terms.items():
            if ea + vb >= trunc:
                break
            for eb, cb in bt:
                e = ea + eb
                if e >= trunc:
                    break
                p = ca * cb
                out[e] = out[e] + p if e in out else p
        return PuiseuxSeries(out, trunc, lcm(a._d, b._d))

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            raise ValueError("negative power: use inverse")
        result = PuiseuxSeries.const(Q(1))
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def inverse(self, prec=None) -> "PuiseuxSeries":
        """1/self, known below ``prec`` (absolute) when the series is not a monomial.

        The precision of the result is also limited by that of ``self``.
        """
        v, c0 = self.leading()
        inv_c0 = 1 / c0 if isinstance(c0, Cyclo) else Q(1) / c0
        rest = [(e - v, c * inv_c0) for e, c in self.terms.items() if e != v]
        rel = self.trunc - v if self.trunc != INF else INF
        if not rest and rel == INF:
            return PuiseuxSeries._raw({-v: canon(inv_c0)}, INF, lcm(self._d, v.denominator))
        if prec is not None:
            rel = min(rel, Q(prec) + v)
        if rel == INF:
            raise ValueError("inverse of a non-monomial exact series needs a precision")
        # g * (1 + e) = 1 on the lattice (1/D)Z, relative exponents in [0, rel)
        D = self._d
        N = math.ceil(rel * D)
        e_dense = [0] * N
        for e, c in rest:
            k = int(e * D)
            if k < N:
                e_dense[k] = c
        g = [Q(0)] * N
        if N > 0:
            g[0] = Q(1)
        nz = [k for k in range(1, N) if not _is_zero(e_dense[k])]
        for k in range(1, N):
            acc = Q(0)
            for j in nz:
                if j > k:
                    break
                if not _is_zero(g[k - j]):
                    acc = acc + e_dense[j] * g[k - j]
            g[k] = -acc
        terms = {Q(k, D) - v: canon(gk * inv_c0) for k, gk in enumerate(g) if not _is_zero(gk)}
        return PuiseuxSeries(terms, rel - v, D)

    def div(self, other: "PuiseuxSeries", prec=None) -> "PuiseuxSeries":
        """self / other known below ``prec`` (absolute) where achievable."""
        if not isinstance(other, PuiseuxSeries):
            c = 1 / other if isinstance(other, Cyclo) else Q(1) / other
            return self.scale(c)
        if (other.is_exact() and len(other.terms) == 1) or prec is None:
            return self * other.inverse()
        if self.is_exact_zero():
            return self
        prec = Q(prec)
        inv = other.inverse(prec - self.val_lb())
        return self.mul(inv, prec)

    def __truediv__(self, other):
        return self.div(other)

    def derivative(self) -> "PuiseuxSeries":
        """d/dx."""
        terms = {e - 1: canon(c * e) for e, c in self.terms.items() if e != 0}
        trunc = self.trunc - 1 if self.trunc != INF else INF
        return PuiseuxSeries(terms, trunc, self._d)

    # -- comparison / display ---------------------------------------
    def __eq__(self, other):
        if not isinstance(other, PuiseuxSeries):
            other = PuiseuxSeries.const(other)
        return self.trunc == other.trunc and self.terms.keys() == other.terms.keys() and all(
            self.terms[e] == other.terms[e] for e in self.terms)

    def __hash__(self):
        return hash((tuple(self.terms), self.trunc))

    def agrees_with(self, other: "PuiseuxSeries") -> bool:
        """Same known terms below the smaller truncation."""
        t = min(self.trunc, other.trunc)
        return (self.truncate(t) - other.truncate(t)).is_zero()

    def sort_key(self):
        return tuple((e, scalar_key(c)) for e, c in self.terms.items())

    def __repr__(self):
        return f"PuiseuxSeries({self})"

    def __str__(self):
        parts = []
        for e, c in self.terms.items():
            cs = str(c) if not isinstance(c, Cyclo) else f"({c})"
            if e == 0:
                parts.append(cs)
            else:
                parts.append(f"{cs}*x^{e}" if c != 1 else f"x^{e}")
        body = " + ".join(parts) if parts else "0"
        if self.trunc != INF:
            body += f" + O(x^{self.trunc})"
        return body


def series(spec: Mapping | Iterable = (), trunc=INF) -> PuiseuxSeries:
    """Convenience constructor: ``series({"3/2": 1})``."""
    return PuiseuxSeries(spec, trunc)


def series_add(a, b):
    return a + b


def series_mul(a, b):
    return a * b


def series_div(a, b, prec=None):
    return a.div(b, prec)


def series_derivative(a):
    return a.derivative()


def valuation(a):
    return a.valuation()


# ----------------------------------------------------------------- YPoly


class YPoly:
    """Polynomial in y with PuiseuxSeries coefficients, lowest degree first."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Sequence):
        cs = [c if isinstance(c, PuiseuxSeries) else PuiseuxSeries.const(c) for c in coeffs]
        while cs and cs[-1].is_exact_zero():
            cs.pop()
        self.coeffs = cs

    @classmethod
    def y(cls) -> "YPoly":
        return cls([PuiseuxSeries.zero(), PuiseuxSeries.const(Q(1))])

    @classmethod
    def const(cls, s) -> "YPoly":
        return cls([s])

    @classmethod
    def from_terms(cls, terms: Mapping) -> "YPoly":
        """From {(xexp, yexp): coeff}."""
        deg = max((l for _, l in terms), default=-1)
        rows: list[dict] = [dict() for _ in range(deg + 1)]
        for (k, l), c in terms.items():
            rows[l][Q(k)] = c
        return cls([PuiseuxSeries(r) for r in rows])

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def coeff(self, k: int) -> PuiseuxSeries:
        return self.coeffs[k] if 0 <= k < len(self.coeffs) else PuiseuxSeries.zero()

    def is_exact(self) -> bool:
        return all(c.is_exact() for c in self.coeffs)

    def is_monic(self) -> bool:
        return bool(self.coeffs) and self.coeffs[-1] == PuiseuxSeries.const(Q(1))

    def __add__(self, other):
        if not isinstance(other, YPoly):
            other = YPoly.const(other)
        n = max(len(self.coeffs), len(other.coeffs))
        return YPoly([self.coeff(k) + other.coeff(k) for k in range(n)])

    __radd__ = __add__

    def __neg__(self):
        return YPoly([-c for c in self.coeffs])

    def __sub__(self, other):
        if not isinstance(other, YPoly):
            other = YPoly.const(other)
        return self + (-other)

    def __mul__(self, other):
        if not isinstance(other, YPoly):
            return YPoly([c * other for c in self.coeffs])
        if not self.coeffs or not other.coeffs:
            return YPoly([])
        out = [PuiseuxSeries.zero() for _ in range(len(self.coeffs) + len(other.coeffs) - 1)]
        for i, a in enumerate(self.coeffs):
            if a.is_exact_zero():
                continue
            for j, b in enumerate(other.coeffs):
                if not b.is_exact_zero():
                    out[i + j] = out[i + j] + a * b
        return YPoly(out)

    __rmul__ = __mul__

    def __call__(self, s):
        """Evaluate at y = s (a series)."""
        acc = PuiseuxSeries.zero()
        for c in reversed(self.coeffs):
            acc = acc * s + c
        return acc

    def diff_y(self) -> "YPoly":
        return YPoly([c * k for k, c in enumerate(self.coeffs)][1:])

    def diff_x(self) -> "YPoly":
        return YPoly([c.derivative() for c in self.coeffs])

    def taylor_shift(self, s: PuiseuxSeries) -> "YPoly":
        """The polynomial G(y) = self(y + s)."""
        out: list[PuiseuxSeries] = []
        for c in reversed(self.coeffs):
            # out <- out * (y + s) + c
            new = [PuiseuxSeries.zero() for _ in range(len(out) + 1)]
            for k, a in enumerate(out):
                new[k + 1] = new[k + 1] + a
                new[k] = new[k] + a * s
            new[0] = new[0] + c
            out = new
        return YPoly(out)

    def truncate(self, t) -> "YPoly":
        return YPoly([c.truncate(t) for c in self.coeffs])

    def divmod(self, g: "YPoly") -> tuple["YPoly", "YPoly"]:
        """Euclidean division by g, whose leading coefficient must be an exact monomial."""
        lead = g.coeffs[-1]
        if not (lead.is_exact() and len(lead.terms) == 1):
            raise ValueError("divisor leading coefficient must be an exact monomial")
        inv = lead.inverse()
        rem = list(self.coeffs)
        dg = g.degree
        q = [PuiseuxSeries.zero() for _ in range(max(len(rem) - dg, 0))]
        for k in range(len(rem) - 1 - dg, -1, -1):
            c = rem[k + dg] * inv
            q[k] = c
            if c.is_exact_zero():
                continue
            for j, b in enumerate(g.coeffs):
                rem[k + j] = rem[k + j] - c * b
        return YPoly(q), YPoly(rem[:dg])

    def lower_valuation(self):
        return min((c.val_lb() for c in self.coeffs), default=INF)

    def is_rational(self) -> bool:
        """All known coefficients lie in Q[[x]] (integral exponents, rational scalars)."""
        return all(c.is_rational_power_series() for c in self.coeffs)

    def __eq__(self, other):
        if not isinstance(other, YPoly):
            return NotImplemented
        n = max(len(self.coeffs), len(other.coeffs))
        return all(self.coeff(k) == other.coeff(k) for k in range(n))

    def __repr__(self):
        return "YPoly(" + ", ".join(str(c) for c in self.coeffs) + ")"


def product_of_linear(roots: Sequence[PuiseuxSeries], mult: Sequence[int] | None = None) -> YPoly:
    """prod (y - a_i)^(mu_i)."""
    f = YPoly.const(PuiseuxSeries.const(Q(1)))
    for i, a in enumerate(roots):
        lin = YPoly([-a, PuiseuxSeries.const(Q(1))])
        for _ in range(mult[i] if mult else 1):
            f = f * lin
    return f


# --------------------------------------------------------- Newton-Puiseux


def _lower_hull(points: list[tuple[int, Fraction]]) -> list[tuple[tuple[int, Fraction], tuple[int, Fraction]]]:
    hull: list[tuple[int, Fraction]] = []
    for p in points:
        while len(hull) >= 2:
            (x1, y1), (x2, y2) = hull[-2], hull[-1]
            # drop hull[-1] when it lies on or above the segment hull[-2] -> p
            if (y2 - y1) * (p[0] - x1) >= (p[1] - y1) * (x2 - x1):
                hull.pop()
            else:
                break
        hull.append(p)
    return list(zip(hull, hull[1:]))


def check_distinguished(f: YPoly) -> int:
    """Raise NotDistinguished unless f is monic with f(0, y) = y^n; return n."""
    n = f.degree
    if n < 1 or not f.is_monic():
        raise NotDistinguished("polynomial is not monic in y")
    for k in range(n):
        c = f.coeffs[k]
        if not c.is_exact():
            raise NotDistinguished("coefficients must be exact polynomials")
        if any(e < 0 for e in c.terms):
            raise NotDistinguished("negative x-exponent")
        if c.terms and c.val_lb() <= 0:
            raise NotDistinguished(f"f(0, y) != y^n: y^{k} has a constant term")
    return n


def check_reduced(f: YPoly) -> None:
    """Raise NotReduced when f and df/dy share a factor over Q(x)."""
    import sympy

    x, y = sympy.symbols("x y")
    expr = 0
    for l, c in enumerate(f.coeffs):
        for e, a in c.terms.items():
            if isinstance(a, Cyclo) or e.denominator != 1:
                return  # only rational polynomial input is screened here
            expr += sympy.Rational(a.numerator, a.denominator) * x ** int(e) * y ** l
    P = sympy.Poly(expr, y, x)
    g = sympy.gcd(P, P.diff(y))
    if sympy.Poly(g, y, x).degree(y) > 0:
        raise NotReduced("f and df/dy have a common factor")


def newton_puiseux(f: YPoly, order) -> list[PuiseuxSeries]:
    """Roots of a distinguished reduced polynomial, each known below ``order``.

    Roots that are finite Puiseux polynomials come back exact.  Coefficients
    are rational or cyclotomic; anything else raises UnsupportedExtension.
    """
    n = check_distinguished(f)
    check_reduced(f)
    order = Q(order)
    out: list[PuiseuxSeries] = []
    _np(f, n, Q(0), PuiseuxSeries.zero(), order, False, out)
    return out


def _np(G: YPoly, k: int, lower: Fraction, prefix: PuiseuxSeries, order: Fraction,
        simple: bool, out: list) -> None:
    """Collect the k roots of G of valuation > lower, shifted by prefix."""
    i0 = 0
    while i0 <= k and G.coeff(i0).is_exact_zero():
        i0 += 1
    if i0 >= 2:
        raise NotReduced("repeated exact root")
    if i0 == 1:
        out.append(prefix)
    points = []
    for i in range(i0, k + 1):
        c = G.coeff(i)
        if c.terms:
            points.append((i, c.val_lb()))
        elif not c.is_exact() and i == i0:
            # coefficient unknown below its truncation: the remaining roots
            # agree with the prefix to the requested order (simple stage only)
            if not simple:
                raise InsufficientPrecision("lost exactness in the multiple stage")
            out.append(prefix.truncate(order))
            return
    for (ia, va), (ib, vb) in _lower_hull(points):
        g = (va - vb) / (ib - ia)
        length = ib - ia
        if g <= lower:
            raise AssertionError("Newton polygon slope below the current bound")
        if g >= order:
            out.extend(prefix.truncate(order) for _ in range(length))
            continue
        edge = [G.coeff(ia + j).terms.get(va - j * g, Q(0)) for j in range(length + 1)]
        for c, mult in roots_in_cyclotomic(edge):
            term = PuiseuxSeries.monomial(c, g)
            H = G.taylor_shift(term)
            is_simple = simple or mult == 1
            if is_simple:
                v1 = H.coeff(1).val_lb()
                H = YPoly([c.cap(order + v1) for c in H.coeffs])
            _np(H, mult, g, prefix + term, order, is_simple, out)


__all__ = [
    "AtLeast", "INF", "PuiseuxSeries", "YPoly", "check_distinguished", "check_reduced",
    "newton_puiseux", "product_of_linear", "series", "series_add", "series_derivative",
    "series_div", "series_mul", "valuation",
]
