"""Exact scalars: rationals and elements of cyclotomic fields.

Rationals are gmpy2 ``mpq`` (hash- and comparison-compatible with
:class:`fractions.Fraction`, which is accepted everywhere).  Elements of Q(zeta_m) are
:class:`Cyclo`, stored in the power basis 1, z, ..., z^(phi(m)-1) modulo the
m-th cyclotomic polynomial.  Mixed conductors are promoted to their lcm.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from math import lcm
from numbers import Rational
from typing import Sequence, Union

import mpmath
from gmpy2 import mpq as Q

from .errors import InputError, UnsupportedExtension

MPQ = type(Q())
RATIONALS = (int, Fraction, MPQ)

Scalar = Union[Fraction, "Cyclo"]


def parse_rational(text) -> Fraction:
    """Parse ``"p/q"``, ``"p"`` or an int into a Fraction."""
    if isinstance(text, bool):
        raise InputError(f"not a rational: {text!r}")
    if isinstance(text, RATIONALS):
        return Q(text)
    if not isinstance(text, str):
        raise InputError(f"not a rational: {text!r}")
    try:
        return Q(Fraction(text.strip()))
    except (ValueError, ZeroDivisionError) as exc:
        raise InputError(f"not a rational: {text!r}") from exc


def format_rational(q) -> str:
    q = Q(q)
    if q.denominator == 1:
        return str(int(q.numerator))
    return f"{int(q.numerator)}/{int(q.denominator)}"


def rational_arith(a: Fraction, b: Fraction, op: str) -> Fraction:
    """Exact ``a op b`` for op in ``+ - * /``."""
    if op == "+":
        return a + b
    if op == "-":
        return a - b
    if op == "*":
        return a * b
    if op == "/":
        return Q(a) / Q(b)
    raise ValueError(f"unknown operator {op!r}")


# ---------------------------------------------------------------- int polys


def _int_polydiv_exact(num: list[int], den: Sequence[int]) -> list[int]:
    """Quotient of integer polynomials (low to high) when den is monic."""
    num = list(num)
    dn = len(den) - 1
    out = [0] * (len(num) - dn)
    for k in range(len(out) - 1, -1, -1):
        c = num[k + dn]
        out[k] = c
        if c:
            for j, dj in enumerate(den):
                num[k + j] -= c * dj
    if any(num[:dn]):
        raise ArithmeticError("inexact division")
    return out


@lru_cache(maxsize=None)
def cyclotomic_poly(m: int) -> tuple[int, ...]:
    """Integer coefficients of the m-th cyclotomic polynomial, low to high."""
    if m < 1:
        raise ValueError("conductor must be positive")
    poly = [-1] + [0] * (m - 1) + [1]
    for d in range(1, m):
        if m % d == 0:
            poly = _int_polydiv_exact(poly, cyclotomic_poly(d))
    return tuple(poly)


@lru_cache(maxsize=None)
def _power_table(m: int) -> tuple[tuple[Fraction, ...], ...]:
    """z^k reduced mod Phi_m, for 0 <= k < 2*phi(m)."""
    phi = cyclotomic_poly(m)
    deg = len(phi) - 1
    rows = []
    cur = [Q(0)] * deg
    cur[0] = Q(1)
    for _ in range(2 * deg):
        rows.append(tuple(cur))
        top = cur[-1]
        cur = [Q(0)] + cur[:-1]
        if top:
            for j in range(deg):
                cur[j] -= top * phi[j]
    return tuple(rows)


def _reduce(coeffs: Sequence, m: int) -> tuple[Fraction, ...]:
    deg = len(cyclotomic_poly(m)) - 1
    out = [Q(0)] * deg
    if len(coeffs) <= 2 * deg:
        table = _power_table(m)
        for k, c in enumerate(coeffs):
            if c:
                if k < deg:
                    out[k] += c
                else:
                    for j, t in enumerate(table[k]):
                        if t:
                            out[j] += c * t
        return tuple(out)
    # long input: fold exponents mod m (z^m = 1), then divide by Phi_m
    phi = cyclotomic_poly(m)
    rem = [Q(0)] * min(len(coeffs), m)
    for k, c in enumerate(coeffs):
        if c:
            rem[k % m] += c
    for k in range(len(rem) - 1, deg - 1, -1):
        top = rem[k]
        if top:
            for j in range(deg + 1):
                rem[k - deg + j] -= top * phi[j]
    return tuple(rem[:deg])


class Cyclo:
    """Element of Q(zeta_m)."""

    __slots__ = ("m", "c")

    def __init__(self, m: int, coeffs: Sequence = (), *, _reduced: bool = False):
        self.m = m
        if _reduced:
            self.c = tuple(coeffs)
        else:
            self.c = _reduce([Q(x) for x in coeffs], m)

    @property
    def degree(self) -> int:
        return len(self.c)

    # -- coercion ---------------------------------------------------
    def promote(self, L: int) -> "Cyclo":
        if L == self.m:
            return self
        if L % self.m:
            raise ValueError(f"{self.m} does not divide {L}")
        step = L // self.m
        spread = [Q(0)] * (step * (len(self.c) - 1) + 1)
        for k, x in enumerate(self.c):
            spread[k * step] = x
        return Cyclo(L, spread)

    @staticmethod
    def _pair(a: "Cyclo", b) -> tuple["Cyclo", "Cyclo"]:
        if not isinstance(b, Cyclo):
            b = Cyclo(a.m, (Q(b),))
            return a, b
        if a.m == b.m:
            return a, b
        L = lcm(a.m, b.m)
        return a.promote(L), b.promote(L)

    def is_rational(self) -> bool:
        return not any(self.c[1:])

    def to_rational(self) -> Fraction:
        if not self.is_rational():
            raise ValueError("not rational")
        return self.c[0]

    # -- arithmetic -------------------------------------------------
    def __add__(self, other):
        if isinstance(other, RATIONALS):
            c = list(self.c)
            c[0] += other
            return Cyclo(self.m, c, _reduced=True)
        if not isinstance(other, Cyclo):
            return NotImplemented
        a, b = self._pair(self, other)
        return Cyclo(a.m, [x + y for x, y in zip(a.c, b.c)], _reduced=True)

    __radd__ = __add__

    def __neg__(self):
        return Cyclo(self.m, [-x for x in self.c], _reduced=True)

    def __sub__(self, other):
        if isinstance(other, (*RATIONALS, Cyclo)):
            return self + (-other)
        return NotImplemented

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, RATIONALS):
            return Cyclo(self.m, [x * other for x in self.c], _reduced=True)
        if not isinstance(other, Cyclo):
            return NotImplemented
        a, b = self._pair(self, other)
        prod = [Q(0)] * (len(a.c) + len(b.c) - 1)
        for i, x in enumerate(a.c):
            if x:
                for j, y in enumerate(b.c):
                    if y:
                        prod[i + j] += x * y
        return Cyclo(a.m, _reduce(prod, a.m), _reduced=True)

    __rmul__ = __mul__

    def inverse(self) -> "Cyclo":
        if not any(self.c):
            raise ZeroDivisionError("inverse of zero")
        phi = [Q(x) for x in cyclotomic_poly(self.m)]
        s, g = upoly_inverse_mod(list(self.c), phi)
        return Cyclo(self.m, s)

    def __truediv__(self, other):
        if isinstance(other, RATIONALS):
            if other == 0:
                raise ZeroDivisionError("division by zero")
            return self * (1 / Q(other))
        if not isinstance(other, Cyclo):
            return NotImplemented
        return self * other.inverse()

    def __rtruediv__(self, other):
        return self.inverse() * other

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        result: Cyclo = Cyclo(self.m, (Q(1),))
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def __eq__(self, other):
        if isinstance(other, RATIONALS):
            return self.is_rational() and self.c[0] == other
        if not isinstance(other, Cyclo):
            return NotImplemented
        a, b = self._pair(self, other)
        return a.c == b.c

    def __hash__(self):
        if self.is_rational():
            return hash(self.c[0])
        return hash("Cyclo")

    def __bool__(self):
        return any(self.c)

    def to_complex(self) -> mpmath.mpc:
        z = mpmath.expjpi(mpmath.mpf(2) / self.m)
        return mpmath.fsum(mpmath.mpf(x.numerator) / x.denominator * z**k
                           for k, x in enumerate(self.c) if x)

    def sort_key(self):
        return (self.m, self.c)

    def __repr__(self):
        return f"Cyclo({self.m}, {[format_rational(x) for x in self.c]})"

    def __str__(self):
        parts = []
        for k, x in enumerate(self.c):
            if not x:
                continue
            if k == 0:
                parts.append(format_rational(x))
            else:
                mono = f"z{self.m}" + (f"^{k}" if k > 1 else "")
                parts.append(mono if x == 1 else f"{format_rational(x)}*{mono}")
        return " + ".join(parts) if parts else "0"


def zeta(m: int, k: int = 1) -> Scalar:
    """zeta_m ** k; rational values come back as Fraction."""
    k %= m
    if 2 * k == m:
        return Q(-1)
    if k == 0:
        return Q(1)
    deg = len(cyclotomic_poly(m)) - 1
    coeffs = [Q(0)] * (k + 1)
    coeffs[k] = Q(1)
    if k < deg:
        return Cyclo(m, coeffs + [Q(0)] * (deg - k - 1), _reduced=True)
    return Cyclo(m, coeffs)


def canon(x) -> Scalar:
    """Return a Fraction when the value is rational."""
    if type(x) is MPQ:
        return x
    if isinstance(x, Cyclo):
        return x.c[0] if x.is_rational() else x
    return Q(x)


def conductor(x) -> int:
    return x.m if isinstance(x, Cyclo) else 1


def to_complex(x) -> mpmath.mpc:
    if isinstance(x, Cyclo):
        return x.to_complex()
    x = Q(x)
    return mpmath.mpc(mpmath.mpf(x.numerator) / x.denominator)


def scalar_key(x):
    """Total order key used only for deterministic output."""
    if isinstance(x, Cyclo) and not x.is_rational():
        return (1, x.m, x.c)
    return (0, canon(x))


# ------------------------------------------------ polynomials over a field
# Dense lists, lowest degree first, entries Fraction or Cyclo.


def upoly_trim(p: list) -> list:
    p = list(p)
    while p and p[-1] == 0:
        p.pop()
    return p


def upoly_mul(a: Sequence, b: Sequence) -> list:
    if not a or not b:
        return []
    out = [Q(0)] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x != 0:
            for j, y in enumerate(b):
                if y != 0:
                    out[i + j] = out[i + j] + x * y
    return upoly_trim(out)


def upoly_sub(a: Sequence, b: Sequence) -> list:
    n = max(len(a), len(b))
    return upoly_trim([(a[i] if i < len(a) else 0) - (b[i] if i < len(b) else 0)
                       for i in range(n)])


def upoly_divmod(a: Sequence, b: Sequence) -> tuple[list, list]:
    b = upoly_trim(b)
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    r = upoly_trim(a)
    inv_lead = 1 / b[-1] if isinstance(b[-1], Cyclo) else Q(1) / b[-1]
    q = [Q(0)] * max(len(r) - len(b) + 1, 0)
    while len(r) >= len(b):
        c = r[-1] * inv_lead
        k = len(r) - len(b)
        q[k] = c
        for j, y in enumerate(b):
            r[k + j] = r[k + j] - c * y
        r.pop()
        r = upoly_trim(r)
    return upoly_trim(q), r


def upoly_monic(a: Sequence) -> list:
    a = upoly_trim(a)
    lead = a[-1]
    inv = 1 / lead if isinstance(lead, Cyclo) else Q(1) / lead
    return [x * inv for x in a]


def upoly_gcd(a: Sequence, b: Sequence) -> list:
    a, b = upoly_trim(a), upoly_trim(b)
    while b:
        a, b = b, upoly_divmod(a, b)[1]
    return upoly_monic(a) if a else []


def upoly_deriv(a: Sequence) -> list:
    return upoly_trim([a[k] * k for k in range(1, len(a))])


def upoly_eval(a: Sequence, x):
    acc = Q(0)
    for c in reversed(a):
        acc = acc * x + c
    return acc


def upoly_inverse_mod(a: list, mod: list) -> tuple[list, list]:
    """s with s*a = 1 mod ``mod``; returns (s, gcd)."""
    r0, r1 = upoly_trim(mod), upoly_trim(a)
    s0, s1 = [], [Q(1)]
    while r1 and len(r1) > 1:
        q, r = upoly_divmod(r0, r1)
        r0, r1 = r1, r
        s0, s1 = s1, upoly_sub(s0, upoly_mul(q, s1))
    if not r1:
        raise ZeroDivisionError("not invertible")
    inv = Q(1) / r1[0]
    return [x * inv for x in s1], r1


def squarefree_decomposition(p: Sequence) -> list[tuple[list, int]]:
    """Yun's algorithm: monic squarefree factors with their multiplicity."""
    p = upoly_monic(p)
    out = []
    dp = upoly_deriv(p)
    a = upoly_gcd(p, dp)
    b = upoly_divmod(p, a)[0]
    c = upoly_divmod(dp, a)[0]
    d = upoly_sub(c, upoly_deriv(b))
    k = 1
    while len(b) > 1:
        a = upoly_gcd(b, d)
        if len(a) > 1:
            out.append((a, k))
        b = upoly_divmod(b, a)[0]
        c = upoly_divmod(d, a)[0]
        d = upoly_sub(c, upoly_deriv(b))
        k += 1
    return out


def _squarefree_split(n: int) -> tuple[int, int]:
    """n = s^2 * k with k squarefree; returns (s, k)."""
    s, k, p = 1, 1, 2
    while p * p <= n:
        while n % (p * p) == 0:
            n //= p * p
            s *= p
        if n % p == 0:
            n //= p
            k *= p
        p += 1
    return s, k * n


@lru_cache(maxsize=None)
def sqrt_prime(p: int) -> "Cyclo":
    """Positive square root of a prime, via a quadratic Gauss sum."""
    if p == 2:
        return zeta(8, 1) + zeta(8, 7)
    g = Cyclo(p, [Q(0)] + [Q(pow(a, (p - 1) // 2, p) == 1 and 1 or -1)
                                  for a in range(1, p)])
    if p % 4 == 1:
        return g
    return -zeta(4) * g


def sqrt_rational(q: Fraction) -> Scalar:
    """Square root of a rational as a cyclotomic element (i sqrt(-q) when q < 0)."""
    q = Q(q)
    if q < 0:
        return canon(zeta(4) * sqrt_rational(-q))
    num_s, num_k = _squarefree_split(q.numerator * q.denominator)
    out: Scalar = Q(num_s, q.denominator)
    k, p = num_k, 2
    while k > 1:
        if k % p == 0:
            out = out * sqrt_prime(p)
            k //= p
        p += 1
    return canon(out)


def _to_fraction(x: mpmath.mpf, bound: int) -> Fraction:
    text = mpmath.nstr(x, 45, min_fixed=-100, max_fixed=100)
    return Q(Fraction(text).limit_denominator(bound))


def _close(x: mpmath.mpf, q: Fraction) -> bool:
    return abs(x - mpmath.mpf(q.numerator) / q.denominator) < mpmath.mpf(10) ** -30


def _root_from_numeric(z: mpmath.mpc) -> Scalar | None:
    """Guess r * zeta_L^j or r * sqrt(k) * zeta_L^j from an approximation."""
    modulus = abs(z)
    r = _to_fraction(modulus, 10**12)
    if not _close(modulus, r):
        sq = _to_fraction(modulus**2, 10**6)
        if not _close(modulus**2, sq) or sq.numerator * sq.denominator > 10**9:
            return None
        r = sqrt_rational(sq)
    t = _to_fraction(mpmath.arg(z) / (2 * mpmath.pi), 720) % 1
    if t == 0:
        return r
    return canon(zeta(t.denominator, t.numerator) * r)


def roots_in_cyclotomic(poly: Sequence) -> list[tuple[Scalar, int]]:
    """All roots of ``poly`` with multiplicity, each of the form r*zeta_L^j.

    Candidates come from a high-precision numerical root finder on each
    squarefree factor; each candidate is then checked by exact evaluation.
    Raises UnsupportedExtension when some root is not of that form.
    """
    poly = upoly_trim(poly)
    if len(poly) < 2:
        return []
    found: list[tuple[Scalar, int]] = []
    for factor, mult in squarefree_decomposition(poly):
        deg = len(factor) - 1
        if deg == 1:
            found.append((canon(-factor[0]), mult))
            continue
        with mpmath.workdps(60):
            nums = mpmath.polyroots([to_complex(c) for c in reversed(factor)],
                                    maxsteps=400, extraprec=400)
            cands = [_root_from_numeric(mpmath.mpc(z)) for z in nums]
        distinct: list[Scalar] = []
        for c in cands:
            if c is None or upoly_eval(factor, c) != 0:
                raise UnsupportedExtension(
                    f"edge polynomial {format_upoly(poly)} has a root outside "
                    "the supported cyclotomic forms")
            if all(c != e for e in distinct):
                distinct.append(c)
        if len(distinct) != deg:
            raise UnsupportedExtension(
                f"could not isolate the roots of {format_upoly(poly)}")
        found.extend((c, mult) for c in distinct)
    return found


def format_upoly(p: Sequence, var: str = "c") -> str:
    terms = [f"({c})*{var}^{k}" for k, c in enumerate(p) if c != 0]
    return " + ".join(terms) if terms else "0"


def is_scalar(x) -> bool:
    return isinstance(x, (*RATIONALS, Cyclo)) or isinstance(x, Rational)


__all__ = [
    "Cyclo", "MPQ", "Q", "RATIONALS", "Scalar", "canon", "conductor", "cyclotomic_poly", "format_rational",
    "parse_rational", "rational_arith", "roots_in_cyclotomic", "scalar_key",
    "sqrt_rational", "squarefree_decomposition", "to_complex", "zeta",
]
