"""JSON encoding of scalars, series, polynomials, bouquets, trees and reports.

Rationals are strings "p/q" (or "p").  A cyclotomic scalar is
{"zeta": m, "coeffs": ["c0", "c1", ...]} meaning sum c_k zeta_m^k.  Indices
of branches are 1-based in every document.
"""

from __future__ import annotations

import re
from fractions import Fraction
from typing import Any, Mapping

from .bouquet import Bouquet, CharExponents, MultiplicityData
from .errors import InputError
from .magic import Spectrum
from .puiseux import INF, PuiseuxSeries, YPoly
from .scalars import Cyclo, Q, canon, format_rational, parse_rational
from .tree import Tree

SHAPES = ("polynomial", "branches", "multiplicities", "char_exponents", "tree")


# ------------------------------------------------------------------ scalars


def scalar_to_json(c) -> Any:
    c = canon(c)
    if isinstance(c, Cyclo):
        return {"zeta": c.m, "coeffs": [format_rational(x) for x in c.c]}
    return format_rational(c)


def scalar_from_json(obj) -> Any:
    if isinstance(obj, Mapping):
        try:
            m = int(obj["zeta"])
            coeffs = [parse_rational(x) for x in obj["coeffs"]]
        except (KeyError, TypeError, ValueError) as exc:
            raise InputError(f"bad cyclotomic scalar {obj!r}") from exc
        if m < 1:
            raise InputError("conductor must be positive")
        return canon(Cyclo(m, coeffs))
    return parse_rational(obj)


def _order_to_json(t):
    return None if t == INF else format_rational(t)


def _order_from_json(t):
    return INF if t is None else parse_rational(t)


# ------------------------------------------------------------------- series


def series_to_json(s: PuiseuxSeries) -> dict:
    return {
        "d": s.d,
        "trunc": _order_to_json(s.trunc),
        "terms": [[format_rational(e), scalar_to_json(c)] for e, c in s.terms.items()],
    }


def series_from_json(obj) -> PuiseuxSeries:
    if not isinstance(obj, Mapping) or "terms" not in obj:
        raise InputError("a series needs a 'terms' list")
    terms = {}
    for pair in obj["terms"]:
        if not isinstance(pair, (list, tuple)) or len(pair) != 2:
            raise InputError(f"bad series term {pair!r}")
        e = parse_rational(pair[0])
        terms[e] = terms.get(e, 0) + scalar_from_json(pair[1])
    d = obj.get("d")
    s = PuiseuxSeries(terms, _order_from_json(obj.get("trunc")), int(d) if d else None)
    if d and s.d != int(d) and int(d) % s.d:
        raise InputError(f"exponents do not live in (1/{d})Z")
    return s


# --------------------------------------------------------------- polynomials


def ypoly_to_json(p: YPoly) -> dict:
    out = {
        "y_degree": p.degree,
        "coeffs": [[[format_rational(e), scalar_to_json(c)] for e, c in s.terms.items()]
                   for s in p.coeffs],
    }
    if not p.is_exact():
        out["trunc"] = [_order_to_json(s.trunc) for s in p.coeffs]
    return out


_POLY_CHARS = re.compile(r"^[0-9xy+\-*/^() .]*$")


def ypoly_from_string(text: str) -> YPoly:
    """Parse e.g. "y^2 - x^3" with sympy; coefficients must be rational."""
    import sympy

    if not _POLY_CHARS.match(text):
        raise InputError(f"unexpected characters in polynomial {text!r}")
    x, y = sympy.symbols("x y")
    try:
        expr = sympy.sympify(text.replace("^", "**"), locals={"x": x, "y": y})
        P = sympy.Poly(sympy.expand(expr), y, x)
    except (sympy.SympifyError, sympy.PolynomialError, TypeError, SyntaxError) as exc:
        raise InputError(f"cannot parse polynomial {text!r}") from exc
    if not P.domain.is_QQ and not P.domain.is_ZZ:
        raise InputError("polynomial coefficients must be rational")
    terms = {}
    for (ly, kx), c in P.terms():
        terms[(Q(kx), ly)] = Q(int(c.p), int(c.q))
    return YPoly.from_terms(terms)


def ypoly_from_json(obj) -> YPoly:
    if isinstance(obj, str):
        return ypoly_from_string(obj)
    if not isinstance(obj, Mapping) or "coeffs" not in obj:
        raise InputError("a polynomial is a string or {'y_degree', 'coeffs'}")
    coeffs = obj["coeffs"]
    truncs = obj.get("trunc") or [None] * len(coeffs)
    if len(truncs) != len(coeffs):
        raise InputError("'trunc' must have one entry per coefficient")
    out = []
    for terms, t in zip(coeffs, truncs):
        out.append(series_from_json({"terms": terms, "trunc": t}))
    p = YPoly(out)
    if "y_degree" in obj and int(obj["y_degree"]) != p.degree:
        raise InputError("'y_degree' disagrees with the coefficient list")
    return p


# ------------------------------------------------------ topological inputs


def multiplicities_to_json(m: MultiplicityData) -> dict:
    out = {
        "n": m.n,
        "entries": [[i + 1, j + 1, format_rational(m.m(i, j))] for i, j in m.pairs()],
    }
    if m.d is not None:
        out["d"] = m.d
    return out


def multiplicities_from_json(obj) -> MultiplicityData:
    try:
        n = int(obj["n"])
        entries = [(int(i), int(j), parse_rational(v)) for i, j, v in obj["entries"]]
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError("multiplicities need 'n' and 'entries' [[i, j, m], ...]") from exc
    d = obj.get("d")
    return MultiplicityData.from_entries(n, entries, int(d) if d is not None else None)


def tree_to_json(t: Tree) -> dict:
    return {
        "n": t.n,
        "rameaux": [{"set": [i + 1 for i in sorted(T)], "gamma": format_rational(g)}
                    for T, g in t.gamma.items()],
    }


def tree_from_json(obj) -> Tree:
    try:
        n = int(obj["n"])
        gamma = {frozenset(int(i) - 1 for i in r["set"]): parse_rational(r["gamma"])
                 for r in obj["rameaux"]}
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError("a tree needs 'n' and 'rameaux' [{'set', 'gamma'}]") from exc
    return Tree(n, gamma)


def bouquet_to_json(b: Bouquet) -> dict:
    out = {"branches": [series_to_json(a) for a in b.branches]}
    if b.mult is not None:
        out["mult"] = list(b.mult)
    return out


def bouquet_from_json(obj) -> Bouquet:
    try:
        branches = [series_from_json(s) for s in obj["branches"]]
    except (KeyError, TypeError) as exc:
        raise InputError("'branches' must be a list of series") from exc
    return Bouquet(tuple(branches), obj.get("mult"))


def shape_of(doc: Mapping) -> str:
    """Which of the input shapes the document carries; exactly one is allowed."""
    if "bouquet" in doc and isinstance(doc["bouquet"], Mapping):
        doc = doc["bouquet"]
    found = [k for k in SHAPES if k in doc]
    if len(found) != 1:
        raise InputError(f"expected exactly one of {', '.join(SHAPES)}; found {found or 'none'}")
    return found[0]


def curve_part(doc: Mapping) -> Mapping:
    """The sub-document describing the curve (top level, or under 'bouquet')."""
    if "bouquet" in doc and isinstance(doc["bouquet"], Mapping):
        return doc["bouquet"]
    return doc


def char_exponents_from_json(obj) -> CharExponents:
    try:
        return CharExponents(tuple(int(b) for b in obj))
    except (TypeError, ValueError) as exc:
        raise InputError("char_exponents must be a list of integers") from exc


# ------------------------------------------------------------------ outputs


def matrix_to_json(rows) -> dict:
    return {"n": len(rows), "rows": [[format_rational(x) for x in r] for r in rows]}


def matrix_from_json(obj) -> tuple[tuple[Fraction, ...], ...]:
    rows = tuple(tuple(parse_rational(x) for x in r) for r in obj["rows"])
    if len(rows) != int(obj["n"]) or any(len(r) != len(rows) for r in rows):
        raise InputError("matrix must be n x n")
    return rows


def spectrum_to_json(sp: Spectrum, vectors: bool = False) -> dict:
    out = {"eigenvalues": [{"value": format_rational(v), "multiplicity": k}
                           for v, k in sp.eigenvalues().items()]}
    if vectors:
        out["eigenspaces"] = [{
            "value": format_rational(s.value),
            "cluster": None if s.cluster is None else [i + 1 for i in sorted(s.cluster)],
            "basis": [[format_rational(x) for x in v] for v in s.basis],
        } for s in sp.spaces]
    return out


def spoly_to_json(p) -> list:
    """[["c", k], ...] for the factors (s + c)^k, root nearest 0 first."""
    return [[format_rational(c), k] for c, k in p.factors()]


__all__ = [
    "SHAPES", "bouquet_from_json", "bouquet_to_json", "char_exponents_from_json", "curve_part",
    "matrix_from_json", "matrix_to_json", "multiplicities_from_json", "multiplicities_to_json",
    "scalar_from_json", "scalar_to_json", "series_from_json", "series_to_json", "shape_of",
    "spectrum_to_json", "spoly_to_json", "tree_from_json", "tree_to_json", "ypoly_from_json",
    "ypoly_from_string", "ypoly_to_json",
]
