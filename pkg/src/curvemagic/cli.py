"""Command-line front end: ``curvemagic <subcommand> [--input FILE|-] ...``.

Every subcommand reads one JSON document carrying exactly one curve shape
(polynomial, branches, multiplicities, char_exponents or tree), optionally
nested under "bouquet".  Output is JSON (default) or text on stdout; errors
are a JSON object on stderr and a nonzero exit code.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction
from typing import Callable

from .bernstein import bernstein_multiple
from .bouquet import Bouquet, CharExponents, MultiplicityData, bouquet_from_char_exponents, \
    char_multiplicities, lagrange_recompose, milnor_number
from .division import (nabla, reduce_poly_mod_fy, solve_w, solve_wf, vec_valuation,
                       weight_constants)
from .errors import BranchDataRequired, CurveMagicError, InputError, InsufficientPrecision, \
    NotUltrametric, NotZeroSum
from .jsonio import (bouquet_to_json, char_exponents_from_json, curve_part,
                     multiplicities_from_json, multiplicities_to_json, matrix_to_json,
                     bouquet_from_json, shape_of, spectrum_to_json, spoly_to_json,
                     tree_from_json, tree_to_json, ypoly_from_json, ypoly_to_json)
from .magic import magic_from_multiplicities, spectrum_from_tree
from .puiseux import INF, YPoly, newton_puiseux
from .scalars import RATIONALS, Q, format_rational, parse_rational
from .tree import Tree, build_tree, reconstruct_multiplicities

DEFAULT_MAX_ORDER = 64
SUBCOMMANDS = ("expand", "analyze", "solve-wf", "solve-w", "nabla", "bernstein")


def max_order() -> Fraction:
    raw = os.environ.get("CURVEMAGIC_MAX_ORDER")
    if raw is None:
        return Q(DEFAULT_MAX_ORDER)
    q = parse_rational(raw)
    if q <= 0:
        raise InputError("CURVEMAGIC_MAX_ORDER must be positive")
    return q


def adaptive(build: Callable[[Fraction], object], start, explicit: bool):
    """Call build(order), doubling order on InsufficientPrecision up to the cap."""
    cap = max_order()
    order = Q(start)
    while True:
        try:
            return build(order)
        except InsufficientPrecision as exc:
            if explicit or order >= cap:
                hint = "" if explicit else f" (expansion stopped at order {format_rational(order)}," \
                                           " see CURVEMAGIC_MAX_ORDER)"
                raise InsufficientPrecision(f"{exc}{hint}") from None
            order = min(cap, 2 * order)


# ------------------------------------------------------------ curve inputs


class Curve:
    """The parsed curve part of a request."""

    def __init__(self, doc):
        part = curve_part(doc)
        self.shape = shape_of(doc)
        self.raw = part[self.shape]
        self.mult = part.get("mult")
        self.poly: YPoly | None = None
        self.char: CharExponents | None = None
        self.bouquet: Bouquet | None = None
        self.contacts: MultiplicityData | None = None
        self.tree: Tree | None = None
        if self.shape == "polynomial":
            self.poly = ypoly_from_json(self.raw)
        elif self.shape == "branches":
            self.bouquet = bouquet_from_json(part)
        elif self.shape == "char_exponents":
            self.char = char_exponents_from_json(self.raw)
        elif self.shape == "multiplicities":
            self.contacts = multiplicities_from_json(self.raw)
        else:
            self.tree = tree_from_json(self.raw)
            self.contacts = reconstruct_multiplicities(self.tree)

    @property
    def has_branches(self) -> bool:
        return self.shape in ("polynomial", "branches", "char_exponents")

    def branches_at(self, order) -> Bouquet:
        if self.shape == "polynomial":
            return Bouquet(tuple(newton_puiseux(self.poly, order)), poly=self.poly)
        if self.shape == "char_exponents":
            return bouquet_from_char_exponents(self.char)
        if self.shape == "branches":
            return self.bouquet
        raise BranchDataRequired(f"this subcommand needs branch data, not {self.shape}")

    def adaptive(self, build: Callable[[Bouquet], object], order, start=4):
        """Run build on branches, re-expanding a polynomial when precision runs out."""
        if self.shape != "polynomial":
            return build(self.branches_at(None))
        explicit = order is not None
        return adaptive(lambda o: build(self.branches_at(o)), order or start, explicit)


def _order_arg(args, doc, key="order"):
    if args.order is not None:
        q = parse_rational(args.order)
    elif key in doc:
        q = parse_rational(doc[key])
    else:
        return None
    if q <= 0:
        raise InputError("order must be positive")
    return q


# ------------------------------------------------------------- subcommands


def cmd_expand(args, doc) -> dict:
    c = Curve(doc)
    if c.shape not in ("polynomial", "char_exponents"):
        raise InputError("expand accepts a polynomial or char_exponents")
    order = _order_arg(args, doc) or Q(4)
    if c.shape == "polynomial":
        b = Bouquet(tuple(newton_puiseux(c.poly, order)), poly=c.poly)
    else:
        b = bouquet_from_char_exponents(c.char, order)
    out = {"order": format_rational(order)}
    out.update(bouquet_to_json(b))
    return out


def _contacts(c: Curve, order) -> tuple[MultiplicityData, Bouquet | None]:
    if c.contacts is not None:
        return c.contacts, None
    if c.shape == "char_exponents":
        return char_multiplicities(c.char), None
    return c.adaptive(lambda b: (b.multiplicities, b), order, start=2)


def cmd_analyze(args, doc) -> dict:
    c = Curve(doc)
    m, b = _contacts(c, _order_arg(args, doc))
    t = c.tree if c.tree is not None else build_tree(m)
    A = magic_from_multiplicities(m)
    out = {
        "n": m.n,
        "multiplicities": multiplicities_to_json(m),
        "row_sums": [format_rational(x) for x in m.row_sums],
        "tree": tree_to_json(t),
        "matrix": matrix_to_json(A.rows),
        "spectrum": spectrum_to_json(spectrum_from_tree(t), vectors=True),
        "through_origin": t.passes_through_origin(),
    }
    mu = c.mult if c.shape == "branches" else None
    if mu is not None and any(int(k) != 1 for k in mu):
        Am = magic_from_multiplicities(m, mu)
        out["mult"] = [int(k) for k in mu]
        out["weighted_matrix"] = matrix_to_json(Am.rows)
        out["weighted_spectrum"] = spectrum_to_json(spectrum_from_tree(t, mu), vectors=True)
    elif t.passes_through_origin():
        out["milnor_number"] = format_rational(milnor_number(m))
    if t.passes_through_origin():
        wc = weight_constants(m, b)
        out["weights"] = _weights_json(wc)
    return out


def _weights_json(wc) -> dict:
    return {"pi": format_rational(wc.pi), "delta": format_rational(wc.delta),
            "theta": format_rational(wc.theta), "tau": format_rational(wc.tau)}


def _val_json(v):
    return None if v == INF else format_rational(v) if isinstance(v, RATIONALS) else str(v)


def _w_arg(doc) -> YPoly:
    if "w" not in doc:
        raise InputError("solve subcommands need a polynomial 'w'")
    return ypoly_from_json(doc["w"])


def _solve(args, doc, which: str) -> dict:
    c = Curve(doc)
    w = _w_arg(doc)
    order = _order_arg(args, doc)

    def run(b: Bouquet):
        extra = None
        ww = w
        if args.reduce_mod_fy:
            if not b.is_reduced:
                raise InputError("--reduce-mod-fy needs a reduced bouquet")
            q, ww = reduce_poly_mod_fy(b, w)
            extra = q * b.reduced_poly
        try:
            if which == "wf":
                res = solve_wf(b, ww, order)
            else:
                res = solve_w(b, ww, order)
        except NotZeroSum as exc:
            raise NotZeroSum(f"{exc}; pass --reduce-mod-fy to replace w by its remainder "
                             "modulo f'_y") from None
        return b, res, extra

    b, res, extra = c.adaptive(run, None, start=max(4, 2 * (order or 2)))
    u, v = res.u_poly(), res.v_poly()
    if extra is not None:
        v = v + extra
    out = {
        "u": ypoly_to_json(u),
        "v": ypoly_to_json(v),
        "order": format_rational(res.order),
        "residual_valuation": _val_json(res.residual_valuation),
        "exact": res.exact,
    }
    wc = weight_constants(b.multiplicities, b)
    weights = {"val_u": _val_json(vec_valuation(res.u)), "val_v": _val_json(vec_valuation(res.v))}
    if which == "w":
        weights.update(_weights_json(wc))
    out["weights"] = weights
    if extra is not None:
        out["reduced_mod_fy"] = True
    return out


def cmd_solve_wf(args, doc) -> dict:
    return _solve(args, doc, "wf")


def cmd_solve_w(args, doc) -> dict:
    return _solve(args, doc, "w")


def cmd_nabla(args, doc) -> dict:
    c = Curve(doc)
    w = _w_arg(doc)
    order = _order_arg(args, doc)

    def run(b: Bouquet):
        return b, nabla(b, w, order)

    b, (coords, res) = c.adaptive(run, None, start=max(4, 2 * (order or 2)))
    return {
        "nabla_w": ypoly_to_json(lagrange_recompose(b, coords)),
        "order": format_rational(res.order),
        "exact": res.exact,
    }


def cmd_bernstein(args, doc) -> dict:
    c = Curve(doc)
    order = _order_arg(args, doc)
    kw = dict(saito=args.saito_truncate, b_range=args.b_range)
    if c.has_branches and c.shape != "char_exponents":
        bm = c.adaptive(lambda b: bernstein_multiple(b, **kw), order, start=2)
    elif c.shape == "char_exponents":
        bm = bernstein_multiple(c.char, **kw)
    else:
        bm = bernstein_multiple(c.contacts, **kw)
    total = bm.total
    out = {
        "factors": spoly_to_json(total),
        "degree": total.degree,
        "saito_truncated": bm.saito,
        "data": {
            "n": bm.n, "d": bm.d, "delta": format_rational(bm.delta),
            "pi": format_rational(bm.pi), "sup_mi": format_rational(bm.sup_mi),
            "eigenvalues": [format_rational(x) for x in bm.Lambda],
        },
    }
    if args.parts:
        out["parts"] = {"s+1": spoly_to_json(bm.s_plus_1), "A": spoly_to_json(bm.A),
                        "B": spoly_to_json(bm.B), "C": spoly_to_json(bm.C)}
    if args.b_range != "displayed":
        out["b_range"] = args.b_range
    return out


COMMANDS = {
    "expand": cmd_expand, "analyze": cmd_analyze, "solve-wf": cmd_solve_wf,
    "solve-w": cmd_solve_w, "nabla": cmd_nabla, "bernstein": cmd_bernstein,
}


# ----------------------------------------------------------------- text form


def _factors_text(factors) -> str:
    parts = []
    for c, k in factors:
        q = parse_rational(c)
        base = "s" if q == 0 else f"(s + {c})" if q > 0 else f"(s - {format_rational(-q)})"
        parts.append(base if k == 1 else f"{base}^{k}")
    return " * ".join(parts) if parts else "1"


def _poly_text(p: dict) -> str:
    terms = []
    for l, coeff in enumerate(p["coeffs"]):
        for e, c in coeff:
            cs = c if isinstance(c, str) else json.dumps(c)
            mono = "*".join(s for s in (f"x^{e}" if e != "0" else "", f"y^{l}" if l else "") if s)
            terms.append(f"{cs}*{mono}" if mono else cs)
    text = " + ".join(terms) if terms else "0"
    if "trunc" in p:
        known = [t for t in p["trunc"] if t is not None]
        if known:
            text += f"  (coefficients known below x^{min(known, key=parse_rational)})"
    return text


def render_text(cmd: str, rep: dict) -> str:
    lines = []
    if cmd == "expand":
        lines.append(f"order {rep['order']}")
        for i, s in enumerate(rep["branches"], 1):
            body = " + ".join(f"{c if isinstance(c, str) else json.dumps(c)}*x^{e}"
                              for e, c in s["terms"]) or "0"
            tail = f" + O(x^{s['trunc']})" if s["trunc"] is not None else ""
            lines.append(f"a_{i} = {body}{tail}")
    elif cmd == "analyze":
        lines.append(f"n = {rep['n']}")
        lines.append("matrix:")
        lines.extend("  " + " ".join(f"{x:>6}" for x in r) for r in rep["matrix"]["rows"])
        lines.append("tree:")
        lines.extend(f"  {{{','.join(map(str, r['set']))}}}  gamma = {r['gamma']}"
                     for r in rep["tree"]["rameaux"])
        lines.append("eigenvalues: " + ", ".join(
            f"{e['value']} (x{e['multiplicity']})" for e in rep["spectrum"]["eigenvalues"]))
        if "milnor_number" in rep:
            lines.append(f"milnor number: {rep['milnor_number']}")
        if "weights" in rep:
            lines.append("weights: " + ", ".join(f"{k} = {v}" for k, v in rep["weights"].items()))
    elif cmd in ("solve-wf", "solve-w"):
        lines.append(f"u = {_poly_text(rep['u'])}")
        lines.append(f"v = {_poly_text(rep['v'])}")
        lines.append(f"residual valuation: {rep['residual_valuation'] or 'exact zero'}")
        lines.append("weights: " + ", ".join(f"{k} = {v}" for k, v in rep["weights"].items()))
    elif cmd == "nabla":
        lines.append(f"nabla w = {_poly_text(rep['nabla_w'])}")
    elif cmd == "bernstein":
        lines.append(_factors_text(rep["factors"]))
        for name, fac in rep.get("parts", {}).items():
            lines.append(f"{name}: {_factors_text(fac)}")
    return "\n".join(lines)


# --------------------------------------------------------------------- main


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="curvemagic", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)
    for name in SUBCOMMANDS:
        s = sub.add_parser(name)
        s.add_argument("--input", default="-", help="JSON file, or - for stdin")
        s.add_argument("--order", default=None, help="rational order (expansion or solve target)")
        s.add_argument("--format", choices=("json", "text"), default="json")
        if name in ("solve-wf", "solve-w"):
            s.add_argument("--reduce-mod-fy", action="store_true",
                           help="replace w by its remainder modulo f'_y first")
        if name == "bernstein":
            s.add_argument("--parts", action="store_true", help="also emit the separate factors")
            s.add_argument("--saito-truncate", action="store_true",
                           help="drop factors whose root is <= -2 (post-hoc truncation)")
            s.add_argument("--b-range", choices=("displayed", "prose"), default="displayed",
                           help="index range for the monomial part")
        s.set_defaults(reduce_mod_fy=False, parts=False, saito_truncate=False, b_range="displayed")
    return p


def _read(path: str):
    try:
        text = sys.stdin.read() if path == "-" else open(path, encoding="utf-8").read()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"invalid JSON: {exc}") from None
    if not isinstance(doc, dict):
        raise InputError("the input document must be a JSON object")
    return doc


def run(argv=None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    args = build_parser().parse_args(argv)
    try:
        doc = _read(args.input)
        rep = COMMANDS[args.command](args, doc)
    except CurveMagicError as exc:
        err = {"error_kind": exc.kind, "message": str(exc)}
        if isinstance(exc, NotUltrametric) and exc.witness is not None:
            err["witness"] = [i + 1 for i in exc.witness]
        stderr.write(json.dumps(err) + "\n")
        return exc.exit_code
    except (KeyError, TypeError, ValueError, ZeroDivisionError) as exc:
        # structurally malformed documents surface here
        err = {"error_kind": "InputError", "message": f"malformed input: {exc!r}"}
        stderr.write(json.dumps(err) + "\n")
        return InputError.exit_code
    if args.format == "text":
        stdout.write(render_text(args.command, rep) + "\n")
    else:
        stdout.write(json.dumps(rep, indent=2) + "\n")
    return 0


def main(argv=None) -> None:
    sys.exit(run(argv))


if __name__ == "__main__":
    main()
