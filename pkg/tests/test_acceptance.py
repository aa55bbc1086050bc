"""Acceptance criteria, each at its stated tolerance and time limit.

A PASS/FAIL line per criterion is printed in the terminal summary.
"""

from __future__ import annotations

import io
import json
import random
import time
from fractions import Fraction as F

import pytest
import sympy

from curvemagic import (Bouquet, CharExponents, MultiplicityData, NotUltrametric,
                        UnsupportedExtension, bernstein_multiple, build_tree, char_multiplicities,
                        f_squared_certificate, magic_from_multiplicities, nabla, newton_puiseux,
                        reconstruct_multiplicities, solve_w, solve_wf, spectrum, weight_constants)
from curvemagic.bouquet import bouquet_from_char_exponents
from curvemagic.cli import run
from curvemagic.division import vec_in_form, vec_valuation
from curvemagic.jsonio import matrix_from_json, ypoly_from_string
from curvemagic.puiseux import PuiseuxSeries, YPoly

from oracles import (NODE_B_ROOTS, charpoly_eigenvalues, division_residual, lagrange_val,
                     multiset_includes, product_matches, quasi_homogeneous_b_roots, roots_of)
from strategies import nonzero_ypoly, random_bouquet, random_tree

criterion = pytest.mark.criterion


class Timer:
    def __init__(self, limit):
        self.limit = limit

    def __enter__(self):
        self.t0 = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.elapsed = time.perf_counter() - self.t0
        if exc[0] is None:
            assert self.elapsed < self.limit, f"took {self.elapsed:.2f}s, limit {self.limit}s"


def cli(argv, doc, tmp_path):
    path = tmp_path / "in.json"
    path.write_text(json.dumps(doc))
    out, err = io.StringIO(), io.StringIO()
    code = run([*argv, "--input", str(path)], out, err)
    return code, (json.loads(out.getvalue()) if code == 0 else json.loads(err.getvalue()))


def frac(q) -> F:
    """Plain Fraction from any exact rational (including gmpy2 mpq)."""
    if isinstance(q, (str, int)):
        return F(q)
    return F(int(q.numerator), int(q.denominator))


def rows_f(rows):
    return [[frac(x) for x in r] for r in rows]


def matvec(A, v):
    return [sum((a * x for a, x in zip(r, v)), F(0)) for r in A]


EXREC_MATRIX = [
    [0, 0, 0, 0, 0, 0],
    [0, 1, -1, 0, 0, 0],
    [0, -1, 1, 0, 0, 0],
    [0, 0, 0, 2, -1, -1],
    [0, 0, 0, -1, 4, -3],
    [0, 0, 0, -1, -3, 4],
]


# ------------------------------------------------------------------ AC1


@criterion("AC1", "six-branch magic matrix and tree")
def test_ac1_exrec_matrix_and_tree(golden, tmp_path):
    doc = json.loads((golden / "exrec.json").read_text())
    with Timer(1.0):
        code, rep = cli(["analyze"], doc, tmp_path)
    assert code == 0
    A = rows_f(matrix_from_json(rep["matrix"]))
    assert A == rows_f(EXREC_MATRIX)
    rameaux = {frozenset(r["set"]): F(r["gamma"]) for r in rep["tree"]["rameaux"]}
    assert rameaux == {
        frozenset(range(1, 7)): F(0),
        frozenset({2, 3}): F(1),
        frozenset({4, 5, 6}): F(1),
        frozenset({5, 6}): F(2),
    }


# ------------------------------------------------------------------ AC2


@criterion("AC2", "eigenvalues {0, 2, 3, 7} with exact eigenpairs")
def test_ac2_exrec_spectrum(golden, tmp_path):
    doc = json.loads((golden / "exrec.json").read_text())
    with Timer(1.0):
        code, rep = cli(["analyze"], doc, tmp_path)
        A = rows_f(matrix_from_json(rep["matrix"]))
        values = {F(e["value"]): e["multiplicity"] for e in rep["spectrum"]["eigenvalues"]}
        assert set(values) == {F(0), F(2), F(3), F(7)}
        assert values == charpoly_eigenvalues(A)
        total = 0
        for space in rep["spectrum"]["eigenspaces"]:
            lam = F(space["value"])
            for v in space["basis"]:
                v = [F(x) for x in v]
                assert matvec(A, v) == [lam * x for x in v]
                total += 1
        assert total == 6
        vecs = [[F(x) for x in v] for s in rep["spectrum"]["eigenspaces"] for v in s["basis"]]
        assert sympy.Matrix(vecs).rank() == 6


# ------------------------------------------------------------------ AC3


@criterion("AC3", "irreducible beta = (6, 8, 9) matrix and eigenvalues")
def test_ac3_char_exponents_689():
    with Timer(1.0):
        c = CharExponents((6, 8, 9))
        m = char_multiplicities(c)
        A = rows_f(magic_from_multiplicities(m).rows)
        for i in range(6):
            for j in range(6):
                if i == j:
                    assert A[i][j] == F(41, 6)
                elif abs(i - j) % 6 == 3:
                    assert A[i][j] == F(-3, 2)
                else:
                    assert A[i][j] == F(-4, 3)
        sp = spectrum(m)
        assert set(sp.nonzero_values()) == {F(8), F(25, 3)}
        for lam, v in sp.pairs():
            assert matvec(A, [frac(x) for x in v]) == [frac(lam) * frac(x) for x in v]
        assert sp.eigenvalues() == charpoly_eigenvalues(A)
        # the same matrix from explicit conjugate branches
        b = bouquet_from_char_exponents(c, 3)
        assert rows_f(magic_from_multiplicities(b.multiplicities).rows) == A


# ------------------------------------------------------------------ AC4


@criterion("AC4", "division residuals on 200 random bouquets")
def test_ac4_division_residuals():
    rng = random.Random(20261015)
    failures = []
    with Timer(30.0):
        for k in range(200):
            b = random_bouquet(rng, n_max=5, d_max=4)
            f = b.reduced_poly
            # solve_wf: w of y-degree <= n - 2 is zero-sum
            w = nonzero_ypoly(rng, b.n - 2, b.ramification)
            r = solve_wf(b, w)
            vq, vr = division_residual(b, r.u_poly(), r.v_poly(), w * f, f)
            if not (vq >= r.order and vr >= r.order):
                failures.append((k, "wf residual", vq, vr, r.order))
            if vec_valuation(r.u) < lagrange_val(b, w) + 1:
                failures.append((k, "wf val(u)"))
            # solve_w: any w of y-degree <= n - 1
            w2 = nonzero_ypoly(rng, b.n - 1, b.ramification)
            r2 = solve_w(b, w2)
            vq, vr = division_residual(b, r2.u_poly(), r2.v_poly(), w2, f)
            if not (vq >= r2.order and vr >= r2.order):
                failures.append((k, "w residual", vq, vr, r2.order))
            wc = weight_constants(b.multiplicities, b)
            vw = lagrange_val(b, w2)
            if vec_valuation(r2.u) < vw - wc.theta or vec_valuation(r2.v) < vw - wc.tau:
                failures.append((k, "w bounds"))
            # u'_x + v'_y loses at most pi
            g = r2.u_poly().diff_x() + r2.v_poly().diff_y()
            if g.degree >= 0 and lagrange_val(b, g) < vw - wc.pi:
                failures.append((k, "w divergence"))
    assert not failures, failures[:5]


# ------------------------------------------------------------------ AC5


@criterion("AC5", "f^2 certificate for the cusp")
def test_ac5_f_squared_cusp():
    x, y = sympy.symbols("x y")
    with Timer(1.0):
        f = ypoly_from_string("y^2 - x^3")
        b = Bouquet(tuple(newton_puiseux(f, 4)), poly=f)
        res = f_squared_certificate(b)
        assert res.exact
        u, v = to_sympy(res.u_poly(), x, y), to_sympy(res.v_poly(), x, y)
        fe = y**2 - x**3
        assert sympy.expand(u - (-x**4 / 3)) == 0
        # v is determined up to C{x} f'_y; here f'_y = 2y
        diff = sympy.expand(v - (y**3 - 2 * x**3 * y) / 2)
        quo, rem = sympy.div(diff, sympy.diff(fe, y), y)
        assert rem == 0 and sympy.Poly(quo, y).degree() <= 0
        assert sympy.expand(u * sympy.diff(fe, x) + v * sympy.diff(fe, y) - fe**2) == 0


def to_sympy(p: YPoly, x, y):
    out = sympy.Integer(0)
    for l, s in enumerate(p.coeffs):
        assert s.is_exact()
        for e, c in s.terms.items():
            e, c = frac(e), frac(c)
            out += sympy.Rational(c.numerator, c.denominator) * x ** sympy.Rational(e.numerator, e.denominator) * y**l
    return sympy.expand(out)


# ------------------------------------------------------------------ AC6


def _finv_oracle(A, W):
    """Solve A X = W with sum X = 0 by sympy linear algebra."""
    n = len(A)
    M = sympy.Matrix([[sympy.Rational(a) for a in r] for r in A] + [[1] * n])
    rhs = sympy.Matrix([sympy.Rational(w) for w in W] + [0])
    sol = M.gauss_jordan_solve(rhs)[0]
    return [F(int(s.p), int(s.q)) for s in sol]


def _rat(q):
    q = frac(q)
    return sympy.Rational(q.numerator, q.denominator)


def gr_nabla_oracle(A, Amu, r, W):
    if Amu is None:
        X = _finv_oracle([[_rat(a) for a in row] for row in A], [_rat(w) for w in W])
        return [-w - (1 + r) * x for w, x in zip(W, X)]
    X = _finv_oracle([[_rat(a) for a in row] for row in Amu], [_rat(w) for w in W])
    AX = matvec(A, X)
    return [-(a + (1 + r) * x) for a, x in zip(AX, X)]


@criterion("AC6", "graded nabla law on initial forms")
def test_ac6_gr_nabla_law():
    rng = random.Random(7)
    checked = 0
    with Timer(10.0):
        for k in range(60):
            b = random_bouquet(rng, n_max=4, d_max=3)
            mu = None
            if k % 3 == 2:
                mu = tuple(rng.randint(1, 3) for _ in range(b.n))
                if all(m == 1 for m in mu):
                    mu = (2,) + mu[1:]
                b = Bouquet(b.branches, mu)
            d = b.ramification
            r = F(rng.randint(0, 2 * d), d)
            W0 = [F(rng.randint(-3, 3)) for _ in range(b.n - 1)]
            W0.append(-sum(W0))
            if all(x == 0 for x in W0):
                W0[0], W0[1] = F(1), F(-1)
            W1 = [F(rng.randint(-3, 3)) for _ in range(b.n - 1)]
            W1.append(-sum(W1))
            W = [PuiseuxSeries({r: a, r + 1: c}) for a, c in zip(W0, W1)]
            out, res = nabla(b, W)
            got = vec_in_form(out, r)
            A = rows_f(magic_from_multiplicities(b.multiplicities).rows)
            Amu = None if mu is None else rows_f(magic_from_multiplicities(b.multiplicities, mu).rows)
            assert [frac(g) for g in got] == gr_nabla_oracle(A, Amu, r, W0), (k, mu)
            checked += 1
    assert checked == 60


# ------------------------------------------------------------------ AC7


CURVES = {"y^2 - x^3": (2, 3), "y^2 - x^5": (2, 5), "y^3 - x^4": (3, 4), "y^3 - x^5": (3, 5)}


@criterion("AC7", "classical b-function divides the multiple")
def test_ac7_bernstein_divisibility():
    with Timer(5.0):
        for text, (p, q) in CURVES.items():
            f = ypoly_from_string(text)
            b = Bouquet(tuple(newton_puiseux(f, 8)), poly=f)
            total = bernstein_multiple(b).total
            assert multiset_includes(roots_of(total), quasi_homogeneous_b_roots(p, q)), text
        f = ypoly_from_string("y^2 - x^2")
        b = Bouquet(tuple(newton_puiseux(f, 4)), poly=f)
        assert multiset_includes(roots_of(bernstein_multiple(b).total), NODE_B_ROOTS)


# ------------------------------------------------------------------ AC8


PERTURBED = {
    "y^2 - x^3 - x^4": (2, {(1, 2): F(3, 2)}),
    "y^2 - x^3 + 2*x^5": (2, {(1, 2): F(3, 2)}),
    "y^2 - x^3 - x^4 + x^6": (2, {(1, 2): F(3, 2)}),
    "y^3 - x^4 - x^5": (3, {(1, 2): F(4, 3), (1, 3): F(4, 3), (2, 3): F(4, 3)}),
}


@criterion("AC8", "topological invariance of the multiple")
def test_ac8_topological_invariance():
    with Timer(5.0):
        for text, (n, entries) in PERTURBED.items():
            f = ypoly_from_string(text)
            b = Bouquet(tuple(newton_puiseux(f, 8)), poly=f)
            from_branches = bernstein_multiple(b)
            bare = MultiplicityData.from_entries(n, [(i, j, m) for (i, j), m in entries.items()],
                                                 d=n)
            from_data = bernstein_multiple(bare)
            assert from_branches.total == from_data.total, text
            assert (from_branches.A, from_branches.B, from_branches.C) == \
                (from_data.A, from_data.B, from_data.C)


# ------------------------------------------------------------------ AC9


def _violates(M, i, j, k):
    vals = sorted((M[i][j], M[j][k], M[i][k]))
    return vals[0] != vals[1]


@criterion("AC9", "tree round trips and non-ultrametric rejection")
def test_ac9_tree_round_trips():
    rng = random.Random(99)
    with Timer(10.0):
        for _ in range(500):
            t = random_tree(rng, n_max=10)
            assert build_tree(reconstruct_multiplicities(t)) == t
        rejected = 0
        while rejected < 500:
            n = rng.randint(3, 10)
            M = [[F(0)] * n for _ in range(n)]
            for i in range(n):
                for j in range(i + 1, n):
                    M[i][j] = M[j][i] = F(rng.randint(0, 6), rng.randint(1, 3))
            if not any(_violates(M, i, j, k) for i in range(n) for j in range(i + 1, n)
                       for k in range(j + 1, n)):
                continue
            m = MultiplicityData(tuple(tuple(r) for r in M))
            with pytest.raises(NotUltrametric) as exc:
                build_tree(m)
            w = exc.value.witness
            assert w is not None and len(set(w)) == 3 and _violates(M, *w)
            rejected += 1


# ------------------------------------------------------------------ AC10


def _random_factor(rng):
    """An irreducible factor whose Puiseux roots are r zeta or r sqrt(k) zeta.

    y - c x^k, or y^p - c x^q (+ higher terms) with c a rational p-th power
    when p = 3 and any rational when p = 2.
    """
    kind = rng.randint(0, 2)
    if kind == 0:
        c = F(rng.choice([1, -1, 2, -2, 3]))
        k = rng.randint(1, 3)
        return f"(y - ({c})*x^{k})"
    p = rng.choice([2, 3])
    c = F(rng.choice([1, -1, 2, -2, 3] if p == 2 else [1, -1, 8, -8]))
    q = rng.choice([q for q in range(p + 1, p + 5) if sympy.gcd(p, q) == 1])
    tail = rng.choice(["", f" + x^{q + 1}", f" - {rng.randint(1, 3)}*x^{q + 2}"])
    return f"(y^{p} - ({c})*x^{q}{tail})"


@criterion("AC10", "Newton-Puiseux soundness and unsupported inputs")
def test_ac10_newton_puiseux_soundness():
    rng = random.Random(2024)
    x, y = sympy.symbols("x y")
    done = 0
    with Timer(30.0):
        while done < 50:
            factors = [_random_factor(rng) for _ in range(rng.randint(1, 3))]
            text = "*".join(factors)
            expr = sympy.expand(sympy.sympify(text.replace("^", "**")))
            if sympy.Poly(expr, y).degree() > 6:
                continue
            P = sympy.Poly(expr, y, x)
            # reduced only: equal factors would make the roots collide
            if sympy.degree(sympy.gcd(expr, sympy.diff(expr, y)), y) > 0:
                continue
            f = ypoly_from_string(str(expr).replace("**", "^"))
            order = F(3)
            roots = newton_puiseux(f, order)
            assert len(roots) == P.degree(y)
            assert product_matches(expr, roots, order), text
            done += 1
        with pytest.raises(UnsupportedExtension):
            newton_puiseux(ypoly_from_string("y^3 - x^2*y - x^3"), 4)
