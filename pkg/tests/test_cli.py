import io
import json
import subprocess
import sys
from fractions import Fraction as F

import pytest


from curvemagic import bernstein_multiple, newton_puiseux
from curvemagic.bouquet import Bouquet
from curvemagic.cli import run
from curvemagic.jsonio import (bouquet_from_json, matrix_from_json, multiplicities_from_json,
                               spoly_to_json, tree_from_json, ypoly_from_json, ypoly_from_string)
from curvemagic.magic import magic_from_multiplicities
from curvemagic.tree import build_tree


def call(argv, doc=None, monkeypatch=None, tmp_path=None):
    """Run in-process; returns (exit code, stdout, stderr)."""
    if doc is not None:
        path = tmp_path / "in.json"
        path.write_text(doc if isinstance(doc, str) else json.dumps(doc))
        argv = [*argv, "--input", str(path)]
    out, err = io.StringIO(), io.StringIO()
    code = run(argv, out, err)
    return code, out.getvalue(), err.getvalue()


@pytest.fixture
def cli(tmp_path):
    return lambda argv, doc=None: call(argv, doc, tmp_path=tmp_path)


@pytest.mark.parametrize("argv,src,expected", [
    (["analyze"], "exrec.json", "exrec.analyze.out.json"),
    (["analyze", "--format", "text"], "exrec.json", "exrec.analyze.out.txt"),
    (["bernstein", "--parts"], "cusp.json", "cusp.bernstein.out.json"),
    (["solve-wf"], "cusp.json", "cusp.solve-wf.out.json"),
])
def test_golden(cli, golden, argv, src, expected):
    code, out, err = cli([*argv, "--input", str(golden / src)])
    assert code == 0, err
    assert out == (golden / expected).read_text()


def test_repeat_runs_identical(golden):
    cmd = [sys.executable, "-m", "curvemagic.cli", "analyze", "--input", str(golden / "exrec.json")]
    runs = {subprocess.run(cmd, capture_output=True, check=True,
                           env={"PYTHONHASHSEED": str(seed)}).stdout for seed in (0, 1, 2)}
    assert len(runs) == 1


@pytest.mark.parametrize("cmd", ["expand", "bernstein", "solve-w", "nabla"])
def test_repeat_runs_identical_in_process(cli, cmd):
    doc = {"polynomial": "(y^2 - x^3)*(y - x)", "w": "x^2*y"}
    outs = {cli([cmd, "--order", "3"], doc)[1] for _ in range(3)}
    assert len(outs) == 1 and outs != {""}


def test_bernstein_matches_module(cli):
    code, out, _ = cli(["bernstein"], {"polynomial": "y^2 - x^3"})
    f = ypoly_from_string("y^2 - x^3")
    bm = bernstein_multiple(Bouquet(tuple(newton_puiseux(f, 4)), poly=f))
    assert code == 0
    assert json.loads(out)["factors"] == spoly_to_json(bm.total)


def test_analyze_output_round_trips(cli, golden):
    rep = json.loads(cli(["analyze", "--input", str(golden / "exrec.json")])[1])
    m = multiplicities_from_json(rep["multiplicities"])
    assert tree_from_json(rep["tree"]) == build_tree(m)
    assert matrix_from_json(rep["matrix"]) == magic_from_multiplicities(m).rows
    assert [e["value"] for e in rep["spectrum"]["eigenvalues"]] == ["0", "2", "3", "7"]


def test_expand_output_round_trips(cli):
    code, out, _ = cli(["expand", "--order", "5"], {"polynomial": "y^2 - x^3 - x^4"})
    b = bouquet_from_json(json.loads(out))
    assert code == 0 and b.n == 2
    assert b.multiplicities.m(0, 1) == F(3, 2)


def test_solve_output_is_a_polynomial_identity(cli):
    doc = {"polynomial": "y^2 - x^3", "w": "x^2"}
    code, out, _ = cli(["solve-wf"], doc)
    rep = json.loads(out)
    u, v = ypoly_from_json(rep["u"]), ypoly_from_json(rep["v"])
    f, w = ypoly_from_string(doc["polynomial"]), ypoly_from_string(doc["w"])
    assert code == 0 and rep["exact"]
    assert u * f.diff_x() + v * f.diff_y() == w * f


@pytest.mark.parametrize("shape", [
    {"multiplicities": {"n": 2, "entries": [[1, 2, "3/2"]], "d": 2}},
    {"tree": {"n": 2, "rameaux": [{"set": [1, 2], "gamma": "3/2"}]}},
    {"char_exponents": [2, 3]},
    {"bouquet": {"polynomial": "y^2 - x^3"}},
])
def test_shapes_agree_on_bernstein(cli, shape):
    ref = json.loads(cli(["bernstein"], {"polynomial": "y^2 - x^3"})[1])["factors"]
    code, out, err = cli(["bernstein"], shape)
    assert code == 0, err
    assert json.loads(out)["factors"] == ref


@pytest.mark.parametrize("argv,doc,code,kind", [
    (["analyze"], "not json", 2, "InputError"),
    (["analyze"], [1, 2], 2, "InputError"),
    (["analyze"], {"polynomial": "y^2 - x^3", "tree": {}}, 2, "InputError"),
    (["analyze"], {"polynomial": "y^2 - sin(x)"}, 2, "InputError"),
    (["analyze", "--order", "-1"], {"polynomial": "y^2 - x^3"}, 2, "InputError"),
    (["nabla"], {"multiplicities": {"n": 2, "entries": [[1, 2, "1"]]}, "w": "1"}, 2, "BranchDataRequired"),
    (["solve-wf"], {"polynomial": "y^2 - x^3", "w": "y"}, 3, "NotZeroSum"),
    (["bernstein"], {"polynomial": "y^2 - x^2 + 1"}, 3, "NotDistinguished"),
    (["bernstein"], {"polynomial": "y^2 - x"}, 4, "NotTransverse"),
    (["bernstein"], {"multiplicities": {"n": 2, "entries": [[1, 2, "0"]]}}, 4, "NotThroughOrigin"),
    (["bernstein"], {"polynomial": "y^3 - x^2*y - x^3"}, 5, "UnsupportedExtension"),
    (["analyze"], {"multiplicities": {"n": 3, "entries": [[1, 2, "1"], [1, 3, "2"], [2, 3, "3"]]}},
     7, "NotUltrametric"),
])
def test_error_paths(cli, argv, doc, code, kind):
    got, out, err = cli(argv, doc)
    assert got == code
    assert out == ""
    rep = json.loads(err)
    assert rep["error_kind"] == kind and rep["message"]


def test_reduce_hint(cli):
    _, _, err = cli(["solve-wf"], {"polynomial": "y^2 - x^3", "w": "y"})
    assert "--reduce-mod-fy" in json.loads(err)["message"]
    code, out, _ = cli(["solve-wf", "--reduce-mod-fy"], {"polynomial": "y^2 - x^3", "w": "y"})
    rep = json.loads(out)
    assert code == 0 and rep["reduced_mod_fy"]
    f = ypoly_from_string("y^2 - x^3")
    u, v = ypoly_from_json(rep["u"]), ypoly_from_json(rep["v"])
    assert u * f.diff_x() + v * f.diff_y() == ypoly_from_string("y") * f


def test_witness(cli):
    doc = {"multiplicities": {"n": 3, "entries": [[1, 2, "1"], [1, 3, "2"], [2, 3, "3"]]}}
    assert sorted(json.loads(cli(["analyze"], doc)[2])["witness"]) == [1, 2, 3]


def test_precision_cap(cli, monkeypatch):
    doc = {"polynomial": "(y - x^3)*(y - x^3 - x^5)"}
    monkeypatch.setenv("CURVEMAGIC_MAX_ORDER", "2")
    code, _, err = cli(["analyze"], doc)
    rep = json.loads(err)
    assert code == 6 and rep["error_kind"] == "InsufficientPrecision"
    assert "branches 1 and 2" in rep["message"]
    monkeypatch.delenv("CURVEMAGIC_MAX_ORDER")
    code, out, _ = cli(["analyze"], doc)
    assert code == 0 and json.loads(out)["multiplicities"]["entries"] == [[1, 2, "5"]]


def test_bad_cap(cli, monkeypatch):
    monkeypatch.setenv("CURVEMAGIC_MAX_ORDER", "0")
    assert cli(["analyze"], {"polynomial": "y^2 - x^3"})[0] == 2


def test_argparse_errors():
    with pytest.raises(SystemExit) as exc:
        run(["frobnicate"], io.StringIO(), io.StringIO())
    assert exc.value.code == 2


def test_text_formats(cli):
    code, out, _ = cli(["bernstein", "--parts", "--format", "text"], {"polynomial": "y^2 - x^3"})
    lines = out.splitlines()
    assert code == 0
    assert lines[0].startswith("(s + 5/6) * (s + 1)^2")
    assert lines[3] == "B: (s + 5/6) * (s + 7/6)"
    out = cli(["expand", "--format", "text", "--order", "3"], {"polynomial": "(y - x)*(y + x)"})[1]
    assert out.splitlines()[0] == "order 3" and len(out.splitlines()) == 3
    out = cli(["solve-w", "--format", "text"], {"polynomial": "y^2 - x^3", "w": "x^2"})[1]
    assert out.startswith("u = ") and "residual valuation" in out
    out = cli(["nabla", "--format", "text"], {"polynomial": "y^2 - x^3", "w": "x^2"})[1]
    assert out.startswith("nabla w = ")


def test_weighted_analyze(cli):
    doc = {"branches": [{"terms": [["1", "1"]]}, {"terms": [["1", "-1"]]}], "mult": [2, 1]}
    rep = json.loads(cli(["analyze"], doc)[1])
    assert rep["weighted_matrix"]["rows"] == [["1", "-2"], ["-1", "2"]]
    assert [e["value"] for e in rep["weighted_spectrum"]["eigenvalues"]] == ["0", "3"]
