import json
import logging

import pytest

from src.cli import main
from src.handlers import commands
from src.utils.power_series import FactorForm, Series
from src.workers.poincare_engine import poincare_from_graph
from src.workers.resolution_graph import ResolutionGraph

CUSP_P = FactorForm(1, [((2,), None, -1), ((3,), None, -1), ((6,), None, 1)])


@pytest.fixture(autouse=True)
def _quiet_logging(monkeypatch):
    # leave handlers to pytest; a stderr handler would outlive capsys
    monkeypatch.setattr(logging.getLogger(), "_singpoincare_configured", True, raising=False)


def _run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def test_poincare_text(capsys, jobs_dir):
    code, out, _ = _run(capsys, "poincare", jobs_dir / "cusp.json")
    assert code == 0
    assert "P = (1 - t^2)^-1 (1 - t^3)^-1 (1 - t^6)" in out
    assert "to degree 10: 1 + t^2 + t^3" in out


def test_truncate_flag_wins(capsys, jobs_dir):
    code, out, _ = _run(capsys, "poincare", jobs_dir / "cusp.json", "--truncate", 4)
    assert code == 0
    assert "to degree 4: 1 + t^2 + t^3 + t^4" in out


def test_poincare_json(capsys, jobs_dir):
    code, out, _ = _run(capsys, "poincare", jobs_dir / "cusp.json", "--format", "json")
    assert code == 0
    data = json.loads(out)
    assert data["command"] == "poincare"
    assert FactorForm.from_dict(data["factor_form"]) == CUSP_P


def test_alexander_and_zeta(capsys, jobs_dir):
    code, out, _ = _run(capsys, "alexander", jobs_dir / "cusp.json")
    assert code == 0
    assert "to degree 10: 1 - t + t^2" in out

    code, out, _ = _run(capsys, "zeta", jobs_dir / "cusp_line.json")
    assert code == 0
    assert "zeta = (1 - t^4)^-1 (1 - t^8)" in out
    assert "Delta = (1 - t1^3 t2)^-1 (1 - t1^6 t2^2)" in out


def test_resolve_dot(capsys, jobs_dir):
    code, out, _ = _run(capsys, "resolve", jobs_dir / "cusp.json", "--format", "dot")
    assert code == 0
    assert out.startswith("graph resolution {")
    assert '"E3" -- "arrow0" [dir=forward];' in out


def test_resolved_graph_round_trips_through_a_graph_job(capsys, jobs_dir, tmp_path):
    code, out, _ = _run(capsys, "resolve", jobs_dir / "cusp.json", "--format", "json")
    assert code == 0
    graph = json.loads(out)["graph"]
    g = ResolutionGraph.from_dict(graph)
    assert g.ideal_specs["C"] == {"E1": 2, "E2": 3, "E3": 6}
    assert poincare_from_graph(g, ["C"]) == CUSP_P

    job = tmp_path / "graph_job.json"
    job.write_text(json.dumps({"graph": graph, "ideals": ["C"]}))
    code, out, _ = _run(capsys, "poincare", job, "--format", "json")
    assert code == 0
    assert FactorForm.from_dict(json.loads(out)["factor_form"]) == CUSP_P


def test_equivariant_a1(capsys, jobs_dir):
    code, out, _ = _run(capsys, "equivariant", jobs_dir / "A1.json", "--format", "json")
    assert code == 0
    data = json.loads(out)
    assert data["d"] == 2
    assert FactorForm.from_dict(data["factor_form"]).render() == "(1 - [1/2] t^2)^-2"
    inv = {tuple(t["exponents"]): t["coefficient"] for t in data["invariant_part"]["terms"]}
    assert [inv[(2 * j,)] for j in range(6)] == [1, 3, 5, 7, 9, 11]


def test_ideal_command(capsys, jobs_dir):
    code, out, _ = _run(capsys, "ideal", jobs_dir / "ideals.json")
    assert code == 0
    assert "I1: k = (2, 3, 6)" in out
    assert "P_I = (1 - t^2)^-1 (1 - t^3)^-1" in out


def test_ideal_with_unused_curve_is_a_domain_error(capsys, jobs_dir):
    code, _, err = _run(capsys, "ideal", jobs_dir / "ideals_zero_curve.json")
    assert code == 2
    assert "error:" in err


@pytest.mark.parametrize("job", ["cusp.json", "cusp_e3.json", "hopf.json"])
def test_oracle_compare_matches(capsys, jobs_dir, job):
    code, out, _ = _run(capsys, "oracle", jobs_dir / job, "--compare")
    assert code == 0
    assert "MATCH" in out and "MISMATCH" not in out


def test_oracle_mismatch_exit_code(capsys, jobs_dir, monkeypatch):
    monkeypatch.setattr(commands, "poincare_of_filtration", lambda rc, spec: FactorForm.one(1))
    code, out, _ = _run(capsys, "oracle", jobs_dir / "cusp.json", "--compare")
    assert code == 3
    assert "MISMATCH at (2,): engine 0, oracle 1" in out


def test_oracle_needs_branches(capsys, jobs_dir):
    code, _, err = _run(capsys, "oracle", jobs_dir / "A1.json")
    assert code == 1
    assert "branches" in err


@pytest.mark.parametrize("argv", [
    ["poincare", "cusp.json", "--format", "dot"],
    ["poincare", "cusp.json", "--truncate", "-1"],
    ["integrate", "cusp.json"],
    ["poincare", "missing.json"],
])
def test_usage_errors(capsys, jobs_dir, argv):
    argv = [a if not a.endswith(".json") else str(jobs_dir / a) for a in argv]
    code, _, err = _run(capsys, *argv)
    assert code == 1
    assert "error:" in err


def test_malformed_job(capsys, tmp_path):
    job = tmp_path / "bad.json"
    job.write_text('{"branches": [\n  {"name": "C" "x_order": 2}]}')
    code, _, err = _run(capsys, "poincare", job)
    assert code == 1
    assert "line 2" in err


def test_graph_job_not_unimodular(capsys, jobs_dir, tmp_path):
    job = tmp_path / "a1_plane.json"
    job.write_text(json.dumps({"graph": {"components": [{"id": "E1", "self_intersection": -2}]},
                               "ideals": [[1]]}))
    code, _, err = _run(capsys, "poincare", job)
    assert code == 2
    assert "det" in err


@pytest.mark.parametrize("command, job, expected", [
    ("poincare", "smooth.json", "P = (1 - t)^-1"),
    ("poincare", "smooth.json", "to degree 5: 1 + t + t^2 + t^3 + t^4 + t^5"),
    ("poincare", "E8.json", "P = (1 - t^2)^-2 (1 - t^3)^-1 (1 - t^6)"),
    ("equivariant", "E8.json", "d = 1, H = 0"),
    ("equivariant", "A2.json", "d = 3, H = Z/3"),
    ("equivariant", "A2.json", "P^L = (1 - [1/3, 2/3] t^3)^-1 (1 - [2/3, 1/3] t^3)^-1"),
])
def test_sample_jobs(capsys, jobs_dir, command, job, expected):
    code, out, _ = _run(capsys, command, jobs_dir / job)
    assert code == 0
    assert expected in out


def test_branch_467_is_its_semigroup(capsys, jobs_dir):
    code, out, _ = _run(capsys, "poincare", jobs_dir / "branch_467.json", "--format", "json")
    assert code == 0
    s = Series.from_dict(json.loads(out)["series"])
    gaps = {1, 2, 3, 5, 7, 9, 11, 15}
    assert s.coefficients() == [0 if v in gaps else 1 for v in range(41)]


def test_a2_characters_have_order_three(capsys, jobs_dir):
    code, out, _ = _run(capsys, "equivariant", jobs_dir / "A2.json", "--format", "json")
    assert code == 0
    data = json.loads(out)
    assert {c["order"] for c in data["characters"].values()} == {3}
    assert data["characters"]["E1"]["values"] == ["1/3", "2/3"]
    inv = Series.from_dict(data["invariant_part"])
    assert inv.coefficients() == [1, 0, 1, 2, 1, 2, 3]
