import dataclasses
import functools
import json
from functools import cached_property

import numpy as np
import pytest
from click.testing import CliRunner

from conftest import bundled
from torspin import cli, jet
from torspin import worldgeom as wg
from torspin.state import GeometryState
from torspin.suite import TAGS, run_suite, select_groups


class FlippedContortion(GeometryState):
    """Contortion with the sign of its last term flipped."""

    @cached_property
    def conn(self):
        c = wg.world_connection(self.metric, self.scenario.torsion.jets(self.point))
        t = c.torsion_low
        k_low = t - np.transpose(t, (2, 0, 1, 3)) - np.transpose(t, (1, 2, 0, 3))
        k = jet.einsum("mns,sl->mnl", k_low, c.ginv)
        g = c.christoffel + k
        return dataclasses.replace(c, contortion=k, gamma=g, gamma_sym=0.5 * (g + np.swapaxes(g, 0, 1)))


def _invoke(*args):
    return CliRunner().invoke(cli.main, [str(a) for a in args])


def test_flat_trivial_passes():
    r = _invoke("check", "flat-trivial")
    assert r.exit_code == 0, r.output
    assert "0 failed" in r.output


def test_json_schema(tmp_path):
    out = tmp_path / "report.json"
    r = _invoke("check", "flat-constant-torsion", "--points", 2, "--json", out)
    assert r.exit_code == 0, r.output
    rows = json.loads(out.read_text())
    assert rows
    for row in rows:
        assert set(row) == {"check", "eq", "point", "residual", "tol", "pass"}
        assert row["eq"] in TAGS
        assert len(row["point"]) == 4
        assert row["pass"] is True and row["residual"] <= row["tol"]


def test_report_is_byte_identical_for_same_seed(tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    for path in (a, b):
        r = _invoke("check", "conformal-polynomial-torsion", "--seed", 11, "--points", 2,
                    "--only", "connection,soldering", "--json", path)
        assert r.exit_code == 0, r.output
    assert a.read_bytes() == b.read_bytes()
    c = tmp_path / "c.json"
    _invoke("check", "conformal-polynomial-torsion", "--seed", 12, "--points", 2,
            "--only", "connection,soldering", "--json", c)
    assert c.read_bytes() != a.read_bytes()


def test_workers_give_the_same_report(tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    _invoke("check", "flrw-torsion", "--points", 3, "--only", "curvature", "--json", a)
    r = _invoke("check", "flrw-torsion", "--points", 3, "--only", "curvature", "--workers", 2, "--json", b)
    assert r.exit_code == 0, r.output
    assert a.read_bytes() == b.read_bytes()


def test_flipped_contortion_fails_named_checks():
    report = run_suite(bundled("flat-constant-torsion"), factory=FlippedContortion)
    assert not report.passed
    failed = {e.check for e in report.failures}
    assert "world.connection.symmetric_metricity" in failed
    assert "spin_affinity.constancy.soldering_constancy" in failed
    assert "world.connection.contortion_oracle" in failed


def test_flipped_contortion_exits_with_failure(monkeypatch):
    monkeypatch.setattr(cli, "run_suite", functools.partial(run_suite, factory=FlippedContortion))
    r = _invoke("check", "flat-constant-torsion", "--points", 1)
    assert r.exit_code == 1
    assert "FAIL world.connection.symmetric_metricity" in r.output


@pytest.mark.parametrize("args", [
    ("check", "no-such-file.scn"),
    ("check", "flat-trivial", "--only", "nonsense"),
    ("gauge", "no-such-file.scn"),
    ("decompose", "flat-trivial", "--point", "1,2,3"),
    ("decompose", "flat-trivial", "--point", "a,b,c,d"),
    ("counts", "--samples", 10),
])
def test_input_errors_exit_two(args):
    assert _invoke(*args).exit_code == 2


def test_invalid_scenario_exits_two(tmp_path):
    p = tmp_path / "bad.scn"
    p.write_text("[spin_torsion]\nb0 = i\n[points]\npoint = 0,0,0,0\n")
    r = _invoke("check", p)
    assert r.exit_code == 2
    assert "spin_torsion.b0" in r.output


def test_gauge_command_runs_only_gauge_checks(tmp_path):
    out = tmp_path / "g.json"
    r = _invoke("gauge", "flat-trivial", "--points", 1, "--json", out)
    assert r.exit_code == 0, r.output
    assert {row["eq"] for row in json.loads(out.read_text())} == {"gauge"}


def test_decompose_prints_components():
    r = _invoke("decompose", "flrw-torsion", "--point", "0.1,0.2,-0.1,0.3")
    assert r.exit_code == 0, r.output
    for key in ("w_ABCD[0000]", "w_A'B'CD[0000]", "Psi[0000]", "xi[00]", "kappa =", "F[01]"):
        assert key in r.output


def test_scenarios_command_lists_bundled_files():
    r = _invoke("scenarios")
    assert r.exit_code == 0
    assert "flrw-torsion" in r.output


def test_only_filter_selects_groups():
    assert {g.tag for g in select_groups(["gauge", "bianchi"])} == {"gauge", "bianchi"}
    assert [g.name for g in select_groups(["world.connection"])] == ["world.connection"]
    with pytest.raises(ValueError):
        select_groups(["eq4"])


def test_counts_command():
    r = _invoke("counts", "--seed", 0)
    assert r.exit_code == 0, r.output
    assert "FAIL" not in r.output
