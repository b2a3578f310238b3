import pytest

from qhsing import cli
from qhsing.graphcalc import (DecoratedGraph, Tail, graph_to_text)
from qhsing.symmetry import GroupElement, enumerate_group
from qhsing.wpoly import parse_polynomial


def run(capsys, *argv):
    status = cli.main(list(argv))
    return status, capsys.readouterr().out


class TestAnalyze:
    def test_basic(self, capsys):
        status, out = run(capsys, "analyze", "x^3+x*y^2")
        assert status == 0
        assert "weights 1/3,1/3" in out
        assert "milnor 4" in out
        assert "central_charge 2/3" in out
        assert "group_order 6" in out

    def test_bad_polynomial_is_domain_error(self, capsys):
        status, out = run(capsys, "analyze", "x^3 + +")
        assert status == 2
        assert out.startswith("error ")

    def test_invalid_weights_is_domain_error(self, capsys):
        status, _ = run(capsys, "analyze", "x^2")
        assert status == 2


class TestGroupAndSectors:
    def test_group_listing(self, capsys):
        status, out = run(capsys, "group", "x^4+x*y^2")
        assert status == 0
        assert "group_order 8" in out
        assert "grading_element 1/4,3/8" in out
        assert out.count("\nelement ") == 8

    def test_sector_table(self, capsys):
        status, out = run(capsys, "sectors", "x^3")
        assert status == 0
        assert "group_order 3" in out
        assert out.count("sector ") == 3


class TestGraph:
    def test_graph_report(self, capsys, tmp_path):
        W = parse_polynomial("x^3")
        group = enumerate_group(W)
        graph = DecoratedGraph(
            W=W, genera=(0,), edges=(),
            tails=(Tail(0, group[1]), Tail(0, group[1]), Tail(0, group[2])))
        path = tmp_path / "point.graph"
        path.write_text(graph_to_text(graph))
        status, out = run(capsys, "graph", "--graph", str(path))
        assert status == 0
        assert "cycle_degree 0" in out
        assert "admissible true" in out

    def test_missing_graph_flag(self, capsys):
        status, out = run(capsys, "graph", "x^3")
        assert status == 2


class TestMorseCommands:
    def test_perturb(self, capsys):
        status, out = run(capsys, "perturb", "x^3", "--b", "3")
        assert status == 0
        assert "mu 2" in out
        assert "strongly_regular true" in out

    def test_perturb_requires_b(self, capsys):
        status, _ = run(capsys, "perturb", "x^3")
        assert status == 2

    def test_perturb_zero_b_rejected(self, capsys):
        status, out = run(capsys, "perturb", "x^3", "--b", "0")
        assert status == 2
        assert "error" in out

    def test_walls(self, capsys):
        status, out = run(capsys, "walls", "x^3",
                          "--path", "3*exp(1j*pi*lam)")
        assert status == 0
        assert "n_crossings 1" in out
        lam = float(out.split("crossing lambda ")[1].split()[0])
        assert abs(lam - 1.0 / 3.0) < 1e-8


class TestSolitonCommand:
    def test_count_on_wall(self, capsys):
        status, out = run(capsys, "solitons", "x^3", "--b", "-3",
                          "--pair", "1", "2")
        assert status == 0
        assert "count 1" in out

    def test_off_wall_rejected(self, capsys):
        status, _ = run(capsys, "solitons", "x^3", "--b", "3",
                        "--pair", "1", "2")
        assert status == 2


class TestWallcrossCommand:
    def test_unit_vectors(self, capsys):
        status, out = run(capsys, "wallcross", "--mu", "2", "--r", "1",
                          "--direction", "left")
        assert status == 0
        lines = [l for l in out.splitlines() if l.startswith("cycle ")]
        assert lines == ["cycle 1 1", "cycle 1 0"]


class TestOutputFile:
    def test_out_flag_writes_file(self, capsys, tmp_path):
        path = tmp_path / "report.txt"
        status = cli.main(["analyze", "x^3", "--out", str(path)])
        assert status == 0
        assert "milnor 2" in path.read_text()
        assert capsys.readouterr().out == ""


class TestSelftest:
    def test_selftest_passes(self, capsys):
        status, out = run(capsys, "selftest")
        assert status == 0
        assert "ALL PASS" in out
        assert "FAIL " not in out
