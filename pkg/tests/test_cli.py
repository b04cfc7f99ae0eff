import math

import numpy as np
import pytest

from scaledlattice import cli
from scaledlattice.cli import ConvergenceRecord, emit_csv, fit_slope, read_csv, run_convergence
from scaledlattice.errors import ComputationError
from scaledlattice.testbed import parse_spec_text

F1 = "family=f1\nsigma={sigma}\nmu=3,-3\ns=2,2\n"
F2 = "family=f2\nsigma={sigma}\nd=2\n"


@pytest.fixture
def spec_file(tmp_path):
    def make(text):
        path = tmp_path / "spec.txt"
        path.write_text(text)
        return str(path)

    return make


class TestFitSlope:
    def test_power_law(self):
        recs = [ConvergenceRecord(2 ** m, 1.0, 0.0, 2.0 ** (-2 * m)) for m in range(4, 12)]
        fit = fit_slope(recs)
        assert fit.slope == pytest.approx(-2.0, abs=1e-12)
        assert fit.r2 == pytest.approx(1.0)
        assert fit.range == (16, 2048)

    def test_intercept(self):
        recs = [ConvergenceRecord(2 ** m, 1.0, 0.0, 3.0 * 2.0 ** -m) for m in range(4, 10)]
        fit = fit_slope(recs)
        assert fit.slope == pytest.approx(-1.0, abs=1e-12)
        assert fit.intercept == pytest.approx(math.log2(3.0), abs=1e-12)

    def test_zero_errors_dropped(self):
        recs = [ConvergenceRecord(2 ** m, 1.0, 0.0, 0.0 if m == 5 else 2.0 ** -m) for m in range(4, 10)]
        assert fit_slope(recs).slope == pytest.approx(-1.0)

    def test_too_few(self):
        recs = [ConvergenceRecord(2 ** m, 1.0, 0.0, 0.0) for m in range(4, 10)]
        with pytest.raises(ComputationError):
            fit_slope(recs)


class TestCsv:
    def test_empty(self, tmp_path):
        path = tmp_path / "e.csv"
        emit_csv([], path)
        assert path.read_bytes() == b"n,a,estimate,rel_error,trunc,cubature\n"

    def test_round_trip(self, tmp_path, rng):
        recs = [ConvergenceRecord(2 ** m, *rng.normal(size=5).tolist()) for m in range(3)]
        recs.append(ConvergenceRecord(8, 0.1, 1 / 3, None, None, None))
        path = tmp_path / "r.csv"
        emit_csv(recs, path)
        assert read_csv(path) == recs
        assert b"\r" not in path.read_bytes()


class TestConvergence:
    def test_f1_alpha2_slope(self):
        recs = run_convergence(parse_spec_text(F1.format(sigma=1.6)), None, 8, 16)
        assert fit_slope(recs).slope <= -1.65

    def test_prefix_stability(self):
        spec = parse_spec_text(F2.format(sigma=1.6))
        short = run_convergence(spec, None, 4, 8)
        long = run_convergence(spec, None, 4, 10)
        assert long[: len(short)] == short

    @pytest.mark.parametrize("sigma", [0.0, 1.6])
    def test_decomposition_consistent(self, sigma):
        spec = parse_spec_text(F2.format(sigma=sigma))
        exact = 2.0 ** 2 if sigma == 0 else None
        for r in run_convergence(spec, None, 4, 10, decompose=True):
            total = r.truncation_part + r.cubature_part
            abs_err = r.rel_error * (exact or abs(r.estimate / (1 + r.rel_error)))
            assert abs(total - abs_err) <= total + 1e-15
            assert abs_err <= total * (1 + 1e-9) + 1e-15

    def test_sigma0_is_mostly_truncation(self):
        spec = parse_spec_text(F2.format(sigma=0.0))
        for r in run_convergence(spec, None, 6, 10, decompose=True):
            mass_outside = 4.0 * (1 - math.erf(r.a / math.sqrt(2)) ** 2) / 4.0
            assert r.truncation_part == pytest.approx(4.0 * mass_outside, rel=1e-8)

    def test_m_min(self):
        with pytest.raises(Exception):
            run_convergence(parse_spec_text(F2.format(sigma=1.6)), None, 0, 3)


class TestMain:
    def test_integrate_line(self, spec_file, capsys):
        assert cli.main(["integrate", "--spec", spec_file(F2.format(sigma=1.0)), "--n", "16384"]) == 0
        n, a, est = capsys.readouterr().out.split()
        assert int(n) == 16384
        assert abs(float(est) - (1 + math.sqrt(2 / math.pi)) ** 2) <= 1e-3

    def test_integrate_bounds(self, spec_file, capsys):
        assert cli.main(["integrate", "--spec", spec_file(F2.format(sigma=1.6)), "--n", "1024", "--bounds"]) == 0
        fields = capsys.readouterr().out.split()
        assert len(fields) == 6
        assert all(float(v) >= 0 for v in fields[3:])

    def test_convergence_files(self, spec_file, tmp_path, capsys):
        out = tmp_path / "conv.csv"
        args = ["convergence", "--spec", spec_file(F1.format(sigma=1.6)), "--m-min", "6", "--m-max", "10",
                "--out", str(out), "--plot", "--decompose"]
        assert cli.main(args) == 0
        first = out.read_bytes()
        assert cli.main(args) == 0
        assert out.read_bytes() == first
        assert len(read_csv(out)) == 5
        assert (tmp_path / "conv.gp").read_text().startswith("set datafile separator")
        assert "slope=" in capsys.readouterr().err

    def test_cbc_and_wce(self, tmp_path, capsys):
        gv = tmp_path / "gv.txt"
        assert cli.main(["cbc", "--n", "64", "--d", "2", "--alpha", "1", "--out", str(gv)]) == 0
        assert gv.read_text().split()[:2] == ["64", "2"]
        assert cli.main(["wce", "--gv", str(gv), "--alpha", "1", "--hmax", "50"]) == 0
        n, closed, brute, tail = capsys.readouterr().out.split()
        assert float(brute) <= float(closed)

    def test_wce_unit(self, tmp_path, capsys):
        gv = tmp_path / "gv.txt"
        gv.write_text("1 1 1\n")
        assert cli.main(["wce", "--gv", str(gv), "--alpha", "1"]) == 0
        assert float(capsys.readouterr().out.split()[1]) == pytest.approx(math.sqrt(1 / 12), abs=1e-12)

    @pytest.mark.parametrize("method", ["gh-tensor", "smolyak"])
    def test_baseline(self, spec_file, method, capsys):
        assert cli.main(["baseline", "--method", method, "--level", "3", "--spec", spec_file(F2.format(sigma=2.0))]) == 0
        nodes, est, rel = capsys.readouterr().out.split()
        assert float(rel) <= 1e-12

    def test_domain_error_exit(self, spec_file, capsys):
        assert cli.main(["integrate", "--spec", spec_file("family=f7\nsigma=1\n"), "--n", "8"]) == 2
        assert capsys.readouterr().err.startswith("error:")

    def test_resource_error_exit(self):
        assert cli.main(["wce", "--n", str(2 ** 41), "--alpha", "1"]) == 3

    def test_computation_error_exit(self, monkeypatch, spec_file):
        def boom(*a, **k):
            raise ComputationError("non-finite")

        monkeypatch.setattr(cli, "integrate", boom)
        assert cli.main(["integrate", "--spec", spec_file(F2.format(sigma=1.0)), "--n", "8"]) == 4

    def test_missing_file(self):
        assert cli.main(["integrate", "--spec", "/nonexistent/spec", "--n", "8"]) == 2
