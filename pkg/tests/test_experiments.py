import json
import math

import numpy as np
import pytest

from covrad.cli import main as cli_main
from covrad.errors import BudgetExceededError
from covrad.experiments import (
    StudyConfig,
    check_budget,
    circle_expectation_oracle,
    dump_f_grid,
    load_bands,
    run_arcsine_study,
    run_epsnet_study,
    run_expectation_study,
    run_random_vs_structured,
    run_tail_study,
    run_zn_study,
)
from covrad.sampler import SeedSpec
from covrad.spaces import Cube, IntervalUniform, Sphere


class TestStudyConfig:
    def test_valid(self):
        StudyConfig(domain=IntervalUniform(), n_grid=[10, 100], trials=5)

    def test_grid_must_increase(self):
        with pytest.raises(ValueError):
            StudyConfig(domain=IntervalUniform(), n_grid=[100, 10], trials=5)
        with pytest.raises(ValueError):
            StudyConfig(domain=IntervalUniform(), n_grid=[10, 10], trials=5)

    def test_trials_minimum(self):
        with pytest.raises(ValueError):
            StudyConfig(domain=IntervalUniform(), n_grid=[10], trials=1)

    def test_eta_positive(self):
        with pytest.raises(ValueError):
            StudyConfig(domain=IntervalUniform(), n_grid=[10], trials=5, probe_eta=0.0)


class TestCircleOracle:
    def test_single_point(self):
        assert circle_expectation_oracle(1, 10.0) == 5.0

    def test_two_points(self):
        # E[max gap] of 2 points on circumference L is 3L/4; rho is half of it
        assert circle_expectation_oracle(2, 8.0) == pytest.approx(3.0, rel=1e-12)

    def test_two_points_monte_carlo(self):
        rng = np.random.default_rng(0)
        total = 0.0
        trials = 200_000
        for g in rng.random(trials):
            total += max(g, 1.0 - g) / 2.0
        assert circle_expectation_oracle(2, 1.0) == pytest.approx(
            total / trials, rel=0.01
        )

    def test_harmonic_form(self):
        h5 = sum(1.0 / k for k in range(1, 6))
        assert circle_expectation_oracle(5, 2 * math.pi) == pytest.approx(
            math.pi * h5 / 5.0, rel=1e-12
        )

    def test_validation(self):
        with pytest.raises(ValueError):
            circle_expectation_oracle(0)


class TestBudget:
    def test_refusal(self):
        config = StudyConfig(domain=Sphere(2), n_grid=[10**7], trials=1000)
        with pytest.raises(BudgetExceededError):
            check_budget(config)

    def test_force_overrides(self):
        config = StudyConfig(domain=Sphere(2), n_grid=[10**7], trials=1000, force=True)
        assert check_budget(config) > 1e10


class TestExpectationStudy:
    def test_rows_and_determinism(self, tmp_path):
        out1, out2 = tmp_path / "a.csv", tmp_path / "b.csv"
        cfg = lambda out: StudyConfig(
            domain=IntervalUniform(), n_grid=[50, 200], trials=20, out=str(out)
        )
        rows = run_expectation_study(cfg(out1))
        run_expectation_study(cfg(out2))
        assert out1.read_bytes() == out2.read_bytes()
        assert [r.n for r in rows] == [50, 200]
        for r in rows:
            assert r.mean_rho_p_lower <= r.mean_rho_p_upper
            assert r.ci_half_width >= 0
            assert r.target == 0.5
        meta = json.loads((tmp_path / "a.csv.meta.jsonl").read_text())
        assert meta["config"]["n_grid"] == [50, 200]
        assert "Philox" in meta["generator"]

    def test_sandwich_width_scales_with_eta(self):
        def width(eta):
            cfg = StudyConfig(domain=Cube(2), n_grid=[200], trials=5, probe_eta=eta)
            row = run_expectation_study(cfg)[0]
            return row.mean_rho_p_upper - row.mean_rho_p_lower

        w1, w2 = width(0.2), width(0.1)
        assert w2 == pytest.approx(w1 / 2.0, rel=0.1)

    def test_circle_oracle_guard(self):
        # natural-log rescaling: the Monte Carlo mean must match the exact
        # finite-N expectation; a log-base change would break this badly
        n, trials = 1000, 300
        cfg = StudyConfig(domain=Sphere(1), n_grid=[n], trials=trials)
        row = run_expectation_study(cfg)[0]
        oracle = circle_expectation_oracle(n)
        assert row.mean_rho_p_lower == pytest.approx(oracle, rel=0.05)
        assert abs(row.rescaled / (n / math.log(n)) - oracle) <= 3 * row.ci_half_width

    def test_p2_is_square_scale(self):
        # rescaled(p=2) tracks rescaled(p=1)^2 for the interval
        base = StudyConfig(domain=IntervalUniform(), n_grid=[2000], trials=400)
        sq = StudyConfig(domain=IntervalUniform(), n_grid=[2000], trials=400, p=2.0)
        r1 = run_expectation_study(base)[0]
        r2 = run_expectation_study(sq)[0]
        assert r2.rescaled == pytest.approx(r1.rescaled**2, rel=0.1)

    def test_no_target_for_cantor(self):
        from covrad.spaces import Cantor

        cfg = StudyConfig(domain=Cantor(30), n_grid=[100], trials=5)
        assert run_expectation_study(cfg)[0].target is None


class TestTailStudy:
    def test_extreme_thresholds(self):
        domain = IntervalUniform()
        rows = run_tail_study(domain, 100, 50, [0.0, 0.5, domain.diameter + 1.0])
        assert rows[0].prob_lower_exceeds == 1.0
        assert rows[-1].prob_upper_exceeds == 0.0

    def test_band_from_pilot(self):
        band = load_bands()["bands"]["tail_interval"]
        pilot = band["pilot"]
        n = pilot["N"]
        t = pilot["threshold_mult"] * math.log(n) / n
        rows = run_tail_study(IntervalUniform(), n, 200, [t],
                              master_seed=pilot["master_seed"])
        assert rows[0].prob_upper_exceeds <= band["max_prob"]

    def test_threshold_validation(self):
        with pytest.raises(ValueError):
            run_tail_study(IntervalUniform(), 100, 10, [0.2, 0.1])


class TestZnStudy:
    def test_schema(self):
        rows = run_zn_study(1, [100], 2, 0)
        assert rows[0].trials == 2
        assert 0.0 <= rows[0].frac_within_01 <= rows[0].frac_within_02 <= 1.0

    def test_d2_band_from_pilot(self):
        band = load_bands()["bands"]["zn_sphere2"]
        rows = run_zn_study(2, [100], 30, band["pilot"]["master_seed"])
        lo, hi = band["mean_range"]
        assert lo < rows[0].mean < hi

    def test_d_validation(self):
        with pytest.raises(ValueError):
            run_zn_study(3, [100], 5)


class TestArcsineStudy:
    def test_rescaling_exponents(self):
        rows = run_arcsine_study(2.0, "right_edge", [100], 10, 0)
        assert rows[0].rescaled == pytest.approx(rows[0].mean_rho_p_lower * 100**2)
        rows = run_arcsine_study(1.0, "right_edge", [100], 10, 0)
        assert rows[0].rescaled == pytest.approx(
            rows[0].mean_rho_p_lower * 100**1.5 / math.log(100)
        )
        rows = run_arcsine_study(1.0, "interior", [100], 10, 0)
        assert rows[0].rescaled == pytest.approx(
            rows[0].mean_rho_p_lower * 100 / math.log(100)
        )


class TestVersusStudy:
    def test_exact_grid_value(self):
        rows = run_random_vs_structured(1, [100], 5, 0)
        assert rows[0]["grid_rho"] == pytest.approx(1.0 / 200.0)
        rows = run_random_vs_structured(2, [100], 5, 0)
        assert rows[0]["grid_rho"] == pytest.approx(math.sqrt(2.0) / 20.0)

    def test_ratio_above_one(self):
        band = load_bands()["bands"]["versus_d1"]
        rows = run_random_vs_structured(1, [100], 30, band["pilot"]["master_seed"])
        assert rows[0]["ratio"] > band["min_ratio"]

    def test_d_validation(self):
        with pytest.raises(ValueError):
            run_random_vs_structured(4, [100], 5)


class TestEpsNetStudy:
    def test_single_trial_fraction(self):
        rows = run_epsnet_study(Sphere(1), [100], 1, 3.0, 0)
        assert rows[0]["yes_fraction"] in (0.0, 1.0)

    def test_c_mult_validation(self):
        with pytest.raises(ValueError):
            run_epsnet_study(Sphere(1), [100], 5, 0.0, 0)


class TestFGrid:
    def test_rows(self, tmp_path):
        out = tmp_path / "f.csv"
        rows = dump_f_grid([100, 1000], [10.0, 50.0], [2, 5, 60], str(out))
        # m=60 is filtered out (violates m <= n)
        assert all(r["m"] <= r["n"] for r in rows)
        assert len(rows) == 8
        header = out.read_text().splitlines()[0]
        assert header == "N,n,m,f_dp,f_lower_bound"


class TestCli:
    def test_constants(self, capsys):
        assert cli_main(["constants"]) == 0
        out = capsys.readouterr().out
        assert "3.141592653590" in out

    def test_study_runs(self, tmp_path, capsys):
        out = tmp_path / "s.csv"
        rc = cli_main(["study", "--domain", "interval", "--n-grid", "50", "200",
                       "--trials", "30", "--out", str(out)])
        assert rc == 0
        assert out.exists() and out.with_suffix(".csv.meta.jsonl").exists()

    def test_config_file_with_flag_override(self, tmp_path, capsys):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({"n_grid": [50], "trials": 40, "domain": "interval"}))
        rc = cli_main(["study", "--config", str(cfg), "--trials", "35"])
        assert rc == 0
        assert "N=50" in capsys.readouterr().out

    def test_invalid_config_exit_code(self, capsys):
        assert cli_main(["study", "--domain", "interval", "--n-grid", "200", "50"]) == 1

    def test_missing_domain_file_exit_code(self, capsys):
        assert cli_main(["study", "--domain", "no_such_domain.json"]) == 1

    def test_budget_exit_code(self, capsys):
        rc = cli_main(["study", "--domain", "sphere2", "--n-grid", "10000000",
                       "--trials", "1000"])
        assert rc == 2

    def test_fgrid(self, capsys):
        assert cli_main(["fgrid", "--N", "100", "--n", "10", "--m", "2", "5"]) == 0
        assert "f=" in capsys.readouterr().out

    def test_domain_json_file(self, tmp_path, capsys):
        doc = tmp_path / "domain.json"
        doc.write_text(json.dumps({"kind": "Cube", "params": {"d": 2}}))
        rc = cli_main(["study", "--domain", str(doc), "--n-grid", "100",
                       "--trials", "5"])
        assert rc == 0

    def test_tail_zn_arcsine_epsnet_versus(self, capsys):
        assert cli_main(["tail", "--domain", "interval", "--n", "100",
                        "--trials", "20"]) == 0
        assert cli_main(["zn", "--d", "1", "--n-grid", "100", "--trials", "10"]) == 0
        assert cli_main(["arcsine", "--a", "2", "--n-grid", "100", "--trials", "10"]) == 0
        assert cli_main(["epsnet", "--domain", "circle", "--n-grid", "100",
                        "--trials", "5", "--c-mult", "3"]) == 0
        assert cli_main(["versus", "--d", "1", "--n-grid", "100", "--trials", "5"]) == 0


class TestBandsFile:
    def test_versioned_with_seeds(self):
        doc = load_bands()
        assert doc["version"] >= 1
        for name, band in doc["bands"].items():
            assert "pilot" in band, name
            assert "master_seed" in band["pilot"], name
