import numpy as np
import pandas as pd
import pytest

from src.config.constants import TABLE1_CASES
from src.config.experiment import ExperimentConfig
from src.pipelines.experiment_pipeline import (
    CSV_COLUMNS,
    PDF_COLUMNS,
    add_snr_loss,
    cmd_pd_vs_snr,
    cmd_pdf,
    cmd_roc,
    evaluate_grid,
)
from src.pipelines.table_pipeline import _csv_rows, build_table1
from src.pipelines import validation_pipeline
from src.pipelines.validation_pipeline import (
    Check,
    check_distributions,
    check_montecarlo,
    check_pfa_round_trip,
    check_table,
    cmd_validate,
    report_anchors,
)


def _config(tmp_path, **overrides):
    data = {
        "experiment_id": "grid",
        "detectors": ["post_glrt", "pre_glrt", "square_law", "lrt"],
        "methods": ["series", "closed_form", "montecarlo"],
        "scenario": {"m_samples": 10, "n_antennas": 3, "snr_db": [-8.0, -4.0]},
        "pfa": [1e-2],
        "trials": 2_000,
        "seed": 99,
        "workers": 2,
        "output": str(tmp_path / "grid.csv"),
    }
    data.update(overrides)
    return ExperimentConfig.from_mapping(data)


class TestEvaluateGrid:
    def test_rows(self, tmp_path):
        df = evaluate_grid(_config(tmp_path))
        assert list(df.columns) == CSV_COLUMNS
        # 2 SNRs x (post_glrt series + 3 closed forms + 4 Monte-Carlo)
        assert len(df) == 2 * 8
        series = df[(df["detector"] == "post_glrt") & (df["method"] == "series")]
        assert (series["terms_used"] > 0).all()
        mc = df[df["method"] == "montecarlo"]
        assert (mc["ci_low"] <= mc["pd"]).all() and (mc["pd"] <= mc["ci_high"]).all()
        assert df["pd"].between(0, 1).all()

    def test_montecarlo_near_analytic(self, tmp_path):
        df = evaluate_grid(_config(tmp_path, trials=20_000, detectors=["post_glrt"], methods=["series", "montecarlo"]))
        pivot = df.pivot_table(index="snr_db", columns="method", values="pd")
        sigma = np.sqrt(pivot["series"] * (1 - pivot["series"]) / 20_000)
        assert (np.abs(pivot["montecarlo"] - pivot["series"]) <= 4 * sigma).all()

    def test_no_trials_skips_montecarlo(self, tmp_path):
        df = evaluate_grid(_config(tmp_path, trials=0))
        assert "montecarlo" not in set(df["method"])

    def test_family_rows(self, tmp_path):
        config = _config(tmp_path, trials=0, family={"name": "n_antennas", "values": [2, 4]})
        df = evaluate_grid(config)
        assert sorted(df["n_antennas"].unique()) == [2, 4]
        assert sorted(df["family_value"].unique()) == [2, 4]

    def test_pfa_family(self, tmp_path):
        config = _config(tmp_path, trials=0, family={"name": "pfa", "values": [1e-3, 1e-2]})
        df = evaluate_grid(config)
        assert sorted(df["pfa"].unique()) == [1e-3, 1e-2]


class TestCsvOutput:
    """Fixed-seed reruns must produce identical files."""

    def test_rerun_is_byte_identical(self, tmp_path):
        first = cmd_roc(_config(tmp_path, output=str(tmp_path / "a.csv"))).read_bytes()
        second = cmd_roc(_config(tmp_path, output=str(tmp_path / "b.csv"), workers=1)).read_bytes()
        assert first == second
        assert b"\r\n" not in first

    def test_header(self, tmp_path):
        path = cmd_roc(_config(tmp_path, trials=0))
        assert path.read_text(encoding="utf-8").splitlines()[0] == ",".join(CSV_COLUMNS)


class TestSnrLoss:
    def test_losses(self, tmp_path):
        config = _config(
            tmp_path,
            trials=0,
            pfa=[1e-4],
            scenario={"m_samples": 15, "n_antennas": 10, "snr_db": list(np.arange(-24.0, 1.0, 1.0))},
        )
        df = add_snr_loss(evaluate_grid(config), 0.8)
        losses = df.drop_duplicates(["detector", "method"]).set_index("detector")["snr_loss_db"]
        assert losses["lrt"] == pytest.approx(0.0, abs=1e-9)
        assert losses["post_glrt"] > 0
        assert losses["pre_glrt"] > 0

    def test_missed_target_leaves_cell_empty(self, tmp_path):
        df = evaluate_grid(_config(tmp_path, trials=0, scenario={"m_samples": 10, "n_antennas": 3, "snr_db": [-30.0, -29.0]}))
        assert add_snr_loss(df, 0.8)["snr_loss_db"].isna().all()

    def test_command_writes_losses(self, tmp_path):
        config = _config(
            tmp_path,
            trials=0,
            scenario={"m_samples": 15, "n_antennas": 10, "snr_db": list(np.arange(-24.0, 1.0, 2.0))},
        )
        df = pd.read_csv(cmd_pd_vs_snr(config))
        assert df["snr_loss_db"].notna().any()


class TestPdf:
    def test_rows(self, tmp_path):
        config = _config(
            tmp_path,
            trials=5_000,
            scenario={"m_samples": 15, "n_antennas": 10, "snr_db": [-8.0]},
            pdf={"bins": 20, "z_max": 30.0},
        )
        df = pd.read_csv(cmd_pdf(config))
        assert list(df.columns) == PDF_COLUMNS
        assert sorted(df["hypothesis"].unique()) == ["H0", "H1"]
        assert len(df) == 2 * 20


class TestTable:
    def test_first_case(self):
        table = build_table1(cases=TABLE1_CASES[:1])
        row = table.iloc[0]
        assert row["abs_error"] <= 1e-8
        assert row["pd_series_pct"] == pytest.approx(TABLE1_CASES[0][3], abs=0.05)
        assert row["quadrature_ms"] > 0 and row["series_ms"] > 0

    def test_csv_rows(self):
        rows = _csv_rows(build_table1(cases=TABLE1_CASES[:2]), "table1")
        assert list(rows.columns) == CSV_COLUMNS
        assert sorted(rows["method"].unique()) == ["quadrature", "series"]
        assert rows.loc[rows["method"] == "quadrature", "terms_used"].isna().all()


class TestValidation:
    def test_check_line(self):
        assert Check("x", True, 0.5, 1.0).line() == "PASS x measured=0.5 limit=1"

    def test_round_trip(self):
        assert check_pfa_round_trip().passed
        assert not check_pfa_round_trip(1e-6).passed

    def test_table_checks(self):
        assert all(c.passed for c in check_table(1e-9))

    def test_distribution_checks(self):
        assert all(c.passed for c in check_distributions())

    @pytest.mark.slow
    def test_suite_without_simulation(self):
        lines = []
        checks = cmd_validate(trials=0, include_foxh=False, emit=lines.append)
        assert all(c.passed for c in checks)
        assert any(line.startswith("INFO anchor") for line in lines)

    def test_every_snr_loss_anchor_is_reported(self):
        lines = []
        report_anchors(lines.append)
        losses = [line for line in lines if line.startswith("INFO snr_loss")]
        post = [line for line in losses if " post_glrt " in line]
        assert len(post) == 3
        assert all("computed=" in line for line in post)
        assert len(losses) == 9

    def test_montecarlo_covers_three_false_alarm_rates(self, monkeypatch):
        monkeypatch.setattr(validation_pipeline, "MIN_EXPECTED_EVENTS", 1)
        names = {c.name for c in check_montecarlo(10_000, seed=3, workers=1)}
        for m, n in ((22, 3), (15, 10)):
            for pfa in ("0.01", "0.001", "0.0001"):
                assert f"montecarlo_pfa_m{m}_n{n}_{pfa}" in names
                assert f"montecarlo_pd_m{m}_n{n}_{pfa}" in names

    def test_montecarlo_skips_rates_with_too_few_trials(self):
        names = {c.name for c in check_montecarlo(20_000, seed=3, workers=1)}
        assert "montecarlo_pfa_m22_n3_0.01" in names
        assert not any(name.endswith("_0.0001") for name in names)
