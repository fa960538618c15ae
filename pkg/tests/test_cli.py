import pandas as pd
import pytest
import yaml

from src.cli.commands import create_parser, main
from src.pipelines.experiment_pipeline import CSV_COLUMNS


def _write_config(tmp_path):
    path = tmp_path / "roc.yaml"
    data = {
        "experiment_id": "cli_roc",
        "detectors": ["post_glrt", "lrt"],
        "methods": ["series", "closed_form", "montecarlo"],
        "scenario": {"m_samples": 22, "n_antennas": 3, "snr_db": [-7.9]},
        "pfa": [1e-3, 1e-2],
        "trials": 1_000,
        "seed": 5,
    }
    path.write_text(yaml.safe_dump(data), encoding="utf-8")
    return path


def _exit_code(argv):
    with pytest.raises(SystemExit) as excinfo:
        main(argv)
    return excinfo.value.code


class TestParser:
    def test_overrides_parsed(self):
        args = create_parser().parse_args(["roc", "--config", "c.yaml", "--seed", "3", "--trials", "10"])
        assert (args.command, args.config, args.seed, args.trials) == ("roc", "c.yaml", 3, 10)

    def test_roc_needs_config(self):
        with pytest.raises(SystemExit):
            create_parser().parse_args(["roc"])


class TestMain:
    def test_no_command(self):
        assert _exit_code([]) == 1

    def test_roc(self, tmp_path, capsys):
        out = tmp_path / "roc.csv"
        code = _exit_code(["roc", "--config", str(_write_config(tmp_path)), "--out", str(out), "--trials", "0"])
        assert code == 0
        assert "written to" in capsys.readouterr().out
        df = pd.read_csv(out)
        assert list(df.columns) == CSV_COLUMNS
        assert set(df["method"]) == {"series", "closed_form"}

    def test_seed_override_changes_montecarlo(self, tmp_path):
        config = str(_write_config(tmp_path))
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        assert _exit_code(["roc", "--config", config, "--out", str(a), "--seed", "1"]) == 0
        assert _exit_code(["roc", "--config", config, "--out", str(b), "--seed", "2"]) == 0
        assert a.read_bytes() != b.read_bytes()

    def test_missing_config(self, tmp_path):
        assert _exit_code(["roc", "--config", str(tmp_path / "absent.yaml")]) == 1

    def test_invalid_config(self, tmp_path):
        path = tmp_path / "bad.yaml"
        path.write_text("experiment_id: bad\nscenario: {m_samples: 1, n_antennas: 1, snr_db: [0.0]}\n", encoding="utf-8")
        assert _exit_code(["roc", "--config", str(path)]) == 1

    def test_general_foxh_problem(self, tmp_path, capsys):
        path = tmp_path / "h.yaml"
        path.write_text("kind: general\nx: [2.0]\ndelta: [0.0]\ndmat: [[1.0]]\n", encoding="utf-8")
        assert _exit_code(["fox-h", "--config", str(path)]) == 0
        assert "H = 0.13533528" in capsys.readouterr().out

    @pytest.mark.slow
    def test_foxh_detection_problem(self, capsys):
        assert _exit_code(["fox-h", "--m", "50", "--pfa", "1e-6", "--upsilon-db", "-5"]) == 0
        assert "PD (Fox H)" in capsys.readouterr().out
