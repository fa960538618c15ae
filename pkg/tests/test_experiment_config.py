from pathlib import Path

import pytest
import yaml

from src.config.experiment import ExperimentConfig, FamilyConfig, FoxHConfig, PdfConfig, ScenarioConfig
from src.config.settings import CONFIG_DIR, OUTPUT_DIR
from src.utils.custom_exception import ConfigError


def _mapping(**overrides):
    data = {
        "experiment_id": "unit",
        "detectors": ["post_glrt", "lrt"],
        "methods": ["series", "closed_form"],
        "scenario": {"m_samples": 10, "n_antennas": 2, "snr_db": [-10.0, -5.0]},
        "pfa": [1e-3],
    }
    data.update(overrides)
    return data


def _field(excinfo) -> str:
    return excinfo.value.field


class TestScenarioConfig:
    def test_snr_converted_once(self):
        cfg = ScenarioConfig(m_samples=10, n_antennas=2, snr_db=[-10.0, 0.0])
        assert cfg.snr_linear == pytest.approx((0.1, 1.0))

    def test_scenarios(self):
        cfg = ScenarioConfig(m_samples=10, n_antennas=2, snr_db=[-10.0])
        [(snr, sc)] = cfg.scenarios(seed=3, n_antennas=5)
        assert snr == pytest.approx(0.1)
        assert (sc.n_antennas, sc.m_samples, sc.seed) == (5, 10, 3)

    def test_explicit_means(self):
        cfg = ScenarioConfig(m_samples=10, n_antennas=2, mu_x=[1.0, 0.0], mu_y=[0.0, 0.0])
        [(snr, sc)] = cfg.scenarios(seed=1)
        assert snr == pytest.approx(0.25)
        assert sc.mu_x == (1.0, 0.0)

    def test_means_and_grid_conflict(self):
        with pytest.raises(ConfigError) as excinfo:
            ScenarioConfig(m_samples=10, n_antennas=1, snr_db=[0.0], mu_x=[1.0], mu_y=[0.0])
        assert _field(excinfo) == "scenario"

    @pytest.mark.parametrize(
        "kwargs,field",
        [
            (dict(m_samples=1, n_antennas=2, snr_db=[0.0]), "scenario.m_samples"),
            (dict(m_samples=10, n_antennas=0, snr_db=[0.0]), "scenario.n_antennas"),
            (dict(m_samples=10, n_antennas=2, sigma_sq=0.0, snr_db=[0.0]), "scenario.sigma_sq"),
            (dict(m_samples=10, n_antennas=2), "scenario.snr_db"),
            (dict(m_samples=10.5, n_antennas=2, snr_db=[0.0]), "scenario.m_samples"),
            (dict(m_samples=10, n_antennas=2, snr_db=["loud"]), "scenario.snr_db"),
        ],
    )
    def test_invalid(self, kwargs, field):
        with pytest.raises(ConfigError) as excinfo:
            ScenarioConfig(**kwargs)
        assert _field(excinfo) == field


class TestFamilyAndPdf:
    def test_none_drops_values(self):
        assert FamilyConfig("none", [1, 2]).values == ()

    def test_integer_family(self):
        assert FamilyConfig("n_antennas", [10, 14]).values == (10, 14)

    @pytest.mark.parametrize(
        "name,values",
        [("beams", [1]), ("pfa", [1.5]), ("m_samples", [1]), ("n_antennas", []), ("n_antennas", [0])],
    )
    def test_invalid(self, name, values):
        with pytest.raises(ConfigError):
            FamilyConfig(name, values)

    def test_pdf_bins(self):
        with pytest.raises(ConfigError) as excinfo:
            PdfConfig(bins=0)
        assert _field(excinfo) == "pdf.bins"


class TestExperimentConfig:
    def test_from_mapping(self):
        config = ExperimentConfig.from_mapping(_mapping())
        assert config.detectors == ("post_glrt", "lrt")
        assert config.family.name == "none"
        assert config.output_path == OUTPUT_DIR / "unit.csv"

    @pytest.mark.parametrize(
        "overrides,field",
        [
            (dict(detectors=["matched"]), "detectors"),
            (dict(detectors=[]), "detectors"),
            (dict(methods=["magic"]), "methods"),
            (dict(pfa=[0.0]), "pfa"),
            (dict(pfa=[]), "pfa"),
            (dict(target_pd=1.0), "target_pd"),
            (dict(trials=-1), "trials"),
            (dict(seed=-1), "seed"),
            (dict(seed=2 ** 64), "seed"),
            (dict(tolerance=0.0), "tolerance"),
            (dict(workers=0), "workers"),
            (dict(experiment_id=""), "experiment_id"),
            (dict(colour="blue"), "colour"),
        ],
    )
    def test_invalid(self, overrides, field):
        with pytest.raises(ConfigError) as excinfo:
            ExperimentConfig.from_mapping(_mapping(**overrides))
        assert _field(excinfo) == field

    def test_missing_scenario(self):
        data = _mapping()
        del data["scenario"]
        with pytest.raises(ConfigError) as excinfo:
            ExperimentConfig.from_mapping(data)
        assert _field(excinfo) == "scenario"

    def test_unknown_scenario_key(self):
        data = _mapping()
        data["scenario"] = {**data["scenario"], "gain": 2.0}
        with pytest.raises(ConfigError):
            ExperimentConfig.from_mapping(data)

    def test_overrides(self):
        config = ExperimentConfig.from_mapping(_mapping())
        changed = config.with_overrides(seed=11, trials=500, tolerance=None)
        assert (changed.seed, changed.trials, changed.tolerance) == (11, 500, config.tolerance)
        assert config.with_overrides(seed=None) is config
        with pytest.raises(ConfigError):
            config.with_overrides(workers=0)

    def test_echo_round_trip(self):
        config = ExperimentConfig.from_mapping(_mapping(family={"name": "pfa", "values": [1e-4, 1e-6]}))
        reloaded = ExperimentConfig.from_mapping(config.echo())
        assert reloaded.scenario.snr_linear == pytest.approx(config.scenario.snr_linear, rel=1e-14)
        assert reloaded.family == config.family
        assert reloaded.detectors == config.detectors
        assert reloaded.pfa == config.pfa

    def test_yaml_syntax_error(self, tmp_path):
        path = tmp_path / "broken.yaml"
        path.write_text("experiment_id: x\nscenario: [1, 2\n", encoding="utf-8")
        with pytest.raises(ConfigError) as excinfo:
            ExperimentConfig.from_yaml(path)
        assert "line" in str(excinfo.value)

    def test_missing_file(self, tmp_path):
        with pytest.raises(ConfigError):
            ExperimentConfig.from_yaml(tmp_path / "absent.yaml")

    def test_relative_output(self, tmp_path):
        path = tmp_path / "exp.yaml"
        path.write_text(yaml.safe_dump(_mapping(output="results/x.csv")), encoding="utf-8")
        config = ExperimentConfig.from_yaml(path)
        assert config.output == Path("results/x.csv")
        assert config.output_path.is_absolute()

    @pytest.mark.parametrize("name", sorted(p.name for p in CONFIG_DIR.glob("*.yaml") if p.stem != "foxh_problem"))
    def test_bundled_configs_load(self, name):
        config = ExperimentConfig.from_yaml(CONFIG_DIR / name)
        assert config.experiment_id
        assert config.scenario.snr_linear


class TestFoxHConfig:
    def test_bundled_problem(self):
        config = FoxHConfig.from_yaml(CONFIG_DIR / "foxh_problem.yaml")
        assert (config.kind, config.m_samples, config.pfa, config.upsilon_db) == ("pd", 50, 1e-8, -10.0)

    def test_general_needs_coefficients(self):
        with pytest.raises(ConfigError):
            FoxHConfig(kind="general")

    def test_unknown_key(self, tmp_path):
        path = tmp_path / "h.yaml"
        path.write_text("kind: pd\nwidth: 3\n", encoding="utf-8")
        with pytest.raises(ConfigError):
            FoxHConfig.from_yaml(path)

    @pytest.mark.parametrize("kwargs", [dict(kind="trivariate"), dict(strategy="fastest"), dict(pfa=1.0), dict(m_samples=1)])
    def test_invalid(self, kwargs):
        with pytest.raises(ConfigError):
            FoxHConfig(**kwargs)
