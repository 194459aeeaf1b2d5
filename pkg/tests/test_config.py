import pytest

from src.config import RunConfig, Settings, load_run_config, parse_grid
from src.errors import ConfigError, UnknownConfigKey


class TestRunConfig:
    def test_defaults_follow_the_study(self):
        run = RunConfig()

        assert run.rho == 0.9
        assert run.bandwidth == 1.13
        assert run.replications == 200
        assert len(run.x_grid) == 21
        assert run.x_grid[0] == -1.0 and run.x_grid[-1] == 1.0

    def test_file_and_overrides(self, tmp_path):
        path = tmp_path / "run.cfg"
        path.write_text("# campaign\nn=50\nrho=0.5\nx_grid=-1:1:0.5\n", encoding="utf-8")

        run = load_run_config(path, ["rho=0.2", "lscv_grid=0.5,1.0"])

        assert run.n == 50
        assert run.rho == 0.2
        assert run.x_grid == (-1.0, -0.5, 0.0, 0.5, 1.0)
        assert run.lscv_grid == (0.5, 1.0)

    def test_unknown_key(self, tmp_path):
        path = tmp_path / "run.cfg"
        path.write_text("bandwith=1.0\n", encoding="utf-8")

        with pytest.raises(UnknownConfigKey) as info:
            load_run_config(path)

        assert info.value.keys == ["bandwith"]

    def test_malformed_override(self):
        with pytest.raises(ConfigError):
            load_run_config(None, ["rho"])

    def test_missing_file(self, tmp_path):
        with pytest.raises(ConfigError):
            load_run_config(tmp_path / "absent.cfg")

    def test_invalid_value(self):
        with pytest.raises(ValueError):
            load_run_config(None, ["eta=1.5"])

    def test_cells(self):
        run = load_run_config(None, ["cells=20/10/50;60/40/300"])

        assert [(c.tr, c.cr, c.n) for c in run.cells] == [(20, 10, 50), (60, 40, 300)]

    def test_full_table_cells(self):
        run = load_run_config(None, ["cells=table1"])
        cells = [(c.tr, c.cr, c.n) for c in run.cells]

        assert len(cells) == 12
        assert cells[:3] == [(20, 10, 50), (20, 10, 100), (20, 10, 300)]
        assert cells[-1] == (60, 40, 300)
        assert {(tr, cr) for tr, cr, _ in cells} == {(20, 10), (20, 40), (60, 10), (60, 40)}

    def test_flat_round_trip(self, tmp_path):
        run = load_run_config(None, ["cells=20/10/50", "support_bound=3.5", "header=true", "delimiter=;"])
        path = tmp_path / "again.cfg"
        path.write_text(run.to_kv_text(), encoding="utf-8")

        assert load_run_config(path) == run

    def test_typed_configs(self):
        run = load_run_config(None, ["n=40", "psi=identity", "replications=3", "seed=9"])

        assert run.to_sim_config().n == 40
        assert run.to_sim_config(a0=2.0).a0 == 2.0
        assert run.to_estimator_config().psi == "identity"
        mc = run.to_mc_config(threads=2)
        assert mc.replications == 3
        assert mc.sim.seed == 9
        assert mc.threads == 2


class TestParseGrid:
    def test_range_includes_end(self):
        assert parse_grid("0:1:0.25") == (0.0, 0.25, 0.5, 0.75, 1.0)

    def test_list(self):
        assert parse_grid("0.1, 0.2") == (0.1, 0.2)

    def test_bad_range(self):
        with pytest.raises(ValueError):
            parse_grid("1:0:0.1")


class TestSettings:
    def test_environment(self, monkeypatch):
        monkeypatch.setenv("LTRC_THREADS", "3")
        monkeypatch.setenv("LTRC_DEBUG_MODE", "true")
        monkeypatch.setenv("LTRC_OUTPUT_ROOT", "~/ltrc-out")

        settings = Settings()

        assert settings.ltrc_threads == 3
        assert settings.effective_log_level == "DEBUG"
        assert "~" not in str(settings.ltrc_output_root)

    def test_log_level_is_case_insensitive(self, monkeypatch):
        monkeypatch.setenv("LTRC_LOG_LEVEL", "warning")

        assert Settings().ltrc_log_level == "WARNING"
