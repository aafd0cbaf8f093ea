import numpy as np
import pytest

from bsradar import (
    ArrayGeometry,
    ChirpParams,
    PipelineConfig,
    Scenario,
    TargetSpec,
    process_cube,
    run_pipeline,
    sweep,
    synthesize_datacube,
)
from bsradar.counters import (
    beamspace_fft_mults,
    matvec_mults,
    mvdr_solve_mults,
    outer_product_mults,
)
from bsradar.pipeline import METHOD_ANTENNA, METHOD_BEAMSPACE, METHOD_CONVENTIONAL, StageError


def tiny_setup(n_targets=3, noise_power=1e-2, num_pulses=16, seed=5):
    geom = ArrayGeometry(2, 8, 10e9)
    chirp = ChirpParams(
        pulse_samples=256, num_pulses=num_pulses, pri=2e-6, bandwidth=400e6
    )
    rng = np.random.default_rng(seed)
    targets = []
    ranges = np.linspace(20.0, 60.0, n_targets)
    vels = np.linspace(-30.0, 40.0, n_targets)
    for k in range(n_targets):
        az = np.deg2rad(rng.uniform(-30, 30))
        el = np.deg2rad(rng.uniform(-10, 10))
        pos = (
            ranges[k] * np.cos(el) * np.sin(az),
            ranges[k] * np.cos(el) * np.cos(az),
            ranges[k] * np.sin(el),
        )
        targets.append(TargetSpec(pos, float(vels[k]), np.exp(2j * np.pi * rng.random())))
    scenario = Scenario(
        targets=tuple(targets), noise_power=noise_power, seed=seed, label="tiny"
    )
    return geom, chirp, scenario


def tiny_config(geom, chirp, scenario, **kw):
    defaults = dict(
        scenario=scenario,
        geometry=geom,
        chirp=chirp,
        subbands=16,
        window=(2, 4),
        train_pulses=8,
        method=METHOD_BEAMSPACE,
    )
    defaults.update(kw)
    return PipelineConfig(**defaults)


class TestConfigValidation:
    def test_requires_scene(self):
        with pytest.raises(ValueError, match="preset/scenario"):
            PipelineConfig(preset=None, scenario=None).validate()

    def test_bad_method(self):
        with pytest.raises(ValueError, match="method"):
            PipelineConfig(preset="A1", method="magic").validate()

    def test_subbands_must_divide(self):
        with pytest.raises(ValueError, match="subbands"):
            PipelineConfig(preset="A1", subbands=100).validate()

    def test_window_must_fit_grid(self):
        with pytest.raises(ValueError, match="window"):
            PipelineConfig(preset="A1", window=(8, 4)).validate()

    def test_train_pulses_bounds(self):
        with pytest.raises(ValueError, match="train_pulses"):
            PipelineConfig(preset="A1", train_pulses=1000).validate()

    def test_fft_must_cover_array(self):
        with pytest.raises(ValueError):
            PipelineConfig(preset="A1", fft_size=(2, 32)).validate()


class TestEndToEnd:
    @pytest.mark.parametrize(
        "method", [METHOD_ANTENNA, METHOD_BEAMSPACE, METHOD_CONVENTIONAL]
    )
    def test_clean_scene_all_detected(self, method):
        geom, chirp, scenario = tiny_setup()
        cfg = tiny_config(geom, chirp, scenario, method=method)
        result = run_pipeline(cfg)
        assert result.detection_count == len(scenario.targets)
        for score in result.scores:
            assert score.range_error_bins <= 1
            assert score.velocity_error_bins <= 1

    def test_full_window_beamspace_equals_antenna(self):
        # m = n, W = M, loading 0: unitary equivalence end to end
        geom, chirp, scenario = tiny_setup(noise_power=1.0)
        cube = synthesize_datacube(scenario, geom, chirp)
        base = dict(loading=0.0, window=(2, 8))
        cfg_a = tiny_config(geom, chirp, scenario, method=METHOD_ANTENNA, **base)
        cfg_b = tiny_config(
            geom, chirp, scenario, method=METHOD_BEAMSPACE, loading=0.0, window=(2, 8)
        )
        res_a = process_cube(cube, scenario, cfg_a, want_wideband=True)
        res_b = process_cube(cube, scenario, cfg_b, want_wideband=True)
        scale = np.max(np.abs(res_a.wideband_outputs))
        diff = np.max(np.abs(res_a.wideband_outputs - res_b.wideband_outputs))
        assert diff / scale < 1e-8
        assert [s.detected for s in res_a.scores] == [s.detected for s in res_b.scores]
        assert [s.range_error_bins for s in res_a.scores] == [
            s.range_error_bins for s in res_b.scores
        ]

    def test_workers_do_not_change_results(self):
        geom, chirp, scenario = tiny_setup()
        cube = synthesize_datacube(scenario, geom, chirp)
        cfg1 = tiny_config(geom, chirp, scenario, workers=1)
        cfg2 = tiny_config(geom, chirp, scenario, workers=3)
        res1 = process_cube(cube, scenario, cfg1, want_wideband=True)
        res2 = process_cube(cube, scenario, cfg2, want_wideband=True)
        assert np.array_equal(res1.wideband_outputs, res2.wideband_outputs)
        assert res1.complexity.stage_mults == res2.complexity.stage_mults

    def test_determinism_byte_identical_reports(self, tmp_path):
        geom, chirp, scenario = tiny_setup()
        out_a, out_b = tmp_path / "a", tmp_path / "b"
        for out in (out_a, out_b):
            cfg = tiny_config(geom, chirp, scenario, output_dir=str(out))
            run_pipeline(cfg)
        assert (out_a / "detections.csv").read_bytes() == (
            out_b / "detections.csv"
        ).read_bytes()
        assert (out_a / "complexity.json").read_bytes() == (
            out_b / "complexity.json"
        ).read_bytes()

    def test_recenter_flag_runs(self):
        geom, chirp, scenario = tiny_setup()
        cfg = tiny_config(geom, chirp, scenario, recenter_per_subband=False)
        result = run_pipeline(cfg)
        assert result.detection_count == len(scenario.targets)

    def test_map_export(self, tmp_path):
        geom, chirp, scenario = tiny_setup(n_targets=2)
        cfg = tiny_config(
            geom, chirp, scenario, output_dir=str(tmp_path), export_maps=True
        )
        result = run_pipeline(cfg)
        map_files = sorted(tmp_path.glob("rdmap_target*.bin"))
        assert len(map_files) == 2
        assert len(result.artifacts) == 2 + 2

    def test_beam_pattern_export(self, tmp_path):
        geom, chirp, scenario = tiny_setup(n_targets=2)
        cfg = tiny_config(
            geom,
            chirp,
            scenario,
            output_dir=str(tmp_path),
            export_patterns=True,
            pattern_step_deg=15.0,
        )
        run_pipeline(cfg)
        pattern_files = sorted(tmp_path.glob("beampattern_target*.csv"))
        assert len(pattern_files) == 2
        header = pattern_files[0].read_text().splitlines()[1]
        assert header == "azimuth_deg,elevation_deg,gain_linear,gain_db"

    def test_stage_context_on_numerical_failure(self):
        geom, chirp, scenario = tiny_setup(noise_power=0.0)
        # loading 0 with a noise-free rank-deficient covariance cannot factor
        cfg = tiny_config(
            geom, chirp, scenario, method=METHOD_ANTENNA, loading=0.0, train_pulses=1
        )
        with pytest.raises(StageError, match="beamform"):
            run_pipeline(cfg)


class TestComplexityReport:
    def test_tallies_match_closed_forms(self):
        geom, chirp, scenario = tiny_setup()
        cfg = tiny_config(geom, chirp, scenario, method=METHOD_ANTENNA)
        report = run_pipeline(cfg).complexity
        k = len(scenario.targets)
        n_sub = cfg.subbands
        n = geom.n
        s = chirp.pulse_samples // n_sub
        n_t = s * cfg.train_pulses
        n_apply = s * chirp.num_pulses
        assert report.stage_mults["covariance"] == k * n_sub * outer_product_mults(n, n_t)
        assert report.stage_mults["solve"] == k * n_sub * mvdr_solve_mults(n)
        assert report.stage_mults["apply"] == k * n_sub * matvec_mults(n, n_apply)
        assert report.training_mults_per_pair == (
            outer_product_mults(n, n_t) + mvdr_solve_mults(n)
        )
        assert report.application_mults_per_snapshot == n

    def test_beamspace_tallies_share_the_transform(self):
        geom, chirp, scenario = tiny_setup()
        cfg = tiny_config(geom, chirp, scenario, method=METHOD_BEAMSPACE)
        report = run_pipeline(cfg).complexity
        k = len(scenario.targets)
        n_sub = cfg.subbands
        plan = cfg.beamspace_plan()
        w = cfg.window[0] * cfg.window[1]
        s = chirp.pulse_samples // n_sub
        n_t = s * cfg.train_pulses
        n_apply = s * chirp.num_pulses
        fft_per_snap = beamspace_fft_mults(geom.n_x, plan.m_z, plan.m_x)
        # transform tallied once per snapshot, not once per target
        assert report.stage_mults["beamspace_fft"] == n_sub * n_apply * fft_per_snap
        assert report.stage_mults["covariance"] == k * n_sub * outer_product_mults(w, n_t)
        assert report.application_mults_per_snapshot == fft_per_snap + w

    def test_totals_are_additive(self):
        geom, chirp, scenario = tiny_setup()
        cfg = tiny_config(geom, chirp, scenario)
        report = run_pipeline(cfg).complexity
        assert report.total_mults == sum(report.stage_mults.values())

    def test_full_window_training_close_to_antenna_cost(self):
        # W = M = N: same covariance/solve dimensions, so the reduced
        # pipeline's training tally is the antenna tally plus FFT overhead
        geom, chirp, scenario = tiny_setup()
        cfg_a = tiny_config(geom, chirp, scenario, method=METHOD_ANTENNA)
        cfg_b = tiny_config(geom, chirp, scenario, window=(2, 8))
        ant = run_pipeline(cfg_a).complexity.training_mults_per_pair
        beam = run_pipeline(cfg_b).complexity.training_mults_per_pair
        assert ant <= beam <= 2 * ant


class TestSweep:
    def test_empty_axis_writes_header_only(self, tmp_path):
        geom, chirp, scenario = tiny_setup()
        cfg = tiny_config(geom, chirp, scenario)
        path = tmp_path / "sweep.csv"
        rows = sweep(cfg, "window", [], path)
        assert rows == []
        lines = path.read_text().splitlines()
        assert len(lines) == 2 and lines[0].startswith("#")

    def test_window_axis(self, tmp_path):
        geom, chirp, scenario = tiny_setup(n_targets=2)
        cfg = tiny_config(geom, chirp, scenario)
        rows = sweep(cfg, "window", [(1, 2), (2, 4)], tmp_path / "w.csv")
        assert len(rows) == 4
        assert all(r["status"] == "ok" for r in rows)

    def test_failed_cell_recorded_and_sweep_continues(self, tmp_path):
        geom, chirp, scenario = tiny_setup(n_targets=2)
        cfg = tiny_config(geom, chirp, scenario)
        rows = sweep(cfg, "window", [(9, 9), (2, 4)], tmp_path / "f.csv")
        failed = [r for r in rows if r["status"] != "ok"]
        ok = [r for r in rows if r["status"] == "ok"]
        assert len(failed) == 1 and "window" in failed[0]["status"]
        assert len(ok) == 2

    def test_unknown_axis(self):
        geom, chirp, scenario = tiny_setup()
        cfg = tiny_config(geom, chirp, scenario)
        with pytest.raises(ValueError, match="axis"):
            sweep(cfg, "loading", [1, 2])
