import numpy as np
import pytest

import homsr
from homsr import (
    EVENT_DTYPE,
    GridSpec,
    InvalidArgumentError,
    PRECISION_CSV_HEADER,
    SourceModel,
    SourceScene,
    Strategy,
    batch_precision,
    crb,
    derive_seed,
    fi_direct_imaging,
    fi_twophoton_spatial,
    log_likelihood,
    mle_fit,
    precision_csv_row,
    qfi_reference,
    sample_events,
    sample_positions,
)

TP = SourceModel.THERMAL_PAIR
SPATIAL = Strategy.TWO_PHOTON_SPATIAL
BINARY = Strategy.TWO_PHOTON_BINARY
DI = Strategy.DIRECT_IMAGING


@pytest.fixture(scope="session")
def di_reports():
    """DI batch runs at 1000 and 2000 photons (eps = 1), shared by the
    consistency and efficiency tests."""
    scene = SourceScene(0.0, 1.0)
    out = {}
    for n in (1000, 2000):
        out[n] = batch_precision(scene, TP, DI, batch_size=n, n_batches=200, seed=20260809)
    return out


class TestLogLikelihood:
    def test_translation_invariance(self):
        scene = SourceScene(0.4, 0.8, visibility=0.9)
        events = sample_events(scene, TP, 300, seed=2)
        base = log_likelihood((0.4, 0.8), events, (0.9, 1.0), TP, SPATIAL)
        for delta in (-3.2, 0.9):
            shifted = events.copy()
            shifted["x1"] += delta
            shifted["x2"] += delta
            val = log_likelihood((0.4 + delta, 0.8), shifted, (0.9, 1.0), TP, SPATIAL)
            assert val == pytest.approx(base, rel=1e-9)

    def test_even_in_eps(self):
        scene = SourceScene(0.0, 0.6, visibility=0.85)
        events = sample_events(scene, TP, 200, seed=3)
        a = log_likelihood((0.1, 0.6), events, (0.85, 1.0), TP, SPATIAL)
        b = log_likelihood((0.1, -0.6), events, (0.85, 1.0), TP, SPATIAL)
        assert a == b

    def test_binary_depends_only_on_counts(self):
        scene = SourceScene(0.0, 0.7, visibility=0.9)
        events = sample_events(scene, TP, 500, seed=5)
        shuffled = events.copy()
        rng = np.random.default_rng(0)
        shuffled["x1"] = rng.permutation(shuffled["x1"])
        shuffled["x2"] = rng.normal(size=len(shuffled))  # positions irrelevant
        a = log_likelihood((0.0, 0.7), events, (0.9, 1.0), TP, BINARY)
        b = log_likelihood((0.0, 0.7), shuffled, (0.9, 1.0), TP, BINARY)
        assert a == b

    def test_zero_density_event_gives_minus_inf(self):
        # a coincidence is impossible at V = 1, eps = 0
        events = np.array([("C", 0.1, -0.2)], dtype=EVENT_DTYPE)
        val = log_likelihood((0.0, 0.0), events, (1.0, 1.0), TP, SPATIAL)
        assert val == -np.inf

    def test_empty_events_raise(self):
        with pytest.raises(InvalidArgumentError):
            log_likelihood((0.0, 0.5), np.empty(0, dtype=EVENT_DTYPE), (1.0, 1.0), TP, SPATIAL)
        with pytest.raises(InvalidArgumentError):
            log_likelihood((0.0, 0.5), np.array([]), (1.0, 1.0), TP, DI)

    def test_di_accepts_plain_positions_and_event_records(self):
        scene = SourceScene(0.0, 1.0)
        events = sample_events(scene, TP, 100, seed=7)
        pooled = np.concatenate([events["x1"], events["x2"]])
        a = log_likelihood((0.0, 1.0), events, (1.0, 1.0), TP, DI)
        b = log_likelihood((0.0, 1.0), pooled, (1.0, 1.0), TP, DI)
        assert a == pytest.approx(b, rel=1e-12)


class TestMleFit:
    def test_di_recovery_large_sample(self):
        scene = SourceScene(0.3, 1.0)
        x = sample_positions(scene, 100000, seed=11)
        fit = mle_fit(x, TP, DI, (1.0, 1.0))
        assert fit.converged
        f = fi_direct_imaging(scene)
        sd_x0 = 1 / np.sqrt(len(x) * f.x0x0)
        sd_eps = 1 / np.sqrt(len(x) * f.epseps)
        assert abs(fit.x0_hat - 0.3) < 5 * sd_x0
        assert abs(fit.eps_hat - 1.0) < 5 * sd_eps

    def test_spatial_recovery(self):
        scene = SourceScene(0.3, 0.5, visibility=0.92)
        events = sample_events(scene, TP, 20000, seed=13)
        fit = mle_fit(events, TP, SPATIAL, (0.92, 1.0))
        assert fit.converged and not fit.eps_at_boundary
        f = fi_twophoton_spatial(scene, TP)
        n_ph = 2 * len(events)
        assert abs(fit.x0_hat - 0.3) < 5 / np.sqrt(n_ph * f.x0x0)
        assert abs(fit.eps_hat - 0.5) < 5 / np.sqrt(n_ph * f.epseps)

    def test_binary_fit_has_no_centroid(self):
        scene = SourceScene(0.0, 1.0, visibility=0.92)
        events = sample_events(scene, TP, 5000, seed=17)
        fit = mle_fit(events, TP, BINARY, (0.92, 1.0))
        assert np.isnan(fit.x0_hat)
        assert fit.converged
        assert abs(fit.eps_hat - 1.0) < 0.25

    def test_degenerate_identical_positions(self):
        events = np.zeros(50, dtype=EVENT_DTYPE)
        events["kind"] = "D"
        events["x1"] = 1.5
        events["x2"] = 1.5
        fit = mle_fit(events, TP, SPATIAL, (1.0, 1.0))
        # all mass at one point: the separation estimate collapses to the
        # boundary (or the fit reports non-convergence); it must not crash
        assert fit.eps_at_boundary or not fit.converged

    def test_boundary_flag_on_zero_separation_data(self):
        scene = SourceScene(0.0, 0.0, visibility=1.0)
        events = sample_events(scene, TP, 3000, seed=19)
        fit = mle_fit(events, TP, SPATIAL, (1.0, 1.0))
        assert fit.eps_hat < 0.2  # statistically near zero
        # loglik finite at the optimum
        assert np.isfinite(fit.loglik)

    def test_equivariance_under_translation(self):
        delta = 1.3
        a = sample_events(SourceScene(0.2, 0.8, visibility=0.9), TP, 2000, seed=23)
        b = sample_events(SourceScene(0.2 + delta, 0.8, visibility=0.9), TP, 2000, seed=23)
        fit_a = mle_fit(a, TP, SPATIAL, (0.9, 1.0))
        fit_b = mle_fit(b, TP, SPATIAL, (0.9, 1.0))
        assert fit_b.x0_hat - fit_a.x0_hat == pytest.approx(delta, abs=1e-3)
        assert fit_b.eps_hat == pytest.approx(fit_a.eps_hat, abs=1e-3)

    def test_grid_spec_validation(self):
        with pytest.raises(InvalidArgumentError):
            GridSpec(x0_steps=1)
        with pytest.raises(InvalidArgumentError):
            GridSpec(eps_max=-1.0)


class TestBatchPrecision:
    def test_validation(self):
        scene = SourceScene(0.0, 0.5, visibility=0.9)
        with pytest.raises(InvalidArgumentError):
            batch_precision(scene, TP, SPATIAL, batch_size=50, n_batches=20, seed=1)
        with pytest.raises(InvalidArgumentError):
            batch_precision(scene, TP, SPATIAL, batch_size=100, n_batches=5, seed=1)
        with pytest.raises(InvalidArgumentError):
            batch_precision(scene, TP, SPATIAL, batch_size=100, n_batches=10, seed=1, count_mode="foo")

    def test_small_di_run_sanity(self):
        scene = SourceScene(0.0, 1.0)
        rep = batch_precision(scene, TP, DI, batch_size=500, n_batches=30, seed=3)
        f = fi_direct_imaging(scene)
        assert rep.inv_var_eps_se > 0 and rep.inv_var_x0_se > 0
        assert rep.n_excluded == 0
        # loose 1/3 band at 30 batches; the tight checks live in the
        # 200-batch tests below
        assert abs(rep.inv_var_x0_per_photon / f.x0x0 - 1) < 0.35
        assert abs(rep.inv_var_eps_per_photon / f.epseps - 1) < 0.35

    def test_binary_reports_no_centroid_information(self):
        scene = SourceScene(0.0, 1.0, visibility=0.92)
        rep = batch_precision(scene, TP, BINARY, batch_size=300, n_batches=12, seed=5)
        assert np.isnan(rep.inv_var_x0_per_photon)
        assert rep.crb_prediction.x0x0 == 0.0
        assert rep.inv_var_eps_per_photon > 0

    def test_consistency_doubling(self, di_reports):
        # doubling the events per batch halves the estimator variance
        var_1000 = 1 / (1000 * di_reports[1000].inv_var_eps_per_photon)
        var_2000 = 1 / (2000 * di_reports[2000].inv_var_eps_per_photon)
        ratio = var_1000 / var_2000
        assert 1.7 <= ratio <= 2.3

    def test_di_centroid_efficiency(self, di_reports):
        rep = di_reports[2000]
        f = fi_direct_imaging(SourceScene(0.0, 1.0))
        assert abs(rep.inv_var_x0_per_photon / f.x0x0 - 1) < 0.10

    def test_never_beats_information_bound(self, mc_spatial_report, di_reports):
        for rep in (mc_spatial_report, di_reports[1000], di_reports[2000]):
            assert (
                rep.inv_var_eps_per_photon
                <= rep.crb_prediction.epseps + 3 * rep.inv_var_eps_se
            )
            assert (
                rep.inv_var_x0_per_photon
                <= rep.crb_prediction.x0x0 + 3 * rep.inv_var_x0_se
            )

    def test_count_mode_coincidences(self):
        scene = SourceScene(0.0, 2.0, visibility=1.0)
        rep = batch_precision(
            scene, TP, SPATIAL, batch_size=150, n_batches=10, seed=7, count_mode="coincidences"
        )
        # each batch holds 150 coincidences, so pairs per batch is about 150/P_c
        assert rep.n_photons_per_batch > 2 * 150
        assert rep.inv_var_eps_per_photon > 0

    def test_scheduling_independence(self):
        scene = SourceScene(0.0, 1.0, visibility=0.9)
        a = batch_precision(scene, TP, BINARY, batch_size=200, n_batches=10, seed=9, n_jobs=1)
        b = batch_precision(scene, TP, BINARY, batch_size=200, n_batches=10, seed=9, n_jobs=2)
        assert a.inv_var_eps_per_photon == b.inv_var_eps_per_photon


class TestPrecisionCsv:
    def test_row_format(self):
        scene = SourceScene(0.0, 1.0, visibility=0.92)
        rep = batch_precision(scene, TP, BINARY, batch_size=200, n_batches=10, seed=11)
        row = precision_csv_row(rep, qfi_reference(scene))
        fields = row.split(",")
        header = PRECISION_CSV_HEADER.split(",")
        assert len(fields) == len(header)
        assert fields[header.index("strategy")] == "two_photon_binary"
        assert fields[header.index("inv_var_x0")] == "nan"
        assert fields[header.index("crb_x0")] == "nan"
        assert float(fields[header.index("qcrb_eps")]) == 0.25
        assert fields[header.index("n_batches")] == "10"
