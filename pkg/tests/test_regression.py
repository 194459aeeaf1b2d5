import math

import numpy as np
import pytest
from numpy.testing import assert_allclose
from scipy.stats import norm

from src.errors import NoEffectiveData, NotEstimable
from src.regression.classical import carbonez_m_hat, classical_m_hat, estimate_classical
from src.regression.kernels import EpanechnikovKernel, GaussianKernel, make_kernel
from src.regression.psi import IdentityPsi, PseudoHuberPsi, check_psi, make_psi
from src.regression.schemas import EstimatorConfig
from src.regression.score import (
    build_score,
    confidence_interval,
    estimate_gamma,
    estimate_score_derivative,
    estimate_sigma,
    normal_quantile,
    oracle_score,
    score_value,
    solve_m_hat,
    solve_with_diagnostics,
)
from src.regression.service import RegressionService
from src.survival.estimators import fit_survival
from tests.conftest import degenerate_sample, make_sample, random_sample

SINGLE = make_sample([0.3], [1.7], [0.2], [1])
RNG = np.random.default_rng(11)
X_DEGENERATE = RNG.uniform(-1, 1, size=60)
Z_DEGENERATE = 4.0 + 2.0 * X_DEGENERATE + RNG.normal(scale=0.3, size=60)
DEGENERATE = degenerate_sample(X_DEGENERATE, Z_DEGENERATE)
SPARSE = degenerate_sample([0.0, 0.01, 0.02, 1.0, 1.01, 1.02, 1.03, 1.04, 1.05], [1.0, 1.1, 1.2, 2.0, 2.1, 2.2, 2.3, 2.4, 2.5])
THREE = make_sample([0.0, 0.5, 1.0], [1.0, 2.0, 3.0], [0.0, 0.0, 0.0], [1, 0, 1])


def nadaraya_watson(x, xs, ys, h):
    k = np.exp(-0.5 * ((x - xs) / h) ** 2)
    return float(np.sum(k * ys) / np.sum(k))


class TestKernelsAndPsi:
    def test_gaussian_squared_integral(self):
        assert GaussianKernel().squared_integral(1) == pytest.approx(0.2820948, abs=1e-7)
        assert GaussianKernel().squared_integral(2) == pytest.approx(0.2820948**2, abs=1e-7)

    def test_epanechnikov_is_one_dimensional(self):
        with pytest.raises(ValueError):
            EpanechnikovKernel()(np.zeros((3, 2)))

    def test_unknown_names(self):
        with pytest.raises(ValueError):
            make_kernel("triangle")
        with pytest.raises(ValueError):
            make_psi("tukey")

    def test_pseudo_huber_shape(self):
        psi = PseudoHuberPsi()
        u = np.array([-3.0, 0.0, 3.0])

        assert_allclose(psi(u), u / np.sqrt(1 + u * u))
        assert psi.derivative(np.array([0.0]))[0] == 1.0
        assert np.all(np.abs(psi(np.linspace(-1e3, 1e3, 11))) < 1.0)

    def test_psi_validation_rejects_non_monotone(self):
        class Flat(IdentityPsi):
            def derivative(self, u):
                return np.zeros(np.shape(u))

        with pytest.raises(ValueError):
            check_psi(Flat())

    def test_config_validates_names(self):
        with pytest.raises(ValueError):
            EstimatorConfig(kernel="box")

    def test_with_bandwidth(self):
        cfg = EstimatorConfig().with_bandwidth(0.5)

        assert cfg.bandwidth == 0.5
        with pytest.raises(ValueError):
            cfg.with_bandwidth(0.0)


class TestBuildScore:
    def test_single_observation_weight(self, est_cfg):
        fit = fit_survival(SINGLE)
        score = build_score(SINGLE, fit, est_cfg, 0.3)

        expected = fit.mu_n * norm.pdf(0.0) / est_cfg.bandwidth
        assert score.kept_weights[0] == pytest.approx(expected)

    def test_all_censored(self, est_cfg):
        sample = make_sample([0.0, 1.0], [1.0, 2.0], [0.0, 0.0], [0, 0])

        with pytest.raises(NoEffectiveData):
            build_score(sample, fit_survival(sample), est_cfg, 0.5)

    def test_degenerate_weights_are_plain_kernel_weights(self, est_cfg):
        fit = fit_survival(DEGENERATE)
        score = build_score(DEGENERATE, fit, est_cfg, 0.1)
        h = est_cfg.bandwidth

        assert fit.mu_n == pytest.approx(1.0)
        expected = norm.pdf((0.1 - X_DEGENERATE) / h) / (DEGENERATE.n * h)
        assert_allclose(score.weights, expected, rtol=1e-12)

    def test_support_bound_drops_large_lifetimes(self, est_cfg):
        fit = fit_survival(DEGENERATE)
        bound = float(np.median(Z_DEGENERATE))
        score = build_score(DEGENERATE, fit, est_cfg.with_updates(support_bound=bound), 0.0)

        assert np.all(score.kept_z <= bound)


class TestScoreAndSolver:
    def test_zero_at_single_lifetime(self, est_cfg):
        score = build_score(SINGLE, fit_survival(SINGLE), est_cfg, 0.3)

        assert score_value(score, est_cfg, 1.7) == 0.0

    def test_sign_outside_the_data(self, est_cfg):
        fit = fit_survival(DEGENERATE)
        score = build_score(DEGENERATE, fit, est_cfg, 0.0)

        assert score_value(score, est_cfg, Z_DEGENERATE.min() - 0.1) > 0
        assert score_value(score, est_cfg, Z_DEGENERATE.max() + 0.1) < 0

    def test_identity_score_is_affine(self, identity_cfg):
        score = build_score(DEGENERATE, fit_survival(DEGENERATE), identity_cfg, 0.0)
        w = score.kept_weights

        for theta in (-1.0, 0.0, 2.5):
            expected = np.dot(w, score.kept_z) - theta * w.sum()
            assert score_value(score, identity_cfg, theta) == pytest.approx(expected, rel=1e-12, abs=1e-12)

    @pytest.mark.parametrize("psi", ["identity", "pseudo_huber"])
    def test_single_observation_root(self, psi):
        cfg = EstimatorConfig(psi=psi)
        score = build_score(SINGLE, fit_survival(SINGLE), cfg, 0.3)

        assert solve_m_hat(score, cfg) == pytest.approx(1.7, abs=2 * cfg.root_tol)

    def test_identity_root_matches_closed_form(self, sim_sample, sim_fit, identity_cfg):
        for x in (-0.5, 0.0, 0.5):
            score = build_score(sim_sample, sim_fit, identity_cfg, x)
            assert solve_m_hat(score, identity_cfg) == pytest.approx(
                classical_m_hat(sim_sample, sim_fit, identity_cfg, x), abs=1e-8
            )

    @pytest.mark.slow
    def test_identity_root_matches_closed_form_on_random_samples(self, identity_cfg):
        rng = np.random.default_rng(77)
        checked = 0
        for _ in range(500):
            sample = random_sample(rng, int(rng.integers(20, 121)))
            fit = fit_survival(sample)
            for x in (-0.5, 0.0, 0.5):
                try:
                    score = build_score(sample, fit, identity_cfg, x)
                except NoEffectiveData:
                    continue
                closed = classical_m_hat(sample, fit, identity_cfg, x)
                assert solve_m_hat(score, identity_cfg) == pytest.approx(closed, abs=1e-8)
                checked += 1

        assert checked >= 600

    def test_root_ignores_psi_scale(self, sim_sample, sim_fit, est_cfg):
        for x in (-0.5, 0.0, 0.5):
            roots = [
                solve_m_hat(build_score(sim_sample, sim_fit, cfg, x), cfg)
                for cfg in (est_cfg, est_cfg.with_updates(psi_scale=0.25), est_cfg.with_updates(psi_scale=3.7))
            ]
            assert_allclose(roots, roots[0], rtol=0, atol=4 * est_cfg.root_tol)

    def test_identity_root_is_nadaraya_watson(self, identity_cfg):
        fit = fit_survival(DEGENERATE)
        for x in (-0.6, 0.0, 0.4):
            score = build_score(DEGENERATE, fit, identity_cfg, x)
            oracle = nadaraya_watson(x, X_DEGENERATE, Z_DEGENERATE, identity_cfg.bandwidth)
            assert solve_m_hat(score, identity_cfg) == pytest.approx(oracle, abs=1e-8)

    def test_translation_equivariance(self, sim_sample, sim_fit, est_cfg):
        shift = 7.25
        moved_sample = make_sample(sim_sample.x, sim_sample.z + shift, sim_sample.t + shift, sim_sample.delta)
        moved_fit = fit_survival(moved_sample)

        base = solve_m_hat(build_score(sim_sample, sim_fit, est_cfg, 0.0), est_cfg)
        moved = solve_m_hat(build_score(moved_sample, moved_fit, est_cfg, 0.0), est_cfg)

        assert moved == pytest.approx(base + shift, abs=1e-7)

    def test_bracket_pad_does_not_move_the_root(self, sim_sample, sim_fit, est_cfg):
        roots = [
            solve_m_hat(build_score(sim_sample, sim_fit, cfg, 0.2), cfg)
            for cfg in (est_cfg, est_cfg.with_updates(bracket_pad=25.0))
        ]

        assert roots[0] == pytest.approx(roots[1], abs=4 * est_cfg.root_tol)

    def test_diagnostics(self, sim_sample, sim_fit, est_cfg):
        _, diagnostics = solve_with_diagnostics(build_score(sim_sample, sim_fit, est_cfg, 0.0), est_cfg)

        assert diagnostics.converged
        assert diagnostics.bracket_lo < diagnostics.bracket_hi
        assert diagnostics.iterations <= est_cfg.root_max_iter


class TestClassicalAndCarbonez:
    def test_single_observation(self, est_cfg):
        fit = fit_survival(SINGLE)

        assert classical_m_hat(SINGLE, fit, est_cfg, 0.3) == pytest.approx(1.7)
        assert carbonez_m_hat(SINGLE, fit, est_cfg, 0.3) == pytest.approx(1.7)

    def test_flat_kernel_limit_is_mean(self, est_cfg):
        fit = fit_survival(DEGENERATE)
        wide = est_cfg.with_bandwidth(1e6)

        assert classical_m_hat(DEGENERATE, fit, wide, 0.0) == pytest.approx(Z_DEGENERATE.mean(), rel=1e-9)

    def test_classical_without_truncation_or_censoring_is_nadaraya_watson(self, identity_cfg):
        fit = fit_survival(DEGENERATE)
        for x in (-0.8, -0.1, 0.3, 0.9):
            oracle = nadaraya_watson(x, X_DEGENERATE, Z_DEGENERATE, identity_cfg.bandwidth)
            assert classical_m_hat(DEGENERATE, fit, identity_cfg, x) == pytest.approx(oracle, abs=1e-10)

    def test_carbonez_without_censoring_is_nadaraya_watson(self, est_cfg):
        fit = fit_survival(DEGENERATE)
        oracle = nadaraya_watson(0.2, X_DEGENERATE, Z_DEGENERATE, est_cfg.bandwidth)

        assert carbonez_m_hat(DEGENERATE, fit, est_cfg, 0.2) == pytest.approx(oracle, rel=1e-12)

    def test_carbonez_three_points_by_hand(self, est_cfg):
        fit = fit_survival(THREE)
        h = est_cfg.bandwidth
        k = norm.pdf((0.4 - np.array([0.0, 0.5, 1.0])) / h)
        # one censored record at Z = 2 with 2 at risk: Gbar = 1/2 from Z = 2 on
        g_bar = np.array([1.0, 0.5, 0.5])
        expected = (k[0] * 1.0 / g_bar[0] + k[2] * 3.0 / g_bar[2]) / k.sum()

        assert carbonez_m_hat(THREE, fit, est_cfg, 0.4) == pytest.approx(expected, rel=1e-12)

    def test_estimate_classical_matches_identity_service(self, sim_sample, sim_fit, est_cfg):
        identity = est_cfg.with_updates(psi="identity")
        closed = estimate_classical(sim_sample, sim_fit, est_cfg, 0.0)
        solved = RegressionService(sim_sample, identity, sim_fit).estimate(0.0)

        assert closed.m_hat == pytest.approx(solved.m_hat, abs=1e-8)
        assert closed.sigma_hat == pytest.approx(solved.sigma_hat, rel=1e-6)


class TestVariance:
    def test_identity_derivative_is_minus_weight_sum(self, sim_sample, sim_fit, identity_cfg):
        score = build_score(sim_sample, sim_fit, identity_cfg, 0.0)

        value = estimate_score_derivative(sim_sample, sim_fit, identity_cfg, 0.0, 1.3)

        assert value == pytest.approx(-score.kept_weights.sum(), rel=1e-12)

    def test_derivative_matches_finite_difference(self, sim_sample, sim_fit, est_cfg):
        score = build_score(sim_sample, sim_fit, est_cfg, 0.1)
        theta, step = 0.4, 1e-5
        central = (score_value(score, est_cfg, theta + step) - score_value(score, est_cfg, theta - step)) / (2 * step)

        assert estimate_score_derivative(sim_sample, sim_fit, est_cfg, 0.1, theta) == pytest.approx(central, abs=1e-6)

    def test_single_observation_derivative(self, est_cfg):
        fit = fit_survival(SINGLE)
        score = build_score(SINGLE, fit, est_cfg, 0.3)

        assert estimate_score_derivative(SINGLE, fit, est_cfg, 0.3, 1.7) == pytest.approx(-score.kept_weights[0])
        assert estimate_gamma(SINGLE, fit, est_cfg, 0.3, 1.7) == 0.0
        assert estimate_sigma(SINGLE, fit, est_cfg, 0.3, 1.7) == 0.0

    def test_gamma_three_points_by_hand(self, identity_cfg):
        fit = fit_survival(THREE)
        score = build_score(THREE, fit, identity_cfg, 0.4)
        theta = 1.5
        guard = fit.l_n(THREE.z) * fit.g_bar(THREE.z)
        direct = sum(
            score.weights[i] * (THREE.z[i] - theta) ** 2 / guard[i] for i in range(3) if THREE.delta[i] == 1
        )

        assert estimate_gamma(THREE, fit, identity_cfg, 0.4, theta) == pytest.approx(direct, rel=1e-12)
        assert direct >= 0

    def test_interval_from_raw_arrays(self, sim_sample, sim_fit, est_cfg):
        x, h, n = 0.3, est_cfg.bandwidth, sim_sample.n
        result = RegressionService(sim_sample, est_cfg, sim_fit).estimate(x)

        guard = sim_fit.l_n(sim_sample.z) * sim_fit.g_bar(sim_sample.z)
        keep = (sim_sample.delta == 1) & (guard > 0)
        z, g = sim_sample.z[keep], guard[keep]
        w = sim_fit.mu_n * norm.pdf((x - sim_sample.x[keep, 0]) / h) / (g * n * h)
        r = z - result.m_hat
        psi = r / np.sqrt(1 + r**2)
        psi_prime = (1 + r**2) ** -1.5
        gamma = np.sum(w * psi**2 / g)
        sigma = math.sqrt(sim_fit.mu_n * gamma / (2 * math.sqrt(math.pi)) / np.sum(w * psi_prime) ** 2)

        assert result.sigma_hat == pytest.approx(sigma, rel=1e-9)
        assert result.ci_hi - result.ci_lo == pytest.approx(2 * 1.959964 * sigma / math.sqrt(n * h), rel=1e-6)

    def test_psi_scale_cancels(self, sim_sample, sim_fit, est_cfg):
        doubled = est_cfg.with_updates(psi_scale=2.0)
        m_hat = solve_m_hat(build_score(sim_sample, sim_fit, est_cfg, 0.0), est_cfg)

        assert estimate_sigma(sim_sample, sim_fit, doubled, 0.0, m_hat) == pytest.approx(
            estimate_sigma(sim_sample, sim_fit, est_cfg, 0.0, m_hat), rel=1e-12
        )


class TestConfidenceInterval:
    def test_normal_quantile(self):
        assert normal_quantile(0.05) == pytest.approx(1.959964, abs=1e-6)

    @pytest.mark.parametrize("eta", [0.0, 1.0, -0.1])
    def test_rejects_bad_level(self, eta):
        with pytest.raises(ValueError):
            normal_quantile(eta)

    def test_zero_sigma(self, est_cfg):
        assert confidence_interval(2.0, 0.0, 0.05, 100, est_cfg) == (2.0, 2.0)

    def test_width(self, est_cfg):
        lo, hi = confidence_interval(0.0, 0.7, 0.05, 300, est_cfg)

        assert hi - lo == pytest.approx(2 * 1.959964 * 0.7 / math.sqrt(300 * est_cfg.bandwidth), rel=1e-6)


class TestOracleScore:
    def test_unit_guards_reproduce_the_score(self, est_cfg):
        fit = fit_survival(DEGENERATE)
        score = build_score(DEGENERATE, fit, est_cfg, 0.0)

        def one(z):
            return np.ones_like(z)

        for theta in (2.0, 3.0, 4.0):
            oracle = oracle_score(DEGENERATE, 1.0, one, one, est_cfg, 0.0, theta)
            assert oracle == pytest.approx(score_value(score, est_cfg, theta), rel=1e-10)

    def test_single_observation_symmetry(self, est_cfg):
        value = oracle_score(SINGLE, 0.7, lambda z: 0.3 * np.ones_like(z), lambda z: 0.9 * np.ones_like(z), est_cfg, 0.3, 1.7)

        assert value == 0.0


class TestService:
    def test_estimate(self, sim_sample, sim_fit, est_cfg):
        result = RegressionService(sim_sample, est_cfg, sim_fit).estimate(0.0)

        assert result.ci_lo < result.m_hat < result.ci_hi
        assert result.sigma_hat > 0
        assert result.scale == pytest.approx(math.sqrt(sim_sample.n * est_cfg.bandwidth))

    def test_sparse_point_is_not_estimable(self):
        cfg = EstimatorConfig(kernel="epanechnikov", bandwidth=0.1, min_effective=5)

        with pytest.raises(NotEstimable):
            RegressionService(SPARSE, cfg).estimate(0.01)

    def test_grid_rows_keep_failures(self):
        cfg = EstimatorConfig(kernel="epanechnikov", bandwidth=0.1)

        rows = RegressionService(SPARSE, cfg).estimate_grid([1.02, 5.0])

        assert rows[0].status == "ok"
        assert rows[1].status == "no_effective_data"
        assert rows[1].m_hat is None

    def test_level_override(self, sim_sample, sim_fit, est_cfg):
        service = RegressionService(sim_sample, est_cfg, sim_fit)

        narrow, wide = service.estimate(0.0, eta=0.1), service.estimate(0.0, eta=0.01)

        assert wide.width > narrow.width
