import math

import numpy as np
import pytest

from perisem.estimator import CoefficientEstimates
from perisem.noise import (GAUSSIAN, RADEMACHER, NoiseParams, sigma_star,
                           simulate_coefficient_noise_batch)
from perisem.risk import (DEFAULT_J_TAIL, analytic_risk, c2_star_bound,
                          evaluate_selection_on_estimates, kappa_n,
                          mise_monte_carlo, oracle_bound, oracle_factor, psi_n,
                          report_csv_text, sigma_hat_error_mc,
                          tail_remainder_bound, verify_oracle)
from perisem.selection import ESTIMATED, KNOWN, SelectionConfig, select
from perisem.signals import catalogue_signal
from perisem.weights import WeightSequence, build_grid

STANDARD = NoiseParams(1.0, 1.0, 1.0, RADEMACHER)


def known_cfg(sigma, rho=0.1):
    return SelectionConfig(rho=rho, sigma_mode=KNOWN, sigma=sigma)


class TestAnalyticRisk:
    def test_zero_weights(self):
        signal = catalogue_signal("two_mode")
        got = analytic_risk(WeightSequence(np.array([])), signal, 1.0, 100, 16)
        assert got == pytest.approx(1.09, abs=1e-14)

    def test_pure_variance(self):
        gamma = WeightSequence(np.ones(7))
        got = analytic_risk(gamma, catalogue_signal("zero"), 2.0, 100, 16)
        assert got == pytest.approx(2.0 * 7 / 100)

    def test_hand_value(self):
        signal = catalogue_signal("single_mode")
        gamma = WeightSequence(np.array([0.0, 0.5]))
        got = analytic_risk(gamma, signal, 1.0, 100, 16)
        assert got == pytest.approx(0.2525)

    def test_tail_must_cover_support(self):
        with pytest.raises(ValueError):
            analytic_risk(WeightSequence(np.ones(20)), catalogue_signal("zero"),
                          1.0, 100, 10)

    def test_tail_remainder_bound(self):
        signal = catalogue_signal("sine")
        assert tail_remainder_bound(signal, 512) == pytest.approx(
            4.0 * 16.0 / 512.0, rel=1e-6)


class TestConstants:
    def test_c2_no_jumps(self):
        assert c2_star_bound(NoiseParams(1.5, 0.0, 1.0)) == pytest.approx(
            4.0 * 1.5 ** 4)

    def test_c2_pure_jump_rademacher(self):
        assert c2_star_bound(NoiseParams(0.0, 1.0, 1.0, RADEMACHER)) == 8.0

    def test_c2_mixed_gaussian(self):
        assert c2_star_bound(NoiseParams(1.0, 1.0, 1.0, GAUSSIAN)) == 40.0

    def test_psi_basic(self):
        assert psi_n(0.1, 1.0, 1.0, 0.0, 0.0, 1) == pytest.approx(28.5714285714,
                                                                  rel=1e-9)

    def test_psi_linear_in_nu_without_c1(self):
        one = psi_n(0.1, 2.0, 2.0, 0.0, 5.0, 1)
        two = psi_n(0.1, 2.0, 2.0, 0.0, 5.0, 2)
        assert two == pytest.approx(2.0 * one)

    def test_psi_matches_direct_substitution(self):
        # sigma = sigma*, c1 = 0 instantiation
        s, c2, nu, rho = 2.0, 24.0, 141, 0.1
        want = (2.0 * s * s * nu + 2.0 * nu * c2) / (s * rho * (1 - 3 * rho))
        assert psi_n(rho, s, s, 0.0, c2, nu) == pytest.approx(want, rel=1e-12)

    def test_psi_invalid_rho(self):
        with pytest.raises(ValueError):
            psi_n(0.5, 1.0, 1.0, 0.0, 0.0, 1)

    def test_kappa_constant_signal(self):
        const = catalogue_signal("zero")
        assert kappa_n(const, 1.0, 1.0, 0.0, 0.0, 100) == pytest.approx(1.0)

    def test_kappa_sine(self):
        got = kappa_n(catalogue_signal("sine"), 1.0, 1.0, 0.0, 8.0, 10_000)
        assert got == pytest.approx(65.0 + math.sqrt(8.0) + 1.6, abs=2e-5)

    def test_kappa_decreasing_in_n(self):
        sig = catalogue_signal("sine")
        assert kappa_n(sig, 1.0, 1.0, 0.0, 8.0, 10_000) < \
            kappa_n(sig, 1.0, 1.0, 0.0, 8.0, 100)


class TestOracleBound:
    def test_factor_value(self):
        assert oracle_factor(0.1) == pytest.approx(1.28 / 0.7, rel=1e-12)

    def test_factor_limit_at_zero(self):
        assert oracle_factor(1e-4) < 1.001

    def test_factor_blows_up(self):
        assert oracle_factor(0.33) > 100.0
        rhos = np.linspace(0.01, 0.33, 30)
        vals = [oracle_factor(r) for r in rhos]
        assert all(a < b for a, b in zip(vals, vals[1:]))

    def test_known_mode_additive_is_psi(self):
        factor, additive, rhs = oracle_bound(0.1, 100, 10, 0.5, 123.0,
                                             sigma_abs_err_bound=0.0)
        assert additive == 123.0
        assert rhs == pytest.approx(factor * 0.5 + 1.23)

    def test_estimated_mode_adds_sigma_term(self):
        _, additive, _ = oracle_bound(0.1, 100, 10, 0.5, 123.0,
                                      sigma_abs_err_bound=0.2)
        assert additive == pytest.approx(123.0 + 6.0 * 10 * 0.2 / 0.7)

    def test_smoothness_variant_route(self):
        _, additive, _ = oracle_bound(0.1, 100, 10, 0.5, 123.0, kappa=50.0,
                                      variant="smoothness")
        want = 2.0 * 123.0 + 2.0 * 0.1 * 0.9 * 10 * 50.0 / (0.7 * 10.0)
        assert additive == pytest.approx(want)
        with pytest.raises(ValueError):
            oracle_bound(0.1, 100, 10, 0.5, 123.0, variant="smoothness")


class TestBatchedSelection:
    def test_matches_single_dataset_rule(self):
        grid = build_grid(200)
        signal = catalogue_signal("two_component")
        theta = signal.fourier_coefficients(DEFAULT_J_TAIL)
        xi = simulate_coefficient_noise_batch(STANDARD, 200, 200, master_seed=41,
                                              replicates=12)
        theta_hat = theta[:200] + xi / np.sqrt(200)
        cfg = SelectionConfig(rho=0.1, sigma_mode=ESTIMATED)
        risks, chosen, sigma_vec = evaluate_selection_on_estimates(
            theta_hat, theta, grid, cfg, 200)
        from perisem.estimator import empirical_error
        for r in range(12):
            est = CoefficientEstimates(theta_hat[r], 200)
            result = select(est, grid, cfg)
            assert grid.labels[chosen[r]] == result.chosen.label
            assert sigma_vec[r] == pytest.approx(result.sigma_used, rel=1e-12)
            want = empirical_error(result.chosen, est, signal, DEFAULT_J_TAIL)
            assert risks[r] == pytest.approx(want, rel=1e-10)

    def test_deterministic_pipeline_on_exact_coefficients(self):
        # zero noise: selection and its risk are a deterministic function
        grid = build_grid(100)
        signal = catalogue_signal("two_mode")
        theta = signal.fourier_coefficients(DEFAULT_J_TAIL)
        cfg = known_cfg(0.01)
        risks, chosen, _ = evaluate_selection_on_estimates(
            theta[:100][None, :], theta, grid, cfg, 100)
        gamma = grid.members[chosen[0]]
        g = np.zeros(DEFAULT_J_TAIL)
        g[:gamma.support_end] = gamma.values
        want = np.sum((1.0 - g) ** 2 * theta ** 2)
        assert risks[0] == pytest.approx(want, rel=1e-12)


class TestMonteCarlo:
    def test_replicate_floor(self):
        grid = build_grid(100)
        with pytest.raises(ValueError):
            mise_monte_carlo(catalogue_signal("zero"), STANDARD, 100, grid,
                             known_cfg(2.0), 50, seed=0)

    def test_zero_signal_risk_bounded_by_variance_budget(self):
        # selected risk <= sigma* mu / n up to Monte Carlo error
        n, reps = 100, 2000
        grid = build_grid(n)
        mean, se, hist = mise_monte_carlo(catalogue_signal("zero"), STANDARD, n,
                                          grid, known_cfg(2.0), reps, seed=42)
        assert mean <= sigma_star(STANDARD) * grid.mu / n + 5.0 * se
        assert hist.sum() == reps

    def test_selected_risk_dominates_oracle(self):
        n, reps = 200, 1000
        grid = build_grid(n)
        signal = catalogue_signal("two_mode")
        mean, se, _ = mise_monte_carlo(signal, STANDARD, n, grid,
                                       known_cfg(2.0), reps, seed=43)
        table = [analytic_risk(g, signal, sigma_star(STANDARD), n) for g in grid.members]
        assert mean >= min(table) - 3.0 * se

    def test_fixed_weights_match_analytic_risk(self):
        # Monte Carlo mean of the empirical error against the closed form
        n, reps = 50, 2000
        signal = catalogue_signal("two_component")
        theta = signal.fourier_coefficients(DEFAULT_J_TAIL)
        probes = [WeightSequence(np.ones(4)), WeightSequence(np.full(8, 0.5)),
                  WeightSequence(1.0 / np.arange(1.0, 13.0))]
        j_sim = max(p.support_end for p in probes)
        xi = simulate_coefficient_noise_batch(STANDARD, n, j_sim, master_seed=44,
                                              replicates=reps)
        theta_hat = theta[:j_sim] + xi / np.sqrt(n)
        for probe in probes:
            s = probe.support_end
            g = probe.values
            errs = np.sum((g * theta_hat[:, :s] - theta[:s]) ** 2, axis=1)
            errs += np.sum(theta[s:] ** 2)
            want = analytic_risk(probe, signal, sigma_star(STANDARD), n)
            se = errs.std(ddof=1) / np.sqrt(reps)
            assert abs(errs.mean() - want) < 4.0 * se

    def test_threads_do_not_change_results(self):
        n, reps = 100, 400
        grid = build_grid(n)
        signal = catalogue_signal("sine")
        cfg = SelectionConfig(rho=0.1, sigma_mode=ESTIMATED)
        a = mise_monte_carlo(signal, STANDARD, n, grid, cfg, reps, seed=45, threads=1)
        b = mise_monte_carlo(signal, STANDARD, n, grid, cfg, reps, seed=45, threads=4)
        assert a[0] == b[0] and a[1] == b[1] and np.array_equal(a[2], b[2])


class TestSigmaHatError:
    def test_zero_signal_specialization(self):
        # with S = 0 the bound reduces to (sigma + sqrt(c2*)) / sqrt(n)
        n, reps = 400, 500
        mean, se = sigma_hat_error_mc(catalogue_signal("zero"), STANDARD, n,
                                      reps, seed=46)
        bound = (sigma_star(STANDARD) + math.sqrt(c2_star_bound(STANDARD))) / math.sqrt(n)
        assert mean <= bound + 5.0 * se

    def test_error_shrinks_with_horizon(self):
        small_n = sigma_hat_error_mc(catalogue_signal("sine"), STANDARD, 100,
                                     400, seed=47)
        large_n = sigma_hat_error_mc(catalogue_signal("sine"), STANDARD, 2500,
                                     400, seed=47)
        assert large_n[0] < small_n[0]


class TestVerifyOracle:
    def test_bound_holds_and_report_is_consistent(self):
        n, reps = 200, 400
        grid = build_grid(n)
        signal = catalogue_signal("sine")
        report = verify_oracle(signal, STANDARD, n, grid,
                               SelectionConfig(rho=0.1, sigma_mode=ESTIMATED),
                               reps, seed=48)
        assert report.holds
        assert report.oracle_risk == min(r for _, _, r in report.per_gamma_risk)
        assert report.factor > 1.0
        assert report.rhs == pytest.approx(
            report.factor * report.oracle_risk + report.additive / n)
        assert report.constants["nu"] == grid.nu
        assert report.constants["c1_star"] == 0.0
        assert all(v >= 0.0 for v in report.constants.values() if v is not None)
        assert sum(report.chosen_histogram) == reps

    def test_known_mode_bound_is_tighter(self):
        n, reps = 200, 400
        grid = build_grid(n)
        signal = catalogue_signal("sine")
        est_rep = verify_oracle(signal, STANDARD, n, grid,
                                SelectionConfig(rho=0.1, sigma_mode=ESTIMATED),
                                reps, seed=49)
        known_rep = verify_oracle(signal, STANDARD, n, grid,
                                  known_cfg(sigma_star(STANDARD)), reps, seed=49)
        assert known_rep.rhs <= est_rep.rhs
        assert known_rep.additive == pytest.approx(known_rep.constants["psi_n"])

    def test_psi_ignores_horizon_on_frozen_grid(self):
        # with c1* = 0 and a fixed family, the psi constant has no n dependence
        grid_small = build_grid(500, k_star=2, epsilon=0.25)
        grid_large = build_grid(5000, k_star=2, epsilon=0.25)
        assert grid_small.nu == grid_large.nu
        c2 = c2_star_bound(STANDARD)
        s = sigma_star(STANDARD)
        assert psi_n(0.1, s, s, 0.0, c2, grid_small.nu) == \
            psi_n(0.1, s, s, 0.0, c2, grid_large.nu)

    def test_csv_rendering(self):
        n, reps = 100, 200
        grid = build_grid(n)
        report = verify_oracle(catalogue_signal("two_mode"), STANDARD, n, grid,
                               known_cfg(2.0), reps, seed=50)
        text = report_csv_text([report])
        lines = text.strip().splitlines()
        assert lines[0] == "n,rho,sigma_mode,oracle_risk,selected_risk,se," \
                           "factor,additive,rhs,holds"
        assert lines[1].startswith("100,") and lines[1].endswith(",true")
        payload = report.to_json()
        assert '"holds": true' in payload
