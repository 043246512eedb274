import numpy as np
import pytest

import diffgames as dg

from conftest import (HAMILTONIAN_GAMES, POTENTIAL_GAMES, random_orthogonal,
                      random_realizable_game, random_symmetric, rel_err)


class TestSpecs:
    def test_kind_checked(self):
        with pytest.raises(ValueError):
            dg.AdjusterSpec("newton")

    def test_lam_finite(self):
        with pytest.raises(ValueError):
            dg.AdjusterSpec("sga", lam=np.inf)

    def test_epsilon_nonnegative(self):
        with pytest.raises(ValueError):
            dg.AdjusterSpec("sga-aligned", epsilon=-1.0)

    def test_stop_window_within_budget(self):
        with pytest.raises(ValueError):
            dg.StopCriteria(max_iters=5, loss_window=10)


class TestDirection:
    def test_sga_adds_rotational_pull(self):
        game = dg.catalog_game("fig3_weak_attractor")
        out = dg.direction(dg.AdjusterSpec("sga", lam=1.0), game, [1.0, 1.0])
        assert np.allclose(out, [101.0, 101.0])

    def test_consensus_closed_form_on_shared_loss_game(self):
        game = dg.catalog_game("example5", kappa=10.0)
        spec = dg.AdjusterSpec("consensus", lam=0.05)
        rng = np.random.default_rng(3)
        for _ in range(10):
            w = rng.standard_normal(2)
            # kappa (lam kappa - 1) w = -5 w for kappa=10, lam=0.05
            assert np.allclose(dg.direction(spec, game, w), -5.0 * w)

    @pytest.mark.parametrize("name", POTENTIAL_GAMES)
    def test_sga_reduces_to_field_without_rotation(self, name):
        game = dg.catalog_game(name)
        rng = np.random.default_rng(5)
        for lam in (0.5, 1.0, -2.0):
            spec = dg.AdjusterSpec("sga", lam=lam)
            w = rng.standard_normal(game.dim)
            xi = dg.simultaneous_gradient(game, w).xi
            assert np.array_equal(dg.direction(spec, game, w), xi)

    def test_simgd_is_the_field(self):
        game = dg.catalog_game("fig3_weak_attractor")
        w = [0.3, -0.7]
        xi = dg.simultaneous_gradient(game, w).xi
        assert np.array_equal(dg.direction(dg.AdjusterSpec("simgd"), game, w), xi)

    def test_hamiltonian_descent_follows_grad_h(self):
        game = dg.catalog_game("example1", payoff=np.eye(2))
        w = np.array([1.0, -0.5, 0.25, 2.0])
        expected = dg.grad_hamiltonian(game, w)
        spec = dg.AdjusterSpec("hamiltonian-descent")
        assert np.allclose(dg.direction(spec, game, w), expected)

    def test_omd_extrapolates_previous_field(self):
        game = dg.catalog_game("fig4_bilinear")
        spec = dg.AdjusterSpec("omd")
        w = np.array([1.0, 0.0])
        xi = dg.simultaneous_gradient(game, w).xi
        assert np.array_equal(dg.direction(spec, game, w), xi)  # empty history
        prev = np.array([0.5, 0.5])
        assert np.allclose(dg.direction(spec, game, w, prev_xi=prev),
                           2.0 * xi - prev)

    def test_aligned_consensus_flips_against_repellor(self):
        game = dg.catalog_game("example5", kappa=10.0)
        spec = dg.AdjusterSpec("aligned-consensus", lam=0.5)
        w = np.array([1.0, 1.0])
        xi = dg.simultaneous_gradient(game, w).xi
        gh = dg.grad_hamiltonian(game, w)
        # probe is negative here, so the adjustment must subtract grad H
        assert dg.stability_probe(game, w) < 0
        assert np.allclose(dg.direction(spec, game, w), xi - 0.5 * gh)

    def test_sga_aligned_uses_sign(self):
        game = dg.catalog_game("example6", epsilon=0.1)
        spec = dg.AdjusterSpec("sga-aligned", lam=1.0, epsilon=0.1)
        w = [2.0, 0.0]
        xi = dg.simultaneous_gradient(game, w).xi
        adj = dg.sym_adjustment(game, w)
        assert np.allclose(dg.direction(spec, game, w), xi - adj)


class TestStep:
    def test_euler_arithmetic(self):
        game = dg.catalog_game("fig3_weak_attractor")
        w_new, diag = dg.step(dg.AdjusterSpec("simgd"), game, [1.0, 1.0], 0.01)
        assert np.allclose(w_new, [0.89, 1.09])
        assert diag.xi_norm == pytest.approx(np.sqrt(11.0 ** 2 + 81.0))
        assert diag.finite

    def test_fixed_point_is_stationary(self):
        game = dg.catalog_game("example5")
        for kind in dg.KINDS:
            spec = dg.AdjusterSpec(kind)
            w_new, _ = dg.step(spec, game, [0.0, 0.0], 0.1)
            assert np.all(w_new == 0.0)

    def test_omd_first_step(self):
        game = dg.catalog_game("fig4_bilinear")
        w_new, _ = dg.step(dg.AdjusterSpec("omd"), game, [1.0, 0.0], 0.5)
        assert np.allclose(w_new, [1.0, 0.5])

    def test_rejects_nonpositive_eta(self):
        game = dg.catalog_game("example5")
        with pytest.raises(ValueError):
            dg.step(dg.AdjusterSpec("simgd"), game, [1.0, 1.0], 0.0)


class TestRun:
    def test_descent_on_squared_field_reaches_equilibrium(self):
        game = dg.catalog_game("example1", payoff=np.eye(2))
        rng = np.random.default_rng(11)
        w0 = rng.standard_normal(4)
        w0 /= np.linalg.norm(w0)
        stop = dg.StopCriteria(max_iters=5000, loss_threshold=0.0,
                               xi_threshold=1e-3)
        traj = dg.run(dg.AdjusterSpec("hamiltonian-descent"), game, w0, 0.1, stop)
        assert traj.outcome == dg.CONVERGED
        assert np.linalg.norm(traj.final_point) < 1e-3

    def test_plain_descent_cycles_forever(self):
        game = dg.catalog_game("example1", payoff=np.eye(2))
        w0 = np.array([1.0, 0.0, 0.0, 1.0]) / np.sqrt(2.0)
        stop = dg.StopCriteria(max_iters=500, loss_threshold=0.0,
                               xi_threshold=1e-3)
        traj = dg.run(dg.AdjusterSpec("simgd"), game, w0, 1e-3, stop)
        assert traj.outcome == dg.MAX_ITERS
        # the field norm barely moves: conservation up to Euler error
        assert abs(traj.xi_norms[-1] - traj.xi_norms[0]) <= 0.01 * traj.xi_norms[0]

    def test_consensus_reaches_shared_maximum(self):
        game = dg.catalog_game("example5", kappa=10.0)
        stop = dg.StopCriteria(max_iters=1000, loss_threshold=0.0,
                               xi_threshold=1e-3)
        traj = dg.run(dg.AdjusterSpec("consensus", lam=0.5), game,
                      [1.0, 1.0], 0.01, stop)
        assert traj.outcome == dg.CONVERGED
        assert np.linalg.norm(traj.final_point) < 1e-4

    def test_divergence_detected_by_norm(self):
        game = dg.catalog_game("fig3_weak_attractor")
        stop = dg.StopCriteria(max_iters=10000, loss_threshold=0.0)
        traj = dg.run(dg.AdjusterSpec("simgd"), game, [0.5, 0.5], 0.1, stop)
        assert traj.outcome == dg.DIVERGED
        assert np.linalg.norm(traj.points[-1]) > 1e6

    def test_window_convergence_criterion(self):
        game = dg.catalog_game("fig4_bilinear")
        stop = dg.StopCriteria(max_iters=250)
        traj = dg.run(dg.AdjusterSpec("sga", lam=1.0), game, [0.5, 0.5], 0.5, stop)
        assert traj.outcome == dg.CONVERGED
        means = traj.mean_abs_losses()
        window = means[traj.outcome_iteration - 9:traj.outcome_iteration + 1]
        assert np.mean(window) < 0.01

    def test_diagnostics_shapes(self):
        game = dg.catalog_game("fig4_bilinear")
        stop = dg.StopCriteria(max_iters=50, loss_threshold=0.0)
        traj = dg.run(dg.AdjusterSpec("omd"), game, [0.5, 0.5], 0.1, stop)
        iters = traj.losses.shape[0]
        assert traj.xi_norms.shape == (iters,)
        assert traj.probes.shape == (iters,)
        assert traj.signs.shape == (iters,)
        assert traj.points.shape[0] == iters + 1
        assert traj.losses.shape[1] == game.num_players


class TestCompatibilityProperties:
    def test_field_alignment_preserved(self):
        # <adjusted, xi> = |xi|^2 for every weight: the rotation term is
        # orthogonal to the field
        rng = np.random.default_rng(13)
        partition = dg.PlayerPartition((2, 2))
        for _ in range(200):
            game = random_realizable_game(rng, partition, -1.0, 1.0)
            w = rng.standard_normal(4)
            ev = dg.simultaneous_gradient(game, w)
            lam = rng.uniform(-5, 5)
            vec = dg.direction(dg.AdjusterSpec("sga", lam=lam), game, w)
            assert abs(vec @ ev.xi - ev.norm_sq) <= 1e-9 * max(ev.norm_sq, 1.0)

    @pytest.mark.parametrize("name", POTENTIAL_GAMES)
    def test_no_rotation_means_no_adjustment(self, name):
        game = dg.catalog_game(name)
        rng = np.random.default_rng(17)
        for _ in range(50):
            w = rng.standard_normal(game.dim)
            xi = dg.simultaneous_gradient(game, w).xi
            vec = dg.direction(dg.AdjusterSpec("sga", lam=1.0), game, w)
            assert np.array_equal(vec, xi)

    @pytest.mark.parametrize("name", HAMILTONIAN_GAMES)
    def test_pure_rotation_descends_squared_field(self, name):
        game = dg.catalog_game(name)
        rng = np.random.default_rng(19)
        for lam in (0.5, 1.0, 2.0):
            spec = dg.AdjusterSpec("sga", lam=lam)
            for _ in range(30):
                w = rng.standard_normal(game.dim)
                gh = dg.grad_hamiltonian(game, w)
                vec = dg.direction(spec, game, w)
                gh_sq = float(gh @ gh)
                assert abs(vec @ gh - lam * gh_sq) <= 1e-9 * max(gh_sq, 1.0)


class TestSpectralOracle:
    def test_weak_attractor_regimes(self):
        game = dg.catalog_game("fig3_weak_attractor")
        spec = dg.AdjusterSpec("simgd")
        rho = {eta: dg.spectral_oracle(spec, game, eta).spectral_radius
               for eta in (0.01, 0.032, 0.1)}
        assert rho[0.01] == pytest.approx(np.sqrt(0.99 ** 2 + 0.01), rel=1e-12)
        assert rho[0.01] < 1 < rho[0.032] < rho[0.1]

    def test_sga_threshold_on_bilinear(self):
        game = dg.catalog_game("fig4_bilinear")
        spec = dg.AdjusterSpec("sga", lam=1.0)
        for eta in (0.1, 0.5, 0.9, 0.99, 1.01, 1.5):
            pred = dg.spectral_oracle(spec, game, eta)
            assert pred.spectral_radius == pytest.approx(
                np.sqrt((1 - eta) ** 2 + eta ** 2), rel=1e-12)
            assert pred.predicts_convergence == (eta < 1.0)

    def test_zero_hessian_is_neutral(self):
        p = dg.PlayerPartition((1, 1))
        game = dg.QuadraticGame(p, [np.zeros((2, 2)), np.zeros((2, 2))])
        pred = dg.spectral_oracle(dg.AdjusterSpec("simgd"), game, 0.3)
        assert pred.spectral_radius == 1.0

    def test_omd_uses_companion_form(self):
        game = dg.catalog_game("fig7_four_player")
        m = dg.iteration_matrix(dg.AdjusterSpec("omd"), game, 0.1)
        assert m.shape == (8, 8)

    def test_rejects_offsets(self):
        game = dg.catalog_game("example3")  # shifted equilibrium
        with pytest.raises(ValueError, match="offset"):
            dg.spectral_oracle(dg.AdjusterSpec("simgd"), game, 0.1)

    def test_rejects_aligned_rules(self):
        game = dg.catalog_game("fig4_bilinear")
        with pytest.raises(ValueError):
            dg.spectral_oracle(dg.AdjusterSpec("sga-aligned"), game, 0.1)
        with pytest.raises(ValueError):
            dg.spectral_oracle(dg.AdjusterSpec("aligned-consensus"), game, 0.1)

    def test_rejects_non_quadratic_games(self):
        p = dg.PlayerPartition((1, 1))
        game = dg.make_game(
            p,
            losses=[lambda w: w[0] * w[1], lambda w: -w[0] * w[1]],
            gradients=[lambda w: w[1:2], lambda w: -w[0:1]],
        )
        with pytest.raises(ValueError):
            dg.spectral_oracle(dg.AdjusterSpec("simgd"), game, 0.1)


class TestOracleAgreement:
    CASES = [
        ("fig3_weak_attractor", {}, "simgd", 1.0),
        ("fig3_weak_attractor", {}, "sga", 0.1),
        ("fig4_bilinear", {}, "sga", 1.0),
        ("fig4_bilinear", {}, "omd", 1.0),
        ("example5", {}, "consensus", 0.05),
        ("example5", {}, "simgd", 1.0),
        ("fig7_four_player", {"epsilon": 0.01}, "sga", 1.0),
        ("fig7_four_player", {"epsilon": 0.01}, "omd", 1.0),
        ("example1", {}, "hamiltonian-descent", 1.0),
    ]

    @pytest.mark.parametrize("name,params,kind,lam", CASES)
    def test_simulation_matches_prediction(self, name, params, kind, lam):
        game = dg.catalog_game(name, **params)
        spec = dg.AdjusterSpec(kind, lam=lam)
        stop = dg.StopCriteria(max_iters=4000, loss_threshold=0.0,
                               xi_threshold=1e-6)
        rng = np.random.default_rng(23)
        w0 = rng.standard_normal(game.dim)
        w0 /= np.linalg.norm(w0)
        for eta in np.geomspace(0.002, 0.6, 9):
            rho = dg.spectral_oracle(spec, game, eta).spectral_radius
            if not (rho <= 0.99 or rho >= 1.01):
                continue  # marginal band: budget-limited, no verdict required
            traj = dg.run(spec, game, w0, float(eta), stop)
            if rho <= 0.99:
                assert traj.outcome == dg.CONVERGED, (name, kind, eta, rho)
            else:
                assert traj.outcome != dg.CONVERGED, (name, kind, eta, rho)


class TestStepSizeDescentBound:
    def test_quadratic_descent_inequality(self):
        # stepping along any direction of matching norm with the angle-scaled
        # optimal rate drops a convex quadratic by cos^2(theta)/(2L) |grad|^2
        rng = np.random.default_rng(29)
        for _ in range(200):
            d = int(rng.integers(2, 7))
            m = random_symmetric(rng, d, 0.05, 3.0)
            b = rng.standard_normal(d)
            lip = float(np.linalg.eigvalsh(m)[-1])

            def f(x):
                return 0.5 * x @ m @ x + b @ x

            w = rng.standard_normal(d)
            grad = m @ w + b
            gnorm = float(np.linalg.norm(grad))
            if gnorm < 1e-9:
                continue
            v = rng.standard_normal(d)
            v *= gnorm / np.linalg.norm(v)
            cos = float(grad @ v) / (gnorm * gnorm)
            eta = cos / lip
            drop = cos * cos / (2.0 * lip) * gnorm * gnorm
            assert f(w - eta * v) <= f(w) - drop + 1e-12

    def test_unit_ball_is_not_left(self):
        rng = np.random.default_rng(31)
        for _ in range(1000):
            d = int(rng.integers(2, 7))
            w = rng.standard_normal(d)
            w /= np.linalg.norm(w)
            xi = rng.standard_normal(d)
            xi /= np.linalg.norm(xi)
            dot = float(w @ xi)
            if dot <= 0:
                xi, dot = -xi, -dot
            eta = rng.uniform(0.0, 2.0 * dot)
            assert np.linalg.norm(w - eta * xi) <= 1.0 + 1e-12
