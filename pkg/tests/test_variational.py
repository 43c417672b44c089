import math

import numpy as np
import pytest

from specldp import variational as V
from specldp.streams import derive_stream

THETA_GRID = (1.1, 1.25, 1.5, 2.0, 3.0)


class TestMotzkinStraus:
    def test_values(self):
        assert V.motzkin_straus_value(2) == 0.5
        assert V.motzkin_straus_value(3) == pytest.approx(2.0 / 3.0, rel=1e-15)

    def test_increasing_toward_one(self):
        vals = [V.motzkin_straus_value(k) for k in range(2, 50)]
        assert all(b > a for a, b in zip(vals, vals[1:]))
        assert vals[-1] < 1.0

    def test_domain(self):
        with pytest.raises(ValueError):
            V.motzkin_straus_value(1)


class TestLagrangianSolver:
    @pytest.mark.parametrize("theta", THETA_GRID)
    def test_pair_closed_form(self, theta):
        assert V.clique_lagrangian(theta, 2).value == pytest.approx(2.0 ** (1 - 2 * theta), abs=1e-9)

    def test_small_support_closed_form(self):
        # uniform maximizer regime: k <= (2t-1)/(2t-2)
        assert V.clique_lagrangian(1.25, 3).value == pytest.approx(3**-0.5 - 3**-1.5, abs=1e-10)
        assert V.clique_lagrangian(1.1, 5).value == pytest.approx(5**-0.2 - 5**-1.2, abs=1e-10)

    def test_theta_one_rejected(self):
        with pytest.raises(ValueError):
            V.clique_lagrangian(1.0, 3)

    def test_solution_invariant(self):
        for theta in THETA_GRID:
            for k in range(2, 8):
                s = V.clique_lagrangian(theta, k)
                recomputed = (
                    s.k1 * (s.k1 - 1) * s.x ** (2 * theta)
                    + s.k2 * (s.k2 - 1) * s.y ** (2 * theta)
                    + 2 * s.k1 * s.k2 * (s.x * s.y) ** theta
                )
                assert s.value == pytest.approx(recomputed, abs=1e-12)
                assert s.k1 * s.x + s.k2 * s.y == pytest.approx(1.0, abs=1e-12)
                assert s.k1 + s.k2 <= k

    def test_monotone_in_k(self):
        for theta in THETA_GRID:
            vals = [V.clique_lagrangian(theta, k).value for k in range(2, 31)]
            assert all(b >= a - 1e-10 for a, b in zip(vals, vals[1:]))

    def test_dominated_by_global_bound(self):
        for theta in THETA_GRID:
            bound = V.lagrangian_global_bound(theta)
            for k in range(2, 31):
                assert V.clique_lagrangian(theta, k).value <= bound + 1e-10


class TestClosedFormAndBound:
    def test_global_bound_values(self):
        assert V.lagrangian_global_bound(1.5) == pytest.approx(0.25, rel=1e-15)
        assert V.lagrangian_global_bound(2.0) == pytest.approx(4.0 / 27.0, rel=1e-14)

    def test_closed_form_branches(self):
        assert V.lagrangian_closed_form(1.5, 2) == pytest.approx(0.25, rel=1e-15)
        assert V.lagrangian_closed_form(1.1, 5) == pytest.approx(5**-0.2 - 5**-1.2, rel=1e-14)
        assert V.lagrangian_closed_form(3.0, 3) is None

    def test_closed_form_matches_solver(self):
        for theta in THETA_GRID:
            for k in range(2, 9):
                cf = V.lagrangian_closed_form(theta, k)
                if cf is not None:
                    assert V.clique_lagrangian(theta, k).value == pytest.approx(cf, abs=1e-8)


class TestBruteForce:
    def test_pair_value(self):
        assert V.clique_lagrangian_bruteforce(1.5, 2, grid=10**4) == pytest.approx(0.25, abs=1e-6)

    def test_matches_solver_spotcheck(self):
        assert V.clique_lagrangian_bruteforce(2.0, 3) == pytest.approx(
            V.clique_lagrangian(2.0, 3).value, abs=1e-5
        )

    def test_is_lower_bound(self):
        for theta in (1.25, 2.0):
            for k in (2, 4, 6):
                assert (
                    V.clique_lagrangian_bruteforce(theta, k)
                    <= V.clique_lagrangian(theta, k).value + 1e-9
                )

    def test_budget(self):
        with pytest.raises(V.BruteForceBudgetError):
            V.clique_lagrangian_bruteforce(1.5, 7)

    def test_simplex_projection(self):
        rng = derive_stream(3)
        pts = rng.standard_normal((50, 5))
        proj = V.project_simplex_rows(pts)
        assert np.all(proj >= 0)
        assert np.allclose(proj.sum(axis=1), 1.0, atol=1e-12)
        # projection is the identity on the simplex
        onsimplex = np.abs(rng.standard_normal((20, 5)))
        onsimplex /= onsimplex.sum(axis=1, keepdims=True)
        assert np.allclose(V.project_simplex_rows(onsimplex), onsimplex, atol=1e-12)


class TestPlateau:
    def test_plateau_at_pair(self):
        assert V.lagrangian_plateau(1.5, 30) == 2

    def test_no_plateau_when_truncated(self):
        assert V.lagrangian_plateau(1.01, 4) is None

    def test_unobservable_with_tiny_range(self):
        assert V.lagrangian_plateau(1.5, 2) is None


class TestPlantingCost:
    @pytest.mark.parametrize("alpha", [1.1, 1.3, 1.5, 1.7, 1.9])
    @pytest.mark.parametrize("delta", [0.1, 0.5, 1.0, 2.0])
    def test_pair_identity(self, alpha, delta):
        assert V.clique_planting_cost(alpha, delta, 2) == pytest.approx(
            (1 + delta) ** alpha - 1, abs=1e-12
        )

    def test_pair_identity_value(self):
        assert V.clique_planting_cost(1.5, 1.0, 2) == pytest.approx(2**1.5 - 1, abs=1e-12)

    def test_triple_at_plateau(self):
        # at alpha = 3/2 the Lagrangian is constant 1/4, so the k = 3 cost is
        # 0 + (1/2) * (1+d)^1.5 * (1/4)^(-1/2) = (1+d)^1.5
        assert V.clique_planting_cost(1.5, 0.0, 3) == pytest.approx(1.0, abs=1e-10)

    def test_domain(self):
        with pytest.raises(ValueError):
            V.clique_planting_cost(2.5, 1.0, 2)


class TestHeavyRate:
    def test_alpha_below_one(self):
        rate, argmin = V.heavy_upper_rate(0.5, 1.0)
        assert rate == pytest.approx(2**0.5 - 1, rel=1e-14)
        assert argmin == 2

    def test_small_delta_argmin_two(self):
        rate, argmin = V.heavy_upper_rate(1.5, 0.1)
        assert argmin == 2
        assert rate == pytest.approx(1.1**1.5 - 1, abs=1e-12)

    def test_argmin_bounded_in_delta(self):
        argmins = [V.heavy_upper_rate(1.5, d)[1] for d in (1.0, 10.0, 100.0, 1000.0)]
        assert all(b >= a for a, b in zip(argmins, argmins[1:]))
        assert argmins[-1] <= 64

    def test_continuity_toward_alpha_one(self):
        delta = 0.7
        rates = [V.heavy_upper_rate(a, delta)[0] for a in (1.3, 1.1, 1.01)]
        target = delta  # the alpha <= 1 branch gives exactly delta at alpha = 1
        deviations = [abs(r - target) for r in rates]
        assert deviations == sorted(deviations, reverse=True)

    def test_insufficient_range(self):
        with pytest.raises(V.InsufficientRangeError):
            V.heavy_upper_rate(1.5, 1.0, k_max=2)


class TestGaussianComparison:
    @pytest.mark.parametrize("delta", [0.1, 0.5, 1.0, 3.0, 10.0])
    def test_pair_value_is_delta(self, delta):
        assert V.gaussian_planting_cost(delta, 2) == pytest.approx(delta, abs=1e-12)

    def test_argmin_grows_without_bound(self):
        argmins = [V.gaussian_upper_rate(d, k_max=200)[1] for d in (1.0, 10.0, 100.0, 1000.0)]
        assert argmins == sorted(argmins)
        assert argmins[-1] > argmins[0]

    def test_minimizer_unique_on_grid(self):
        for delta in (1.0, 10.0, 100.0):
            vals = [V.gaussian_planting_cost(delta, k) for k in range(2, 201)]
            best = min(vals)
            assert sum(1 for v in vals if abs(v - best) < 1e-12) == 1


class TestTypicalValues:
    def test_prefactor_alpha4(self):
        assert V.light_prefactor(4.0) == pytest.approx(1 / math.sqrt(2), rel=1e-14)

    def test_light_limit_toward_unweighted(self):
        n = 10**6
        base = math.sqrt(math.log(n) / math.log(math.log(n)))
        ratios = [abs(V.typical_light(a, n) / base - 1) for a in (10.0, 100.0, 1000.0)]
        assert ratios == sorted(ratios, reverse=True)
        assert ratios[-1] < 0.05

    def test_light_monotone_in_n(self):
        vals = [V.typical_light(4.0, n) for n in (100, 10**3, 10**4, 10**5, 10**6)]
        assert all(b > a for a, b in zip(vals, vals[1:]))

    def test_heavy_values(self):
        assert V.typical_heavy(1.0, math.exp(10.0)) == pytest.approx(10.0, rel=1e-12)
        assert V.typical_heavy(0.5, math.exp(4.0)) == pytest.approx(16.0, rel=1e-12)

    def test_heavy_decreasing_in_alpha(self):
        n = 10**5
        vals = [V.typical_heavy(a, n) for a in (0.5, 0.8, 1.0, 1.5, 1.9)]
        assert all(b < a for a, b in zip(vals, vals[1:]))

    def test_domain(self):
        with pytest.raises(ValueError):
            V.typical_light(1.5, 10**4)
        with pytest.raises(ValueError):
            V.light_prefactor(2.0)


class TestTailRates:
    def test_light_rates(self):
        assert V.light_upper_rate(1.0) == pytest.approx(3.0, rel=1e-15)
        assert V.light_lower_rate(0.5) == pytest.approx(0.75, rel=1e-15)

    def test_rates_vanish_at_zero_deviation(self):
        for d in (1e-6, 1e-9):
            assert V.light_upper_rate(d) < 3e-6
            assert V.light_lower_rate(d) < 3e-6

    def test_heavy_lower(self):
        assert V.heavy_lower_rate(1.0, 0.5) == pytest.approx(0.5, rel=1e-14)
        with pytest.raises(ValueError):
            V.heavy_lower_rate(1.0, 1.5)


class TestStarProfile:
    def test_closed_form_max_alpha4(self):
        gamma, fmax = V.star_rate_profile_max(4.0, 0.0)
        assert gamma == pytest.approx(0.5, rel=1e-15)
        assert fmax == pytest.approx(0.0, abs=1e-15)

    @pytest.mark.parametrize("alpha,rho", [(2.5, 0.2), (3.0, 0.0), (4.0, 0.5), (6.0, 1.0)])
    def test_matches_numeric_maximization(self, alpha, rho):
        gamma, fmax = V.star_rate_profile_max(alpha, rho)
        # golden-section oracle over (0, 10]
        invphi = (math.sqrt(5) - 1) / 2
        a, b = 1e-6, 10.0
        f = lambda x: V.star_rate_profile(alpha, rho, x)
        c, d = b - invphi * (b - a), a + invphi * (b - a)
        fc, fd = f(c), f(d)
        for _ in range(200):
            if fc >= fd:
                b, d, fd = d, c, fc
                c = b - invphi * (b - a)
                fc = f(c)
            else:
                a, c, fc = c, d, fd
                d = a + invphi * (b - a)
                fd = f(d)
        xstar = (a + b) / 2
        # the argmax is flatness-limited to ~sqrt(eps); the value is sharp
        assert xstar == pytest.approx(gamma, abs=1e-6)
        assert f(xstar) == pytest.approx(fmax, abs=1e-8)
        assert max(f(xstar), f(gamma)) == pytest.approx(fmax, abs=1e-12)

    def test_strict_local_max(self):
        gamma, fmax = V.star_rate_profile_max(4.0, 0.3)
        assert fmax - V.star_rate_profile(4.0, 0.3, gamma + 0.01) > 0
        assert fmax - V.star_rate_profile(4.0, 0.3, gamma - 0.01) > 0


class TestTreePairPowerBound:
    def test_seam_continuity(self):
        for theta in (1.0, 1.5, 2.0, 3.0):
            cap = 0.37
            left = V.tree_pair_power_bound(theta, 2 * cap - 1e-12, cap)
            right = V.tree_pair_power_bound(theta, 2 * cap, cap)
            assert left == pytest.approx(right, rel=1e-9)
            assert right == pytest.approx(cap ** (2 * theta), rel=1e-12)

    def test_linear_case(self):
        assert V.tree_pair_power_bound(1.0, 1.0, 0.5) == pytest.approx(0.25, rel=1e-15)

    def test_brute_force_over_random_trees(self):
        rng = derive_stream(2024)
        for trial in range(500):
            n = int(rng.integers(2, 16))
            # random tree by random attachment
            parents = [int(rng.integers(0, i)) for i in range(1, n)]
            edges = [(p, i) for i, p in enumerate(parents, start=1)]
            theta = float(rng.uniform(1.0, 3.0))
            cap = float(rng.uniform(0.05, 1.0))
            total = float(rng.uniform(0.5, 1.0)) * n * cap * 0.8
            if total <= 0:
                continue
            for _ in range(50):
                f = rng.dirichlet(np.ones(n)) * total
                if f.max() <= cap:
                    break
            else:
                continue
            s = sum(f[i] ** theta * f[j] ** theta for i, j in edges)
            bound = V.tree_pair_power_bound(theta, total, cap)
            assert s <= bound + 1e-12, (n, theta, cap, total, s, bound)
