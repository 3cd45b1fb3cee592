from fractions import Fraction
from itertools import combinations

import pytest

from ndtcache.bounds import (
    CHARACTERIZED,
    BoundComponentIndex,
    NdtCurve,
    UncharacterizedConfigError,
    achievable_catalog,
    bound_component_indices,
    delta_lb_component,
    lower_bound,
    lower_bound_curve,
    memory_sharing_envelope,
    optimal_ndt,
    optimal_ndt_curve,
)
from ndtcache.model import NetworkConfig


def cfg(M, K, mu):
    return NetworkConfig(M=M, K=K, N=M + K, mu=mu)


def brute_force_bound(M, K, mu):
    """Independent re-derivation of the converse: literal enumeration of
    (K + ell - mu*(sbar*(K - s + (sbar-1)/2) + ell*(ell+1)/2)) / s."""
    best = Fraction(1)
    for s in range(1, min(M + 1, K) + 1):
        sbar = M + 1 - s
        for ell in range(sbar, M + 1):
            num = K + ell - mu * (sbar * (K - s + Fraction(sbar - 1, 2)) + Fraction(ell * (ell + 1), 2))
            best = max(best, Fraction(num, s))
    return best


GRID = [Fraction(i, 60) for i in range(61)]


class TestDeltaLbComponent:
    def test_known_values(self):
        assert delta_lb_component(cfg(1, 3, 0), BoundComponentIndex(1, 1)) == 4
        # M=2, K=2, (ell=2, s=1) is the line 4 - 6*mu
        for mu in GRID:
            assert delta_lb_component(cfg(2, 2, mu), BoundComponentIndex(2, 1)) == 4 - 6 * mu
        assert delta_lb_component(cfg(1, 3, "4/5"), BoundComponentIndex(1, 2)) == Fraction(8, 5)
        assert delta_lb_component(cfg(2, 2, 1), BoundComponentIndex(1, 2)) == 1

    def test_zero_cache_full_relay_component_is_k_plus_m(self):
        for M in range(1, 7):
            for K in range(1, 7):
                assert delta_lb_component(cfg(M, K, 0), BoundComponentIndex(M, 1)) == K + M

    def test_rejects_out_of_range_indices(self):
        with pytest.raises(ValueError):
            delta_lb_component(cfg(1, 3, 0), BoundComponentIndex(1, 3))
        with pytest.raises(ValueError):
            delta_lb_component(cfg(1, 3, 0), BoundComponentIndex(0, 1))
        with pytest.raises(ValueError):
            delta_lb_component(cfg(2, 1, 0), BoundComponentIndex(2, 2))

    def test_index_enumeration_ranges(self):
        for idx in bound_component_indices(3, 4):
            assert 1 <= idx.s <= 4
            assert 4 - idx.s <= idx.ell <= 3
        assert len(bound_component_indices(1, 1)) == 1


class TestLowerBound:
    def test_known_values(self):
        assert lower_bound(cfg(1, 3, "4/5")) == Fraction(8, 5)
        assert lower_bound(cfg(2, 1, 0)) == 3
        assert lower_bound(cfg(1, 1, 1)) == 1
        # frozen after confirming with brute_force_bound (the enumeration
        # max is attained at (ell=2, s=2), not on the s=3 components)
        assert lower_bound(cfg(3, 4, "1/3")) == Fraction(5, 3)
        assert brute_force_bound(3, 4, Fraction(1, 3)) == Fraction(5, 3)

    def test_matches_brute_force_on_grid(self):
        for M in range(1, 5):
            for K in range(1, 5):
                for mu in GRID[::5]:
                    assert lower_bound(cfg(M, K, mu)) == brute_force_bound(M, K, mu)

    def test_at_least_one_everywhere(self):
        for M in range(1, 5):
            for K in range(1, 5):
                for mu in GRID:
                    assert lower_bound(cfg(M, K, mu)) >= 1

    def test_non_increasing_and_convex_on_grid(self):
        for M in range(1, 5):
            for K in range(1, 5):
                vals = [lower_bound(cfg(M, K, mu)) for mu in GRID]
                for v1, v2 in zip(vals, vals[1:]):
                    assert v2 <= v1
                for v1, v2, v3 in zip(vals, vals[1:], vals[2:]):
                    assert v2 - v1 <= v3 - v2  # uniform grid: slope differences suffice

    def test_endpoints_match_extremal_schemes(self):
        for M in range(1, 7):
            for K in range(1, 7):
                assert lower_bound(cfg(M, K, 0)) == K + M
                assert lower_bound(cfg(M, K, 1)) == max(Fraction(K, M + 1), Fraction(1))


class TestLowerBoundCurve:
    def test_known_breakpoints(self):
        assert lower_bound_curve(1, 3).breakpoints == (
            (0, 4), (Fraction(4, 5), Fraction(8, 5)), (1, Fraction(3, 2)),
        )
        assert lower_bound_curve(2, 2).breakpoints == (
            (0, 4), (Fraction(4, 9), Fraction(4, 3)),
            (Fraction(1, 2), Fraction(5, 4)), (1, 1),
        )
        assert lower_bound_curve(1, 1).breakpoints == ((0, 2), (1, 1))

    def test_curve_equals_pointwise_max_at_random_rationals(self):
        import random

        rnd = random.Random(20240817)
        curve = {}
        for _ in range(1000):
            M, K = rnd.randint(1, 4), rnd.randint(1, 4)
            mu = Fraction(rnd.randint(0, 997), 997)
            if (M, K) not in curve:
                curve[(M, K)] = lower_bound_curve(M, K)
            assert curve[(M, K)].evaluate(mu) == brute_force_bound(M, K, mu)

    def test_m1_branches_reproduced(self):
        # K+1-mu*K, (K+1-mu)/2 and K/2 are the only active branches for M=1
        for K in range(1, 7):
            for mu in GRID:
                branches = [Fraction(1), K + 1 - mu * K]
                if K >= 2:
                    branches += [Fraction(K + 1 - mu, 2), Fraction(K, 2)]
                assert lower_bound_curve(1, K).evaluate(mu) == max(branches)


class TestNdtCurve:
    def test_validation(self):
        with pytest.raises(ValueError):
            NdtCurve(((0, 4),))  # must span [0, 1]
        with pytest.raises(ValueError):
            NdtCurve(((0, 4), (Fraction(1, 2), 5), (1, 1)))  # increasing segment
        with pytest.raises(ValueError):
            NdtCurve(((0, 4), (Fraction(1, 2), 1), (1, Fraction(1, 2))))  # drops below 1
        with pytest.raises(ValueError):
            NdtCurve(((0, 4), (Fraction(1, 2), 3), (1, 1)))  # concave kink

    def test_evaluate_interpolates_exactly(self):
        curve = NdtCurve(((0, 4), (Fraction(4, 5), Fraction(8, 5)), (1, Fraction(3, 2))))
        assert curve.evaluate(Fraction(2, 5)) == Fraction(14, 5)
        assert curve.evaluate(Fraction(9, 10)) == Fraction(31, 20)
        with pytest.raises(ValueError):
            curve.evaluate(Fraction(6, 5))


class TestOptimalNdt:
    def test_known_values(self):
        assert optimal_ndt(cfg(1, 2, "1/2")) == 2
        assert optimal_ndt(cfg(2, 1, "1/2")) == 1
        assert optimal_ndt(cfg(2, 2, "4/9")) == Fraction(4, 3)
        assert optimal_ndt(cfg(1, 3, 1)) == Fraction(3, 2)

    def test_rejects_uncharacterized(self):
        for M, K in [(3, 3), (1, 4), (2, 3), (4, 1)]:
            with pytest.raises(UncharacterizedConfigError):
                optimal_ndt(cfg(M, K, 0))
            with pytest.raises(UncharacterizedConfigError):
                optimal_ndt_curve(M, K)

    def test_closed_forms_match_enumerated_bound(self):
        # the closed forms are hard-coded branch lists; the enumeration is
        # the independent route
        for M, K in sorted(CHARACTERIZED):
            for mu in GRID:
                assert optimal_ndt(cfg(M, K, mu)) == brute_force_bound(M, K, mu)


class TestAchievableCatalog:
    def test_corner_entries_always_present(self):
        for M in range(1, 5):
            for K in range(1, 5):
                points = achievable_catalog(M, K)
                by_mu = {p.mu: p for p in points}
                assert by_mu[Fraction(0)].ndt == K + M
                assert by_mu[Fraction(0)].scheme_label == "unicast"
                assert by_mu[Fraction(1)].ndt == max(Fraction(K, M + 1), Fraction(1))
                assert by_mu[Fraction(1)].scheme_label == "miso-zf"
                assert all(p.proven_optimal for p in (by_mu[Fraction(0)], by_mu[Fraction(1)]))

    def test_special_points(self):
        p = {x.scheme_label: x for x in achievable_catalog(1, 3)}["zf-ia-m1k3"]
        assert (p.mu, p.ndt, p.proven_optimal) == (Fraction(4, 5), Fraction(8, 5), True)
        p = {x.scheme_label: x for x in achievable_catalog(1, 4)}["x-channel-catalog"]
        assert (p.mu, p.ndt, p.proven_optimal) == (Fraction(1, 2), Fraction(3), False)
        labels = {x.scheme_label for x in achievable_catalog(2, 2)}
        assert "m2-catalog" in labels
        assert {x.scheme_label for x in achievable_catalog(2, 3)} == {"unicast", "miso-zf"}

    def test_never_beats_the_converse(self):
        for M in range(1, 5):
            for K in range(1, 5):
                for p in achievable_catalog(M, K):
                    assert p.ndt >= lower_bound(cfg(M, K, p.mu))


class TestMemorySharingEnvelope:
    def test_two_points_make_a_line(self):
        from ndtcache.bounds import AchievablePoint

        pts = [
            AchievablePoint(Fraction(0), Fraction(2), "unicast", True),
            AchievablePoint(Fraction(1), Fraction(1), "miso-zf", True),
        ]
        env = memory_sharing_envelope(pts)
        assert env.breakpoints == ((0, 2), (1, 1))
        assert env.evaluate(Fraction(1, 3)) == Fraction(5, 3)

    def test_requires_both_endpoints(self):
        from ndtcache.bounds import AchievablePoint

        with pytest.raises(ValueError):
            memory_sharing_envelope([AchievablePoint(Fraction(0), Fraction(2), "unicast", True)])

    def test_envelope_slopes(self):
        env = memory_sharing_envelope(achievable_catalog(1, 3))
        assert env.breakpoints == (
            (0, 4), (Fraction(4, 5), Fraction(8, 5)), (1, Fraction(3, 2)),
        )
        slopes = [
            (y2 - y1) / (x2 - x1)
            for (x1, y1), (x2, y2) in zip(env.breakpoints, env.breakpoints[1:])
        ]
        assert slopes == [Fraction(-3), Fraction(-1, 2)]

        env = memory_sharing_envelope(achievable_catalog(1, 4))
        slopes = [
            (y2 - y1) / (x2 - x1)
            for (x1, y1), (x2, y2) in zip(env.breakpoints, env.breakpoints[1:])
        ]
        assert slopes == [Fraction(-4), Fraction(-2)]

    def test_inputs_lie_on_or_above(self):
        for M in range(1, 5):
            for K in range(1, 5):
                points = achievable_catalog(M, K)
                env = memory_sharing_envelope(points)
                for p in points:
                    assert p.ndt >= env.evaluate(p.mu)

    def test_grid_oracle_matches_hull(self):
        # oracle: best convex combination over every point pair on a grid
        points = achievable_catalog(1, 4)
        env = memory_sharing_envelope(points)
        for mu in GRID:
            best = None
            for p, q in combinations(points, 2):
                lo, hi = sorted((p, q), key=lambda r: r.mu)
                if lo.mu <= mu <= hi.mu:
                    t = (mu - lo.mu) / (hi.mu - lo.mu) if hi.mu != lo.mu else Fraction(0)
                    val = lo.ndt + t * (hi.ndt - lo.ndt)
                    best = val if best is None else min(best, val)
            assert env.evaluate(mu) == best


class TestDominance:
    def test_envelope_at_least_bound_at_least_one(self):
        for M in range(1, 5):
            for K in range(1, 5):
                env = memory_sharing_envelope(achievable_catalog(M, K))
                lb = lower_bound_curve(M, K)
                for mu in GRID:
                    e, b = env.evaluate(mu), lb.evaluate(mu)
                    assert e >= b >= 1

    def test_characterized_cases_are_tight(self):
        for M, K in sorted(CHARACTERIZED):
            env = memory_sharing_envelope(achievable_catalog(M, K))
            for mu in GRID:
                opt = optimal_ndt(cfg(M, K, mu))
                assert opt == lower_bound(cfg(M, K, mu)) == env.evaluate(mu)
