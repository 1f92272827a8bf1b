import math
import time
import warnings

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import SCENARIOS, random_exponential_scenario
from genai_duopoly.errors import NonExponentialDemand, NonPositiveLeaderPrice, SearchBudgetExceeded
from genai_duopoly.follower import (
    SearchParams,
    exponential_piece_optima,
    follower_price_bounds,
    piece_bounds,
    solve_follower,
    solve_follower_exponential,
    solve_follower_general,
)
from genai_duopoly.market import Scenario, Task, rank_tasks, scenario_from_kappas
from genai_duopoly.oracle import follower_oracle
from genai_duopoly.scenario_io import parse_scenario

FIG2_REVENUE = 700 * math.exp(-0.5)  # 424.5714617988434
seeds = st.integers(0, 2**32 - 1)


def random_instance(seed):
    rng = np.random.default_rng(seed)
    return random_exponential_scenario(rng), float(rng.uniform(0.1, 10.0))


class TestClosedForm:
    def test_figure2(self, figure2):
        sol = solve_follower_exponential(figure2, 1.0)
        assert sol.price == 1.0
        assert sol.revenue == pytest.approx(FIG2_REVENUE, rel=1e-12)
        assert sol.served_groups == 3
        assert sol.served_task_indices == (0, 1, 2)

    def test_single_task_peak(self):
        scen = scenario_from_kappas([1.0], [100.0], 1.0)
        sol = solve_follower_exponential(scen, 10.0)
        assert sol.price == 1.0
        assert sol.revenue == pytest.approx(100 * math.exp(-1.0), rel=1e-14)
        assert sol.diagnostics["t_star"] == 1

    def test_boundary_only(self):
        scen = scenario_from_kappas([0.01], [100.0], 1.0)
        sol = solve_follower_exponential(scen, 0.01)
        assert sol.diagnostics["t_star"] is None
        assert sol.price == pytest.approx(1e-4, rel=1e-12)
        assert sol.revenue == pytest.approx(1e-4 * 100 * math.exp(-1e-4), rel=1e-12)

    def test_candidates_skip_early_pieces(self, figure2):
        # q = 1: 1/b = 2 lies in piece 2's interval (1, 2]
        sol = solve_follower_exponential(figure2, 1.0)
        assert sol.diagnostics["t_star"] == 2
        assert [c[0] for c in sol.diagnostics["candidates"]] == [2, 3]

    def test_tie_break(self):
        # construct an exact tie between serving one group and both
        a1, b, q = 100.0, 1.0, 1.0
        k1, k2 = 1.0, 0.5
        # piece 1 peaks at 1/b = 1 (= k1 q): a1 e^-1; piece 2 boundary at 0.5
        a2 = a1 * math.exp(-1.0) / (0.5 * math.exp(-0.5)) - a1
        scen = scenario_from_kappas([k1, k2], [a1, a2], b)
        assert solve_follower_exponential(scen, q, "larger").served_groups == 2
        assert solve_follower_exponential(scen, q, "smaller").served_groups == 1

    def test_errors(self, figure2):
        with pytest.raises(NonPositiveLeaderPrice):
            solve_follower_exponential(figure2, 0.0)
        with pytest.raises(NonPositiveLeaderPrice):
            solve_follower_exponential(figure2, float("nan"))
        tab = parse_scenario(SCENARIOS / "tabulated.json")
        with pytest.raises(NonExponentialDemand):
            solve_follower_exponential(tab, 1.0)

    def test_dispatch(self, figure2):
        assert solve_follower(figure2, 1.0, "general").method == "general"
        assert solve_follower(figure2, 1.0, "oracle", grid_points=1000).method == "oracle"
        with pytest.raises(ValueError):
            solve_follower(figure2, 1.0, "bogus")

    def test_price_in_piece(self, figure2):
        for q in (0.3, 1.0, 2.5):
            sol = solve_follower_exponential(figure2, q)
            lo, hi = piece_bounds(rank_tasks(figure2), q)[sol.served_groups - 1]
            assert lo < sol.price <= hi


class TestOracleEquivalence:
    def test_figure2_oracle(self, figure2):
        ref = follower_oracle(figure2, 1.0, 10**5)
        assert ref.price == pytest.approx(1.0, abs=1e-4)
        assert ref.revenue == pytest.approx(FIG2_REVENUE, rel=1e-3)

    def test_random_instances(self):
        rng = np.random.default_rng(1234)
        t0 = time.perf_counter()
        for _ in range(200):
            scen = random_exponential_scenario(rng)
            q = float(rng.uniform(0.1, 10.0))
            mine = solve_follower_exponential(scen, q)
            ref = follower_oracle(scen, q, 10**5)
            assert mine.revenue == pytest.approx(ref.revenue, rel=1e-3)
            assert mine.revenue >= ref.revenue * (1 - 1e-9)
        assert time.perf_counter() - t0 < 10.0

    @given(seeds)
    @settings(max_examples=60, deadline=None)
    def test_general_matches_closed(self, seed):
        scen, q = random_instance(seed)
        closed = solve_follower_exponential(scen, q)
        gen = solve_follower_general(scen, q)
        assert gen.revenue == pytest.approx(closed.revenue, rel=1e-8)
        assert gen.revenue <= closed.revenue * (1 + 1e-12)

    def test_tabulated_general_vs_oracle(self):
        scen = parse_scenario(SCENARIOS / "tabulated.json")
        for q in (0.5, 1.0, 2.0, 5.0):
            gen = solve_follower_general(scen, q)
            ref = follower_oracle(scen, q, 10**5)
            assert gen.revenue == pytest.approx(ref.revenue, rel=1e-3)
            assert gen.revenue >= ref.revenue * (1 - 1e-9)


class TestProperties:
    @given(seeds)
    @settings(max_examples=60, deadline=None)
    def test_monotone_in_q(self, seed):
        scen, _ = random_instance(seed)
        qs = np.geomspace(0.1, 10.0, 25)
        revs = [solve_follower_exponential(scen, float(q)).revenue for q in qs]
        assert all(b >= a * (1 - 1e-12) for a, b in zip(revs, revs[1:]))

    @given(seeds, st.floats(0.01, 100.0))
    @settings(max_examples=60, deadline=None)
    def test_scale_invariance(self, seed, c):
        scen, q = random_instance(seed)
        base = solve_follower_exponential(scen, q)
        big = solve_follower_exponential(scen.scaled(c), q)
        assert big.price == base.price
        assert big.served_groups == base.served_groups
        assert big.revenue == pytest.approx(c * base.revenue, rel=1e-12)

    @given(st.integers(2, 4), st.floats(0.1, 10.0))
    @settings(max_examples=30, deadline=None)
    def test_grouping(self, k, q):
        dup = tuple(Task(f"d{i}", 50.0, 0.6, 0.3) for i in range(k)) + (Task("z", 80.0, 0.3, 0.6),)
        merged = (Task("m", 50.0 * k, 0.6, 0.3), Task("z", 80.0, 0.3, 0.6))
        a = solve_follower_exponential(Scenario(dup, 0.7), q)
        b = solve_follower_exponential(Scenario(merged, 0.7), q)
        assert a.price == b.price
        assert a.revenue == pytest.approx(b.revenue, rel=1e-13)

    @given(seeds)
    @settings(max_examples=100, deadline=None)
    def test_bounds_contain_optimum(self, seed):
        scen, q = random_instance(seed)
        lo, hi = follower_price_bounds(scen, q)
        p = solve_follower_exponential(scen, q).price
        assert min(lo, hi) * (1 - 1e-12) <= p <= max(lo, hi) * (1 + 1e-12)

    @given(seeds)
    @settings(max_examples=60, deadline=None)
    def test_piece_dominance(self, seed):
        scen, q = random_instance(seed)
        order = rank_tasks(scen)
        b = scen.sensitivity_b
        eps = 1e-9
        for t, (lo, hi) in enumerate(piece_bounds(order, q)[:-1]):
            if lo < 1.0 / b:
                break
            # piece t+1 near its open end vs piece t+2 at its closed top
            near_open = lo * (1 + eps) * order.prefix_base_a(t + 1) * math.exp(-b * lo * (1 + eps))
            next_top = lo * order.prefix_base_a(t + 2) * math.exp(-b * lo)
            assert near_open <= next_top

    def test_non_attained_pieces(self, figure2):
        pieces = exponential_piece_optima(figure2, 1.0)
        # piece 1 spans (2, 3], above 1/b = 2, so its supremum sits at the open end
        assert not pieces[0].attained
        assert pieces[1].attained and pieces[1].price == 2.0


class TestBounds:
    def test_examples(self, figure2):
        assert follower_price_bounds(figure2, 1.0) == (1.0, 2.0)
        single = scenario_from_kappas([1.0], [100.0], 1.0)
        assert follower_price_bounds(single, 10.0) == (10.0, 1.0)
        assert follower_price_bounds(scenario_from_kappas([2.0, 1.0], [1, 1], 0.5), 1.0) == (1.0, 2.0)


class TestGeneralSearch:
    def test_budget_warning(self, figure2):
        with pytest.warns(SearchBudgetExceeded):
            solve_follower_general(figure2, 1.0, SearchParams(max_iter=2))

    def test_no_warning_default(self, figure2):
        with warnings.catch_warnings():
            warnings.simplefilter("error")
            solve_follower_general(figure2, 1.0)

    def test_figure2(self, figure2):
        sol = solve_follower_general(figure2, 1.0)
        assert sol.price == pytest.approx(1.0, abs=1e-9)
        assert sol.revenue == pytest.approx(FIG2_REVENUE, rel=1e-12)
