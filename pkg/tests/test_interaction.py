import numpy as np
import pytest
from hypothesis import given, strategies as st

from genai_duopoly.errors import InvalidInteraction, InvalidScore, InvalidTokenMean
from genai_duopoly.interaction import (
    EmpiricalMean,
    Geometric,
    TruncatedGeometric,
    competitive_ratio,
    expected_rounds,
    per_token_competitive_ratio,
)

scores = st.floats(min_value=1e-3, max_value=1 - 1e-3)


def truncated_pmf(v, T):
    """Explicit pmf of the truncated geometric round count."""
    pmf = {n: (1 - v) ** (n - 1) * v for n in range(1, T)}
    pmf[T] = (1 - v) ** (T - 1)
    return pmf


class TestExpectedRounds:
    def test_geometric(self):
        assert expected_rounds(Geometric(), 0.5) == 2.0

    def test_truncated_one_round(self):
        assert expected_rounds(TruncatedGeometric(1), 0.5) == 1.0

    @pytest.mark.parametrize("v,T", [(0.5, 2), (0.25, 2), (0.3, 5), (0.9, 7)])
    def test_truncated_matches_pmf(self, v, T):
        pmf = truncated_pmf(v, T)
        assert sum(pmf.values()) == pytest.approx(1.0, abs=1e-14)
        mean = sum(n * pr for n, pr in pmf.items())
        assert expected_rounds(TruncatedGeometric(T), v) == pytest.approx(mean, rel=1e-14)

    def test_truncated_two_rounds_values(self):
        assert expected_rounds(TruncatedGeometric(2), 0.5) == pytest.approx(1.5)
        assert expected_rounds(TruncatedGeometric(2), 0.25) == pytest.approx(1.75)

    def test_truncated_converges(self):
        vals = [expected_rounds(TruncatedGeometric(T), 0.5) for T in range(1, 65)]
        assert all(b >= a - 1e-14 for a, b in zip(vals, vals[1:]))
        assert all(v <= 2.0 + 1e-14 for v in vals)
        assert abs(vals[-1] - 2.0) <= 1e-9

    def test_empirical_sides(self):
        m = EmpiricalMean(1.5, 3.0)
        assert expected_rounds(m, 0.4, side="b") == 1.5
        assert expected_rounds(m, 0.4, side="a") == 3.0

    @pytest.mark.parametrize("v", [0.0, 1.0, -0.1, 1.5])
    def test_invalid_score(self, v):
        with pytest.raises(InvalidScore):
            expected_rounds(Geometric(), v)

    def test_invalid_models(self):
        with pytest.raises(InvalidInteraction):
            TruncatedGeometric(0)
        with pytest.raises(InvalidInteraction):
            EmpiricalMean(0.5, 2.0)

    def test_geometric_identity_on_grid(self):
        for v in np.linspace(0.01, 0.99, 99):
            assert abs(expected_rounds(Geometric(), v) * v - 1.0) <= 2.3e-16


class TestCompetitiveRatio:
    def test_examples(self):
        assert competitive_ratio(Geometric(), 0.8, 0.4) == 2.0
        assert competitive_ratio(Geometric(), 0.37, 0.37) == 1.0
        assert competitive_ratio(TruncatedGeometric(2), 0.5, 0.25) == pytest.approx(1.75 / 1.5)

    def test_empirical(self):
        assert competitive_ratio(EmpiricalMean(2.0, 3.0), 0.5, 0.5) == 1.5

    @given(scores, scores, st.sampled_from([Geometric(), TruncatedGeometric(3), TruncatedGeometric(10)]))
    def test_reciprocal(self, v, w, model):
        assert competitive_ratio(model, v, w) * competitive_ratio(model, w, v) == pytest.approx(1.0, abs=1e-12)

    @given(scores, scores)
    def test_geometric_is_score_ratio(self, v, w):
        assert competitive_ratio(Geometric(), v, w) == v / w


class TestPerToken:
    def test_examples(self):
        assert per_token_competitive_ratio(Geometric(), 0.5, 0.5, 2.0, 1.0) == 0.5
        assert per_token_competitive_ratio(Geometric(), 0.8, 0.4, 1.0, 3.0) == pytest.approx(6.0)

    @given(scores, scores, st.sampled_from([Geometric(), TruncatedGeometric(4)]))
    def test_unit_tokens_bit_identical(self, v, w, model):
        assert per_token_competitive_ratio(model, v, w, 1.0, 1.0) == competitive_ratio(model, v, w)

    @given(scores, scores, st.floats(0.1, 10.0))
    def test_equal_constant_tokens(self, v, w, m):
        assert per_token_competitive_ratio(Geometric(), v, w, m, m) == competitive_ratio(Geometric(), v, w)

    @pytest.mark.parametrize("tb,ta", [(0.0, 1.0), (1.0, -2.0), (float("nan"), 1.0)])
    def test_invalid_tokens(self, tb, ta):
        with pytest.raises(InvalidTokenMean):
            per_token_competitive_ratio(Geometric(), 0.5, 0.5, tb, ta)
