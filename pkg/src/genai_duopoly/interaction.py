"""Prompting-round models and competitive ratios.

A user keeps prompting a model until the output is satisfactory. Only the
expected number of rounds enters the pricing problem, so every model here
reduces to a mean.
"""

from dataclasses import dataclass
import math
from numbers import Real

from .errors import InvalidInteraction, InvalidScore, InvalidTokenMean


@dataclass(frozen=True)
class Geometric:
    """I.i.d. Bernoulli attempts with success probability equal to the score."""

    kind = "geometric"


@dataclass(frozen=True)
class TruncatedGeometric:
    """Geometric rounds, except the user gives up after ``max_rounds``."""

    max_rounds: int

    kind = "truncated_geometric"

    def __post_init__(self):
        if isinstance(self.max_rounds, bool) or int(self.max_rounds) != self.max_rounds:
            raise InvalidInteraction(f"max_rounds must be an integer, got {self.max_rounds!r}")
        if self.max_rounds < 1:
            raise InvalidInteraction(f"max_rounds must be >= 1, got {self.max_rounds}")


@dataclass(frozen=True)
class EmpiricalMean:
    """Caller-supplied expected rounds for one task on each side.

    Stands in for prompt-dependent success rates, whose prompt distribution
    is not modelled; the mean is all downstream formulas use.
    """

    mean_rounds_b: float
    mean_rounds_a: float

    kind = "empirical_mean"

    def __post_init__(self):
        for side, m in (("b", self.mean_rounds_b), ("a", self.mean_rounds_a)):
            if not (math.isfinite(m) and m >= 1.0):
                raise InvalidInteraction(f"mean_rounds_{side} must be >= 1, got {m!r}")


InteractionModel = Geometric | TruncatedGeometric | EmpiricalMean


def check_score(score, name="score"):
    if not (isinstance(score, Real) and 0.0 < score < 1.0):
        raise InvalidScore(f"{name} must lie strictly inside (0, 1), got {score!r}")
    return float(score)


def expected_rounds(model, score, side="b"):
    """Mean number of prompting rounds for a model with the given score.

    ``side`` selects which stored mean an :class:`EmpiricalMean` returns
    (``"b"`` for the follower's model, ``"a"`` for the leader's); the
    parametric models ignore it.
    """
    v = check_score(score)
    if isinstance(model, Geometric):
        return 1.0 / v
    if isinstance(model, TruncatedGeometric):
        T = model.max_rounds
        miss = 1.0 - v
        total = 0.0
        for n in range(1, T):
            total += n * miss ** (n - 1) * v
        return total + T * miss ** (T - 1)
    if isinstance(model, EmpiricalMean):
        if side == "b":
            return float(model.mean_rounds_b)
        if side == "a":
            return float(model.mean_rounds_a)
        raise ValueError(f"side must be 'a' or 'b', got {side!r}")
    raise InvalidInteraction(f"unknown interaction model {model!r}")


def competitive_ratio(model, v, w):
    """Ratio E[n(W)] / E[n(V)] of expected rounds, leader over follower.

    Under geometric rounds this is ``v / w`` computed directly.
    """
    if isinstance(model, Geometric):
        return check_score(v, "v") / check_score(w, "w")
    return expected_rounds(model, w, side="a") / expected_rounds(model, v, side="b")


def per_token_competitive_ratio(model, v, w, mean_tokens_b, mean_tokens_a):
    """Competitive ratio when prices are quoted per token.

    Token counts are taken independent of the round count, so each
    expectation factorises into mean tokens times mean rounds.
    """
    for side, m in (("b", mean_tokens_b), ("a", mean_tokens_a)):
        if not (isinstance(m, Real) and math.isfinite(m) and m > 0):
            raise InvalidTokenMean(f"mean_tokens_{side} must be > 0, got {m!r}")
    return competitive_ratio(model, v, w) * (mean_tokens_a / mean_tokens_b)
