"""Scenario model, task ranking by competitive ratio, user choice and revenue.

Firm A (the leader) prices first at ``q``; firm B (the follower) answers
with ``p``. On task ``t`` a user picks B iff ``p <= kappa_t * q``, ties
going to B.
"""

from dataclasses import dataclass, field
from enum import Enum
from functools import cached_property
import math

import numpy as np

from . import interaction as ia
from .demand import ExponentialDemand, GeneralDemand
from .errors import (
    EmptyTaskSet,
    InvalidDemand,
    InvalidInteraction,
    NonPositivePrice,
    NegativePrice,
    ValidationError,
)

KAPPA_MERGE_RTOL = 1e-9


class PriceUnit(str, Enum):
    PER_PROMPT = "per_prompt"
    PER_TOKEN = "per_token"


class Firm(str, Enum):
    FOLLOWER_B = "B"
    LEADER_A = "A"


@dataclass(frozen=True)
class Task:
    name: str
    base_a: float
    score_b: float
    score_a: float
    mean_tokens_b: float = 1.0
    mean_tokens_a: float = 1.0
    demand: GeneralDemand | None = None

    def __post_init__(self):
        if not isinstance(self.name, str) or not self.name:
            raise ValidationError("task name must be a non-empty string", "name")
        try:
            ia.check_score(self.score_b, "score_b")
            ia.check_score(self.score_a, "score_a")
        except ia.InvalidScore as exc:
            raise ValidationError(str(exc), self.name) from exc
        if not (isinstance(self.base_a, (int, float)) and math.isfinite(self.base_a) and self.base_a > 0):
            raise ValidationError(f"base_a must be > 0, got {self.base_a!r}", f"{self.name}.base_a")
        for side in ("b", "a"):
            m = getattr(self, f"mean_tokens_{side}")
            if not (isinstance(m, (int, float)) and math.isfinite(m) and m > 0):
                raise ValidationError(f"token mean must be > 0, got {m!r}", f"{self.name}.mean_tokens_{side}")
        if self.demand is not None and not isinstance(self.demand, GeneralDemand):
            raise ValidationError("demand override must be a GeneralDemand", f"{self.name}.demand")


@dataclass(frozen=True)
class Scenario:
    """A full game instance.

    ``sensitivity_b`` is the shared exponential decay rate; set it to
    ``None`` when every task carries a :class:`GeneralDemand`.
    ``interaction`` is one round model for all tasks, or a tuple with one
    model per task (needed for :class:`~genai_duopoly.interaction.EmpiricalMean`).
    """

    tasks: tuple
    sensitivity_b: float | None
    interaction: object = ia.Geometric()
    price_unit: PriceUnit = PriceUnit.PER_PROMPT

    def __post_init__(self):
        object.__setattr__(self, "tasks", tuple(self.tasks))
        object.__setattr__(self, "price_unit", PriceUnit(self.price_unit))
        if not self.tasks:
            raise EmptyTaskSet("a scenario needs at least one task")
        names = [t.name for t in self.tasks]
        if len(set(names)) != len(names):
            raise ValidationError("task names must be unique", "tasks")
        if self.sensitivity_b is None:
            missing = [t.name for t in self.tasks if t.demand is None]
            if missing:
                raise ValidationError(f"tasks {missing} need a tabulated demand", "demand")
        else:
            b = self.sensitivity_b
            if not (isinstance(b, (int, float)) and math.isfinite(b) and b > 0):
                raise ValidationError(f"sensitivity_b must be > 0, got {b!r}", "demand.sensitivity_b")
            if any(t.demand is not None for t in self.tasks):
                raise ValidationError("exponential scenarios cannot carry tabulated demands", "demand")
        if isinstance(self.interaction, tuple):
            if len(self.interaction) != len(self.tasks):
                raise ValidationError("need one interaction model per task", "interaction")
        elif isinstance(self.interaction, ia.EmpiricalMean):
            raise ValidationError("empirical means are per task; pass a tuple", "interaction")
        models = self.interaction if isinstance(self.interaction, tuple) else (self.interaction,)
        for m in models:
            if not isinstance(m, (ia.Geometric, ia.TruncatedGeometric, ia.EmpiricalMean)):
                raise ValidationError(f"unknown interaction model {m!r}", "interaction")
        try:
            self.kappas
        except (ia.InvalidScore, ia.InvalidTokenMean, InvalidInteraction) as exc:
            raise ValidationError(str(exc), "interaction") from exc

    @property
    def is_exponential(self):
        return self.sensitivity_b is not None

    @property
    def num_tasks(self):
        return len(self.tasks)

    def interaction_for(self, i):
        if isinstance(self.interaction, tuple):
            return self.interaction[i]
        return self.interaction

    def demand(self, i):
        task = self.tasks[i]
        if task.demand is not None:
            return task.demand
        return ExponentialDemand(task.base_a, self.sensitivity_b)

    @cached_property
    def demands(self):
        return tuple(self.demand(i) for i in range(self.num_tasks))

    @cached_property
    def base_demands(self):
        return np.array([t.base_a for t in self.tasks], dtype=float)

    @cached_property
    def kappas(self):
        """Competitive ratio of every task, in input order."""
        out = []
        for i, t in enumerate(self.tasks):
            model = self.interaction_for(i)
            if self.price_unit is PriceUnit.PER_TOKEN:
                k = ia.per_token_competitive_ratio(
                    model, t.score_b, t.score_a, t.mean_tokens_b, t.mean_tokens_a
                )
            else:
                k = ia.competitive_ratio(model, t.score_b, t.score_a)
            out.append(k)
        return np.array(out, dtype=float)

    def demand_matrix(self, price):
        """Demand of every task at ``price``; shape ``price.shape + (T,)``."""
        p = np.asarray(price, dtype=float)
        if self.is_exponential:
            return self.base_demands * np.exp(-self.sensitivity_b * p[..., None])
        return np.stack([d(p) for d in self.demands], axis=-1)

    def scaled(self, factor):
        """Copy with every base demand multiplied by ``factor``."""
        if not self.is_exponential:
            raise InvalidDemand("scaling is defined for exponential scenarios only")
        tasks = tuple(
            Task(t.name, t.base_a * factor, t.score_b, t.score_a, t.mean_tokens_b, t.mean_tokens_a)
            for t in self.tasks
        )
        return Scenario(tasks, self.sensitivity_b, self.interaction, self.price_unit)


def scenario_from_kappas(kappas, base_a, sensitivity_b, names=None):
    """Geometric-rounds scenario whose tasks have exactly the given ratios.

    The leader score is a power of two so that ``V / W`` reproduces each
    ratio without rounding.
    """
    kappas = [float(k) for k in kappas]
    if len(kappas) != len(base_a):
        raise ValidationError("kappas and base_a must have equal length")
    if any(not k > 0 for k in kappas):
        raise ValidationError("kappas must be > 0")
    w = 2.0 ** -max(math.floor(math.log2(max(kappas))) + 1, 1)
    names = names or [f"task{i + 1}" for i in range(len(kappas))]
    tasks = [Task(n, float(a), k * w, w) for n, a, k in zip(names, base_a, kappas)]
    return Scenario(tuple(tasks), sensitivity_b)


@dataclass(frozen=True)
class TaskGroup:
    kappa: float
    merged_base_a: float
    members: tuple


@dataclass(frozen=True)
class TaskOrdering:
    """Task groups by strictly decreasing competitive ratio.

    A group's ``kappa`` is the smallest ratio among its (near-equal)
    members, so pricing at ``kappa * q`` wins every member.
    """

    groups: tuple

    def __len__(self):
        return len(self.groups)

    @property
    def kappas(self):
        return tuple(g.kappa for g in self.groups)

    def kappa_with_sentinel(self, t):
        """Ratio of 0-based group ``t``; 0 past the last group."""
        return self.groups[t].kappa if t < len(self.groups) else 0.0

    def prefix_members(self, t):
        """Task indices in the first ``t`` groups."""
        return tuple(i for g in self.groups[:t] for i in g.members)

    def prefix_base_a(self, t):
        return sum(g.merged_base_a for g in self.groups[:t])

    def suffix_base_a(self, t):
        return sum(g.merged_base_a for g in self.groups[t:])


@dataclass(frozen=True)
class PriceSolution:
    """Follower best response.

    ``served_groups`` is the prefix length of the ordering that B wins
    (``None`` for oracle results, which never build an ordering).
    """

    price: float
    revenue: float
    served_groups: int | None
    served_task_indices: tuple
    method: str = ""
    diagnostics: dict = field(default_factory=dict, compare=False)


@dataclass(frozen=True)
class LeaderSolution:
    """Leader optimum.

    ``served_suffix_start`` is the 0-based index of the first group the
    leader keeps (equal to the follower's prefix length); ``None`` for
    oracle results. When infeasible, ``price_q`` is ``None`` and the
    revenue is zero.
    """

    feasible: bool
    price_q: float | None
    revenue_a: float
    induced_follower: PriceSolution | None = None
    served_suffix_start: int | None = None
    regime: object = None
    method: str = ""
    diagnostics: dict = field(default_factory=dict, compare=False)


def rank_tasks(scenario):
    kappas = scenario.kappas
    order = sorted(range(scenario.num_tasks), key=lambda i: (-kappas[i], i))
    groups = []
    head = None
    members = []
    for i in order:
        k = kappas[i]
        if head is not None and (head - k) <= KAPPA_MERGE_RTOL * head:
            members.append(i)
            continue
        if members:
            groups.append(members)
        head = k
        members = [i]
    groups.append(members)
    return TaskOrdering(
        tuple(
            TaskGroup(
                float(min(kappas[i] for i in m)),
                float(sum(scenario.tasks[i].base_a for i in m)),
                tuple(m),
            )
            for m in groups
        )
    )


def user_choice(kappa, p, q):
    if not (p > 0 and q > 0):
        raise NonPositivePrice(f"prices must be > 0, got p={p!r}, q={q!r}")
    return Firm.FOLLOWER_B if p <= kappa * q else Firm.LEADER_A


def served_mask(scenario, p, q):
    """Boolean ``(..., T)`` array: does B win task t at prices (p, q)?"""
    p = np.asarray(p, dtype=float)[..., None]
    q = np.asarray(q, dtype=float)[..., None]
    return p <= scenario.kappas * q


def revenue_by_task(scenario, p, q):
    """Per-task revenue of each firm, shapes ``(..., T)``.

    Zero prices are allowed here (zero revenue); used for curve output.
    """
    if np.any(np.asarray(p) < 0) or np.any(np.asarray(q) < 0):
        raise NegativePrice("prices must be >= 0")
    mask = served_mask(scenario, p, q)
    pa = np.asarray(p, dtype=float)[..., None]
    qa = np.asarray(q, dtype=float)[..., None]
    rev_b = np.where(mask, pa * scenario.demand_matrix(p), 0.0)
    rev_a = np.where(mask, 0.0, qa * scenario.demand_matrix(q))
    return rev_a, rev_b


def revenue_split(scenario, p, q):
    """Total revenue ``(R_A, R_B)`` at prices ``p`` (follower) and ``q`` (leader).

    ``p`` and ``q`` may be numpy arrays that broadcast together; each task
    is credited to exactly one firm.
    """
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    if not (np.all(p > 0) and np.all(q > 0)):
        raise NonPositivePrice("prices must be > 0")
    shape = np.broadcast_shapes(p.shape, q.shape)
    ra = np.zeros(shape)
    rb = np.zeros(shape)
    for k, d in zip(scenario.kappas, scenario.demands):
        won = p <= k * q
        rb += np.where(won, p * d(p), 0.0)
        ra += np.where(won, 0.0, q * d(q))
    if ra.ndim == 0:
        return float(ra), float(rb)
    return ra, rb


def served_count(scenario, p, q):
    """Number of tasks B wins at each (p, q)."""
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    out = np.zeros(np.broadcast_shapes(p.shape, q.shape), dtype=np.int64)
    for k in scenario.kappas:
        out += p <= k * q
    return out
