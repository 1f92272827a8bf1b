"""JSON scenario files (schema version 1).

Example::

    {
      "schema_version": 1,
      "price_unit": "per_prompt",
      "demand": {"kind": "exponential", "sensitivity_b": 0.5},
      "interaction": {"kind": "geometric"},
      "tasks": [
        {"name": "code", "base_demand_a": 100, "score_b": 0.75, "score_a": 0.25}
      ]
    }

``demand.kind`` may instead be ``"tabulated"`` with
``"points": {"<task name>": [[price, quantity], ...]}``; ``interaction``
may be ``{"kind": "truncated_geometric", "max_rounds": N}`` or
``{"kind": "empirical_mean"}``, the latter requiring ``mean_rounds_b`` and
``mean_rounds_a`` on every task. Unknown keys are rejected.
"""

import json
import math
from pathlib import Path

from . import interaction as ia
from .demand import GeneralDemand
from .errors import DuopolyError, InvalidDemand, ParseError, ValidationError
from .market import PriceUnit, Scenario, Task

SCHEMA_VERSION = 1

_TOP_KEYS = {"schema_version", "price_unit", "demand", "interaction", "tasks"}
_TASK_KEYS = {
    "name", "base_demand_a", "score_b", "score_a",
    "mean_tokens_b", "mean_tokens_a", "mean_rounds_b", "mean_rounds_a",
}


def _expect_keys(obj, allowed, required, path):
    if not isinstance(obj, dict):
        raise ParseError("expected an object", path)
    unknown = sorted(set(obj) - allowed)
    if unknown:
        raise ParseError(f"unknown field(s) {unknown}", path)
    missing = sorted(set(required) - set(obj))
    if missing:
        raise ParseError(f"missing field(s) {missing}", path)


def _number(obj, key, path):
    val = obj[key]
    if isinstance(val, bool) or not isinstance(val, (int, float)) or not math.isfinite(val):
        raise ParseError(f"expected a finite number, got {val!r}", f"{path}.{key}")
    return float(val)


def _parse_interaction(doc, path="interaction"):
    kind = doc.get("kind") if isinstance(doc, dict) else None
    if kind == "geometric":
        _expect_keys(doc, {"kind"}, {"kind"}, path)
        return ia.Geometric()
    if kind == "truncated_geometric":
        _expect_keys(doc, {"kind", "max_rounds"}, {"kind", "max_rounds"}, path)
        n = doc["max_rounds"]
        if isinstance(n, bool) or not isinstance(n, int):
            raise ParseError(f"expected an integer, got {n!r}", f"{path}.max_rounds")
        try:
            return ia.TruncatedGeometric(n)
        except ia.InvalidInteraction as exc:
            raise ValidationError(str(exc), f"{path}.max_rounds") from exc
    if kind == "empirical_mean":
        _expect_keys(doc, {"kind"}, {"kind"}, path)
        return "empirical_mean"
    raise ParseError(f"unknown interaction kind {kind!r}", f"{path}.kind")


def scenario_from_dict(doc):
    """Build a validated :class:`Scenario` from a decoded scenario document."""
    _expect_keys(doc, _TOP_KEYS, _TOP_KEYS, "$")
    if doc["schema_version"] != SCHEMA_VERSION or isinstance(doc["schema_version"], bool):
        raise ParseError(f"unsupported schema_version {doc['schema_version']!r}", "schema_version")
    try:
        unit = PriceUnit(doc["price_unit"])
    except ValueError:
        raise ParseError(f"unknown price_unit {doc['price_unit']!r}", "price_unit") from None

    demand = doc["demand"]
    dkind = demand.get("kind") if isinstance(demand, dict) else None
    if dkind == "exponential":
        _expect_keys(demand, {"kind", "sensitivity_b"}, {"kind", "sensitivity_b"}, "demand")
        b = _number(demand, "sensitivity_b", "demand")
        if not b > 0:
            raise ValidationError(f"sensitivity_b must be > 0, got {b}", "demand.sensitivity_b")
        tables = None
    elif dkind == "tabulated":
        _expect_keys(demand, {"kind", "points"}, {"kind", "points"}, "demand")
        if not isinstance(demand["points"], dict):
            raise ParseError("expected an object keyed by task name", "demand.points")
        b = None
        tables = demand["points"]
    else:
        raise ParseError(f"unknown demand kind {dkind!r}", "demand.kind")

    model = _parse_interaction(doc["interaction"])

    raw_tasks = doc["tasks"]
    if not isinstance(raw_tasks, list) or not raw_tasks:
        raise ValidationError("at least one task is required", "tasks")
    tasks, per_task_models = [], []
    for i, rt in enumerate(raw_tasks):
        path = f"tasks[{i}]"
        required = {"name", "score_b", "score_a"}
        if tables is None:
            required.add("base_demand_a")
        if model == "empirical_mean":
            required |= {"mean_rounds_b", "mean_rounds_a"}
        _expect_keys(rt, _TASK_KEYS, required, path)
        name = rt["name"]
        if not isinstance(name, str) or not name:
            raise ParseError("expected a non-empty string", f"{path}.name")
        if model != "empirical_mean" and ("mean_rounds_b" in rt or "mean_rounds_a" in rt):
            raise ParseError("mean_rounds_* only allowed with empirical_mean interaction", path)

        vals = {k: _number(rt, k, path) for k in rt if k != "name"}
        for k in ("score_b", "score_a"):
            if not 0.0 < vals[k] < 1.0:
                raise ValidationError(f"score must lie strictly inside (0, 1), got {vals[k]}", f"{path}.{k}")
        for k in ("base_demand_a", "mean_tokens_b", "mean_tokens_a"):
            if k in vals and not vals[k] > 0:
                raise ValidationError(f"must be > 0, got {vals[k]}", f"{path}.{k}")

        table = None
        if tables is not None:
            if name not in tables:
                raise ValidationError("no tabulated demand for task", f"demand.points.{name}")
            pts = tables[name]
            try:
                table = GeneralDemand.tabulated([p[0] for p in pts], [p[1] for p in pts])
            except (TypeError, IndexError, KeyError):
                raise ParseError("expected a list of [price, quantity] pairs", f"demand.points.{name}") from None
            except InvalidDemand as exc:
                raise ValidationError(str(exc), f"demand.points.{name}") from exc
            base = table.base_a
            if "base_demand_a" in vals and abs(vals["base_demand_a"] - base) > 1e-12 * max(1.0, base):
                raise ValidationError("base_demand_a disagrees with tabulated demand at price 0",
                                      f"{path}.base_demand_a")
            if not base > 0:
                raise ValidationError("tabulated demand must be positive at price 0", f"demand.points.{name}")
        else:
            base = vals["base_demand_a"]

        if model == "empirical_mean":
            try:
                per_task_models.append(ia.EmpiricalMean(vals["mean_rounds_b"], vals["mean_rounds_a"]))
            except ia.InvalidInteraction as exc:
                raise ValidationError(str(exc), path) from exc

        tasks.append(Task(
            name, base, vals["score_b"], vals["score_a"],
            vals.get("mean_tokens_b", 1.0), vals.get("mean_tokens_a", 1.0), table,
        ))

    if tables is not None:
        extra = sorted(set(tables) - {t.name for t in tasks})
        if extra:
            raise ParseError(f"tabulated demand for unknown task(s) {extra}", "demand.points")

    interaction = tuple(per_task_models) if model == "empirical_mean" else model
    return Scenario(tuple(tasks), b, interaction, unit)


def parse_scenario(source):
    """Parse a scenario from a path or from JSON text.

    Raises
    ------
    ParseError
        Malformed JSON (with line number) or schema violations (with the
        dotted field path).
    ValidationError
        A value breaks a model invariant.
    """
    if isinstance(source, Path) or (isinstance(source, str) and not source.lstrip().startswith("{")):
        try:
            text = Path(source).read_text(encoding="utf-8")
        except OSError as exc:
            raise ParseError(f"cannot read scenario: {exc}") from exc
    else:
        text = source
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, line=exc.lineno) from exc
    try:
        return scenario_from_dict(doc)
    except DuopolyError:
        raise
    except (TypeError, AttributeError) as exc:
        raise ParseError(f"malformed scenario: {exc}") from exc


def scenario_to_dict(scenario):
    interaction = scenario.interaction
    if isinstance(interaction, tuple):
        if not all(isinstance(m, ia.EmpiricalMean) for m in interaction):
            raise ValidationError("per-task interaction tuples serialise only as empirical means")
        inter = {"kind": "empirical_mean"}
    elif isinstance(interaction, ia.TruncatedGeometric):
        inter = {"kind": "truncated_geometric", "max_rounds": interaction.max_rounds}
    else:
        inter = {"kind": "geometric"}

    if scenario.is_exponential:
        demand = {"kind": "exponential", "sensitivity_b": scenario.sensitivity_b}
    else:
        demand = {"kind": "tabulated", "points": {
            t.name: [[p, q] for p, q in zip(t.demand.prices, t.demand.quantities)]
            for t in scenario.tasks
        }}

    tasks = []
    for i, t in enumerate(scenario.tasks):
        row = {"name": t.name, "base_demand_a": t.base_a, "score_b": t.score_b, "score_a": t.score_a}
        if t.mean_tokens_b != 1.0 or t.mean_tokens_a != 1.0:
            row["mean_tokens_b"] = t.mean_tokens_b
            row["mean_tokens_a"] = t.mean_tokens_a
        if isinstance(interaction, tuple):
            row["mean_rounds_b"] = interaction[i].mean_rounds_b
            row["mean_rounds_a"] = interaction[i].mean_rounds_a
        tasks.append(row)
    return {
        "schema_version": SCHEMA_VERSION,
        "price_unit": scenario.price_unit.value,
        "demand": demand,
        "interaction": inter,
        "tasks": tasks,
    }


def dump_scenario(scenario):
    return json.dumps(scenario_to_dict(scenario), indent=2) + "\n"
