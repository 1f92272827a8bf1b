import json

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import SCENARIOS, random_exponential_scenario
from genai_duopoly.interaction import EmpiricalMean, TruncatedGeometric
from genai_duopoly.errors import ParseError, ValidationError
from genai_duopoly.market import PriceUnit
from genai_duopoly.scenario_io import dump_scenario, parse_scenario, scenario_from_dict, scenario_to_dict


@pytest.fixture
def fig2_doc():
    return json.loads((SCENARIOS / "figure2.json").read_text())


class TestParse:
    def test_figure2_file(self):
        scen = parse_scenario(SCENARIOS / "figure2.json")
        assert scen.num_tasks == 3
        assert scen.sensitivity_b == 0.5
        np.testing.assert_array_equal(scen.kappas, [3.0, 2.0, 1.0])

    def test_path_string_and_text(self):
        path = str(SCENARIOS / "figure2.json")
        assert parse_scenario(path) == parse_scenario((SCENARIOS / "figure2.json").read_text())

    def test_all_shipped_scenarios_parse(self):
        for f in sorted(SCENARIOS.glob("*.json")):
            parse_scenario(f)

    def test_per_token(self):
        scen = parse_scenario(SCENARIOS / "per_token.json")
        assert scen.price_unit is PriceUnit.PER_TOKEN
        assert scen.interaction == TruncatedGeometric(4)

    def test_tabulated(self):
        scen = parse_scenario(SCENARIOS / "tabulated.json")
        assert not scen.is_exponential
        assert all(isinstance(m, EmpiricalMean) for m in scen.interaction)
        assert scen.tasks[0].base_a == 100.0

    @pytest.mark.parametrize("field,value", [("score_b", 1.0), ("score_a", 0.0), ("base_demand_a", -5.0)])
    def test_validation_errors(self, fig2_doc, field, value):
        fig2_doc["tasks"][0][field] = value
        with pytest.raises(ValidationError) as err:
            scenario_from_dict(fig2_doc)
        assert err.value.field == f"tasks[0].{field}"

    @pytest.mark.parametrize("where", [lambda d: d, lambda d: d["tasks"][1], lambda d: d["demand"]])
    def test_unknown_fields(self, fig2_doc, where):
        where(fig2_doc)["colour"] = "red"
        with pytest.raises(ParseError, match="colour"):
            scenario_from_dict(fig2_doc)

    def test_missing_field(self, fig2_doc):
        del fig2_doc["tasks"][2]["score_a"]
        with pytest.raises(ParseError, match=r"tasks\[2\]"):
            scenario_from_dict(fig2_doc)

    def test_bad_json_has_line(self):
        with pytest.raises(ParseError) as err:
            parse_scenario('{\n  "schema_version": 1,\n  oops\n}')
        assert err.value.line == 3

    @pytest.mark.parametrize(
        "mutate",
        [
            lambda d: d.update(schema_version=2),
            lambda d: d.update(price_unit="per_word"),
            lambda d: d["demand"].update(kind="linear"),
            lambda d: d["interaction"].update(kind="poisson"),
            lambda d: d["tasks"][0].update(score_b="high"),
            lambda d: d["tasks"][0].update(mean_rounds_b=2.0),
        ],
    )
    def test_parse_errors(self, fig2_doc, mutate):
        mutate(fig2_doc)
        with pytest.raises(ParseError):
            scenario_from_dict(fig2_doc)

    def test_empty_tasks(self, fig2_doc):
        fig2_doc["tasks"] = []
        with pytest.raises(ValidationError):
            scenario_from_dict(fig2_doc)

    def test_tabulated_base_mismatch(self):
        doc = json.loads((SCENARIOS / "tabulated.json").read_text())
        doc["tasks"][0]["base_demand_a"] = 99.0
        with pytest.raises(ValidationError, match="base_demand_a"):
            scenario_from_dict(doc)

    def test_tabulated_increasing(self):
        doc = json.loads((SCENARIOS / "tabulated.json").read_text())
        doc["demand"]["points"]["t1"][1] = [1, 120]
        with pytest.raises(ValidationError):
            scenario_from_dict(doc)

    def test_missing_file(self, tmp_path):
        with pytest.raises(ParseError):
            parse_scenario(tmp_path / "nope.json")


class TestRoundTrip:
    def test_shipped(self):
        for f in sorted(SCENARIOS.glob("*.json")):
            scen = parse_scenario(f)
            assert parse_scenario(dump_scenario(scen)) == scen

    @given(st.integers(0, 2**32 - 1))
    @settings(max_examples=50)
    def test_random(self, seed):
        scen = random_exponential_scenario(np.random.default_rng(seed))
        again = scenario_from_dict(json.loads(json.dumps(scenario_to_dict(scen))))
        assert again == scen
        np.testing.assert_array_equal(again.kappas, scen.kappas)
