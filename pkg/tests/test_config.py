import copy
import json

import pytest
from hypothesis import given
from hypothesis import strategies as st

from ndevoi.config import ScenarioConfig, load_scenario
from ndevoi.errors import ConfigError, UnknownScenario
from ndevoi.scenarios import BUILTIN_NAMES, builtin


@pytest.mark.parametrize("name", BUILTIN_NAMES)
def test_json_round_trip(name, tmp_path):
    cfg = builtin(name)
    path = tmp_path / f"{name}.json"
    path.write_text(cfg.to_json())
    again = load_scenario(str(path))
    assert again.to_dict() == cfg.to_dict()
    assert ScenarioConfig.from_json(cfg.to_json()).to_json() == cfg.to_json()


@given(st.floats(0.02, 0.4), st.floats(1e-3, 0.5))
def test_overrides_revalidate(x_th, s_th):
    cfg = builtin("hypothetical").with_overrides(x_th=x_th, s_th_fixed=s_th)
    assert cfg.x_th == x_th and cfg.s_th_fixed == s_th


def _mutate(raw, path, value):
    raw = copy.deepcopy(raw)
    node = raw
    keys = path.split(".")
    for k in keys[:-1]:
        node = node[k]
    if value is KeyError:
        del node[keys[-1]]
    else:
        node[keys[-1]] = value
    return raw


@pytest.mark.parametrize(
    "scenario, path, value, field",
    [
        ("hypothetical", "c_F_money", "lots", "c_F_money"),
        ("hypothetical", "c_R_money", -1.0, "c_R_money"),
        ("hypothetical", "condition_prior.kind", "gamma", "condition_prior"),
        ("hypothetical", "nde.model.sigma_log", KeyError, "nde.model.sigma_log"),
        ("hypothetical", "failure.kind", "weibull", "failure.kind"),
        ("hypothetical", "sweep.scale", "cubic", "sweep.scale"),
        ("hypothetical", "sweep.bracket", [1.0, 0.5], "sweep.bracket"),
        ("hypothetical", "p_F_given_repair", 2.0, "p_F_given_repair"),
        ("hypothetical", "x_th", -1.0, "x_th"),
        ("halfcell", "prior_y1", 1.5, "prior_y1"),
        ("halfcell", "orientation", "sideways", "orientation"),
        ("halfcell", "failure.a0", [0.0], "failure.a0"),
        ("halfcell", "two_step.transition", [[0.5, 0.6], [0.0, 1.0]], "two_step.transition[0]"),
        ("halfcell", "nde.y1", {"kind": "normal", "mu": 0.0}, "nde.y1"),
        ("halfcell", "sweep", KeyError, "sweep"),
    ],
)
def test_errors_name_the_field(scenario, path, value, field):
    raw = _mutate(builtin(scenario).to_dict(), path, value)
    with pytest.raises(ConfigError) as exc:
        ScenarioConfig.from_dict(raw)
    assert exc.value.field == field
    assert field in str(exc.value)


def test_invalid_json_and_missing_file(tmp_path):
    with pytest.raises(ConfigError):
        ScenarioConfig.from_json("{not json")
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps([1, 2]))
    with pytest.raises(ConfigError):
        load_scenario(str(bad))


def test_unknown_scenario():
    with pytest.raises(UnknownScenario):
        load_scenario("no-such-scenario")


def test_two_step_requires_binary_condition():
    raw = builtin("hypothetical").to_dict()
    raw["two_step"] = builtin("halfcell").to_dict()["two_step"]
    with pytest.raises(ConfigError, match="two_step"):
        ScenarioConfig.from_dict(raw)
