import os

import pytest
from numpy.testing import assert_raises
from zuper_commons.types import ZValueError

from phidiag.models import (
    Axis,
    EPSILON,
    EventPair,
    ExtendedEvent,
    Lasso,
    NOT_LIVE,
    PlantFormatError,
    PlantModel,
    PlantValidationError,
    RESERVED_OUTPUT,
    UNKNOWN_OUTPUT,
    apply_overlay,
    dump_plant,
    extended_successors,
    first_fault_index,
    intermittent_observation,
    is_faulty,
    is_generated,
    load_plant,
    natural_observation,
    plant_from_dict,
    plant_to_dict,
    project,
    validate_plant,
)
from phidiag_tests import DATA_DIR, OUT_TESTS_DIR
from phidiag_tests.worked_systems import g1, g3

E = ExtendedEvent


def test_worked_plants_are_valid():
    assert validate_plant(g1()) == []
    assert validate_plant(g3()) == []
    assert load_plant(DATA_DIR / "g1.json") == g1()


def test_extended_successors():
    succ = extended_successors(g1(), "3")
    assert succ == ((E("3", "b", EPSILON), "4"), (E("3", "b", "b"), "4"))
    assert extended_successors(g1(), "1") == ((E("1", "f", EPSILON), "2"), (E("1", "u", EPSILON), "5"))
    assert_raises(ZValueError, extended_successors, g1(), "42")


def test_projections():
    s = (E("1", "f", EPSILON), E("2", "a", "a"), E("3", "b", EPSILON), E("4", "c", "c"))
    assert project(s, Axis.STATE) == ("1", "2", "3", "4")
    assert project(s, Axis.EVENT) == ("f", "a", "b", "c")
    assert project(s, Axis.OUTPUT) == ("a", "c")
    assert project(s, Axis.OUTPUT, raw=True) == (EPSILON, "a", EPSILON, "c")
    lasso = Lasso(s[:1], (E("1", "u", EPSILON),))
    assert project(lasso, Axis.OUTPUT) == Lasso((), ())
    assert project(lasso, Axis.OUTPUT).is_finite


def test_faults_and_generation():
    model = g1()
    faulty = (E("1", "f", EPSILON), E("2", "a", "a"))
    normal = (E("1", "u", EPSILON), E("5", "a", "a"))
    assert first_fault_index(faulty, model) == 0
    assert first_fault_index(normal, model) is None
    assert is_faulty(Lasso(normal, faulty[1:]), model) is False
    assert is_generated(model, faulty)
    assert not is_generated(model, (E("1", "f", "a"),))
    assert not is_generated(model, (E("2", "a", "a"),))
    cycle = (E("2", "a", "a"), E("3", "b", "b"), E("4", "c", "c"))
    assert is_generated(model, Lasso(faulty[:1], cycle))
    assert not is_generated(model, Lasso(faulty[:1], cycle[:2]))


def test_lasso_helpers():
    w = Lasso((1, 2), (3, 4))
    assert w.unroll(2) == (1, 2, 3, 4, 3, 4)
    assert [w.successor(i) for i in range(4)] == [1, 2, 3, 2]
    assert w[3] == 4 and len(w) == 4
    assert_raises(ZValueError, Lasso((1,), ()).require_infinite)


def test_event_pairs():
    a2 = E("2", "a", "a")
    a8 = E("8", "a", "a")
    b3 = E("3", "b", EPSILON)
    assert EventPair(a2, a8).observed == "a"
    assert EventPair(b3, None).short() == "(b3/ε,ε)"
    assert_raises(ZValueError, EventPair, None, None)
    assert_raises(ZValueError, EventPair, a2, None)
    assert_raises(ZValueError, EventPair, a2, E("4", "c", "c"))


def test_observation_rebuilders():
    model = g1()
    nat = natural_observation(model, ["a", "b", "c"])
    assert nat[("3", "b")] == frozenset({"b"})
    assert nat[("1", "f")] == frozenset({EPSILON})
    inter = intermittent_observation(model, ["a", "c"], ["b"], ["f", "u"])
    assert apply_overlay(model, inter) == model
    assert_raises(ZValueError, intermittent_observation, model, ["a", "c"], ["b", "c"], ["f", "u"])
    assert_raises(ZValueError, intermittent_observation, model, ["a"], ["b"], ["f", "u"])


def test_overlay_declares_new_outputs():
    model = apply_overlay(g1(), {("1", "u"): {"x"}})
    assert "x" in model.outputs
    assert validate_plant(model) == []
    assert_raises(ZValueError, apply_overlay, g1(), {("9", "u"): {"x"}})


def test_violations():
    model = PlantModel.from_transitions([("1", "a", "2", ["a"])], initial="1", fault_events=[])
    kinds = {v.kind for v in validate_plant(model)}
    assert kinds == {NOT_LIVE}
    model = PlantModel.from_transitions([("1", "a", "1", ["z"])], initial="1", fault_events=[], outputs=["a"])
    assert {v.kind for v in validate_plant(model)} == {UNKNOWN_OUTPUT}
    model = PlantModel.from_transitions([("1", "a", "1", ["eps"])], initial="1", fault_events=[])
    assert RESERVED_OUTPUT in {v.kind for v in validate_plant(model)}


def _g1_dict() -> dict:
    return plant_to_dict(g1())


def test_dict_format():
    assert plant_from_dict(_g1_dict()) == g1()

    d = _g1_dict()
    d["comment"] = "x"
    assert_raises(PlantFormatError, plant_from_dict, d)

    d = _g1_dict()
    d["transitions"].append({"from": "1", "event": "f", "to": "3", "obs": [""]})
    assert_raises(PlantFormatError, plant_from_dict, d)

    d = _g1_dict()
    d["outputs"].append("~")
    assert_raises(PlantFormatError, plant_from_dict, d)

    d = _g1_dict()
    d["transitions"] = [t for t in d["transitions"] if t["from"] != "8"]
    with pytest.raises(PlantValidationError) as e:
        plant_from_dict(d)
    assert [v.kind for v in e.value.violations] == [NOT_LIVE]
    assert plant_from_dict(d, allow_non_live=True).outgoing("8") == ()


def test_malformed_json(tmp_path):
    path = tmp_path / "broken.json"
    path.write_text('{"states": [1, 2}')
    assert_raises(PlantFormatError, load_plant, path)
    assert_raises(PlantFormatError, load_plant, tmp_path / "missing.json")


def test_dump_and_load():
    os.makedirs(OUT_TESTS_DIR, exist_ok=True)
    path = os.path.join(OUT_TESTS_DIR, "g3.json")
    dump_plant(g3(), path)
    assert load_plant(path) == g3()
