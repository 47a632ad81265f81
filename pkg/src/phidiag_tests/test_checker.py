import json
import time

import numpy as np
from numpy.testing import assert_raises
from zuper_commons.types import ZValueError

from phidiag.checker import (
    Verdict,
    Witness,
    build_systems,
    check,
    decide,
    explain,
    render_lasso,
    validate_witness,
    verdict_from_dict,
    verdict_to_dict,
)
from phidiag.ltl import FALSE, And, LtlFormula, SensorConstraint, to_string
from phidiag.models import EPSILON, EventPair, ExtendedEvent, Lasso, PlantModel
from phidiag.oracle import twin_plant_check
from phidiag.sampling import random_constraint, random_formula, random_plant
from phidiag.templates import DwellTimeSpec, build_scenario
from phidiag_tests.worked_systems import (
    g1,
    g1_per_constraint,
    g1_per_spec,
    g2,
    g2_kloss_spec,
    g3,
    g3_fair_spec,
    kloss_nba,
    permanent_failure_nba,
    true_constraint,
)

E = ExtendedEvent


def test_permanent_failure_is_not_diagnosable():
    model = g1()
    constraint = build_scenario(model, g1_per_spec())
    verdict = check(model, constraint)
    assert not verdict.diagnosable
    w = verdict.witness
    assert validate_witness(model, constraint, verdict) == []
    assert any(e.sigma == "f" for e in w.theta1.prefix + w.theta1.cycle)
    assert all(e.sigma != "f" for e in w.theta2.prefix + w.theta2.cycle)
    # the faulty run keeps losing b, so only a and c are seen in the loop
    assert set(w.observation.cycle) <= {"a", "c"}


def test_permanent_failure_with_drawn_automaton():
    model = g1()
    constraint = g1_per_constraint()
    verdict = check(model, constraint, nba=permanent_failure_nba())
    assert not verdict.diagnosable
    assert validate_witness(model, constraint, verdict, nba=permanent_failure_nba()) == []


def test_unconstrained_g1_agrees_with_twin_plant():
    verdict = check(g1(), true_constraint())
    assert not verdict.diagnosable
    assert twin_plant_check(g1()) is False
    assert validate_witness(g1(), true_constraint(), verdict) == []


def test_kloss_is_diagnosable():
    model = g2()
    constraint = build_scenario(model, g2_kloss_spec())
    assert check(model, constraint).diagnosable
    assert check(model, constraint, nba=kloss_nba()).diagnosable
    # without the bounds, b may be lost forever
    assert not check(model, true_constraint()).diagnosable


def test_output_fairness_is_diagnosable():
    model = g3()
    verdict = check(model, build_scenario(model, g3_fair_spec()))
    assert verdict.diagnosable
    assert verdict.witness is None
    assert set(verdict.stats) == {"nba", "augmented", "constrained", "verifier"}


def test_dwell_time_check_stays_small():
    model = g1()
    spec = DwellTimeSpec(
        sigma_o=frozenset({"b"}), sigma_uo=frozenset({"f", "u"}), sigma_ur=frozenset({"a", "c"}), k_n=1, k_f=2
    )
    constraint = build_scenario(model, spec)
    t0 = time.process_time()
    verdict = check(model, constraint)
    assert time.process_time() - t0 < 20
    assert verdict.stats["nba"]["states"] <= 16
    if not verdict.diagnosable:
        assert validate_witness(model, constraint, verdict) == []


def test_unconstrained_g3_witness():
    verdict = check(g3(), true_constraint())
    assert not verdict.diagnosable
    w = verdict.witness
    assert w.observation == Lasso(("o1",), ("o1", "o2"))
    assert render_lasso(w.observation) == "o1 (o1 o2)^ω"
    assert w.word.prefix == (EventPair(E("1", "f", "o1"), E("1", "u", "o1")),)
    assert w.states.cycle[0].startswith("((2F,")
    assert validate_witness(g3(), true_constraint(), verdict) == []


def test_fault_free_plant_is_diagnosable():
    model = PlantModel.from_transitions(
        [("1", "a", "2", ["o1", EPSILON]), ("2", "b", "1", [EPSILON])], initial="1", fault_events=[]
    )
    verdict = check(model, true_constraint())
    assert verdict.diagnosable
    assert explain(verdict).startswith("Diagnosable.\n")


def test_unsatisfiable_constraint_is_diagnosable():
    model = g3()
    c = true_constraint()
    false = SensorConstraint(c.ap, c.labeling, LtlFormula(FALSE, frozenset()))
    systems = build_systems(model, false)
    assert not systems.constrained.states
    assert decide(systems.verifier) is None


def test_decide_is_deterministic():
    model = g1()
    constraint = build_scenario(model, g1_per_spec())
    v1 = check(model, constraint)
    v2 = check(model, constraint)
    assert v1 == v2
    assert verdict_to_dict(v1) == verdict_to_dict(v2)


def test_verdict_json_round_trip():
    verdict = check(g3(), true_constraint())
    d = json.loads(json.dumps(verdict_to_dict(verdict)))
    assert d["diagnosable"] is False
    assert d["projections"]["rendered"]["observation"] == "o1 (o1 o2)^ω"
    assert d["witness"]["prefix"][0] == {
        "first": {"q": "1", "sigma": "f", "o": "o1"},
        "second": {"q": "1", "sigma": "u", "o": "o1"},
    }
    assert verdict_from_dict(d) == verdict

    positive = check(g3(), build_scenario(g3(), g3_fair_spec()))
    d = json.loads(json.dumps(verdict_to_dict(positive)))
    assert d["witness"] is None and d["projections"] is None
    assert verdict_from_dict(d) == positive


def test_verdict_consistency():
    with assert_raises(ZValueError):
        Verdict(False)
    w = check(g3(), true_constraint()).witness
    with assert_raises(ZValueError):
        Verdict(True, w)
    with assert_raises(ZValueError):
        Witness(w.word, Lasso(w.states.prefix, ()))
    with assert_raises(ZValueError):
        verdict_from_dict({"witness": None})


def test_explain_negative():
    text = explain(check(g3(), true_constraint()))
    lines = text.splitlines()
    assert lines[0] == "Not diagnosable."
    assert "from ((1N," in lines[1]
    assert "shared observation:" in text and "o1 (o1 o2)^ω" in text
    assert "f1/o1" in text and "u1/o1" in text


def test_validate_witness_rejects_tampering():
    model = g1()
    constraint = build_scenario(model, g1_per_spec())
    verdict = check(model, constraint)
    w = verdict.witness
    # exchange the copies on the joint moves of the prefix
    swapped = Lasso(
        tuple(EventPair(p.second, p.first) if p.first and p.second else p for p in w.word.prefix),
        w.word.cycle,
    )
    broken = Verdict(False, Witness(swapped, w.states), verdict.stats)
    assert validate_witness(model, constraint, broken)


def test_random_plants_agree_with_twin_plant():
    rng = np.random.default_rng(11)
    for i in range(200):
        model = random_plant(rng)
        verdict = check(model, true_constraint())
        expected = twin_plant_check(model)
        assert verdict.diagnosable == expected, (i, model)
        if not verdict.diagnosable:
            assert validate_witness(model, true_constraint(), verdict) == [], i


def test_strengthened_constraint_stays_diagnosable():
    rng = np.random.default_rng(21)
    compared = 0
    for i in range(100):
        model = random_plant(rng)
        weak = random_constraint(rng, model)
        if not weak.ap:
            continue
        extra = random_formula(rng, sorted(weak.ap), depth=2)
        formula = LtlFormula(And(weak.formula.tree, extra), weak.ap)
        strong = SensorConstraint(weak.ap, weak.labeling, formula, weak.overlay)
        if check(model, weak).diagnosable:
            compared += 1
            assert check(model, strong).diagnosable, (i, model, to_string(extra))
    assert compared > 0
