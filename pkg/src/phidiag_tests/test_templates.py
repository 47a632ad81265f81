import numpy as np
import pytest
from numpy.testing import assert_raises

from phidiag.ltl import eval_lasso, parse_ltl
from phidiag.models import EPSILON, ExtendedEvent
from phidiag.sampling import random_word
from phidiag.templates import (
    DwellTimeSpec,
    IntermittentPermanentSpec,
    KLossSpec,
    MixedSpec,
    OutputFairnessSpec,
    ScenarioError,
    build_scenario,
    constraint_from_dict,
    constraint_to_dict,
    load_constraint,
    scenario_from_dict,
)
from phidiag_tests import DATA_DIR
from phidiag_tests.worked_systems import g1, g1_per_spec, g2, g2_kloss_spec, g3, g3_fair_spec

E = ExtendedEvent


def test_permanent_per_transition():
    c = build_scenario(g1(), g1_per_spec(per_event=False))
    assert c.ap == {"m0_q3_b", "m1_q3_b", "m0_q6_b", "m1_q6_b"}
    expected = "G (m1_q3_b -> G !m0_q3_b) & G (m1_q6_b -> G !m0_q6_b)"
    assert c.formula.tree == parse_ltl(expected).tree
    assert c.labeling(E("3", "b", EPSILON)) == {"m1_q3_b"}
    assert c.labeling(E("6", "b", "b")) == {"m0_q6_b"}
    assert c.labeling(E("2", "a", "a")) == frozenset()
    assert c.overlay[("1", "f")] == {EPSILON}
    assert c.overlay[("3", "b")] == {"b", EPSILON}


def test_permanent_per_event():
    c = build_scenario(g1(), g1_per_spec())
    assert c.ap == {"m0_ev_b", "m1_ev_b"}
    assert c.formula.tree == parse_ltl("G (m1_ev_b -> G !m0_ev_b)").tree
    assert c.labeling(E("3", "b", "b")) == c.labeling(E("6", "b", "b")) == {"m0_ev_b"}


def test_intermittent_only_is_true():
    spec = IntermittentPermanentSpec(
        t_uo=frozenset({("1", "f"), ("1", "u")}),
        t_o=frozenset(),
        t_int=frozenset(g1().transitions) - {("1", "f"), ("1", "u")},
        t_per=frozenset(),
    )
    c = build_scenario(g1(), spec)
    assert str(c.formula) == "true"
    assert c.overlay[("2", "a")] == {"a", EPSILON}


def test_partition_errors():
    spec = g1_per_spec()
    overlapping = IntermittentPermanentSpec(spec.t_uo, spec.t_o | {("3", "b")}, spec.t_int, spec.t_per)
    assert_raises(ScenarioError, build_scenario, g1(), overlapping)
    missing = IntermittentPermanentSpec(spec.t_uo, spec.t_o - {("2", "a")}, spec.t_int, spec.t_per)
    assert_raises(ScenarioError, build_scenario, g1(), missing)


def test_k_loss():
    c = build_scenario(g2(), g2_kloss_spec())
    expected = "G !m1_ch1 & G !(m1_ch2 & X (!m0_ch2 U m1_ch2))"
    assert c.formula.tree == parse_ltl(expected).tree
    assert c.ap == {"m0_ch1", "m1_ch1", "m0_ch2", "m1_ch2"}
    assert c.labeling(E("4", "c", EPSILON)) == {"m1_ch1"}
    assert c.labeling(E("6", "b", "b")) == {"m0_ch2"}
    assert c.labeling(E("1", "f", EPSILON)) == frozenset()


def test_k_loss_variants():
    spec = KLossSpec(frozenset({"f", "u"}), (frozenset({"a", "c"}), frozenset({"b"})), (None, 2))
    c = build_scenario(g2(), spec)
    expected = "G !(m1_ch2 & X (!m0_ch2 U (m1_ch2 & X (!m0_ch2 U m1_ch2))))"
    assert c.formula.tree == parse_ltl(expected).tree
    bad = KLossSpec(frozenset({"f", "u"}), (frozenset({"a", "c"}), frozenset({"b"})), (0,))
    assert_raises(ScenarioError, build_scenario, g2(), bad)
    bad = KLossSpec(frozenset({"f"}), (frozenset({"a", "c"}), frozenset({"b"})), (0, 1))
    assert_raises(ScenarioError, build_scenario, g2(), bad)


def test_dwell_time():
    spec = DwellTimeSpec(
        sigma_o=frozenset({"a", "c"}), sigma_uo=frozenset({"f", "u"}), sigma_ur=frozenset({"b"}), k_n=2, k_f=1
    )
    c = build_scenario(g2(), spec)
    expected = "G !(m1_ev_b & X (!m0_ev_b U (m0_ev_b & X (!m0_ev_b U m1_ev_b))))"
    assert c.formula.tree == parse_ltl(expected).tree
    assert c.overlay[("2", "a")] == {"a"}
    spec = DwellTimeSpec(spec.sigma_o, spec.sigma_uo, spec.sigma_ur, k_n=1, k_f=3)
    c = build_scenario(g2(), spec)
    fail2 = "(m1_ev_b & X ((!m1_ev_b & !m0_ev_b) U (m1_ev_b & X (!m1_ev_b U m0_ev_b))))"
    fail1 = "(m1_ev_b & X (!m1_ev_b U m0_ev_b))"
    expected = f"G !(m0_ev_b & X (!m1_ev_b U {fail1})) & G !(m0_ev_b & X (!m1_ev_b U {fail2}))"
    assert c.formula.tree == parse_ltl(expected).tree


def test_output_fairness():
    c = build_scenario(g3(), g3_fair_spec())
    expected = "G F (m_o1_q2_a | m_o2_q2_a) -> G F m_o1_q2_a & G F m_o2_q2_a"
    assert c.formula.tree == parse_ltl(expected).tree
    assert c.overlay is None
    assert c.labeling(E("2", "a", "o2")) == {"m_o2_q2_a"}
    assert_raises(ScenarioError, build_scenario, g3(), OutputFairnessSpec(frozenset({("9", "a")})))


def _per_b() -> IntermittentPermanentSpec:
    return IntermittentPermanentSpec(
        t_uo=frozenset({("1", "f"), ("1", "u")}),
        t_o=frozenset({("2", "a"), ("4", "c"), ("5", "a"), ("7", "c"), ("8", "a")}),
        t_int=frozenset(),
        t_per=frozenset({("3", "b"), ("6", "b")}),
    )


def _loss_ac() -> KLossSpec:
    return KLossSpec(frozenset({"f", "u", "b"}), (frozenset({"a", "c"}),), (1,))


def test_mixed():
    per_b, loss_ac = _per_b(), _loss_ac()
    c = build_scenario(g1(), MixedSpec((per_b, loss_ac)))
    assert c.overlay[("3", "b")] == {"b", EPSILON}
    assert c.overlay[("2", "a")] == {"a", EPSILON}
    assert c.overlay[("1", "f")] == {EPSILON}
    alone = build_scenario(g1(), per_b)
    assert c.ap == alone.ap | {"m0_ch1", "m1_ch1"}

    single = build_scenario(g1(), MixedSpec((per_b,)))
    assert single.formula == alone.formula and single.overlay == alone.overlay

    assert_raises(ScenarioError, build_scenario, g1(), MixedSpec((per_b, per_b)))


def test_mixed_formula_is_the_conjunction():
    specs = (_per_b(), _loss_ac())
    parts = [build_scenario(g1(), s) for s in specs]
    mixed = build_scenario(g1(), MixedSpec(specs))
    rng = np.random.default_rng(11)
    for _ in range(300):
        w = random_word(rng, sorted(mixed.ap), max_len=4)
        assert eval_lasso(w, mixed.formula) == all(eval_lasso(w, p.formula) for p in parts), w


def test_mixed_with_fairness_uses_merged_observations():
    loss_b = KLossSpec(frozenset({"f", "u", "a", "c"}), (frozenset({"b"}),), (0,))
    fair = OutputFairnessSpec(frozenset({("3", "b")}))
    assert_raises(ScenarioError, build_scenario, g1(), MixedSpec((loss_b, fair)))
    fair = OutputFairnessSpec(frozenset({("2", "a")}))
    c = build_scenario(g1(), MixedSpec((loss_b, fair)))
    assert c.ap == {"m0_ch1", "m1_ch1", "m_eps_q2_a"}
    assert c.labeling(ExtendedEvent("2", "a", EPSILON)) == {"m_eps_q2_a"}


def test_mixed_conflicting_observations():
    loss_b = KLossSpec(frozenset({"f", "u", "a", "c"}), (frozenset({"b"}),), (0,))
    dwell_a = DwellTimeSpec(frozenset({"b", "c"}), frozenset({"f", "u"}), frozenset({"a"}), 1, 1)
    assert_raises(ScenarioError, build_scenario, g1(), MixedSpec((loss_b, dwell_a)))


def test_scenario_dicts():
    for spec in (g1_per_spec(), g2_kloss_spec(), g3_fair_spec(), MixedSpec((g3_fair_spec(),))):
        assert scenario_from_dict(spec.to_dict()) == spec
    d = g2_kloss_spec().to_dict()
    d["params"]["bounds"] = ["unbounded", 1]
    assert scenario_from_dict(d).bounds == (None, 1)


@pytest.mark.parametrize(
    "d",
    [
        {"template": "nope", "params": {}},
        {"template": "k_loss"},
        {"template": "k_loss", "params": {"sigma_uo": [], "channels": [["a"]], "bounds": [-1]}},
        {"template": "dwell_time", "params": {"sigma_o": [], "sigma_uo": [], "sigma_ur": [], "k_n": 0, "k_f": 1}},
        {"template": "output_fairness", "params": {"t_fair": [["2"]]}},
        {"template": "mixed", "params": {"specs": []}},
        {"template": "intermittent_permanent", "params": {"t_uo": [], "t_o": [], "t_int": [], "t_per": [], "x": 1}},
    ],
)
def test_scenario_dict_errors(d):
    assert_raises(ScenarioError, scenario_from_dict, d)


def test_raw_constraints():
    c = load_constraint(DATA_DIR / "g1_per_raw.json", g1())
    assert c.labeling(E("3", "b", EPSILON)) == {"m1"}
    assert c.overlay is None
    again = constraint_from_dict(constraint_to_dict(c), g1())
    assert again == c
    assert_raises(ScenarioError, constraint_from_dict, {"ltl": "true"}, g1())
    bad_event = {"ltl": "p", "ap": ["p"], "labeling": [{"q": "3", "sigma": "a", "o": "a", "atoms": ["p"]}]}
    assert_raises(ScenarioError, constraint_from_dict, bad_event, g1())
    bad_atom = {"ltl": "p", "ap": ["p"], "labeling": [{"q": "2", "sigma": "a", "o": "a", "atoms": ["q"]}]}
    assert_raises(ScenarioError, constraint_from_dict, bad_atom, g1())


def test_template_files():
    assert load_constraint(DATA_DIR / "g2_kloss.json", g2()) == build_scenario(g2(), g2_kloss_spec())
    assert load_constraint(DATA_DIR / "g3_fair.json", g3()).ap == {"m_o1_q2_a", "m_o2_q2_a"}
    assert str(load_constraint(DATA_DIR / "true.json", g1()).formula) == "true"
