import numpy as np
import pytest

from phidiag.ltl import (
    LtlFormula,
    atoms,
    eval_lasso,
    formula_size,
    ltl_to_nba,
    nba_accepts_lasso,
    nba_to_dot,
    parse_ltl,
    to_string,
)
from phidiag.sampling import random_formula, random_word
from phidiag.templates import DwellTimeSpec, build_scenario
from phidiag_tests.worked_systems import g1, permanent_failure_nba


def test_constants():
    nba = ltl_to_nba(parse_ltl("true"))
    assert len(nba.states) == 1
    assert nba.accepting == nba.initial == nba.states
    nba = ltl_to_nba(parse_ltl("false"))
    assert not nba.states and not nba.initial


def test_dot_export():
    dot = nba_to_dot(ltl_to_nba(parse_ltl("true")))
    assert dot.startswith("digraph NBA {")
    assert "doublecircle" in dot
    assert '[label="true"]' in dot


def test_permanent_failure_matches_drawn_automaton():
    nba = ltl_to_nba(parse_ltl("G (m1 -> G !m0)"))
    drawn = permanent_failure_nba()
    rng = np.random.default_rng(3)
    for _ in range(300):
        w = random_word(rng, ["m0", "m1"])
        assert nba_accepts_lasso(nba, w) == nba_accepts_lasso(drawn, w)


@pytest.mark.parametrize("text", ["F G p", "G F p", "p U q", "G (p -> F q)", "!(p U q)", "X X p", "F (p & X !p)"])
def test_small_formulas(text):
    formula = parse_ltl(text, ["p", "q"])
    nba = ltl_to_nba(formula)
    assert nba.ap == {"p", "q"}
    rng = np.random.default_rng(7)
    for _ in range(200):
        w = random_word(rng, ["p", "q"])
        assert nba_accepts_lasso(nba, w) == eval_lasso(w, formula), str(w)


def test_random_formulas_agree_with_semantics():
    rng = np.random.default_rng(0)
    names = ["p", "q", "r"]
    for _ in range(500):
        tree = random_formula(rng, names)
        formula = LtlFormula(tree, atoms(tree))
        w = random_word(rng, names)
        assert nba_accepts_lasso(ltl_to_nba(formula), w) == eval_lasso(w, formula), (to_string(tree), w)


@pytest.mark.parametrize("text, n_states", [("true", 1), ("X p", 3), ("G F p", 2), ("G p", 1), ("p U q", 2)])
def test_reduced_sizes(text, n_states):
    assert len(ltl_to_nba(parse_ltl(text, ["p", "q"])).states) == n_states


def test_dwell_time_constraint_is_small():
    spec = DwellTimeSpec(
        sigma_o=frozenset({"b"}), sigma_uo=frozenset({"f", "u"}), sigma_ur=frozenset({"a", "c"}), k_n=1, k_f=2
    )
    nba = ltl_to_nba(build_scenario(g1(), spec).formula)
    assert len(nba.states) <= 16
    assert nba.accepting == nba.states


@pytest.mark.parametrize("seed", range(4))
def test_size_bound(seed):
    rng = np.random.default_rng(100 + seed)
    names = ["p", "q", "r"]
    for _ in range(50):
        tree = random_formula(rng, names)
        n = formula_size(tree)
        assert len(ltl_to_nba(LtlFormula(tree, atoms(tree))).states) <= 2**n * n, to_string(tree)


def test_next_fits_the_node_count_bound():
    tree = parse_ltl("X p", ["p"]).tree
    n = formula_size(tree)
    assert n == 2
    assert len(ltl_to_nba(LtlFormula(tree, frozenset({"p"}))).states) == 3 <= 2**n * n
