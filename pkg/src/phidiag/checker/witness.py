from typing import Optional

from phidiag.ltl import BuchiAutomaton, SensorConstraint, eval_lasso, ltl_to_nba
from phidiag.models import Axis, Lasso, PlantModel, apply_overlay, is_faulty, is_generated, project
from phidiag.synthesis import augment, constrain
from .verdict import Verdict

__all__ = ["validate_witness"]


def validate_witness(
    model: PlantModel, constraint: SensorConstraint, verdict: Verdict, nba: Optional[BuchiAutomaton] = None
) -> list[str]:
    """
    Re-checks a negative verdict without looking at the verification system:
    the faulty run is a plant lasso satisfying the formula, every prefix of the normal run
    keeps a feasible normal constrained state, and both runs show the same outputs.
    :return: the problems found, empty when the witness is valid
    """
    if verdict.diagnosable:
        return [] if verdict.witness is None else ["a diagnosable verdict carries a witness"]
    w = verdict.witness
    if w is None:
        return ["a negative verdict without witness"]
    problems = []
    shaped = apply_overlay(model, constraint.overlay)
    theta1, theta2 = w.theta1, w.theta2

    if not is_generated(shaped, theta1):
        problems.append(f"the faulty run is not a lasso of the plant: {theta1}")
    if not is_faulty(theta1, shaped):
        problems.append("the faulty run contains no fault event")
    trace = Lasso(
        tuple(constraint.labeling(e) for e in theta1.prefix), tuple(constraint.labeling(e) for e in theta1.cycle)
    )
    if not eval_lasso(trace, constraint.formula):
        problems.append("the sensor readings of the faulty run violate the constraint")

    normal = theta2.unroll(2)
    if not is_generated(shaped, normal):
        problems.append("the normal run is not generated by the plant")
    if is_faulty(normal, shaped):
        problems.append("the normal run contains a fault event")
    if not problems:
        if nba is None:
            nba = ltl_to_nba(constraint.formula)
        t = constrain(augment(shaped), nba, constraint.labeling)
        good = t.feasible & t.normal_states
        current = set(t.initial)
        for i in range(len(normal) + 1):
            if not current & good:
                problems.append(f"the normal run leaves the feasible normal states after {i} events")
                break
            if i < len(normal):
                e = normal[i]
                current = {s_next for s in current for e2, s_next in t.successors(s) if e2 == e}

    pairs = w.word.unroll(2)
    seen1 = project(tuple(p.first for p in pairs if p.first is not None), Axis.OUTPUT)
    seen2 = project(tuple(p.second for p in pairs if p.second is not None), Axis.OUTPUT)
    if seen1 != seen2:
        problems.append(f"the runs are distinguishable: {seen1} vs {seen2}")
    return problems
