from pathlib import Path
from typing import Any, Union

from phidiag.models import ExtendedEvent, PlantModel, read_json
from phidiag.ltl import LabelingFunction, SensorConstraint, parse_ltl
from .scenarios import build_scenario
from .structures import SPEC_TYPES, ScenarioError, ScenarioSpec

__all__ = ["scenario_from_dict", "constraint_from_dict", "constraint_to_dict", "load_constraint"]

_RAW_KEYS = {"ltl", "ap", "labeling"}
_LABEL_KEYS = {"q", "sigma", "o", "atoms"}


def scenario_from_dict(d: Any) -> ScenarioSpec:
    """Reads a `{"template": ..., "params": {...}}` object."""
    if not isinstance(d, dict) or set(d) != {"template", "params"}:
        raise ScenarioError('A scenario is an object with exactly the keys "template" and "params"', value=d)
    try:
        spec_type = SPEC_TYPES[d["template"]]
    except (KeyError, TypeError):
        raise ScenarioError("Unknown template", template=d["template"], known=sorted(SPEC_TYPES)) from None
    return spec_type.from_params(d["params"])


def _raw_constraint(d: dict, model: PlantModel) -> SensorConstraint:
    unknown = set(d) - _RAW_KEYS
    if unknown or not {"ltl", "ap"} <= set(d):
        raise ScenarioError('A raw constraint needs "ltl" and "ap", optionally "labeling"', unknown=sorted(unknown))
    ap = d["ap"]
    if not isinstance(ap, list) or not all(isinstance(a, str) for a in ap):
        raise ScenarioError('"ap" must be an array of names', value=ap)
    if not isinstance(d["ltl"], str):
        raise ScenarioError('"ltl" must be a string', value=d["ltl"])
    formula = parse_ltl(d["ltl"], ap)
    table = {}
    for entry in d.get("labeling", []):
        if not isinstance(entry, dict) or set(entry) != _LABEL_KEYS:
            raise ScenarioError("A labeling entry is an object with keys q, sigma, o, atoms", entry=entry)
        if not all(isinstance(entry[k], str) for k in ("q", "sigma", "o")) or not isinstance(entry["atoms"], list):
            raise ScenarioError("Labeling entries hold strings and an array of atoms", entry=entry)
        e = ExtendedEvent(entry["q"], entry["sigma"], entry["o"])
        if e.transition not in model.transitions or e.o not in model.observations(e.q, e.sigma):
            raise ScenarioError("Labeling of an extended event the plant cannot produce", event=str(e))
        atoms = frozenset(entry["atoms"])
        if not atoms <= frozenset(ap):
            raise ScenarioError("Labeling uses undeclared atoms", event=str(e), undeclared=sorted(atoms - set(ap)))
        table[e] = table.get(e, frozenset()) | atoms
    return SensorConstraint(frozenset(ap), LabelingFunction(table, frozenset(ap)), formula)


def constraint_from_dict(d: Any, model: PlantModel) -> SensorConstraint:
    """Either a template instance or a raw `{ltl, ap, labeling}` triple."""
    if not isinstance(d, dict):
        raise ScenarioError("A constraint must be a JSON object", value=d)
    if "template" in d:
        return build_scenario(model, scenario_from_dict(d))
    return _raw_constraint(d, model)


def constraint_to_dict(c: SensorConstraint) -> dict:
    """Raw form of a constraint. The observation overlay is not part of it."""
    return {
        "ltl": str(c.formula),
        "ap": sorted(c.ap),
        "labeling": [
            {"q": e.q, "sigma": e.sigma, "o": e.o, "atoms": sorted(atoms)}
            for e, atoms in sorted(c.labeling.table.items())
        ],
    }


def load_constraint(path: Union[str, Path], model: PlantModel) -> SensorConstraint:
    return constraint_from_dict(read_json(path), model)
