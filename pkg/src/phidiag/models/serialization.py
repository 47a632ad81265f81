import json
from pathlib import Path
from typing import Any, Mapping, Union

from zuper_commons.types import ZValueError

from phidiag import logger
from .operations import NOT_LIVE, PlantViolation, validate_plant
from .structures import PlantModel, RESERVED_OUTPUTS

__all__ = [
    "PlantFormatError",
    "PlantValidationError",
    "plant_from_dict",
    "plant_to_dict",
    "load_plant",
    "dump_plant",
    "read_json",
]

_PLANT_KEYS = ("states", "events", "outputs", "initial", "fault_events", "transitions")
_TRANSITION_KEYS = ("from", "event", "to", "obs")


class PlantFormatError(ZValueError):
    pass


class PlantValidationError(ZValueError):
    def __init__(self, msg: str, violations: list[PlantViolation], **kwargs):
        super().__init__(msg, violations=[str(v) for v in violations], **kwargs)
        self.violations = violations


def read_json(path: Union[str, Path]) -> Any:
    """Reads a JSON document, turning decoding problems into input errors with a position."""
    try:
        with open(path, encoding="utf-8") as f:
            return json.load(f)
    except json.JSONDecodeError as e:
        raise PlantFormatError(f"Malformed JSON: {e.msg}", file=str(path), line=e.lineno, column=e.colno) from e
    except OSError as e:
        raise PlantFormatError("Cannot read file", file=str(path), reason=str(e)) from e


def _string_list(d: Mapping, key: str) -> list[str]:
    value = d[key]
    if not isinstance(value, list) or not all(isinstance(v, str) for v in value):
        raise PlantFormatError(f'"{key}" must be an array of strings', value=value)
    return value


def plant_from_dict(d: Any, allow_non_live: bool = False) -> PlantModel:
    """
    Builds and validates a plant from its JSON form.
    :param d: the decoded JSON object
    :param allow_non_live: downgrade liveness violations to warnings
    :return: the plant
    """
    if not isinstance(d, dict):
        raise PlantFormatError("A plant must be a JSON object", found=type(d).__name__)
    missing = [k for k in _PLANT_KEYS if k not in d]
    unknown = sorted(set(d) - set(_PLANT_KEYS))
    if missing or unknown:
        raise PlantFormatError("Unexpected plant keys", missing=missing, unknown=unknown)
    states = _string_list(d, "states")
    events = _string_list(d, "events")
    outputs = _string_list(d, "outputs")
    fault_events = _string_list(d, "fault_events")
    if not isinstance(d["initial"], str):
        raise PlantFormatError('"initial" must be a string', value=d["initial"])
    clashing = sorted(set(outputs) & RESERVED_OUTPUTS)
    if clashing:
        raise PlantFormatError("Output symbols collide with the silent symbol", outputs=clashing)
    if not isinstance(d["transitions"], list):
        raise PlantFormatError('"transitions" must be an array')

    delta, obs = {}, {}
    for i, row in enumerate(d["transitions"]):
        if not isinstance(row, dict) or sorted(row) != sorted(_TRANSITION_KEYS):
            raise PlantFormatError(f"Transition #{i} must have exactly the keys {list(_TRANSITION_KEYS)}", row=row)
        q, sigma, q_next, outs = row["from"], row["event"], row["to"], row["obs"]
        if not all(isinstance(x, str) for x in (q, sigma, q_next)):
            raise PlantFormatError(f"Transition #{i} has non-string identifiers", row=row)
        if not isinstance(outs, list) or not all(isinstance(o, str) for o in outs):
            raise PlantFormatError(f"Transition #{i}: obs must be an array of strings", row=row)
        if (q, sigma) in delta and delta[(q, sigma)] != q_next:
            raise PlantFormatError(f"Transition #{i} makes the plant non deterministic", state=q, event=sigma)
        delta[(q, sigma)] = q_next
        obs[(q, sigma)] = frozenset(outs)

    model = PlantModel(
        states=frozenset(states),
        events=frozenset(events),
        outputs=frozenset(outputs),
        initial=d["initial"],
        transitions=delta,
        fault_events=frozenset(fault_events),
        obs_map=obs,
    )
    violations = validate_plant(model)
    hard = [v for v in violations if v.kind != NOT_LIVE or not allow_non_live]
    for v in violations:
        if v not in hard:
            logger.warn(f"Proceeding with a non-live plant: {v}")
    if hard:
        raise PlantValidationError("Invalid plant", violations=hard)
    return model


def plant_to_dict(model: PlantModel) -> dict:
    return {
        "states": sorted(model.states),
        "events": sorted(model.events),
        "outputs": sorted(model.outputs),
        "initial": model.initial,
        "fault_events": sorted(model.fault_events),
        "transitions": [
            {
                "from": q,
                "event": sigma,
                "to": model.transitions[(q, sigma)],
                "obs": sorted(model.observations(q, sigma)),
            }
            for q, sigma in sorted(model.transitions)
        ],
    }


def load_plant(path: Union[str, Path], allow_non_live: bool = False) -> PlantModel:
    return plant_from_dict(read_json(path), allow_non_live=allow_non_live)


def dump_plant(model: PlantModel, path: Union[str, Path]) -> None:
    with open(path, "w", encoding="utf-8") as f:
        json.dump(plant_to_dict(model), f, indent=2)
