from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Any, ClassVar, FrozenSet, Mapping, Optional

from zuper_commons.types import ZValueError

from phidiag.models import Event, PlantModel, Transition

__all__ = [
    "ScenarioError",
    "ScenarioSpec",
    "IntermittentPermanentSpec",
    "KLossSpec",
    "DwellTimeSpec",
    "OutputFairnessSpec",
    "MixedSpec",
    "UNBOUNDED",
    "SPEC_TYPES",
]

UNBOUNDED = "unbounded"
""" JSON spelling of a K-loss channel without a bound on consecutive losses. """


class ScenarioError(ZValueError):
    pass


def _transitions(value: Any, key: str) -> FrozenSet[Transition]:
    if not isinstance(value, list):
        raise ScenarioError(f'"{key}" must be an array of [state, event] pairs', value=value)
    res = set()
    for pair in value:
        if not (isinstance(pair, list) and len(pair) == 2 and all(isinstance(x, str) for x in pair)):
            raise ScenarioError(f'"{key}" must be an array of [state, event] pairs', entry=pair)
        res.add((pair[0], pair[1]))
    return frozenset(res)


def _events(value: Any, key: str) -> FrozenSet[Event]:
    if not isinstance(value, list) or not all(isinstance(x, str) for x in value):
        raise ScenarioError(f'"{key}" must be an array of events', value=value)
    return frozenset(value)


def _positive_int(value: Any, key: str, minimum: int) -> int:
    if isinstance(value, bool) or not isinstance(value, int) or value < minimum:
        raise ScenarioError(f'"{key}" must be an integer >= {minimum}', value=value)
    return value


def _check_keys(params: Any, required: tuple[str, ...], optional: tuple[str, ...] = ()) -> Mapping[str, Any]:
    if not isinstance(params, dict):
        raise ScenarioError("Scenario parameters must be an object", params=params)
    missing = [k for k in required if k not in params]
    unknown = sorted(set(params) - set(required) - set(optional))
    if missing or unknown:
        raise ScenarioError("Unexpected scenario parameters", missing=missing, unknown=unknown)
    return params


def _pairs(ts: FrozenSet[Transition]) -> list[list[str]]:
    return [list(t) for t in sorted(ts)]


class ScenarioSpec(ABC):
    """Parameters of one sensor-constraint scenario."""

    tag: ClassVar[str]

    @abstractmethod
    def scope(self, model: PlantModel) -> FrozenSet[Transition]:
        """Transitions whose sensors this scenario speaks about."""

    @abstractmethod
    def to_params(self) -> dict:
        pass

    @classmethod
    @abstractmethod
    def from_params(cls, params: Any) -> "ScenarioSpec":
        pass

    def to_dict(self) -> dict:
        return {"template": self.tag, "params": self.to_params()}


@dataclass(frozen=True)
class IntermittentPermanentSpec(ScenarioSpec):
    tag: ClassVar[str] = "intermittent_permanent"

    t_uo: FrozenSet[Transition]
    """Never observed"""
    t_o: FrozenSet[Transition]
    """Always observed"""
    t_int: FrozenSet[Transition]
    """Subject to intermittent sensor failures"""
    t_per: FrozenSet[Transition]
    """Subject to permanent sensor failures"""
    per_event: bool = False
    """Merge the atoms of all permanent transitions sharing an event (one sensor per event)"""

    def scope(self, model: PlantModel) -> FrozenSet[Transition]:
        return self.t_int | self.t_per

    def to_params(self) -> dict:
        return {
            "t_uo": _pairs(self.t_uo),
            "t_o": _pairs(self.t_o),
            "t_int": _pairs(self.t_int),
            "t_per": _pairs(self.t_per),
            "per_event": self.per_event,
        }

    @classmethod
    def from_params(cls, params: Any) -> "IntermittentPermanentSpec":
        p = _check_keys(params, ("t_uo", "t_o", "t_int", "t_per"), ("per_event",))
        per_event = p.get("per_event", False)
        if not isinstance(per_event, bool):
            raise ScenarioError('"per_event" must be a boolean', value=per_event)
        return cls(
            t_uo=_transitions(p["t_uo"], "t_uo"),
            t_o=_transitions(p["t_o"], "t_o"),
            t_int=_transitions(p["t_int"], "t_int"),
            t_per=_transitions(p["t_per"], "t_per"),
            per_event=per_event,
        )


@dataclass(frozen=True)
class KLossSpec(ScenarioSpec):
    tag: ClassVar[str] = "k_loss"

    sigma_uo: FrozenSet[Event]
    """Unobservable events"""
    channels: tuple[FrozenSet[Event], ...]
    """Events transmitted on channel 1, 2, ..."""
    bounds: tuple[Optional[int], ...]
    """Maximal number of consecutive losses per channel, None when unbounded"""

    def scope(self, model: PlantModel) -> FrozenSet[Transition]:
        carried = frozenset().union(*self.channels)
        return frozenset(t for t in model.transitions if t[1] in carried)

    def to_params(self) -> dict:
        return {
            "sigma_uo": sorted(self.sigma_uo),
            "channels": [sorted(c) for c in self.channels],
            "bounds": [UNBOUNDED if k is None else k for k in self.bounds],
        }

    @classmethod
    def from_params(cls, params: Any) -> "KLossSpec":
        p = _check_keys(params, ("sigma_uo", "channels", "bounds"))
        if not isinstance(p["channels"], list) or not isinstance(p["bounds"], list):
            raise ScenarioError('"channels" and "bounds" must be arrays', params=p)
        channels = tuple(_events(c, "channels") for c in p["channels"])
        bounds = tuple(None if k == UNBOUNDED else _positive_int(k, "bounds", 0) for k in p["bounds"])
        return cls(sigma_uo=_events(p["sigma_uo"], "sigma_uo"), channels=channels, bounds=bounds)


@dataclass(frozen=True)
class DwellTimeSpec(ScenarioSpec):
    tag: ClassVar[str] = "dwell_time"

    sigma_o: FrozenSet[Event]
    """Reliably observed events"""
    sigma_uo: FrozenSet[Event]
    """Unobservable events"""
    sigma_ur: FrozenSet[Event]
    """Events observed by unreliable sensors"""
    k_n: int
    """Minimum dwell-time of the normal mode, in sensor uses"""
    k_f: int
    """Minimum dwell-time of the failure mode, in sensor uses"""

    def scope(self, model: PlantModel) -> FrozenSet[Transition]:
        return frozenset(t for t in model.transitions if t[1] in self.sigma_ur)

    def to_params(self) -> dict:
        return {
            "sigma_o": sorted(self.sigma_o),
            "sigma_uo": sorted(self.sigma_uo),
            "sigma_ur": sorted(self.sigma_ur),
            "k_n": self.k_n,
            "k_f": self.k_f,
        }

    @classmethod
    def from_params(cls, params: Any) -> "DwellTimeSpec":
        p = _check_keys(params, ("sigma_o", "sigma_uo", "sigma_ur", "k_n", "k_f"))
        return cls(
            sigma_o=_events(p["sigma_o"], "sigma_o"),
            sigma_uo=_events(p["sigma_uo"], "sigma_uo"),
            sigma_ur=_events(p["sigma_ur"], "sigma_ur"),
            k_n=_positive_int(p["k_n"], "k_n", 1),
            k_f=_positive_int(p["k_f"], "k_f", 1),
        )


@dataclass(frozen=True)
class OutputFairnessSpec(ScenarioSpec):
    tag: ClassVar[str] = "output_fairness"

    t_fair: FrozenSet[Transition]
    """Transitions whose every output shows up infinitely often when fired infinitely often"""

    def scope(self, model: PlantModel) -> FrozenSet[Transition]:
        return self.t_fair

    def to_params(self) -> dict:
        return {"t_fair": _pairs(self.t_fair)}

    @classmethod
    def from_params(cls, params: Any) -> "OutputFairnessSpec":
        p = _check_keys(params, ("t_fair",))
        return cls(t_fair=_transitions(p["t_fair"], "t_fair"))


@dataclass(frozen=True)
class MixedSpec(ScenarioSpec):
    tag: ClassVar[str] = "mixed"

    specs: tuple[ScenarioSpec, ...]
    """Scenarios over disjoint sensor scopes"""

    def scope(self, model: PlantModel) -> FrozenSet[Transition]:
        return frozenset().union(*(s.scope(model) for s in self.specs))

    def to_params(self) -> dict:
        return {"specs": [s.to_dict() for s in self.specs]}

    @classmethod
    def from_params(cls, params: Any) -> "MixedSpec":
        p = _check_keys(params, ("specs",))
        if not isinstance(p["specs"], list) or not p["specs"]:
            raise ScenarioError('"specs" must be a non-empty array', value=p["specs"])
        from .factory import scenario_from_dict

        return cls(specs=tuple(scenario_from_dict(s) for s in p["specs"]))


SPEC_TYPES: Mapping[str, type[ScenarioSpec]] = {
    c.tag: c for c in (IntermittentPermanentSpec, KLossSpec, DwellTimeSpec, OutputFairnessSpec, MixedSpec)
}
