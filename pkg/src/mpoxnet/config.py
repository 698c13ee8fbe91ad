"""Scenario configuration, named presets and YAML round-tripping."""
from __future__ import annotations

import dataclasses
import hashlib
import json
from dataclasses import dataclass, field

import yaml

from .epidemic import FULL, PARTIAL
from .errors import ConfigurationError
from .interventions import BehaviorChangePolicy, VaccinationPolicy
from .network import (CASUAL_DURATION, MAIN_DURATION, REL_CLASS_WEIGHTS, STRATUM_P_ONETIME,
                      STRATUM_WEIGHTS)

TARGET_STRATA = (5, 6)


@dataclass
class ScenarioConfig:
    name: str = "baseline"
    n_nodes: int = 10_000
    horizon: int = 250
    beta: float = 0.9
    seed_fraction: float = 0.001
    seed_strata: tuple = TARGET_STRATA
    exposed_mean: float = 7.0
    exposed_sd: float = 1.0
    infectious_mean: float = 27.0
    infectious_sd: float = 3.0
    care_seeking: float = 0.8
    isolation: str = FULL
    contact_main: float = 0.22
    contact_casual: float = 0.14
    contact_onetime: float = 1.0
    main_duration: float = MAIN_DURATION
    casual_duration: float = CASUAL_DURATION
    rel_class_weights: tuple = REL_CLASS_WEIGHTS
    stratum_weights: tuple = STRATUM_WEIGHTS
    stratum_p_onetime: tuple = STRATUM_P_ONETIME
    delay_initial: int = 15
    delay_every: int = 4
    delay_floor: int = 5
    behavior_change: BehaviorChangePolicy | None = None
    vaccination: VaccinationPolicy | None = None
    replicates: int = 100
    seed: int = 0
    stop_when_extinct: bool = True
    record_edges: bool = False

    def __post_init__(self):
        self.seed_strata = tuple(self.seed_strata)
        self.rel_class_weights = tuple(self.rel_class_weights)
        self.stratum_weights = tuple(self.stratum_weights)
        self.stratum_p_onetime = tuple(self.stratum_p_onetime)
        if isinstance(self.behavior_change, dict):
            self.behavior_change = BehaviorChangePolicy(**self.behavior_change)
        if isinstance(self.vaccination, dict):
            self.vaccination = VaccinationPolicy(**self.vaccination)

    def validate(self):
        probs = ("beta", "seed_fraction", "care_seeking", "contact_main", "contact_casual", "contact_onetime")
        for name in probs:
            val = getattr(self, name)
            if not 0 <= val <= 1:
                raise ConfigurationError(f"{name}={val} is not a probability")
        if self.n_nodes < 2:
            raise ConfigurationError("n_nodes must be at least 2")
        if self.horizon < 1:
            raise ConfigurationError("horizon must be at least 1 day")
        if self.replicates < 1:
            raise ConfigurationError("replicates must be at least 1")
        if self.isolation not in (FULL, PARTIAL):
            raise ConfigurationError(f"isolation must be 'full' or 'partial', got {self.isolation!r}")
        for name in ("exposed_mean", "exposed_sd", "infectious_mean", "infectious_sd"):
            if getattr(self, name) <= 0:
                raise ConfigurationError(f"{name} must be positive")
        for name in ("main_duration", "casual_duration"):
            if getattr(self, name) < 1:
                raise ConfigurationError(f"{name} must be at least 1 day")
        if any(p < 0 or p >= 1 for p in self.stratum_p_onetime) or len(self.stratum_p_onetime) != 6:
            raise ConfigurationError("stratum_p_onetime must be six values in [0, 1)")
        for name in ("rel_class_weights", "stratum_weights"):
            w = getattr(self, name)
            if len(w) != 6 or any(x < 0 for x in w) or abs(sum(w) - 1) > 1e-9:
                raise ConfigurationError(f"{name} must be six non-negative weights summing to 1")
        if self.delay_floor < 0 or self.delay_every < 1:
            raise ConfigurationError("invalid diagnosis-delay parameters")
        if self.seed < 0:
            raise ConfigurationError("seed must be non-negative")
        return self

    @property
    def contact_prob(self):
        return (self.contact_main, self.contact_casual, self.contact_onetime)

    def to_dict(self) -> dict:
        d = dataclasses.asdict(self)
        for key in ("behavior_change", "vaccination"):
            if d[key] is not None:
                d[key].pop("strata", None)
        for key, val in list(d.items()):
            if isinstance(val, tuple):
                d[key] = list(val)
        return d

    def digest(self) -> str:
        blob = json.dumps(self.to_dict(), sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()[:16]

    def replace(self, **changes) -> "ScenarioConfig":
        return dataclasses.replace(self, **changes)


def from_dict(data: dict) -> ScenarioConfig:
    data = dict(data)
    base = data.pop("preset", None)
    cfg = preset(base) if base else ScenarioConfig()
    known = {f.name for f in dataclasses.fields(ScenarioConfig)}
    unknown = set(data) - known
    if unknown:
        raise ConfigurationError(f"unknown config keys: {sorted(unknown)}")
    try:
        for key in ("behavior_change", "vaccination"):
            if isinstance(data.get(key), dict):
                policy_cls = BehaviorChangePolicy if key == "behavior_change" else VaccinationPolicy
                current = getattr(cfg, key)
                merged = dataclasses.asdict(current) if current is not None else {}
                merged.pop("strata", None)
                merged.update(data[key])
                data[key] = policy_cls(**merged)
        return cfg.replace(**data).validate()
    except TypeError as exc:
        raise ConfigurationError(str(exc)) from None


def load_config(path) -> ScenarioConfig:
    with open(path) as fh:
        data = yaml.safe_load(fh) or {}
    if not isinstance(data, dict):
        raise ConfigurationError(f"{path}: top level must be a mapping")
    return from_dict(data)


def dump_config(cfg: ScenarioConfig, path):
    with open(path, "w") as fh:
        yaml.safe_dump(cfg.to_dict(), fh, sort_keys=False)


# -- presets ---------------------------------------------------------------

def _bc(targeting="universal", start=70, reduction=0.5):
    return BehaviorChangePolicy(start_day=start, reduction=reduction, targeting=targeting)


def _vax(targeting="random", start=30):
    return VaccinationPolicy(start_day=start, targeting=targeting)


# Optimistic pairs the long incubation with the short infectious period and
# pessimistic the reverse.
OPTIMISTIC = dict(exposed_mean=9.9, exposed_sd=1.0, infectious_mean=14.0, infectious_sd=3.0)
PESSIMISTIC = dict(exposed_mean=5.6, exposed_sd=1.0, infectious_mean=28.0, infectious_sd=3.0)


def _presets():
    tgt = list(TARGET_STRATA)
    base = {
        "baseline": {},
        "universal_bc": dict(behavior_change=_bc()),
        "universal_bc_vax": dict(behavior_change=_bc(), vaccination=_vax()),
        "targeted": dict(behavior_change=_bc(tgt), vaccination=_vax(tgt)),
    }
    out = {}
    for name, kw in base.items():
        out[name] = kw
        out[f"partial_{name}"] = dict(kw, isolation=PARTIAL)
    for label, clinical in (("optimistic", OPTIMISTIC), ("pessimistic", PESSIMISTIC)):
        for beta_label, beta in (("", 0.9), ("_beta05", 0.5)):
            for iso_label, iso in (("", FULL), ("_partial", PARTIAL)):
                out[f"{label}{beta_label}{iso_label}"] = dict(clinical, beta=beta, isolation=iso)
                out[f"{label}{beta_label}{iso_label}_intervention"] = dict(
                    clinical, beta=beta, isolation=iso,
                    behavior_change=_bc(), vaccination=_vax())
    out["main"] = out["targeted"]
    return out


PRESET_NAMES = tuple(sorted(_presets()))


def preset(name: str, **overrides) -> ScenarioConfig:
    """A named scenario; the default main result is ``targeted``."""
    table = _presets()
    if name not in table:
        raise ConfigurationError(f"unknown preset {name!r}; choose from {', '.join(PRESET_NAMES)}")
    kw = dict(table[name])
    kw.update(overrides)
    return ScenarioConfig(name=name, **kw).validate()
