"""Daily discrete-time SEIR process over the live partnership edges."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import kernels as _default_kernels
from .errors import ConfigurationError
from .network import CASUAL, MAIN, ONETIME, Population
from .rng import draw_stage_days

S, E, I, R = 0, 1, 2, 3
STATE_NAMES = ("S", "E", "I", "R")

FULL, PARTIAL = "full", "partial"


@dataclass
class StageParams:
    exposed_mean: float = 7.0
    exposed_sd: float = 1.0
    infectious_mean: float = 27.0
    infectious_sd: float = 3.0


@dataclass
class DiagnosisDelay:
    initial: int = 15
    every: int = 4
    floor: int = 5

    def __call__(self, day):
        return diagnosis_delay(day, self.initial, self.every, self.floor)


def diagnosis_delay(day, initial=15, every=4, floor=5):
    """Days from symptom onset to diagnosis for someone entering I on ``day``."""
    if day < 0:
        raise ValueError("day must be non-negative")
    return max(floor, initial - day // every)


def isolation_multiplier(isolating, kind, mode=FULL) -> float:
    """Contact-probability factor for an infectious node on an edge of ``kind``."""
    if not isolating:
        return 1.0
    if mode == FULL:
        return 0.0
    if mode == PARTIAL:
        return 0.0 if kind == ONETIME else 0.5
    raise ConfigurationError(f"unknown isolation mode {mode!r}")


@dataclass
class HealthLedger:
    state: np.ndarray
    days_left_exposed: np.ndarray
    days_left_infectious: np.ndarray
    seeks_care: np.ndarray
    diagnosis_day: np.ndarray  # -1 when never diagnosed
    exposed_day: np.ndarray  # -1 when never infected
    infectious_start: np.ndarray
    infectious_end: np.ndarray  # day of I -> R, -1 while still infectious
    doses: np.ndarray
    day_dose1: np.ndarray
    day_dose2: np.ndarray
    susceptibility: np.ndarray

    @classmethod
    def new(cls, n, rng, care_seeking=0.8):
        """Everyone susceptible; care-seeking drawn once per node."""
        neg = lambda: np.full(n, -1, dtype=np.int64)  # noqa: E731
        return cls(
            state=np.zeros(n, dtype=np.int8),
            days_left_exposed=np.zeros(n, dtype=np.int64),
            days_left_infectious=np.zeros(n, dtype=np.int64),
            seeks_care=rng.random(n) < care_seeking,
            diagnosis_day=neg(),
            exposed_day=neg(),
            infectious_start=neg(),
            infectious_end=neg(),
            doses=np.zeros(n, dtype=np.int8),
            day_dose1=neg(),
            day_dose2=neg(),
            susceptibility=np.ones(n, dtype=np.float64),
        )

    @property
    def n(self):
        return int(self.state.size)

    def counts(self) -> np.ndarray:
        return np.bincount(self.state, minlength=4)

    def isolating(self, day) -> np.ndarray:
        d = self.diagnosis_day
        return (self.state == I) & (d >= 0) & (d <= day)


@dataclass
class InfectionLog:
    """Provenance of every infection; seeds carry source -1 and kind -1."""

    _chunks: list = field(default_factory=list)

    def add(self, source, target, day, kind):
        if len(target):
            self._chunks.append(np.column_stack([
                np.asarray(source, np.int64), np.asarray(target, np.int64),
                np.full(len(target), day, np.int64), np.asarray(kind, np.int64),
            ]))

    def table(self) -> np.ndarray:
        """Rows of (source, target, day, kind)."""
        return np.concatenate(self._chunks) if self._chunks else np.empty((0, 4), np.int64)

    def __len__(self):
        return sum(len(c) for c in self._chunks)


def _enter_infectious(ledger, nodes, day, delay):
    ledger.state[nodes] = I
    ledger.infectious_start[nodes] = day
    care = nodes[ledger.seeks_care[nodes]]
    if care.size:
        ledger.diagnosis_day[care] = day + delay(day)


def seed_infections(pop: Population, ledger: HealthLedger, fraction, rng, log: InfectionLog, *,
                    stages=None, delay=None, strata=(5, 6), day=0) -> np.ndarray:
    """Start ``round(fraction * N)`` infections among the top activity strata."""
    stages = stages or StageParams()
    delay = delay or DiagnosisDelay()
    if fraction < 0 or fraction > 1:
        raise ConfigurationError("seed fraction must lie in [0, 1]")
    n_seed = int(np.floor(fraction * pop.n + 0.5))
    pool = np.flatnonzero(np.isin(pop.stratum, strata))
    if n_seed > pool.size:
        raise ConfigurationError(f"{n_seed} seeds requested but only {pool.size} nodes in strata {strata}")
    if n_seed == 0:
        return np.empty(0, np.int64)
    seeds = np.sort(rng.choice(pool, size=n_seed, replace=False))
    ledger.days_left_infectious[seeds] = draw_stage_days(
        stages.infectious_mean, stages.infectious_sd, rng, size=n_seed)
    ledger.exposed_day[seeds] = day
    _enter_infectious(ledger, seeds, day, delay)
    log.add(np.full(n_seed, -1), seeds, day, np.full(n_seed, -1))
    return seeds


def advance_disease(ledger: HealthLedger, day, *, delay=None):
    """Tick stage timers; returns ``(n_E_to_I, n_I_to_R)``."""
    delay = delay or DiagnosisDelay()
    exp = np.flatnonzero(ledger.state == E)
    inf = np.flatnonzero(ledger.state == I)
    ledger.days_left_exposed[exp] -= 1
    ledger.days_left_infectious[inf] -= 1
    recov = inf[ledger.days_left_infectious[inf] <= 0]
    ledger.state[recov] = R
    ledger.infectious_end[recov] = day
    onset = exp[ledger.days_left_exposed[exp] <= 0]
    if onset.size:
        _enter_infectious(ledger, onset, day, delay)
    return int(onset.size), int(recov.size)


def contact_and_transmit(edges, ledger: HealthLedger, day, rng, log: InfectionLog, contacts, *,
                         beta=0.9, contact_prob=(0.22, 0.14, 1.0), isolation=FULL,
                         stages=None, kern=None):
    """Evaluate each live edge once for contact and transmission today.

    ``edges`` is ``(u, v, kind)``.  Two uniforms are drawn per edge (contact,
    then transmission) regardless of health states so that the number of
    draws depends only on the network.  ``contacts`` (N x 3) accumulates
    realised contacts between a susceptible node and an infectious partner.
    Returns the newly exposed node ids.
    """
    kern = kern or _default_kernels
    stages = stages or StageParams()
    if isolation not in (FULL, PARTIAL):
        raise ConfigurationError(f"unknown isolation mode {isolation!r}")
    u, v, kind = edges
    n_e = u.size
    uc = rng.random(n_e)
    ut = rng.random(n_e)
    src, tgt, k = kern.spread(
        u, v, kind, ledger.state, ledger.isolating(day), isolation == PARTIAL,
        ledger.susceptibility, np.asarray(contact_prob, dtype=np.float64), float(beta),
        uc, ut, contacts,
    )
    if tgt.size:
        ledger.state[tgt] = E
        ledger.exposed_day[tgt] = day
        ledger.days_left_exposed[tgt] = draw_stage_days(stages.exposed_mean, stages.exposed_sd, rng, size=tgt.size)
        ledger.days_left_infectious[tgt] = draw_stage_days(stages.infectious_mean, stages.infectious_sd, rng, size=tgt.size)
        log.add(src, tgt, day, k)
    return tgt


__all__ = [
    "S", "E", "I", "R", "MAIN", "CASUAL", "ONETIME", "FULL", "PARTIAL",
    "StageParams", "DiagnosisDelay", "HealthLedger", "InfectionLog",
    "diagnosis_delay", "isolation_multiplier", "seed_infections",
    "advance_disease", "contact_and_transmit",
]
