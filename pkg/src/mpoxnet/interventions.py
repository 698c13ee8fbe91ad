"""Behaviour change and two-dose vaccination."""
from __future__ import annotations

import csv
import datetime as dt
from dataclasses import dataclass, field
from importlib import resources

import numpy as np

from .epidemic import I, R, HealthLedger
from .errors import ConfigurationError, InputError
from .network import Population

AT_RISK_POPULATION = 1_998_039
FIRST_DOSE_MALE_SHARE = 0.91
SECOND_DOSE_MALE_SHARE = 0.94
VE_ONE_DOSE = 0.358
VE_TWO_DOSES = 0.66
DOSE_GAP_DAYS = 28
SNAPSHOT_FILE = "jynneos_weekly_snapshot.csv"


def _targeting(value):
    if value in ("universal", "random", None):
        return None
    strata = tuple(sorted(int(s) for s in value))
    if not strata or any(s < 1 or s > 6 for s in strata):
        raise ConfigurationError(f"targeted strata must be within 1..6, got {value!r}")
    return strata


@dataclass
class BehaviorChangePolicy:
    start_day: int = 70
    reduction: float = 0.5
    targeting: object = "universal"  # "universal" or an iterable of strata

    def __post_init__(self):
        if not 0 < self.reduction < 1:
            raise ConfigurationError("behaviour-change reduction must lie in (0, 1)")
        self.strata = _targeting(self.targeting)
        if self.strata is not None:
            self.targeting = list(self.strata)


def apply_behavior_change(pop: Population, policy: BehaviorChangePolicy) -> np.ndarray:
    """Scale targeted nodes' one-time propensity down from its baseline.

    Anchored to ``p_onetime_base``, so applying twice is harmless.  Returns
    the mask of targeted nodes.
    """
    if policy.strata is None:
        mask = np.ones(pop.n, dtype=bool)
    else:
        mask = np.isin(pop.stratum, policy.strata)
    pop.p_onetime[mask] = pop.p_onetime_base[mask] * (1.0 - policy.reduction)
    return mask


@dataclass
class DoseSchedule:
    """Daily first/second dose availability for the simulated population."""

    dose1: np.ndarray
    dose2: np.ndarray
    start_date: dt.date | None = None

    def __len__(self):
        return int(self.dose1.size)

    def available(self, index):
        if index < 0 or index >= self.dose1.size:
            return 0.0, 0.0
        return float(self.dose1[index]), float(self.dose2[index])


def read_weekly_doses(path=None):
    """Read ``(week_start_date, first_doses, second_doses)`` rows.

    ``path=None`` reads the snapshot bundled with the package.
    """
    if path is None:
        text = resources.files("mpoxnet").joinpath("data", SNAPSHOT_FILE).read_text()
    else:
        with open(path, newline="") as fh:
            text = fh.read()
    rows = []
    reader = csv.DictReader(text.splitlines())
    missing = {"week_start_date", "first_doses", "second_doses"} - set(reader.fieldnames or ())
    if missing:
        raise InputError(f"dose file missing columns: {sorted(missing)}")
    for rec in reader:
        try:
            week = dt.date.fromisoformat(rec["week_start_date"].strip())
            first = float(rec["first_doses"])
            second = float(rec["second_doses"])
        except ValueError as exc:
            raise InputError(f"bad dose row {rec}: {exc}") from None
        rows.append((week, first, second))
    return rows


def load_dose_schedule(weekly, n_nodes, at_risk_pop=AT_RISK_POPULATION, *,
                       first_share=FIRST_DOSE_MALE_SHARE,
                       second_share=SECOND_DOSE_MALE_SHARE) -> DoseSchedule:
    """Convert national weekly dose counts into per-day availability for ``n_nodes``.

    daily = weekly * male_share / at_risk_pop * n_nodes / 7.  Weeks absent
    between the first and last record contribute zero availability.
    """
    if not weekly:
        return DoseSchedule(np.zeros(0), np.zeros(0))
    weekly = sorted(weekly, key=lambda r: r[0])
    start = weekly[0][0]
    n_days = (weekly[-1][0] - start).days + 7
    d1 = np.zeros(n_days)
    d2 = np.zeros(n_days)
    scale = n_nodes / at_risk_pop / 7.0
    for week, first, second in weekly:
        if first < 0 or second < 0:
            raise InputError(f"negative dose count in week {week}")
        off = (week - start).days
        d1[off:off + 7] = first * first_share * scale
        d2[off:off + 7] = second * second_share * scale
    return DoseSchedule(d1, d2, start)


@dataclass
class VaccinationPolicy:
    start_day: int = 30
    targeting: object = "random"  # "random" or an iterable of strata
    fallback: bool = True  # spill doses to other nodes once the targeted set is exhausted
    ve_one: float = VE_ONE_DOSE
    ve_two: float = VE_TWO_DOSES
    dose_gap: int = DOSE_GAP_DAYS
    schedule_path: str | None = None
    uptake: bool = False  # gate eligibility by per-node willingness
    p_one_dose: float = 0.14
    p_two_doses: float = 0.227

    def __post_init__(self):
        self.strata = _targeting(self.targeting)
        if self.strata is not None:
            self.targeting = list(self.strata)
        for name in ("ve_one", "ve_two", "p_one_dose", "p_two_doses"):
            val = getattr(self, name)
            if not 0 <= val <= 1:
                raise ConfigurationError(f"{name} must lie in [0, 1]")
        if self.p_one_dose + self.p_two_doses > 1:
            raise ConfigurationError("p_one_dose + p_two_doses exceeds 1")
        if self.dose_gap < 1:
            raise ConfigurationError("dose_gap must be at least 1 day")


@dataclass
class VaccinationState:
    carry1: float = 0.0
    carry2: float = 0.0
    administered1: int = 0
    administered2: int = 0
    available1: float = 0.0
    available2: float = 0.0
    willing1: np.ndarray | None = None
    willing2: np.ndarray | None = None
    daily: list = field(default_factory=list)  # (day, dose1, dose2)

    @classmethod
    def new(cls, n, policy: VaccinationPolicy, rng):
        st = cls()
        if policy.uptake:
            u = rng.random(n)
            st.willing1 = u < policy.p_one_dose + policy.p_two_doses
            st.willing2 = u < policy.p_two_doses
        return st


def _pick(rng, pool, k):
    if k >= pool.size:
        return pool
    return np.sort(rng.choice(pool, size=k, replace=False))


def vaccinate_step(ledger: HealthLedger, pop: Population, schedule: DoseSchedule, day,
                   policy: VaccinationPolicy, rng, state: VaccinationState):
    """Administer today's doses; the schedule index is ``day - policy.start_day``.

    Fractional availability is carried to the next day; whole doses that find
    no eligible recipient are lost.  Returns ``(n_dose1, n_dose2)``.
    """
    if day < policy.start_day:
        return 0, 0
    a1, a2 = schedule.available(day - policy.start_day)
    state.available1 += a1
    state.available2 += a2
    total1 = a1 + state.carry1
    total2 = a2 + state.carry2
    k1 = int(np.floor(total1))
    k2 = int(np.floor(total2))
    state.carry1 = total1 - k1
    state.carry2 = total2 - k2

    given1 = given2 = 0
    if k1 > 0:
        ok = (ledger.doses == 0) & (ledger.state != I) & (ledger.state != R)
        if state.willing1 is not None:
            ok &= state.willing1
        if policy.strata is None:
            chosen = _pick(rng, np.flatnonzero(ok), k1)
        else:
            target = np.isin(pop.stratum, policy.strata)
            chosen = _pick(rng, np.flatnonzero(ok & target), k1)
            if policy.fallback and chosen.size < k1:
                rest = _pick(rng, np.flatnonzero(ok & ~target), k1 - chosen.size)
                chosen = np.concatenate([chosen, rest])
        ledger.doses[chosen] = 1
        ledger.day_dose1[chosen] = day
        ledger.susceptibility[chosen] = 1.0 - policy.ve_one
        given1 = int(chosen.size)
    if k2 > 0:
        ok = (ledger.doses == 1) & (day - ledger.day_dose1 >= policy.dose_gap)
        if state.willing2 is not None:
            ok &= state.willing2
        chosen = _pick(rng, np.flatnonzero(ok), k2)
        ledger.doses[chosen] = 2
        ledger.day_dose2[chosen] = day
        ledger.susceptibility[chosen] = 1.0 - policy.ve_two
        given2 = int(chosen.size)
    state.administered1 += given1
    state.administered2 += given2
    state.daily.append((day, given1, given2))
    return given1, given2
