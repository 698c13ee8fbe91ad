"""Single-replicate driver: the daily loop tying network, disease and interventions together."""
from __future__ import annotations

import time

import numpy as np

from . import kernels
from .config import ScenarioConfig
from .epidemic import (DiagnosisDelay, E, HealthLedger, I, InfectionLog, StageParams,
                       advance_disease, contact_and_transmit, seed_infections)
from .interventions import (DoseSchedule, VaccinationState, apply_behavior_change,
                            load_dose_schedule, read_weekly_doses, vaccinate_step)
from .metrics import RunResult
from .network import (CASUAL, MAIN, EdgeLog, create_population, init_relationships,
                      update_onetime, update_persistent)
from .rng import RngStream

_schedule_cache: dict = {}


def dose_schedule_for(cfg: ScenarioConfig) -> DoseSchedule:
    path = cfg.vaccination.schedule_path if cfg.vaccination else None
    key = (path, cfg.n_nodes)
    if key not in _schedule_cache:
        _schedule_cache[key] = load_dose_schedule(read_weekly_doses(path), cfg.n_nodes)
    return _schedule_cache[key]


def run_simulation(cfg: ScenarioConfig, stream_id: int = 0, *, schedule: DoseSchedule | None = None,
                   kernel_backend: str | None = None, record_edges: bool | None = None) -> RunResult:
    """Run one replicate of ``cfg`` on stream ``(cfg.seed, stream_id)``.

    Day 0 builds the network, administers any pre-outbreak vaccination and
    seeds infections.  Each day ``t = 1..horizon`` then: stop if nobody is
    exposed or infectious, apply behaviour change on its start day,
    vaccinate, advance disease stages, spread, redraw one-time ties, age and
    rewire persistent ties.
    """
    cfg.validate()
    kern = kernels.backend(kernel_backend) if kernel_backend else kernels
    record_edges = cfg.record_edges if record_edges is None else record_edges
    t_start = time.perf_counter()

    rs = RngStream(cfg.seed, stream_id)
    n, horizon = cfg.n_nodes, cfg.horizon
    stages = StageParams(cfg.exposed_mean, cfg.exposed_sd, cfg.infectious_mean, cfg.infectious_sd)
    delay = DiagnosisDelay(cfg.delay_initial, cfg.delay_every, cfg.delay_floor)
    net_kw = dict(main_duration=cfg.main_duration, casual_duration=cfg.casual_duration, kern=kern)

    pop = create_population(n, rs.init, rel_class_weights=cfg.rel_class_weights,
                            stratum_weights=cfg.stratum_weights,
                            stratum_p_onetime=cfg.stratum_p_onetime)
    ledger = HealthLedger.new(n, rs.init, cfg.care_seeking)
    log = EdgeLog() if record_edges else None
    parts, rewiring = init_relationships(pop, rs.network, log=log, **net_kw)

    bc, vax = cfg.behavior_change, cfg.vaccination
    if bc is not None and bc.start_day <= 0:
        apply_behavior_change(pop, bc)
    vstate = None
    if vax is not None:
        schedule = schedule or dose_schedule_for(cfg)
        vstate = VaccinationState.new(n, vax, rs.vaccine)
        for d in range(vax.start_day, 1):
            vaccinate_step(ledger, pop, schedule, d, vax, rs.vaccine, vstate)

    infections = InfectionLog()
    seeds = seed_infections(pop, ledger, cfg.seed_fraction, rs.disease, infections,
                            stages=stages, delay=delay, strata=cfg.seed_strata)

    counts = np.zeros((horizon + 1, 4), dtype=np.int64)
    cumulative = np.zeros(horizon + 1, dtype=np.int64)
    contacts = np.zeros((n, 3), dtype=np.int64)
    counts[0] = ledger.counts()
    cumulative[0] = total = seeds.size
    stop_day = None
    last_day = 0

    for t in range(1, horizon + 1):
        c = counts[t - 1]
        if cfg.stop_when_extinct and c[E] + c[I] == 0:
            stop_day = t - 1
            counts[t:] = c
            cumulative[t:] = total
            break
        if bc is not None and t == bc.start_day:
            apply_behavior_change(pop, bc)
        if vax is not None and t >= vax.start_day:
            vaccinate_step(ledger, pop, schedule, t, vax, rs.vaccine, vstate)
        advance_disease(ledger, t, delay=delay)
        new = contact_and_transmit(
            parts.live_edges(), ledger, t, rs.disease, infections, contacts,
            beta=cfg.beta, contact_prob=cfg.contact_prob, isolation=cfg.isolation,
            stages=stages, kern=kern)
        update_onetime(pop, parts, rs.network, t, kern=kern, log=log)
        update_persistent(pop, parts, rewiring, t, rs.network, log=log, **net_kw)
        total += new.size
        counts[t] = ledger.counts()
        cumulative[t] = total
        last_day = t

    if log is not None:
        log.close(parts, last_day)

    doses = {"dose1": 0, "dose2": 0, "available1": 0.0, "available2": 0.0}
    if vstate is not None:
        doses = {"dose1": vstate.administered1, "dose2": vstate.administered2,
                 "available1": vstate.available1, "available2": vstate.available2,
                 "daily": np.array(vstate.daily, dtype=np.int64).reshape(-1, 3)}
    return RunResult(
        scenario=cfg.name,
        seed=cfg.seed,
        stream_id=stream_id,
        n_nodes=n,
        horizon=horizon,
        counts=counts,
        cumulative=cumulative,
        records=infections.table(),
        seeds=seeds,
        infectious_start=ledger.infectious_start.copy(),
        infectious_end=ledger.infectious_end.copy(),
        contacts=contacts,
        rel_class=pop.rel_class,
        stratum=pop.stratum,
        rewiring={"entries": dict(rewiring.entries), "delayed": dict(rewiring.delayed)},
        doses=doses,
        stop_day=stop_day,
        runtime=time.perf_counter() - t_start,
        edge_log=log,
        extra={"diagnosis_day": ledger.diagnosis_day.copy(),
               "day_dose1": ledger.day_dose1.copy(), "day_dose2": ledger.day_dose2.copy(),
               "main_edges_final": int(np.count_nonzero(parts.kind == MAIN)),
               "casual_edges_final": int(np.count_nonzero(parts.kind == CASUAL))},
    )
