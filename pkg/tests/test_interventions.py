import datetime as dt

import numpy as np
import pytest

from mpoxnet.epidemic import I, HealthLedger
from mpoxnet.errors import ConfigurationError, InputError
from mpoxnet.interventions import (AT_RISK_POPULATION, BehaviorChangePolicy, DoseSchedule,
                                   VaccinationPolicy, VaccinationState, apply_behavior_change,
                                   load_dose_schedule, read_weekly_doses, vaccinate_step)
from mpoxnet.network import create_population

D0 = dt.date(2022, 5, 22)


def test_dose_arithmetic_example():
    sched = load_dose_schedule([(D0, 700, 0)], 10_000)
    expected = 700 * 0.91 / AT_RISK_POPULATION * 10_000 / 7
    assert sched.dose1[0] == pytest.approx(expected, rel=1e-12)
    assert sched.dose1[0] == pytest.approx(0.4555, abs=1e-4)
    assert len(sched) == 7 and np.all(sched.dose2 == 0)


def test_missing_weeks_are_zero():
    sched = load_dose_schedule([(D0, 700, 0), (D0 + dt.timedelta(days=14), 700, 0)], 10_000)
    assert len(sched) == 21
    assert np.all(sched.dose1[7:14] == 0) and np.all(sched.dose1[14:] > 0)
    assert sched.available(-1) == (0.0, 0.0) and sched.available(21) == (0.0, 0.0)


def test_negative_doses_rejected():
    with pytest.raises(InputError):
        load_dose_schedule([(D0, -1, 0)], 100)


def test_bundled_snapshot_loads():
    rows = read_weekly_doses()
    assert rows[0][0] == D0
    first = sum(r[1] for r in rows)
    assert 0.2 < first / AT_RISK_POPULATION < 0.25


def test_bad_dose_file(tmp_path):
    p = tmp_path / "d.csv"
    p.write_text("week,first\n2022-01-01,3\n")
    with pytest.raises(InputError):
        read_weekly_doses(p)
    p.write_text("week_start_date,first_doses,second_doses\nnot-a-date,1,2\n")
    with pytest.raises(InputError):
        read_weekly_doses(p)


def _setup(n=200, seed=0, strata=None):
    rng = np.random.default_rng(seed)
    pop = create_population(n, rng, stratum=strata)
    return rng, pop, HealthLedger.new(n, rng)


def test_fractional_carryover():
    rng, pop, led = _setup()
    pol = VaccinationPolicy(start_day=0)
    sched = DoseSchedule(np.full(10, 0.4), np.zeros(10))
    st = VaccinationState.new(pop.n, pol, rng)
    given = [vaccinate_step(led, pop, sched, d, pol, rng, st)[0] for d in range(10)]
    assert sum(given) == 4
    assert given[:3] == [0, 0, 1]
    assert st.carry1 == pytest.approx(0.0, abs=1e-9)


def test_first_dose_skips_infected_and_vaccinated():
    rng, pop, led = _setup(n=10)
    led.state[:5] = I
    led.doses[5:8] = 1
    pol = VaccinationPolicy(start_day=0)
    st = VaccinationState.new(10, pol, rng)
    sched = DoseSchedule(np.array([9.0]), np.array([0.0]))
    assert vaccinate_step(led, pop, sched, 0, pol, rng, st) == (2, 0)
    assert np.all(led.doses[8:] == 1) and np.all(led.doses[:5] == 0)
    assert led.susceptibility[8] == pytest.approx(0.642)


def test_second_dose_gap_and_efficacy():
    rng, pop, led = _setup(n=20)
    pol = VaccinationPolicy(start_day=0)
    st = VaccinationState.new(20, pol, rng)
    sched = DoseSchedule(np.r_[20.0, np.zeros(39)], np.full(40, 20.0))
    for d in range(40):
        vaccinate_step(led, pop, sched, d, pol, rng, st)
    assert np.all(led.doses == 2)
    assert np.all(led.day_dose2 - led.day_dose1 == 28)
    assert np.allclose(led.susceptibility, 0.34)


def test_targeted_vaccination_with_fallback():
    strata = np.repeat([1, 5], 10)
    rng, pop, led = _setup(n=20, strata=strata)
    sched = DoseSchedule(np.array([4.0, 10.0]), np.zeros(2))
    pol = VaccinationPolicy(start_day=0, targeting=[5, 6])
    st = VaccinationState.new(20, pol, rng)
    vaccinate_step(led, pop, sched, 0, pol, rng, st)
    assert led.doses[strata == 5].sum() == 4 and led.doses[strata == 1].sum() == 0
    vaccinate_step(led, pop, sched, 1, pol, rng, st)
    assert np.all(led.doses[strata == 5] == 1) and led.doses[strata == 1].sum() == 4
    nofb = VaccinationPolicy(start_day=0, targeting=[5], fallback=False)
    rng, pop, led = _setup(n=20, strata=strata)
    st = VaccinationState.new(20, nofb, rng)
    vaccinate_step(led, pop, DoseSchedule(np.array([15.0]), np.zeros(1)), 0, nofb, rng, st)
    assert led.doses.sum() == 10


def test_uptake_gates_eligibility():
    rng, pop, led = _setup(n=2000)
    pol = VaccinationPolicy(start_day=0, uptake=True)
    st = VaccinationState.new(2000, pol, rng)
    vaccinate_step(led, pop, DoseSchedule(np.array([2000.0]), np.zeros(1)), 0, pol, rng, st)
    assert led.doses.sum() == st.willing1.sum()
    assert abs(st.willing1.mean() - 0.367) < 0.04


def test_behavior_change_universal_and_targeted(rng):
    pop = create_population(5000, rng)
    base = pop.p_onetime_base.copy()
    apply_behavior_change(pop, BehaviorChangePolicy(reduction=0.5))
    assert np.allclose(pop.p_onetime, base * 0.5)
    apply_behavior_change(pop, BehaviorChangePolicy(reduction=0.5))
    assert np.allclose(pop.p_onetime, base * 0.5)
    pop.p_onetime[:] = base
    mask = apply_behavior_change(pop, BehaviorChangePolicy(reduction=0.25, targeting=[5, 6]))
    assert np.array_equal(mask, np.isin(pop.stratum, (5, 6)))
    assert np.allclose(pop.p_onetime[mask], base[mask] * 0.75)
    assert np.array_equal(pop.p_onetime[~mask], base[~mask])


@pytest.mark.parametrize("kw", [dict(reduction=0.0), dict(reduction=1.0), dict(targeting=[7])])
def test_behavior_change_validation(kw):
    with pytest.raises(ConfigurationError):
        BehaviorChangePolicy(**kw)


@pytest.mark.parametrize("kw", [dict(ve_one=1.5), dict(dose_gap=0), dict(targeting=[0]),
                                dict(p_one_dose=0.9, p_two_doses=0.2)])
def test_vaccination_validation(kw):
    with pytest.raises(ConfigurationError):
        VaccinationPolicy(**kw)
