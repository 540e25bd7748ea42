import dataclasses

import numpy as np
import pandas as pd
import pytest
import hypothesis
from hypothesis import strategies as st

from lrshield.attack import (
    AttackScenario,
    BilevelOptions,
    cm_attack,
    lo_attack,
    load_shift,
    attack_tasks,
    screen_lines,
    batch_generate,
    read_scenarios,
    write_scenarios,
    random_lr_attack,
    random_attack_spec,
    apply_attack_vector,
)
from lrshield.dispatch import solve_dcopf, evaluate_flows
from lrshield._config import AttacksConfig
from lrshield._errors import AttackError, InfeasibleSpecError

__all__ = [
    'test_apply_attack_vector',
    'test_attack_tasks_order',
    'test_batch_discards_zero_attacks',
    'test_batch_jobs_independent',
    'test_batch_random_ieee30',
    'test_bilevel_infeasible_base',
    'test_bilevel_monotone_in_shift',
    'test_cm_attack_beats_enumeration',
    'test_cm_attack_three_bus',
    'test_cm_attack_zero_shift',
    'test_load_shift',
    'test_lo_attack_beats_enumeration',
    'test_lo_attack_three_bus',
    'test_random_attack_covariance',
    'test_random_attack_properties',
    'test_random_attack_rejects_k',
    'test_random_attack_unequal_loads',
    'test_scenario_check',
    'test_scenarios_jsonl',
    'test_screen_lines',
]


def test_load_shift():

    assert load_shift([100, 50], [10, -10]) == pytest.approx(0.2)
    assert load_shift([100, 50], [0, 0]) == 0.0

    with pytest.raises(AttackError) as e:

        load_shift([100, 0], [5, -5])

    assert e.value.reason == 'undefined_shift'


def test_apply_attack_vector(three_bus):

    assert np.allclose(apply_attack_vector(three_bus, [0, 1, -1]), [-30, 30])

    with pytest.raises(AttackError) as e:

        apply_attack_vector(three_bus, [0, 1, 0])

    assert e.value.reason == 'non_load_bus'


def test_scenario_check():

    sc = AttackScenario(
        hour = 0,
        kind = 'random',
        p = np.array([100., 50., 50.]),
        delta_p = np.array([5., -5., 0.]),
        tau_requested = 0.1,
        tau_real = 0.1,
        attacked = (0, 1),
    )
    sc.check()

    assert np.allclose(sc.p_atk, [105, 45, 50])
    assert sc.k == 2

    broken = {
        'conservation': dict(delta_p = np.array([5., -4., 0.])),
        'shift': dict(tau_requested = 0.05),
        'support': dict(
            delta_p = np.array([5., 0., -5.]),
        ),
    }

    for reason, change in broken.items():

        with pytest.raises(AttackError) as e:

            dataclasses.replace(sc, **change).check()

        assert e.value.reason == reason


@hypothesis.given(
    seed = st.integers(0, 2 ** 32 - 1),
    loads = st.lists(st.floats(20.0, 80.0), min_size = 12, max_size = 12),
    k = st.integers(5, 12),
    tau_pct = st.integers(1, 20),
)
def test_random_attack_properties(seed, loads, k, tau_pct):

    # with loads within a factor 4, any 5 of them close a polygon
    p = np.array(loads)
    tau = tau_pct / 100
    sc = random_lr_attack(p, k, tau, np.random.default_rng(seed))

    assert sc.kind == 'random'
    assert sc.k == k
    assert sc.tau_real <= tau
    assert abs(sc.delta_p.sum()) <= 1e-9 * np.abs(sc.delta_p).sum() + 1e-12
    outside = np.setdiff1d(np.arange(p.size), sc.attacked)
    assert np.all(sc.delta_p[outside] == 0)
    sc.check()


def test_random_attack_unequal_loads():

    p = np.array([30.0, 45.0, 60.0, 80.0, 25.0, 50.0])

    for seed in range(20):

        sc = random_lr_attack(p, 4, 0.1, np.random.default_rng(seed))

        assert 0 < sc.tau_real <= 0.1
        assert len(sc.attacked) == 4


@hypothesis.given(
    loads = st.lists(st.floats(1.0, 100.0), min_size = 3, max_size = 8),
    tau_pct = st.integers(1, 20),
)
def test_random_attack_covariance(loads, tau_pct):

    p = np.array(loads)
    tau = tau_pct / 100
    sigma = 0.5 * tau * p
    attacked = range(p.size)

    if 2 * sigma.max() > sigma.sum() * (1 + 1e-6):

        with pytest.raises(InfeasibleSpecError):

            random_attack_spec(p, attacked, tau)

        return

    hypothesis.assume(2 * sigma.max() <= sigma.sum() * (1 - 1e-6))

    spec = random_attack_spec(p, attacked, tau)
    cov = spec.gamma_cov
    scale = max(1.0, (sigma ** 2).max())

    assert np.allclose(np.diag(cov), sigma ** 2, rtol = 1e-6, atol = 0)
    assert np.linalg.eigvalsh(cov).min() >= -1e-8 * scale
    assert abs(cov.sum()) <= 1e-8 * (sigma ** 2).sum()
    assert np.allclose(spec.factor @ spec.factor.T, cov, atol = 1e-6 * scale)


def test_batch_random_ieee30(ieee30, loads_four_years):

    config = AttacksConfig(n_random = 20, k_min = 3, cm = False, lo = False)
    series = loads_four_years.iloc[:72]
    result = batch_generate(
        ieee30,
        series,
        config,
        seed = 5,
        kinds = ('random',),
    )

    assert len(result.scenarios) + len(result.discards) == 20
    assert len(result.scenarios) >= 15
    assert all(sc.tau_real <= config.tau_max for sc in result.scenarios)


def test_random_attack_rejects_k(rng):

    with pytest.raises(ValueError):

        random_lr_attack(np.ones(4), 1, 0.1, rng)

    with pytest.raises(ValueError):

        random_lr_attack(np.ones(4), 5, 0.1, rng)


def test_screen_lines(three_bus):

    # only line 1-2 can reach its rating within a 10% load shift
    assert screen_lines(three_bus, [60, 60], 0.1).tolist() == [0]


def test_cm_attack_three_bus(three_bus):

    sc = cm_attack(three_bus, [60, 60], 0.1, hour = 'h')

    assert sc.kind == 'cm'
    assert sc.hour == 'h'
    assert sc.baseline == pytest.approx(1500)
    assert sc.objective == pytest.approx(1560, rel = 1e-6)
    assert np.allclose(sc.delta_p, [6, -6], atol = 1e-6)
    assert sc.tau_real == pytest.approx(0.1)
    assert solve_dcopf(three_bus, sc.p_atk).cost == pytest.approx(1560)
    assert np.allclose(
        apply_attack_vector(three_bus, sc.c),
        sc.delta_p,
        atol = 1e-6,
    )
    sc.check()


def test_cm_attack_zero_shift(three_bus):

    sc = cm_attack(three_bus, [60, 60], 0.0)

    assert np.allclose(sc.delta_p, 0)
    assert sc.objective == pytest.approx(sc.baseline)


def test_lo_attack_three_bus(three_bus):

    sc = lo_attack(three_bus, [60, 60], 0.1, line = 0)
    dispatch = solve_dcopf(three_bus, sc.p_atk)
    physical = evaluate_flows(three_bus, dispatch.g, sc.p)

    assert sc.kind == 'lo'
    assert sc.target_line == 0
    assert sc.baseline == pytest.approx(50)
    assert sc.objective == pytest.approx(52, rel = 1e-6)
    assert abs(physical[0]) == pytest.approx(sc.objective, rel = 1e-6)
    assert np.allclose(sc.delta_p, [-6, 6], atol = 1e-6)

    with pytest.raises(ValueError):

        lo_attack(three_bus, [60, 60], 0.1, line = 3)


def test_bilevel_infeasible_base(three_bus):

    with pytest.raises(AttackError) as e:

        cm_attack(three_bus, [600, 600], 0.1)

    assert e.value.reason == 'base_infeasible'


def _series(rows) -> pd.DataFrame:

    return pd.DataFrame(
        rows,
        index = pd.date_range('2018-01-01', periods = len(rows), freq = 'h'),
        columns = [1, 2],
        dtype = float,
    )


def test_attack_tasks_order(three_bus):

    config = AttacksConfig(
        n_random = 3,
        tau_grid = [0.05, 0.1],
        critical_min_lines = 1,
    )
    series = _series([[30, 30], [60, 60]])
    tasks = attack_tasks(three_bus, series, config, seed = 5)
    kinds = [t.kind for t in tasks]

    assert kinds == ['random'] * 3 + ['cm'] * 2 + ['lo'] * 2
    assert all(t.hour == series.index[1] for t in tasks[3:])
    assert [t.tau for t in tasks[3:5]] == [0.05, 0.1]
    assert {t.line for t in tasks[5:]} == {0}
    assert [t.k for t in tasks[:3]] == [2, 2, 2]


def test_batch_discards_zero_attacks(three_bus):

    config = AttacksConfig(
        n_random = 0,
        tau_grid = [0.1],
        critical_min_lines = 1,
    )
    series = _series([[60, 60], [61, 61]])
    result = batch_generate(three_bus, series, config, seed = 0)

    assert result.counts() == {'cm': 2, 'lo': 2}
    assert result.discards == []

    zero = AttacksConfig(
        n_random = 0,
        tau_grid = [0.0],
        critical_min_lines = 1,
    )
    result = batch_generate(three_bus, series, zero, seed = 0)

    assert result.scenarios == []
    assert {d['reason'] for d in result.discards} == {'zero_attack'}


def test_batch_jobs_independent(three_bus):

    config = AttacksConfig(n_random = 40, k_min = 2, cm = False, lo = False)
    series = _series([[60, 60], [50, 50], [40, 40]])
    serial = batch_generate(three_bus, series, config, seed = 11)
    pooled = batch_generate(three_bus, series, config, seed = 11, jobs = 2)

    assert len(serial.scenarios) == len(pooled.scenarios)
    assert len(serial.scenarios) + len(serial.discards) == 40

    for a, b in zip(serial.scenarios, pooled.scenarios):

        assert a.hour == b.hour
        assert np.array_equal(a.delta_p, b.delta_p)


def test_scenarios_jsonl(three_bus, tmp_path):

    sc = cm_attack(
        three_bus, [60, 60], 0.1,
        options = BilevelOptions(screen = False),
        hour = pd.Timestamp('2018-03-04 05:00'),
    )
    path = tmp_path / 'attacks.jsonl'
    write_scenarios(path, [sc], provenance = {'seed': 3})
    back, = read_scenarios(path)

    assert back.hour == sc.hour
    assert back.kind == 'cm'
    assert np.array_equal(back.delta_p, sc.delta_p)
    assert np.array_equal(back.c, sc.c)
    assert back.objective == sc.objective
    assert '"provenance":{"seed":3}' in path.read_text()


def test_cm_attack_beats_enumeration(three_bus):

    sc = cm_attack(three_bus, [60, 60], 0.1)
    # every zero-sum shift within 10% of the two loads, re-dispatched
    costs = [
        solve_dcopf(three_bus, [60 + d, 60 - d]).cost
        for d in np.linspace(-6, 6, 121)
    ]

    assert sc.objective >= max(costs) - 1e-6
    assert sc.objective == pytest.approx(max(costs), rel = 1e-6)


def test_lo_attack_beats_enumeration(three_bus):

    sc = lo_attack(three_bus, [60, 60], 0.1, line = 0)
    flows = []

    for d in np.linspace(-6, 6, 121):

        dispatch = solve_dcopf(three_bus, [60 + d, 60 - d])
        physical = evaluate_flows(three_bus, dispatch.g, [60, 60])
        flows.append(abs(physical[0]))

    assert sc.objective >= max(flows) - 1e-6
    assert sc.objective == pytest.approx(max(flows), rel = 1e-6)


def test_bilevel_monotone_in_shift(three_bus):

    options = BilevelOptions(screen = False)
    cost, flow = [], []

    for tau in (0.0, 0.05, 0.1, 0.2):

        cm = cm_attack(three_bus, [60, 60], tau, options = options)
        lo = lo_attack(three_bus, [60, 60], tau, line = 0, options = options)
        dispatch = solve_dcopf(three_bus, lo.p_atk)
        physical = evaluate_flows(three_bus, dispatch.g, lo.p)

        # the re-dispatch on the falsified loads gives the embedded values
        assert solve_dcopf(three_bus, cm.p_atk).cost == pytest.approx(
            cm.objective,
            rel = 1e-6,
        )
        assert abs(physical[0]) == pytest.approx(lo.objective, rel = 1e-6)

        cost.append(cm.objective)
        flow.append(lo.objective)

    assert np.all(np.diff(cost) >= -1e-6)
    assert np.all(np.diff(flow) >= -1e-6)
    assert cost[0] == pytest.approx(1500)
    assert flow[0] == pytest.approx(50)
