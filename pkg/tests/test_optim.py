import itertools

import numpy as np
import pytest
import hypothesis
import scipy.optimize
from hypothesis import strategies as st

from lrshield.optim import (
    LpProblem,
    MilpProblem,
    solve_lp,
    solve_milp,
    project_psd,
    constrained_psd,
)
from lrshield._errors import InfeasibleSpecError
from lrshield.optim._psd import _polygon_gram

__all__ = [
    'test_constrained_psd',
    'test_constrained_psd_border',
    'test_constrained_psd_infeasible',
    'test_constrained_psd_stall_fallback',
    'test_constrained_psd_two_loads',
    'test_constrained_psd_verdict',
    'test_lp_against_highs',
    'test_lp_duals',
    'test_lp_free_variable',
    'test_lp_infeasible',
    'test_lp_unbounded',
    'test_milp_against_enumeration',
    'test_milp_knapsack',
    'test_milp_node_limit',
    'test_polygon_gram',
    'test_project_psd',
]


def test_lp_duals():

    problem = LpProblem(
        c = [-1, -1],
        a_ub = [[1, 2], [3, 1]],
        b_ub = [4, 6],
    )
    sol = solve_lp(problem)

    assert sol.optimal
    assert np.allclose(sol.x, [1.6, 1.2])
    assert sol.objective == pytest.approx(-2.8)
    assert np.allclose(sol.duals.ineqlin, [-0.4, -0.2])
    assert sol.duals.objective(problem) == pytest.approx(-2.8)


def test_lp_free_variable():

    sol = solve_lp(LpProblem(
        c = [1, 0],
        a_eq = [[1, 1]],
        b_eq = [1],
        lower = [-np.inf, 0],
        upper = [np.inf, 2],
    ))

    assert sol.optimal
    assert np.allclose(sol.x, [-1, 2])


def test_lp_infeasible():

    sol = solve_lp(LpProblem(c = [1], a_ub = [[1]], b_ub = [-1]))

    assert sol.status == 'infeasible'
    assert sol.x is None


@pytest.mark.filterwarnings('error')
@pytest.mark.parametrize(
    'problem',
    [
        LpProblem(c = [-1, 0], a_ub = [[0, 1]], b_ub = [1]),
        LpProblem(c = [-1, -1], a_ub = [[1, -1]], b_ub = [1]),
        LpProblem(
            c = [0, -1, 0],
            a_eq = [[1, 1, -1]],
            b_eq = [2],
            lower = [-np.inf, 0, 0],
        ),
        LpProblem(c = [-1], lower = -np.inf),
        LpProblem(c = [1], lower = -np.inf),
        LpProblem(
            c = [1, -2],
            a_ub = [[-1, 1], [1, -2]],
            b_ub = [1, 2],
        ),
    ],
)
def test_lp_unbounded(problem):

    sol = solve_lp(problem)

    assert sol.status == 'unbounded'
    assert not sol.optimal


@hypothesis.given(
    seed = st.integers(0, 2 ** 32 - 1),
    n = st.integers(2, 6),
    m = st.integers(1, 5),
)
def test_lp_against_highs(seed, n, m):

    rng = np.random.default_rng(seed)
    c = rng.normal(size = n)
    a_ub = rng.normal(size = (m, n))
    b_ub = rng.uniform(1, 5, size = m)
    a_eq = np.ones((1, n))
    b_eq = [rng.uniform(1, 3)]
    problem = LpProblem(
        c = c,
        a_ub = a_ub,
        b_ub = b_ub,
        a_eq = a_eq,
        b_eq = b_eq,
        lower = 0,
        upper = 4,
    )
    sol = solve_lp(problem)
    ref = scipy.optimize.linprog(
        c,
        A_ub = a_ub,
        b_ub = b_ub,
        A_eq = a_eq,
        b_eq = b_eq,
        bounds = (0, 4),
        method = 'highs',
    )

    if ref.status == 2:

        assert sol.status == 'infeasible'

    else:

        assert sol.optimal
        assert sol.objective == pytest.approx(ref.fun, abs = 1e-7)
        assert sol.duals.objective(problem) == pytest.approx(
            ref.fun,
            abs = 1e-6,
        )


def _knapsack() -> MilpProblem:

    return MilpProblem(
        lp = LpProblem(
            c = [-5, -4, -3],
            a_ub = [[2, 3, 1]],
            b_ub = [5],
            lower = 0,
            upper = 1,
        ),
        binaries = (0, 1, 2),
    )


def test_milp_knapsack():

    sol = solve_milp(_knapsack())

    assert sol.optimal
    assert sol.objective == pytest.approx(-9)
    assert np.allclose(sol.x, [1, 1, 0])
    assert sol.gap <= 1e-6


def test_milp_node_limit():

    sol = solve_milp(_knapsack(), node_limit = 1)

    # the root relaxation is fractional, so no incumbent exists yet
    assert sol.status == 'node_limit'
    assert sol.x is None


@hypothesis.given(seed = st.integers(0, 2 ** 32 - 1))
def test_milp_against_enumeration(seed):

    rng = np.random.default_rng(seed)
    n = 5
    c = rng.normal(size = n)
    a_ub = rng.uniform(0, 1, size = (2, n))
    b_ub = rng.uniform(0.5, 2, size = 2)
    sol = solve_milp(MilpProblem(
        lp = LpProblem(c = c, a_ub = a_ub, b_ub = b_ub, lower = 0, upper = 1),
        binaries = tuple(range(n)),
    ))
    best = min(
        c @ np.array(x)
        for x in itertools.product((0, 1), repeat = n)
        if np.all(a_ub @ np.array(x) <= b_ub + 1e-12)
    )

    assert sol.optimal
    assert sol.objective == pytest.approx(best, abs = 1e-6)
    assert np.allclose(sol.x, np.round(sol.x))


def test_project_psd():

    out = project_psd([[1, 0], [0, -1]])

    assert np.allclose(out, [[1, 0], [0, 0]])

    with pytest.raises(ValueError, match = 'symmetric'):

        project_psd([[1, 2], [0, 1]])


def _assert_zero_sum_cov(g: np.ndarray, diag) -> None:

    diag = np.asarray(diag, float)
    scale = max(1.0, diag.max())

    assert np.allclose(np.diag(g), diag, rtol = 1e-6, atol = 0)
    assert np.abs(g - g.T).max() <= 1e-12 * scale
    assert abs(g.sum()) <= 1e-8 * diag.sum()
    assert np.abs(g.sum(axis = 1)).max() <= 1e-6 * scale
    assert np.linalg.eigvalsh(g).min() >= -1e-8 * scale


@pytest.mark.parametrize(
    'diag',
    [
        [1.0, 1.0],
        [1.0, 1.0, 1.0],
        [4.0, 2.0, 1.0],
        [100.0, 25.0, 36.0, 49.0],
        # a tenth of realistic loads of 30 to 80 MW
        (0.05 * np.array([30.0, 45.0, 60.0, 80.0, 25.0, 50.0])) ** 2,
    ],
)
def test_constrained_psd(diag):

    _assert_zero_sum_cov(constrained_psd(diag), diag)


def test_constrained_psd_two_loads():

    g = constrained_psd([9.0, 9.0])

    assert np.allclose(g, [[9, -9], [-9, 9]])

    with pytest.raises(InfeasibleSpecError):

        constrained_psd([9.0, 4.0])


def test_constrained_psd_border():

    # sides 2, 1 and 1 close only a flat polygon, one matrix is feasible
    g = constrained_psd([4.0, 1.0, 1.0])
    expected = [[4, -2, -2], [-2, 1, 1], [-2, 1, 1]]

    assert np.allclose(g, expected, atol = 1e-3)
    _assert_zero_sum_cov(g, [4.0, 1.0, 1.0])


def test_constrained_psd_infeasible():

    # standard deviations 1, 1 and 10 can not close a polygon
    with pytest.raises(InfeasibleSpecError):

        constrained_psd([1.0, 1.0, 100.0])

    with pytest.raises(ValueError, match = 'strictly positive'):

        constrained_psd([1.0, 0.0, 1.0])


def test_constrained_psd_verdict():

    rng = np.random.default_rng(20)
    verdicts = []

    for _ in range(200):

        k = int(rng.integers(2, 7))
        sigma = np.exp(rng.uniform(-2, 1, size = k))
        margin = sigma.sum() - 2 * sigma.max()

        if abs(margin) < 1e-6 * sigma.sum():

            continue

        diag = sigma ** 2

        if margin > 0:

            _assert_zero_sum_cov(constrained_psd(diag), diag)

        else:

            with pytest.raises(InfeasibleSpecError):

                constrained_psd(diag)

        verdicts.append(margin > 0)

    # both outcomes are represented
    assert 0 < sum(verdicts) < len(verdicts)


@hypothesis.given(
    sigma = st.lists(
        st.floats(0.05, 20.0),
        min_size = 3,
        max_size = 8,
    ).filter(lambda s: 2 * max(s) <= sum(s)),
)
def test_polygon_gram(sigma):

    sigma = np.array(sigma)
    g = _polygon_gram(sigma)

    _assert_zero_sum_cov(g, sigma ** 2)
    assert np.linalg.matrix_rank(g, tol = 1e-9 * g.max()) <= 2


def test_constrained_psd_stall_fallback():

    diag = [4.0, 2.0, 1.0, 3.0]
    g = constrained_psd(diag, max_iter = 0)

    assert np.allclose(g, _polygon_gram(np.sqrt(diag)))
    _assert_zero_sum_cov(g, diag)
