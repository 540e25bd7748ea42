#!/usr/bin/env python

#
# This file is part of the `lrshield` Python module
#
# Copyright 2025
# LRShield Team
#
# File author(s): LRShield Team (lrshield@users.noreply.github.com)
#
# Distributed under the GPLv3 license
# See the file `LICENSE` or read a copy at
# https://www.gnu.org/licenses/gpl-3.0.txt
#

"""
Dense bounded-variable revised simplex.

Problems have the form::

    min  c @ x
    s.t. a_eq @ x == b_eq
         a_ub @ x <= b_ub
         lower <= x <= upper

Inequalities receive slack columns, and the resulting equality system is
solved by a two phase primal simplex where nonbasic variables rest at one of
their bounds. Pricing is Dantzig's rule; after a run of degenerate pivots the
solver falls back to Bland's rule until it makes progress again.
"""

from __future__ import annotations

from typing import Literal
import dataclasses

import numpy as np
import scipy.linalg

from .._errors import SolverError

__all__ = [
    'LpDuals',
    'LpProblem',
    'Solution',
    'Status',
    'solve_lp',
]

Status = Literal['optimal', 'infeasible', 'unbounded', 'node_limit']

_REFACTOR_EVERY = 50
_BLAND_AFTER = 30


def _matrix(a, n: int) -> np.ndarray:

    if a is None:

        return np.zeros((0, n))

    a = np.atleast_2d(np.asarray(a, float))

    return a.reshape(0, n) if a.size == 0 else a


def _vector(v, size: int, fill: float) -> np.ndarray:

    if v is None:

        return np.full(size, fill)

    v = np.asarray(v, float)

    return np.full(size, float(v)) if v.ndim == 0 else v.copy()


@dataclasses.dataclass(frozen = True)
class LpProblem:
    """
    Linear program in inequality/equality form with variable bounds.

    Omitted bounds default to `0 <= x < inf`, like the usual LP convention;
    pass `-np.inf` explicitly for free variables.
    """

    c: np.ndarray
    a_eq: np.ndarray | None = None
    b_eq: np.ndarray | None = None
    a_ub: np.ndarray | None = None
    b_ub: np.ndarray | None = None
    lower: np.ndarray | None = None
    upper: np.ndarray | None = None

    def __post_init__(self):

        c = np.asarray(self.c, float).ravel()
        n = c.size
        a_eq = _matrix(self.a_eq, n)
        a_ub = _matrix(self.a_ub, n)
        b_eq = _vector(self.b_eq, a_eq.shape[0], 0.0)
        b_ub = _vector(self.b_ub, a_ub.shape[0], 0.0)
        lower = _vector(self.lower, n, 0.0)
        upper = _vector(self.upper, n, np.inf)

        for name, mat, rhs in (('eq', a_eq, b_eq), ('ub', a_ub, b_ub)):

            if mat.shape[1] != n or rhs.shape != (mat.shape[0],):

                raise ValueError(
                    f'Inconsistent dimensions of the `{name}` constraints: '
                    f'matrix {mat.shape}, rhs {rhs.shape}, {n} variables.',
                )

        if lower.shape != (n,) or upper.shape != (n,):

            raise ValueError('Bounds must have one entry per variable.')

        if np.any(lower > upper):

            raise ValueError(
                'Lower bound exceeds upper bound for variables '
                f'{np.flatnonzero(lower > upper).tolist()}.',
            )

        if np.any(np.isnan(lower)) or np.any(np.isnan(upper)):

            raise ValueError('Bounds must not be NaN.')

        for name, value in (
            ('c', c), ('a_eq', a_eq), ('b_eq', b_eq),
            ('a_ub', a_ub), ('b_ub', b_ub), ('lower', lower), ('upper', upper),
        ):

            object.__setattr__(self, name, value)


    @property
    def n(self) -> int:

        return self.c.size


    def with_bounds(self, lower: np.ndarray, upper: np.ndarray) -> LpProblem:

        return dataclasses.replace(self, lower = lower, upper = upper)


    def residual(self, x: np.ndarray) -> float:
        """
        Largest violation of any constraint or bound at `x`.
        """

        parts = [
            np.abs(self.a_eq @ x - self.b_eq),
            np.maximum(self.a_ub @ x - self.b_ub, 0),
            np.maximum(self.lower - x, 0),
            np.maximum(x - self.upper, 0),
        ]

        return max((float(p.max()) for p in parts if p.size), default = 0.0)


@dataclasses.dataclass(frozen = True)
class LpDuals:
    """
    Sensitivities of the optimal objective to the constraint right hand
    sides and the variable bounds.

    They satisfy ``c == a_eq.T @ eqlin + a_ub.T @ ineqlin + lower + upper``
    with ``ineqlin <= 0``, ``lower >= 0`` and ``upper <= 0``.
    """

    eqlin: np.ndarray
    ineqlin: np.ndarray
    lower: np.ndarray
    upper: np.ndarray


    def objective(self, problem: LpProblem) -> float:
        """
        Dual objective value; matches the primal optimum at optimality.
        """

        lower = np.where(np.isfinite(problem.lower), problem.lower, 0.0)
        upper = np.where(np.isfinite(problem.upper), problem.upper, 0.0)

        return float(
            problem.b_eq @ self.eqlin +
            problem.b_ub @ self.ineqlin +
            lower @ self.lower +
            upper @ self.upper
        )


@dataclasses.dataclass(frozen = True)
class Solution:
    """
    Result of an LP or MILP solve.

    Attrs:
        status:
            `optimal`, `infeasible`, `unbounded` or, for MILPs that ran out
            of nodes, `node_limit`.
        x:
            Primal values (None unless a feasible point is available).
        objective:
            Objective value at `x`.
        duals:
            LP sensitivities (LP solves only).
        iterations:
            Simplex pivots and bound flips.
        nodes:
            Branch-and-bound nodes solved (MILP only).
        branches:
            Branching operations performed (MILP only).
        gap:
            Relative gap between the incumbent and the best open bound
            (MILP only).
    """

    status: Status
    x: np.ndarray | None = None
    objective: float | None = None
    duals: LpDuals | None = None
    iterations: int = 0
    nodes: int = 0
    branches: int = 0
    gap: float | None = None


    @property
    def optimal(self) -> bool:

        return self.status == 'optimal'


class _Simplex:
    """
    Bounded revised simplex over ``a @ x == b, lo <= x <= hi``.

    The basis inverse is kept explicitly, updated by elementary row
    operations and rebuilt from scratch every `_REFACTOR_EVERY` pivots.
    """

    def __init__(
            self,
            a: np.ndarray,
            b: np.ndarray,
            lo: np.ndarray,
            hi: np.ndarray,
            x: np.ndarray,
            basis: np.ndarray,
            tol: float,
            max_iter: int,
    ):

        self.a = a
        self.b = b
        self.lo = lo
        self.hi = hi
        self.x = x
        self.basis = basis
        self.tol = tol
        self.max_iter = max_iter
        self.iterations = 0
        self.is_basic = np.zeros(a.shape[1], dtype = bool)
        self.is_basic[basis] = True
        self.refactor()


    def refactor(self):

        m = self.a.shape[0]

        if m == 0:

            self.binv = np.zeros((0, 0))

            return

        try:

            self.binv = scipy.linalg.inv(self.a[:, self.basis])

        except (np.linalg.LinAlgError, scipy.linalg.LinAlgError) as e:

            raise SolverError(f'Singular simplex basis: {e}') from e

        nonbasic = ~self.is_basic
        rhs = self.b - self.a[:, nonbasic] @ self.x[nonbasic]
        self.x[self.basis] = self.binv @ rhs


    def prices(self, cost: np.ndarray) -> tuple[np.ndarray, np.ndarray]:

        y = cost[self.basis] @ self.binv
        d = cost - y @ self.a
        d[self.basis] = 0.0

        return y, d


    def run(self, cost: np.ndarray) -> Literal['optimal', 'unbounded']:

        dtol = self.tol * max(1.0, float(np.abs(cost).max(initial = 0.0)))
        degenerate = 0
        since_refactor = 0

        while True:

            if since_refactor >= _REFACTOR_EVERY:

                self.refactor()
                since_refactor = 0

            _, d = self.prices(cost)
            nonbasic = ~self.is_basic
            can_inc = nonbasic & (self.x < self.hi)
            can_dec = nonbasic & (self.x > self.lo)
            eligible = (can_inc & (d < -dtol)) | (can_dec & (d > dtol))

            if not eligible.any():

                return 'optimal'

            if degenerate >= _BLAND_AFTER:

                q = int(np.flatnonzero(eligible)[0])

            else:

                q = int(np.argmax(np.where(eligible, np.abs(d), -1.0)))

            sign = 1.0 if d[q] < 0 else -1.0
            w = self.binv @ self.a[:, q]
            delta = -sign * w
            step, r = self._ratio(delta, bland = degenerate >= _BLAND_AFTER)
            span = self.hi[q] - self.lo[q]

            if span <= step:

                # bound flip, the basis stays
                if not np.isfinite(span):

                    return 'unbounded'

                self.x[self.basis] += delta * span
                self.x[q] = self.hi[q] if sign > 0 else self.lo[q]
                step = span

            else:

                leaving = self.basis[r]
                self.x[self.basis] += delta * step
                self.x[q] += sign * step
                self.x[leaving] = (
                    self.lo[leaving] if delta[r] < 0 else self.hi[leaving]
                )
                self.basis[r] = q
                self.is_basic[leaving] = False
                self.is_basic[q] = True
                pivot_row = self.binv[r] / w[r]
                self.binv -= np.outer(w, pivot_row)
                self.binv[r] = pivot_row
                since_refactor += 1

            degenerate = degenerate + 1 if step <= self.tol else 0
            self.iterations += 1

            if self.iterations > self.max_iter:

                raise SolverError(
                    f'Simplex did not converge in {self.max_iter} iterations.',
                )


    def _ratio(self, delta: np.ndarray, bland: bool) -> tuple[float, int]:
        """
        Largest step keeping the basic variables within bounds.
        """

        if delta.size == 0:

            return np.inf, -1

        xb = self.x[self.basis]
        lob = self.lo[self.basis]
        hib = self.hi[self.basis]
        steps = np.full(delta.size, np.inf)
        dec = delta < -self.tol
        inc = delta > self.tol

        with np.errstate(invalid = 'ignore', divide = 'ignore'):

            steps[dec] = (xb[dec] - lob[dec]) / -delta[dec]
            steps[inc] = (hib[inc] - xb[inc]) / delta[inc]

        # infinite bounds give an infinite step, never a huge finite one
        steps[np.isnan(steps)] = np.inf
        steps = np.maximum(steps, 0.0)
        best = steps.min()

        if not np.isfinite(best):

            return np.inf, -1

        ties = np.flatnonzero(steps <= best + self.tol)

        if bland:

            r = int(ties[np.argmin(self.basis[ties])])

        else:

            r = int(ties[np.argmax(np.abs(delta[ties]))])

        return float(steps[r]), r


def _initial_point(lo: np.ndarray, hi: np.ndarray) -> np.ndarray:

    return np.where(
        np.isfinite(lo),
        lo,
        np.where(np.isfinite(hi), hi, 0.0),
    )


def solve_lp(
        problem: LpProblem,
        tol: float = 1e-9,
        max_iter: int | None = None,
) -> Solution:
    """
    Solve a linear program by the two phase bounded revised simplex.

    Args:
        problem:
            The LP.
        tol:
            Pivot and optimality tolerance.
        max_iter:
            Pivot limit per phase; by default a generous multiple of the
            problem size.

    Returns:
        The optimal basic solution with duals, or a solution with status
        `infeasible` or `unbounded`.

    Raises:
        SolverError: On a singular basis or when the pivot limit is hit.
    """

    n = problem.n
    k_eq = problem.a_eq.shape[0]
    k_ub = problem.a_ub.shape[0]
    m = k_eq + k_ub

    # [x | slacks | artificials]
    a = np.zeros((m, n + k_ub + m))
    a[:k_eq, :n] = problem.a_eq
    a[k_eq:, :n] = problem.a_ub
    a[k_eq:, n:n + k_ub] = np.eye(k_ub)
    b = np.concatenate([problem.b_eq, problem.b_ub])
    lo = np.concatenate([problem.lower, np.zeros(k_ub + m)])
    hi = np.concatenate([problem.upper, np.full(k_ub + m, np.inf)])

    x = _initial_point(lo, hi)
    x[n + k_ub:] = 0.0
    residual = b - a[:, :n + k_ub] @ x[:n + k_ub]
    signs = np.where(residual >= 0, 1.0, -1.0)
    art = np.arange(n + k_ub, n + k_ub + m)
    a[:, art] = np.diag(signs)
    x[art] = np.abs(residual)

    max_iter = max_iter or 100 * (m + a.shape[1]) + 1000
    simplex = _Simplex(a, b, lo, hi, x, art.copy(), tol, max_iter)

    phase1 = np.zeros(a.shape[1])
    phase1[art] = 1.0
    simplex.run(phase1)
    simplex.refactor()

    infeasibility = float(simplex.x[art].sum())
    feas_tol = 1e-8 * max(1.0, float(np.abs(b).max(initial = 0.0)))

    if infeasibility > feas_tol:

        return Solution(
            status = 'infeasible',
            iterations = simplex.iterations,
        )

    simplex.hi[art] = 0.0
    simplex.x[art[~simplex.is_basic[art]]] = 0.0
    cost = np.zeros(a.shape[1])
    cost[:n] = problem.c

    if simplex.run(cost) == 'unbounded':

        return Solution(status = 'unbounded', iterations = simplex.iterations)

    simplex.refactor()
    y, d = simplex.prices(cost)
    xs = simplex.x[:n].copy()
    at_upper = (~simplex.is_basic[:n]) & (xs >= problem.upper) & (d[:n] < 0)
    at_lower = (~simplex.is_basic[:n]) & ~at_upper

    duals = LpDuals(
        eqlin = y[:k_eq].copy(),
        ineqlin = y[k_eq:].copy(),
        lower = np.where(at_lower, d[:n], 0.0),
        upper = np.where(at_upper, d[:n], 0.0),
    )

    return Solution(
        status = 'optimal',
        x = xs,
        objective = float(problem.c @ xs),
        duals = duals,
        iterations = simplex.iterations,
    )
