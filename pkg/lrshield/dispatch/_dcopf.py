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
DC optimal power flow and the hourly congestion screen built on it.
"""

from __future__ import annotations

from collections.abc import Sequence
import dataclasses

import numpy as np
import pandas as pd

from .. import _log
from ..grid import NetworkModel, as_load_vector
from ..optim import Status, LpProblem, solve_lp

__all__ = [
    'Dispatch',
    'critical_hour_lines',
    'critical_hours',
    'critical_lines',
    'dcopf_problem',
    'evaluate_flows',
    'solve_dcopf',
]


@dataclasses.dataclass(frozen = True)
class Dispatch:
    """
    Outcome of a DCOPF solve.

    Attrs:
        g:
            Generator outputs (MW), in generator order.
        flows:
            Line flows (MW) as seen by the operator, i.e. computed from the
            loads (and state attack) the dispatch was solved for.
        cost:
            Operating cost ($/h).
        status:
            Solver status; the other fields are None unless `optimal`.
        duality_gap:
            Absolute gap between the LP primal and dual objectives.
    """

    g: np.ndarray | None
    flows: np.ndarray | None
    cost: float | None
    status: Status
    duality_gap: float | None = None


    @property
    def optimal(self) -> bool:

        return self.status == 'optimal'


def dcopf_problem(
        net: NetworkModel,
        loads: Sequence[float],
        attack_c: Sequence[float] | None = None,
) -> tuple[LpProblem, np.ndarray]:
    """
    DCOPF as an LP over generator outputs.

    Returns:
        The LP and the load-dependent flow offset, so that the line flows of
        a dispatch ``g`` are ``R @ Cg @ g + offset``.
    """

    p = as_load_vector(net, loads)
    fixed = -(net.load_matrix @ p)

    if attack_c is not None:

        attack_c = np.asarray(attack_c, float)

        if attack_c.shape != (net.n_bus,):

            raise ValueError(
                f'State attack vector of shape {attack_c.shape}, '
                f'expected ({net.n_bus},).',
            )

        fixed = fixed + net.B @ attack_c

    offset = net.R @ fixed
    h = net.R @ net.gen_matrix
    problem = LpProblem(
        c = net.costs,
        a_eq = np.ones((1, net.n_gen)),
        b_eq = np.array([-fixed.sum()]),
        a_ub = np.vstack([h, -h]),
        b_ub = np.concatenate([net.ratings - offset, net.ratings + offset]),
        lower = net.gmin,
        upper = net.gmax,
    )

    return problem, offset


def solve_dcopf(
        net: NetworkModel,
        loads: Sequence[float],
        attack_c: Sequence[float] | None = None,
) -> Dispatch:
    """
    Cost-minimal dispatch under power balance, line and generator limits.

    Args:
        net:
            The network.
        loads:
            Loads (MW) in load order.
        attack_c:
            Optional state attack vector; its injections ``B @ c`` enter the
            flow equations as seen by the operator.

    Returns:
        The dispatch; infeasible problems come back with status
        `infeasible` rather than raising.
    """

    problem, offset = dcopf_problem(net, loads, attack_c)
    sol = solve_lp(problem)

    if not sol.optimal:

        _log(f'DCOPF {sol.status}.', level = 2)

        return Dispatch(
            g = None,
            flows = None,
            cost = None,
            status = sol.status,
        )

    g = sol.x
    flows = net.R @ (net.gen_matrix @ g) + offset

    return Dispatch(
        g = g,
        flows = flows,
        cost = sol.objective,
        status = 'optimal',
        duality_gap = abs(sol.objective - sol.duals.objective(problem)),
    )


def evaluate_flows(
        net: NetworkModel,
        dispatch_g: Sequence[float],
        true_loads: Sequence[float],
) -> np.ndarray:
    """
    Physical line flows when the dispatch `dispatch_g` serves `true_loads`.
    """

    g = np.asarray(dispatch_g, float)

    if g.shape != (net.n_gen,):

        raise ValueError(
            f'Dispatch of shape {g.shape}, expected ({net.n_gen},).',
        )

    return net.R @ net.injections(g, as_load_vector(net, true_loads))


def critical_lines(
        flows: Sequence[float],
        ratings: Sequence[float],
        frac: float = 0.8,
) -> np.ndarray:
    """
    Indices of lines loaded strictly above `frac` of their rating.
    """

    flows = np.abs(np.asarray(flows, float))

    return np.flatnonzero(flows > frac * np.asarray(ratings, float))


def _hourly(series) -> tuple[list, np.ndarray]:

    if isinstance(series, pd.DataFrame):

        return list(series.index), series.to_numpy(float)

    values = np.atleast_2d(np.asarray(series, float))

    return list(range(values.shape[0])), values


def critical_hour_lines(
        net: NetworkModel,
        series: pd.DataFrame | np.ndarray,
        frac: float = 0.8,
        min_lines: int = 2,
) -> dict:
    """
    Critical hours and their critical lines.

    Args:
        net:
            The network.
        series:
            Hourly loads; a data frame indexed by hour with one column per
            load (in load order), or an hours by loads array.
        frac:
            Rating fraction a line flow must exceed.
        min_lines:
            Number of lines that must exceed it.

    Returns:
        Ordered mapping of hour label to the array of its critical lines.
    """

    hours, values = _hourly(series)
    result = {}
    infeasible = []

    for hour, loads in zip(hours, values):

        dispatch = solve_dcopf(net, loads)

        if not dispatch.optimal:

            infeasible.append(hour)
            continue

        lines = critical_lines(dispatch.flows, net.ratings, frac)

        if lines.size >= min_lines:

            result[hour] = lines

    if infeasible:

        _log(
            f'Skipped {len(infeasible)} hours with infeasible base DCOPF '
            f'(first: {infeasible[0]}).',
            level = 0,
        )

    _log(
        f'Critical hours: {len(result)} of {len(hours)} '
        f'(frac={frac}, min_lines={min_lines}).',
    )

    return result


def critical_hours(
        net: NetworkModel,
        series: pd.DataFrame | np.ndarray,
        frac: float = 0.8,
        min_lines: int = 2,
) -> list:
    """
    Hours whose attack-free dispatch loads at least `min_lines` lines above
    `frac` of their ratings.
    """

    return list(critical_hour_lines(net, series, frac, min_lines))
