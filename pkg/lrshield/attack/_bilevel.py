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
Cost maximization and line overflow attacks as bi-level programs.

The attacker chooses the injection change ``e = B c`` at the load buses
within the load shift box; the operator re-dispatches by DCOPF on the
falsified loads. The operator's DCOPF is replaced by its KKT conditions,
the complementary slackness pairs are linearized with binaries and big-M
bounds, and the resulting MILP is solved by branch-and-bound.

Variables of the MILP, in order::

    e (n_l) | G (n_g) | lambda | mu+ (L) | mu- (L) | nu+ (n_g) | nu- (n_g) | z

where ``L`` is the number of lines kept by the screening and ``z`` holds
one binary per dual (``mu+``, ``mu-``, ``nu+``, ``nu-``).
"""

from __future__ import annotations

from typing import Literal
from collections.abc import Sequence
import dataclasses

import numpy as np
import scipy.linalg

from .. import _log
from .._errors import AttackError
from ._scenario import AttackScenario, load_shift
from ..grid import NetworkModel, as_load_vector
from ..optim import Solution, LpProblem, MilpProblem, solve_lp, solve_milp
from ..dispatch import solve_dcopf

__all__ = [
    'BilevelOptions',
    'cm_attack',
    'lo_attack',
    'screen_lines',
]

_DUAL_TIGHT = 1 - 1e-6
_SCREEN_TOL = 1e-9
_COST_RTOL = 1e-5


@dataclasses.dataclass(frozen = True)
class BilevelOptions:
    """
    Solver settings of the bi-level attacks.

    Attrs:
        gap:
            Relative optimality gap of the branch-and-bound.
        node_limit:
            LP relaxations per MILP solve.
        big_m_rounds:
            How many times the dual bound may be doubled.
        dual_bound:
            Initial bound of the lower level duals; derived from the costs
            and the PTDF when omitted.
        screen:
            Drop lines that cannot reach their rating in the attack box.
    """

    gap: float = 1e-6
    node_limit: int = 20000
    big_m_rounds: int = 10
    dual_bound: float | None = None
    screen: bool = True


def _flow_maps(
        net: NetworkModel,
        p: np.ndarray,
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """
    Flow sensitivities: ``flows = H @ G + M @ e + f0``.
    """

    h = net.R @ net.gen_matrix
    m = net.R @ net.load_matrix

    return h, m, -(m @ p)


def screen_lines(
        net: NetworkModel,
        p: Sequence[float],
        tau: float,
) -> np.ndarray:
    """
    Lines whose operator-side flow can reach the rating.

    The flow range of each line is computed over the generator box with
    power balance and the attack box with zero sum injection change. A
    line outside this set can never be binding in the operator's DCOPF.

    Returns:
        Sorted indices of the lines to keep.
    """

    p = as_load_vector(net, p)
    h, m, f0 = _flow_maps(net, p)
    box = tau * np.abs(p)
    n_l, n_g = net.n_l, net.n_gen
    a_eq = np.zeros((2, n_l + n_g))
    a_eq[0, :n_l] = 1.0
    a_eq[1, n_l:] = 1.0
    b_eq = np.array([0.0, p.sum()])
    lower = np.concatenate([-box, net.gmin])
    upper = np.concatenate([box, net.gmax])
    keep = []

    for line in range(net.n_line):

        coef = np.concatenate([m[line], h[line]])
        reach = net.ratings[line] * (1 - _SCREEN_TOL)

        for sign in (1.0, -1.0):

            sol = solve_lp(
                LpProblem(
                    c = -sign * coef,
                    a_eq = a_eq,
                    b_eq = b_eq,
                    lower = lower,
                    upper = upper,
                ),
            )

            if not sol.optimal or -sol.objective + sign * f0[line] >= reach:

                keep.append(line)
                break

    _log(f'Line screening kept {len(keep)} of {net.n_line} lines.', level = 2)

    return np.array(keep, dtype = int)


@dataclasses.dataclass
class _KktModel:
    """
    The single-level reformulation for one hour and load shift bound.
    """

    net: NetworkModel
    p: np.ndarray
    tau: float
    lines: np.ndarray

    def __post_init__(self):

        self.h, self.m, self.f0 = _flow_maps(self.net, self.p)
        self.n_l = self.net.n_l
        self.n_g = self.net.n_gen
        self.n_k = self.lines.size
        self.n_z = 2 * self.n_k + 2 * self.n_g
        self.off_g = self.n_l
        self.off_lam = self.off_g + self.n_g
        self.off_pi = self.off_lam + 1
        self.off_z = self.off_pi + self.n_z
        self.n = self.off_z + self.n_z


    def default_dual_bound(self) -> float:

        hk = self.h[self.lines]
        a_max = float(np.abs(self.net.costs).max(initial = 0.0))
        h_max = float(np.abs(hk).max(initial = 0.0))

        return 10.0 * max(1.0, a_max) * (1.0 + h_max)


    def problem(self, objective: np.ndarray, dual_bound: float) -> MilpProblem:
        """
        The MILP minimizing `objective` (coefficients over G only).
        """

        net = self.net
        n, n_l, n_g, n_k, n_z = self.n, self.n_l, self.n_g, self.n_k, self.n_z
        e = slice(0, n_l)
        g = slice(self.off_g, self.off_g + n_g)
        lam = self.off_lam
        mu_p = slice(self.off_pi, self.off_pi + n_k)
        mu_m = slice(mu_p.stop, mu_p.stop + n_k)
        nu_p = slice(mu_m.stop, mu_m.stop + n_g)
        nu_m = slice(nu_p.stop, nu_p.stop + n_g)
        pi = slice(self.off_pi, self.off_z)
        z = slice(self.off_z, n)
        z_mu_p = slice(self.off_z, self.off_z + n_k)
        z_mu_m = slice(z_mu_p.stop, z_mu_p.stop + n_k)
        z_nu_p = slice(z_mu_m.stop, z_mu_m.stop + n_g)
        z_nu_m = slice(z_nu_p.stop, z_nu_p.stop + n_g)

        hk = self.h[self.lines]
        mk = self.m[self.lines]
        f0k = self.f0[self.lines]
        fk = net.ratings[self.lines]
        gspan = net.gmax - net.gmin
        m_line = 2.0 * fk

        # power balance and stationarity
        a_eq = np.zeros((2 + n_g, n))
        b_eq = np.zeros(2 + n_g)
        a_eq[0, e] = 1.0
        a_eq[1, g] = 1.0
        b_eq[1] = self.p.sum()
        a_eq[2:, lam] = -1.0
        a_eq[2:, mu_p] = hk.T
        a_eq[2:, mu_m] = -hk.T
        a_eq[2:, nu_p] = np.eye(n_g)
        a_eq[2:, nu_m] = -np.eye(n_g)
        b_eq[2:] = -net.costs

        rows = []
        rhs = []

        def block(k: int) -> np.ndarray:

            rows.append(np.zeros((k, n)))

            return rows[-1]

        # operator line limits
        blk = block(n_k)
        blk[:, e], blk[:, g] = mk, hk
        rhs.append(fk - f0k)
        blk = block(n_k)
        blk[:, e], blk[:, g] = -mk, -hk
        rhs.append(fk + f0k)

        # duals vanish unless their binary is set
        blk = block(n_z)
        blk[:, pi] = np.eye(n_z)
        blk[:, z] = -dual_bound * np.eye(n_z)
        rhs.append(np.zeros(n_z))

        # constraints are active where their binary is set
        blk = block(n_k)
        blk[:, e], blk[:, g] = -mk, -hk
        blk[:, z_mu_p] = np.diag(m_line)
        rhs.append(m_line - fk + f0k)
        blk = block(n_k)
        blk[:, e], blk[:, g] = mk, hk
        blk[:, z_mu_m] = np.diag(m_line)
        rhs.append(m_line - fk - f0k)
        blk = block(n_g)
        blk[:, g] = -np.eye(n_g)
        blk[:, z_nu_p] = np.diag(gspan)
        rhs.append(gspan - net.gmax)
        blk = block(n_g)
        blk[:, g] = np.eye(n_g)
        blk[:, z_nu_m] = np.diag(gspan)
        rhs.append(gspan + net.gmin)

        # a line cannot bind in both directions
        blk = block(n_k)
        blk[:, z_mu_p] = np.eye(n_k)
        blk[:, z_mu_m] = np.eye(n_k)
        rhs.append(np.ones(n_k))
        movable = np.flatnonzero(gspan > 0)
        blk = block(movable.size)
        blk[np.arange(movable.size), z_nu_p.start + movable] = 1.0
        blk[np.arange(movable.size), z_nu_m.start + movable] = 1.0
        rhs.append(np.ones(movable.size))

        box = self.tau * np.abs(self.p)
        lower = np.concatenate([
            -box,
            net.gmin,
            [-np.inf],
            np.zeros(2 * n_z),
        ])
        upper = np.concatenate([
            box,
            net.gmax,
            [np.inf],
            np.full(n_z, np.inf),
            np.ones(n_z),
        ])
        c = np.zeros(n)
        c[g] = objective

        lp = LpProblem(
            c = c,
            a_eq = a_eq,
            b_eq = b_eq,
            a_ub = np.vstack(rows),
            b_ub = np.concatenate(rhs),
            lower = lower,
            upper = upper,
        )

        return MilpProblem(lp = lp, binaries = tuple(range(z.start, z.stop)))


    def injection(self, x: np.ndarray) -> np.ndarray:
        """
        Injection change at the loads, clipped to the box and closed to
        zero sum.
        """

        box = self.tau * np.abs(self.p)
        e = np.clip(x[:self.n_l], -box, box)
        scale = max(1.0, float(np.abs(self.p).sum()))
        e[np.abs(e) <= 1e-12 * scale] = 0.0

        if e.any():

            e[np.argmax(np.abs(e))] -= e.sum()

        return e


    def generation(self, x: np.ndarray) -> np.ndarray:

        return x[self.off_g:self.off_g + self.n_g]


    def duals(self, x: np.ndarray) -> np.ndarray:

        return x[self.off_pi:self.off_z]


def _state_vector(net: NetworkModel, e: np.ndarray) -> np.ndarray:
    """
    State attack vector with ``B c`` equal to `e` at the load buses, zero
    elsewhere, and zero angle change at the slack bus.
    """

    target = net.load_matrix @ e
    keep = np.arange(net.n_bus) != net.slack_position
    c = np.zeros(net.n_bus)

    if target.any():

        c[keep] = scipy.linalg.solve(
            net.B[np.ix_(keep, keep)],
            target[keep],
            assume_a = 'pos',
        )

    return c


def _solve_kkt(
        model: _KktModel,
        objective: np.ndarray,
        options: BilevelOptions,
) -> Solution:
    """
    Solve the MILP, doubling the dual bound while it binds.
    """

    bound = options.dual_bound or model.default_dual_bound()

    for attempt in range(options.big_m_rounds + 1):

        sol = solve_milp(
            model.problem(objective, bound),
            gap = options.gap,
            node_limit = options.node_limit,
        )
        _log(
            f'KKT MILP: status={sol.status}, nodes={sol.nodes}, '
            f'dual bound={bound:.4g}.',
            level = 2,
        )

        if sol.x is None:

            if sol.status == 'node_limit':

                raise AttackError(
                    'Branch-and-bound hit the node limit without an '
                    'integer solution.',
                    reason = 'node_limit',
                )

            if sol.status == 'unbounded':

                raise AttackError('KKT MILP unbounded.', reason = 'milp')

        elif model.duals(sol.x).max(initial = 0.0) < _DUAL_TIGHT * bound:

            if sol.status == 'node_limit':

                _log(
                    f'KKT MILP accepted at the node limit, gap {sol.gap:.3g}.',
                    level = 0,
                )

            return sol

        bound *= 2.0

    raise AttackError(
        f'KKT MILP infeasible after {options.big_m_rounds} dual bound '
        'doublings.',
        reason = 'milp_infeasible',
    )


def _scenario(
        net: NetworkModel,
        p: np.ndarray,
        tau: float,
        model: _KktModel,
        sol: Solution,
        kind: Literal['cm', 'lo'],
        objective: float,
        baseline: float,
        line: int | None = None,
        hour = None,
) -> AttackScenario:

    e = model.injection(sol.x)
    c = _state_vector(net, e)
    delta_p = -e
    dispatch = solve_dcopf(net, p + delta_p)

    if not dispatch.optimal:

        raise AttackError(
            'DCOPF on the falsified loads is infeasible; attack discarded.',
            reason = 'dcopf_infeasible',
        )

    embedded = float(net.costs @ model.generation(sol.x))

    if abs(dispatch.cost - embedded) > _COST_RTOL * (1 + abs(dispatch.cost)):

        _log(
            f'Re-dispatch cost {dispatch.cost:.6g} differs from the KKT '
            f'embedded cost {embedded:.6g}.',
            level = 0,
        )

    return AttackScenario(
        hour = hour,
        kind = kind,
        p = p,
        delta_p = delta_p,
        tau_requested = float(tau),
        tau_real = load_shift(p, delta_p),
        c = c,
        target_line = line,
        objective = objective,
        baseline = baseline,
    )


def _prepare(net: NetworkModel, p, tau: float, options: BilevelOptions):

    p = as_load_vector(net, p)

    if tau < 0:

        raise ValueError(f'Load shift bound must be non-negative, got {tau}.')

    base = solve_dcopf(net, p)

    if not base.optimal:

        raise AttackError(
            'Attack-free DCOPF is infeasible.',
            reason = 'base_infeasible',
        )

    lines = (
        screen_lines(net, p, tau)
            if options.screen else
        np.arange(net.n_line)
    )

    return p, base, _KktModel(net = net, p = p, tau = tau, lines = lines)


def cm_attack(
        net: NetworkModel,
        p: Sequence[float],
        tau: float,
        options: BilevelOptions | None = None,
        hour = None,
) -> AttackScenario:
    """
    Cost maximization attack.

    Finds the load redistribution within the load shift bound that
    maximizes the operating cost of the operator's re-dispatch.

    Args:
        net:
            The network.
        p:
            True loads (MW), in load order.
        tau:
            Load shift bound.
        options:
            Solver settings.
        hour:
            Hour label stored with the scenario.

    Returns:
        The scenario; `objective` is the attacked operating cost and
        `baseline` the attack-free one.

    Raises:
        AttackError: If the attack-free DCOPF or the MILP is infeasible, or
            the falsified loads admit no feasible dispatch.
    """

    options = options or BilevelOptions()
    p, base, model = _prepare(net, p, tau, options)
    sol = _solve_kkt(model, -net.costs, options)

    return _scenario(
        net, p, tau, model, sol,
        kind = 'cm',
        objective = -sol.objective,
        baseline = base.cost,
        hour = hour,
    )


def lo_attack(
        net: NetworkModel,
        p: Sequence[float],
        tau: float,
        line: int,
        options: BilevelOptions | None = None,
        hour = None,
) -> AttackScenario:
    """
    Line overflow attack on `line`.

    Maximizes the magnitude of the physical flow on the target line, that
    is the flow caused by the re-dispatch serving the true loads. Both flow
    directions are solved and the larger one is kept.

    Returns:
        The scenario; `objective` is the physical flow magnitude (MW) on
        the target line and `baseline` the attack-free flow magnitude.

    Raises:
        AttackError: As `cm_attack`.
    """

    if not 0 <= line < net.n_line:

        raise ValueError(f'Line index {line} outside [0, {net.n_line}).')

    options = options or BilevelOptions()
    p, base, model = _prepare(net, p, tau, options)
    h_line = model.h[line]
    f0_line = model.f0[line]
    best = None

    for sign in (1.0, -1.0):

        sol = _solve_kkt(model, -sign * h_line, options)
        flow = -sol.objective + sign * f0_line

        if best is None or flow > best[1]:

            best = sol, flow

    sol, flow = best

    return _scenario(
        net, p, tau, model, sol,
        kind = 'lo',
        objective = flow,
        baseline = abs(float(base.flows[line])),
        line = line,
        hour = hour,
    )
