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
Best-first branch-and-bound over LP relaxations, for binary variables.
"""

from __future__ import annotations

from collections.abc import Sequence
import heapq
import itertools
import dataclasses

import numpy as np

from .. import _log
from ._lp import LpProblem, Solution, solve_lp

__all__ = [
    'MilpProblem',
    'solve_milp',
]


@dataclasses.dataclass(frozen = True)
class MilpProblem:
    """
    An LP in which the variables listed in `binaries` must be 0 or 1.
    """

    lp: LpProblem
    binaries: tuple[int, ...]

    def __post_init__(self):

        binaries = tuple(sorted(int(i) for i in self.binaries))

        if len(set(binaries)) != len(binaries):

            raise ValueError('Duplicate binary variable index.')

        if binaries and (binaries[0] < 0 or binaries[-1] >= self.lp.n):

            raise ValueError(
                f'Binary index out of range for {self.lp.n} variables.',
            )

        idx = list(binaries)

        if np.any(self.lp.lower[idx] < 0) or np.any(self.lp.upper[idx] > 1):

            raise ValueError('Bounds of binary variables must lie in [0, 1].')

        object.__setattr__(self, 'binaries', binaries)


@dataclasses.dataclass(order = True)
class _Node:

    bound: float
    depth: int
    seq: int
    fixings: tuple[tuple[int, int], ...] = dataclasses.field(compare = False)


def _apply(
        lp: LpProblem,
        fixings: Sequence[tuple[int, int]],
) -> LpProblem:

    lower = lp.lower.copy()
    upper = lp.upper.copy()

    for idx, value in fixings:

        lower[idx] = upper[idx] = value

    return lp.with_bounds(lower, upper)


def _most_fractional(
        x: np.ndarray,
        binaries: tuple[int, ...],
        int_tol: float,
) -> int | None:

    vals = x[list(binaries)]
    frac = np.minimum(vals - np.floor(vals), np.ceil(vals) - vals)

    if not binaries or frac.max() <= int_tol:

        return None

    return binaries[int(np.argmax(frac))]


def solve_milp(
        problem: MilpProblem,
        gap: float = 1e-6,
        node_limit: int = 20000,
        int_tol: float = 1e-6,
        tol: float = 1e-9,
) -> Solution:
    """
    Minimize a mixed binary linear program by best-first branch-and-bound.

    Open nodes are explored in order of their LP bound, deeper nodes first
    among equal bounds, then in creation order. Each node branches on the
    most fractional binary (lowest index on ties). Integral relaxations are
    polished by re-solving the LP with all binaries fixed at their rounded
    values.

    Args:
        problem:
            The MILP.
        gap:
            Relative optimality tolerance; the search stops when no open
            node can improve the incumbent by more than
            ``gap * max(1, |incumbent|)``.
        node_limit:
            Maximum number of LP relaxations solved.
        int_tol:
            Integrality tolerance of the binaries.
        tol:
            Simplex tolerance.

    Returns:
        The best integer solution found. Status is `node_limit` when the
        limit stopped the search, with the incumbent (if any) attached.
    """

    lp = problem.lp
    binaries = problem.binaries
    seq = itertools.count()
    heap = [_Node(-np.inf, 0, next(seq), ())]
    incumbent: Solution | None = None
    nodes = branches = iterations = 0
    status = 'optimal'

    def slack(obj: float) -> float:

        return gap * max(1.0, abs(obj))

    while heap:

        node = heap[0]

        if incumbent and node.bound >= incumbent.objective - slack(
            incumbent.objective,
        ):

            break

        if nodes >= node_limit:

            status = 'node_limit'
            _log(
                f'Branch-and-bound stopped at the node limit ({node_limit}).',
                level = 0,
            )
            break

        heapq.heappop(heap)
        relaxed = solve_lp(_apply(lp, node.fixings), tol = tol)
        nodes += 1
        iterations += relaxed.iterations

        if relaxed.status == 'unbounded':

            if not node.fixings:

                return Solution(
                    status = 'unbounded',
                    nodes = nodes,
                    iterations = iterations,
                )

            continue

        if relaxed.status != 'optimal':

            continue

        if incumbent and relaxed.objective >= incumbent.objective - slack(
            incumbent.objective,
        ):

            continue

        j = _most_fractional(relaxed.x, binaries, int_tol)

        if j is None:

            candidate = _polish(lp, relaxed, binaries, tol)

            if not incumbent or candidate.objective < incumbent.objective:

                incumbent = candidate
                _log(
                    f'New incumbent {incumbent.objective:.6g} '
                    f'at node {nodes}.',
                    level = 2,
                )

            continue

        branches += 1
        first = 1 if relaxed.x[j] >= 0.5 else 0

        for value in (first, 1 - first):

            heapq.heappush(
                heap,
                _Node(
                    relaxed.objective,
                    -(len(node.fixings) + 1),
                    next(seq),
                    node.fixings + ((j, value),),
                ),
            )

    if incumbent is None:

        return Solution(
            status = 'node_limit' if status == 'node_limit' else 'infeasible',
            nodes = nodes,
            branches = branches,
            iterations = iterations,
        )

    best_open = min((n.bound for n in heap), default = incumbent.objective)
    best_bound = min(best_open, incumbent.objective)
    rel_gap = (incumbent.objective - best_bound) / max(
        1.0,
        abs(incumbent.objective),
    )

    return Solution(
        status = status,
        x = incumbent.x,
        objective = incumbent.objective,
        iterations = iterations,
        nodes = nodes,
        branches = branches,
        gap = max(0.0, rel_gap),
    )


def _polish(
        lp: LpProblem,
        relaxed: Solution,
        binaries: tuple[int, ...],
        tol: float,
) -> Solution:
    """
    Re-solve with binaries fixed at their rounded values.
    """

    rounded = np.round(relaxed.x[list(binaries)]).astype(int)
    fixed = solve_lp(
        _apply(lp, tuple(zip(binaries, rounded.tolist()))),
        tol = tol,
    )

    return fixed if fixed.optimal else relaxed
