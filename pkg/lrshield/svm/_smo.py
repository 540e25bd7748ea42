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
Sequential minimal optimization for the support vector duals.

Both duals are handled in one form. With signs ``z`` and the signed
variables ``beta = z * alpha``, maximize::

    -p . alpha - 1/2 beta' K beta

subject to ``sum(beta) == 0`` and ``0 <= alpha <= upper``. The classifier
has ``z`` the labels and ``p = -1``; the regression stacks the two
coefficient vectors with ``z = [1, .., 1, -1, .., -1]`` and
``p = [eps - y, eps + y]``.
"""

from __future__ import annotations

from collections.abc import Callable
import dataclasses

import numpy as np

from .. import _log
from .._errors import SolverError

__all__ = [
    'SmoResult',
    'smo_solve',
]

_MIN_CURVATURE = 1e-12


@dataclasses.dataclass(frozen = True)
class SmoResult:
    """
    Attrs:
        beta:
            Signed dual variables.
        bias:
            Offset of the decision function ``sum(beta * K) + bias``.
        updates:
            Pair updates performed.
        violation:
            Final maximal KKT violation.
        objective:
            Dual objective value.
        grad:
            Final gradient of the objective.
    """

    beta: np.ndarray
    bias: float
    updates: int
    violation: float
    objective: float
    grad: np.ndarray


def smo_solve(
        column: Callable[[int], np.ndarray],
        diagonal: np.ndarray,
        z: np.ndarray,
        p: np.ndarray,
        upper: float,
        tol: float = 1e-3,
        max_updates: int = 10_000_000,
) -> SmoResult:
    """
    Maximal violating pair coordinate ascent.

    Args:
        column:
            Returns the kernel column of a variable (length of `z`).
        diagonal:
            Kernel diagonal, one entry per variable.
        z:
            Signs of the variables, +1 or -1.
        p:
            Linear term of the dual.
        upper:
            Box bound of the unsigned variables.
        tol:
            Stopping tolerance on the maximal violation.
        max_updates:
            Pair update limit.

    Raises:
        SolverError: If the limit is hit before the tolerance is met.
    """

    z = np.asarray(z, float)
    n = z.size
    lo = np.minimum(0.0, z * upper)
    hi = np.maximum(0.0, z * upper)
    beta = np.zeros(n)
    p = np.asarray(p, float)
    # gradient of the objective with respect to alpha
    grad = -p.copy()
    updates = 0

    while True:

        crit = z * grad
        can_up = beta < hi
        can_down = beta > lo
        i = int(np.argmax(np.where(can_up, crit, -np.inf)))
        j = int(np.argmin(np.where(can_down, crit, np.inf)))
        violation = (
            crit[i] - crit[j]
                if can_up.any() and can_down.any() else
            0.0
        )

        if violation <= tol:

            break

        if updates >= max_updates:

            raise SolverError(
                f'SMO did not converge in {max_updates} updates; '
                f'violation {violation:.3g} > {tol:.3g}.',
            )

        ki = column(i)
        kj = column(j)
        curvature = max(diagonal[i] + diagonal[j] - 2 * ki[j], _MIN_CURVATURE)
        step = min(hi[i] - beta[i], beta[j] - lo[j], violation / curvature)
        beta[i] = min(beta[i] + step, hi[i])
        beta[j] = max(beta[j] - step, lo[j])
        grad += step * z * (kj - ki)
        updates += 1

    bias = _bias(beta, lo, hi, crit, can_up, can_down)
    alpha = z * beta
    objective = float(0.5 * alpha @ (grad - p))

    _log(
        f'SMO finished: {n} variables, {updates} updates, '
        f'violation {violation:.3g}.',
        level = 2,
    )

    return SmoResult(
        beta = beta,
        bias = bias,
        updates = updates,
        violation = float(max(violation, 0.0)),
        objective = objective,
        grad = grad,
    )


def _bias(
        beta: np.ndarray,
        lo: np.ndarray,
        hi: np.ndarray,
        crit: np.ndarray,
        can_up: np.ndarray,
        can_down: np.ndarray,
) -> float:
    """
    Mean over free variables, else the middle of the feasible interval.
    """

    free = (beta > lo) & (beta < hi)

    if free.any():

        return float(crit[free].mean())

    top = crit[can_up].max(initial = -np.inf)
    bottom = crit[can_down].min(initial = np.inf)

    if not np.isfinite(top):

        return float(bottom)

    if not np.isfinite(bottom):

        return float(top)

    return float((top + bottom) / 2)
