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
Positive semidefinite projections.
"""

from __future__ import annotations

from collections.abc import Sequence

import numpy as np
import scipy.linalg

from .. import _log
from .._errors import InfeasibleSpecError

__all__ = [
    'constrained_psd',
    'project_psd',
]


def _eig_clip(m: np.ndarray) -> np.ndarray:

    w, v = scipy.linalg.eigh(m)
    out = (v * np.clip(w, 0.0, None)) @ v.T

    return (out + out.T) / 2


def project_psd(m: Sequence[Sequence[float]] | np.ndarray) -> np.ndarray:
    """
    Frobenius-nearest positive semidefinite matrix.

    Negative eigenvalues of the symmetric input are set to zero.

    Raises:
        ValueError: If the input is not a symmetric square matrix.
    """

    m = np.asarray(m, float)

    if m.ndim != 2 or m.shape[0] != m.shape[1]:

        raise ValueError(f'Square matrix expected, got shape {m.shape}.')

    scale = max(1.0, float(np.abs(m).max(initial = 0.0)))

    if np.abs(m - m.T).max(initial = 0.0) > 1e-12 * scale:

        raise ValueError('Matrix is not symmetric.')

    return _eig_clip(m)


class _AffineProjector:
    """
    Projection onto ``{S symmetric: diag(V @ S @ V.T) = d}``.

    ``V`` is an orthonormal basis of the vectors orthogonal to the all-ones
    vector, so ``G = V @ S @ V.T`` sums to zero for every ``S``. The
    correction is a combination of the constraint matrices
    ``outer(V[k], V[k])``, with weights from their Gram system.
    """

    def __init__(self, basis: np.ndarray, d: np.ndarray):

        self.basis = basis
        self.d = d
        # singular for two loads, where both constraints coincide
        self.gram_inv = scipy.linalg.pinvh((basis @ basis.T) ** 2)


    def __call__(self, s: np.ndarray) -> np.ndarray:

        v = self.basis
        resid = np.einsum('ki,ij,kj->k', v, s, v) - self.d
        mu = self.gram_inv @ resid
        out = s - (v.T * mu) @ v

        return (out + out.T) / 2


def _polygon_gram(sigma: np.ndarray) -> np.ndarray:
    """
    Rank two covariance from a closed planar polygon.

    Sides of length `sigma` close a polygon if ``2 * max(sigma) <=
    sum(sigma)``. The longest side is laid along the x axis; the others
    are split into two groups of nearly equal length, each group pointing
    in one direction, so the three resulting segments form a triangle. The
    Gram matrix of the side vectors has diagonal ``sigma ** 2`` and sums
    to zero.
    """

    order = np.argsort(-sigma, kind = 'stable')
    longest = order[0]
    side = float(sigma[longest])
    group = np.zeros(sigma.size, dtype = int)
    totals = [0.0, 0.0]

    for i in order[1:]:

        g = int(totals[1] < totals[0])
        group[i] = g
        totals[g] += sigma[i]

    a, b = totals
    px = (side ** 2 + b ** 2 - a ** 2) / (2 * side)
    py = np.sqrt(max(b ** 2 - px ** 2, 0.0))
    apex = np.array([px, py])
    start = np.array([side, 0.0])
    directions = [
        (apex - start) / a,
        -apex / b if b > 0 else np.zeros(2),
    ]
    sides = np.array([directions[g] * s for g, s in zip(group, sigma)])
    sides[longest] = [side, 0.0]
    g = sides @ sides.T

    return (g + g.T) / 2


def constrained_psd(
        diag: Sequence[float],
        tol: float = 1e-8,
        max_iter: int = 10000,
) -> np.ndarray:
    """
    Covariance matrix with a fixed diagonal and zero total sum.

    A positive semidefinite ``G`` with ``sum(G) == 0`` has ``G @ 1 == 0``,
    so it is written as ``V @ S @ V.T`` with ``V`` an orthonormal basis of
    the vectors orthogonal to the all-ones vector. Dykstra's alternating
    projections then look for a positive semidefinite ``S`` meeting the
    diagonal targets; the zero sum holds for every iterate. The problem is
    solved in units where the largest diagonal entry is 1.

    Such a matrix exists if and only if the standard deviations form a
    closed polygon: ``2 * max(sigma) <= sum(sigma)``. Violating instances
    are rejected before iterating. Instances on the border of this
    condition have only low rank solutions, where the iteration stalls; if
    it does not converge, the covariance of a closed planar polygon is
    returned instead.

    Args:
        diag:
            Target variances, strictly positive.
        tol:
            Tolerance on the smallest eigenvalue; the linear constraints are
            met to rounding precision.
        max_iter:
            Iteration limit.

    Returns:
        The matrix, with the linear constraints met exactly (up to rounding)
        and smallest eigenvalue at least `-tol`.

    Raises:
        InfeasibleSpecError: If no such matrix exists.
    """

    d = np.asarray(diag, float).ravel()

    if d.size == 0 or np.any(~(d > 0)):

        raise ValueError('Target diagonal entries must be strictly positive.')

    sigma = np.sqrt(d)

    if 2 * sigma.max() > sigma.sum() * (1 + 1e-9):

        raise InfeasibleSpecError(
            'Standard deviations violate 2 * max(sigma) <= sum(sigma); '
            'no zero-sum covariance exists.',
        )

    scale = float(d.max())
    basis = scipy.linalg.null_space(np.ones((1, d.size)))
    project_affine = _AffineProjector(basis, d / scale)
    tol_n = tol / max(1.0, scale)
    y = project_affine(basis.T @ np.diag(d / scale) @ basis)
    correction = np.zeros_like(y)
    resid = np.inf

    for it in range(1, max_iter + 1):

        r = y - correction
        x = _eig_clip(r)
        correction = x - r
        y = project_affine(x)
        resid = np.linalg.norm(x - y)

        if resid <= tol_n:

            _log(f'Constrained PSD converged in {it} iterations.', level = 2)
            g = basis @ y @ basis.T

            return (g + g.T) / 2 * scale

    _log(
        f'Constrained PSD stalled after {max_iter} iterations '
        f'(residual {resid:.3g}); using a planar polygon covariance.',
        level = 1,
    )

    return _polygon_gram(sigma)
