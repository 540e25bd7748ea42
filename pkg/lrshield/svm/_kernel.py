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
Kernel functions of the support vector machines.
"""

from __future__ import annotations

from typing import Literal
from collections import OrderedDict
import dataclasses

import numpy as np
import scipy.spatial.distance

__all__ = [
    'KernelColumns',
    'KernelSpec',
    'kernel',
    'kernel_matrix',
]

KernelKind = Literal['rbf', 'linear']


@dataclasses.dataclass(frozen = True)
class KernelSpec:
    """
    Kernel type and width.

    Attrs:
        kind:
            `rbf` for ``exp(-sigma * |x1 - x2|^2)``, `linear` for ``x1 . x2``.
        sigma:
            Width parameter of the RBF kernel.
    """

    kind: KernelKind = 'rbf'
    sigma: float = 0.01

    def __post_init__(self):

        if self.kind not in ('rbf', 'linear'):

            raise ValueError(f'Unknown kernel `{self.kind}`.')

        if self.kind == 'rbf' and not self.sigma >= 0:

            raise ValueError(f'RBF width must be non-negative: {self.sigma}.')


    def to_dict(self) -> dict:

        return {'kind': self.kind, 'sigma': float(self.sigma)}


def _rows(x, name: str) -> np.ndarray:

    x = np.asarray(x, float)

    if x.ndim == 1:

        x = x[None, :]

    if x.ndim != 2:

        raise ValueError(f'`{name}` must be a vector or a matrix.')

    return x


def kernel_matrix(spec: KernelSpec, a, b = None) -> np.ndarray:
    """
    Kernel values between the rows of `a` and the rows of `b`.

    Args:
        spec:
            The kernel.
        a, b:
            Data matrices (or single vectors) with equal column counts;
            `b` defaults to `a`.
    """

    a = _rows(a, 'a')
    b = a if b is None else _rows(b, 'b')

    if a.shape[1] != b.shape[1]:

        raise ValueError(
            f'Dimension mismatch: {a.shape[1]} and {b.shape[1]} features.',
        )

    if spec.kind == 'linear':

        return a @ b.T

    sq = scipy.spatial.distance.cdist(a, b, 'sqeuclidean')

    return np.exp(-spec.sigma * sq)


def kernel(spec: KernelSpec, x1, x2) -> float:
    """
    Kernel value of two feature vectors.
    """

    x1 = np.asarray(x1, float).ravel()
    x2 = np.asarray(x2, float).ravel()

    if x1.shape != x2.shape:

        raise ValueError(
            f'Dimension mismatch: {x1.size} and {x2.size} features.',
        )

    return float(kernel_matrix(spec, x1, x2)[0, 0])


class KernelColumns:
    """
    Columns of the kernel matrix of a data set.

    Small data sets keep the full matrix; larger ones compute columns on
    demand and keep the most recently used ones.
    """

    def __init__(
            self,
            spec: KernelSpec,
            x: np.ndarray,
            full_below: int = 8000,
            cache_columns: int = 1024,
    ):

        self.spec = spec
        self.x = np.asarray(x, float)
        self.n = self.x.shape[0]
        self.cache_columns = cache_columns
        self._full = (
            kernel_matrix(spec, self.x)
                if self.n <= full_below else
            None
        )
        self._cache: OrderedDict[int, np.ndarray] = OrderedDict()


    def __getitem__(self, i: int) -> np.ndarray:

        if self._full is not None:

            return self._full[:, i]

        if i in self._cache:

            self._cache.move_to_end(i)

            return self._cache[i]

        col = kernel_matrix(self.spec, self.x, self.x[i])[:, 0]
        self._cache[i] = col

        if len(self._cache) > self.cache_columns:

            self._cache.popitem(last = False)

        return col


    def diagonal(self) -> np.ndarray:

        if self._full is not None:

            return np.diag(self._full).copy()

        if self.spec.kind == 'rbf':

            return np.ones(self.n)

        return np.einsum('ij,ij->i', self.x, self.x)
