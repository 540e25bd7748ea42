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
Epsilon support vector regression and C support vector classification.
"""

from __future__ import annotations

from typing import Any
import dataclasses
import pathlib as pl

import numpy as np

from .. import _misc
from ._smo import smo_solve
from ._kernel import KernelSpec, KernelColumns, kernel_matrix

__all__ = [
    'SvmModel',
    'SvrModel',
    'load_model',
    'save_model',
    'svm_predict',
    'svr_predict',
    'train_svm',
    'train_svr',
]


@dataclasses.dataclass(frozen = True)
class SvrModel:
    """
    A trained epsilon support vector regression.

    Attrs:
        support:
            Support vectors, one per row.
        coef:
            Dual coefficient differences ``alpha - alpha'``.
        bias:
            Offset of the prediction, averaged over the free support
            vectors.
        kernel:
            Kernel specification.
        eps:
            Width of the insensitive tube.
        penalty:
            Box bound of the dual coefficients.
        objective:
            Dual objective at the solution.
        scaling:
            Scaling statistics of the inputs and the target, if any.
    """

    support: np.ndarray
    coef: np.ndarray
    bias: float
    kernel: KernelSpec
    eps: float
    penalty: float
    objective: float = np.nan
    scaling: dict | None = None


    @property
    def alpha(self) -> np.ndarray:

        return np.maximum(self.coef, 0.0)


    @property
    def alpha_star(self) -> np.ndarray:

        return np.maximum(-self.coef, 0.0)


    @property
    def n_features(self) -> int:

        return self.support.shape[1]


    def to_dict(self) -> dict:

        return {
            'type': 'svr',
            'kernel': self.kernel.to_dict(),
            'support': self.support,
            'coef': self.coef,
            'bias': self.bias,
            'eps': self.eps,
            'penalty': self.penalty,
            'objective': self.objective,
            'scaling': self.scaling,
        }


    @classmethod
    def from_dict(cls, doc: dict) -> SvrModel:

        return cls(
            support = _support(doc['support']),
            coef = np.asarray(doc['coef'], float),
            bias = float(doc['bias']),
            kernel = KernelSpec(**doc['kernel']),
            eps = float(doc['eps']),
            penalty = float(doc['penalty']),
            objective = float(doc.get('objective', np.nan)),
            scaling = doc.get('scaling'),
        )


@dataclasses.dataclass(frozen = True)
class SvmModel:
    """
    A trained C support vector classifier.

    Attrs:
        support:
            Support vectors, one per row.
        labels:
            Labels of the support vectors, -1 or +1.
        beta:
            Dual coefficients, in ``(0, C]``.
        bias:
            Offset of the decision value.
        kernel:
            Kernel specification.
        C:
            Box bound of the dual coefficients.
        objective:
            Dual objective at the solution.
        scaling:
            Scaling statistics of the inputs, if any.
    """

    support: np.ndarray
    labels: np.ndarray
    beta: np.ndarray
    bias: float
    kernel: KernelSpec
    C: float
    objective: float = np.nan
    scaling: dict | None = None


    @property
    def n_features(self) -> int:

        return self.support.shape[1]


    def to_dict(self) -> dict:

        return {
            'type': 'svm',
            'kernel': self.kernel.to_dict(),
            'support': self.support,
            'labels': self.labels,
            'beta': self.beta,
            'bias': self.bias,
            'C': self.C,
            'objective': self.objective,
            'scaling': self.scaling,
        }


    @classmethod
    def from_dict(cls, doc: dict) -> SvmModel:

        return cls(
            support = _support(doc['support']),
            labels = np.asarray(doc['labels'], float),
            beta = np.asarray(doc['beta'], float),
            bias = float(doc['bias']),
            kernel = KernelSpec(**doc['kernel']),
            C = float(doc['C']),
            objective = float(doc.get('objective', np.nan)),
            scaling = doc.get('scaling'),
        )


def _support(rows: Any) -> np.ndarray:

    rows = np.asarray(rows, float)

    return rows.reshape(0, 0) if rows.size == 0 else np.atleast_2d(rows)


def _training_data(x, name: str) -> np.ndarray:

    x = np.asarray(x, float)

    if x.ndim != 2 or x.shape[0] < 1:

        raise ValueError(
            f'`{name}` must be a non-empty samples by features matrix.',
        )

    return x


def train_svr(
        x,
        y,
        eps: float = 0.01,
        penalty: float = 100.0,
        spec: KernelSpec | None = None,
        tol: float = 1e-3,
        max_updates: int = 10_000_000,
) -> SvrModel:
    """
    Train an epsilon support vector regression by SMO.

    Args:
        x:
            Samples by features matrix.
        y:
            Targets.
        eps:
            Width of the insensitive tube.
        penalty:
            Box bound of the dual coefficients.
        spec:
            Kernel; RBF with width 0.01 by default.
        tol:
            Maximal KKT violation at termination.
        max_updates:
            Pair update limit.

    Raises:
        SolverError: If SMO does not converge; the message has the final
            violation.
    """

    x = _training_data(x, 'x')
    y = np.asarray(y, float).ravel()
    m = x.shape[0]
    spec = spec or KernelSpec()

    if y.size != m:

        raise ValueError(f'{m} samples but {y.size} targets.')

    if not eps >= 0:

        raise ValueError(f'Tube width must be non-negative, got {eps}.')

    if not penalty > 0:

        raise ValueError(f'Penalty must be positive, got {penalty}.')

    alpha, alpha_star, bias, objective = _svr_dual(
        x, y, eps, penalty, spec, tol, max_updates,
    )
    coef = alpha - alpha_star
    sv = coef != 0

    return SvrModel(
        support = x[sv].copy(),
        coef = coef[sv],
        bias = bias,
        kernel = spec,
        eps = float(eps),
        penalty = float(penalty),
        objective = objective,
    )


def _svr_dual(
        x: np.ndarray,
        y: np.ndarray,
        eps: float,
        penalty: float,
        spec: KernelSpec,
        tol: float,
        max_updates: int,
) -> tuple[np.ndarray, np.ndarray, float, float]:
    """
    Coefficients ``alpha`` and ``alpha'`` of every sample, the bias and the
    dual objective.
    """

    m = x.shape[0]
    cols = KernelColumns(spec, x)

    def column(t: int) -> np.ndarray:

        col = cols[t % m]

        return np.concatenate([col, col])

    res = smo_solve(
        column = column,
        diagonal = np.tile(cols.diagonal(), 2),
        z = np.concatenate([np.ones(m), -np.ones(m)]),
        p = np.concatenate([eps - y, eps + y]),
        upper = penalty,
        tol = tol,
        max_updates = max_updates,
    )
    alpha = res.beta[:m].copy()
    alpha_star = -res.beta[m:]
    coef = alpha - alpha_star
    k_coef = y - eps - res.grad[:m]
    objective = float(
        -0.5 * coef @ k_coef - eps * (alpha + alpha_star).sum() + y @ coef,
    )

    return alpha, alpha_star, res.bias, objective


def _query(model: SvrModel | SvmModel, x) -> tuple[np.ndarray, bool]:

    x = np.asarray(x, float)
    single = x.ndim == 1
    x = np.atleast_2d(x)

    if x.shape[1] != model.n_features and model.support.size:

        raise ValueError(
            f'Dimension mismatch: model has {model.n_features} features, '
            f'query has {x.shape[1]}.',
        )

    return x, single


def _decision(
        model: SvrModel | SvmModel,
        x: np.ndarray,
        weights: np.ndarray,
) -> np.ndarray:

    if not model.support.size:

        return np.full(x.shape[0], model.bias)

    return weights @ kernel_matrix(model.kernel, model.support, x) + model.bias


def svr_predict(model: SvrModel, x) -> float | np.ndarray:
    """
    Regression value ``sum_j coef_j K(x_j, x) + bias``.

    Returns:
        A float for a single feature vector, an array for a matrix.
    """

    x, single = _query(model, x)
    values = _decision(model, x, model.coef)

    return float(values[0]) if single else values


def train_svm(
        u,
        v,
        C: float = 2000.0,
        spec: KernelSpec | None = None,
        tol: float = 1e-3,
        max_updates: int = 10_000_000,
) -> SvmModel:
    """
    Train a C support vector classifier by SMO.

    Args:
        u:
            Samples by features matrix.
        v:
            Labels, -1 or +1; both must be present.
        C:
            Box bound of the dual coefficients.
        spec:
            Kernel; RBF with width ``1 / q`` by default.
        tol:
            Maximal KKT violation at termination.
        max_updates:
            Pair update limit.

    Raises:
        ValueError: If only one class is present.
        SolverError: If SMO does not converge.
    """

    u = _training_data(u, 'u')
    v = np.asarray(v, float).ravel()
    n = u.shape[0]
    spec = spec or KernelSpec(sigma = 1.0 / u.shape[1])

    if v.size != n:

        raise ValueError(f'{n} samples but {v.size} labels.')

    if not np.all(np.isin(v, (-1.0, 1.0))):

        raise ValueError('Labels must be -1 or +1.')

    if n < 2 or np.unique(v).size < 2:

        raise ValueError('Both classes must be present to train a classifier.')

    if not C > 0:

        raise ValueError(f'Penalty must be positive, got {C}.')

    cols = KernelColumns(spec, u)
    res = smo_solve(
        column = cols.__getitem__,
        diagonal = cols.diagonal(),
        z = v,
        p = -np.ones(n),
        upper = C,
        tol = tol,
        max_updates = max_updates,
    )
    beta = v * res.beta
    sv = beta > 0

    return SvmModel(
        support = u[sv].copy(),
        labels = v[sv],
        beta = beta[sv],
        bias = res.bias,
        kernel = spec,
        C = float(C),
        objective = res.objective,
    )


def svm_predict(model: SvmModel, u) -> tuple:
    """
    Label and decision value ``sum_j v_j beta_j K(u_j, u) + bias``.

    A decision value of exactly zero is labelled +1 (attacked).

    Returns:
        Label and decision value; floats for a single feature vector,
        arrays for a matrix.
    """

    u, single = _query(model, u)
    values = _decision(model, u, model.labels * model.beta)
    labels = np.where(values >= 0, 1, -1)

    if single:

        return int(labels[0]), float(values[0])

    return labels, values


def save_model(
        path: str | pl.Path,
        model: SvrModel | SvmModel,
        **provenance,
) -> None:
    """
    Write a model archive (JSON) with provenance fields such as
    `config_hash` and `seed`.
    """

    _misc.write_json(path, {**model.to_dict(), **provenance})


def load_model(path: str | pl.Path) -> SvrModel | SvmModel:

    doc = _misc.read_json(path)
    cls = {'svr': SvrModel, 'svm': SvmModel}.get(doc.get('type'))

    if cls is None:

        raise ValueError(f'Not a model archive: `{path}`.')

    return cls.from_dict(doc)
