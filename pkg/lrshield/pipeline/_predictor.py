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
Multi-output load predictor: one support vector regression per load.
"""

from __future__ import annotations

import dataclasses
import concurrent.futures
import pathlib as pl

import numpy as np

from .. import _log, _misc, _context
from ..svm import SvrModel, KernelSpec, train_svr, svr_predict
from ..loads import FeatureDataset, feature_columns
from .._errors import SolverError

__all__ = [
    'LoadErrors',
    'PredictorBundle',
    'load_predictor',
    'metrics_rmse_mape',
    'predict_loads',
    'save_predictor',
    'train_predictor',
]


@dataclasses.dataclass(frozen = True)
class PredictorBundle:
    """
    The regression models of every load and their input convention.

    Attrs:
        models:
            One model per load, in load order.
        loads:
            Load labels.
        variant, s, d:
            Feature variant and lags the models were trained on.
        eps, penalty, sigma:
            Training parameters.
        scaling:
            Input and target statistics of the training rows.
    """

    models: tuple[SvrModel, ...]
    loads: tuple
    variant: int
    s: int
    d: int
    eps: float
    penalty: float
    sigma: float
    scaling: dict


    @property
    def n_l(self) -> int:

        return len(self.models)


    @property
    def n_f(self) -> int:

        return self.s + 1 + 2 * self.d


    def to_dict(self) -> dict:

        return {
            'type': 'predictor',
            'models': [m.to_dict() for m in self.models],
            'loads': list(self.loads),
            'variant': self.variant,
            's': self.s,
            'd': self.d,
            'eps': self.eps,
            'penalty': self.penalty,
            'sigma': self.sigma,
            'scaling': self.scaling,
        }


    @classmethod
    def from_dict(cls, doc: dict) -> PredictorBundle:

        return cls(
            models = tuple(SvrModel.from_dict(m) for m in doc['models']),
            loads = tuple(doc['loads']),
            variant = int(doc['variant']),
            s = int(doc['s']),
            d = int(doc['d']),
            eps = float(doc['eps']),
            penalty = float(doc['penalty']),
            sigma = float(doc['sigma']),
            scaling = {
                k: np.asarray(v, float)
                for k, v in doc['scaling'].items()
            },
        )


def _training_rows(ds: FeatureDataset, max_rows: int) -> np.ndarray:

    rows = np.asarray(ds.train)

    if max_rows and rows.size > max_rows:

        pick = np.linspace(0, rows.size - 1, max_rows).round().astype(int)
        rows = rows[pick]

    return rows


def _train_one(
        ds: FeatureDataset,
        rows: np.ndarray,
        load: int,
        eps: float,
        penalty: float,
        spec: KernelSpec,
        tol: float,
) -> SvrModel:

    label = ds.loads[load]

    with _context.labelled(f'load:{label}'):

        try:

            model = train_svr(
                ds.design(load, rows),
                ds.Y[rows, load],
                eps = eps,
                penalty = penalty,
                spec = spec,
                tol = tol,
            )

        except (SolverError, ValueError) as e:

            raise type(e)(f'Load {label}: {e}') from e

        _log(
            f'Load {label}: {model.coef.size} support vectors, '
            f'dual objective {model.objective:.6g}.',
            level = 2,
        )

        return model


def train_predictor(
        ds: FeatureDataset,
        eps: float = 0.01,
        penalty: float = 100.0,
        sigma: float = 0.01,
        tol: float = 1e-3,
        max_train_rows: int = 0,
        jobs: int = 1,
) -> PredictorBundle:
    """
    Train one regression per load on the standardized training rows.

    Args:
        ds:
            Standardized dataset with a train split.
        eps:
            Insensitive tube width, in scaled target units.
        penalty:
            Box bound of the dual coefficients.
        sigma:
            RBF kernel width.
        tol:
            SMO stopping tolerance.
        max_train_rows:
            If nonzero, train on this many evenly spaced training rows.
        jobs:
            Worker processes.

    Raises:
        SolverError: If a model does not converge; the message names the
            load.
    """

    if ds.scaling is None or ds.train is None:

        raise ValueError('The dataset must be standardized and split.')

    rows = _training_rows(ds, max_train_rows)
    spec = KernelSpec(kind = 'rbf', sigma = sigma)
    _log(
        f'Training {ds.n_l} load predictors on {rows.size} rows '
        f'of {ds.p} features.',
    )
    args = [(ds, rows, i, eps, penalty, spec, tol) for i in range(ds.n_l)]

    if jobs > 1 and ds.n_l > 1:

        with concurrent.futures.ProcessPoolExecutor(jobs) as pool:

            models = list(pool.map(_train_one, *zip(*args)))

    else:

        models = [_train_one(*a) for a in args]

    return PredictorBundle(
        models = tuple(models),
        loads = ds.loads,
        variant = ds.variant,
        s = ds.s,
        d = ds.d,
        eps = float(eps),
        penalty = float(penalty),
        sigma = float(sigma),
        scaling = ds.scaling,
    )


def predict_loads(bundle: PredictorBundle, x_rows) -> np.ndarray:
    """
    Predicted loads in MW.

    Args:
        bundle:
            The trained predictor.
        x_rows:
            Feature rows with every load's lags, standardized with the
            bundle's statistics.

    Returns:
        Rows by loads.
    """

    x_rows = np.atleast_2d(np.asarray(x_rows, float))
    width = 3 + bundle.n_l * bundle.n_f

    if x_rows.shape[1] != width:

        raise ValueError(
            f'Feature rows have {x_rows.shape[1]} columns, '
            f'the predictor expects {width}.',
        )

    if np.size(bundle.scaling['x_mean']) != width:

        raise ValueError('Scaling statistics do not match the predictor.')

    cols = lambda i: feature_columns(
        bundle.variant,
        bundle.n_l,
        bundle.n_f,
        i,
    )
    scaled = np.column_stack([
        svr_predict(model, x_rows[:, cols(i)])
        for i, model in enumerate(bundle.models)
    ])

    return scaled * bundle.scaling['y_std'] + bundle.scaling['y_mean']


@dataclasses.dataclass(frozen = True)
class LoadErrors:
    """
    Per-load prediction errors.

    Attrs:
        rmse:
            Root mean square error (MW).
        mape:
            Mean absolute percentage error, as a fraction.
        excluded:
            Rows left out of the MAPE for a zero true value.
    """

    rmse: np.ndarray
    mape: np.ndarray
    excluded: np.ndarray


def metrics_rmse_mape(y, y_hat) -> LoadErrors:

    y = np.atleast_2d(np.asarray(y, float))
    y_hat = np.atleast_2d(np.asarray(y_hat, float))

    if y.shape != y_hat.shape:

        raise ValueError(f'Shapes differ: {y.shape} and {y_hat.shape}.')

    err = y_hat - y
    rmse = np.sqrt(np.mean(err ** 2, axis = 0))
    nonzero = y != 0
    excluded = (~nonzero).sum(axis = 0)

    if excluded.any():

        _log(
            f'MAPE excludes {int(excluded.sum())} zero-valued row(s).',
            level = 0,
        )

    with np.errstate(divide = 'ignore', invalid = 'ignore'):

        rel = np.where(nonzero, np.abs(err / np.where(nonzero, y, 1)), 0)
        mape = rel.sum(axis = 0) / nonzero.sum(axis = 0)

    return LoadErrors(rmse = rmse, mape = mape, excluded = excluded)


def save_predictor(
        path: str | pl.Path,
        bundle: PredictorBundle,
        **provenance,
) -> None:

    _misc.write_json(path, {**bundle.to_dict(), **provenance})


def load_predictor(path: str | pl.Path) -> PredictorBundle:

    doc = _misc.read_json(path)

    if doc.get('type') != 'predictor':

        raise ValueError(f'Not a predictor archive: `{path}`.')

    return PredictorBundle.from_dict(doc)
