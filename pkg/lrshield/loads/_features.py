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
Feature and target matrices of the load predictor.

A sample at hour `h` has the time features ``[mo, wd, hr]`` of `h`, then
for each load the lagged values::

    P[h], P[h-1], .., P[h-s],
    P[h-24d], P[h-24d+1], .., P[h-24], P[h-23]

and the loads of hour ``h + 1`` as targets. Lags count elapsed hours of
the normalized series.
"""

from __future__ import annotations

import dataclasses
import pathlib as pl

import numpy as np
import pandas as pd

from .. import _log, _misc
from .._config import VARIANT_LAGS
from .._errors import LoadDataError

__all__ = [
    'FeatureDataset',
    'build_features',
    'chronological_split',
    'feature_columns',
    'lag_offsets',
    'load_features',
    'save_features',
    'standardize',
    'time_features',
    'unstandardize',
]

TIME_COLUMNS = ('mo', 'wd', 'hr')
_SIDECAR = 'features.json'


@dataclasses.dataclass(frozen = True)
class FeatureDataset:
    """
    Predictor inputs and targets.

    Attrs:
        X:
            Samples by features: the time features, then one block of
            ``n_f`` lag features per load.
        Y:
            Samples by loads: the loads of the next hour.
        hours:
            Hour of each sample.
        target_hours:
            Hour of each target, the hour after the sample.
        loads:
            Load labels, in column order.
        variant:
            1 for per-load inputs (time features and the load's own
            lags), 2 or 3 for inputs with the lags of every load.
        s:
            Current-day lags.
        d:
            Previous days.
        scaling:
            Training statistics if standardized: `x_mean`, `x_std`,
            `y_mean` and `y_std`.
        train, test:
            Row indices of the split, if any.
    """

    X: np.ndarray
    Y: np.ndarray
    hours: pd.DatetimeIndex
    target_hours: pd.DatetimeIndex
    loads: tuple
    variant: int
    s: int
    d: int
    scaling: dict | None = None
    train: np.ndarray | None = None
    test: np.ndarray | None = None


    @property
    def m(self) -> int:

        return self.X.shape[0]


    @property
    def n_l(self) -> int:

        return len(self.loads)


    @property
    def n_f(self) -> int:

        return self.s + 1 + 2 * self.d


    @property
    def p(self) -> int:
        """
        Input dimension of one load's model.
        """

        return len(TIME_COLUMNS) + self.n_f * (
            1 if self.variant == 1 else self.n_l
        )


    @property
    def columns(self) -> list[str]:

        offsets = lag_offsets(self.s, self.d)

        return list(TIME_COLUMNS) + [
            f'{load}:h-{off}' if off else f'{load}:h'
            for load in self.loads
            for off in offsets
        ]


    def feature_columns(self, load: int) -> np.ndarray:
        """
        Columns of `X` used by the model of the load at position `load`.
        """

        return feature_columns(self.variant, self.n_l, self.n_f, load)


    def design(self, load: int, rows = None) -> np.ndarray:

        x = self.X if rows is None else self.X[rows]

        return x[:, self.feature_columns(load)]


def feature_columns(
        variant: int,
        n_l: int,
        n_f: int,
        load: int,
) -> np.ndarray:
    """
    Input columns of one load's model in a matrix with every load's lags.
    """

    n_t = len(TIME_COLUMNS)

    if variant != 1:

        return np.arange(n_t + n_l * n_f)

    block = n_t + load * n_f + np.arange(n_f)

    return np.concatenate([np.arange(n_t), block])


def lag_offsets(s: int, d: int) -> np.ndarray:
    """
    Hours before the sample hour of each lag feature, in feature order.
    """

    daily = [o for j in range(d, 0, -1) for o in (24 * j, 24 * j - 1)]

    return np.array(list(range(s + 1)) + daily, dtype = int)


def time_features(index: pd.DatetimeIndex) -> np.ndarray:
    """
    Month (1-12), weekday flag (1 weekday, 2 weekend) and hour (0-23).
    """

    return np.column_stack([
        index.month,
        np.where(index.dayofweek >= 5, 2, 1),
        index.hour,
    ]).astype(float)


def build_features(
        series: pd.DataFrame,
        variant: int = 2,
        s: int | None = None,
        d: int | None = None,
) -> FeatureDataset:
    """
    Feature and target matrices of a normalized hourly load series.

    The first sample is the first hour with a complete lag history
    (``max(24 d, s)`` hours in); the last is the hour before the final one.

    Args:
        series:
            Normalized loads, one column per load.
        variant:
            Predictor variant, 1, 2 or 3.
        s, d:
            Lag parameters; the variant's defaults if not given.

    Raises:
        LoadDataError: If the series is too short for one sample.
    """

    if variant not in VARIANT_LAGS:

        raise ValueError(f'Unknown predictor variant: {variant}.')

    s_default, d_default = VARIANT_LAGS[variant]
    s = s_default if s is None else int(s)
    d = d_default if d is None else int(d)

    if s < 0 or d < 0:

        raise ValueError(f'Lags must be non-negative: s={s}, d={d}.')

    values = series.to_numpy(float)
    n_hours, n_l = values.shape
    warmup = max(24 * d, s)
    offsets = lag_offsets(s, d)

    if n_hours - 1 - warmup < 1:

        raise LoadDataError(
            f'Insufficient history: {n_hours} hours, '
            f'at least {warmup + 2} needed for s={s}, d={d}.',
        )

    h = np.arange(warmup, n_hours - 1)
    # samples x lags x loads, then one contiguous lag block per load
    lags = values[h[:, None] - offsets[None, :]]
    lags = lags.transpose(0, 2, 1).reshape(h.size, n_l * offsets.size)
    hours = pd.DatetimeIndex(series.index[h])
    X = np.hstack([time_features(hours), lags])
    Y = values[h + 1].copy()

    _log(
        f'Feature matrix: variant {variant}, s={s}, d={d}, '
        f'{X.shape[0]} samples, {X.shape[1]} columns.',
    )

    return FeatureDataset(
        X = X,
        Y = Y,
        hours = hours,
        target_hours = pd.DatetimeIndex(series.index[h + 1]),
        loads = tuple(series.columns),
        variant = variant,
        s = s,
        d = d,
    )


def chronological_split(
        ds: FeatureDataset,
        boundary: str | pd.Timestamp,
) -> tuple[np.ndarray, np.ndarray]:
    """
    Samples before `boundary` for training, the rest for testing.

    Raises:
        LoadDataError: If either side is empty.
    """

    boundary = pd.Timestamp(boundary)
    before = np.asarray(ds.hours < boundary)
    train = np.flatnonzero(before)
    test = np.flatnonzero(~before)

    if not train.size or not test.size:

        raise LoadDataError(
            f'Split at {boundary} leaves {train.size} training and '
            f'{test.size} test samples.',
        )

    return train, test


def _stats(a: np.ndarray, names: list) -> tuple[np.ndarray, np.ndarray]:

    mean = a.mean(axis = 0)
    std = a.std(axis = 0)
    flat = std == 0

    if flat.any():

        _log(
            'Constant training column(s) scaled with divisor 1: '
            f'{", ".join(str(names[i]) for i in np.flatnonzero(flat))}.',
            level = 0,
        )
        std = np.where(flat, 1.0, std)

    return mean, std


def standardize(
        ds: FeatureDataset,
        train: np.ndarray | None = None,
        test: np.ndarray | None = None,
) -> FeatureDataset:
    """
    Scale inputs and targets to zero mean and unit variance.

    Statistics come from the training rows and apply to every row.

    Args:
        ds:
            Unscaled dataset.
        train, test:
            Row indices; the split stored in `ds` by default.

    Raises:
        LoadDataError: If there are no training rows.
    """

    train = ds.train if train is None else np.asarray(train, int)
    test = ds.test if test is None else np.asarray(test, int)

    if ds.scaling is not None:

        raise ValueError('Dataset is already standardized.')

    if train is None or not len(train):

        raise LoadDataError('Empty training split.')

    x_mean, x_std = _stats(ds.X[train], ds.columns)
    y_mean, y_std = _stats(ds.Y[train], [f'{l}:target' for l in ds.loads])

    return dataclasses.replace(
        ds,
        X = (ds.X - x_mean) / x_std,
        Y = (ds.Y - y_mean) / y_std,
        scaling = {
            'x_mean': x_mean,
            'x_std': x_std,
            'y_mean': y_mean,
            'y_std': y_std,
        },
        train = train,
        test = test,
    )


def unstandardize(ds: FeatureDataset) -> FeatureDataset:

    if ds.scaling is None:

        return ds

    sc = ds.scaling

    return dataclasses.replace(
        ds,
        X = ds.X * sc['x_std'] + sc['x_mean'],
        Y = ds.Y * sc['y_std'] + sc['y_mean'],
        scaling = None,
    )


def save_features(
        directory: str | pl.Path,
        ds: FeatureDataset,
        **provenance,
) -> None:
    """
    Write `X.csv`, `Y.csv` and a JSON sidecar with the parameters, the
    split and the scaling statistics.
    """

    directory = pl.Path(directory)
    header = _misc.csv_header(provenance)
    x = pd.DataFrame(ds.X, index = ds.hours, columns = ds.columns)
    y = pd.DataFrame(ds.Y, index = ds.target_hours, columns = list(ds.loads))
    x.index.name = 'timestamp'
    y.index.name = 'target'

    for name, frame in (('X.csv', x), ('Y.csv', y)):

        with _misc.atomic_write(directory / name) as fp:

            fp.write(header)
            frame.to_csv(fp, lineterminator = '\n')

    _misc.write_json(
        directory / _SIDECAR,
        {
            **provenance,
            'variant': ds.variant,
            's': ds.s,
            'd': ds.d,
            'loads': list(ds.loads),
            'start': ds.hours[0],
            'end': ds.target_hours[-1],
            'scaling': ds.scaling,
            'train': ds.train,
            'test': ds.test,
        },
    )


def load_features(directory: str | pl.Path) -> FeatureDataset:

    directory = pl.Path(directory)
    meta = _misc.read_json(directory / _SIDECAR)
    read = lambda name: pd.read_csv(
        directory / name,
        comment = '#',
        index_col = 0,
        parse_dates = True,
    )
    x = read('X.csv')
    y = read('Y.csv')
    scaling = meta.get('scaling')
    split = {
        key: None if meta.get(key) is None else np.asarray(meta[key], int)
        for key in ('train', 'test')
    }

    return FeatureDataset(
        X = x.to_numpy(float),
        Y = y.to_numpy(float),
        hours = pd.DatetimeIndex(x.index),
        target_hours = pd.DatetimeIndex(y.index),
        loads = tuple(meta['loads']),
        variant = int(meta['variant']),
        s = int(meta['s']),
        d = int(meta['d']),
        scaling = (
            None
                if scaling is None else
            {k: np.asarray(v, float) for k, v in scaling.items()}
        ),
        **split,
    )
