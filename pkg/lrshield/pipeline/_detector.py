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
Attack detector samples, training, evaluation and parameter sweeps.
"""

from __future__ import annotations

from typing import Any
from collections.abc import Sequence
import math
import itertools
import dataclasses
import concurrent.futures

import numpy as np
import pandas as pd

from .. import _log, _context
from ..svm import SvmModel, KernelSpec, train_svm, svm_predict
from ..loads import time_features
from ..attack import AttackScenario

__all__ = [
    'DetectorSample',
    'DetectorSet',
    'DetectionStats',
    'TAU_BUCKETS',
    'build_detector_samples',
    'detect',
    'evaluate_detector',
    'split_detector_samples',
    'sweep_hyperparameters',
    'tau_bucket',
    'train_detector',
]

# Load shift buckets, percent.
TAU_BUCKETS = tuple(range(1, 21))

NORMAL = 'normal'


def tau_bucket(kind: str, tau_real: float, tau_requested: float) -> int:
    """
    Load shift bucket of an attack, percent.

    Random attacks go by their realized shift, rounded up; the optimized
    attacks by the shift they were generated for.
    """

    if kind == 'random':

        return max(1, math.ceil(tau_real * 100 - 1e-9))

    return int(round(tau_requested * 100))


@dataclasses.dataclass(frozen = True)
class DetectorSample:
    """
    Attrs:
        u:
            ``[mo, wd, hr, predicted loads, observed loads]``.
        v:
            -1 normal, +1 attacked.
        hour:
            Hour the observation belongs to.
        kind:
            `normal` or the attack kind.
        tau_real:
            Realized load shift (attacked only).
        tau_requested:
            Requested load shift (attacked only).
    """

    u: np.ndarray
    v: int
    hour: Any
    kind: str = NORMAL
    tau_real: float | None = None
    tau_requested: float | None = None


@dataclasses.dataclass(frozen = True)
class DetectorSet:
    """
    Detector samples as arrays.

    Rows are the normal samples, one per hour, followed by one attacked
    sample per scenario, in scenario order.

    Attrs:
        U:
            Samples by features.
        v:
            Labels.
        hours:
            Hour of each sample.
        kind:
            `normal` or the attack kind of each sample.
        tau_real, tau_requested:
            Load shifts; zero for normal samples.
        bucket:
            Load shift bucket in percent; zero for normal samples.
        target_line:
            Target line of line overflow attacks, else -1.
    """

    U: np.ndarray
    v: np.ndarray
    hours: np.ndarray
    kind: np.ndarray
    tau_real: np.ndarray
    tau_requested: np.ndarray
    bucket: np.ndarray
    target_line: np.ndarray


    def __len__(self) -> int:

        return self.v.size


    def __getitem__(self, i: int) -> DetectorSample:

        attacked = self.v[i] == 1

        return DetectorSample(
            u = self.U[i],
            v = int(self.v[i]),
            hour = self.hours[i],
            kind = str(self.kind[i]),
            tau_real = float(self.tau_real[i]) if attacked else None,
            tau_requested = float(self.tau_requested[i]) if attacked else None,
        )


    @property
    def normal(self) -> np.ndarray:

        return np.flatnonzero(self.v == -1)


    @property
    def q(self) -> int:

        return self.U.shape[1]


    def of_kind(self, kind: str) -> np.ndarray:

        return np.flatnonzero(self.kind == kind)


def build_detector_samples(
        hours: Sequence,
        p_true,
        p_hat,
        scenarios: Sequence[AttackScenario] = (),
) -> DetectorSet:
    """
    Normal samples for every hour and attacked samples for every scenario.

    An attacked sample has the time features and predictions of its hour
    and the falsified loads in place of the observed ones.

    Args:
        hours:
            Hours of the predictions.
        p_true:
            True loads, hours by loads (MW).
        p_hat:
            Predicted loads, hours by loads (MW).
        scenarios:
            Attack scenarios on these hours.

    Raises:
        ValueError: If a scenario hour has no prediction.
    """

    hours = pd.DatetimeIndex(hours)
    p_true = np.asarray(p_true, float)
    p_hat = np.asarray(p_hat, float)

    if p_true.shape != p_hat.shape or p_true.shape[0] != len(hours):

        raise ValueError(
            f'{len(hours)} hours, true loads {p_true.shape}, '
            f'predictions {p_hat.shape}.',
        )

    position = {h: i for i, h in enumerate(hours)}
    rows = []

    for sc in scenarios:

        row = position.get(pd.Timestamp(sc.hour))

        if row is None:

            raise ValueError(f'No prediction for scenario hour {sc.hour}.')

        rows.append(row)

    rows = np.array(rows, dtype = int)
    t = time_features(hours)
    normal = np.hstack([t, p_hat, p_true])
    p_atk = np.array([sc.p_atk for sc in scenarios], float)
    attacked = np.hstack([
        t[rows],
        p_hat[rows],
        p_atk.reshape(rows.size, p_true.shape[1]),
    ])
    n, k = len(hours), len(scenarios)
    tau_real = np.array([sc.tau_real for sc in scenarios], float)
    tau_req = np.array([sc.tau_requested for sc in scenarios], float)

    _log(
        f'Detector samples: {n} normal, {k} attacked, '
        f'{normal.shape[1]} features.',
    )

    return DetectorSet(
        U = np.vstack([normal, attacked]),
        v = np.concatenate([-np.ones(n, int), np.ones(k, int)]),
        hours = np.concatenate([
            np.asarray(hours, dtype = object),
            np.asarray(hours[rows], dtype = object),
        ]),
        kind = np.array(
            [NORMAL] * n + [sc.kind for sc in scenarios],
            dtype = object,
        ),
        tau_real = np.concatenate([np.zeros(n), tau_real]),
        tau_requested = np.concatenate([np.zeros(n), tau_req]),
        bucket = np.array(
            [0] * n + [
                tau_bucket(sc.kind, sc.tau_real, sc.tau_requested)
                for sc in scenarios
            ],
            dtype = int,
        ),
        target_line = np.array(
            [-1] * n + [
                -1 if sc.target_line is None else sc.target_line
                for sc in scenarios
            ],
            dtype = int,
        ),
    )


def split_detector_samples(
        samples: DetectorSet,
        train_fraction: float = 0.8,
        seed: int | np.random.SeedSequence = 0,
) -> tuple[np.ndarray, np.ndarray]:
    """
    Random train and test rows.

    Normal samples and random attacks are split at `train_fraction`, the
    attacks separately within each load shift bucket. Optimized attacks
    are test rows only.

    Returns:
        Sorted train and test row indices.
    """

    if not 0 < train_fraction < 1:

        raise ValueError(
            f'Train fraction must be in (0, 1): {train_fraction}.',
        )

    rng = np.random.default_rng(seed)
    groups = [samples.normal] + [
        np.flatnonzero((samples.kind == 'random') & (samples.bucket == b))
        for b in np.unique(samples.bucket[samples.of_kind('random')])
    ]
    train = []

    for rows in groups:

        n_train = int(round(train_fraction * rows.size))
        train.append(rng.permutation(rows)[:n_train])

    train = np.sort(np.concatenate(train)).astype(int)
    test = np.setdiff1d(np.arange(len(samples)), train)

    return train, test


def _scale(u: np.ndarray, scaling: dict | None) -> np.ndarray:

    if not scaling:

        return u

    mean = np.asarray(scaling['mean'], float)
    std = np.asarray(scaling['std'], float)

    return (u - mean) / std


def detect(model: SvmModel, u) -> tuple[np.ndarray, np.ndarray]:
    """
    Labels and decision values of raw detector features.
    """

    u = np.atleast_2d(np.asarray(u, float))
    labels, values = svm_predict(model, _scale(u, model.scaling))

    return np.asarray(labels), np.asarray(values)


def _training_subset(
        samples: DetectorSet,
        train: np.ndarray,
        tau_min: float,
        max_normal: int,
        rng: np.random.Generator,
) -> np.ndarray:

    train = np.asarray(train, int)
    normal = train[samples.v[train] == -1]
    attacked = train[
        (samples.v[train] == 1) &
        (samples.tau_real[train] >= tau_min - 1e-12)
    ]

    if max_normal and normal.size > max_normal:

        normal = np.sort(rng.choice(normal, max_normal, replace = False))

    if not attacked.size:

        raise ValueError(
            f'No attacked training sample with load shift >= {tau_min}.',
        )

    if not normal.size:

        raise ValueError('No normal training sample.')

    return np.concatenate([normal, attacked])


def train_detector(
        samples: DetectorSet,
        train: np.ndarray,
        C: float = 2000.0,
        tau_min: float = 0.03,
        sigma: float = 0.0,
        tol: float = 1e-3,
        max_normal: int = 0,
        seed: int | np.random.SeedSequence = 0,
) -> SvmModel:
    """
    Train the attack detector.

    Attacked training samples below the minimum load shift are left out.
    Features are standardized with the statistics of the remaining
    training rows, which are stored with the model.

    Args:
        samples:
            All detector samples.
        train:
            Training rows.
        C:
            Outlier penalty.
        tau_min:
            Minimum realized load shift of attacked training samples.
        sigma:
            RBF width; ``1 / q`` if zero.
        tol:
            SMO stopping tolerance.
        max_normal:
            If nonzero, a random subset of this many normal training rows.
        seed:
            Seed of the normal subset.

    Raises:
        ValueError: If filtering leaves a class empty.
    """

    rng = np.random.default_rng(seed)
    rows = _training_subset(samples, train, tau_min, max_normal, rng)
    u = samples.U[rows]
    mean = u.mean(axis = 0)
    std = u.std(axis = 0)
    std = np.where(std == 0, 1.0, std)
    spec = KernelSpec(kind = 'rbf', sigma = sigma or 1.0 / samples.q)

    _log(
        f'Training detector on {rows.size} samples '
        f'({int((samples.v[rows] == 1).sum())} attacked), '
        f'C={C:g}, tau_min={tau_min:g}.',
    )
    model = train_svm(
        (u - mean) / std,
        samples.v[rows],
        C = C,
        spec = spec,
        tol = tol,
    )

    return dataclasses.replace(model, scaling = {'mean': mean, 'std': std})


@dataclasses.dataclass(frozen = True)
class DetectionStats:
    """
    Detector performance.

    Attrs:
        false_alarm:
            Fraction of all normal samples labelled attacked.
        false_alarm_test:
            The same over the normal test samples.
        detection:
            One row per attack kind and load shift bucket with the sample
            count, detections, detection probability and missed detection
            rate; empty buckets have no row.
    """

    false_alarm: float
    false_alarm_test: float
    detection: pd.DataFrame


    def probability(self, kind: str = 'random') -> pd.Series:
        """
        Detection probability per bucket, NaN where a bucket is empty.
        """

        table = self.detection[self.detection['kind'] == kind]
        prob = table.set_index('tau_pct')['probability']

        return prob.reindex(TAU_BUCKETS)


def _detection_table(
        samples: DetectorSet,
        rows: np.ndarray,
        labels: np.ndarray,
) -> pd.DataFrame:

    frame = pd.DataFrame({
        'kind': samples.kind[rows].astype(str),
        'tau_pct': samples.bucket[rows],
        'detected': labels == 1,
    })
    table = (
        frame.groupby(['kind', 'tau_pct'], sort = True)['detected']
        .agg(n = 'size', detected = 'sum')
        .reset_index()
    )
    table['detected'] = table['detected'].astype(int)
    table['probability'] = table['detected'] / table['n']
    table['missed'] = 1.0 - table['probability']

    return table


def evaluate_detector(
        model: SvmModel,
        samples: DetectorSet,
        test: np.ndarray | None = None,
) -> DetectionStats:
    """
    False alarm and per-bucket detection rates.

    Args:
        model:
            The detector.
        samples:
            All detector samples.
        test:
            Test rows; attacks are evaluated on these only. Every row if
            not given.
    """

    test = np.arange(len(samples)) if test is None else np.asarray(test, int)
    normal = samples.normal
    attacked = test[samples.v[test] == 1]
    labels_normal, _ = detect(model, samples.U[normal])
    labels_attacked, _ = (
        detect(model, samples.U[attacked])
            if attacked.size else
        (np.zeros(0, int), None)
    )
    in_test = np.isin(normal, test)
    false_alarm = float(np.mean(labels_normal == 1)) if normal.size else 0.0
    false_alarm_test = (
        float(np.mean(labels_normal[in_test] == 1))
            if in_test.any() else
        float('nan')
    )

    return DetectionStats(
        false_alarm = false_alarm,
        false_alarm_test = false_alarm_test,
        detection = _detection_table(samples, attacked, labels_attacked),
    )


def _sweep_cell(
        samples: DetectorSet,
        train: np.ndarray,
        test: np.ndarray,
        C: float,
        tau_min: float,
        sigma: float,
        tol: float,
        max_normal: int,
        seed: Any,
) -> dict:

    row = {'C': float(C), 'tau_min': float(tau_min), 'error': ''}

    with _context.labelled(f'C={C:g},tau_min={tau_min:g}'):

        try:

            model = train_detector(
                samples, train,
                C = C,
                tau_min = tau_min,
                sigma = sigma,
                tol = tol,
                max_normal = max_normal,
                seed = seed,
            )
            rng = np.random.default_rng(seed)
            fit_rows = _training_subset(
                samples, train, tau_min, max_normal, rng,
            )
            labels, _ = detect(model, samples.U[fit_rows])
            stats = evaluate_detector(model, samples, test)

        except Exception as e:

            _log(f'Sweep cell failed: {e}', level = 0)
            row['error'] = f'{type(e).__name__}: {e}'

            return row

    row['train_error'] = float(np.mean(labels != samples.v[fit_rows]))
    row['false_alarm'] = stats.false_alarm
    row['false_alarm_test'] = stats.false_alarm_test
    row['n_support'] = int(model.beta.size)
    prob = stats.probability('random')

    for b in TAU_BUCKETS:

        row[f'missed_{b}'] = 1.0 - prob[b]

    return row


def sweep_hyperparameters(
        samples: DetectorSet,
        train: np.ndarray,
        test: np.ndarray,
        C: Sequence[float] = (10, 100, 1000, 2000),
        tau_min: Sequence[float] = (0.01, 0.02, 0.03, 0.04, 0.05),
        sigma: float = 0.0,
        tol: float = 1e-3,
        max_normal: int = 0,
        seed: int | np.random.SeedSequence = 0,
        jobs: int = 1,
) -> pd.DataFrame:
    """
    Train and evaluate a detector for every pair of penalty and minimum
    training load shift.

    Returns:
        One row per grid point with the training error, false alarm rates,
        support vector count and missed detection rate per load shift
        bucket of random attacks. Failed cells keep their `error` message.
    """

    cells = [
        (samples, train, test, c, t, sigma, tol, max_normal, seed)
        for c, t in itertools.product(C, tau_min)
    ]
    _log(f'Sweeping {len(cells)} detector parameter pairs.')

    if jobs > 1 and len(cells) > 1:

        with concurrent.futures.ProcessPoolExecutor(jobs) as pool:

            rows = list(pool.map(_sweep_cell, *zip(*cells)))

    else:

        rows = [_sweep_cell(*cell) for cell in cells]

    return pd.DataFrame(rows)
