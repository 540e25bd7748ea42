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
Batch generation of attack scenarios over a load series.
"""

from __future__ import annotations

from typing import Any
from collections.abc import Iterable
import dataclasses
import concurrent.futures

import numpy as np
import pandas as pd

from .. import _log, _context
from .._errors import AttackError, InfeasibleSpecError
from ._random import random_lr_attack
from .._config import AttacksConfig
from ._bilevel import BilevelOptions, cm_attack, lo_attack
from ._scenario import AttackScenario
from ..grid import NetworkModel
from ..dispatch import critical_hour_lines

__all__ = [
    'BatchResult',
    'attack_tasks',
    'batch_generate',
]


@dataclasses.dataclass
class BatchResult:
    """
    Scenarios of a batch and the attempts that were given up.

    Attrs:
        scenarios:
            Valid scenarios, in task order.
        discards:
            One record per failed task: hour, kind, tau, line, reason and
            message.
    """

    scenarios: list[AttackScenario]
    discards: list[dict]


    def counts(self) -> dict[str, int]:

        counts = {}

        for sc in self.scenarios:

            counts[sc.kind] = counts.get(sc.kind, 0) + 1

        return counts


@dataclasses.dataclass(frozen = True)
class _Task:

    kind: str
    hour: Any
    p: np.ndarray
    tau: float | None = None
    line: int | None = None
    k: int | None = None
    seed: np.random.SeedSequence | None = None


def _subsample(items: list, limit: int) -> list:

    if not limit or len(items) <= limit:

        return items

    idx = np.linspace(0, len(items) - 1, limit).round().astype(int)

    return [items[i] for i in idx]


def attack_tasks(
        net: NetworkModel,
        series: pd.DataFrame,
        config: AttacksConfig,
        seed: int,
        kinds: Iterable[str] = ('random', 'cm', 'lo'),
        critical: dict | None = None,
) -> list[_Task]:
    """
    The attack tasks of a batch, in a fixed order.

    Random tasks come first, each with its own child seed. Bi-level tasks
    follow, hour by hour: the cost maximization grid, then the line
    overflow grid of each critical line.
    """

    kinds = set(kinds)
    tasks = []

    if 'random' in kinds and config.n_random:

        children = np.random.SeedSequence(seed).spawn(config.n_random)
        values = series.to_numpy(float)
        hours = list(series.index)
        k_max = config.k_max or net.n_l
        taus = config.random_taus

        for child in children:

            draw_seed, attack_seed = child.spawn(2)
            rng = np.random.default_rng(draw_seed)
            row = int(rng.integers(len(hours)))
            tasks.append(_Task(
                kind = 'random',
                hour = hours[row],
                p = values[row],
                k = int(rng.integers(config.k_min, k_max + 1)),
                tau = taus[int(rng.integers(len(taus)))],
                seed = attack_seed,
            ))

    if not kinds & {'cm', 'lo'}:

        return tasks

    if critical is None:

        critical = critical_hour_lines(
            net,
            series,
            frac = config.critical_frac,
            min_lines = config.critical_min_lines,
        )

    selected = _subsample(list(critical), config.max_critical_hours)

    for hour in selected:

        p = series.loc[hour].to_numpy(float)

        if 'cm' in kinds and config.cm:

            tasks.extend(
                _Task(kind = 'cm', hour = hour, p = p, tau = tau)
                for tau in config.tau_grid
            )

        if 'lo' in kinds and config.lo:

            lines = list(critical[hour])

            if config.max_lines_per_hour:

                lines = lines[:config.max_lines_per_hour]

            tasks.extend(
                _Task(kind = 'lo', hour = hour, p = p, tau = tau, line = line)
                for line in lines
                for tau in config.tau_grid
            )

    return tasks


def _random_task(task: _Task, config: AttacksConfig) -> AttackScenario:

    rng = np.random.default_rng(task.seed)

    for retry in range(config.max_retries + 1):

        try:

            sc = random_lr_attack(
                task.p,
                task.k,
                task.tau,
                rng,
                max_redraws = config.max_redraws,
                hour = task.hour,
            )

            return dataclasses.replace(sc, retries = retry)

        except InfeasibleSpecError:

            continue

    raise AttackError(
        f'No feasible covariance for k={task.k} after {config.max_retries} '
        'load set retries.',
        reason = 'infeasible_spec',
    )


def _run_task(
        task: _Task,
        net: NetworkModel,
        config: AttacksConfig,
) -> AttackScenario | dict:

    options = BilevelOptions(gap = config.gap, node_limit = config.node_limit)
    label = f'{task.kind}:{task.hour}'

    if task.line is not None:

        label += f':{task.line}'

    with _context.labelled(label):

        try:

            if task.kind == 'random':

                sc = _random_task(task, config)

            elif task.kind == 'cm':

                sc = cm_attack(
                    net, task.p, task.tau,
                    options = options,
                    hour = task.hour,
                )

            else:

                sc = lo_attack(
                    net, task.p, task.tau, task.line,
                    options = options,
                    hour = task.hour,
                )

            if not sc.delta_p.any():

                raise AttackError(
                    'Attack leaves every load unchanged.',
                    reason = 'zero_attack',
                )

            sc.check()

            return sc

        except AttackError as e:

            _log(f'Attack discarded ({e.reason}): {e}', level = 2)

            return {
                'hour': task.hour,
                'kind': task.kind,
                'tau': task.tau,
                'line': task.line,
                'reason': e.reason,
                'message': str(e),
            }


def _run_chunk(
        tasks: list[_Task],
        net: NetworkModel,
        config: AttacksConfig,
) -> list:

    return [_run_task(task, net, config) for task in tasks]


def batch_generate(
        net: NetworkModel,
        series: pd.DataFrame,
        config: AttacksConfig,
        seed: int,
        jobs: int = 1,
        kinds: Iterable[str] = ('random', 'cm', 'lo'),
        critical: dict | None = None,
) -> BatchResult:
    """
    Generate random, cost maximization and line overflow attacks.

    Every random attack has its own seed, spawned from `seed`, so the
    result does not depend on `jobs`. Failed attempts are logged and kept
    as discard records.

    Args:
        net:
            The network.
        series:
            Hourly true loads, one column per load in load order.
        config:
            Attack settings.
        seed:
            Master seed.
        jobs:
            Worker processes; 1 runs in this process.
        kinds:
            Attack kinds to generate.
        critical:
            Precomputed critical hours with their critical lines.
    """

    tasks = attack_tasks(net, series, config, seed, kinds, critical)
    _log(f'Generating {len(tasks)} attack scenarios with {jobs} job(s).')

    if jobs > 1 and len(tasks) > 1:

        chunks = np.array_split(np.arange(len(tasks)), jobs * 4)

        with concurrent.futures.ProcessPoolExecutor(jobs) as pool:

            futures = [
                pool.submit(
                    _run_chunk,
                    [tasks[i] for i in chunk],
                    net,
                    config,
                )
                for chunk in chunks
                if chunk.size
            ]
            outcomes = [o for f in futures for o in f.result()]

    else:

        outcomes = [_run_task(task, net, config) for task in tasks]

    scenarios = [o for o in outcomes if isinstance(o, AttackScenario)]
    discards = [o for o in outcomes if isinstance(o, dict)]
    result = BatchResult(scenarios = scenarios, discards = discards)
    _log(
        f'Attack batch: {result.counts()} scenarios, '
        f'{len(discards)} discarded.',
    )

    return result
