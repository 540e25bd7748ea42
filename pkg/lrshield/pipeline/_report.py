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
Evaluation report and its plot-ready tables.
"""

from __future__ import annotations

from collections.abc import Sequence
import dataclasses
import pathlib as pl

import pandas as pd

from .. import _misc
from ..grid import NetworkModel
from ..attack import AttackScenario
from ._detector import DetectionStats, TAU_BUCKETS
from ._predictor import LoadErrors

__all__ = [
    'EvalReport',
    'TABLES',
    'cm_lo_table',
    'detection_table',
    'has_consequence',
    'predictor_table',
    'read_table',
    'write_table',
]

# Table name -> file name.
TABLES = {
    'predictor': 'fig2_rmse_mape.csv',
    'sweep': 'fig3_sweep.csv',
    'detection': 'fig4_detection.csv',
    'cm_lo': 'fig5_cm_lo.csv',
    'mitigation': 'fig6_mitigation.csv',
}


def write_table(
        path: str | pl.Path,
        frame: pd.DataFrame,
        **provenance,
) -> None:

    with _misc.atomic_write(path) as fp:

        fp.write(_misc.csv_header(provenance))
        frame.to_csv(fp, index = False, lineterminator = '\n')


def read_table(path: str | pl.Path) -> pd.DataFrame:

    return pd.read_csv(path, comment = '#')


def has_consequence(
        net: NetworkModel,
        scenario: AttackScenario,
        cost_threshold: float = 0.01,
        overflow_threshold: float = 1.0,
) -> bool:
    """
    Whether an optimized attack has a consequence.

    A cost maximization attack has one if it raises the operating cost by
    more than `cost_threshold` of the attack-free cost; a line overflow
    attack if the physical flow of its target line exceeds
    `overflow_threshold` times the rating, strictly.
    """

    if scenario.objective is None:

        return False

    if scenario.kind == 'cm':

        base = scenario.baseline or 0.0

        return scenario.objective - base > cost_threshold * abs(base)

    if scenario.kind == 'lo':

        rating = net.ratings[scenario.target_line]

        return scenario.objective > overflow_threshold * rating

    return False


def predictor_table(
        loads: Sequence,
        buses: Sequence[int],
        train: LoadErrors,
        test: LoadErrors,
) -> pd.DataFrame:

    return pd.DataFrame({
        'load': list(loads),
        'bus': list(buses),
        'rmse_train': train.rmse,
        'mape_train': train.mape,
        'rmse_test': test.rmse,
        'mape_test': test.mape,
    })


def cm_lo_table(
        all_attacks: DetectionStats,
        with_consequence: DetectionStats,
) -> pd.DataFrame:
    """
    Detection of optimized attacks, on all and on consequential ones.
    """

    frames = []

    for name, stats in (
        ('all', all_attacks),
        ('consequence', with_consequence),
    ):

        table = stats.detection
        table = table[table['kind'].isin(('cm', 'lo'))].copy()
        table.insert(1, 'filter', name)
        frames.append(table)

    return (
        pd.concat(frames, ignore_index = True)
        .sort_values(['kind', 'filter', 'tau_pct'], kind = 'mergesort')
        .reset_index(drop = True)
    )


def detection_table(stats: DetectionStats) -> pd.DataFrame:
    """
    Random attack detection over every bucket, empty ones as NaN.
    """

    table = stats.detection
    table = table[table['kind'] == 'random'].set_index('tau_pct')
    table = table.reindex(list(TAU_BUCKETS))
    table['n'] = table['n'].fillna(0).astype(int)
    table['kind'] = 'random'

    return table.reset_index()


@dataclasses.dataclass
class EvalReport:
    """
    Everything the evaluation produces.

    Attrs:
        tables:
            Table name (a key of `TABLES`) to data frame.
        summary:
            Headline figures: false alarm rates, detector parameters,
            scenario and discard counts.
    """

    tables: dict[str, pd.DataFrame] = dataclasses.field(default_factory = dict)
    summary: dict = dataclasses.field(default_factory = dict)


    def to_dict(self) -> dict:

        return {
            'summary': self.summary,
            'tables': {
                name: _records(frame)
                for name, frame in sorted(self.tables.items())
            },
        }


    def write(self, out_dir: str | pl.Path, **provenance) -> list[pl.Path]:
        """
        Write every table as CSV and the report as `report.json`.

        Returns:
            The written paths.
        """

        out_dir = pl.Path(out_dir)
        paths = []

        for name, frame in sorted(self.tables.items()):

            path = out_dir / TABLES[name]
            write_table(path, frame, **provenance)
            paths.append(path)

        path = out_dir / 'report.json'
        _misc.write_json(path, {**self.to_dict(), **provenance})
        paths.append(path)

        return paths


def _records(frame: pd.DataFrame) -> list[dict]:

    frame = frame.astype(object).where(frame.notna(), None)

    return frame.to_dict(orient = 'records')
