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
Re-dispatch on predicted loads and the consequences it avoids.
"""

from __future__ import annotations

from typing import Any
from collections.abc import Iterable, Sequence
import dataclasses

import numpy as np
import pandas as pd

from .. import _log
from ..grid import NetworkModel
from ..attack import AttackScenario
from ..dispatch import solve_dcopf, evaluate_flows
from ._detector import tau_bucket

__all__ = [
    'MitigationRecord',
    'aggregate_mitigation',
    'mitigate',
]


@dataclasses.dataclass(frozen = True)
class MitigationRecord:
    """
    Consequences of one attack without and with the detection framework.

    Costs are in $/h and flows in MW; flows are physical, i.e. produced by
    the dispatch serving the true loads.

    Attrs:
        hour, kind, tau_requested, tau_pct, target_line:
            Identify the attack.
        detected:
            Detector verdict.
        status:
            `ok`, or the dispatch that was infeasible: `normal`, `attack`
            or `svr`.
        base_cost:
            Cost of the dispatch on the true loads.
        cost_increase_no, cost_increase_with:
            Cost increase over `base_cost` without and with the framework.
        flows_no, flows_with:
            Line flows without and with the framework.
        ratings:
            Line ratings.
    """

    hour: Any
    kind: str
    tau_requested: float
    tau_pct: int
    target_line: int | None
    detected: bool
    status: str = 'ok'
    base_cost: float = np.nan
    cost_increase_no: float = np.nan
    cost_increase_with: float = np.nan
    flows_no: np.ndarray | None = None
    flows_with: np.ndarray | None = None
    ratings: np.ndarray | None = None


    @property
    def ok(self) -> bool:

        return self.status == 'ok'


    def loading(self, framework: bool) -> float:
        """
        Physical loading of the target line, or of the most loaded line,
        as a fraction of its rating.
        """

        flows = self.flows_with if framework else self.flows_no

        if flows is None:

            return np.nan

        loading = np.abs(flows) / self.ratings

        if self.target_line is not None:

            return float(loading[self.target_line])

        return float(loading.max())


    def flow(self, framework: bool) -> float:

        flows = self.flows_with if framework else self.flows_no

        if flows is None:

            return np.nan

        line = (
            self.target_line
                if self.target_line is not None else
            int(np.argmax(np.abs(flows) / self.ratings))
        )

        return float(abs(flows[line]))


    def to_record(self) -> dict:

        rec = dataclasses.asdict(self)
        rec['hour'] = (
            self.hour.isoformat()
                if isinstance(self.hour, pd.Timestamp) else
            self.hour
        )

        return rec


    @classmethod
    def from_record(cls, rec: dict) -> MitigationRecord:

        rec = dict(rec)
        rec.pop('provenance', None)

        for key in ('flows_no', 'flows_with', 'ratings'):

            if rec.get(key) is not None:

                rec[key] = np.asarray(rec[key], float)

        if isinstance(rec.get('hour'), str):

            rec['hour'] = pd.Timestamp(rec['hour'])

        return cls(**rec)


def mitigate(
        net: NetworkModel,
        scenario: AttackScenario,
        p_true: Sequence[float],
        p_svr: Sequence[float],
        detected: bool,
) -> MitigationRecord:
    """
    Consequences of an attack with and without re-dispatch on predictions.

    Three dispatches are solved: on the true loads, on the falsified loads
    and on the predicted loads. Without the framework the operator always
    follows the falsified loads; with it, the predicted loads when the
    attack is detected.

    Returns:
        The record; an infeasible dispatch is recorded in `status`.
    """

    p_true = np.asarray(p_true, float)
    p_svr = np.asarray(p_svr, float)
    head = {
        'hour': scenario.hour,
        'kind': scenario.kind,
        'tau_requested': scenario.tau_requested,
        'tau_pct': tau_bucket(
            scenario.kind,
            scenario.tau_real,
            scenario.tau_requested,
        ),
        'target_line': scenario.target_line,
        'detected': bool(detected),
        'ratings': net.ratings,
    }
    solves = (
        ('normal', p_true),
        ('attack', p_true + scenario.delta_p),
        ('svr', p_svr),
    )
    dispatch = {}

    for name, loads in solves:

        dispatch[name] = solve_dcopf(net, loads)

        if not dispatch[name].optimal:

            _log(
                f'Mitigation of the {scenario.kind} attack at '
                f'{scenario.hour}: {name} dispatch '
                f'{dispatch[name].status}.',
                level = 0,
            )

            return MitigationRecord(status = name, **head)

    base = dispatch['normal'].cost
    costs = net.costs
    increase = {
        name: float(costs @ (dispatch[name].g - dispatch['normal'].g))
        for name in ('attack', 'svr')
    }
    flows = {
        name: evaluate_flows(net, dispatch[name].g, p_true)
        for name in ('attack', 'svr')
    }
    chosen = 'svr' if detected else 'attack'

    return MitigationRecord(
        base_cost = float(base),
        cost_increase_no = increase['attack'],
        cost_increase_with = increase[chosen],
        flows_no = flows['attack'],
        flows_with = flows[chosen],
        **head,
    )


def _percent_of_base(rec: MitigationRecord, increase: float) -> float:

    if rec.base_cost > 0:

        return 100 * increase / rec.base_cost

    _log(
        f'Attack-free cost of the {rec.kind} attack at {rec.hour} is '
        f'{rec.base_cost:g}; relative cost increase left undefined.',
        level = 1,
    )

    return np.nan


def aggregate_mitigation(
        records: Iterable[MitigationRecord],
        kind: str,
        buckets: Sequence[int] | None = None,
) -> pd.DataFrame:
    """
    Worst consequence per load shift, without and with the framework.

    For cost maximization attacks the consequence is the cost increase,
    for line overflow attacks the physical loading of the target line.
    The worst case with the framework is the maximum over the predicted
    load outcomes of detected attacks and the attack outcomes of missed
    ones.

    Args:
        records:
            Mitigation records; infeasible ones are skipped.
        kind:
            `cm` or `lo`.
        buckets:
            Load shift buckets (percent) to report; empty ones get NaN.

    Returns:
        One row per bucket with the number of records, the share detected
        and the worst consequences: relative and absolute cost increase
        for `cm`, loading and flow (MW) for `lo`.
    """

    rows = []

    for rec in records:

        if rec.kind != kind or not rec.ok:

            continue

        row = {'tau_pct': rec.tau_pct, 'detected': rec.detected}

        if kind == 'cm':

            row.update({
                'red_pct': _percent_of_base(rec, rec.cost_increase_no),
                'blue_pct': _percent_of_base(rec, rec.cost_increase_with),
                'red_abs': rec.cost_increase_no,
                'blue_abs': rec.cost_increase_with,
            })

        else:

            row.update({
                'red_pct': 100 * rec.loading(False),
                'blue_pct': 100 * rec.loading(True),
                'red_abs': rec.flow(False),
                'blue_abs': rec.flow(True),
            })

        rows.append(row)

    columns = ['red_pct', 'blue_pct', 'red_abs', 'blue_abs']
    frame = pd.DataFrame(rows, columns = ['tau_pct', 'detected', *columns])
    table = frame.groupby('tau_pct', sort = True).agg(
        n = ('detected', 'size'),
        detected = ('detected', 'mean'),
        **{col: (col, 'max') for col in columns},
    )

    if buckets is not None:

        table = table.reindex(list(buckets))
        table['n'] = table['n'].fillna(0).astype(int)

    table = table.reset_index()
    table.insert(0, 'kind', kind)

    return table
