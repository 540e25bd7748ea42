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
Attack scenarios, their load arithmetic and the scenario archive.
"""

from __future__ import annotations

from typing import Any, Literal
from collections.abc import Iterable, Sequence
import dataclasses
import pathlib as pl

import numpy as np
import pandas as pd

from .. import _misc
from .._errors import AttackError
from ..grid import NetworkModel

__all__ = [
    'AttackKind',
    'AttackScenario',
    'apply_attack_vector',
    'load_shift',
    'read_scenarios',
    'write_scenarios',
]

AttackKind = Literal['random', 'cm', 'lo']

_CONSERVATION_RTOL = 1e-6


def load_shift(p: Sequence[float], delta_p: Sequence[float]) -> float:
    """
    Largest relative load change, ``max |dP_i / P_i|`` over changed loads.

    Raises:
        AttackError: If a load with zero true value is changed.
    """

    p = np.asarray(p, float)
    delta_p = np.asarray(delta_p, float)

    if p.shape != delta_p.shape:

        raise ValueError(
            f'Load vector {p.shape} and load change {delta_p.shape} differ.',
        )

    changed = delta_p != 0

    if not changed.any():

        return 0.0

    if np.any(p[changed] == 0):

        raise AttackError(
            'Load shift undefined: nonzero change of a zero load at '
            f'indices {np.flatnonzero(changed & (p == 0)).tolist()}.',
            reason = 'undefined_shift',
        )

    return float(np.max(np.abs(delta_p[changed] / p[changed])))


def apply_attack_vector(
        net: NetworkModel,
        c: Sequence[float],
        p: Sequence[float] | None = None,
) -> np.ndarray:
    """
    Load changes ``dP = -B c`` caused by a state attack vector.

    Args:
        net:
            The network.
        c:
            State attack vector, one entry per bus.
        p:
            True loads; only their length is checked.

    Returns:
        Load changes in load order.

    Raises:
        AttackError: If `c` changes the injection of a bus without load.
    """

    c = np.asarray(c, float)

    if c.shape != (net.n_bus,):

        raise ValueError(
            f'State vector of shape {c.shape}, expected ({net.n_bus},).',
        )

    if p is not None and np.shape(p) != (net.n_l,):

        raise ValueError(
            f'Load vector of shape {np.shape(p)}, expected ({net.n_l},).',
        )

    change = -(net.B @ c)
    tol = 1e-9 * max(1.0, float(np.abs(change).max(initial = 0.0)))
    leaked = np.abs(change[net.non_load_positions]) > tol

    if leaked.any():

        buses = [
            net.buses[pos].index
            for pos in net.non_load_positions[leaked]
        ]

        raise AttackError(
            f'Attack touches non-load bus(es) {buses}.',
            reason = 'non_load_bus',
        )

    return change[net.load_positions]


@dataclasses.dataclass(frozen = True)
class AttackScenario:
    """
    One falsified load vector and how it was made.

    Attrs:
        hour:
            Hour label the attack applies to (timestamp or row index).
        kind:
            `random`, `cm` (cost maximization) or `lo` (line overflow).
        p:
            True loads (MW).
        delta_p:
            Load changes (MW); the falsified loads are ``p + delta_p``.
        tau_requested:
            Load shift bound the attack was generated for.
        tau_real:
            Realized load shift.
        c:
            State attack vector (bilevel attacks only).
        target_line:
            Attacked line (line overflow only).
        attacked:
            Positions of the changed loads (random only).
        objective:
            Attacker objective at the optimum: the operating cost after
            re-dispatch for `cm`, the physical flow magnitude on the target
            line for `lo`.
        baseline:
            The same quantity without attack.
        redraws:
            Rejected draws before acceptance (random only).
        retries:
            Load sets given up as infeasible before this one (random only).
    """

    hour: Any
    kind: AttackKind
    p: np.ndarray
    delta_p: np.ndarray
    tau_requested: float
    tau_real: float
    c: np.ndarray | None = None
    target_line: int | None = None
    attacked: tuple[int, ...] | None = None
    objective: float | None = None
    baseline: float | None = None
    redraws: int = 0
    retries: int = 0


    @property
    def p_atk(self) -> np.ndarray:

        return self.p + self.delta_p


    @property
    def k(self) -> int | None:

        return None if self.attacked is None else len(self.attacked)


    def check(self) -> None:
        """
        Raise `AttackError` unless the scenario is a valid LR attack.
        """

        total = abs(float(self.delta_p.sum()))
        spread = float(np.abs(self.delta_p).sum())

        if total > _CONSERVATION_RTOL * spread:

            raise AttackError(
                f'Load changes do not sum to zero ({total:.3g} MW).',
                reason = 'conservation',
            )

        shift = load_shift(self.p, self.delta_p)

        if abs(shift - self.tau_real) > 1e-9 * max(1.0, shift):

            raise AttackError(
                f'Recorded shift {self.tau_real} differs from {shift}.',
                reason = 'shift',
            )

        if self.tau_real > self.tau_requested * (1 + 1e-9) + 1e-12:

            raise AttackError(
                f'Shift {self.tau_real:.4g} exceeds {self.tau_requested:.4g}.',
                reason = 'shift',
            )

        if self.attacked is not None:

            outside = np.ones(self.p.size, dtype = bool)
            outside[list(self.attacked)] = False

            if np.any(self.delta_p[outside] != 0):

                raise AttackError(
                    'Loads outside the attacked set were changed.',
                    reason = 'support',
                )


    def to_record(self) -> dict:

        rec = {
            'hour': _hour_repr(self.hour),
            'kind': self.kind,
            'p': self.p,
            'delta_p': self.delta_p,
            'tau_requested': self.tau_requested,
            'tau_real': self.tau_real,
        }
        optional = {
            'c': self.c,
            'target_line': self.target_line,
            'attacked': list(self.attacked) if self.attacked else None,
            'objective': self.objective,
            'baseline': self.baseline,
        }
        rec.update({k: v for k, v in optional.items() if v is not None})

        for key in ('redraws', 'retries'):

            if getattr(self, key):

                rec[key] = getattr(self, key)

        return rec


    @classmethod
    def from_record(cls, rec: dict) -> AttackScenario:

        c = rec.get('c')
        attacked = rec.get('attacked')

        return cls(
            hour = _hour_parse(rec['hour']),
            kind = rec['kind'],
            p = np.asarray(rec['p'], float),
            delta_p = np.asarray(rec['delta_p'], float),
            tau_requested = float(rec['tau_requested']),
            tau_real = float(rec['tau_real']),
            c = None if c is None else np.asarray(c, float),
            target_line = rec.get('target_line'),
            attacked = None if attacked is None else tuple(attacked),
            objective = rec.get('objective'),
            baseline = rec.get('baseline'),
            redraws = int(rec.get('redraws', 0)),
            retries = int(rec.get('retries', 0)),
        )


def _hour_repr(hour: Any) -> Any:

    if isinstance(hour, pd.Timestamp):

        return hour.isoformat()

    if isinstance(hour, np.integer):

        return int(hour)

    return hour


def _hour_parse(hour: Any) -> Any:

    return pd.Timestamp(hour) if isinstance(hour, str) else hour


def write_scenarios(
        path: str | pl.Path,
        scenarios: Iterable[AttackScenario],
        provenance: dict | None = None,
) -> None:
    """
    Write scenarios as JSON lines, each with a `provenance` object.
    """

    provenance = provenance or {}
    _misc.write_jsonl(
        path,
        ({**sc.to_record(), 'provenance': provenance} for sc in scenarios),
    )


def read_scenarios(path: str | pl.Path) -> list[AttackScenario]:

    return [AttackScenario.from_record(rec) for rec in _misc.read_jsonl(path)]
