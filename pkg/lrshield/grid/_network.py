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
Transmission network model and the DC power flow matrices built from it.
"""

from __future__ import annotations

from typing import Any
from collections.abc import Sequence
import json
import functools
import dataclasses
import pathlib as pl

import numpy as np
import scipy.linalg
import scipy.sparse
from scipy.sparse import csgraph

from .. import _log
from .._errors import NetworkError

__all__ = [
    'Bus',
    'Generator',
    'Line',
    'NetworkModel',
    'as_load_vector',
    'builtin_network',
    'line_flows',
    'load_network',
    'network_path',
    'ptdf_matrix',
    'susceptance_matrix',
]

_DATA_DIR = pl.Path(__file__).parent.parent / 'data'
_BUILTIN_PREFIX = 'builtin:'


@dataclasses.dataclass(frozen = True)
class Bus:

    index: int
    load: bool = False


@dataclasses.dataclass(frozen = True)
class Line:

    from_bus: int
    to_bus: int
    x: float
    rating_mw: float


@dataclasses.dataclass(frozen = True)
class Generator:

    bus: int
    cost: float
    gmin_mw: float
    gmax_mw: float


def _readonly(arr: np.ndarray) -> np.ndarray:

    arr.setflags(write = False)

    return arr


@dataclasses.dataclass(frozen = True)
class NetworkModel:
    """
    Immutable DC model of a transmission network.

    Bus indices are the labels used in the network file; the arrays exposed
    by the properties below are ordered by bus position, i.e. the order of
    the `buses` sequence. Loads are ordered by `load_buses`, which defines the
    load indices 1..n_l used everywhere else in the package.

    Args:
        buses:
            Bus records, the load flag marks buses that carry demand.
        lines:
            Branches with reactance in p.u. and rating in MW.
        generators:
            Generators with linear cost ($/MWh) and output limits (MW).
        slack_bus:
            Index of the reference bus absorbing the power balance in the
            PTDF matrix.
        load_buses:
            Ordered load bus indices.
        name:
            Label of the case.
        nominal_load_mw:
            Optional reference demand of each load, in load order.
    """

    buses: tuple[Bus, ...]
    lines: tuple[Line, ...]
    generators: tuple[Generator, ...]
    slack_bus: int
    load_buses: tuple[int, ...]
    name: str = ''
    nominal_load_mw: tuple[float, ...] | None = None

    def __post_init__(self):

        self._validate()


    def _validate(self):

        indices = [bus.index for bus in self.buses]

        if len(indices) < 2:

            raise NetworkError('at least two buses required', 'buses')

        if len(set(indices)) != len(indices):

            raise NetworkError('duplicate bus index', 'buses')

        valid = set(indices)

        for i, line in enumerate(self.lines):

            field = f'lines[{i}]'

            if line.from_bus not in valid or line.to_bus not in valid:

                raise NetworkError(
                    f'endpoint {line.from_bus}-{line.to_bus} '
                    'is not a valid bus index',
                    field,
                )

            if line.from_bus == line.to_bus:

                raise NetworkError('line endpoints coincide', field)

            if not line.x > 0:

                raise NetworkError(
                    'reactance must be strictly positive',
                    field,
                )

            if not line.rating_mw > 0:

                raise NetworkError('rating must be strictly positive', field)

        if not self.generators:

            raise NetworkError('at least one generator required', 'generators')

        for i, gen in enumerate(self.generators):

            field = f'generators[{i}]'

            if gen.bus not in valid:

                raise NetworkError(
                    f'bus {gen.bus} is not a valid index',
                    field,
                )

            if gen.gmin_mw > gen.gmax_mw:

                raise NetworkError('gmin_mw exceeds gmax_mw', field)

            if gen.cost < 0:

                raise NetworkError('cost must be non-negative', field)

        if self.slack_bus not in valid:

            raise NetworkError(
                f'{self.slack_bus} is not a valid bus index',
                'slack_bus',
            )

        if len(set(self.load_buses)) != len(self.load_buses):

            raise NetworkError('duplicate load bus', 'load_buses')

        flagged = {bus.index for bus in self.buses if bus.load}

        if set(self.load_buses) - valid:

            raise NetworkError(
                f'unknown buses {sorted(set(self.load_buses) - valid)}',
                'load_buses',
            )

        if flagged and flagged != set(self.load_buses):

            raise NetworkError(
                'load flags of the bus records disagree with load_buses',
                'load_buses',
            )

        if (
            self.nominal_load_mw is not None and
            len(self.nominal_load_mw) != len(self.load_buses)
        ):

            raise NetworkError(
                'length differs from the number of loads',
                'nominal_load_mw',
            )


    @property
    def n_bus(self) -> int:

        return len(self.buses)


    @property
    def n_line(self) -> int:

        return len(self.lines)


    @property
    def n_gen(self) -> int:

        return len(self.generators)


    @property
    def n_l(self) -> int:

        return len(self.load_buses)


    @functools.cached_property
    def bus_position(self) -> dict[int, int]:

        return {bus.index: pos for pos, bus in enumerate(self.buses)}


    @functools.cached_property
    def slack_position(self) -> int:

        return self.bus_position[self.slack_bus]


    @functools.cached_property
    def load_positions(self) -> np.ndarray:

        return _readonly(
            np.array([self.bus_position[b] for b in self.load_buses], int),
        )


    @functools.cached_property
    def gen_positions(self) -> np.ndarray:

        return _readonly(
            np.array([self.bus_position[g.bus] for g in self.generators], int),
        )


    @functools.cached_property
    def non_load_positions(self) -> np.ndarray:

        mask = np.ones(self.n_bus, dtype = bool)
        mask[self.load_positions] = False

        return _readonly(np.flatnonzero(mask))


    @functools.cached_property
    def costs(self) -> np.ndarray:

        return _readonly(np.array([g.cost for g in self.generators], float))


    @functools.cached_property
    def gmin(self) -> np.ndarray:

        return _readonly(np.array([g.gmin_mw for g in self.generators], float))


    @functools.cached_property
    def gmax(self) -> np.ndarray:

        return _readonly(np.array([g.gmax_mw for g in self.generators], float))


    @functools.cached_property
    def ratings(self) -> np.ndarray:

        return _readonly(np.array([l.rating_mw for l in self.lines], float))


    @functools.cached_property
    def incidence(self) -> np.ndarray:
        """
        Branch-bus incidence matrix: +1 at the from bus, -1 at the to bus.
        """

        rows = np.repeat(np.arange(self.n_line), 2)
        cols = np.array([
            self.bus_position[bus]
            for line in self.lines
            for bus in (line.from_bus, line.to_bus)
        ])
        vals = np.tile([1.0, -1.0], self.n_line)
        cft = scipy.sparse.csr_matrix(
            (vals, (rows, cols)),
            shape = (self.n_line, self.n_bus),
        )

        return _readonly(cft.toarray())


    @functools.cached_property
    def gen_matrix(self) -> np.ndarray:
        """
        Bus by generator connection matrix.
        """

        cg = np.zeros((self.n_bus, self.n_gen))
        cg[self.gen_positions, np.arange(self.n_gen)] = 1.0

        return _readonly(cg)


    @functools.cached_property
    def load_matrix(self) -> np.ndarray:
        """
        Bus by load connection matrix.
        """

        cl = np.zeros((self.n_bus, self.n_l))
        cl[self.load_positions, np.arange(self.n_l)] = 1.0

        return _readonly(cl)


    @functools.cached_property
    def branch_susceptance(self) -> np.ndarray:
        """
        Branch flow matrix: flows = Bf @ theta.
        """

        b = 1.0 / np.array([l.x for l in self.lines], float)

        return _readonly(b[:, None] * self.incidence)


    @functools.cached_property
    def B(self) -> np.ndarray:

        return _readonly(self.incidence.T @ self.branch_susceptance)


    @functools.cached_property
    def R(self) -> np.ndarray:

        return _readonly(self._ptdf())


    def is_connected(self) -> bool:

        adjacency = scipy.sparse.csr_matrix(np.abs(self.B) > 0)
        n_comp, _ = csgraph.connected_components(adjacency, directed = False)

        return n_comp == 1


    def _ptdf(self) -> np.ndarray:

        if not self.is_connected():

            raise NetworkError('network disconnected')

        keep = np.delete(np.arange(self.n_bus), self.slack_position)
        b_red = self.B[np.ix_(keep, keep)]

        try:

            theta = scipy.linalg.solve(
                b_red,
                self.branch_susceptance[:, keep].T,
                assume_a = 'pos',
            )

        except (np.linalg.LinAlgError, scipy.linalg.LinAlgError) as e:

            raise NetworkError(f'network disconnected ({e})') from e

        ptdf = np.zeros((self.n_line, self.n_bus))
        ptdf[:, keep] = theta.T

        return ptdf


    def injections(
            self,
            g: np.ndarray,
            loads: np.ndarray,
            attack_c: np.ndarray | None = None,
    ) -> np.ndarray:
        """
        Net bus injections G - P (+ B c when a state attack is given).
        """

        inj = self.gen_matrix @ np.asarray(g, float)
        inj -= self.load_matrix @ np.asarray(loads, float)

        if attack_c is not None:

            inj += self.B @ np.asarray(attack_c, float)

        return inj


    def line_index(self, from_bus: int, to_bus: int) -> int:

        for i, line in enumerate(self.lines):

            if {line.from_bus, line.to_bus} == {from_bus, to_bus}:

                return i

        raise KeyError(f'No line between buses {from_bus} and {to_bus}.')


def susceptance_matrix(net: NetworkModel) -> np.ndarray:
    """
    Bus susceptance matrix from line reactances (resistances ignored).
    """

    return net.B


def ptdf_matrix(net: NetworkModel) -> np.ndarray:
    """
    Power transfer distribution factors relative to the slack bus.

    The slack-reduced susceptance matrix is factorized and a zero column is
    re-inserted at the slack position.

    Raises:
        NetworkError: If the network is disconnected.
    """

    return net.R


def line_flows(net: NetworkModel, injections: Sequence[float]) -> np.ndarray:
    """
    Line flows (MW) caused by a vector of bus injections (MW).
    """

    injections = np.asarray(injections, float)

    if injections.shape != (net.n_bus,):

        n = injections.shape[0] if injections.ndim else 0

        raise ValueError(
            f'Dimension mismatch: {n}'
            f' injections for {net.n_bus} buses.',
        )

    return net.R @ injections


def as_load_vector(net: NetworkModel, values: Sequence[float]) -> np.ndarray:
    """
    Validate a vector of true loads: length n_l, all entries non-negative.
    """

    values = np.asarray(values, float)

    if values.shape != (net.n_l,):

        raise ValueError(
            f'Load vector of shape {values.shape}, expected ({net.n_l},).',
        )

    if np.any(values < 0) or not np.all(np.isfinite(values)):

        raise ValueError('Load vector must be finite and non-negative.')

    return values


def _require(rec: dict, key: str, field: str) -> Any:

    if key not in rec:

        raise NetworkError(f'missing field `{key}`', field)

    return rec[key]


def _number(rec: dict, key: str, field: str) -> float:

    value = _require(rec, key, field)

    try:

        return float(value)

    except (TypeError, ValueError):

        raise NetworkError(f'`{key}` is not a number: {value!r}', field)


def _parse(doc: dict) -> NetworkModel:

    if not isinstance(doc, dict):

        raise NetworkError('top level must be an object', 'document')

    buses = []

    for i, rec in enumerate(_require(doc, 'buses', 'document')):

        field = f'buses[{i}]'

        if isinstance(rec, dict):

            buses.append(
                Bus(int(_require(rec, 'index', field)), bool(rec.get('load'))),
            )

        else:

            buses.append(Bus(int(rec)))

    lines = [
        Line(
            from_bus = int(_number(rec, 'from', f'lines[{i}]')),
            to_bus = int(_number(rec, 'to', f'lines[{i}]')),
            x = _number(rec, 'x', f'lines[{i}]'),
            rating_mw = _number(rec, 'rating_mw', f'lines[{i}]'),
        )
        for i, rec in enumerate(_require(doc, 'lines', 'document'))
    ]

    generators = [
        Generator(
            bus = int(_number(rec, 'bus', f'generators[{i}]')),
            cost = _number(rec, 'cost', f'generators[{i}]'),
            gmin_mw = _number(rec, 'gmin_mw', f'generators[{i}]'),
            gmax_mw = _number(rec, 'gmax_mw', f'generators[{i}]'),
        )
        for i, rec in enumerate(_require(doc, 'generators', 'document'))
    ]

    load_buses = doc.get('load_buses')

    if load_buses is None:

        load_buses = [bus.index for bus in buses if bus.load]

    nominal = doc.get('nominal_load_mw')

    return NetworkModel(
        buses = tuple(buses),
        lines = tuple(lines),
        generators = tuple(generators),
        slack_bus = int(doc.get('slack_bus', buses[0].index if buses else 1)),
        load_buses = tuple(int(b) for b in load_buses),
        name = str(doc.get('name', '')),
        nominal_load_mw = tuple(map(float, nominal)) if nominal else None,
    )


def network_path(ref: str | pl.Path) -> pl.Path:
    """
    Resolve a network reference: a file path or `builtin:<name>`.
    """

    ref = str(ref)

    if ref.startswith(_BUILTIN_PREFIX):

        return _DATA_DIR / f'{ref[len(_BUILTIN_PREFIX):]}.json'

    return pl.Path(ref)


def load_network(path: str | pl.Path) -> NetworkModel:
    """
    Read and validate a JSON network file.

    Args:
        path:
            Path to the JSON document, or `builtin:ieee30` for the shipped
            IEEE 30-bus case.

    Raises:
        FileNotFoundError: If the file does not exist.
        NetworkError: On JSON syntax errors (with line and column), missing
            or malformed fields, or violated network invariants.
    """

    path = network_path(path)

    if not path.exists():

        raise FileNotFoundError(f'Network file not found: `{path}`.')

    _log(f'Loading network from `{path}`.', level = 2)

    with open(path, encoding = 'utf-8') as fp:

        try:

            doc = json.load(fp)

        except json.JSONDecodeError as e:

            raise NetworkError(
                f'line {e.lineno}, column {e.colno}: {e.msg}',
                path.name,
            ) from e

    net = _parse(doc)
    _log(
        f'Network `{net.name or path.stem}`: {net.n_bus} buses, '
        f'{net.n_line} lines, {net.n_gen} generators, {net.n_l} loads.',
        level = 2,
    )

    return net


def builtin_network(name: str = 'ieee30') -> NetworkModel:

    return load_network(f'{_BUILTIN_PREFIX}{name}')
