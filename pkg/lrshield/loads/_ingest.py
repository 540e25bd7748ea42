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
Reading hourly zonal load tables and mapping zones to load buses.
"""

from __future__ import annotations

from collections.abc import Iterable
import re
import bz2
import gzip
import lzma
import pathlib as pl

import numpy as np
import pandas as pd

from .. import _log, _misc
from .._errors import LoadDataError

__all__ = [
    'SCALE',
    'ingest_csv',
    'map_zones_to_buses',
    'read_load_series',
    'read_zone_table',
    'write_wide_csv',
    'zone_table_path',
]

# Zonal MW to per-load MW of the 30-bus case.
SCALE = 1.308e-3

_DATA_DIR = pl.Path(__file__).parent.parent / 'data'
_BUILTIN_PREFIX = 'builtin:'

# Compressed file methods
_COMPR = {
    '': (open, {}),
    '.gz': (gzip.open, {'mode': 'rt'}),
    '.bz2': (bz2.open, {'mode': 'rt'}),
    '.xz': (lzma.open, {'mode': 'rt'}),
}

# Accepted names of the timestamp column, in order of preference. PJM
# exports carry both the UTC and the prevailing local time.
_TIME_COLUMNS = (
    'datetime_beginning_ept',
    'timestamp',
    'datetime',
    'time',
)
_UTC_COLUMN = 'datetime_beginning_utc'


def zone_table_path(ref: str | pl.Path = 'builtin:pjm_zones') -> pl.Path:

    ref = str(ref)

    if ref.startswith(_BUILTIN_PREFIX):

        return _DATA_DIR / f'{ref[len(_BUILTIN_PREFIX):]}.tsv'

    return pl.Path(ref)


def read_zone_table(ref: str | pl.Path = 'builtin:pjm_zones') -> pd.DataFrame:
    """
    The zone to load bus mapping.

    Args:
        ref:
            Path to a TSV file with columns `load`, `zone`, `bus` and
            `mean_mw`, or `builtin:<name>` for a shipped table.

    Returns:
        Data frame sorted by load index.
    """

    path = zone_table_path(ref)

    if not path.exists():

        raise FileNotFoundError(f'Zone table not found: `{path}`.')

    table = pd.read_csv(path, sep = '\t', comment = '#')
    missing = {'load', 'zone', 'bus', 'mean_mw'} - set(table.columns)

    if missing:

        raise LoadDataError(
            f'Zone table `{path.name}` lacks columns: '
            f'{", ".join(sorted(missing))}.',
        )

    if table['zone'].duplicated().any() or table['load'].duplicated().any():

        raise LoadDataError(f'Zone table `{path.name}` has duplicate rows.')

    return table.sort_values('load').reset_index(drop = True)


def _open(path: pl.Path):

    compr = ''

    if m := re.search(r'\.(gz|bz2|xz)$', path.name):

        compr = m.group()

    opener, args = _COMPR[compr]

    return opener(path, **args)


def _read(path: pl.Path) -> pd.DataFrame:

    if not path.exists():

        raise FileNotFoundError(f'Load data file not found: `{path}`.')

    _log(f'Reading load data from `{path}`.')

    with _open(path) as fp:

        table = pd.read_csv(fp, dtype = str, comment = '#')

    table.columns = [str(c).strip() for c in table.columns]

    return table


def _time_column(table: pd.DataFrame, path: pl.Path) -> str:

    lower = {c.lower(): c for c in table.columns}

    for name in _TIME_COLUMNS:

        if name in lower:

            return lower[name]

    if _UTC_COLUMN in lower:

        return lower[_UTC_COLUMN]

    raise LoadDataError(f'No timestamp column in `{path.name}`.')


def _timestamps(values: pd.Series, path: pl.Path) -> pd.DatetimeIndex:

    values = values.str.strip()
    parsed = pd.to_datetime(values, errors = 'coerce')
    bad = parsed.isna()

    if bad.any():

        raise LoadDataError(
            f'Malformed timestamp in `{path.name}`: '
            f'`{values[bad].iloc[0]}`.',
        )

    return pd.DatetimeIndex(parsed)


def _numbers(values: pd.Series | pd.DataFrame, path: pl.Path):

    parsed = (
        pd.to_numeric(values.str.strip(), errors = 'coerce')
            if isinstance(values, pd.Series) else
        values.apply(
            lambda col: pd.to_numeric(col.str.strip(), errors = 'coerce'),
        )
    )

    if parsed.isna().to_numpy().any():

        raise LoadDataError(
            f'Malformed or missing load value in `{path.name}`.',
        )

    return parsed


def _long(table: pd.DataFrame, path: pl.Path, time_col: str) -> pd.DataFrame:

    lower = {c.lower(): c for c in table.columns}
    zone_col = lower['zone']
    value_col = lower['mw']
    table = table.assign(
        _time = _timestamps(table[time_col], path),
        _zone = table[zone_col].str.strip(),
        _mw = _numbers(table[value_col], path),
    )

    # Repeated wall-clock hours (DST fall-back) are told apart by the UTC
    # time when present, else by their order of appearance.
    if _UTC_COLUMN in lower and lower[_UTC_COLUMN] != time_col:

        table['_occ'] = _timestamps(table[lower[_UTC_COLUMN]], path)

    else:

        keys = ['_time', '_zone']

        if 'load_area' in lower:

            keys.append(lower['load_area'])

        table['_occ'] = table.groupby(keys, sort = False).cumcount()

    # load areas of one zone are summed
    wide = table.pivot_table(
        index = ['_time', '_occ'],
        columns = '_zone',
        values = '_mw',
        aggfunc = 'sum',
    )
    wide.index = wide.index.get_level_values('_time')
    wide.columns.name = None

    return wide


def _wide(table: pd.DataFrame, path: pl.Path, time_col: str) -> pd.DataFrame:

    values = table.drop(columns = [time_col])
    values = values.loc[:, [c for c in values.columns if c]]
    wide = _numbers(values, path)
    wide.index = _timestamps(table[time_col], path)

    return wide


def ingest_csv(
        paths: str | pl.Path | Iterable[str | pl.Path],
        zones: pd.DataFrame | None = None,
) -> pd.DataFrame:
    """
    Read hourly zonal load CSV files.

    Both the long format (a timestamp, a `zone` and an `mw` column, one row
    per zone or load area and hour) and the wide format (a timestamp
    column followed by one column per zone) are accepted. Compressed files
    (`.gz`, `.bz2`, `.xz`) are recognized by their extension.

    Args:
        paths:
            One or more CSV files; they are concatenated in time order.
        zones:
            The zone table; the shipped PJM mapping by default.

    Returns:
        Data frame of MW values indexed by local timestamp, one column per
        zone, in zone table order. Repeated timestamps (DST fall-back) are
        kept.

    Raises:
        LoadDataError: On unknown zones, malformed timestamps, malformed
            or negative loads.
    """

    zones = read_zone_table() if zones is None else zones
    known = list(zones['zone'])

    if isinstance(paths, (str, pl.Path)):

        paths = [paths]

    frames = []

    for path in map(pl.Path, paths):

        table = _read(path)
        time_col = _time_column(table, path)
        lower = {c.lower() for c in table.columns}
        fmt = _long if {'zone', 'mw'} <= lower else _wide
        frame = fmt(table, path, time_col)
        unknown = sorted(set(frame.columns) - set(known))

        if unknown:

            raise LoadDataError(
                f'Unknown zone(s) in `{path.name}`: {", ".join(unknown)}.',
            )

        frames.append(frame)

    if not frames:

        raise LoadDataError('No load data files given.')

    series = pd.concat(frames).sort_index(kind = 'mergesort')
    series = series[[z for z in known if z in series.columns]]

    if series.isna().to_numpy().any():

        raise LoadDataError('Zones are missing values for some hours.')

    if (series.to_numpy() < 0).any():

        zone = series.columns[(series < 0).any()][0]

        raise LoadDataError(f'Negative load in zone `{zone}`.')

    series.index.name = 'timestamp'
    _log(
        f'Ingested {len(series)} hourly rows of {series.shape[1]} zones, '
        f'{series.index.min()} to {series.index.max()}.',
    )

    return series.astype(float)


def map_zones_to_buses(
        series: pd.DataFrame,
        zones: pd.DataFrame | None = None,
        scale: float = SCALE,
) -> pd.DataFrame:
    """
    Reorder zone columns into load order and scale them to the grid.

    Args:
        series:
            Zonal loads, one column per zone.
        zones:
            The zone table; the shipped PJM mapping by default.
        scale:
            Multiplier from zonal MW to load MW.

    Returns:
        Data frame with columns named by load index, 1 to `n_l`.

    Raises:
        LoadDataError: If a zone of the table is missing.
    """

    zones = read_zone_table() if zones is None else zones
    missing = [z for z in zones['zone'] if z not in series.columns]

    if missing:

        raise LoadDataError(f'Missing zone(s): {", ".join(missing)}.')

    mapped = series[list(zones['zone'])] * scale
    mapped.columns = pd.Index(zones['load'].astype(int), name = 'load')

    return mapped.astype(np.float64)


def write_wide_csv(
        path: str | pl.Path,
        series: pd.DataFrame,
        **provenance,
) -> None:
    """
    Write a load series in the wide format read by `ingest_csv`.
    """

    frame = series.copy()
    frame.index.name = 'datetime'

    with _misc.atomic_write(path) as fp:

        fp.write(_misc.csv_header(provenance))
        frame.to_csv(fp, lineterminator = '\n')


def read_load_series(path: str | pl.Path) -> pd.DataFrame:
    """
    Read a series written by `write_wide_csv`.

    Integer column labels (load indices) are restored as integers.
    """

    frame = pd.read_csv(path, comment = '#', index_col = 0)
    frame.index = pd.DatetimeIndex(
        pd.to_datetime(frame.index),
        name = 'timestamp',
    )
    labels = list(frame.columns)

    if all(str(c).isdigit() for c in labels):

        frame.columns = pd.Index([int(c) for c in labels], name = 'load')

    return frame.astype(float)
