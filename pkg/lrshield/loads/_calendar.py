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
Hourly calendar of the load series: DST duplicates and gaps.
"""

from __future__ import annotations

import numpy as np
import pandas as pd

from .. import _log
from .._errors import LoadDataError

__all__ = [
    'nonexistent_hours',
    'normalize_calendar',
]


def nonexistent_hours(
        start: pd.Timestamp,
        end: pd.Timestamp,
        tz: str | None,
) -> pd.DatetimeIndex:
    """
    Wall-clock hours skipped by the spring-forward transition.
    """

    hours = pd.date_range(start, end, freq = 'h')

    if not tz or hours.empty:

        return hours[:0]

    # repeated fall-back hours resolve to their first occurrence
    local = hours.tz_localize(
        tz,
        ambiguous = np.ones(len(hours), dtype = bool),
        nonexistent = 'NaT',
    )

    return hours[np.asarray(local.isna())]


def normalize_calendar(
        series: pd.DataFrame,
        tz: str | None = 'America/New_York',
        fill_spring_forward: bool = False,
) -> pd.DataFrame:
    """
    Make a local-time hourly series strictly increasing and gap-free.

    Repeated timestamps (the DST fall-back hour) are averaged. The
    wall-clock hour skipped in spring does not exist and stays absent
    unless `fill_spring_forward` is set; then it is interpolated like any
    other single missing hour.

    Args:
        series:
            Loads indexed by naive local timestamps.
        tz:
            Time zone of the timestamps; `None` for a calendar without DST.
        fill_spring_forward:
            Interpolate the skipped spring-forward hours.

    Raises:
        LoadDataError: If a timestamp occurs more than twice, a gap is
            longer than one hour, or a value is negative.
    """

    if not isinstance(series.index, pd.DatetimeIndex):

        raise LoadDataError('Load series must be indexed by timestamps.')

    if series.empty:

        raise LoadDataError('Empty load series.')

    if series.index.tz is not None:

        series = series.tz_localize(None)

    series = series.sort_index(kind = 'mergesort')
    counts = series.index.value_counts()

    if (counts > 2).any():

        ts = counts[counts > 2].index.min()

        raise LoadDataError(f'Timestamp `{ts}` occurs {counts[ts]} times.')

    if (counts > 1).any():

        _log(f'Averaging {int((counts > 1).sum())} repeated hour(s).')
        series = series.groupby(level = 0, sort = True).mean()

    start, end = series.index[0], series.index[-1]
    hours = pd.date_range(start, end, freq = 'h')
    skipped = nonexistent_hours(start, end, tz)

    if not fill_spring_forward:

        hours = hours.difference(skipped.difference(series.index))

    off_grid = series.index.difference(hours)

    if len(off_grid):

        raise LoadDataError(
            f'Timestamp `{off_grid[0]}` is not on the hourly grid.',
        )

    full = series.reindex(hours)
    missing = full.isna().any(axis = 1).to_numpy()

    if missing.any():

        # lengths of the runs of missing hours
        edges = np.diff(np.concatenate([[0], missing.astype(int), [0]]))
        starts = np.flatnonzero(edges == 1)
        stops = np.flatnonzero(edges == -1)
        longest = int((stops - starts).max())

        if longest > 1:

            first = hours[starts[np.argmax(stops - starts)]]

            raise LoadDataError(
                f'Gap of {longest} hours at `{first}`; '
                'only single missing hours are interpolated.',
            )

        _log(f'Interpolating {int(missing.sum())} missing hour(s).')
        full = full.interpolate(method = 'linear')

    if (full.to_numpy() < 0).any():

        raise LoadDataError('Negative load in series.')

    full.index = pd.DatetimeIndex(full.index.to_numpy(), name = 'timestamp')

    return full
