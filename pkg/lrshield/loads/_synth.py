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
Synthetic hourly zonal loads, an offline stand-in for metered data.
"""

from __future__ import annotations

import numpy as np
import pandas as pd
import scipy.signal

from .. import _log
from ._ingest import read_zone_table
from ._calendar import nonexistent_hours

__all__ = [
    'synth_loads',
]

# Relative amplitudes of the load profile components.
DAILY = 0.25
ANNUAL = 0.15
WEEKLY = 0.02
WEEKEND = 0.03
FLOOR = 0.1


def _profile(hours: pd.DatetimeIndex) -> np.ndarray:

    hr = hours.hour.to_numpy()
    dow = hours.dayofweek.to_numpy()
    doy = hours.dayofyear.to_numpy() + hr / 24
    week = dow + hr / 24

    return (
        1.0
        + DAILY * np.sin(2 * np.pi * (hr - 9) / 24)
        + ANNUAL * np.cos(2 * np.pi * (doy - 200) / 365.25)
        + WEEKLY * np.sin(2 * np.pi * week / 7)
        - WEEKEND * (dow >= 5)
    )


def synth_loads(
        start: str | pd.Timestamp,
        end: str | pd.Timestamp,
        zone_scales: dict | pd.Series | None = None,
        rng: np.random.Generator | int | None = None,
        noise: float = 0.02,
        ar_phi: float = 0.9,
        tz: str | None = 'America/New_York',
) -> pd.DataFrame:
    """
    Sinusoidal daily, weekly and annual profiles with a weekend drop and
    first order autoregressive noise.

    Args:
        start, end:
            First and last day; every hour of these days is generated,
            except the wall-clock hours skipped at the spring-forward
            transition in `tz`.
        zone_scales:
            Mean MW of each zone; the approximate PJM zonal means by default.
        rng:
            Random generator or seed.
        noise:
            Standard deviation of the relative noise.
        ar_phi:
            Autocorrelation of consecutive noise values, in ``[0, 1)``.
        tz:
            Time zone of the wall-clock timestamps.

    Returns:
        Zonal MW indexed by local timestamp, every value at least 10% of
        the zone's scale.
    """

    if zone_scales is None:

        table = read_zone_table()
        zone_scales = pd.Series(
            table['mean_mw'].to_numpy(float),
            index = table['zone'],
        )

    zone_scales = pd.Series(zone_scales, dtype = float)

    if (zone_scales <= 0).any():

        raise ValueError('Zone scales must be positive.')

    if not 0 <= ar_phi < 1:

        raise ValueError(f'Noise autocorrelation must be in [0, 1): {ar_phi}.')

    if noise < 0:

        raise ValueError(f'Noise must be non-negative: {noise}.')

    rng = np.random.default_rng(rng)
    first = pd.Timestamp(start).normalize()
    last = pd.Timestamp(end).normalize() + pd.Timedelta(days = 1)

    if last <= first:

        raise ValueError(f'Empty date range: {start} to {end}.')

    hours = pd.date_range(first, last, freq = 'h', inclusive = 'left')
    hours = hours.difference(nonexistent_hours(hours[0], hours[-1], tz))
    profile = _profile(hours)

    shocks = rng.standard_normal((hours.size, zone_scales.size))
    shocks[1:] *= np.sqrt(1 - ar_phi ** 2)
    eps = noise * scipy.signal.lfilter([1.0], [1.0, -ar_phi], shocks, axis = 0)

    values = zone_scales.to_numpy() * np.maximum(
        profile[:, None] + eps,
        FLOOR,
    )
    series = pd.DataFrame(
        values,
        index = pd.DatetimeIndex(hours, name = 'timestamp'),
        columns = list(zone_scales.index),
    )

    _log(
        f'Synthesized {len(hours)} hours of {zone_scales.size} zones, '
        f'{first.date()} to {(last - pd.Timedelta(days = 1)).date()}.',
    )

    return series
