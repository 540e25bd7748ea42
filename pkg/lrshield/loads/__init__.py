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
Hourly load series: ingestion, calendar normalization, synthesis and
predictor features.
"""

from ._ingest import (
    SCALE,
    ingest_csv,
    write_wide_csv,
    read_load_series,
    read_zone_table,
    zone_table_path,
    map_zones_to_buses,
)
from ._synth import synth_loads
from ._calendar import nonexistent_hours, normalize_calendar
from ._features import (
    FeatureDataset,
    lag_offsets,
    feature_columns,
    standardize,
    save_features,
    load_features,
    time_features,
    unstandardize,
    build_features,
    chronological_split,
)

__all__ = [
    'FeatureDataset',
    'SCALE',
    'build_features',
    'chronological_split',
    'feature_columns',
    'ingest_csv',
    'lag_offsets',
    'load_features',
    'map_zones_to_buses',
    'nonexistent_hours',
    'normalize_calendar',
    'read_load_series',
    'read_zone_table',
    'save_features',
    'standardize',
    'synth_loads',
    'time_features',
    'unstandardize',
    'write_wide_csv',
    'zone_table_path',
]
