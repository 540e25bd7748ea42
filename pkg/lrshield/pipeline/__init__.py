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
Load prediction, attack detection and re-dispatch mitigation.
"""

from ._report import (
    TABLES,
    EvalReport,
    read_table,
    write_table,
    cm_lo_table,
    has_consequence,
    predictor_table,
    detection_table,
)
from ._detector import (
    TAU_BUCKETS,
    DetectorSet,
    DetectorSample,
    DetectionStats,
    detect,
    tau_bucket,
    train_detector,
    evaluate_detector,
    sweep_hyperparameters,
    split_detector_samples,
    build_detector_samples,
)
from ._predictor import (
    LoadErrors,
    PredictorBundle,
    predict_loads,
    load_predictor,
    save_predictor,
    train_predictor,
    metrics_rmse_mape,
)
from ._mitigation import MitigationRecord, mitigate, aggregate_mitigation

__all__ = [
    'DetectionStats',
    'DetectorSample',
    'DetectorSet',
    'EvalReport',
    'LoadErrors',
    'MitigationRecord',
    'PredictorBundle',
    'TABLES',
    'TAU_BUCKETS',
    'aggregate_mitigation',
    'build_detector_samples',
    'cm_lo_table',
    'detect',
    'detection_table',
    'evaluate_detector',
    'has_consequence',
    'load_predictor',
    'metrics_rmse_mape',
    'mitigate',
    'predict_loads',
    'predictor_table',
    'read_table',
    'save_predictor',
    'split_detector_samples',
    'sweep_hyperparameters',
    'tau_bucket',
    'train_detector',
    'train_predictor',
    'write_table',
]
