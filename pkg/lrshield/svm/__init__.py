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
Support vector regression and classification trained by SMO.
"""

from ._smo import SmoResult, smo_solve
from ._kernel import KernelSpec, KernelColumns, kernel, kernel_matrix
from ._models import (
    SvmModel,
    SvrModel,
    train_svm,
    train_svr,
    load_model,
    save_model,
    svm_predict,
    svr_predict,
)

__all__ = [
    'KernelColumns',
    'KernelSpec',
    'SmoResult',
    'SvmModel',
    'SvrModel',
    'kernel',
    'kernel_matrix',
    'load_model',
    'save_model',
    'smo_solve',
    'svm_predict',
    'svr_predict',
    'train_svm',
    'train_svr',
]
