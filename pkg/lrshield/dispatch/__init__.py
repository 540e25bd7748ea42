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
DC optimal power flow: the dispatch engine and lower level of the attacks.
"""

from ._dcopf import (
    Dispatch,
    solve_dcopf,
    dcopf_problem,
    critical_hours,
    critical_lines,
    evaluate_flows,
    critical_hour_lines,
)

__all__ = [
    'Dispatch',
    'critical_hour_lines',
    'critical_hours',
    'critical_lines',
    'dcopf_problem',
    'evaluate_flows',
    'solve_dcopf',
]
