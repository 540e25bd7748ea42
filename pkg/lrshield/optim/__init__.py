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
Optimization kernels: dense LP, binary branch-and-bound, PSD projections.
"""

from ._lp import Status, LpDuals, Solution, LpProblem, solve_lp
from ._psd import project_psd, constrained_psd
from ._milp import MilpProblem, solve_milp

__all__ = [
    'LpDuals',
    'LpProblem',
    'MilpProblem',
    'Solution',
    'Status',
    'constrained_psd',
    'project_psd',
    'solve_lp',
    'solve_milp',
]
