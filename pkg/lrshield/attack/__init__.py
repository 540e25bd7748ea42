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
Load redistribution attacks: random, cost maximization and line overflow.
"""

from ._batch import BatchResult, attack_tasks, batch_generate
from ._random import RandomAttackSpec, random_lr_attack, random_attack_spec
from ._bilevel import BilevelOptions, cm_attack, lo_attack, screen_lines
from ._scenario import (
    AttackKind,
    AttackScenario,
    load_shift,
    read_scenarios,
    write_scenarios,
    apply_attack_vector,
)

__all__ = [
    'AttackKind',
    'AttackScenario',
    'BatchResult',
    'BilevelOptions',
    'RandomAttackSpec',
    'apply_attack_vector',
    'attack_tasks',
    'batch_generate',
    'cm_attack',
    'load_shift',
    'lo_attack',
    'random_attack_spec',
    'random_lr_attack',
    'read_scenarios',
    'screen_lines',
    'write_scenarios',
]
