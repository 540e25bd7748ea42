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
Command line interface: one command per pipeline stage.
"""

from ._main import main, validate, build_parser
from ._stages import COMMANDS, STAGES, Run
from ._manifest import Manifest

__all__ = [
    'COMMANDS',
    'Manifest',
    'Run',
    'STAGES',
    'build_parser',
    'main',
    'validate',
]
