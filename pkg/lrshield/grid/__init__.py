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
Network model, susceptance and PTDF matrices.
"""

from ._network import (
    Bus,
    Line,
    Generator,
    NetworkModel,
    line_flows,
    ptdf_matrix,
    load_network,
    network_path,
    as_load_vector,
    builtin_network,
    susceptance_matrix,
)

__all__ = [
    'Bus',
    'Generator',
    'Line',
    'NetworkModel',
    'as_load_vector',
    'builtin_network',
    'line_flows',
    'load_network',
    'network_path',
    'ptdf_matrix',
    'susceptance_matrix',
]
