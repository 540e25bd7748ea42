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

import sys

from lrshield.cli import main

if __name__ == '__main__':

    sys.exit(main())
