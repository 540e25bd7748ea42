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

import os
import functools as _ft

from pypath_common import log as _read_log
from pypath_common import session as _session

from ._context import log_prefix

_get_session = _ft.partial(_session, 'lrshield')
log = _ft.partial(_read_log, 'lrshield')

session = _get_session()
_log_original = session._logger.msg

# Verbosity names accepted by `LRSHIELD_LOG`.
LEVELS = {
    'warning': 0,
    'info': 1,
    'debug': 2,
}


def loglevel() -> int:
    """
    Current verbosity threshold.

    Read from the `LRSHIELD_LOG` environment variable (a name from `LEVELS`
    or an integer), falling back to the `loglevel` session setting, then to
    1 (info).
    """

    raw = os.environ.get('LRSHIELD_LOG') or session.config.get(
        'loglevel',
        override = None,
        default = 1,
    )
    raw = str(raw).strip().lower()

    if raw in LEVELS:

        return LEVELS[raw]

    try:

        return int(raw)

    except ValueError:

        return LEVELS['info']


def _log(msg: str, level: int = 1):
    """
    Log a message with the run context prefix.

    Args:
        msg:
            The message to log.
        level:
            0 for warnings, 1 for progress information, 2 for debug
            details. Messages above the threshold of `loglevel` are dropped.
    """

    if level <= loglevel():

        _log_original(f'{log_prefix()}{msg}')
