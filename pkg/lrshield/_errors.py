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
Domain exceptions.

All of them derive from a built-in exception, so callers that only care about
the broad category can keep catching `ValueError` or `RuntimeError`.
"""

__all__ = [
    'AttackError',
    'ConfigError',
    'InfeasibleSpecError',
    'LoadDataError',
    'NetworkError',
    'SolverError',
]


class NetworkError(ValueError):
    """
    Network file could not be parsed or violates a network invariant.
    """

    def __init__(self, message: str, field: str | None = None):

        self.field = field
        super().__init__(f'{field}: {message}' if field else message)


class SolverError(RuntimeError):
    """
    Numerical failure of an optimization routine.
    """


class InfeasibleSpecError(ValueError):
    """
    No covariance matrix satisfies the random attack constraints.
    """


class AttackError(ValueError):
    """
    Attack vector rejected or attack scenario discarded.
    """

    def __init__(self, message: str, reason: str = 'invalid'):

        self.reason = reason
        super().__init__(message)


class LoadDataError(ValueError):
    """
    Load time series or feature data violates its contract.
    """


class ConfigError(ValueError):
    """
    Invalid run configuration key or value.
    """

    def __init__(self, message: str, key: str | None = None):

        self.key = key
        super().__init__(message)
