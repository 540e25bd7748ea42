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
Run context for log traceability.

Context variables hold the pipeline stage and an optional item label (a
scenario, a load index, a sweep cell), so messages emitted deep inside the
solvers can be traced back to the work item that produced them.
"""

from collections.abc import Iterator
import contextlib
import contextvars

__all__ = [
    'get_label',
    'get_stage',
    'labelled',
    'log_prefix',
    'reset_stage',
    'set_stage',
    'stage',
]


_stage_ctx: contextvars.ContextVar[str | None] = contextvars.ContextVar(
    'stage',
    default = None,
)
_label_ctx: contextvars.ContextVar[str | None] = contextvars.ContextVar(
    'label',
    default = None,
)


def set_stage(name: str) -> contextvars.Token:
    """
    Set the current pipeline stage.

    Args:
        name:
            Stage name, typically the CLI command being executed.

    Returns:
        Token that restores the previous stage when passed to
        `contextvars.ContextVar.reset`.
    """

    return _stage_ctx.set(name)


def get_stage() -> str | None:

    return _stage_ctx.get()


def reset_stage():
    """
    Forget the current stage; mainly useful in tests.
    """

    _stage_ctx.set(None)


def get_label() -> str | None:

    return _label_ctx.get()


@contextlib.contextmanager
def stage(name: str) -> Iterator[str]:
    """
    Run a block within a named stage.
    """

    token = _stage_ctx.set(name)

    try:

        yield name

    finally:

        _stage_ctx.reset(token)


@contextlib.contextmanager
def labelled(label: str) -> Iterator[str]:
    """
    Run a block with an item label, e.g. `load 7` or `cm h=1203 tau=0.05`.
    """

    token = _label_ctx.set(label)

    try:

        yield label

    finally:

        _label_ctx.reset(token)


def log_prefix() -> str:
    """
    Prefix for log messages built from the current context.
    """

    parts = [
        f'[{kind}:{value}]'
        for kind, value in (('stage', get_stage()), ('item', get_label()))
        if value is not None
    ]

    return f'{"".join(parts)} ' if parts else ''
