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
Package metadata (version, authors, etc).
"""

__all__ = ['get_metadata']

import pathlib as pl
import importlib.metadata

import toml

_VERSION = '0.1.0'
_NAME = 'lrshield'


def _from_pyproject() -> dict:

    here = pl.Path(__file__).parent

    for project_dir in (here, here.parent):

        pyproject_path = project_dir / 'pyproject.toml'

        if not pyproject_path.exists():

            continue

        poetry = toml.load(pyproject_path).get('tool', {}).get('poetry', {})

        if poetry.get('name') == _NAME:

            return {
                key: poetry.get(key)
                for key in ('name', 'version', 'authors', 'license')
            }

    return {}


def _from_installed() -> dict:

    try:

        meta = importlib.metadata.metadata(_NAME)

    except importlib.metadata.PackageNotFoundError:

        return {}

    return {
        'name': meta.get('Name'),
        'version': meta.get('Version'),
        'authors': meta.get_all('Author') or [],
        'license': meta.get('License'),
    }


def get_metadata() -> dict:
    """
    Basic package metadata.

    The source checkout's `pyproject.toml` wins over the metadata of an
    installed distribution; the hard coded version is the last resort.
    """

    meta = _from_pyproject() or _from_installed()
    meta['name'] = meta.get('name') or _NAME
    meta['version'] = meta.get('version') or _VERSION

    return meta


metadata = get_metadata()
__version__ = metadata['version']
__author__ = metadata.get('authors')
__license__ = metadata.get('license')
