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
Serialization and file helpers shared by the archives and the CLI.
"""

from collections.abc import Iterable
import os
import json
import hashlib
import datetime
import tempfile
import contextlib
import pathlib as pl

import numpy as np
import pandas as pd

__all__ = [
    'ArrayEncoder',
    'atomic_write',
    'canonical_json',
    'csv_header',
    'dumps',
    'file_sha256',
    'read_json',
    'read_jsonl',
    'stable_hash',
    'write_json',
    'write_jsonl',
]


class ArrayEncoder(json.JSONEncoder):
    """
    JSON encoder aware of numpy arrays and scalars, sets and timestamps.

    Floats are written with `repr` precision, so decoding restores them
    exactly and identical inputs always serialize to identical bytes.
    """

    def default(self, obj):

        if isinstance(obj, np.ndarray):

            return obj.tolist()

        if isinstance(obj, np.integer):

            return int(obj)

        if isinstance(obj, np.floating):

            return float(obj)

        if isinstance(obj, np.bool_):

            return bool(obj)

        if isinstance(obj, (set, frozenset)):

            return sorted(obj)

        if isinstance(obj, (pd.Timestamp, datetime.datetime, datetime.date)):

            return obj.isoformat()

        return json.JSONEncoder.default(self, obj)


def dumps(obj, **kwargs) -> str:

    return json.dumps(obj, cls = ArrayEncoder, **kwargs)


def canonical_json(obj) -> str:
    """
    Key-sorted compact JSON, the basis of every hash in the package.
    """

    return dumps(obj, sort_keys = True, separators = (',', ':'))


def stable_hash(obj, length: int = 16) -> str:
    """
    Hex digest of the canonical JSON form of a JSON-able object.
    """

    digest = hashlib.sha256(canonical_json(obj).encode('utf-8')).hexdigest()

    return digest[:length]


def file_sha256(path: str | pl.Path) -> str:

    sha = hashlib.sha256()

    with open(path, 'rb') as fp:

        for chunk in iter(lambda: fp.read(1 << 20), b''):

            sha.update(chunk)

    return sha.hexdigest()


@contextlib.contextmanager
def atomic_write(path: str | pl.Path, mode: str = 'w'):
    """
    Open a temporary file next to `path`, and move it in place on success.

    On any exception the temporary file is removed, so a partially written
    artifact never appears under its final name.
    """

    path = pl.Path(path)
    path.parent.mkdir(parents = True, exist_ok = True)
    fd, tmp = tempfile.mkstemp(dir = path.parent, prefix = f'.{path.name}.')
    kwargs = {} if 'b' in mode else {'encoding': 'utf-8', 'newline': ''}

    try:

        with os.fdopen(fd, mode, **kwargs) as fp:

            yield fp

        os.replace(tmp, path)

    except BaseException:

        with contextlib.suppress(FileNotFoundError):

            os.unlink(tmp)

        raise


def write_jsonl(path: str | pl.Path, records: Iterable[dict]):

    with atomic_write(path) as fp:

        for rec in records:

            fp.write(canonical_json(rec))
            fp.write('\n')


def read_jsonl(path: str | pl.Path) -> list[dict]:

    with open(path, encoding = 'utf-8') as fp:

        return [json.loads(line) for line in fp if line.strip()]


def write_json(path: str | pl.Path, obj) -> None:

    with atomic_write(path) as fp:

        fp.write(dumps(obj, sort_keys = True, indent = 2))
        fp.write('\n')


def read_json(path: str | pl.Path):

    with open(path, encoding = 'utf-8') as fp:

        return json.load(fp)


def csv_header(provenance: dict) -> str:
    """
    Comment line with the provenance fields, ``# key=value;...``.
    """

    if not provenance:

        return ''

    fields = ';'.join(f'{k}={provenance[k]}' for k in sorted(provenance))

    return f'# {fields}\n'
