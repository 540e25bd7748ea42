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
Index of the artifacts in an output directory.
"""

from __future__ import annotations

from collections.abc import Iterable
import pathlib as pl

from .. import _log, _misc

__all__ = [
    'Manifest',
]

MANIFEST = 'manifest.json'


class Manifest:
    """
    Artifacts with their checksum, the stage that wrote them and the
    section hash of the configuration it ran with.

    A stage is up to date if every artifact it declares is listed with the
    stage's current section hash and its file still has the recorded
    checksum.
    """

    def __init__(self, out_dir: str | pl.Path):

        self.out_dir = pl.Path(out_dir)
        self.path = self.out_dir / MANIFEST
        self.entries: dict[str, dict] = {}

        if self.path.exists():

            self.entries = _misc.read_json(self.path).get('artifacts', {})


    def _key(self, path: str | pl.Path) -> str:

        return pl.Path(path).relative_to(self.out_dir).as_posix()


    def fresh(
            self,
            stage: str,
            section_hash: str,
            outputs: Iterable[str | pl.Path],
    ) -> bool:

        for path in outputs:

            entry = self.entries.get(self._key(path))

            if (
                entry is None or
                entry['stage'] != stage or
                entry['section_hash'] != section_hash or
                not pl.Path(path).exists() or
                _misc.file_sha256(path) != entry['sha256']
            ):

                return False

        return True


    def record(
            self,
            stage: str,
            section_hash: str,
            outputs: Iterable[str | pl.Path],
    ) -> None:

        for path in outputs:

            self.entries[self._key(path)] = {
                'stage': stage,
                'section_hash': section_hash,
                'sha256': _misc.file_sha256(path),
            }

        self.save()


    def save(self) -> None:

        _misc.write_json(self.path, {'artifacts': self.entries})
        _log(f'Manifest: {len(self.entries)} artifacts.', level = 2)
