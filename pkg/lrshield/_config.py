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
Run configuration: defaults, file loading, overrides, validation, hashing.
"""

from __future__ import annotations

from typing import Any
from contextlib import closing
import copy
import json
import types
import typing
import pathlib as pl
import dataclasses

import toml
import yaml
import pandas as pd

from . import _misc
from ._errors import ConfigError

__all__ = [
    'AttacksConfig',
    'DEFAULTS_PATH',
    'DataConfig',
    'DetectorConfig',
    'FeaturesConfig',
    'MitigationConfig',
    'PathsConfig',
    'PredictorConfig',
    'RunConfig',
    'RunSection',
    'SweepConfig',
    'config_hash',
    'diagnostics',
    'load_config',
    'read_config_file',
    'section_hash',
]

DEFAULTS_PATH = pl.Path(__file__).parent / 'data' / 'default_config.toml'

# variant: (s, d)
VARIANT_LAGS = {1: (3, 2), 2: (3, 2), 3: (4, 3)}

_UNHASHED = {('run', 'jobs'), ('paths', 'out_dir')}
_TAU_REGIME = 0.2


@dataclasses.dataclass
class PathsConfig:

    network: str = 'builtin:ieee30'
    data: str = ''
    zones: str = 'builtin:pjm_zones'
    out_dir: str = 'out'


@dataclasses.dataclass
class DataConfig:
    """
    Attrs:
        source:
            `synthetic` or `pjm`; the latter reads `paths.data`.
        start, end:
            First and last calendar day, inclusive.
        noise:
            Standard deviation of the synthetic noise, relative to scale.
        ar_phi:
            Lag-one autocorrelation of the synthetic noise.
    """

    source: str = 'synthetic'
    start: str = '2015-01-01'
    end: str = '2018-12-31'
    tz: str = 'America/New_York'
    fill_spring_forward: bool = False
    noise: float = 0.02
    ar_phi: float = 0.9


@dataclasses.dataclass
class FeaturesConfig:

    variant: int = 2
    s: int | None = None
    d: int | None = None
    split: str = '2018-01-01'


    @property
    def lags(self) -> tuple[int, int]:

        s, d = VARIANT_LAGS.get(self.variant, (3, 2))

        return (
            s if self.s is None else self.s,
            d if self.d is None else self.d,
        )


@dataclasses.dataclass
class PredictorConfig:
    """
    Attrs:
        max_train_rows:
            Evenly spaced subsample of the training rows; 0 uses all.
    """

    eps: float = 0.01
    penalty: float = 100.0
    sigma: float = 0.01
    tol: float = 1e-3
    max_train_rows: int = 0


@dataclasses.dataclass
class DetectorConfig:
    """
    Attrs:
        sigma:
            RBF width; 0 means ``1 / q``.
        train_fraction:
            Share of the normal and of the attacked samples used in training.
        max_normal_train:
            Random subsample of the normal training samples; 0 uses all.
    """

    C: float = 2000.0
    tau_min: float = 0.03
    sigma: float = 0.0
    tol: float = 1e-3
    train_fraction: float = 0.8
    max_normal_train: int = 0


@dataclasses.dataclass
class AttacksConfig:
    """
    Attrs:
        n_random:
            Number of random attacks.
        tau_min, tau_max:
            Range of the random attack load shift grid, in steps of 1%.
        k_min, k_max:
            Range of attacked load counts; `k_max` 0 means all loads.
        max_retries:
            Load sets redrawn after an infeasible covariance.
        tau_grid:
            Load shift bounds of the bi-level attacks.
        max_critical_hours:
            Evenly spaced subsample of the critical hours; 0 uses all.
        max_lines_per_hour:
            Critical lines attacked per hour, lowest index first; 0
            attacks all.
    """

    n_random: int = 100000
    tau_min: float = 0.01
    tau_max: float = 0.20
    k_min: int = 2
    k_max: int = 0
    max_redraws: int = 100
    max_retries: int = 10
    cm: bool = True
    lo: bool = True
    tau_grid: list[float] = dataclasses.field(
        default_factory = lambda: [round(0.01 * i, 2) for i in range(1, 21)],
    )
    critical_frac: float = 0.8
    critical_min_lines: int = 2
    max_critical_hours: int = 0
    max_lines_per_hour: int = 0
    gap: float = 1e-6
    node_limit: int = 20000


    @property
    def random_taus(self) -> list[float]:

        lo = round(self.tau_min * 100)
        hi = round(self.tau_max * 100)

        return [i / 100 for i in range(lo, hi + 1)]


@dataclasses.dataclass
class SweepConfig:

    C: list[float] = dataclasses.field(
        default_factory = lambda: [10.0, 100.0, 1000.0, 2000.0],
    )
    tau_min: list[float] = dataclasses.field(
        default_factory = lambda: [0.01, 0.02, 0.03, 0.04, 0.05],
    )


@dataclasses.dataclass
class MitigationConfig:

    max_scenarios: int = 0
    cost_threshold: float = 0.01
    overflow_threshold: float = 1.0


@dataclasses.dataclass
class RunSection:

    jobs: int = 1
    cache: bool = True


@dataclasses.dataclass
class RunConfig:
    """
    Complete configuration of a run.
    """

    paths: PathsConfig = dataclasses.field(default_factory = PathsConfig)
    data: DataConfig = dataclasses.field(default_factory = DataConfig)
    features: FeaturesConfig = dataclasses.field(
        default_factory = FeaturesConfig,
    )
    predictor: PredictorConfig = dataclasses.field(
        default_factory = PredictorConfig,
    )
    detector: DetectorConfig = dataclasses.field(
        default_factory = DetectorConfig,
    )
    attacks: AttacksConfig = dataclasses.field(default_factory = AttacksConfig)
    sweep: SweepConfig = dataclasses.field(default_factory = SweepConfig)
    mitigation: MitigationConfig = dataclasses.field(
        default_factory = MitigationConfig,
    )
    run: RunSection = dataclasses.field(default_factory = RunSection)
    seed: int = 0


    def to_dict(self) -> dict:

        return dataclasses.asdict(self)


    @classmethod
    def from_dict(cls, doc: dict) -> RunConfig:

        return _build(cls, doc, '')


    @property
    def hash(self) -> str:

        return config_hash(self)


def _coerce(hint: Any, value: Any, key: str) -> Any:

    origin = typing.get_origin(hint)
    args = typing.get_args(hint)

    if origin in (types.UnionType, typing.Union):

        if value is None and type(None) in args:

            return None

        hint = next(a for a in args if a is not type(None))

        return _coerce(hint, value, key)

    if origin is list and isinstance(value, list):

        return [_coerce(args[0], v, key) for v in value]

    if hint is float and isinstance(value, (int, float)):

        if not isinstance(value, bool):

            return float(value)

    elif hint is int and isinstance(value, int):

        if not isinstance(value, bool):

            return value

    elif hint in (bool, str) and isinstance(value, hint):

        return value

    raise ConfigError(
        f'Expected {getattr(hint, "__name__", hint)}, got {value!r}.',
        key = key,
    )


def _build(cls: type, doc: Any, prefix: str):

    if not isinstance(doc, dict):

        raise ConfigError(
            f'Expected a table, got {type(doc).__name__}.',
            key = prefix.rstrip('.') or '<root>',
        )

    fields = {f.name: f for f in dataclasses.fields(cls)}
    hints = typing.get_type_hints(cls)
    unknown = sorted(set(doc) - set(fields))

    if unknown:

        raise ConfigError(
            'Unknown configuration key.',
            key = prefix + unknown[0],
        )

    kwargs = {}

    for name, value in doc.items():

        factory = fields[name].default_factory

        if dataclasses.is_dataclass(factory):

            kwargs[name] = _build(factory, value, f'{prefix}{name}.')

        else:

            kwargs[name] = _coerce(hints[name], value, prefix + name)

    return cls(**kwargs)


def _merge(base: dict, over: dict) -> dict:

    result = copy.deepcopy(base)

    for key, value in over.items():

        if isinstance(value, dict) and isinstance(result.get(key), dict):

            result[key] = _merge(result[key], value)

        else:

            result[key] = value

    return result


def read_config_file(path: str | pl.Path) -> dict:
    """
    Read a TOML, YAML or JSON configuration file.

    Raises:
        FileNotFoundError: If the file does not exist.
        ConfigError: If the file can not be parsed.
    """

    path = pl.Path(path)

    if not path.exists():

        raise FileNotFoundError(f'Configuration file not found: `{path}`.')

    suffix = path.suffix.lower()

    try:

        with closing(open(path)) as fp:

            if suffix == '.toml':

                doc = toml.load(fp)

            elif suffix in ('.yaml', '.yml'):

                doc = yaml.load(fp, Loader = yaml.FullLoader)

            elif suffix == '.json':

                doc = json.load(fp)

            else:

                raise ConfigError(
                    f'Unsupported configuration format `{suffix}`.',
                    key = str(path),
                )

    except (toml.TomlDecodeError, yaml.YAMLError, json.JSONDecodeError) as e:

        raise ConfigError(f'Can not parse `{path}`: {e}', key = str(path))

    return doc or {}


def load_config(
        path: str | pl.Path | None = None,
        overrides: dict | None = None,
        validate: bool = True,
) -> RunConfig:
    """
    Build the run configuration.

    Precedence: `overrides` (command line flags), then the file at `path`,
    then the shipped defaults.

    Args:
        path:
            Configuration file (TOML, YAML or JSON).
        overrides:
            Nested dict of values overriding the file.
        validate:
            Raise on the first error of `diagnostics`; the structure and
            value types are checked regardless.

    Raises:
        ConfigError: On unknown keys or invalid values; the message names
            the offending key.
    """

    doc = read_config_file(DEFAULTS_PATH)

    if path:

        doc = _merge(doc, read_config_file(path))

    if overrides:

        doc = _merge(doc, overrides)

    try:

        config = RunConfig.from_dict(doc)

    except TypeError as e:

        raise ConfigError(f'Invalid configuration: {e}', key = '<root>')

    errors = [d for d in diagnostics(config) if d['level'] == 'error']

    if validate and errors:

        raise ConfigError(errors[0]['message'], key = errors[0]['key'])

    return config


def _hashable(config: RunConfig, sections: tuple[str, ...] | None) -> dict:

    doc = config.to_dict()

    for section, key in _UNHASHED:

        doc[section].pop(key, None)

    if sections is not None:

        doc = {k: v for k, v in doc.items() if k in sections}

    return doc


def config_hash(config: RunConfig) -> str:
    """
    SHA-256 of the canonical JSON of everything that affects results.
    """

    return _misc.stable_hash(_hashable(config, None), length = 64)


def section_hash(config: RunConfig, *sections: str) -> str:
    """
    Hash of the given sections (and the seed, if named), keying caches.
    """

    return _misc.stable_hash(_hashable(config, sections))


def _diag(level: str, key: str, message: str) -> dict:

    return {'level': level, 'key': key, 'message': message}


def _positive(out: list, key: str, value: Any, strict: bool = True) -> None:

    ok = isinstance(value, (int, float)) and not isinstance(value, bool)
    ok = ok and (value > 0 if strict else value >= 0)

    if not ok:

        out.append(_diag(
            'error',
            key,
            f'`{key}` must be {"positive" if strict else "non-negative"}, '
            f'got {value!r}.',
        ))


def _timestamp(out: list, key: str, value: Any) -> pd.Timestamp | None:

    try:

        return pd.Timestamp(value)

    except (ValueError, TypeError):

        out.append(_diag('error', key, f'Malformed date `{value}`.'))


def _resolvable(out: list, key: str, value: str, prefix: str) -> None:

    if value.startswith('builtin:'):

        name = value[len('builtin:'):]
        data = pl.Path(__file__).parent / 'data'

        if not any(data.glob(f'{name}.*')):

            out.append(_diag('error', key, f'No builtin resource `{name}`.'))

    elif not pl.Path(value).exists():

        out.append(_diag('error', key, f'{prefix} `{value}` does not exist.'))


def diagnostics(config: RunConfig) -> list[dict]:
    """
    Every problem with the configuration.

    Returns:
        List of dicts with `level` (`error` or `warning`), `key` and
        `message`.
    """

    out = []
    c = config

    if not isinstance(c.seed, int) or isinstance(c.seed, bool) or c.seed < 0:

        out.append(_diag('error', 'seed', 'Seed must be a non-negative int.'))

    _resolvable(out, 'paths.network', c.paths.network, 'Network file')
    _resolvable(out, 'paths.zones', c.paths.zones, 'Zone table')

    if c.data.source not in ('synthetic', 'pjm'):

        out.append(_diag(
            'error', 'data.source',
            f'Unknown data source `{c.data.source}`.',
        ))

    elif c.data.source == 'pjm':

        if not c.paths.data:

            out.append(_diag(
                'error', 'paths.data',
                'PJM data source needs `paths.data`.',
            ))

        else:

            _resolvable(out, 'paths.data', c.paths.data, 'Data path')

    start = _timestamp(out, 'data.start', c.data.start)
    end = _timestamp(out, 'data.end', c.data.end)
    split = _timestamp(out, 'features.split', c.features.split)

    if start is not None and end is not None and start > end:

        out.append(_diag('error', 'data.end', 'End date precedes start.'))

    if None not in (start, end, split) and not start < split <= end:

        out.append(_diag(
            'error', 'features.split',
            f'Split {c.features.split} outside the data range.',
        ))

    _positive(out, 'data.noise', c.data.noise, strict = False)

    if not 0 <= c.data.ar_phi < 1:

        out.append(_diag('error', 'data.ar_phi', 'Must lie in [0, 1).'))

    if c.features.variant not in VARIANT_LAGS:

        out.append(_diag(
            'error', 'features.variant',
            f'Variant must be 1, 2 or 3, got {c.features.variant!r}.',
        ))

    s, d = c.features.lags

    if not (isinstance(s, int) and s >= 0):

        out.append(_diag('error', 'features.s', 'Must be an int >= 0.'))

    if not (isinstance(d, int) and d >= 1):

        out.append(_diag('error', 'features.d', 'Must be an int >= 1.'))

    _positive(out, 'predictor.eps', c.predictor.eps, strict = False)
    _positive(out, 'predictor.penalty', c.predictor.penalty)
    _positive(out, 'predictor.sigma', c.predictor.sigma, strict = False)
    _positive(out, 'predictor.tol', c.predictor.tol)
    _positive(
        out, 'predictor.max_train_rows', c.predictor.max_train_rows, False,
    )
    _positive(out, 'detector.C', c.detector.C)
    _positive(out, 'detector.tau_min', c.detector.tau_min, strict = False)
    _positive(out, 'detector.sigma', c.detector.sigma, strict = False)
    _positive(out, 'detector.tol', c.detector.tol)
    _positive(
        out, 'detector.max_normal_train', c.detector.max_normal_train, False,
    )

    if not 0 < c.detector.train_fraction < 1:

        out.append(_diag(
            'error', 'detector.train_fraction', 'Must lie in (0, 1).',
        ))

    a = c.attacks
    _positive(out, 'attacks.n_random', a.n_random, strict = False)
    _positive(out, 'attacks.tau_min', a.tau_min)
    _positive(out, 'attacks.max_redraws', a.max_redraws, strict = False)
    _positive(out, 'attacks.max_retries', a.max_retries, strict = False)
    _positive(out, 'attacks.node_limit', a.node_limit)
    _positive(out, 'attacks.gap', a.gap, strict = False)

    if a.tau_max < a.tau_min:

        out.append(_diag('error', 'attacks.tau_max', 'Below `tau_min`.'))

    if a.k_min < 2 or (a.k_max and a.k_max < a.k_min):

        out.append(_diag(
            'error', 'attacks.k_min',
            'Need 2 <= k_min <= k_max (k_max 0 means all loads).',
        ))

    if not a.tau_grid or any(t <= 0 for t in a.tau_grid):

        out.append(_diag(
            'error', 'attacks.tau_grid',
            'Load shift grid must be non-empty and positive.',
        ))

    if not 0 < a.critical_frac <= 1:

        out.append(_diag(
            'error', 'attacks.critical_frac', 'Must be in (0, 1].',
        ))

    _positive(out, 'attacks.critical_min_lines', a.critical_min_lines)

    if not c.sweep.C or not c.sweep.tau_min:

        out.append(_diag('error', 'sweep', 'Sweep grids must be non-empty.'))

    if not isinstance(c.run.jobs, int) or c.run.jobs < 1:

        out.append(_diag('error', 'run.jobs', 'Must be a positive int.'))

    for key, value in (
        ('detector.tau_min', c.detector.tau_min),
        ('attacks.tau_max', a.tau_max),
        ('attacks.tau_grid', max(a.tau_grid, default = 0)),
        *(('sweep.tau_min', t) for t in c.sweep.tau_min),
    ):

        if value > _TAU_REGIME:

            out.append(_diag(
                'warning', key,
                f'Load shift {value} exceeds the {_TAU_REGIME:.0%} regime '
                'of load redistribution attacks.',
            ))

    return out
