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
Pipeline stages and their artifacts.

Every stage reads the artifacts of the stages before it from the output
directory and writes its own; a stage whose artifacts are listed in the
manifest with its current configuration section hash is skipped.
"""

from __future__ import annotations

import dataclasses
import pathlib as pl

import numpy as np
import pandas as pd

from .. import _log, _misc, _context
from .. import loads as _loads
from .. import attack as _attack
from .. import pipeline as _pipeline
from ..svm import save_model, load_model
from ..grid import NetworkModel, load_network
from .._config import RunConfig, section_hash
from ._manifest import Manifest

__all__ = [
    'COMMANDS',
    'STAGES',
    'Run',
]

# Seed streams spawned from the master seed, one per random stage.
STREAMS = {
    'synth': 0,
    'split': 2,
    'detector': 3,
}

LOADS = 'loads.csv'
ZONAL = 'zonal.csv'
FEATURES = 'features'
PREDICTOR = 'predictor.json'
PREDICTIONS = 'predictions.csv'
ATTACKS = 'attacks.jsonl'
DISCARDS = 'discards.jsonl'
DETECTOR = 'detector.json'
SPLIT = 'detector_split.json'
MITIGATION = 'mitigation.jsonl'
EVAL = 'eval'
REPORT = 'report'
SUMMARY = 'summary.json'

_DATA = ('data', 'paths', 'seed')
_FEATURES = _DATA + ('features',)
_PREDICTOR = _FEATURES + ('predictor',)
_ATTACKS = _FEATURES + ('attacks',)
_DETECTOR = _PREDICTOR + ('attacks', 'detector')


@dataclasses.dataclass(frozen = True)
class Stage:

    name: str
    sections: tuple[str, ...]
    outputs: tuple[str, ...]
    method: str


STAGES = {
    s.name: s
    for s in (
        Stage('synth-data', _DATA, (ZONAL, LOADS), 'synth_data'),
        Stage('ingest', _DATA, (LOADS,), 'ingest'),
        Stage(
            'features',
            _FEATURES,
            tuple(
                f'{FEATURES}/{name}'
                for name in ('X.csv', 'Y.csv', 'features.json')
            ),
            'features',
        ),
        Stage(
            'train-predictor',
            _PREDICTOR,
            (PREDICTOR, PREDICTIONS),
            'train_predictor',
        ),
        Stage('gen-attacks', _ATTACKS, (ATTACKS, DISCARDS), 'gen_attacks'),
        Stage(
            'train-detector',
            _DETECTOR,
            (DETECTOR, SPLIT),
            'train_detector',
        ),
        Stage(
            'evaluate',
            _DETECTOR + ('sweep', 'mitigation'),
            tuple(
                f'{EVAL}/{_pipeline.TABLES[t]}'
                for t in ('predictor', 'sweep', 'detection', 'cm_lo')
            ) + (f'{EVAL}/{SUMMARY}',),
            'evaluate',
        ),
        Stage(
            'mitigate',
            _DETECTOR + ('mitigation',),
            (MITIGATION, f'{EVAL}/{_pipeline.TABLES["mitigation"]}'),
            'mitigate',
        ),
        Stage(
            'report',
            _DETECTOR + ('sweep', 'mitigation'),
            tuple(
                f'{REPORT}/{name}'
                for name in sorted(_pipeline.TABLES.values())
            ) + (f'{REPORT}/report.json',),
            'report',
        ),
    )
}

# Commands of the command line, in pipeline order.
COMMANDS = tuple(STAGES) + ('all', 'validate')


class Run:
    """
    One configured run over an output directory.
    """

    def __init__(self, config: RunConfig):

        self.config = config
        self.out_dir = pl.Path(config.paths.out_dir)
        self.manifest = Manifest(self.out_dir)
        self.provenance = {
            'config_hash': config.hash,
            'seed': config.seed,
        }
        self._net = None


    def path(self, name: str) -> pl.Path:

        return self.out_dir / name


    def seed(self, stream: str) -> np.random.SeedSequence:

        return np.random.SeedSequence([self.config.seed, STREAMS[stream]])


    @property
    def net(self) -> NetworkModel:

        if self._net is None:

            self._net = load_network(self.config.paths.network)

        return self._net


    def _input(self, name: str, stage: str) -> pl.Path:

        path = self.path(name)

        if not path.exists():

            raise FileNotFoundError(
                f'Missing `{path}`; run the `{stage}` command first.',
            )

        return path


    def execute(self, command: str) -> list[pl.Path]:
        """
        Run a stage, or every stage for `all`.

        Returns:
            The artifacts of the stages run or found up to date.
        """

        if command == 'all':

            source = (
                'synth-data'
                    if self.config.data.source == 'synthetic' else
                'ingest'
            )
            chain = [source] + list(STAGES)[2:]

            return [p for name in chain for p in self.execute(name)]

        stage = STAGES[command]
        key = section_hash(self.config, *stage.sections)
        outputs = [self.path(o) for o in stage.outputs]

        with _context.stage(command):

            if self.config.run.cache and self.manifest.fresh(
                command, key, outputs,
            ):

                _log(f'Stage `{command}` is up to date.')

                return outputs

            _log(f'Running stage `{command}`.')
            getattr(self, stage.method)()
            self.manifest.record(command, key, outputs)
            _log(f'Stage `{command}` finished.')

        return outputs


    # data

    def _write_loads(self, zonal: pd.DataFrame) -> None:

        d = self.config.data
        zones = _loads.read_zone_table(self.config.paths.zones)
        series = _loads.normalize_calendar(
            zonal,
            tz = d.tz or None,
            fill_spring_forward = d.fill_spring_forward,
        )
        series = _loads.map_zones_to_buses(series, zones)
        _loads.write_wide_csv(self.path(LOADS), series, **self.provenance)


    def synth_data(self) -> None:

        d = self.config.data
        zones = _loads.read_zone_table(self.config.paths.zones)
        zonal = _loads.synth_loads(
            d.start,
            d.end,
            zone_scales = pd.Series(
                zones['mean_mw'].to_numpy(float),
                index = zones['zone'],
            ),
            rng = np.random.default_rng(self.seed('synth')),
            noise = d.noise,
            ar_phi = d.ar_phi,
            tz = d.tz or None,
        )
        _loads.write_wide_csv(self.path(ZONAL), zonal, **self.provenance)
        self._write_loads(zonal)


    def ingest(self) -> None:

        d = self.config.data
        source = pl.Path(self.config.paths.data)
        files = (
            sorted(p for p in source.iterdir() if '.csv' in p.name)
                if source.is_dir() else
            [source]
        )
        zones = _loads.read_zone_table(self.config.paths.zones)
        zonal = _loads.ingest_csv(files, zones)
        first = pd.Timestamp(d.start).normalize()
        last = pd.Timestamp(d.end).normalize() + pd.Timedelta(days = 1)
        zonal = zonal[(zonal.index >= first) & (zonal.index < last)]
        self._write_loads(zonal)


    def series(self) -> pd.DataFrame:

        return _loads.read_load_series(self._input(LOADS, 'synth-data'))


    # prediction

    def features(self) -> None:

        f = self.config.features
        s, d = f.lags
        ds = _loads.build_features(self.series(), f.variant, s, d)
        train, test = _loads.chronological_split(ds, f.split)
        ds = _loads.standardize(ds, train, test)
        _loads.save_features(self.path(FEATURES), ds, **self.provenance)


    def dataset(self) -> _loads.FeatureDataset:

        self._input(f'{FEATURES}/features.json', 'features')

        return _loads.load_features(self.path(FEATURES))


    def train_predictor(self) -> None:

        p = self.config.predictor
        ds = self.dataset()
        bundle = _pipeline.train_predictor(
            ds,
            eps = p.eps,
            penalty = p.penalty,
            sigma = p.sigma,
            tol = p.tol,
            max_train_rows = p.max_train_rows,
            jobs = self.config.run.jobs,
        )
        _pipeline.save_predictor(
            self.path(PREDICTOR),
            bundle,
            **self.provenance,
        )
        predictions = pd.DataFrame(
            _pipeline.predict_loads(bundle, ds.X),
            index = ds.target_hours,
            columns = list(ds.loads),
        )
        _loads.write_wide_csv(
            self.path(PREDICTIONS),
            predictions,
            **self.provenance,
        )


    def truth(self, ds: _loads.FeatureDataset) -> pd.DataFrame:
        """
        True loads at the predicted hours.
        """

        return self.series().loc[ds.target_hours]


    def predictions(self) -> pd.DataFrame:

        path = self._input(PREDICTIONS, 'train-predictor')

        return _loads.read_load_series(path)


    # attacks

    def gen_attacks(self) -> None:

        ds = self.dataset()
        truth = self.truth(ds)

        if truth.shape[1] != self.net.n_l:

            raise ValueError(
                f'{truth.shape[1]} load columns, '
                f'the network has {self.net.n_l} loads.',
            )

        result = _attack.batch_generate(
            self.net,
            truth,
            self.config.attacks,
            seed = self.config.seed,
            jobs = self.config.run.jobs,
        )
        _attack.write_scenarios(
            self.path(ATTACKS),
            result.scenarios,
            provenance = self.provenance,
        )
        _misc.write_jsonl(
            self.path(DISCARDS),
            ({**d, 'provenance': self.provenance} for d in result.discards),
        )


    def scenarios(self) -> list[_attack.AttackScenario]:

        return _attack.read_scenarios(self._input(ATTACKS, 'gen-attacks'))


    # detection

    def samples(self) -> tuple[_pipeline.DetectorSet, list]:

        ds = self.dataset()
        scenarios = self.scenarios()
        samples = _pipeline.build_detector_samples(
            ds.target_hours,
            self.truth(ds).to_numpy(float),
            self.predictions().to_numpy(float),
            scenarios,
        )

        return samples, scenarios


    def train_detector(self) -> None:

        d = self.config.detector
        samples, _ = self.samples()
        train, test = _pipeline.split_detector_samples(
            samples,
            train_fraction = d.train_fraction,
            seed = self.seed('split'),
        )
        model = _pipeline.train_detector(
            samples,
            train,
            C = d.C,
            tau_min = d.tau_min,
            sigma = d.sigma,
            tol = d.tol,
            max_normal = d.max_normal_train,
            seed = self.seed('detector'),
        )
        save_model(self.path(DETECTOR), model, **self.provenance)
        _misc.write_json(
            self.path(SPLIT),
            {'train': train, 'test': test, **self.provenance},
        )


    def detector(self):

        model = load_model(self._input(DETECTOR, 'train-detector'))
        split = _misc.read_json(self._input(SPLIT, 'train-detector'))

        return (
            model,
            np.asarray(split['train'], int),
            np.asarray(split['test'], int),
        )


    def evaluate(self) -> None:

        c = self.config
        ds = self.dataset()
        truth = self.truth(ds).to_numpy(float)
        p_hat = self.predictions().to_numpy(float)
        errors = {
            name: _pipeline.metrics_rmse_mape(truth[rows], p_hat[rows])
            for name, rows in (('train', ds.train), ('test', ds.test))
        }
        samples, scenarios = self.samples()
        model, train, test = self.detector()
        stats = _pipeline.evaluate_detector(model, samples, test)
        n_normal = samples.normal.size
        consequential = np.array([
            n_normal + i
            for i, sc in enumerate(scenarios)
            if _pipeline.has_consequence(
                self.net,
                sc,
                c.mitigation.cost_threshold,
                c.mitigation.overflow_threshold,
            )
        ], dtype = int)
        stats_cons = _pipeline.evaluate_detector(
            model,
            samples,
            np.intersect1d(test, consequential),
        )
        sweep = _pipeline.sweep_hyperparameters(
            samples,
            train,
            test,
            C = c.sweep.C,
            tau_min = c.sweep.tau_min,
            sigma = c.detector.sigma,
            tol = c.detector.tol,
            max_normal = c.detector.max_normal_train,
            seed = self.seed('detector'),
            jobs = c.run.jobs,
        )
        tables = {
            'predictor': _pipeline.predictor_table(
                ds.loads,
                self.net.load_buses,
                errors['train'],
                errors['test'],
            ),
            'sweep': sweep,
            'detection': _pipeline.detection_table(stats),
            'cm_lo': _pipeline.cm_lo_table(stats, stats_cons),
        }

        for name, frame in tables.items():

            _pipeline.write_table(
                self.path(f'{EVAL}/{_pipeline.TABLES[name]}'),
                frame,
                **self.provenance,
            )

        discards = _misc.read_jsonl(self._input(DISCARDS, 'gen-attacks'))
        kinds = pd.Series([sc.kind for sc in scenarios], dtype = object)
        _misc.write_json(
            self.path(f'{EVAL}/{SUMMARY}'),
            {
                **self.provenance,
                'false_alarm': stats.false_alarm,
                'false_alarm_test': stats.false_alarm_test,
                'detector': {
                    'C': c.detector.C,
                    'tau_min': c.detector.tau_min,
                    'n_support': int(model.beta.size),
                },
                'samples': {
                    'normal': int(n_normal),
                    'train': int(train.size),
                    'test': int(test.size),
                },
                'scenarios': {
                    k: int(v)
                    for k, v in kinds.value_counts().sort_index().items()
                },
                'consequential': int(consequential.size),
                'discards': len(discards),
                'mape_test_mean': float(np.nanmean(errors['test'].mape)),
            },
        )


    def mitigate(self) -> None:

        c = self.config
        samples, scenarios = self.samples()
        model, _, _ = self.detector()
        p_hat = self.predictions()
        position = {h: i for i, h in enumerate(p_hat.index)}
        n_normal = samples.normal.size
        rows = [
            i for i, sc in enumerate(scenarios)
            if sc.kind in ('cm', 'lo')
        ]

        cap = c.mitigation.max_scenarios

        if cap and len(rows) > cap:

            pick = np.linspace(0, len(rows) - 1, cap)
            rows = [rows[i] for i in pick.round().astype(int)]

        labels = (
            _pipeline.detect(model, samples.U[n_normal + np.array(rows)])[0]
                if rows else
            np.zeros(0, int)
        )
        records = []

        for i, label in zip(rows, labels):

            sc = scenarios[i]

            with _context.labelled(f'{sc.kind}:{sc.hour}'):

                records.append(_pipeline.mitigate(
                    self.net,
                    sc,
                    sc.p,
                    p_hat.iloc[position[pd.Timestamp(sc.hour)]].to_numpy(),
                    detected = label == 1,
                ))

        _misc.write_jsonl(
            self.path(MITIGATION),
            (
                {**r.to_record(), 'provenance': self.provenance}
                for r in records
            ),
        )
        buckets = sorted({int(round(t * 100)) for t in c.attacks.tau_grid})
        table = pd.concat(
            [
                _pipeline.aggregate_mitigation(records, kind, buckets)
                for kind in ('cm', 'lo')
            ],
            ignore_index = True,
        )
        _pipeline.write_table(
            self.path(f'{EVAL}/{_pipeline.TABLES["mitigation"]}'),
            table,
            **self.provenance,
        )


    def report(self) -> None:

        tables = {}

        for name, fname in _pipeline.TABLES.items():

            stage = 'mitigate' if name == 'mitigation' else 'evaluate'
            tables[name] = _pipeline.read_table(
                self._input(f'{EVAL}/{fname}', stage),
            )

        summary = _misc.read_json(self._input(f'{EVAL}/{SUMMARY}', 'evaluate'))

        for key in self.provenance:

            summary.pop(key, None)

        report = _pipeline.EvalReport(tables = tables, summary = summary)
        report.write(self.path(REPORT), **self.provenance)
