import numpy as np
import pandas as pd
import pytest

from lrshield.loads import (
    SCALE,
    ingest_csv,
    synth_loads,
    standardize,
    load_features,
    save_features,
    build_features,
    write_wide_csv,
    read_zone_table,
    read_load_series,
    nonexistent_hours,
    map_zones_to_buses,
    normalize_calendar,
    chronological_split,
)
from lrshield._errors import LoadDataError

__all__ = [
    'test_build_features_errors',
    'test_feature_dimensions',
    'test_feature_lags',
    'test_features_archive',
    'test_ingest_long_dst',
    'test_ingest_pjm_exports',
    'test_ingest_unknown_zone',
    'test_ingest_wide',
    'test_map_zones_scale',
    'test_normalize_duplicates',
    'test_normalize_gaps',
    'test_normalize_spring_forward',
    'test_split_counts',
    'test_standardize',
    'test_synth_loads',
    'test_wide_csv_round_trip',
    'test_zone_table',
]


def _hourly(values, start = '2018-01-01') -> pd.DataFrame:

    return pd.DataFrame(
        {'a': np.asarray(values, float)},
        index = pd.date_range(start, periods = len(values), freq = 'h'),
    )


def test_zone_table():

    zones = read_zone_table()

    assert len(zones) == 20
    assert zones['load'].tolist() == list(range(1, 21))
    assert zones.loc[0, 'zone'] == 'DOM'
    assert zones.loc[0, 'bus'] == 2

    with pytest.raises(FileNotFoundError):

        read_zone_table('no/such/table.tsv')


def test_synth_loads():

    zonal = synth_loads('2018-03-10', '2018-03-12', rng = 3)
    again = synth_loads('2018-03-10', '2018-03-12', rng = 3)
    scales = read_zone_table().set_index('zone')['mean_mw']

    # 72 wall-clock hours, one skipped on the morning of 11 March
    assert zonal.shape == (71, 20)
    assert pd.Timestamp('2018-03-11 02:00') not in zonal.index
    assert zonal.equals(again)
    assert np.all(zonal.to_numpy() >= 0.1 * scales[zonal.columns].to_numpy())

    with pytest.raises(ValueError):

        synth_loads('2018-01-01', '2018-01-02', ar_phi = 1.0)


def test_normalize_duplicates():

    series = pd.DataFrame(
        {'a': [1.0, 100.0, 200.0, 3.0]},
        index = pd.DatetimeIndex([
            '2018-01-01 00:00',
            '2018-01-01 01:00',
            '2018-01-01 01:00',
            '2018-01-01 02:00',
        ]),
    )
    out = normalize_calendar(series, tz = None)

    assert out['a'].tolist() == [1.0, 150.0, 3.0]

    triple = pd.concat([series, series.iloc[[1]]])

    with pytest.raises(LoadDataError, match = 'occurs 3 times'):

        normalize_calendar(triple, tz = None)


def test_normalize_gaps():

    series = _hourly([100, 0, 104]).drop(
        index = pd.Timestamp('2018-01-01 01:00'),
    )
    out = normalize_calendar(series, tz = None)

    assert out['a'].tolist() == [100.0, 102.0, 104.0]

    longer = _hourly([100, 0, 0, 106]).iloc[[0, 3]]

    with pytest.raises(LoadDataError, match = 'Gap of 2'):

        normalize_calendar(longer, tz = None)

    with pytest.raises(LoadDataError, match = 'Negative'):

        normalize_calendar(_hourly([1, -1]), tz = None)


def test_normalize_spring_forward():

    index = pd.date_range('2018-03-11 00:00', '2018-03-11 05:00', freq = 'h')
    skipped = nonexistent_hours(index[0], index[-1], 'America/New_York')
    series = pd.DataFrame(
        {'a': np.arange(len(index), dtype = float)},
        index = index,
    ).drop(index = skipped)

    assert skipped.tolist() == [pd.Timestamp('2018-03-11 02:00')]
    assert len(normalize_calendar(series)) == 5

    filled = normalize_calendar(series, fill_spring_forward = True)

    assert len(filled) == 6
    assert filled.loc['2018-03-11 02:00', 'a'] == pytest.approx(2.0)


def test_ingest_long_dst(tmp_path):

    path = tmp_path / 'hrl_load_metered.csv'
    path.write_text(
        'datetime_beginning_utc,datetime_beginning_ept,zone,load_area,mw\n'
        '11/4/2018 4:00:00 AM,11/4/2018 12:00:00 AM,DOM,DOM,100\n'
        '11/4/2018 4:00:00 AM,11/4/2018 12:00:00 AM,AE,AE_A,10\n'
        '11/4/2018 4:00:00 AM,11/4/2018 12:00:00 AM,AE,AE_B,5\n'
        '11/4/2018 5:00:00 AM,11/4/2018 1:00:00 AM,DOM,DOM,110\n'
        '11/4/2018 5:00:00 AM,11/4/2018 1:00:00 AM,AE,AE_A,20\n'
        '11/4/2018 5:00:00 AM,11/4/2018 1:00:00 AM,AE,AE_B,0\n'
        '11/4/2018 6:00:00 AM,11/4/2018 1:00:00 AM,DOM,DOM,130\n'
        '11/4/2018 6:00:00 AM,11/4/2018 1:00:00 AM,AE,AE_A,30\n'
        '11/4/2018 6:00:00 AM,11/4/2018 1:00:00 AM,AE,AE_B,0\n'
    )
    zonal = ingest_csv(path)

    assert zonal.columns.tolist() == ['DOM', 'AE']
    # the fall-back hour is kept twice until the calendar is normalized
    assert len(zonal) == 3
    assert zonal['AE'].tolist() == [15.0, 20.0, 30.0]

    series = normalize_calendar(zonal)

    assert series['DOM'].tolist() == [100.0, 120.0]
    assert series['AE'].tolist() == [15.0, 25.0]


def test_ingest_wide(tmp_path):

    path = tmp_path / 'wide.csv'
    path.write_text(
        'datetime,DOM,AE\n'
        '2018-01-01 00:00,100,10\n'
        '2018-01-01 01:00,101,11\n'
    )
    zonal = ingest_csv([path])

    assert zonal.shape == (2, 2)
    assert zonal['DOM'].iloc[1] == 101.0

    path.write_text('datetime,DOM\n2018-01-01 00:00,-1\n')

    with pytest.raises(LoadDataError, match = 'Negative'):

        ingest_csv(path)

    path.write_text('datetime,DOM\nnotatime,1\n')

    with pytest.raises(LoadDataError, match = 'Malformed timestamp'):

        ingest_csv(path)


def test_ingest_unknown_zone(tmp_path):

    path = tmp_path / 'wide.csv'
    path.write_text('datetime,DOM,XYZ\n2018-01-01 00:00,1,2\n')

    with pytest.raises(LoadDataError, match = 'XYZ'):

        ingest_csv(path)

    with pytest.raises(FileNotFoundError):

        ingest_csv(tmp_path / 'absent.csv')


def test_map_zones_scale():

    zones = read_zone_table().iloc[:2]
    zonal = pd.DataFrame(
        {'AE': [1000.0], 'DOM': [10000.0]},
        index = pd.DatetimeIndex(['2018-01-01']),
    )
    mapped = map_zones_to_buses(zonal, zones)

    assert mapped.columns.tolist() == [1, 2]
    assert mapped[1].iloc[0] == pytest.approx(13.08)
    assert mapped[2].iloc[0] == pytest.approx(1000 * SCALE)

    with pytest.raises(LoadDataError, match = 'Missing zone'):

        map_zones_to_buses(zonal[['DOM']], zones)


def test_feature_lags():

    series = _hourly(np.arange(30))
    ds = build_features(series, variant = 2, s = 1, d = 1)

    # first sample is hour 24, lags h, h-1, h-24, h-23
    assert ds.m == 5
    assert ds.X[0, 3:].tolist() == [24.0, 23.0, 0.0, 1.0]
    assert ds.Y[:, 0].tolist() == [25.0, 26.0, 27.0, 28.0, 29.0]
    assert ds.X[0, :3].tolist() == [1.0, 1.0, 0.0]
    assert ds.target_hours[0] == series.index[25]
    assert ds.columns[3:] == ['a:h', 'a:h-1', 'a:h-24', 'a:h-23']


@pytest.mark.parametrize(
    'variant, m, p',
    [
        (1, 35011, 11),
        (2, 35011, 163),
        (3, 34987, 223),
    ],
)
def test_feature_dimensions(loads_four_years, variant, m, p):

    assert len(loads_four_years) == 35060

    ds = build_features(loads_four_years, variant = variant)

    assert ds.m == m
    assert ds.n_l == 20
    assert ds.p == p
    assert ds.design(0).shape == (m, p)


def test_split_counts(loads_four_years):

    ds = build_features(loads_four_years, variant = 2)
    train, test = chronological_split(ds, '2018-01-01')

    assert (train.size, test.size) == (26253, 8758)
    assert ds.hours[test[0]] == pd.Timestamp('2018-01-01')

    with pytest.raises(LoadDataError):

        chronological_split(ds, '2030-01-01')


def test_build_features_errors():

    with pytest.raises(LoadDataError, match = 'Insufficient history'):

        build_features(_hourly(np.arange(30)), variant = 2)

    with pytest.raises(ValueError):

        build_features(_hourly(np.arange(30)), variant = 4)


def _small_dataset():

    rng = np.random.default_rng(5)
    series = pd.DataFrame(
        rng.uniform(10, 20, size = (80, 2)),
        index = pd.date_range('2018-01-01', periods = 80, freq = 'h'),
        columns = [1, 2],
    )

    return build_features(series, variant = 2, s = 2, d = 1)


def test_standardize():

    ds = _small_dataset()
    train, test = np.arange(40), np.arange(40, ds.m)
    scaled = standardize(ds, train, test)

    assert np.allclose(scaled.X[train, 3:].mean(axis = 0), 0)
    assert np.allclose(scaled.Y[train].std(axis = 0), 1)
    assert np.array_equal(scaled.test, test)
    assert np.allclose(
        scaled.Y * scaled.scaling['y_std'] + scaled.scaling['y_mean'],
        ds.Y,
    )

    with pytest.raises(ValueError, match = 'already standardized'):

        standardize(scaled)


def test_features_archive(tmp_path):

    ds = _small_dataset()
    scaled = standardize(ds, np.arange(40), np.arange(40, ds.m))
    save_features(tmp_path, scaled, config_hash = 'abc')
    back = load_features(tmp_path)

    assert back.loads == (1, 2)
    assert (back.variant, back.s, back.d) == (2, 2, 1)
    assert np.allclose(back.X, scaled.X)
    assert np.allclose(back.Y, scaled.Y)
    assert np.array_equal(back.train, scaled.train)
    assert np.allclose(back.scaling['x_std'], scaled.scaling['x_std'])
    assert back.target_hours.equals(scaled.target_hours)
    assert (tmp_path / 'X.csv').read_text().startswith('# config_hash=abc')


def test_wide_csv_round_trip(tmp_path):

    series = _small_dataset()
    frame = pd.DataFrame(
        series.Y,
        index = series.target_hours,
        columns = pd.Index([1, 2], name = 'load'),
    )
    path = tmp_path / 'loads.csv'
    write_wide_csv(path, frame, seed = 1)
    back = read_load_series(path)

    assert back.columns.tolist() == [1, 2]
    assert np.allclose(back.to_numpy(), frame.to_numpy())
    assert back.index.equals(pd.DatetimeIndex(frame.index, name = 'timestamp'))


@pytest.mark.requires_pjm
def test_ingest_pjm_exports(pjm_data_path):

    files = sorted(p for p in pjm_data_path.iterdir() if '.csv' in p.name)
    series = normalize_calendar(ingest_csv(files))
    mapped = map_zones_to_buses(series)

    assert mapped.shape[1] == 20
    assert series.index.is_monotonic_increasing
    assert not mapped.isna().to_numpy().any()
