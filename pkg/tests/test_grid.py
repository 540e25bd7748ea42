import json

import numpy as np
import pytest

from lrshield.grid import (
    line_flows,
    ptdf_matrix,
    load_network,
    as_load_vector,
    susceptance_matrix,
)
from lrshield._errors import NetworkError

__all__ = [
    'test_builtin_ieee30_dimensions',
    'test_line_flows_dimension_mismatch',
    'test_load_vector_rejects_negative',
    'test_network_disconnected',
    'test_network_errors',
    'test_network_syntax_error',
    'test_ptdf_slack_column_zero',
    'test_ptdf_three_bus',
    'test_susceptance_three_bus',
]


def _doc(three_bus_path) -> dict:

    with open(three_bus_path) as fp:

        return json.load(fp)


def test_susceptance_three_bus(three_bus):

    b = susceptance_matrix(three_bus)
    expected = np.array([
        [20., -10., -10.],
        [-10., 20., -10.],
        [-10., -10., 20.],
    ])

    assert np.allclose(b, expected)
    assert np.allclose(b.sum(axis = 1), 0)


def test_ptdf_three_bus(three_bus):

    r = ptdf_matrix(three_bus)

    # injection at bus 2 withdrawn at the slack splits 2/3 direct, 1/3 via 3
    assert np.allclose(r[:, 1], [-2 / 3, -1 / 3, 1 / 3])
    assert np.allclose(r[:, 2], [-1 / 3, -2 / 3, -1 / 3])


def test_ptdf_slack_column_zero(ieee30):

    r = ptdf_matrix(ieee30)

    assert r.shape == (ieee30.n_line, ieee30.n_bus)
    assert np.all(r[:, ieee30.slack_position] == 0)


def test_builtin_ieee30_dimensions(ieee30):

    assert ieee30.n_bus == 30
    assert ieee30.n_line == 41
    assert ieee30.n_gen == 6
    assert ieee30.n_l == 20
    assert ieee30.load_buses[:3] == (2, 3, 4)


def test_line_flows_dimension_mismatch(three_bus):

    assert np.allclose(
        line_flows(three_bus, [120, -60, -60]),
        [60, 60, 0],
    )

    with pytest.raises(ValueError, match = 'Dimension mismatch'):

        line_flows(three_bus, [1.0, -1.0])


def test_load_vector_rejects_negative(three_bus):

    assert np.allclose(as_load_vector(three_bus, [1, 2]), [1, 2])

    with pytest.raises(ValueError):

        as_load_vector(three_bus, [1, -2])

    with pytest.raises(ValueError):

        as_load_vector(three_bus, [1, 2, 3])


@pytest.mark.parametrize(
    'edit, field',
    [
        (lambda d: d['lines'][0].update(x = 0), 'lines[0]'),
        (lambda d: d['lines'][1].update(to = 9), 'lines[1]'),
        (lambda d: d['generators'][0].update(gmin_mw = 600), 'generators[0]'),
        (lambda d: d['lines'][2].pop('rating_mw'), 'lines[2]'),
        (lambda d: d.update(slack_bus = 7), 'slack_bus'),
    ],
)
def test_network_errors(three_bus_path, tmp_path, edit, field):

    doc = _doc(three_bus_path)
    edit(doc)
    path = tmp_path / 'broken.json'
    path.write_text(json.dumps(doc))

    with pytest.raises(NetworkError) as e:

        load_network(path)

    assert e.value.field == field


def test_network_disconnected(three_bus_path, tmp_path):

    doc = _doc(three_bus_path)
    doc['buses'].append({'index': 4, 'load': False})
    path = tmp_path / 'island.json'
    path.write_text(json.dumps(doc))
    net = load_network(path)

    with pytest.raises(NetworkError, match = 'disconnected'):

        ptdf_matrix(net)


def test_network_syntax_error(tmp_path):

    path = tmp_path / 'bad.json'
    path.write_text('{"buses": [1, 2,]}')

    with pytest.raises(NetworkError, match = 'line 1'):

        load_network(path)
