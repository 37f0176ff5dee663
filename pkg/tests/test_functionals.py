import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from oracles import direct_euler_w_h, state_counts, torus_vertices

from hadwiger.errors import (
    BoundaryFaceError,
    CorruptCountsError,
    HadwigerError,
    UndeterminedVertexError,
)
from hadwiger.functionals import (
    Configuration,
    VertexState,
    delta_energy,
    energy,
    geometric_values_direct,
    geometric_values_from_states,
    vertex_state,
)
from hadwiger.hexlattice import make_domain, make_torus
from hadwiger.model import VertexEnergies


def test_single_hexagon(t66):
    c = Configuration(t66, np.eye(1, 36, 14, dtype=np.uint8)[0])
    assert tuple(geometric_values_direct(c)) == (1, 6, 1)
    assert c.state_counts == (66, 6, 0, 0)
    assert geometric_values_from_states(c.state_counts) == (1, 6, 1)


def test_adjacent_pair(t66):
    vals = np.zeros(36, dtype=np.uint8)
    vals[[0, 1]] = 1
    c = Configuration(t66, vals)
    assert tuple(geometric_values_direct(c)) == (2, 10, 1)
    assert geometric_values_from_states(c.state_counts) == (2, 10, 1)


def test_full_and_full_minus_one(t66):
    full = Configuration.full(t66)
    assert tuple(geometric_values_direct(full)) == (36, 0, 0)
    vals = np.ones(36, dtype=np.uint8)
    vals[7] = 0
    c = Configuration(t66, vals)
    assert tuple(geometric_values_direct(c)) == (35, 6, -1)
    assert geometric_values_from_states(c.state_counts) == (35, 6, -1)


def test_all_3x3_against_cell_counting(t33):
    for bits in itertools.product((0, 1), repeat=9):
        c = Configuration(t33, bits)
        assert tuple(geometric_values_direct(c)) == direct_euler_w_h(bits, 3, 3)
        assert geometric_values_from_states(c.state_counts) == direct_euler_w_h(bits, 3, 3)


@settings(max_examples=60, deadline=None)
@given(st.integers(3, 7), st.integers(3, 7), st.data())
def test_identity_random_tori(w, h, data):
    bits = data.draw(st.lists(st.integers(0, 1), min_size=w * h, max_size=w * h))
    c = Configuration(make_torus(w, h), bits)
    assert c.state_counts == state_counts(bits, torus_vertices(w, h))
    assert geometric_values_direct(c) == geometric_values_from_states(c.state_counts)


@settings(max_examples=40, deadline=None)
@given(st.lists(st.integers(0, 1), min_size=36, max_size=36), st.integers(0, 35))
def test_flip_delta_matches_recount(bits, f):
    c = Configuration(make_torus(6, 6), bits)
    before = np.array(c.state_counts)
    delta = c.flip_delta_counts(f)
    c.flip(f)
    assert (np.array(c.recount()) == before + delta).all()
    assert c.state_counts == c.recount()


def test_corrupt_counts():
    with pytest.raises(CorruptCountsError):
        geometric_values_from_states((0, 1, 0, 0))


def test_energy_exact_and_delta(t33):
    e = VertexEnergies("1/3", "-2/7", "5/11")
    c = Configuration(t33, [1, 0, 0, 1, 1, 0, 0, 0, 1])
    before = energy(c, e)
    d = delta_energy(c, 4, e)
    c.flip(4)
    assert energy(c, e) - before == d


def test_vertex_state_and_domains():
    host = make_torus(9, 9)
    d = make_domain(host, [40], np.ones(81, dtype=np.uint8))
    c = Configuration(d)
    v = host.face_vertices(40)[0]
    assert vertex_state(c, v) == VertexState.H
    far = host.face_vertices(0)[0]
    with pytest.raises(UndeterminedVertexError):
        vertex_state(c, far)
    with pytest.raises(BoundaryFaceError):
        c.flip_delta_counts(host.neighbors(40)[0])
    with pytest.raises(HadwigerError):
        geometric_values_direct(c)
    with pytest.raises(HadwigerError):
        c.complement()


def test_bad_values(t33):
    with pytest.raises(HadwigerError):
        Configuration(t33, [2] * 9)
    with pytest.raises(HadwigerError):
        Configuration(t33, [0] * 8)
