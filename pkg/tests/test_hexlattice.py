import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from oracles import torus_adjacency, torus_vertices

from hadwiger.errors import (
    DimensionTooSmallError,
    DisconnectedComplementError,
    DisconnectedInteriorError,
    DomainError,
    IncompatibleDimensionsError,
    IncompleteBoundaryError,
    InvalidIdError,
)
from hadwiger.hexlattice import (
    HexDomain,
    ball_faces,
    hexagon_faces,
    make_domain,
    make_torus,
)

dims = st.tuples(st.integers(3, 9), st.integers(3, 9))


def test_counts_6x6(t66):
    assert (t66.n_faces, t66.n_vertices, t66.n_edges) == (36, 72, 108)


@pytest.mark.parametrize("w,h", [(2, 3), (3, 2), (0, 5)])
def test_too_small(w, h):
    with pytest.raises(DimensionTooSmallError):
        make_torus(w, h)


def test_invalid_ids(t33):
    with pytest.raises(InvalidIdError):
        t33.neighbors(9)
    with pytest.raises(InvalidIdError):
        t33.vertex_faces(18)


@given(dims)
def test_tables_match_oracle(wh):
    w, h = wh
    t = make_torus(w, h)
    adj = torus_adjacency(w, h)
    for f in range(t.n_faces):
        assert set(t.neighbors(f)) == adj[f]
        assert len(set(t.neighbors(f))) == 6
    assert sorted(map(tuple, np.sort(t.vertex_table, axis=1))) == sorted(tuple(sorted(v)) for v in torus_vertices(w, h))


@given(dims)
def test_vertex_faces_mutually_adjacent(wh):
    t = make_torus(*wh)
    for v in range(t.n_vertices):
        a, b, c = t.vertex_faces(v)
        assert b in t.neighbors(a) and c in t.neighbors(a) and c in t.neighbors(b)


@given(dims)
def test_face_vertex_incidence(wh):
    t = make_torus(*wh)
    seen = np.zeros(t.n_vertices, dtype=int)
    for f in range(t.n_faces):
        verts = t.face_vertices(f)
        assert len(set(verts)) == 6
        for v in verts:
            assert f in t.vertex_faces(v)
        seen[list(verts)] += 1
    assert (seen == 3).all()


@given(dims)
def test_consecutive_face_vertices_share_an_edge_neighbour(wh):
    # vertex k lies between neighbours k and k+1
    t = make_torus(*wh)
    for f in range(0, t.n_faces, 3):
        nb = t.neighbors(f)
        for k, v in enumerate(t.face_vertices(f)):
            assert set(t.vertex_faces(v)) == {f, nb[k], nb[(k + 1) % 6]}


def test_sublattices_proper_colouring():
    t = make_torus(6, 9)
    lab = t.sublattice_labels
    assert np.bincount(lab).tolist() == [18, 18, 18]
    for f in range(t.n_faces):
        assert all(lab[g] != lab[f] for g in t.neighbors(f))


def test_sublattices_need_multiples_of_three():
    with pytest.raises(IncompatibleDimensionsError):
        make_torus(4, 6).sublattice_labels


def test_translate_roundtrip(t66):
    vals = np.arange(36)
    out = t66.translate(t66.translate(vals, 2, 5), -2, -5)
    assert (out == vals).all()


def test_hexagon_patch_sizes():
    host = make_torus(9, 9)
    c = host.face_id(4, 4)
    assert [len(hexagon_faces(host, c, r)) for r in range(4)] == [1, 7, 19, 37]


def test_domain_ring_and_vertices():
    host = make_torus(9, 9)
    d = make_domain(host, [host.face_id(4, 4)], np.zeros(81, dtype=np.uint8))
    assert sorted(d.boundary_faces) == sorted(host.neighbors(host.face_id(4, 4)))
    assert len(d.counted_vertices) == 6
    three = ball_faces(host, [host.face_id(4, 4)], 0) + [host.face_id(5, 4), host.face_id(4, 5)]
    d3 = make_domain(host, three, np.zeros(81, dtype=np.uint8))
    assert len(d3.counted_vertices) == 13


def test_domain_errors():
    host = make_torus(9, 9)
    zeros = np.zeros(81, dtype=np.uint8)
    with pytest.raises(DomainError):
        make_domain(host, [], zeros)
    with pytest.raises(DisconnectedInteriorError):
        make_domain(host, [0, 40], zeros)
    ring = hexagon_faces(host, 40, 2)
    annulus = sorted(set(ring) - set(hexagon_faces(host, 40, 1)))
    with pytest.raises(DisconnectedComplementError):
        make_domain(host, annulus, zeros)
    with pytest.raises(IncompleteBoundaryError):
        HexDomain(host, (40,), {})
    with pytest.raises(DisconnectedComplementError):
        make_domain(make_torus(3, 3), list(range(9)), np.zeros(9, dtype=np.uint8))
