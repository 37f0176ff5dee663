import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hadwiger import exact
from hadwiger.errors import CertificateFailedError, WrongRegionError
from hadwiger.hexlattice import ball_faces, make_domain, make_torus
from hadwiger.model import VertexEnergies
from hadwiger.uniqueness import (
    P_C,
    boundary_independence_check,
    chessboard_decay_report,
    core_distribution,
    disagreement_certificate,
    hard_hexagon_convergence,
    no_domination_check,
)

ec = st.tuples(st.floats(0.05, 3), st.floats(0, 3)).map(lambda t: VertexEnergies(0, t[0], t[0] + t[1]))


def test_certificate_high_temperature():
    c = disagreement_certificate(VertexEnergies(0, 1, 2), 1e9)
    assert c.p_i < 1e-8 and c.unique and c.p_c == P_C
    assert disagreement_certificate(VertexEnergies(0, 1, 2), math.inf).p_i == 0


@settings(max_examples=40, deadline=None)
@given(ec, st.floats(0.02, 20))
def test_certificate_unique_on_ec_line(e, T):
    c = disagreement_certificate(e, T)
    assert c.unique and c.margin >= 0 and c.p_i <= 0.5


def test_certificate_fails_below_the_line():
    # e_F < e_H: filling can lower the energy, conditionals spread to nearly 1
    c = disagreement_certificate(VertexEnergies(0, 1, 0.5), 0.05)
    assert not c.unique and c.p_i == pytest.approx(1.0)
    assert c.witness == ((1, 1, 1, 1, 1, 1), (1, 0, 1, 0, 1, 0))


@settings(max_examples=40, deadline=None)
@given(ec, st.floats(0.05, 10), st.integers(0, 63))
def test_fill_probability_at_most_half_on_ec_line(e, T, ring):
    assert exact.single_site_conditional(ring, e, T) <= 0.5 + 1e-12


@settings(max_examples=30, deadline=None)
@given(ec, st.floats(0.05, 10))
def test_certificate_inversion_invariant(e, T):
    a, b = disagreement_certificate(e, T), disagreement_certificate(e.swapped(), T)
    assert a.p_i == pytest.approx(b.p_i, abs=1e-12)


def test_decay_report(t33):
    e = VertexEnergies(0, 1, 1)
    r = chessboard_decay_report(e, t33, [2, 3, 4, 5])
    assert all(r.respected)
    assert r.fitted_rate == pytest.approx(2.0, rel=0.05)
    assert all(m <= lit for m, lit in zip(r.measured, r.literal_bound))
    assert len(r.rows()) == 4 and len(r.ratios) == 3
    with pytest.raises(WrongRegionError):
        chessboard_decay_report(VertexEnergies(1, 1, 1), t33, [1])
    with pytest.raises(WrongRegionError):
        chessboard_decay_report(VertexEnergies(0, 1, 0.5), t33, [1])
    with pytest.raises(WrongRegionError):
        # H-F image is not accepted here
        chessboard_decay_report(VertexEnergies(0, 1, 1).swapped(), t33, [1])


def test_no_domination(t33):
    e = VertexEnergies(0, 1, 1)
    r = no_domination_check(e, t33, [0, 10])
    assert r.densities[0] == pytest.approx(0.5)
    assert 0.05 < r.densities[1] < 0.5 and r.ok
    m = no_domination_check(e.swapped(), t33, [0, 10])
    assert np.allclose(m.densities, 1 - np.array(r.densities))
    with pytest.raises(WrongRegionError):
        no_domination_check(VertexEnergies(1, 0, 1), t33, [1])


def test_hard_hexagon_convergence_single_face():
    host = make_torus(5, 5)
    centre = host.face_id(2, 2)
    # one filled neighbour: filling the centre now costs two H vertices
    bnd = {g: int(k == 0) for k, g in enumerate(host.neighbors(centre))}
    d = make_domain(host, [centre], bnd)
    r = hard_hexagon_convergence(d, VertexEnergies(0, 1, 1), [1, 5, 10])
    assert r.n_feasible == 1
    assert r.tv[-1] < 0.01 and r.tv[0] > r.tv[1] > r.tv[2]


def test_hard_hexagon_convergence_patch():
    host = make_torus(9, 9)
    d = make_domain(host, ball_faces(host, [40], 1), np.zeros(81, dtype=np.uint8))
    r = hard_hexagon_convergence(d, VertexEnergies(0, 1, 1.5), [2, 6, 12], event=[40, 41])
    assert r.event_faces == [40, 41] and r.tv[2] < r.tv[1] < r.tv[0]


def test_core_distribution_matches_full_law():
    host = make_torus(9, 9)
    interior = ball_faces(host, [40], 1)
    d = make_domain(host, interior, np.zeros(81, dtype=np.uint8))
    e = VertexEnergies(0.2, 0.5, 0.9)
    p = core_distribution(d, [40, 41], e, 0.7)
    full = exact.configuration_distribution(d, e, 0.7)
    free = list(d.free_faces)
    q = exact.marginal_distribution(full, [free.index(40), free.index(41)])
    assert np.allclose(p, q, atol=1e-12)


def test_boundary_independence():
    host = make_torus(9, 9)
    e = VertexEnergies(0, 1, 1)
    empty = np.zeros(81, dtype=np.uint8)
    same = boundary_independence_check(e, 1.0, empty, empty, host, [40], radii=(1,))
    assert same.differences == [0.0]
    r = boundary_independence_check(e, 1.0, empty, np.ones(81, dtype=np.uint8), host, [40], radii=(1, 2))
    assert r.decreasing and r.certificate.unique
    with pytest.raises(CertificateFailedError):
        boundary_independence_check(VertexEnergies(0, 1, 0.5), 0.05, empty, empty, host, [40])
