"""Configurations, vertex states and the area / perimeter / Euler functionals.

The geometric values of a torus configuration can be obtained two ways:

* directly, by counting cells of the closed filled complex
  (``geometric_values_direct``), and
* from the vertex-state tallies alone (``geometric_values_from_states``),
  using the per-vertex contributions

  ======  =======  ==========  =======
  state   area     perimeter   euler
  ======  =======  ==========  =======
  E       0        0           0
  C       1/6      1           +1/6
  H       2/6      1           -1/6
  F       3/6      0           0
  ======  =======  ==========  =======

The test-suite checks that both agree exactly on every 3x3 configuration and
on random larger ones.
"""

from __future__ import annotations

from enum import IntEnum
from typing import NamedTuple, Sequence

import numpy as np

from .errors import (
    BoundaryFaceError,
    CorruptCountsError,
    HadwigerError,
    UndeterminedVertexError,
)
from .hexlattice import HexDomain, HexTorus


class VertexState(IntEnum):
    E = 0
    C = 1
    H = 2
    F = 3


class GeometricValues(NamedTuple):
    area: int
    perimeter: int
    euler: int


class Configuration:
    """Binary face assignment on a torus or a domain, with cached state tallies.

    The full host array is stored; on a domain the boundary ring holds the
    fixed values and faces farther out stay 0 and are never read.
    """

    def __init__(self, region: HexTorus | HexDomain, filled=None):
        self.region = region
        host = region.host
        self._free_mask = np.zeros(host.n_faces, dtype=bool)
        self._free_mask[region.free_faces] = True
        values = np.zeros(host.n_faces, dtype=np.uint8)
        for g, v in region.boundary.items():
            values[g] = v
        if filled is not None:
            filled = np.asarray(filled, dtype=np.uint8).reshape(-1)
            if filled.size == host.n_faces:
                values[self._free_mask] = filled[self._free_mask]
            elif filled.size == len(region.free_faces):
                values[region.free_faces] = filled
            else:
                raise HadwigerError(
                    f"expected {host.n_faces} or {len(region.free_faces)} face values, got {filled.size}"
                )
            if np.any(filled > 1):
                raise HadwigerError("face values must be 0 or 1")
        self._values = values
        self._counts = self._tally()

    @classmethod
    def empty(cls, region) -> Configuration:
        return cls(region)

    @classmethod
    def full(cls, region) -> Configuration:
        return cls(region, np.ones(len(region.free_faces), dtype=np.uint8))

    @property
    def lattice(self) -> HexTorus:
        return self.region.host

    @property
    def is_torus(self) -> bool:
        return isinstance(self.region, HexTorus)

    @property
    def values(self) -> np.ndarray:
        view = self._values.view()
        view.flags.writeable = False
        return view

    @property
    def interior_values(self) -> np.ndarray:
        return self._values[self.region.free_faces].copy()

    @property
    def state_counts(self) -> tuple[int, int, int, int]:
        """``(n_E, n_C, n_H, n_F)`` over the counted vertices."""
        return tuple(int(c) for c in self._counts)

    @property
    def n_filled(self) -> int:
        return int(self._values[self._free_mask].sum())

    @property
    def filled_fraction(self) -> float:
        return self.n_filled / len(self.region.free_faces)

    def _tally(self) -> np.ndarray:
        host = self.region.host
        k = self._values[host.vertex_table[self.region.counted_vertices]].sum(axis=1)
        return np.bincount(k, minlength=4).astype(np.int64)

    def recount(self) -> tuple[int, int, int, int]:
        return tuple(int(c) for c in self._tally())

    def is_free(self, f: int) -> bool:
        return bool(self._free_mask[self.lattice._check_face(f)])

    def flip_delta_counts(self, f: int) -> np.ndarray:
        """Change of ``(n_E, n_C, n_H, n_F)`` if face ``f`` were flipped."""
        host = self.lattice
        if not self._free_mask[host._check_face(f)]:
            raise BoundaryFaceError(f"face {f} is not a free interior face")
        verts = host.face_vertex_table[f]
        k = self._values[host.vertex_table[verts]].sum(axis=1, dtype=np.int64)
        step = 1 - 2 * int(self._values[f])
        delta = np.zeros(4, dtype=np.int64)
        np.add.at(delta, k, -1)
        np.add.at(delta, k + step, 1)
        return delta

    def flip(self, f: int) -> None:
        delta = self.flip_delta_counts(f)
        self._values[f] ^= 1
        self._counts += delta

    def copy(self) -> Configuration:
        other = Configuration.__new__(Configuration)
        other.region = self.region
        other._free_mask = self._free_mask
        other._values = self._values.copy()
        other._counts = self._counts.copy()
        return other

    def complement(self) -> Configuration:
        if not self.is_torus:
            raise HadwigerError("complement is only defined for torus configurations")
        return Configuration(self.region, 1 - self._values)

    def __eq__(self, other):
        if not isinstance(other, Configuration):
            return NotImplemented
        return self.region == other.region and np.array_equal(self._values, other._values)

    def __repr__(self):
        return f"Configuration({self.region!r}, filled={self.n_filled}, counts={self.state_counts})"


def vertex_state(config: Configuration, v: int) -> VertexState:
    host = config.lattice
    faces = host.vertex_table[host._check_vertex(v)]
    if not config.is_torus:
        known = config._free_mask[faces] | np.isin(faces, list(config.region.boundary))
        if not known.all():
            raise UndeterminedVertexError(f"vertex {v} touches faces without assigned values")
    return VertexState(int(config._values[faces].sum()))


def geometric_values_direct(config: Configuration) -> GeometricValues:
    """Area, perimeter and V - E + F of the closed filled cell complex."""
    if not config.is_torus:
        raise HadwigerError("direct geometric values are defined for torus configurations")
    host = config.lattice
    vals = config._values.astype(np.int64)
    n_faces = int(vals.sum())
    k = vals[host.vertex_table].sum(axis=1)
    n_verts = int(np.count_nonzero(k))
    edges = host.edge_table
    a, b = vals[edges[:, 0]], vals[edges[:, 1]]
    n_edges = int(np.count_nonzero(a | b))
    perimeter = int(np.count_nonzero(a ^ b))
    return GeometricValues(n_faces, perimeter, n_verts - n_edges + n_faces)


def geometric_values_from_states(state_counts: Sequence[int]) -> GeometricValues:
    _, n_c, n_h, n_f = (int(c) for c in state_counts)
    area6 = n_c + 2 * n_h + 3 * n_f
    euler6 = n_c - n_h
    if area6 % 6 or euler6 % 6:
        raise CorruptCountsError(f"state counts {tuple(state_counts)} are not realisable on a torus")
    return GeometricValues(area6 // 6, n_c + n_h, euler6 // 6)


def energy(config: Configuration, energies):
    """Sum of vertex energies over counted vertices (``e_E = 0``).

    Exact when the energies are ``Fraction`` or ``int``.
    """
    _, n_c, n_h, n_f = config.state_counts
    return n_c * energies.e_C + n_h * energies.e_H + n_f * energies.e_F


def delta_energy(config: Configuration, f: int, energies):
    _, d_c, d_h, d_f = (int(d) for d in config.flip_delta_counts(f))
    return d_c * energies.e_C + d_h * energies.e_H + d_f * energies.e_F
