"""Hexagonal-lattice combinatorics.

Faces of the hexagonal lattice are the sites of a triangular lattice and are
addressed by axial coordinates ``(i, j)``.  The six neighbours of ``(i, j)``
are listed counter-clockwise starting from ``(i + 1, j)``::

    (1, 0), (0, 1), (-1, 1), (-1, 0), (0, -1), (1, -1)

Every lattice vertex is a triangle of three mutually adjacent faces.  There
are two per face: the "up" vertex ``2 * f`` joins ``(i, j), (i+1, j),
(i, j+1)`` and the "down" vertex ``2 * f + 1`` joins ``(i+1, j), (i, j+1),
(i+1, j+1)``.  Face ids are ``j * width + i`` so that a configuration reshaped
to ``(height, width)`` has one lattice row per array row.

A :class:`HexDomain` is a connected set of interior faces inside a host torus
together with the fixed values of its boundary ring.  Both classes expose the
same small surface used by the rest of the package: ``host``,
``free_faces``, ``counted_vertices`` and ``boundary``.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Mapping

import numpy as np

from .errors import (
    DimensionTooSmallError,
    DisconnectedComplementError,
    DisconnectedInteriorError,
    DomainError,
    IncompatibleDimensionsError,
    IncompleteBoundaryError,
    InvalidIdError,
)

NEIGHBOR_OFFSETS = ((1, 0), (0, 1), (-1, 1), (-1, 0), (0, -1), (1, -1))
UP, DOWN = 0, 1


@dataclass(frozen=True)
class HexTorus:
    """Periodic ``width x height`` patch of hexagonal faces."""

    width: int
    height: int

    def __post_init__(self):
        if self.width < 3 or self.height < 3:
            raise DimensionTooSmallError(
                f"torus must be at least 3x3 faces, got {self.width}x{self.height}"
            )

    @property
    def n_faces(self) -> int:
        return self.width * self.height

    @property
    def n_vertices(self) -> int:
        return 2 * self.n_faces

    @property
    def n_edges(self) -> int:
        return 3 * self.n_faces

    @property
    def has_sublattices(self) -> bool:
        return self.width % 3 == 0 and self.height % 3 == 0

    # -- shared region surface -------------------------------------------------
    @property
    def host(self) -> HexTorus:
        return self

    @cached_property
    def free_faces(self) -> np.ndarray:
        return np.arange(self.n_faces)

    @cached_property
    def counted_vertices(self) -> np.ndarray:
        return np.arange(self.n_vertices)

    @property
    def boundary(self) -> dict[int, int]:
        return {}

    # -- addressing ------------------------------------------------------------
    def face_id(self, i: int, j: int) -> int:
        return (j % self.height) * self.width + (i % self.width)

    def coords(self, f: int) -> tuple[int, int]:
        self._check_face(f)
        return f % self.width, f // self.width

    def _check_face(self, f) -> int:
        f = int(f)
        if not 0 <= f < self.n_faces:
            raise InvalidIdError(f"face id {f} outside 0..{self.n_faces - 1}")
        return f

    def _check_vertex(self, v) -> int:
        v = int(v)
        if not 0 <= v < self.n_vertices:
            raise InvalidIdError(f"vertex id {v} outside 0..{self.n_vertices - 1}")
        return v

    # -- incidence tables ------------------------------------------------------
    @cached_property
    def neighbor_table(self) -> np.ndarray:
        """``(n_faces, 6)`` neighbour ids in counter-clockwise order."""
        w, h = self.width, self.height
        j, i = np.divmod(np.arange(self.n_faces), w)
        cols = [((j + dj) % h) * w + (i + di) % w for di, dj in NEIGHBOR_OFFSETS]
        table = np.stack(cols, axis=1)
        table.flags.writeable = False
        return table

    @cached_property
    def vertex_table(self) -> np.ndarray:
        """``(n_vertices, 3)`` faces meeting at each vertex."""
        w, h = self.width, self.height
        j, i = np.divmod(np.arange(self.n_faces), w)
        fid = lambda di, dj: ((j + dj) % h) * w + (i + di) % w  # noqa: E731
        table = np.empty((self.n_vertices, 3), dtype=np.int64)
        table[0::2] = np.stack([fid(0, 0), fid(1, 0), fid(0, 1)], axis=1)
        table[1::2] = np.stack([fid(1, 0), fid(0, 1), fid(1, 1)], axis=1)
        table.flags.writeable = False
        return table

    @cached_property
    def face_vertex_table(self) -> np.ndarray:
        """``(n_faces, 6)`` vertex ids around each face.

        Vertex ``k`` sits between neighbours ``k`` and ``k + 1`` (mod 6).
        """
        w, h = self.width, self.height
        j, i = np.divmod(np.arange(self.n_faces), w)
        fid = lambda di, dj: ((j + dj) % h) * w + (i + di) % w  # noqa: E731
        cols = [
            2 * fid(0, 0) + UP,
            2 * fid(-1, 0) + DOWN,
            2 * fid(-1, 0) + UP,
            2 * fid(-1, -1) + DOWN,
            2 * fid(0, -1) + UP,
            2 * fid(0, -1) + DOWN,
        ]
        table = np.stack(cols, axis=1)
        table.flags.writeable = False
        return table

    @cached_property
    def edge_table(self) -> np.ndarray:
        """``(n_edges, 4)`` rows ``(face, other_face, vertex_a, vertex_b)``.

        Each face owns the edges towards neighbours 0, 1 and 2; the edge to
        neighbour ``k`` runs between vertices ``k - 1`` and ``k`` of the face.
        """
        nb = self.neighbor_table
        fv = self.face_vertex_table
        faces = np.arange(self.n_faces)
        rows = [np.stack([faces, nb[:, k], fv[:, (k - 1) % 6], fv[:, k]], axis=1) for k in range(3)]
        table = np.concatenate(rows)
        table.flags.writeable = False
        return table

    def neighbors(self, f: int) -> tuple[int, ...]:
        return tuple(int(g) for g in self.neighbor_table[self._check_face(f)])

    def vertex_faces(self, v: int) -> tuple[int, int, int]:
        a, b, c = self.vertex_table[self._check_vertex(v)]
        return int(a), int(b), int(c)

    def face_vertices(self, f: int) -> tuple[int, ...]:
        return tuple(int(v) for v in self.face_vertex_table[self._check_face(f)])

    # -- sublattices -----------------------------------------------------------
    @cached_property
    def sublattice_labels(self) -> np.ndarray:
        if not self.has_sublattices:
            raise IncompatibleDimensionsError(
                f"sublattices need both dimensions divisible by 3, got {self.width}x{self.height}"
            )
        j, i = np.divmod(np.arange(self.n_faces), self.width)
        labels = (i - j) % 3
        labels.flags.writeable = False
        return labels

    def sublattice(self, f: int) -> int:
        return int(self.sublattice_labels[self._check_face(f)])

    def translate(self, values: np.ndarray, di: int, dj: int) -> np.ndarray:
        """Shift a per-face array by ``(di, dj)`` around the torus."""
        grid = np.asarray(values).reshape(self.height, self.width)
        return np.roll(grid, shift=(dj, di), axis=(0, 1)).reshape(-1)


def make_torus(width: int, height: int) -> HexTorus:
    return HexTorus(int(width), int(height))


def _connected(host: HexTorus, faces: set[int]) -> bool:
    if not faces:
        return True
    start = next(iter(faces))
    seen = {start}
    queue = deque([start])
    nb = host.neighbor_table
    while queue:
        f = queue.popleft()
        for g in nb[f]:
            g = int(g)
            if g in faces and g not in seen:
                seen.add(g)
                queue.append(g)
    return len(seen) == len(faces)


@dataclass(frozen=True)
class HexDomain:
    """Interior faces of a host torus with a fixed boundary ring.

    ``boundary`` maps every face of the outer ring (faces adjacent to the
    interior but outside it) to 0 or 1.  Since any two faces sharing a vertex
    are neighbours, the ring determines every vertex incident to the
    interior.
    """

    host: HexTorus
    interior: tuple[int, ...]
    boundary: Mapping[int, int] = field(hash=False)

    def __post_init__(self):
        interior = tuple(sorted({self.host._check_face(f) for f in self.interior}))
        if not interior:
            raise DomainError("domain interior is empty")
        object.__setattr__(self, "interior", interior)
        inside = set(interior)
        if not _connected(self.host, inside):
            raise DisconnectedInteriorError("domain interior is not connected")
        outside = set(range(self.host.n_faces)) - inside
        if not outside:
            raise DisconnectedComplementError("domain interior covers the whole host torus")
        if not _connected(self.host, outside):
            raise DisconnectedComplementError("complement of the interior is not connected")

        ring = sorted({int(g) for f in interior for g in self.host.neighbor_table[f]} - inside)
        given = {int(k): v for k, v in dict(self.boundary).items()}
        missing = [g for g in ring if g not in given]
        if missing:
            raise IncompleteBoundaryError(f"boundary values missing for faces {missing}")
        bad = [g for g in ring if given[g] not in (0, 1)]
        if bad:
            raise DomainError(f"boundary values must be 0 or 1 (faces {bad})")
        if inside & given.keys():
            raise DomainError("boundary assignment overlaps the interior")
        object.__setattr__(self, "boundary", {g: int(given[g]) for g in ring})

    @property
    def boundary_faces(self) -> tuple[int, ...]:
        return tuple(self.boundary)

    @cached_property
    def free_faces(self) -> np.ndarray:
        return np.asarray(self.interior, dtype=np.int64)

    @cached_property
    def counted_vertices(self) -> np.ndarray:
        verts = np.unique(self.host.face_vertex_table[list(self.interior)])
        verts.flags.writeable = False
        return verts

    @property
    def n_faces(self) -> int:
        return len(self.interior)

    def with_boundary(self, boundary: Mapping[int, int] | np.ndarray) -> HexDomain:
        return make_domain(self.host, self.interior, boundary)


def make_domain(
    host: HexTorus,
    interior: Iterable[int],
    boundary_config: Mapping[int, int] | np.ndarray,
) -> HexDomain:
    """Build a domain; ``boundary_config`` may be a dict or a full host array.

    A full array is restricted to the boundary ring; a dict must cover it.
    """
    interior = tuple(int(f) for f in interior)
    if isinstance(boundary_config, Mapping):
        boundary = dict(boundary_config)
    else:
        values = np.asarray(boundary_config).reshape(-1)
        if values.size != host.n_faces:
            raise DomainError(f"boundary array has {values.size} entries, host has {host.n_faces} faces")
        inside = set(interior)
        ring = {int(g) for f in interior for g in host.neighbor_table[f]} - inside
        boundary = {g: int(values[g]) for g in ring}
    return HexDomain(host, interior, boundary)


def ball_faces(host: HexTorus, seeds: Iterable[int], radius: int) -> list[int]:
    """Faces within graph distance ``radius`` of any seed face."""
    frontier = {int(s) for s in seeds}
    ball = set(frontier)
    for _ in range(radius):
        frontier = {int(g) for f in frontier for g in host.neighbor_table[f]} - ball
        ball |= frontier
    return sorted(ball)


def hexagon_faces(host: HexTorus, center: int, radius: int) -> list[int]:
    """Hexagonal patch of ``3r(r+1) + 1`` faces around ``center``."""
    return ball_faces(host, [center], radius)


def parallelogram_faces(host: HexTorus, i0: int, j0: int, width: int, height: int) -> list[int]:
    return sorted(host.face_id(i0 + a, j0 + b) for b in range(height) for a in range(width))
