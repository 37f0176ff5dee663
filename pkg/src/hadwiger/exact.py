"""Brute-force oracle on small tori and domains.

Enumeration runs once per (region, clamped faces) and produces a *density of
states*: the number of configurations for every vertex-state tally
``(n_C, n_H, n_F)`` together with their summed filled-face count.  Partition
functions and count-based expectations at any temperature and any energies
follow from it with a log-sum-exp, so temperature scans are cheap.  Per-face
marginals need a second, weighted pass.

The configuration space is split into a fixed number of blocks by the top
free-face bits; blocks can run on worker threads and are merged in block
order, so results do not depend on the thread count.
"""

from __future__ import annotations

import builtins
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Mapping

import numpy as np
from scipy.special import expit, logsumexp

from . import _kernels
from .errors import HadwigerError, InfeasibleBoundaryError, TooLargeError
from .hexlattice import HexDomain, HexTorus
from .model import CONVENTION, VertexEnergies

DEFAULT_CAP = 30
TABLE_CAP = 22
_BLOCK_BITS = 4


def default_threads() -> int:
    env = os.environ.get("HADWIGER_THREADS")
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


def beta_of(T: float) -> float:
    T = float(T)
    if not T > 0:
        raise HadwigerError(f"temperature must be positive, got {T}")
    return 0.0 if math.isinf(T) else 1.0 / T


@dataclass(frozen=True)
class _Problem:
    region: object
    free: np.ndarray  # global ids of free faces, local order
    base_vals: np.ndarray  # int8 over local faces
    vtx_faces: np.ndarray  # (nv, 3) local face ids
    face_vtx: np.ndarray  # (n_free, 6) local counted-vertex ids

    @property
    def n_free(self) -> int:
        return len(self.free)

    @property
    def nv(self) -> int:
        return len(self.vtx_faces)


def _build_problem(region, clamps: Mapping[int, int] | None = None) -> _Problem:
    host = region.host
    clamps = dict(clamps or {})
    free = [int(f) for f in region.free_faces if int(f) not in clamps]
    fixed = dict(region.boundary)
    fixed.update({int(f): int(v) for f, v in clamps.items()})
    local = {f: i for i, f in builtins.enumerate(free)}
    for f in fixed:
        local.setdefault(f, len(local))
    base = np.zeros(len(local), dtype=np.int8)
    for f, v in fixed.items():
        base[local[f]] = v
    counted = np.asarray(region.counted_vertices)
    vtx_faces = np.vectorize(local.__getitem__, otypes=[np.int64])(host.vertex_table[counted])
    vpos = {int(v): i for i, v in builtins.enumerate(counted)}
    face_vtx = np.array(
        [[vpos[int(v)] for v in host.face_vertex_table[f]] for f in free], dtype=np.int64
    ).reshape(len(free), 6)
    return _Problem(region, np.asarray(free, dtype=np.int64), base, vtx_faces, face_vtx)


def _blocks(n_free: int) -> tuple[int, int]:
    high = min(_BLOCK_BITS, n_free)
    return n_free - high, 1 << high


@dataclass(frozen=True)
class DensityOfStates:
    """Configuration counts per vertex-state tally of one region."""

    n_free: int
    nv: int
    n_c: np.ndarray
    n_h: np.ndarray
    n_f: np.ndarray
    multiplicity: np.ndarray
    fill_sum: np.ndarray
    keys: np.ndarray = field(repr=False)

    @property
    def n_e(self) -> np.ndarray:
        return self.nv - self.n_c - self.n_h - self.n_f

    def energies(self, e: VertexEnergies) -> np.ndarray:
        c, h, f = e.as_floats()
        return self.n_c * c + self.n_h * h + self.n_f * f

    def log_weights(self, e: VertexEnergies, T: float) -> np.ndarray:
        """Log Boltzmann weight of one configuration per tally."""
        return -beta_of(T) * self.energies(e)

    def log_z(self, e: VertexEnergies, T: float) -> float:
        return float(logsumexp(self.log_weights(e, T), b=self.multiplicity))

    def probabilities(self, e: VertexEnergies, T: float) -> np.ndarray:
        """Probability mass of each tally (sums to 1)."""
        lw = self.log_weights(e, T) + np.log(self.multiplicity)
        return np.exp(lw - logsumexp(lw))

    def expectations(self, e: VertexEnergies, T: float) -> dict[str, float]:
        p = self.probabilities(e, T)
        fill = float(np.sum(p * self.fill_sum / self.multiplicity))
        frac = [float(np.sum(p * n)) / self.nv for n in (self.n_e, self.n_c, self.n_h, self.n_f)]
        return {
            "energy_per_vertex": float(np.sum(p * self.energies(e))) / self.nv,
            "filled_density": fill / self.n_free if self.n_free else float("nan"),
            "frac_E": frac[0],
            "frac_C": frac[1],
            "frac_H": frac[2],
            "frac_F": frac[3],
        }

    def variance_energy(self, e: VertexEnergies, T: float) -> float:
        p = self.probabilities(e, T)
        en = self.energies(e)
        mean = np.sum(p * en)
        return float(np.sum(p * (en - mean) ** 2))

    def ground_count(self, e: VertexEnergies, rtol: float = 1e-12) -> tuple[float, int]:
        """Minimum energy and the number of configurations attaining it."""
        en = self.energies(e)
        lo = en.min()
        tol = rtol * max(1.0, float(np.abs(en).max()))
        sel = en <= lo + tol
        return float(lo), int(self.multiplicity[sel].sum())


def _check_cap(n: int, cap: int) -> None:
    if n > cap:
        raise TooLargeError(f"{n} free faces exceeds the enumeration cap of {cap}")


@lru_cache(maxsize=64)
def _dos_cached(region, clamps: tuple, cap: int, threads: int) -> DensityOfStates:
    prob = _build_problem(region, dict(clamps))
    _check_cap(prob.n_free, cap)
    n_low, n_blocks = _blocks(prob.n_free)
    size = (prob.nv + 1) ** 3
    n_workers = max(1, min(threads, n_blocks))

    def work(worker: int):
        dos = np.zeros(size, dtype=np.int64)
        fills = np.zeros(size, dtype=np.int64)
        for block in range(worker, n_blocks, n_workers):
            _kernels.dos_partition(
                n_low, block, prob.n_free, prob.base_vals, prob.vtx_faces, prob.face_vtx, dos, fills
            )
        return dos, fills

    if n_workers == 1:
        parts = [work(0)]
    else:
        with ThreadPoolExecutor(n_workers) as pool:
            parts = list(pool.map(work, range(n_workers)))
    dos = sum(p[0] for p in parts)
    fills = sum(p[1] for p in parts)
    keys = np.flatnonzero(dos)
    stride = prob.nv + 1
    n_c, rest = np.divmod(keys, stride * stride)
    n_h, n_f = np.divmod(rest, stride)
    return DensityOfStates(
        prob.n_free, prob.nv, n_c, n_h, n_f, dos[keys], fills[keys], keys
    )


def density_of_states(
    region, clamps: Mapping[int, int] | None = None, cap: int = DEFAULT_CAP, threads: int | None = None
) -> DensityOfStates:
    clamps_t = tuple(sorted((int(f), int(v)) for f, v in (clamps or {}).items()))
    return _dos_cached(region, clamps_t, int(cap), int(threads or default_threads()))


def face_marginals(
    region, e: VertexEnergies, T: float, cap: int = DEFAULT_CAP, threads: int | None = None
) -> np.ndarray:
    """Fill probability of every free face (in ``region.free_faces`` order)."""
    dos = density_of_states(region, cap=cap, threads=threads)
    prob = _build_problem(region)
    logw = np.full((prob.nv + 1) ** 3, -np.inf)
    logw[dos.keys] = dos.log_weights(e, T)
    log_z = dos.log_z(e, T)
    n_low, n_blocks = _blocks(prob.n_free)
    n_workers = max(1, min(int(threads or default_threads()), n_blocks))

    def work(block: int) -> np.ndarray:
        acc = np.zeros(prob.n_free + 1)
        _kernels.marginal_partition(
            n_low, block, prob.n_free, prob.base_vals, prob.vtx_faces, prob.face_vtx, logw, log_z, acc
        )
        return acc

    if n_workers == 1:
        accs = [work(b) for b in range(n_blocks)]
    else:
        with ThreadPoolExecutor(n_workers) as pool:
            accs = list(pool.map(work, range(n_blocks)))
    total = np.zeros(prob.n_free + 1)
    for acc in accs:
        total += acc
    return total[:-1] / total[-1]


@dataclass
class ExactSummary:
    log_Z: float
    expectations: dict[str, float]
    marginals: np.ndarray | None
    faces: np.ndarray
    T: float
    energies: VertexEnergies

    def to_json(self) -> dict:
        return {
            "log_Z": self.log_Z,
            "T": self.T if math.isfinite(self.T) else "inf",
            "model": self.energies.to_json(),
            "expectations": self.expectations,
            "n_faces": int(len(self.faces)),
            "convention": CONVENTION,
        }


def enumerate_summary(
    region: HexTorus | HexDomain,
    e: VertexEnergies,
    T: float,
    cap: int = DEFAULT_CAP,
    marginals: bool = True,
    threads: int | None = None,
) -> ExactSummary:
    """Exact log-partition function, expectations and per-face marginals."""
    beta_of(T)
    dos = density_of_states(region, cap=cap, threads=threads)
    expectations = dos.expectations(e, T)
    marg = None
    if marginals:
        marg = face_marginals(region, e, T, cap=cap, threads=threads)
        host = region.host
        if host.has_sublattices:
            labels = host.sublattice_labels[region.free_faces]
            for s in range(3):
                sel = labels == s
                expectations[f"sublattice_density_{s}"] = float(marg[sel].mean()) if sel.any() else float("nan")
    return ExactSummary(dos.log_z(e, T), expectations, marg, np.asarray(region.free_faces), float(T), e)


def configuration_log_weights(region, e: VertexEnergies, T: float, cap: int = TABLE_CAP) -> np.ndarray:
    """Unnormalised log weight of every configuration.

    Index bit ``k`` is the value of ``region.free_faces[k]``.
    """
    prob = _build_problem(region)
    _check_cap(prob.n_free, cap)
    keys = _config_keys(region, cap)
    stride = prob.nv + 1
    n_c, rest = np.divmod(keys, stride * stride)
    n_h, n_f = np.divmod(rest, stride)
    c, h, f = e.as_floats()
    return -beta_of(T) * (n_c * c + n_h * h + n_f * f)


@lru_cache(maxsize=16)
def _config_keys(region, cap: int) -> np.ndarray:
    prob = _build_problem(region)
    _check_cap(prob.n_free, cap)
    keys = np.empty(1 << prob.n_free, dtype=np.int64)
    _kernels.config_table(prob.n_free, prob.base_vals, prob.vtx_faces, prob.face_vtx, keys)
    keys.flags.writeable = False
    return keys


def configuration_distribution(region, e: VertexEnergies, T: float, cap: int = TABLE_CAP) -> np.ndarray:
    lw = configuration_log_weights(region, e, T, cap)
    return np.exp(lw - logsumexp(lw))


def configuration_state_counts(region, cap: int = TABLE_CAP) -> np.ndarray:
    """``(2**n, 4)`` tallies ``(n_E, n_C, n_H, n_F)`` of every configuration."""
    prob = _build_problem(region)
    keys = _config_keys(region, cap)
    stride = prob.nv + 1
    n_c, rest = np.divmod(keys, stride * stride)
    n_h, n_f = np.divmod(rest, stride)
    return np.stack([prob.nv - n_c - n_h - n_f, n_c, n_h, n_f], axis=1)


def marginal_distribution(probs: np.ndarray, positions: Iterable[int]) -> np.ndarray:
    """Push a full table forward to the joint law of a few free faces.

    ``positions`` index into ``region.free_faces``; pattern bit ``k`` is the
    value at ``positions[k]``.
    """
    positions = list(positions)
    idx = np.arange(probs.size)
    pattern = np.zeros(probs.size, dtype=np.int64)
    for k, pos in builtins.enumerate(positions):
        pattern |= ((idx >> pos) & 1) << k
    return np.bincount(pattern, weights=probs, minlength=1 << len(positions))


def tv_distance(p: np.ndarray, q: np.ndarray) -> float:
    return 0.5 * float(np.abs(np.asarray(p) - np.asarray(q)).sum())


def hard_hexagon_distribution(region, cap: int = TABLE_CAP) -> np.ndarray:
    """Uniform law on configurations with no counted vertex in state H or F."""
    counts = configuration_state_counts(region, cap)
    feasible = (counts[:, 2] == 0) & (counts[:, 3] == 0)
    n = int(feasible.sum())
    if n == 0:
        raise InfeasibleBoundaryError("boundary configuration admits no hard-hexagon configuration")
    return feasible / n


# -- single-site conditionals --------------------------------------------------

_DIHEDRAL_CACHE: dict[int, int] = {}


class NeighborBoundary:
    """Values on the six neighbours of a face, in counter-clockwise order."""

    __slots__ = ("bits",)

    def __init__(self, ring):
        if isinstance(ring, (int, np.integer)):
            if not 0 <= int(ring) < 64:
                raise HadwigerError(f"ring index must be in 0..63, got {ring}")
            bits = tuple((int(ring) >> k) & 1 for k in range(6))
        else:
            bits = tuple(int(b) for b in ring)
            if len(bits) != 6 or any(b not in (0, 1) for b in bits):
                raise HadwigerError(f"ring must be six binary values, got {ring!r}")
        self.bits = bits

    @property
    def index(self) -> int:
        return sum(b << k for k, b in builtins.enumerate(self.bits))

    def images(self) -> list[tuple[int, ...]]:
        out = []
        for seq in (self.bits, self.bits[::-1]):
            for r in range(6):
                out.append(seq[r:] + seq[:r])
        return out

    def canonical(self) -> int:
        idx = self.index
        if idx not in _DIHEDRAL_CACHE:
            _DIHEDRAL_CACHE[idx] = min(NeighborBoundary(img).index for img in self.images())
        return _DIHEDRAL_CACHE[idx]

    @property
    def class_id(self) -> int:
        return DIHEDRAL_CLASSES.index(self.canonical())

    def vertex_counts(self, center: int) -> tuple[int, int, int, int]:
        """Tally of the six vertex states around the centre face."""
        counts = [0, 0, 0, 0]
        for k in range(6):
            counts[center + self.bits[k] + self.bits[(k + 1) % 6]] += 1
        return tuple(counts)

    def __eq__(self, other):
        return isinstance(other, NeighborBoundary) and self.bits == other.bits

    def __hash__(self):
        return hash(self.bits)

    def __repr__(self):
        return f"NeighborBoundary({''.join(map(str, self.bits))})"


DIHEDRAL_CLASSES = sorted({NeighborBoundary(i).canonical() for i in range(64)})


def _ring_energy(ring: NeighborBoundary, center: int, e: VertexEnergies) -> float:
    vec = [float(v) for v in e.vector]
    return sum(n * vec[s] for s, n in builtins.enumerate(ring.vertex_counts(center)))


def single_site_conditional(boundary, e: VertexEnergies, T: float) -> float:
    """Probability that a face is filled given its six neighbours."""
    ring = boundary if isinstance(boundary, NeighborBoundary) else NeighborBoundary(boundary)
    beta = beta_of(T)
    d = _ring_energy(ring, 1, e) - _ring_energy(ring, 0, e)
    return float(expit(-beta * d))


def conditional_tv_distance(b1, b2, e: VertexEnergies, T: float) -> float:
    return abs(single_site_conditional(b1, e, T) - single_site_conditional(b2, e, T))


def conditional_table(e: VertexEnergies, T: float) -> list[dict]:
    """One row per raw ring value: weights, fill probability and class id."""
    beta = beta_of(T)
    rows = []
    for idx in range(64):
        ring = NeighborBoundary(idx)
        e0, e1 = _ring_energy(ring, 0, e), _ring_energy(ring, 1, e)
        shift = min(e0, e1)
        rows.append(
            {
                "ring": "".join(map(str, ring.bits)),
                "class_id": ring.class_id,
                "states_empty": "".join(map(str, ring.vertex_counts(0))),
                "states_filled": "".join(map(str, ring.vertex_counts(1))),
                "w_empty": math.exp(-beta * (e0 - shift)),
                "w_fill": math.exp(-beta * (e1 - shift)),
                "p_fill": single_site_conditional(ring, e, T),
            }
        )
    return rows


enumerate = enumerate_summary  # noqa: A001 - public name of the oracle entry point
