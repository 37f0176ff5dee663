"""Checks along the non-Peierls lines E-C and (by inversion) H-F.

All checks are finite-volume proxies computed exactly:

* the disagreement-percolation certificate compares the largest single-site
  conditional variational distance ``p_i`` over all 64 neighbour rings with
  the triangular-lattice site threshold 1/2;
* the chessboard decay report tracks ``P(vertex in {H, F})`` on a small torus
  against the bound ``exp(-2 e_F beta) + 3 exp(-e_H beta)``;
* the no-domination check tracks the filled density on a small torus;
* hard-hexagon convergence measures the total-variation distance between the
  model on a small domain and the uniform independent-set measure;
* boundary independence compares event probabilities in a core under two
  boundary conditions as the surrounding patch grows.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import asdict, dataclass, field
from typing import Sequence

import numpy as np
from scipy.special import expit, log_expit

from . import exact
from .errors import CertificateFailedError, WrongRegionError
from .hexlattice import HexDomain, HexTorus, ball_faces, make_domain
from .model import VertexEnergies, classify

P_C = 0.5  # site percolation threshold of the triangular lattice


def _T(beta: float) -> float:
    return math.inf if beta == 0 else 1.0 / beta


@dataclass(frozen=True)
class UniquenessCertificate:
    p_i: float
    margin: float
    p_c: float
    unique: bool
    witness: tuple[tuple[int, ...], tuple[int, ...]]
    T: float

    def to_json(self) -> dict:
        d = asdict(self)
        d["witness"] = [list(w) for w in self.witness]
        return d


def disagreement_certificate(e: VertexEnergies, T: float) -> UniquenessCertificate:
    """Largest variational distance between the centre-face conditionals of
    two neighbour rings.

    The distance between two Bernoulli laws is ``|p1 - p2|``, so ``p_i`` is
    the spread of the fill probability over the 13 dihedral ring classes.
    ``margin = 1/2 - p_i`` is evaluated without cancellation; ``unique`` is
    decided by its sign, compared in log space so that a margin below the
    double-precision range still counts.
    """
    beta = exact.beta_of(T)
    rings = [exact.NeighborBoundary(c) for c in exact.DIHEDRAL_CLASSES]
    gaps = [exact._ring_energy(r, 1, e) - exact._ring_energy(r, 0, e) for r in rings]
    x = np.array([-beta * g for g in gaps]) if beta else np.zeros(len(gaps))
    hi, lo = int(np.argmax(x)), int(np.argmin(x))
    p_i = float(expit(x[hi]) - expit(x[lo]))
    # 1/2 - (s(a) - s(b)) = s(b) + (1/2 - s(a)) with 1/2 - s(a) = -tanh(a/2)/2
    margin = float(expit(x[lo]) - 0.5 * math.tanh(x[hi] / 2))
    if x[hi] <= 0:
        unique = True
    else:
        unique = bool(log_expit(x[lo]) > math.log(0.5 * math.tanh(x[hi] / 2)))
    witness = (rings[hi].bits, rings[lo].bits)
    return UniquenessCertificate(p_i, margin, P_C, unique, witness, float(T))


def _on_uniqueness_line(e: VertexEnergies) -> bool:
    name = classify(e).name
    if name == "E-C":
        return float(e.e_F) >= float(e.e_H)
    if name == "H-F":
        return float(e.e_C) >= 0.0
    return False


def _require_line(e: VertexEnergies, inversion_ok: bool = True) -> None:
    name = classify(e).name
    ok = _on_uniqueness_line(e) and (inversion_ok or name == "E-C")
    if not ok:
        raise WrongRegionError(
            f"needs the E-C line with e_F >= e_H{' (or its H-F image)' if inversion_ok else ''}, got {name} at {e.as_tuple()}"
        )


@dataclass
class DecayReport:
    betas: list[float]
    measured: list[float]
    bound: list[float]
    literal_bound: list[float]
    respected: list[bool]
    ratios: list[float]
    fitted_rate: float
    proxy: str = ""

    def rows(self) -> list[dict]:
        return [
            {"beta": b, "measured": m, "bound": c, "literal_bound": lit, "respected": r}
            for b, m, c, lit, r in zip(self.betas, self.measured, self.bound, self.literal_bound, self.respected)
        ]

    def to_json(self) -> dict:
        return asdict(self)


def chessboard_decay_report(e: VertexEnergies, torus: HexTorus, betas: Sequence[float]) -> DecayReport:
    """Exact ``P(vertex in {H, F})`` per beta against the chessboard bound.

    ``literal_bound`` uses ``e_F`` in both exponents; ``bound`` uses ``e_H``
    in the second, which is the smaller (safe) value when ``e_F >= e_H``.
    """
    _require_line(e, inversion_ok=False)
    dos = exact.density_of_states(torus)
    e_h, e_f = float(e.e_H), float(e.e_F)
    betas = [float(b) for b in betas]
    measured, bound, literal = [], [], []
    for b in betas:
        x = dos.expectations(e, _T(b))
        measured.append(x["frac_H"] + x["frac_F"])
        bound.append(math.exp(-2 * e_f * b) + 3 * math.exp(-e_h * b))
        literal.append(math.exp(-2 * e_f * b) + 3 * math.exp(-e_f * b))
    respected = [m <= c for m, c in zip(measured, bound)]
    ratios = [measured[i] / measured[i + 1] for i in range(len(betas) - 1)]
    rate = float("nan")
    if len(betas) >= 2:
        rate = float(-np.polyfit(betas, np.log(measured), 1)[0])
    proxy = f"{torus.width}x{torus.height} torus, exact enumeration"
    return DecayReport(betas, measured, bound, literal, respected, ratios, rate, proxy)


@dataclass
class NoDominationReport:
    betas: list[float]
    densities: list[float]
    delta: float
    ok: bool
    proxy: str = ""

    def rows(self) -> list[dict]:
        return [
            {"beta": b, "filled_density": d, "within": self.delta < d < 1 - self.delta}
            for b, d in zip(self.betas, self.densities)
        ]

    def to_json(self) -> dict:
        return asdict(self)


def no_domination_check(
    e: VertexEnergies, torus: HexTorus, betas: Sequence[float], delta: float = 0.05
) -> NoDominationReport:
    """Exact filled density stays inside ``(delta, 1 - delta)`` at every beta."""
    _require_line(e)
    dos = exact.density_of_states(torus)
    betas = [float(b) for b in betas]
    dens = [dos.expectations(e, _T(b))["filled_density"] for b in betas]
    ok = all(delta < d < 1 - delta for d in dens)
    proxy = f"{torus.width}x{torus.height} torus, exact enumeration"
    return NoDominationReport(betas, dens, delta, ok, proxy)


@dataclass
class ConvergenceReport:
    betas: list[float]
    tv: list[float]
    event_faces: list[int]
    n_feasible: int

    def rows(self) -> list[dict]:
        return [{"beta": b, "tv": t} for b, t in zip(self.betas, self.tv)]

    def to_json(self) -> dict:
        return asdict(self)


def hard_hexagon_convergence(
    domain: HexDomain,
    e: VertexEnergies,
    betas: Sequence[float],
    event: Sequence[int] | None = None,
) -> ConvergenceReport:
    """Total-variation distance to the uniform hard-hexagon measure.

    ``event`` lists the interior faces whose joint law is compared (the
    event algebra); by default all interior faces.
    """
    _require_line(e, inversion_ok=False)
    hh = exact.hard_hexagon_distribution(domain)
    free = list(domain.free_faces)
    faces = free if event is None else [int(f) for f in event]
    positions = [free.index(f) for f in faces]
    q = exact.marginal_distribution(hh, positions)
    tvs = []
    for b in betas:
        p = exact.marginal_distribution(exact.configuration_distribution(domain, e, _T(float(b))), positions)
        tvs.append(exact.tv_distance(p, q))
    return ConvergenceReport([float(b) for b in betas], tvs, faces, int(np.count_nonzero(hh)))


def core_distribution(domain: HexDomain, core: Sequence[int], e: VertexEnergies, T: float) -> np.ndarray:
    """Exact joint law of the ``core`` faces, indexed by their bits."""
    logs = []
    for bits in itertools.product((0, 1), repeat=len(core)):
        # bit k of the index is core[k]
        clamps = dict(zip(core, bits[::-1]))
        logs.append(exact.density_of_states(domain, clamps).log_z(e, T))
    logs = np.array(logs)
    index = [int("".join(map(str, bits)), 2) for bits in itertools.product((0, 1), repeat=len(core))]
    out = np.empty(len(logs))
    out[index] = np.exp(logs - logs.max())
    return out / out.sum()


@dataclass
class BoundaryIndependenceReport:
    domain_sizes: list[int]
    differences: list[float]
    core: list[int]
    certificate: UniquenessCertificate
    decreasing: bool = field(init=False)

    def __post_init__(self):
        d = self.differences
        self.decreasing = all(d[i + 1] < d[i] for i in range(len(d) - 1))

    def rows(self) -> list[dict]:
        return [{"domain_faces": n, "difference": d} for n, d in zip(self.domain_sizes, self.differences)]

    def to_json(self) -> dict:
        out = asdict(self)
        out["certificate"] = self.certificate.to_json()
        return out


def boundary_independence_check(
    e: VertexEnergies,
    T: float,
    eta1: np.ndarray,
    eta2: np.ndarray,
    host: HexTorus,
    core: Sequence[int],
    radii: Sequence[int] = (1, 2),
) -> BoundaryIndependenceReport:
    """Largest event-probability difference in ``core`` under two boundaries.

    The domains are the balls of the given radii around ``core``; the
    difference is the total-variation distance between the two core laws.
    """
    cert = disagreement_certificate(e, T)
    if not cert.unique:
        raise CertificateFailedError(f"p_i = {cert.p_i:.6g} is not below {P_C}")
    core = [int(f) for f in core]
    sizes, diffs = [], []
    for r in radii:
        interior = ball_faces(host, core, r)
        p1 = core_distribution(make_domain(host, interior, eta1), core, e, T)
        p2 = core_distribution(make_domain(host, interior, eta2), core, e, T)
        sizes.append(len(interior))
        diffs.append(exact.tv_distance(p1, p2))
    return BoundaryIndependenceReport(sizes, diffs, core, cert)
