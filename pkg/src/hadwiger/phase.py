"""Phase-diagram engine.

* single-flip excitation spectra of periodic ground configurations;
* leading-order coexistence offsets along the E-H and E-F lines;
* zero-temperature and low-temperature scans of the unit sphere of
  vertex energies ``(e_C, e_H, e_F)``;
* exact finite-domain free-energy comparisons used to validate signs.

Leading order means the free energy per face of a ground class G is

    phi_G = 2 e_G - (1/beta) * sum_k m_k exp(-beta dE_k)

where ``(dE_k, m_k)`` runs over the single-flip excitations of G (two
vertices per face).  Equating two classes and linearising in the perturbed
coordinate gives the offsets below, with normalisation ``kappa = 1/(2 beta)``.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import numpy as np
from scipy.optimize import brentq
from scipy.special import logsumexp

from . import exact
from .errors import HadwigerError, NotAGroundConfigurationError, OutOfRangeError
from .functionals import Configuration, VertexState
from .hexlattice import HexDomain, hexagon_faces, make_domain, make_torus
from .model import (
    NON_PEIERLS_PAIRS,
    RegionLabel,
    VertexEnergies,
    classify,
    ground_references,
)
from .sampler import ChainSettings, domination_test, run_chain

STATES = "ECHF"


@dataclass(frozen=True)
class Excitation:
    delta_energy: float | Fraction
    multiplicity: Fraction
    replacement: str


@dataclass(frozen=True)
class ExcitationSpectrum:
    ground: str
    classes: tuple[Excitation, ...]

    @property
    def total_multiplicity(self) -> Fraction:
        return sum((c.multiplicity for c in self.classes), Fraction(0))

    def partition_sum(self, beta: float) -> float:
        """``sum_k m_k exp(-beta dE_k)``."""
        return sum(float(c.multiplicity) * math.exp(-beta * float(c.delta_energy)) for c in self.classes)

    def is_stable(self) -> bool:
        return all(c.delta_energy > 0 for c in self.classes)


@dataclass(frozen=True)
class CoexistenceOffset:
    line: str
    coordinate: float
    beta: float
    offset: float
    kappa: float


def _replacement(delta: np.ndarray) -> str:
    lost = [(STATES[k], -int(d)) for k, d in enumerate(delta) if d < 0]
    gained = [(STATES[k], int(d)) for k, d in enumerate(delta) if d > 0]
    left = "+".join(f"{n}{s}" for s, n in lost)
    right = "+".join(f"{n}{s}" for s, n in gained)
    return f"{left}->{right}"


def _flip_classes(config: Configuration, e: VertexEnergies, name: str) -> ExcitationSpectrum:
    faces = config.region.free_faces
    tally = Counter()
    for f in faces:
        delta = config.flip_delta_counts(int(f))
        de = delta[1] * e.e_C + delta[2] * e.e_H + delta[3] * e.e_F
        tally[(de, _replacement(delta))] += 1
    n = len(faces)
    classes = tuple(
        Excitation(de, Fraction(count, n), rep)
        for (de, rep), count in sorted(tally.items(), key=lambda kv: (float(kv[0][0]), kv[0][1]))
    )
    return ExcitationSpectrum(name, classes)


def excitation_spectrum(ground: Configuration, e: VertexEnergies, lattice=None) -> ExcitationSpectrum:
    """Single-face flip classes of a torus ground configuration.

    Each distinct ``(energy change, vertex replacement)`` pair is one class;
    its multiplicity is the fraction of faces in it.
    """
    label = classify(e)
    counts = ground.state_counts
    present = {VertexState(k) for k, c in enumerate(counts) if c}
    if not present <= label.minimal_states:
        names = "".join(s.name for s in sorted(present - label.minimal_states))
        raise NotAGroundConfigurationError(f"vertices in non-minimal states {names} for {label.name}")
    name = "".join(s.name for s in sorted(present))
    return _flip_classes(ground, e, name)


# ---- leading-order offsets ------------------------------------------------


def _check_open_unit(x: float, what: str) -> float:
    x = float(x)
    if not 0.0 < x < 1.0:
        raise OutOfRangeError(f"{what} must lie strictly between 0 and 1, got {x}")
    return x


def _check_beta(beta: float) -> float:
    beta = float(beta)
    if not beta > 0:
        raise OutOfRangeError(f"beta must be positive, got {beta}")
    return beta


def slawny_offset_EH(f: float, beta: float, kappa: float | None = None) -> CoexistenceOffset:
    """Leading-order coexistence value of ``e_H`` on the line
    ``e_C = 1 - f, e_F = f, e_H = 0``.

    Positive for ``f < 1/2`` (the H phase is favoured there and must be
    penalised), zero at ``f = 1/2``.
    """
    f = _check_open_unit(f, "f")
    beta = _check_beta(beta)
    k = 1.0 / (2.0 * beta) if kappa is None else float(kappa)
    h = k * (math.exp(-6 * f * beta) - math.exp(-6 * (1 - f) * beta)) / 3.0
    return CoexistenceOffset("E-H", f, beta, h, k)


def slawny_offset_EF(h: float, beta: float, kappa: float | None = None) -> CoexistenceOffset:
    """Leading-order coexistence value of ``e_F`` on the line
    ``e_H = h, e_C = 1 - h, e_F = 0``; odd about ``h = 1/2``."""
    h = _check_open_unit(h, "h")
    beta = _check_beta(beta)
    k = 1.0 / (2.0 * beta) if kappa is None else float(kappa)
    f = k * (math.exp(-6 * h * beta) - math.exp(-6 * (1 - h) * beta))
    return CoexistenceOffset("E-F", h, beta, f, k)


def line_energies(line: str, coordinate: float, offset: float = 0.0) -> VertexEnergies:
    """Model on a parametrised transition line, shifted by ``offset``."""
    if line == "E-H":
        return VertexEnergies(1 - coordinate, offset, coordinate)
    if line == "E-F":
        return VertexEnergies(1 - coordinate, coordinate, offset)
    raise HadwigerError(f"no parametrisation for line {line!r}")


@lru_cache(maxsize=None)
def _reference_torus():
    return make_torus(3, 3)


def class_spectra(e: VertexEnergies) -> dict[str, ExcitationSpectrum]:
    """Flip spectra of the E, C, H and F periodic patterns (no ground check)."""
    t = _reference_torus()
    out = {}
    for s in STATES:
        ref = ground_references(RegionLabel.parse(s), t)[0]
        out[s] = _flip_classes(ref.config, e, s)
    return out


def leading_free_energies(e: VertexEnergies, beta: float) -> dict[str, float]:
    """``phi_G`` per face for every locally stable class G."""
    beta = _check_beta(beta)
    vec = e.vector
    out = {}
    for s, spec in class_spectra(e).items():
        if spec.is_stable():
            out[s] = 2 * float(vec[STATES.index(s)]) - spec.partition_sum(beta) / beta
    return out


# ---- scans -----------------------------------------------------------------

TRIPLE_POINTS = {
    "E-C-H": (0.0, 0.0, 1.0),
    "E-C-F": (0.0, 1.0, 0.0),
    "E-H-F": (1.0, 0.0, 0.0),
    "C-H-F": tuple(-1 / math.sqrt(3) for _ in range(3)),
}


def fibonacci_sphere(n: int) -> np.ndarray:
    i = np.arange(n) + 0.5
    z = 1 - 2 * i / n
    r = np.sqrt(1 - z * z)
    phi = math.pi * (1 + math.sqrt(5)) * i
    return np.column_stack([r * np.cos(phi), r * np.sin(phi), z])


def _line_projection(points: np.ndarray, a: int, b: int) -> np.ndarray:
    full = np.column_stack([np.zeros(len(points)), points])
    m = 0.5 * (full[:, a] + full[:, b])
    full[:, a] = m
    full[:, b] = m
    out = full[:, 1:] - full[:, :1]
    norm = np.linalg.norm(out, axis=1, keepdims=True)
    return out / np.where(norm == 0, 1, norm)


@dataclass
class ScanResult:
    points: np.ndarray
    labels: list[str]
    beta: float | None = None
    method: str = "zero-temperature"
    dominant: list[str] = field(default_factory=list)
    annotations: list[str] = field(default_factory=list)
    offsets: list[float] = field(default_factory=list)
    verdicts: list[str] = field(default_factory=list)

    def histogram(self) -> dict[str, int]:
        return dict(sorted(Counter(self.labels).items()))

    def kinds(self) -> dict[str, int]:
        kinds = Counter(RegionLabel.parse(lab).kind for lab in self.labels)
        return dict(sorted(kinds.items()))

    def rows(self) -> list[dict]:
        rows = []
        for i, (pt, lab) in enumerate(zip(self.points, self.labels)):
            row = {
                "point": i,
                "e_C": float(pt[0]),
                "e_H": float(pt[1]),
                "e_F": float(pt[2]),
                "label": lab,
                "kind": RegionLabel.parse(lab).kind,
            }
            if self.beta is not None:
                row["dominant"] = self.dominant[i]
                row["offset"] = self.offsets[i]
                row["verdict"] = self.verdicts[i]
                row["annotation"] = self.annotations[i]
            rows.append(row)
        return rows


def zero_temp_scan(resolution: int) -> ScanResult:
    """Classify ``resolution**2`` equal-area sphere points plus points
    projected onto every transition line and the four triple points."""
    if int(resolution) < 8:
        raise OutOfRangeError(f"resolution must be at least 8, got {resolution}")
    base = fibonacci_sphere(int(resolution) ** 2)
    chunks = [base]
    line_pts = fibonacci_sphere(4 * int(resolution))
    for a in range(4):
        for b in range(a + 1, 4):
            proj = _line_projection(line_pts, a, b)
            keep = [p for p in proj if classify(VertexEnergies(*p)).minimal_states == {VertexState(a), VertexState(b)}]
            if keep:
                chunks.append(np.array(keep))
    chunks.append(np.array(list(TRIPLE_POINTS.values())))
    points = np.vstack(chunks)
    labels = [classify(VertexEnergies(*p)).name for p in points]
    return ScanResult(points, labels)


def _no_domination_applies(label: RegionLabel, e: VertexEnergies) -> bool:
    """E-C with ``e_F >= e_H``, or its inversion image H-F with ``e_C >= e_E``."""
    if label.name == "E-C":
        return float(e.e_F) >= float(e.e_H)
    if label.name == "H-F":
        return float(e.e_C) >= 0.0
    return False


def _annotate(e: VertexEnergies, label: RegionLabel, beta: float, band: float) -> str:
    if label.kind != "region" and not label.peierls:
        return "no-domination" if _no_domination_applies(label, e) else "non-peierls"
    vec = np.array([float(v) for v in e.vector])
    order = np.argsort(vec, kind="stable")
    pair = frozenset({VertexState(int(order[0])), VertexState(int(order[1]))})
    scale = max(np.abs(vec).max(), 1e-300)
    if pair in NON_PEIERLS_PAIRS and (vec[order[1]] - vec[order[0]]) < band * scale / beta:
        return "pirogov-sinai-inapplicable"
    return ""


def low_temp_scan(
    beta: float,
    resolution: int,
    method: str = "slawny",
    band: float = 1.0,
    domain: HexDomain | None = None,
    chain_settings=None,
    chain_size: int = 6,
) -> ScanResult:
    """Predicted dominant class at every scan point.

    ``slawny``: argmin of the leading-order free energy over locally stable
    classes.  ``exact``: argmax of log Z on a small domain with each class's
    ground pattern as boundary.  ``mcmc``: domination verdict of a chain on a
    ``chain_size`` torus started uniformly at random.

    Points on non-Peierls lines get no dominant class and a ``no-domination``
    annotation (E-C line with e_F >= e_H, or its H-F image) or else
    ``non-peierls``; bulk points within ``band / beta`` (relative) of such a line are
    annotated ``pirogov-sinai-inapplicable``.
    """
    beta = _check_beta(beta)
    if method not in ("slawny", "exact", "mcmc"):
        raise HadwigerError(f"unknown scan method {method!r}")
    base = zero_temp_scan(resolution)
    res = ScanResult(base.points, base.labels, beta=beta, method=method)
    for pt, lab in zip(base.points, base.labels):
        e = VertexEnergies(*pt)
        label = RegionLabel.parse(lab)
        res.annotations.append(_annotate(e, label, beta, band))
        if not label.peierls:
            res.dominant.append("")
            res.offsets.append(float("nan"))
            res.verdicts.append("")
            continue
        phis = leading_free_energies(e, beta)
        best = min(phis, key=phis.get)
        offset = float("nan")
        if label.kind == "line":
            a, b = label.states
            if a.name in phis and b.name in phis:
                offset = (phis[a.name] - phis[b.name]) / 2
        res.offsets.append(offset)
        if method == "slawny":
            res.dominant.append(best)
            res.verdicts.append("")
        elif method == "exact":
            gaps = exact_class_free_energies(e, beta, domain)
            res.dominant.append(best)
            res.verdicts.append(max(gaps, key=gaps.get))
        else:
            res.dominant.append(best)
            res.verdicts.append(_mcmc_verdict(e, beta, chain_settings, chain_size))
    return res


def _mcmc_verdict(e, beta, settings, size) -> str:
    settings = settings or ChainSettings(seed=0, sweeps=2000, burn_in=500)
    t = make_torus(size, size)
    verdict = domination_test(run_chain(t, e, 1.0 / beta, settings))
    return verdict.dominant_class or "none"


# ---- exact validation -------------------------------------------------------


@lru_cache(maxsize=None)
def default_domain_shape(radius: int = 2, host_size: int = 9) -> tuple:
    host = make_torus(host_size, host_size)
    center = host.face_id(host_size // 2, host_size // 2)
    return host, tuple(hexagon_faces(host, center, radius))


def class_domains(cls: str, interior=None, host=None) -> list[HexDomain]:
    """The domain with each periodic pattern of class ``cls`` as boundary."""
    if interior is None:
        host, interior = default_domain_shape()
    refs = ground_references(RegionLabel.parse(cls), host)
    return [make_domain(host, interior, r.config.values) for r in refs]


def exact_class_free_energies(
    e: VertexEnergies, beta: float, domain: HexDomain | None = None
) -> dict[str, float]:
    """``log Z / n_faces`` with each class's ground pattern as boundary.

    Symmetric variants of a class are averaged (log-mean-exp).  The domain
    supplies the interior and host; its own boundary is ignored.
    """
    host, interior = (domain.host, domain.interior) if domain is not None else default_domain_shape()
    T = 1.0 / _check_beta(beta)
    out = {}
    for cls in STATES:
        doms = class_domains(cls, interior, host)
        logs = [exact.density_of_states(d).log_z(e, T) for d in doms]
        out[cls] = float(logsumexp(logs) - math.log(len(logs))) / len(interior)
    return out


def exact_free_energy_gap(line: str, coordinate: float, beta: float, offset: float = 0.0, domain=None) -> float:
    """Per-face ``log Z_E - log Z_X`` where X is the other class of ``line``."""
    e = line_energies(line, coordinate, offset)
    other = line.split("-")[1]
    g = exact_class_free_energies(e, beta, domain)
    return g["E"] - g[other]


def exact_coexistence_offset(line: str, coordinate: float, beta: float, domain=None, bracket: float = 0.5) -> float:
    """Offset at which the two boundary classes have equal finite-domain free energy."""
    return float(
        brentq(lambda x: exact_free_energy_gap(line, coordinate, beta, x, domain), -bracket, bracket, xtol=1e-12)
    )
