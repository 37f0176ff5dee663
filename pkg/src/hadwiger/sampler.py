"""Seeded single-flip Markov chains (Metropolis or Glauber).

A sweep is ``n_free`` proposals, each choosing a free face uniformly at
random.  Proposals and acceptance uniforms come from a Philox counter-based
generator seeded through :class:`numpy.random.SeedSequence`; the proposal
stream depends only on the seed, the number of free faces and the number of
replicas, so two chains with the same seed see the same proposals whatever
their energies or initial state.

Optionally the target temperature can be coupled to a ladder of hotter
replicas (replica exchange).  Each replica still evolves by single flips;
adjacent temperatures swap configurations after every sweep.  Observables
are always recorded at the target temperature.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import _kernels
from .errors import HadwigerError
from .exact import beta_of
from .fileio import write_columns_csv, write_json
from .functionals import Configuration, delta_energy
from .hexlattice import HexDomain, HexTorus
from .model import (
    CONVENTION,
    GroundReference,
    RegionLabel,
    VertexEnergies,
    classify,
    ground_references,
)

DYNAMICS = {"metropolis": _kernels.METROPOLIS, "glauber": _kernels.GLAUBER}
_BLOCK_SWEEPS = 1024


@dataclass(frozen=True)
class ChainSettings:
    seed: int = 0
    sweeps: int = 1000
    burn_in: int = 100
    thinning: int = 1
    dynamics: str = "metropolis"
    initial: object = "uniform"
    ladder: tuple = ()

    def __post_init__(self):
        if not self.sweeps > self.burn_in >= 0:
            raise HadwigerError(f"need sweeps > burn_in >= 0, got {self.sweeps}, {self.burn_in}")
        if self.thinning < 1:
            raise HadwigerError("thinning must be at least 1")
        if self.dynamics not in DYNAMICS:
            raise HadwigerError(f"dynamics must be one of {sorted(DYNAMICS)}, got {self.dynamics!r}")
        if not 0 <= int(self.seed) < 2**64:
            raise HadwigerError("seed must fit in 64 bits")
        object.__setattr__(self, "ladder", tuple(float(t) for t in self.ladder))

    @property
    def n_records(self) -> int:
        return -(-(self.sweeps - self.burn_in) // self.thinning)

    def to_json(self) -> dict:
        initial = self.initial if isinstance(self.initial, str) else "supplied"
        return {
            "seed": int(self.seed),
            "sweeps": self.sweeps,
            "burn_in": self.burn_in,
            "thinning": self.thinning,
            "dynamics": self.dynamics,
            "initial": initial,
            "ladder": list(self.ladder),
            "rng": "numpy Philox via SeedSequence(seed).spawn(2)[1]",
            "convention": CONVENTION,
        }


@dataclass(frozen=True)
class Observables:
    energy_density: float
    state_fractions: tuple[float, float, float, float]
    sublattice_densities: tuple[float, float, float]
    agreement: dict[str, float]

    @property
    def disagreement(self) -> dict[str, float]:
        return {k: 1.0 - v for k, v in self.agreement.items()}


@dataclass(frozen=True)
class DominationVerdict:
    dominant: str | None
    dominant_class: str | None
    max_agreement: float
    threshold: float
    agreements: dict[str, float] = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "dominant": self.dominant,
            "dominant_class": self.dominant_class,
            "max_agreement": self.max_agreement,
            "threshold": self.threshold,
            "agreements": self.agreements,
        }


@dataclass
class ChainResult:
    """Time series recorded at the target temperature, one row per record."""

    region: object
    energies: VertexEnergies
    T: float
    settings: ChainSettings
    refs: list[GroundReference]
    counts: np.ndarray
    fills: np.ndarray
    subfills: np.ndarray
    agree: np.ndarray
    final: Configuration
    acceptance_rate: float
    swap_rate: float
    snapshots: np.ndarray | None = None

    @property
    def n_free(self) -> int:
        return len(self.region.free_faces)

    @property
    def n_vertices(self) -> int:
        return len(self.region.counted_vertices)

    @property
    def energy(self) -> np.ndarray:
        c, h, f = self.energies.as_floats()
        return self.counts[:, 1] * c + self.counts[:, 2] * h + self.counts[:, 3] * f

    @property
    def energy_density(self) -> np.ndarray:
        return self.energy / self.n_vertices

    @property
    def filled_density(self) -> np.ndarray:
        return self.fills / self.n_free

    @property
    def state_fractions(self) -> np.ndarray:
        return self.counts / self.n_vertices

    @property
    def sublattice_densities(self) -> np.ndarray:
        host = self.region.host
        if not host.has_sublattices:
            return np.full((len(self.fills), 3), np.nan)
        sizes = np.bincount(host.sublattice_labels[self.region.free_faces], minlength=3)
        with np.errstate(invalid="ignore", divide="ignore"):
            return self.subfills / sizes

    @property
    def agreement(self) -> np.ndarray:
        return self.agree / self.n_free

    def observables(self, i: int) -> Observables:
        return Observables(
            float(self.energy_density[i]),
            tuple(float(x) for x in self.state_fractions[i]),
            tuple(float(x) for x in self.sublattice_densities[i]),
            {r.ident: float(a) for r, a in zip(self.refs, self.agreement[i])},
        )

    def columns(self) -> dict[str, np.ndarray]:
        cols = {
            "record": np.arange(len(self.fills)),
            "energy_density": self.energy_density,
            "filled_density": self.filled_density,
        }
        for k, name in enumerate("ECHF"):
            cols[f"frac_{name}"] = self.state_fractions[:, k]
        sub = self.sublattice_densities
        for s in range(3):
            cols[f"sublattice_{s}"] = sub[:, s]
        for r, col in zip(self.refs, self.agreement.T):
            cols[f"agree_{r.ident}"] = col
        return cols


def acceptance_probability(dh: float, beta: float, dynamics: str = "metropolis") -> float:
    x = beta * dh
    if dynamics == "metropolis":
        return 1.0 if x <= 0 else math.exp(-x)
    if dynamics == "glauber":
        return 0.0 if x > 700 else 1.0 / (1.0 + math.exp(x))
    raise HadwigerError(f"unknown dynamics {dynamics!r}")


def make_rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(int(seed))))


def step(config: Configuration, e: VertexEnergies, T: float, dynamics: str, rng: np.random.Generator):
    """One proposal on a uniformly chosen free face; returns ``(config, accepted)``."""
    free = config.region.free_faces
    f = int(free[rng.integers(len(free))])
    u = rng.random()
    dh = float(delta_energy(config, f, e))
    accepted = u < acceptance_probability(dh, beta_of(T), dynamics)
    if accepted:
        config.flip(f)
    return config, accepted


def default_references(region) -> list[GroundReference]:
    """Empty and full references, plus the sublattice patterns when they exist."""
    host = region.host
    refs = ground_references(RegionLabel.parse("E-F"), host)
    if host.has_sublattices:
        refs += ground_references(RegionLabel.parse("C"), host)
        refs += ground_references(RegionLabel.parse("H"), host)
    return refs


def references_for(e: VertexEnergies, region) -> list[GroundReference]:
    label = classify(e)
    if label.peierls:
        try:
            return ground_references(label, region.host)
        except HadwigerError:
            pass
    return default_references(region)


def initial_values(region, initial, rng: np.random.Generator) -> np.ndarray:
    """Host-sized 0/1 array for a named or supplied initial state."""
    if isinstance(initial, Configuration):
        return initial.values.copy()
    if not isinstance(initial, str):
        return np.asarray(Configuration(region, initial).values).copy()
    if initial == "uniform":
        vals = rng.integers(0, 2, size=len(region.free_faces), dtype=np.uint8)
        return Configuration(region, vals).values.copy()
    if initial in ("empty", "E"):
        return Configuration.empty(region).values.copy()
    if initial in ("full", "F"):
        return Configuration.full(region).values.copy()
    for ref in default_references(region):
        if ref.ident == initial:
            return Configuration(region, ref.config.values).values.copy()
    raise HadwigerError(f"unknown initial state {initial!r}")


def run_chain(
    region: HexTorus | HexDomain,
    e: VertexEnergies,
    T: float,
    settings: ChainSettings,
    refs: Sequence[GroundReference] | None = None,
    record_configs: bool = False,
) -> ChainResult:
    """Run one chain (or a replica ladder) and record observables."""
    host = region.host
    beta = beta_of(T)
    ladder = settings.ladder
    if any(t <= T for t in ladder) or list(ladder) != sorted(ladder):
        raise HadwigerError("ladder temperatures must increase and exceed T")
    betas = np.array([beta] + [beta_of(t) for t in ladder], dtype=np.float64)
    n_rep = len(betas)

    refs = list(refs) if refs is not None else references_for(e, region)
    init_ss, prop_ss = np.random.SeedSequence(int(settings.seed)).spawn(2)
    init_rng = np.random.Generator(np.random.Philox(init_ss))
    prop_rng = np.random.Generator(np.random.Philox(prop_ss))

    start = initial_values(region, settings.initial, init_rng)
    values = np.tile(start, (n_rep, 1)).astype(np.uint8)
    free = np.asarray(region.free_faces, dtype=np.int64)
    n_free = len(free)
    counted = np.zeros(host.n_vertices, dtype=np.uint8)
    counted[region.counted_vertices] = 1

    base = Configuration(region, start)
    counts = np.tile(np.asarray(base.state_counts, dtype=np.int64), (n_rep, 1))
    fills = np.full(n_rep, base.n_filled, dtype=np.int64)
    if host.has_sublattices:
        sub_labels = np.asarray(host.sublattice_labels, dtype=np.int64)
        sub0 = np.bincount(sub_labels[free], weights=start[free], minlength=3).astype(np.int64)
    else:
        sub_labels = np.zeros(0, dtype=np.int64)
        sub0 = np.zeros(3, dtype=np.int64)
    subfill = np.tile(sub0, (n_rep, 1))
    ref_vals = np.array([r.config.values for r in refs], dtype=np.uint8).reshape(len(refs), host.n_faces)
    agree0 = np.array([(ref_vals[r, free] == start[free]).sum() for r in range(len(refs))], dtype=np.int64)
    agree = np.tile(agree0, (n_rep, 1)).reshape(n_rep, len(refs))
    temp_of = np.arange(n_rep, dtype=np.int64)
    slot_of = np.arange(n_rep, dtype=np.int64)

    if e.is_exact:
        ints, denom = e.integer_table()
        table = np.array(ints, dtype=np.float64)
        denom = float(denom)
    else:
        table = np.array([float(v) for v in e.vector], dtype=np.float64)
        denom = 1.0

    n_rec = settings.n_records
    rec_counts = np.zeros((n_rec, 4), dtype=np.int64)
    rec_fill = np.zeros(n_rec, dtype=np.int64)
    rec_sub = np.zeros((n_rec, 3), dtype=np.int64)
    rec_agree = np.zeros((n_rec, len(refs)), dtype=np.int64)
    rec_vals = np.zeros((n_rec if record_configs else 0, host.n_faces), dtype=np.uint8)
    sweep_ids = np.arange(settings.sweeps)
    record = (sweep_ids >= settings.burn_in) & ((sweep_ids - settings.burn_in) % settings.thinning == 0)
    stats = np.zeros(4, dtype=np.int64)
    dyn = DYNAMICS[settings.dynamics]

    pos = 0
    for s0 in range(0, settings.sweeps, _BLOCK_SWEEPS):
        n_sw = min(_BLOCK_SWEEPS, settings.sweeps - s0)
        n_prop = n_sw * n_rep * n_free
        prop_faces = prop_rng.integers(0, n_free, size=n_prop)
        prop_u = prop_rng.random(n_prop)
        swap_u = prop_rng.random(n_sw * max(n_rep - 1, 0))
        pos = _kernels.chain_block(
            values, counts, fills, subfill, agree, temp_of, slot_of,
            free, host.face_vertex_table, host.vertex_table, counted, sub_labels, ref_vals,
            prop_faces, prop_u, swap_u, table, denom, betas, dyn,
            n_sw, s0, record[s0:s0 + n_sw],
            rec_counts, rec_fill, rec_sub, rec_agree, rec_vals, pos, stats,
        )  # fmt: skip
    final = Configuration(region, values[slot_of[0]])
    return ChainResult(
        region=region,
        energies=e,
        T=float(T),
        settings=settings,
        refs=refs,
        counts=rec_counts,
        fills=rec_fill,
        subfills=rec_sub,
        agree=rec_agree,
        final=final,
        acceptance_rate=stats[0] / max(stats[1], 1),
        swap_rate=stats[2] / max(stats[3], 1) if n_rep > 1 else float("nan"),
        snapshots=rec_vals if record_configs else None,
    )


def batch_means(x: np.ndarray, n_batches: int = 20) -> tuple[float, float]:
    """Mean and batch-means standard error of a correlated series."""
    x = np.asarray(x, dtype=np.float64)
    size = len(x) // n_batches
    if size < 1:
        raise HadwigerError(f"series of length {len(x)} is too short for {n_batches} batches")
    means = x[: size * n_batches].reshape(n_batches, size).mean(axis=1)
    return float(x.mean()), float(means.std(ddof=1) / math.sqrt(n_batches))


def domination_test(
    result: ChainResult | np.ndarray,
    refs: Sequence[GroundReference] | None = None,
    threshold: float = 0.9,
) -> DominationVerdict:
    """Verdict from the mean face agreement with each reference.

    ``result`` is a :class:`ChainResult` or an ``(n_records, n_refs)`` array
    of agreement fractions (then ``refs`` is required).
    """
    if isinstance(result, ChainResult):
        refs = result.refs
        series = result.agreement
    else:
        series = np.asarray(result, dtype=np.float64)
        if refs is None:
            raise HadwigerError("references are required with a bare agreement series")
    if series.size == 0:
        raise HadwigerError("empty series")
    means = series.mean(axis=0)
    best = int(np.argmax(means))
    agreements = {r.ident: float(m) for r, m in zip(refs, means)}
    if means[best] >= threshold:
        return DominationVerdict(refs[best].ident, refs[best].cls, float(means[best]), threshold, agreements)
    return DominationVerdict(None, None, float(means[best]), threshold, agreements)


def write_series(result: ChainResult, csv_path, sidecar_path=None) -> None:
    """One CSV row per record plus a JSON sidecar with settings and convention."""
    write_columns_csv(csv_path, result.columns())
    if sidecar_path is not None:
        write_json(
            sidecar_path,
            {
                "settings": result.settings.to_json(),
                "model": result.energies.to_json(),
                "T": result.T,
                "n_records": len(result.fills),
                "acceptance_rate": result.acceptance_rate,
                "swap_rate": result.swap_rate,
                "references": [{"id": r.ident, "class": r.cls} for r in result.refs],
            },
        )
