"""Model parametrisation, zero-temperature classification and presets.

Two equivalent coordinate systems describe a model:

* geometric ``(x, p, a)``: ``H = x * euler + p * perimeter + a * area``;
* vertex energies ``(e_C, e_H, e_F)`` with ``e_E = 0``.

Throughout the package configurations are weighted by ``exp(-H / T)`` so that
ground configurations carry the largest weight.

Coordinates given as ``int`` or ``Fraction`` are kept as exact rationals;
anything else is stored as ``float``.
"""

from __future__ import annotations

import math
import numbers
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Union

from .errors import (
    HadwigerError,
    IncompatibleDimensionsError,
    NonPeierlsError,
    UnknownPresetError,
)
from .functionals import Configuration, VertexState
from .hexlattice import HexTorus

Number = Union[int, float, Fraction]

CONVENTION = "weight=exp(-H/T); e_E=0; perimeter unit=edge; area unit=hexagon"

E, C, H, F = VertexState.E, VertexState.C, VertexState.H, VertexState.F
NON_PEIERLS_PAIRS = (frozenset({E, C}), frozenset({H, F}), frozenset({C, H}))


def _coerce(v) -> Fraction | float:
    if isinstance(v, Fraction):
        return v
    if isinstance(v, bool):
        raise TypeError("boolean is not a model coordinate")
    if isinstance(v, numbers.Integral):
        return Fraction(int(v))
    if isinstance(v, str):
        return Fraction(v)
    v = float(v)
    if not math.isfinite(v):
        raise HadwigerError(f"model coordinates must be finite, got {v}")
    return v


def _fmt(v) -> str | float:
    return str(v) if isinstance(v, Fraction) else float(v)


@dataclass(frozen=True)
class GeometricParams:
    x: Number
    p: Number
    a: Number

    def __post_init__(self):
        for name in ("x", "p", "a"):
            object.__setattr__(self, name, _coerce(getattr(self, name)))

    def as_tuple(self) -> tuple:
        return (self.x, self.p, self.a)


@dataclass(frozen=True)
class VertexEnergies:
    """Canonical vertex energies; ``e_E`` is always 0."""

    e_C: Number
    e_H: Number
    e_F: Number

    def __post_init__(self):
        for name in ("e_C", "e_H", "e_F"):
            object.__setattr__(self, name, _coerce(getattr(self, name)))

    @classmethod
    def from_vector(cls, e_E, e_C, e_H, e_F) -> VertexEnergies:
        """Normalise a general 4-vector by subtracting ``e_E``."""
        e_E, e_C, e_H, e_F = (_coerce(v) for v in (e_E, e_C, e_H, e_F))
        return cls(e_C - e_E, e_H - e_E, e_F - e_E)

    @property
    def e_E(self):
        return Fraction(0) if self.is_exact else 0.0

    @property
    def vector(self) -> tuple:
        """``(e_E, e_C, e_H, e_F)``, indexable by :class:`VertexState`."""
        return (self.e_E, self.e_C, self.e_H, self.e_F)

    def as_tuple(self) -> tuple:
        return (self.e_C, self.e_H, self.e_F)

    def as_floats(self) -> tuple[float, float, float]:
        return (float(self.e_C), float(self.e_H), float(self.e_F))

    @property
    def is_exact(self) -> bool:
        return all(isinstance(v, Fraction) for v in (self.e_C, self.e_H, self.e_F))

    def swapped(self) -> VertexEnergies:
        """Energies of the complemented model (E<->F and C<->H exchanged)."""
        return VertexEnergies.from_vector(self.e_F, self.e_H, self.e_C, self.e_E)

    def scaled(self, factor) -> VertexEnergies:
        factor = _coerce(factor)
        return VertexEnergies(self.e_C * factor, self.e_H * factor, self.e_F * factor)

    def integer_table(self) -> tuple[tuple[int, int, int, int], int]:
        """Energies as integers over a common denominator (exact models only)."""
        if not self.is_exact:
            raise HadwigerError("integer bookkeeping needs rational energies")
        denom = math.lcm(*(v.denominator for v in self.vector))
        return tuple(int(v * denom) for v in self.vector), denom

    def to_json(self) -> dict:
        g = to_geometric_params(self)
        return {
            "vertex_energies": {"e_C": _fmt(self.e_C), "e_H": _fmt(self.e_H), "e_F": _fmt(self.e_F)},
            "geometric": {"x": _fmt(g.x), "p": _fmt(g.p), "a": _fmt(g.a)},
            "convention": CONVENTION,
        }

    @classmethod
    def from_json(cls, data: dict) -> VertexEnergies:
        if "vertex_energies" in data:
            ve = data["vertex_energies"]
            return cls(ve["e_C"], ve["e_H"], ve["e_F"])
        g = data["geometric"]
        return to_vertex_energies(GeometricParams(g["x"], g["p"], g["a"]))


def to_vertex_energies(g: GeometricParams) -> VertexEnergies:
    x, p, a = g.x, g.p, g.a
    return VertexEnergies(x / 6 + p + a / 6, -x / 6 + p + a / 3, a / 2)


def to_geometric_params(e: VertexEnergies) -> GeometricParams:
    a = 2 * e.e_F
    x = 3 * (e.e_C - e.e_H) + e.e_F
    p = e.e_C - x / 6 - a / 6
    return GeometricParams(x, p, a)


def as_vertex_energies(point) -> VertexEnergies:
    if isinstance(point, VertexEnergies):
        return point
    if isinstance(point, GeometricParams):
        return to_vertex_energies(point)
    raise TypeError(f"not a model point: {point!r}")


@dataclass(frozen=True)
class RegionLabel:
    minimal_states: frozenset

    def __post_init__(self):
        states = frozenset(VertexState(s) for s in self.minimal_states)
        if not states:
            raise HadwigerError("a region label needs at least one minimal state")
        object.__setattr__(self, "minimal_states", states)

    @property
    def kind(self) -> str:
        n = len(self.minimal_states)
        return {1: "region", 2: "line"}.get(n, "multi-point")

    @property
    def peierls(self) -> bool:
        return not any(pair <= self.minimal_states for pair in NON_PEIERLS_PAIRS)

    @property
    def states(self) -> tuple[VertexState, ...]:
        return tuple(sorted(self.minimal_states))

    @property
    def name(self) -> str:
        return "-".join(s.name for s in self.states)

    @classmethod
    def parse(cls, name: str) -> RegionLabel:
        return cls(frozenset(VertexState[s] for s in name.split("-")))

    def relabeled_by_inversion(self) -> RegionLabel:
        return RegionLabel(frozenset(VertexState(3 - s) for s in self.minimal_states))

    def __str__(self):
        return self.name


def classify(e: VertexEnergies, rtol: float = 1e-9) -> RegionLabel:
    """Vertex states of minimal energy.

    Exact energies are compared exactly; float energies tie when within
    ``rtol`` times the largest absolute coordinate.
    """
    values = e.vector
    lowest = min(values)
    if e.is_exact:
        minimal = {VertexState(i) for i, v in enumerate(values) if v == lowest}
    else:
        tol = rtol * max(abs(float(v)) for v in values)
        minimal = {VertexState(i) for i, v in enumerate(values) if float(v) <= float(lowest) + tol}
    return RegionLabel(frozenset(minimal))


@dataclass(frozen=True)
class GroundReference:
    """A periodic ground configuration with its symmetry-class name."""

    ident: str
    cls: str
    config: Configuration


def ground_references(label: RegionLabel, lattice: HexTorus) -> list[GroundReference]:
    if not label.peierls:
        raise NonPeierlsError(f"{label.name} has infinitely many ground configurations")
    refs = []
    for state in label.states:
        if state == E:
            refs.append(GroundReference("E", "E", Configuration.empty(lattice)))
        elif state == F:
            refs.append(GroundReference("F", "F", Configuration.full(lattice)))
        else:
            if not lattice.has_sublattices:
                raise IncompatibleDimensionsError(
                    f"{state.name} ground configurations need dimensions divisible by 3"
                )
            labels = lattice.sublattice_labels
            for s in range(3):
                on_sub = (labels == s).astype("uint8")
                values = on_sub if state == C else 1 - on_sub
                refs.append(GroundReference(f"{state.name}{s}", state.name, Configuration(lattice, values)))
    return refs


def ground_configurations(label: RegionLabel, lattice: HexTorus) -> list[Configuration]:
    return [ref.config for ref in ground_references(label, lattice)]


PRESET_NAMES = (
    "ising_ferro",
    "ising_antiferro",
    "ising_field",
    "triplet",
    "pure_euler",
    "pure_perimeter",
    "pure_area",
    "ec_line",
    "hf_line",
)

_FIELD_RE = re.compile(r"^ising_field\(\s*([^)]+?)\s*\)$")


def preset(name: str, h: Number | None = None) -> GeometricParams | VertexEnergies:
    """Named landmark models.

    ``ising_field`` takes the field either as ``h`` or inline,
    ``"ising_field(0.5)"``.  ``triplet`` is the midpoint of the C-F line,
    ``e_C = e_F = -1/2``, i.e. ``-(1/4) * sum_v s1 s2 s3`` up to a constant.
    ``ec_line`` / ``hf_line`` are convenience points on the two
    inversion-related non-Peierls lines.
    """
    m = _FIELD_RE.match(name.strip())
    if m:
        name, h = "ising_field", m.group(1)
    if name == "ising_field":
        if h is None:
            raise UnknownPresetError("ising_field needs a field value, e.g. ising_field(0.5)")
        return GeometricParams(0, 1, h)
    table = {
        "ising_ferro": lambda: GeometricParams(0, 1, 0),
        "ising_antiferro": lambda: GeometricParams(0, -1, 0),
        "pure_euler": lambda: GeometricParams(1, 0, 0),
        "pure_perimeter": lambda: GeometricParams(0, 1, 0),
        "pure_area": lambda: GeometricParams(0, 0, 1),
        "triplet": lambda: VertexEnergies(Fraction(-1, 2), 0, Fraction(-1, 2)),
        "ec_line": lambda: VertexEnergies(0, 1, 1),
        "hf_line": lambda: VertexEnergies(0, 1, 1).swapped(),
    }
    if name not in table:
        raise UnknownPresetError(f"unknown preset {name!r}; choose from {', '.join(PRESET_NAMES)}")
    return table[name]()
