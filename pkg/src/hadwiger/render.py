"""Static SVG drawings of configurations and phase-diagram scans."""

from __future__ import annotations

import math
from xml.sax.saxutils import escape

import numpy as np

from .functionals import Configuration
from .model import RegionLabel
from .phase import ScanResult

SQRT3 = math.sqrt(3.0)

STATE_COLORS = ("#ffffff", "#4daf4a", "#377eb8", "#222222")  # E, C, H, F

# diagram colours: one per singleton region, Peierls lines, non-Peierls
# lines, multi-points and the band where the low-temperature expansion fails
DIAGRAM_COLORS = {
    "E": "#fdf6c3",
    "C": "#8fd18a",
    "H": "#7fb2e5",
    "F": "#7a7a7a",
    "peierls-line": "#f28e2b",
    "non-peierls-line": "#d62728",
    "multi-point": "#000000",
    "band": "#7b1113",
}


def _face_center(i: float, j: float, s: float) -> tuple[float, float]:
    return s * SQRT3 * (i + j / 2), 1.5 * s * j


def _hexagon(cx: float, cy: float, s: float) -> str:
    pts = []
    for k in range(6):
        a = math.pi / 6 + k * math.pi / 3
        pts.append(f"{cx + s * math.cos(a):.3f},{cy + s * math.sin(a):.3f}")
    return " ".join(pts)


def configuration_svg(config: Configuration, size: float = 20.0, overlay: bool = False) -> str:
    """Filled hexagons in black, empty in white; optional vertex-state dots."""
    t = config.lattice
    vals = np.asarray(config.values)
    free = np.zeros(t.n_faces, dtype=bool)
    free[config.region.free_faces] = True
    pad = size * 1.5
    width = size * SQRT3 * (t.width + t.height / 2) + 2 * pad
    height = 1.5 * size * t.height + 2 * pad
    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width:.0f}" height="{height:.0f}" '
        f'viewBox="0 0 {width:.3f} {height:.3f}">',
        f'<rect width="{width:.3f}" height="{height:.3f}" fill="#eeeeee"/>',
    ]
    for f in range(t.n_faces):
        i, j = t.coords(f)
        x, y = _face_center(i, j, size)
        fill = "#111111" if vals[f] else "#ffffff"
        stroke = "#888888" if free[f] else "#cc4444"
        out.append(
            f'<polygon points="{_hexagon(x + pad, height - pad - y, size)}" fill="{fill}" '
            f'stroke="{stroke}" stroke-width="1"/>'
        )
    if overlay:
        counted = config.region.counted_vertices
        k = vals[t.vertex_table].sum(axis=1)
        for v in counted:
            f, down = divmod(int(v), 2)
            i, j = t.coords(f)
            tri = [(i + 1, j), (i, j + 1), (i + 1, j + 1)] if down else [(i, j), (i + 1, j), (i, j + 1)]
            cx = sum(_face_center(a, b, size)[0] for a, b in tri) / 3
            cy = sum(_face_center(a, b, size)[1] for a, b in tri) / 3
            out.append(
                f'<circle cx="{cx + pad:.3f}" cy="{height - pad - cy:.3f}" r="{size / 5:.3f}" '
                f'fill="{STATE_COLORS[k[v]]}" stroke="#000000" stroke-width="0.5"/>'
            )
    out.append("</svg>")
    return "\n".join(out) + "\n"


def _point_category(label: str, annotation: str) -> str:
    lab = RegionLabel.parse(label)
    if lab.kind == "region":
        return "band" if annotation == "pirogov-sinai-inapplicable" else label
    if lab.kind == "multi-point":
        return "multi-point"
    return "peierls-line" if lab.peierls else "non-peierls-line"


def diagram_svg(scan: ScanResult, width: int = 720) -> str:
    """Equirectangular map: longitude ``atan2(e_H, e_C)``, latitude ``asin(e_F)``."""
    height = width // 2
    legend_h = 24 * (len(DIAGRAM_COLORS) + 1)
    title = "zero temperature" if scan.beta is None else f"beta = {scan.beta:g} ({scan.method})"
    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height + legend_h}" '
        f'viewBox="0 0 {width} {height + legend_h}">',
        f'<rect width="{width}" height="{height}" fill="#ffffff" stroke="#000000"/>',
        f'<text x="6" y="16" font-family="sans-serif" font-size="13">{escape(title)}</text>',
    ]
    annotations = scan.annotations or [""] * len(scan.labels)
    order = sorted(range(len(scan.labels)), key=lambda n: len(scan.labels[n].split("-")))
    for n in order:
        p = scan.points[n]
        lon = math.atan2(p[1], p[0])
        lat = math.asin(max(-1.0, min(1.0, p[2])))
        x = (lon + math.pi) / (2 * math.pi) * width
        y = (math.pi / 2 - lat) / math.pi * height
        label = scan.labels[n]
        cat = _point_category(label, annotations[n])
        fill = DIAGRAM_COLORS[cat]
        if scan.dominant and scan.dominant[n] and cat in ("E", "C", "H", "F") and scan.dominant[n] != label:
            fill = DIAGRAM_COLORS[scan.dominant[n]]
        r = {"multi-point": 5.0, "peierls-line": 3.0, "non-peierls-line": 3.0}.get(cat, 2.5)
        out.append(f'<circle cx="{x:.2f}" cy="{y:.2f}" r="{r}" fill="{fill}"><title>{escape(label)}</title></circle>')
    for k, (name, color) in enumerate(DIAGRAM_COLORS.items()):
        y = height + 20 + 24 * k
        out.append(f'<rect x="8" y="{y - 12}" width="14" height="14" fill="{color}" stroke="#000000"/>')
        out.append(f'<text x="30" y="{y}" font-family="sans-serif" font-size="12">{escape(name)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
