"""Brute-force references that share no code with the package kernels.

Geometry is rebuilt here from axial coordinates: a vertex is a triangle of
three mutually adjacent faces, either ``(i,j),(i+1,j),(i,j+1)`` or
``(i+1,j),(i,j+1),(i+1,j+1)``.
"""

from __future__ import annotations

import itertools
import math


def torus_vertices(w: int, h: int) -> list[tuple[int, int, int]]:
    fid = lambda i, j: (j % h) * w + (i % w)  # noqa: E731
    out = []
    for j in range(h):
        for i in range(w):
            out.append((fid(i, j), fid(i + 1, j), fid(i, j + 1)))
            out.append((fid(i + 1, j), fid(i, j + 1), fid(i + 1, j + 1)))
    return out


def torus_adjacency(w: int, h: int) -> list[set[int]]:
    fid = lambda i, j: (j % h) * w + (i % w)  # noqa: E731
    adj = []
    for j in range(h):
        for i in range(w):
            adj.append({fid(i + di, j + dj) for di, dj in ((1, 0), (0, 1), (-1, 1), (-1, 0), (0, -1), (1, -1))})
    return adj


def state_counts(vals, vertices) -> tuple[int, int, int, int]:
    c = [0, 0, 0, 0]
    for a, b, d in vertices:
        c[vals[a] + vals[b] + vals[d]] += 1
    return tuple(c)


def direct_euler_w_h(vals, w: int, h: int) -> tuple[int, int, int]:
    """Area, perimeter, V - E + F of the closed filled complex, by cell counting."""
    verts = torus_vertices(w, h)
    adj = torus_adjacency(w, h)
    n_f = sum(vals)
    n_v = sum(1 for t in verts if any(vals[x] for x in t))
    edges = {tuple(sorted((f, g))) for f in range(w * h) for g in adj[f]}
    n_e = sum(1 for f, g in edges if vals[f] or vals[g])
    perim = sum(1 for f, g in edges if vals[f] != vals[g])
    return n_f, perim, n_v - n_e + n_f


def energy(counts, e) -> float:
    return counts[1] * float(e[0]) + counts[2] * float(e[1]) + counts[3] * float(e[2])


def all_configs(n: int):
    return itertools.product((0, 1), repeat=n)


def torus_log_z(w: int, h: int, e, T: float) -> float:
    verts = torus_vertices(w, h)
    ws = [-energy(state_counts(v, verts), e) / T for v in all_configs(w * h)]
    m = max(ws)
    return m + math.log(sum(math.exp(x - m) for x in ws))


def torus_expectations(w: int, h: int, e, T: float) -> tuple[float, float]:
    """Mean energy per vertex and mean filled density."""
    verts = torus_vertices(w, h)
    n = w * h
    z = en = fill = 0.0
    rows = []
    for v in all_configs(n):
        c = state_counts(v, verts)
        rows.append((energy(c, e), sum(v)))
    m = min(r[0] for r in rows)
    for E, s in rows:
        wgt = math.exp(-(E - m) / T)
        z += wgt
        en += wgt * E
        fill += wgt * s
    return en / z / len(verts), fill / z / n


def domain_distribution(free: list[int], fixed: dict[int, int], vertices, e, T: float) -> list[float]:
    """Boltzmann law over free faces; bit k of the index is ``free[k]``."""
    ws = []
    for idx in range(1 << len(free)):
        vals = dict(fixed)
        for k, f in enumerate(free):
            vals[f] = (idx >> k) & 1
        c = [0, 0, 0, 0]
        for t in vertices:
            c[sum(vals[x] for x in t)] += 1
        ws.append(-energy(c, e) / T)
    m = max(ws)
    p = [math.exp(x - m) for x in ws]
    s = sum(p)
    return [x / s for x in p]


def independent_sets(adj: list[set[int]]) -> int:
    n = len(adj)
    count = 0
    for v in all_configs(n):
        if all(not (v[f] and v[g]) for f in range(n) for g in adj[f]):
            count += 1
    return count
