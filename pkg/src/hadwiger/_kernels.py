"""Compiled inner loops for enumeration and sampling.

All kernels work on a *local* face numbering: free faces are ``0..n_free-1``
and any clamped faces follow.  ``vtx_faces`` lists the three local faces of
every counted vertex, ``face_vtx`` the six counted vertices of every free
face.  State tallies are keyed as ``(n_C * (nv + 1) + n_H) * (nv + 1) + n_F``.
"""

from __future__ import annotations

import numpy as np
from numba import njit

METROPOLIS, GLAUBER = 0, 1


@njit(cache=True, nogil=True)
def _initial_counts(vals, vtx_faces):
    counts = np.zeros(4, dtype=np.int64)
    k_of = np.empty(vtx_faces.shape[0], dtype=np.int64)
    for v in range(vtx_faces.shape[0]):
        k = vals[vtx_faces[v, 0]] + vals[vtx_faces[v, 1]] + vals[vtx_faces[v, 2]]
        k_of[v] = k
        counts[k] += 1
    return counts, k_of


@njit(cache=True, nogil=True)
def _lowest_set_bit(s):
    b = 0
    while (s >> b) & 1 == 0:
        b += 1
    return b


@njit(cache=True, nogil=True)
def dos_partition(n_low, prefix, n_free, base_vals, vtx_faces, face_vtx, dos, fillsum):
    """Tally state counts over all settings of the ``n_low`` lowest free faces.

    Free faces ``n_low..n_free-1`` are held at the bits of ``prefix``.
    Results are added into ``dos`` and ``fillsum`` (flat, keyed as above).
    """
    nv = vtx_faces.shape[0]
    stride = nv + 1
    vals = base_vals.copy()
    fill = 0
    for b in range(n_free - n_low):
        if (prefix >> b) & 1:
            vals[n_low + b] = 1
            fill += 1
    counts, k_of = _initial_counts(vals, vtx_faces)
    key = (counts[1] * stride + counts[2]) * stride + counts[3]
    dos[key] += 1
    fillsum[key] += fill
    total = np.int64(1) << n_low
    for s in range(1, total):
        f = _lowest_set_bit(s)
        step = 1 - 2 * vals[f]
        vals[f] += step
        fill += step
        for t in range(6):
            v = face_vtx[f, t]
            k = k_of[v]
            counts[k] -= 1
            counts[k + step] += 1
            k_of[v] = k + step
        key = (counts[1] * stride + counts[2]) * stride + counts[3]
        dos[key] += 1
        fillsum[key] += fill


@njit(cache=True, nogil=True)
def marginal_partition(n_low, prefix, n_free, base_vals, vtx_faces, face_vtx, logw_by_key, log_z, acc):
    """Accumulate ``sum_w`` and per-free-face ``sum_w * sigma_f`` into ``acc``.

    ``acc`` has length ``n_free + 1``; the last slot receives the total weight.
    Per-face sums are obtained from a running (compensated) total weight: a
    face collects the weight accumulated while it is switched on.
    """
    nv = vtx_faces.shape[0]
    stride = nv + 1
    vals = base_vals.copy()
    for b in range(n_free - n_low):
        if (prefix >> b) & 1:
            vals[n_low + b] = 1
    counts, k_of = _initial_counts(vals, vtx_faces)
    on_since = np.zeros(n_free, dtype=np.float64)
    face_acc = np.zeros(n_free, dtype=np.float64)
    running = 0.0
    comp = 0.0
    key = (counts[1] * stride + counts[2]) * stride + counts[3]
    w = np.exp(logw_by_key[key] - log_z)
    y = w - comp
    t_ = running + y
    comp = (t_ - running) - y
    running = t_
    total = np.int64(1) << n_low
    for s in range(1, total):
        f = _lowest_set_bit(s)
        step = 1 - 2 * vals[f]
        vals[f] += step
        if step == 1:
            on_since[f] = running
        else:
            face_acc[f] += running - on_since[f]
        for t in range(6):
            v = face_vtx[f, t]
            k = k_of[v]
            counts[k] -= 1
            counts[k + step] += 1
            k_of[v] = k + step
        key = (counts[1] * stride + counts[2]) * stride + counts[3]
        w = np.exp(logw_by_key[key] - log_z)
        y = w - comp
        t_ = running + y
        comp = (t_ - running) - y
        running = t_
    for f in range(n_free):
        if vals[f] == 1:
            face_acc[f] += running - on_since[f]
    for f in range(n_free):
        acc[f] += face_acc[f]
    acc[n_free] += running


@njit(cache=True, nogil=True)
def config_table(n_free, base_vals, vtx_faces, face_vtx, keys):
    """Write the tally key of every configuration, indexed by its face bits."""
    nv = vtx_faces.shape[0]
    stride = nv + 1
    vals = base_vals.copy()
    counts, k_of = _initial_counts(vals, vtx_faces)
    keys[0] = (counts[1] * stride + counts[2]) * stride + counts[3]
    index = 0
    total = np.int64(1) << n_free
    for s in range(1, total):
        f = _lowest_set_bit(s)
        step = 1 - 2 * vals[f]
        vals[f] += step
        index ^= np.int64(1) << f
        for t in range(6):
            v = face_vtx[f, t]
            k = k_of[v]
            counts[k] -= 1
            counts[k + step] += 1
            k_of[v] = k + step
        keys[index] = (counts[1] * stride + counts[2]) * stride + counts[3]


@njit(cache=True, nogil=True)
def _accept(dh, beta, u, dynamics):
    x = beta * dh
    if dynamics == METROPOLIS:
        if x <= 0.0:
            return True
        return u < np.exp(-x)
    if x > 700.0:
        return False
    return u < 1.0 / (1.0 + np.exp(x))


@njit(cache=True, nogil=True)
def chain_block(
    values,
    counts,
    fills,
    subfill,
    agree,
    temp_of,
    slot_of,
    free,
    face_vtx,
    vtx_faces,
    counted,
    sub_labels,
    refs,
    prop_faces,
    prop_u,
    swap_u,
    table,
    denom,
    betas,
    dynamics,
    n_sweeps,
    sweep_index0,
    record,
    rec_counts,
    rec_fill,
    rec_sub,
    rec_agree,
    rec_vals,
    rec_pos,
    stats,
):
    """Advance every replica by ``n_sweeps`` sweeps of single-face proposals.

    Replica slot ``m`` holds configuration ``values[m]`` at temperature index
    ``temp_of[m]``; ``slot_of`` is the inverse map.  After each sweep adjacent
    temperatures attempt an exchange (even pairs on even sweeps).  When
    ``record[s]`` is set, observables of the slot at temperature 0 are
    written at ``rec_pos``.  ``counted`` flags vertices that enter the energy.
    Returns the next free record position.
    """
    n_rep = values.shape[0]
    n_temp = betas.shape[0]
    sweep_len = free.shape[0]
    n_ref = refs.shape[0]
    p = 0
    q = 0
    for s in range(n_sweeps):
        for m in range(n_rep):
            beta = betas[temp_of[m]]
            for _ in range(sweep_len):
                f = free[prop_faces[p]]
                u = prop_u[p]
                p += 1
                old = values[m, f]
                step = 1 - 2 * old
                dh = 0.0
                for t in range(6):
                    v = face_vtx[f, t]
                    if counted[v]:
                        k = values[m, vtx_faces[v, 0]] + values[m, vtx_faces[v, 1]] + values[m, vtx_faces[v, 2]]
                        dh += table[k + step] - table[k]
                if _accept(dh / denom, beta, u, dynamics):
                    for t in range(6):
                        v = face_vtx[f, t]
                        if counted[v]:
                            k = values[m, vtx_faces[v, 0]] + values[m, vtx_faces[v, 1]] + values[m, vtx_faces[v, 2]]
                            counts[m, k] -= 1
                            counts[m, k + step] += 1
                    values[m, f] = 1 - old
                    fills[m] += step
                    if sub_labels.shape[0] > 0:
                        subfill[m, sub_labels[f]] += step
                    for r in range(n_ref):
                        if refs[r, f] == values[m, f]:
                            agree[m, r] += 1
                        else:
                            agree[m, r] -= 1
                    stats[0] += 1
                stats[1] += 1
        if n_temp > 1:
            start = (sweep_index0 + s) % 2
            for i in range(start, n_temp - 1, 2):
                a = slot_of[i]
                b = slot_of[i + 1]
                ea = 0.0
                eb = 0.0
                for k in range(4):
                    ea += counts[a, k] * table[k]
                    eb += counts[b, k] * table[k]
                x = (betas[i] - betas[i + 1]) * (ea - eb) / denom
                u = swap_u[q]
                q += 1
                stats[3] += 1
                if x >= 0.0 or u < np.exp(x):
                    temp_of[a] = i + 1
                    temp_of[b] = i
                    slot_of[i] = b
                    slot_of[i + 1] = a
                    stats[2] += 1
        if record[s]:
            m0 = slot_of[0]
            for k in range(4):
                rec_counts[rec_pos, k] = counts[m0, k]
            rec_fill[rec_pos] = fills[m0]
            for k in range(subfill.shape[1]):
                rec_sub[rec_pos, k] = subfill[m0, k]
            for r in range(n_ref):
                rec_agree[rec_pos, r] = agree[m0, r]
            if rec_vals.shape[0] > 0:
                for f in range(values.shape[1]):
                    rec_vals[rec_pos, f] = values[m0, f]
            rec_pos += 1
    return rec_pos
