"""Compiled SABRE routing pass.

Gates are given as parallel arrays ``qa, qb`` of logical qubits (``qb = -1``
for single-qubit gates). A pass walks the dependency DAG, executes every
gate whose qubits are adjacent under the current layout, and otherwise
inserts the lookahead-scored SWAP. Events are ``(0, gate, -1)`` or
``(1, phys_a, phys_b)``.
"""
import numba
import numpy as np


@numba.njit(cache=True)
def seed_rng(seed):
    np.random.seed(seed)


@numba.njit(cache=True)
def build_dag(qa, qb, n_logical):
    g = qa.size
    nxt_a = -np.ones(g, np.int64)
    nxt_b = -np.ones(g, np.int64)
    npred = np.zeros(g, np.int64)
    last = -np.ones(n_logical, np.int64)
    for i in range(g):
        p1 = last[qa[i]]
        p2 = -1
        if qb[i] >= 0:
            p2 = last[qb[i]]
        if p1 >= 0:
            npred[i] += 1
            _link(p1, i, qa[i], qa, nxt_a, nxt_b)
        if p2 >= 0 and p2 != p1:
            npred[i] += 1
            _link(p2, i, qb[i], qa, nxt_a, nxt_b)
        last[qa[i]] = i
        if qb[i] >= 0:
            last[qb[i]] = i
    return nxt_a, nxt_b, npred


@numba.njit(cache=True)
def _link(p, i, q, qa, nxt_a, nxt_b):
    # the successor slot follows which of p's qubits is shared
    if qa[p] == q:
        nxt_a[p] = i
    else:
        nxt_b[p] = i


@numba.njit(cache=True)
def sabre_pass(qa, qb, nxt_a, nxt_b, npred, l2p, p2l, dist, nbr_ptr, nbr_idx,
               ext_size, emit, ev_kind, ev_a, ev_b):
    """One routing pass; mutates the layout. Returns (n_events, depth, cnots, swaps)."""
    g = qa.size
    n_phys = p2l.size
    remaining = npred.copy()
    front = np.empty(g, np.int64)
    nf = 0
    for i in range(g):
        if remaining[i] == 0:
            front[nf] = i
            nf += 1
    new_front = np.empty(g, np.int64)
    layer = np.zeros(n_phys, np.int64)
    decay = np.ones(n_phys)
    ext = np.empty(ext_size, np.int64)
    queue = np.empty(g, np.int64)
    mark = -np.ones(g, np.int64)
    stamp = 0
    cand_a = np.empty(2 * n_phys * 8, np.int64)
    cand_b = np.empty(2 * n_phys * 8, np.int64)
    executed = 0
    n_ev = 0
    cnots = 0
    swaps = 0
    since_exec = 0
    since_reset = 0
    while executed < g:
        progress = True
        while progress:
            progress = False
            nn = 0
            for fi in range(nf):
                i = front[fi]
                a = l2p[qa[i]]
                ok = qb[i] < 0
                if not ok:
                    ok = dist[a, l2p[qb[i]]] == 1
                if ok:
                    if qb[i] < 0:
                        layer[a] += 1
                    else:
                        b = l2p[qb[i]]
                        d = max(layer[a], layer[b]) + 1
                        layer[a] = d
                        layer[b] = d
                        cnots += 1
                    if emit:
                        ev_kind[n_ev] = 0
                        ev_a[n_ev] = i
                        ev_b[n_ev] = -1
                    n_ev += 1
                    executed += 1
                    progress = True
                    for s in (nxt_a[i], nxt_b[i]):
                        if s >= 0:
                            remaining[s] -= 1
                            if remaining[s] == 0:
                                new_front[nn] = s
                                nn += 1
                else:
                    new_front[nn] = i
                    nn += 1
            for fi in range(nn):
                front[fi] = new_front[fi]
            nf = nn
            if progress:
                since_exec = 0
                decay[:] = 1.0
        if executed >= g:
            break

        if since_exec > 3 * n_phys:
            # release valve: walk the first blocked gate's control toward its target
            i = front[0]
            a = l2p[qa[i]]
            b = l2p[qb[i]]
            while dist[a, b] > 1:
                for k in range(nbr_ptr[a], nbr_ptr[a + 1]):
                    c = nbr_idx[k]
                    if dist[c, b] < dist[a, b]:
                        break
                n_ev, cnots = _swap(a, c, l2p, p2l, layer, emit, ev_kind, ev_a, ev_b, n_ev, cnots)
                swaps += 1
                a = c
            since_exec = 0
            continue

        # extended set: first ext_size two-qubit gates reachable from the front
        stamp += 1
        ne = 0
        qh = 0
        qt = 0
        for fi in range(nf):
            queue[qt] = front[fi]
            qt += 1
            mark[front[fi]] = stamp
        while qh < qt and ne < ext_size:
            i = queue[qh]
            qh += 1
            for s in (nxt_a[i], nxt_b[i]):
                if s >= 0 and mark[s] != stamp:
                    mark[s] = stamp
                    queue[qt] = s
                    qt += 1
                    if qb[s] >= 0 and ne < ext_size:
                        ext[ne] = s
                        ne += 1

        nc = 0
        for fi in range(nf):
            i = front[fi]
            for p in (l2p[qa[i]], l2p[qb[i]]):
                for k in range(nbr_ptr[p], nbr_ptr[p + 1]):
                    if nc < cand_a.size:
                        cand_a[nc] = p
                        cand_b[nc] = nbr_idx[k]
                        nc += 1
        best = 1e300
        best_k = -1
        ties = 0
        for c in range(nc):
            pa = cand_a[c]
            pb = cand_b[c]
            la = p2l[pa]
            lb = p2l[pb]
            l2p[la] = pb
            l2p[lb] = pa
            f = 0.0
            for fi in range(nf):
                i = front[fi]
                f += dist[l2p[qa[i]], l2p[qb[i]]]
            f /= nf
            e = 0.0
            if ne > 0:
                for ei in range(ne):
                    i = ext[ei]
                    e += dist[l2p[qa[i]], l2p[qb[i]]]
                e /= ne
            h = max(decay[pa], decay[pb]) * (f + 0.5 * e)
            l2p[la] = pa
            l2p[lb] = pb
            if h < best - 1e-12:
                best = h
                best_k = c
                ties = 1
            elif abs(h - best) <= 1e-12:
                ties += 1
                if np.random.random() * ties < 1.0:
                    best_k = c
        pa = cand_a[best_k]
        pb = cand_b[best_k]
        n_ev, cnots = _swap(pa, pb, l2p, p2l, layer, emit, ev_kind, ev_a, ev_b, n_ev, cnots)
        swaps += 1
        since_exec += 1
        decay[pa] += 0.001
        decay[pb] += 0.001
        since_reset += 1
        if since_reset >= 5:
            decay[:] = 1.0
            since_reset = 0
    return n_ev, layer.max(), cnots, swaps


@numba.njit(cache=True)
def _swap(pa, pb, l2p, p2l, layer, emit, ev_kind, ev_a, ev_b, n_ev, cnots):
    la = p2l[pa]
    lb = p2l[pb]
    p2l[pa] = lb
    p2l[pb] = la
    l2p[la] = pb
    l2p[lb] = pa
    d = max(layer[pa], layer[pb]) + 3
    layer[pa] = d
    layer[pb] = d
    if emit:
        ev_kind[n_ev] = 1
        ev_a[n_ev] = pa
        ev_b[n_ev] = pb
    return n_ev + 1, cnots + 3
