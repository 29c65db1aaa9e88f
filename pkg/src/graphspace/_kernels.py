"""JIT-compiled kernels for traversal, flow, spectra and forests.

Deliberately loop-based: call sites range from 6-vertex graphs (exact
enumeration) to 100-vertex experiment graphs, and the JIT keeps both
ends fast without separate code paths. Graphs arrive as CSR arrays
(``indptr``, ``indices``) with neighbor lists sorted ascending.
"""

from __future__ import annotations

import numpy as np
from numba import njit, prange

_U64 = np.uint64
_GOLDEN = _U64(0x9E3779B97F4A7C15)


# ---------------------------------------------------------------------------
# traversal
# ---------------------------------------------------------------------------

@njit(cache=True)
def bfs_reach_count(indptr, indices, n):
    seen = np.zeros(n, np.uint8)
    queue = np.empty(n, np.int32)
    seen[0] = 1
    queue[0] = 0
    head, tail = 0, 1
    while head < tail:
        u = queue[head]
        head += 1
        for k in range(indptr[u], indptr[u + 1]):
            v = indices[k]
            if seen[v] == 0:
                seen[v] = 1
                queue[tail] = v
                tail += 1
    return tail


@njit(cache=True)
def all_pairs_bfs(indptr, indices, n):
    dist = np.full((n, n), -1, np.int32)
    queue = np.empty(n, np.int32)
    for s in range(n):
        dist[s, s] = 0
        queue[0] = s
        head, tail = 0, 1
        while head < tail:
            u = queue[head]
            head += 1
            du = dist[s, u]
            for k in range(indptr[u], indptr[u + 1]):
                v = indices[k]
                if dist[s, v] < 0:
                    dist[s, v] = du + 1
                    queue[tail] = v
                    tail += 1
    return dist


@njit(cache=True)
def betweenness_scores(indptr, indices, n):
    """Brandes accumulation; returns per-vertex betweenness over unordered
    source-target pairs with endpoints excluded."""
    bc = np.zeros(n)
    dist = np.empty(n, np.int32)
    sigma = np.empty(n)
    delta = np.empty(n)
    order = np.empty(n, np.int32)
    for s in range(n):
        for i in range(n):
            dist[i] = -1
            sigma[i] = 0.0
            delta[i] = 0.0
        dist[s] = 0
        sigma[s] = 1.0
        order[0] = s
        head, tail = 0, 1
        while head < tail:
            u = order[head]
            head += 1
            du = dist[u]
            su = sigma[u]
            for k in range(indptr[u], indptr[u + 1]):
                v = indices[k]
                if dist[v] < 0:
                    dist[v] = du + 1
                    order[tail] = v
                    tail += 1
                if dist[v] == du + 1:
                    sigma[v] += su
        for i in range(tail - 1, 0, -1):
            w = order[i]
            coeff = (1.0 + delta[w]) / sigma[w]
            dw = dist[w]
            for k in range(indptr[w], indptr[w + 1]):
                v = indices[k]
                if dist[v] == dw - 1:
                    delta[v] += sigma[v] * coeff
            bc[w] += delta[w]
    return bc * 0.5


# ---------------------------------------------------------------------------
# edge connectivity: min over targets of unit-capacity max-flow from vertex 0
# ---------------------------------------------------------------------------

@njit(cache=True)
def edge_connectivity(indptr, indices, n):
    if n <= 1:
        return 0
    m2 = indices.shape[0]
    twin = np.empty(m2, np.int32)
    for u in range(n):
        for k in range(indptr[u], indptr[u + 1]):
            v = indices[k]
            lo, hi = indptr[v], indptr[v + 1]
            while lo < hi:
                mid = (lo + hi) // 2
                if indices[mid] < u:
                    lo = mid + 1
                else:
                    hi = mid
            twin[k] = lo

    cap = np.empty(m2, np.int8)
    level = np.empty(n, np.int32)
    it = np.empty(n, np.int32)
    queue = np.empty(n, np.int32)
    vstack = np.empty(n + 1, np.int32)
    astack = np.empty(n + 1, np.int32)

    best = m2  # min degree is an upper bound on the connectivity
    for u in range(n):
        d = indptr[u + 1] - indptr[u]
        if d < best:
            best = d

    for t in range(1, n):
        if best <= 1:
            break
        for k in range(m2):
            cap[k] = 1
        flow = 0
        while flow < best:
            for i in range(n):
                level[i] = -1
            level[0] = 0
            queue[0] = 0
            head, tail = 0, 1
            while head < tail:
                u = queue[head]
                head += 1
                for k in range(indptr[u], indptr[u + 1]):
                    if cap[k] > 0:
                        v = indices[k]
                        if level[v] < 0:
                            level[v] = level[u] + 1
                            queue[tail] = v
                            tail += 1
            if level[t] < 0:
                break
            for i in range(n):
                it[i] = indptr[i]
            # blocking flow: repeated DFS with iteration pointers
            while flow < best:
                vstack[0] = 0
                depth = 0
                u = 0
                found = False
                while True:
                    if u == t:
                        found = True
                        break
                    moved = False
                    while it[u] < indptr[u + 1]:
                        k = it[u]
                        v = indices[k]
                        if cap[k] > 0 and level[v] == level[u] + 1:
                            astack[depth] = k
                            depth += 1
                            vstack[depth] = v
                            u = v
                            moved = True
                            break
                        it[u] += 1
                    if moved:
                        continue
                    level[u] = -1  # dead end, prune from level graph
                    if depth == 0:
                        break
                    depth -= 1
                    u = vstack[depth]
                    it[u] += 1
                if not found:
                    break
                for i in range(depth):
                    k = astack[i]
                    cap[k] -= 1
                    cap[twin[k]] += 1
                flow += 1
        if flow < best:
            best = flow
    return best


# ---------------------------------------------------------------------------
# dense symmetric spectra
# ---------------------------------------------------------------------------

@njit(cache=True)
def jacobi_eigh(a):
    """Cyclic Jacobi on a symmetric matrix (modified in place).

    Returns (eigenvalues unsorted, eigenvector columns, sweeps, converged).
    Convergence: off-diagonal Frobenius norm < 1e-12 * ||A||_F of the input.
    """
    n = a.shape[0]
    v = np.eye(n)
    normf2 = 0.0
    for i in range(n):
        for j in range(n):
            normf2 += a[i, j] * a[i, j]
    thresh2 = (1e-12 * 1e-12) * normf2
    sweeps = 0
    for sweep in range(120):
        off2 = 0.0
        for i in range(n - 1):
            for j in range(i + 1, n):
                off2 += 2.0 * a[i, j] * a[i, j]
        if off2 <= thresh2:
            return np.diag(a).copy(), v, sweep, True
        sweeps = sweep + 1
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if apq == 0.0:
                    continue
                tau = (a[q, q] - a[p, p]) / (2.0 * apq)
                if tau >= 0.0:
                    t = 1.0 / (tau + np.sqrt(1.0 + tau * tau))
                else:
                    t = -1.0 / (-tau + np.sqrt(1.0 + tau * tau))
                c = 1.0 / np.sqrt(1.0 + t * t)
                s = t * c
                for k in range(n):
                    akp = a[k, p]
                    akq = a[k, q]
                    a[k, p] = c * akp - s * akq
                    a[k, q] = s * akp + c * akq
                for k in range(n):
                    apk = a[p, k]
                    aqk = a[q, k]
                    a[p, k] = c * apk - s * aqk
                    a[q, k] = s * apk + c * aqk
                for k in range(n):
                    vkp = v[k, p]
                    vkq = v[k, q]
                    v[k, p] = c * vkp - s * vkq
                    v[k, q] = s * vkp + c * vkq
    return np.diag(a).copy(), v, sweeps, False


@njit(cache=True)
def power_iteration(m, tol, maxit):
    """Power iteration on M + cI with c = 1 + max absolute row sum.

    The shift makes the iteration matrix positive definite, so the
    dominant eigenvalue of M (largest algebraic after shifting) is found
    without sign oscillation. Returns (lambda, vector, iters, converged).
    """
    n = m.shape[0]
    c = 0.0
    for i in range(n):
        s = 0.0
        for j in range(n):
            s += abs(m[i, j])
        if s > c:
            c = s
    c += 1.0
    v = np.full(n, 1.0 / np.sqrt(n))
    w = np.empty(n)
    for itn in range(maxit):
        for i in range(n):
            acc = c * v[i]
            for j in range(n):
                acc += m[i, j] * v[j]
            w[i] = acc
        nrm = 0.0
        for i in range(n):
            nrm += w[i] * w[i]
        nrm = np.sqrt(nrm)
        diff = 0.0
        for i in range(n):
            wi = w[i] / nrm
            d = abs(wi - v[i])
            if d > diff:
                diff = d
            v[i] = wi
        if diff <= tol:
            lam = 0.0
            for i in range(n):
                acc = 0.0
                for j in range(n):
                    acc += m[i, j] * v[j]
                lam += v[i] * acc
            return lam, v, itn + 1, True
    return 0.0, v, maxit, False


# ---------------------------------------------------------------------------
# clustering
# ---------------------------------------------------------------------------

@njit(cache=True)
def square_clustering_mean(indptr, indices, deg, common):
    """Mean square-clustering over all vertices.

    ``common[u, w]`` must hold the number of common neighbors of u and w
    (i.e. A @ A). Vertices with degree < 2 or zero denominator count 0.
    """
    n = deg.shape[0]
    total = 0.0
    for v in range(n):
        if deg[v] < 2:
            continue
        sq = 0.0
        sa = 0.0
        for a in range(indptr[v], indptr[v + 1]):
            u = indices[a]
            for b in range(a + 1, indptr[v + 1]):
                w = indices[b]
                q = common[u, w] - 1.0  # v itself is always a common neighbor
                adj = 0.0
                lo, hi = indptr[u], indptr[u + 1]
                while lo < hi:
                    mid = (lo + hi) // 2
                    if indices[mid] < w:
                        lo = mid + 1
                    else:
                        hi = mid
                if lo < indptr[u + 1] and indices[lo] == w:
                    adj = 1.0
                eta = 1.0 + q + adj
                sq += q
                sa += (deg[u] - eta) * (deg[w] - eta) + q
        if sa > 0.0:
            total += sq / sa
    return total / n


# ---------------------------------------------------------------------------
# labeled-graph bitmask enumeration
# ---------------------------------------------------------------------------

@njit(cache=True)
def connected_mask_flags(n, pair_u, pair_v, start, stop):
    """Connectivity flag for every edge-mask in [start, stop)."""
    out = np.empty(stop - start, np.uint8)
    adj = np.empty(n, np.int64)
    full = (1 << n) - 1
    for mask in range(start, stop):
        for i in range(n):
            adj[i] = 0
        m = mask
        b = 0
        while m:
            if m & 1:
                u = pair_u[b]
                v = pair_v[b]
                adj[u] |= 1 << v
                adj[v] |= 1 << u
            m >>= 1
            b += 1
        reach = 1
        frontier = 1
        while frontier:
            nxt = 0
            f = frontier
            i = 0
            while f:
                if f & 1:
                    nxt |= adj[i]
                f >>= 1
                i += 1
            frontier = nxt & ~reach
            reach |= frontier
        out[mask - start] = 1 if reach == full else 0
    return out


@njit(cache=True)
def count_connected_masks(n, pair_u, pair_v, start, stop):
    flags = connected_mask_flags(n, pair_u, pair_v, start, stop)
    total = 0
    for i in range(flags.shape[0]):
        total += flags[i]
    return total


# ---------------------------------------------------------------------------
# random forest (CART, Gini impurity, bootstrap bagging)
# ---------------------------------------------------------------------------

@njit(cache=True)
def _mix64(x):
    z = (x + _GOLDEN) & _U64(0xFFFFFFFFFFFFFFFF)
    z = (z ^ (z >> _U64(30))) * _U64(0xBF58476D1CE4E5B9)
    z = (z ^ (z >> _U64(27))) * _U64(0x94D049BB133111EB)
    return z ^ (z >> _U64(31))


@njit(cache=True)
def _tree_fit(X, y, n_classes, max_features, seed,
              feat, thr, left, right, leaf):
    n, d = X.shape
    state = seed

    idx = np.empty(n, np.int32)
    for i in range(n):
        state = state + _GOLDEN
        idx[i] = np.int32(_mix64(state) % _U64(n))

    # explicit node stack: (node id, segment start, segment end)
    max_nodes = feat.shape[0]
    st_node = np.empty(max_nodes, np.int32)
    st_lo = np.empty(max_nodes, np.int32)
    st_hi = np.empty(max_nodes, np.int32)
    counts = np.empty(n_classes, np.int64)
    lcounts = np.empty(n_classes, np.int64)
    buf = np.empty(n, np.float64)
    lbuf = np.empty(n, np.int32)
    tmp = np.empty(n, np.int32)
    featperm = np.empty(d, np.int32)

    node_count = 1
    st_node[0] = 0
    st_lo[0] = 0
    st_hi[0] = n
    sp = 1
    while sp > 0:
        sp -= 1
        node = st_node[sp]
        lo = st_lo[sp]
        hi = st_hi[sp]
        sz = hi - lo

        for c in range(n_classes):
            counts[c] = 0
        for i in range(lo, hi):
            counts[y[idx[i]]] += 1
        majority = 0
        for c in range(1, n_classes):
            if counts[c] > counts[majority]:
                majority = c
        pure = counts[majority] == sz

        if pure or sz < 2:
            feat[node] = -1
            leaf[node] = majority
            continue

        # candidate features: partial Fisher-Yates
        for j in range(d):
            featperm[j] = j
        mf = max_features if max_features < d else d
        for j in range(mf):
            state = state + _GOLDEN
            r = j + np.int64(_mix64(state) % _U64(d - j))
            featperm[j], featperm[r] = featperm[r], featperm[j]

        best_score = 1e300
        best_f = -1
        best_thr = 0.0
        for j in range(mf):
            f = featperm[j]
            for i in range(sz):
                buf[i] = X[idx[lo + i], f]
                lbuf[i] = y[idx[lo + i]]
            order = np.argsort(buf[:sz])
            for c in range(n_classes):
                lcounts[c] = 0
            for i in range(sz - 1):
                lcounts[lbuf[order[i]]] += 1
                if buf[order[i]] < buf[order[i + 1]]:
                    nl = i + 1
                    nr = sz - nl
                    sl = 0.0
                    sr = 0.0
                    for c in range(n_classes):
                        lc = lcounts[c]
                        rc = counts[c] - lc
                        sl += lc * lc
                        sr += rc * rc
                    score = (nl - sl / nl) + (nr - sr / nr)
                    if score < best_score:
                        best_score = score
                        best_f = f
                        best_thr = 0.5 * (buf[order[i]] + buf[order[i + 1]])

        if best_f < 0:
            feat[node] = -1
            leaf[node] = majority
            continue

        # stable partition of the segment: <= threshold goes left
        nl = 0
        for i in range(lo, hi):
            if X[idx[i], best_f] <= best_thr:
                tmp[nl] = idx[i]
                nl += 1
        nr = nl
        for i in range(lo, hi):
            if X[idx[i], best_f] > best_thr:
                tmp[nr] = idx[i]
                nr += 1
        for i in range(sz):
            idx[lo + i] = tmp[i]

        lchild = node_count
        rchild = node_count + 1
        node_count += 2
        feat[node] = best_f
        thr[node] = best_thr
        left[node] = lchild
        right[node] = rchild
        st_node[sp] = lchild
        st_lo[sp] = lo
        st_hi[sp] = lo + nl
        sp += 1
        st_node[sp] = rchild
        st_lo[sp] = lo + nl
        st_hi[sp] = hi
        sp += 1
    return node_count


@njit(cache=True, parallel=True)
def forest_fit(X, y, n_classes, n_trees, max_features, seed):
    n = X.shape[0]
    max_nodes = 2 * n + 1
    feat = np.full((n_trees, max_nodes), -2, np.int32)
    thr = np.zeros((n_trees, max_nodes))
    left = np.full((n_trees, max_nodes), -1, np.int32)
    right = np.full((n_trees, max_nodes), -1, np.int32)
    leaf = np.full((n_trees, max_nodes), -1, np.int32)
    for t in prange(n_trees):
        tree_seed = _mix64(_U64(seed) ^ _mix64(_U64(t + 1)))
        _tree_fit(X, y, n_classes, max_features, tree_seed,
                  feat[t], thr[t], left[t], right[t], leaf[t])
    return feat, thr, left, right, leaf


@njit(cache=True)
def forest_predict(feat, thr, left, right, leaf, n_classes, X):
    n_trees = feat.shape[0]
    n = X.shape[0]
    votes = np.zeros((n, n_classes), np.int32)
    for t in range(n_trees):
        for i in range(n):
            node = 0
            while feat[t, node] >= 0:
                if X[i, feat[t, node]] <= thr[t, node]:
                    node = left[t, node]
                else:
                    node = right[t, node]
            votes[i, leaf[t, node]] += 1
    out = np.empty(n, np.int32)
    for i in range(n):
        best = 0
        for c in range(1, n_classes):
            if votes[i, c] > votes[i, best]:
                best = c
        out[i] = best
    return out
