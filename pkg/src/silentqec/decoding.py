"""Matching decoders shared by the state-vector and Pauli-frame simulators.

Each check type of a CSS layout gives a matching graph: checks are nodes,
data qubits are edges (a qubit seen by a single check is an edge to a
virtual boundary node). Defects are paired by exact minimum-weight matching
over all pairings when there are at most ``EXACT_LIMIT`` of them. Larger sets
are first split into clusters that cannot interact in an optimal matching;
clusters within the limit are matched by the full subset DP; larger clusters
by a sparse exact DP over reachable subsets, and only when that exceeds its
state budget by greedy nearest-pair matching refined by pairwise exchanges. With several syndrome rounds the
defects live in spacetime and the matching weight adds the round separation.
"""

from __future__ import annotations

from collections import deque

import numpy as np
from numba import njit, types
from numba.typed import Dict, List

from .codes import CodeLayout
from .pauli import PauliOperator

EXACT_LIMIT = 10
# Reachable-state budget of the sparse exact matcher before it gives up.
SPARSE_STATE_LIMIT = 20_000
INF = 1 << 40


class DecodingError(RuntimeError):
    """The defect set cannot be paired (odd parity and no boundary)."""


@njit(cache=True, nogil=True)
def _pair_exact(nodes, k, m, dist, bdist):
    size = 1 << k
    cost = np.empty(size, np.int64)
    choice = np.empty(size, np.int64)
    cost[0] = 0
    choice[0] = -1
    for mask in range(1, size):
        i = 0
        while not (mask >> i) & 1:
            i += 1
        rest = mask ^ (1 << i)
        ci = nodes[i] % m
        ti = nodes[i] // m
        best = bdist[ci] + cost[rest]
        bc = -1
        for j in range(i + 1, k):
            if (rest >> j) & 1:
                cj = nodes[j] % m
                tj = nodes[j] // m
                c = dist[ci, cj] + abs(ti - tj) + cost[rest ^ (1 << j)]
                if c < best:
                    best = c
                    bc = j
        cost[mask] = best
        choice[mask] = bc
    partner = np.full(k, -1, np.int64)
    mask = size - 1
    while mask:
        i = 0
        while not (mask >> i) & 1:
            i += 1
        j = choice[mask]
        if j >= 0:
            partner[i] = j
            partner[j] = i
            mask ^= (1 << i) | (1 << j)
        else:
            mask ^= 1 << i
    return partner, cost[size - 1]


@njit(cache=True, nogil=True)
def _pair_greedy(nodes, k, m, dist, bdist):
    ncand = k * (k - 1) // 2 + k
    costs = np.empty(ncand, np.int64)
    ca = np.empty(ncand, np.int64)
    cb = np.empty(ncand, np.int64)
    pos = 0
    for i in range(k):
        ci = nodes[i] % m
        ti = nodes[i] // m
        costs[pos] = bdist[ci]
        ca[pos] = i
        cb[pos] = -1
        pos += 1
        for j in range(i + 1, k):
            cj = nodes[j] % m
            tj = nodes[j] // m
            costs[pos] = dist[ci, cj] + abs(ti - tj)
            ca[pos] = i
            cb[pos] = j
            pos += 1
    order = np.argsort(costs, kind="mergesort")
    used = np.zeros(k, np.uint8)
    partner = np.full(k, -1, np.int64)
    total = 0
    for idx in order:
        i = ca[idx]
        j = cb[idx]
        if used[i]:
            continue
        if j == -1:
            used[i] = 1
            total += costs[idx]
        elif not used[j]:
            partner[i] = j
            partner[j] = i
            used[i] = 1
            used[j] = 1
            total += costs[idx]
    return partner, total


@njit(cache=True, nogil=True)
def _unit_cost(x, y, nodes, m, dist, bdist):
    if x < 0 and y < 0:
        return 0
    if y < 0:
        return bdist[nodes[x] % m]
    if x < 0:
        return bdist[nodes[y] % m]
    return dist[nodes[x] % m, nodes[y] % m] + abs(nodes[x] // m - nodes[y] // m)


@njit(cache=True, nogil=True)
def _improve(partner, nodes, k, m, dist, bdist):
    """2-opt refinement: re-pair the four ends of any two units while it helps.

    A unit is a matched pair, a defect matched to the boundary (x, -1) or an
    empty slot (-1, -1), so splits and merges with the boundary are covered.
    """
    ua = np.empty(k + 1, np.int64)
    ub = np.empty(k + 1, np.int64)
    nu = 0
    for i in range(k):
        if partner[i] == -1:
            ua[nu] = i
            ub[nu] = -1
            nu += 1
        elif partner[i] > i:
            ua[nu] = i
            ub[nu] = partner[i]
            nu += 1
    ua[nu] = -1
    ub[nu] = -1
    nu += 1
    improved = True
    while improved:
        improved = False
        for u in range(nu):
            for v in range(u + 1, nu):
                a, b, c, d = ua[u], ub[u], ua[v], ub[v]
                cur = _unit_cost(a, b, nodes, m, dist, bdist) + _unit_cost(c, d, nodes, m, dist, bdist)
                alt1 = _unit_cost(a, c, nodes, m, dist, bdist) + _unit_cost(b, d, nodes, m, dist, bdist)
                alt2 = _unit_cost(a, d, nodes, m, dist, bdist) + _unit_cost(b, c, nodes, m, dist, bdist)
                if alt1 < cur and alt1 <= alt2:
                    ub[u], ua[v] = c, b
                    improved = True
                elif alt2 < cur:
                    ub[u], ub[v] = d, b
                    improved = True
        # keep one empty unit available for splits
        has_empty = False
        for u in range(nu):
            if ua[u] < 0 and ub[u] < 0:
                has_empty = True
        if not has_empty and nu <= k:
            ua[nu] = -1
            ub[nu] = -1
            nu += 1
            improved = True
    out = np.full(k, -1, np.int64)
    total = 0
    for u in range(nu):
        a, b = ua[u], ub[u]
        total += _unit_cost(a, b, nodes, m, dist, bdist)
        if a >= 0 and b >= 0:
            out[a] = b
            out[b] = a
    return out, total


@njit(cache=True, nogil=True)
def _pair_sparse(nodes, k, m, dist, bdist, state_limit):
    """Exact matching restricted to pairs that can appear in an optimum.

    Subsets are explored top-down from the full set, always resolving the
    lowest remaining defect, so only reachable subsets are visited. Returns
    ok = False when more than ``state_limit`` subsets would be needed.
    """
    cand = np.zeros((k, k), np.bool_)
    for i in range(k):
        ci = nodes[i] % m
        ti = nodes[i] // m
        for j in range(i + 1, k):
            cj = nodes[j] % m
            tj = nodes[j] // m
            if dist[ci, cj] + abs(ti - tj) < bdist[ci] + bdist[cj]:
                cand[i, j] = True
    memo = Dict.empty(key_type=types.int64, value_type=types.int64)
    pick = Dict.empty(key_type=types.int64, value_type=types.int64)
    memo[0] = 0
    full = (1 << k) - 1
    stack = List()
    stack.append(full)
    while len(stack) > 0:
        mask = stack[-1]
        if mask in memo:
            stack.pop()
            continue
        i = 0
        while not (mask >> i) & 1:
            i += 1
        rest = mask ^ (1 << i)
        ready = True
        if rest not in memo:
            stack.append(rest)
            ready = False
        for j in range(i + 1, k):
            if (rest >> j) & 1 and cand[i, j]:
                child = rest ^ (1 << j)
                if child not in memo:
                    stack.append(child)
                    ready = False
        if not ready:
            if len(memo) > state_limit:
                return np.full(k, -1, np.int64), INF, False
            continue
        ci = nodes[i] % m
        ti = nodes[i] // m
        best = bdist[ci] + memo[rest]
        bc = -1
        for j in range(i + 1, k):
            if (rest >> j) & 1 and cand[i, j]:
                c = dist[ci, nodes[j] % m] + abs(ti - nodes[j] // m) + memo[rest ^ (1 << j)]
                if c < best:
                    best = c
                    bc = j
        memo[mask] = best
        pick[mask] = bc
        stack.pop()
    partner = np.full(k, -1, np.int64)
    mask = full
    while mask:
        i = 0
        while not (mask >> i) & 1:
            i += 1
        j = pick[mask]
        if j >= 0:
            partner[i] = j
            partner[j] = i
            mask ^= (1 << i) | (1 << j)
        else:
            mask ^= 1 << i
    return partner, memo[full], True


@njit(cache=True, nogil=True)
def _pair(nodes, k, m, dist, bdist, exact_limit):
    """Pair ``nodes`` (spacetime ids t * m + check); -1 partner means boundary.

    Two defects are only worth pairing when their separation is below the sum
    of their boundary distances, so the defect set splits into independent
    clusters. Each cluster is matched exactly when it has at most
    ``exact_limit`` defects and greedily otherwise.
    """
    if k <= exact_limit:
        return _pair_exact(nodes, k, m, dist, bdist)
    parent = np.arange(k)
    for i in range(k):
        ci = nodes[i] % m
        ti = nodes[i] // m
        for j in range(i + 1, k):
            cj = nodes[j] % m
            tj = nodes[j] // m
            if dist[ci, cj] + abs(ti - tj) < bdist[ci] + bdist[cj]:
                a = i
                while parent[a] != a:
                    a = parent[a]
                b = j
                while parent[b] != b:
                    b = parent[b]
                if a != b:
                    parent[max(a, b)] = min(a, b)
    roots = np.empty(k, np.int64)
    for i in range(k):
        a = i
        while parent[a] != a:
            a = parent[a]
        roots[i] = a
    partner = np.full(k, -1, np.int64)
    total = 0
    members = np.empty(k, np.int64)
    for r in range(k):
        size = 0
        for i in range(k):
            if roots[i] == r:
                members[size] = i
                size += 1
        if size == 0:
            continue
        sub = nodes[members[:size]]
        if size <= exact_limit:
            sp, st = _pair_exact(sub, size, m, dist, bdist)
        else:
            ok = False
            if size <= 62:
                sp, st, ok = _pair_sparse(sub, size, m, dist, bdist, SPARSE_STATE_LIMIT)
            if not ok:
                sp, st = _pair_greedy(sub, size, m, dist, bdist)
                sp, st = _improve(sp, sub, size, m, dist, bdist)
        total += st
        for a in range(size):
            if sp[a] >= 0:
                partner[members[a]] = members[sp[a]]
    return partner, total


@njit(cache=True, nogil=True)
def _decode_batch(defects, m, dist, bdist, pair_paths, bound_paths, exact_limit, out, costs):
    """XOR each shot's recovery into ``out`` and its matching weight into ``costs``.

    Returns the number of shots whose defects could not be paired.
    """
    nshots, width = defects.shape
    nodes = np.empty(width, np.int64)
    bad = 0
    for b in range(nshots):
        k = 0
        for j in range(width):
            if defects[b, j]:
                nodes[k] = j
                k += 1
        if k == 0:
            continue
        partner, total = _pair(nodes[:k].copy(), k, m, dist, bdist, exact_limit)
        if total >= INF:
            bad += 1
            continue
        costs[b] += total
        for i in range(k):
            ci = nodes[i] % m
            p = partner[i]
            if p == -1:
                out[b] ^= bound_paths[ci]
            elif p > i:
                out[b] ^= pair_paths[ci, nodes[p] % m]
    return bad


class MatchingGraph:
    """Checks of one type as nodes, data qubits as edges."""

    def __init__(self, layout: CodeLayout, check_kind: str):
        self.check_kind = check_kind
        self.error_kind = "X" if check_kind == "Z" else "Z"
        self.checks = np.array(layout.stabilizer_indices(check_kind), dtype=np.int64)
        self.n = layout.n_data
        m = len(self.checks)
        self.m = m
        touching: list[list[int]] = [[] for _ in range(self.n)]
        for local, g in enumerate(self.checks):
            for q in layout.stabilizers[g].support:
                touching[q].append(local)
        adj: list[list[tuple[int, int]]] = [[] for _ in range(m + 1)]
        for q, nodes in enumerate(touching):
            if len(nodes) == 1:
                adj[nodes[0]].append((m, q))
                adj[m].append((nodes[0], q))
            elif len(nodes) == 2:
                adj[nodes[0]].append((nodes[1], q))
                adj[nodes[1]].append((nodes[0], q))
            elif len(nodes) > 2:
                raise ValueError("qubit in more than two checks of one type; not a matching graph")
        self._adj = adj
        self.dist = np.full((m + 1, m + 1), INF, dtype=np.int64)
        self.pair_paths = np.zeros((max(m, 1), max(m, 1), self.n), dtype=np.uint8)
        self.bound_paths = np.zeros((max(m, 1), self.n), dtype=np.uint8)
        for s in range(m + 1):
            self._bfs(s)
        self.bdist = self.dist[:m, m].copy() if m else np.zeros(0, np.int64)
        self.has_boundary = bool(adj[m])

    def _bfs(self, src: int) -> None:
        m = self.m
        prev = {src: (-1, -1)}
        queue = deque([src])
        while queue:
            u = queue.popleft()
            for v, q in self._adj[u]:
                if v not in prev:
                    prev[v] = (u, q)
                    queue.append(v)
        for t, _ in prev.items():
            length = 0
            u = t
            path = self.pair_paths[src, t] if (src < m and t < m) else None
            if src < m and t == m:
                path = self.bound_paths[src]
            while u != src:
                u, q = prev[u]
                length += 1
                if path is not None:
                    path[q] ^= 1
            self.dist[src, t] = length

    def decode(self, defects: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Recovery flips (B, n) and matching weights (B,) for defect bits (B, rounds * m)."""
        defects = np.ascontiguousarray(defects, dtype=np.uint8)
        out = np.zeros((defects.shape[0], self.n), dtype=np.uint8)
        costs = np.zeros(defects.shape[0], dtype=np.int64)
        if self.m == 0:
            return out, costs
        bad = _decode_batch(
            defects, self.m, self.dist, self.bdist, self.pair_paths,
            self.bound_paths, EXACT_LIMIT, out, costs,
        )
        if bad:
            raise DecodingError(f"{bad} shot(s) with unpairable {self.check_kind}-check defects")
        return out, costs


class Decoder:
    """Per-layout decoder covering both check types."""

    def __init__(self, layout: CodeLayout):
        for k in layout.kinds:
            if k not in ("X", "Z"):
                raise ValueError("matching decoder needs a CSS layout")
        self.layout = layout
        self.graphs = {k: MatchingGraph(layout, k) for k in ("Z", "X") if k in layout.kinds}

    def decode_batch(self, syndromes: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Recovery X and Z flips for defect rows (B, n_stabilizers), 1 = defect."""
        syndromes = np.asarray(syndromes, dtype=np.uint8)
        rx, rz, _ = self.decode_events(syndromes[:, None, :])
        return rx, rz

    def decode_events(
        self, events: np.ndarray
    ) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Spacetime matching of detection events (B, rounds, n_stabilizers).

        Returns recovery X flips, Z flips (both (B, n_data)) and the total
        matching weight per shot, i.e. the number of faults the decoder
        inferred.
        """
        events = np.asarray(events, dtype=np.uint8)
        nshots = events.shape[0]
        rx = np.zeros((nshots, self.layout.n_data), dtype=np.uint8)
        rz = np.zeros_like(rx)
        cost = np.zeros(nshots, dtype=np.int64)
        for graph in self.graphs.values():
            local = events[:, :, graph.checks].reshape(nshots, -1)
            rec, c = graph.decode(local)
            cost += c
            if graph.error_kind == "X":
                rx ^= rec
            else:
                rz ^= rec
        return rx, rz, cost

    def decode_history(self, history: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Decode reported defect bits (B, rounds, n_stabilizers).

        Detection events are changes between consecutive rounds; the first
        round is compared against all +1.
        """
        history = np.asarray(history, dtype=np.uint8)
        prev = np.zeros_like(history)
        prev[:, 1:] = history[:, :-1]
        rx, rz, _ = self.decode_events(history ^ prev)
        return rx, rz

    def recovery(self, syndrome) -> PauliOperator:
        """Recovery Pauli for one syndrome row of defect bits."""
        rx, rz = self.decode_batch(np.asarray(syndrome, dtype=np.uint8)[None, :])
        x = sum(1 << q for q in np.flatnonzero(rx[0]))
        z = sum(1 << q for q in np.flatnonzero(rz[0]))
        return PauliOperator.hermitian(self.layout.n_data, x, z)


def get_decoder(layout: CodeLayout) -> Decoder:
    dec = layout._cache.get("decoder")
    if dec is None:
        dec = Decoder(layout)
        layout._cache["decoder"] = dec
    return dec


def check_matrices(layout: CodeLayout) -> tuple[np.ndarray, np.ndarray]:
    """X-part and Z-part incidence of every stabilizer, both (m, n_data) uint8."""
    cached = layout._cache.get("check_matrices")
    if cached is None:
        gx = np.array([g.x_bits for g in layout.stabilizers], dtype=np.uint8).reshape(-1, layout.n_data)
        gz = np.array([g.z_bits for g in layout.stabilizers], dtype=np.uint8).reshape(-1, layout.n_data)
        cached = (gx, gz)
        layout._cache["check_matrices"] = cached
    return cached


def syndrome_bits(layout: CodeLayout, fx: np.ndarray, fz: np.ndarray) -> np.ndarray:
    """Defect bits (B, m) of X flips ``fx`` and Z flips ``fz`` (both (B, n))."""
    gx, gz = check_matrices(layout)
    s = fx.astype(np.int32) @ gz.T.astype(np.int32) + fz.astype(np.int32) @ gx.T.astype(np.int32)
    return (s & 1).astype(np.uint8)
