"""Linear algebra over GF(2) on bit-packed rows.

Rows are plain Python ints, bit ``j`` holding column ``j``. Arbitrary
precision ints give word-packed storage for free and XOR of two rows is a
single machine-level operation per 64 columns.
"""

from __future__ import annotations

from collections import deque
from typing import Iterable, Sequence

import numpy as np

# Largest kernel dimension enumerated exhaustively by ``min_weight_coset``.
EXACT_ENUMERATION_DIM = 22


def popcount(v: int) -> int:
    return v.bit_count()


def support(v: int) -> tuple[int, ...]:
    out = []
    while v:
        low = v & -v
        out.append(low.bit_length() - 1)
        v ^= low
    return tuple(out)


def _echelon(rows: Sequence[int]) -> dict[int, tuple[int, int]]:
    """Map pivot bit -> (reduced row, combination of input indices)."""
    basis: dict[int, tuple[int, int]] = {}
    for idx, r in enumerate(rows):
        combo = 1 << idx
        while r:
            piv = r.bit_length() - 1
            if piv not in basis:
                basis[piv] = (r, combo)
                break
            br, bc = basis[piv]
            r ^= br
            combo ^= bc
    return basis


def rank(rows: Iterable[int]) -> int:
    return len(_echelon(list(rows)))


def independent(rows: Sequence[int]) -> bool:
    return rank(rows) == len(rows)


def solve_combination(rows: Sequence[int], target: int) -> tuple[int, ...] | None:
    """Indices of ``rows`` whose XOR equals ``target``, or None."""
    basis = _echelon(rows)
    combo = 0
    r = target
    while r:
        piv = r.bit_length() - 1
        if piv not in basis:
            return None
        br, bc = basis[piv]
        r ^= br
        combo ^= bc
    return support(combo)


def _rref(rows: Sequence[int]) -> list[int]:
    """Fully reduced row echelon form; each pivot (highest bit) is unique."""
    basis = _echelon(rows)
    pivots = sorted(basis)
    reduced = {p: basis[p][0] for p in pivots}
    for p in pivots:
        rp = reduced[p]
        for q in pivots:
            if q != p and (reduced[q] >> p) & 1:
                reduced[q] ^= rp
    return [reduced[p] for p in pivots]


def nullspace(rows: Sequence[int], nbits: int) -> list[int]:
    """Basis of {v : popcount(r & v) is even for every row r}."""
    rref = _rref(rows)
    pivot_of = {r.bit_length() - 1: r for r in rref}
    out = []
    for f in range(nbits):
        if f in pivot_of:
            continue
        v = 1 << f
        for piv, r in pivot_of.items():
            if (r >> f) & 1:
                v |= 1 << piv
        out.append(v)
    return out


def solve_affine(rows: Sequence[int], rhs: Sequence[int], nbits: int) -> int | None:
    """A particular v with parity(rows[i] & v) == rhs[i], or None if inconsistent."""
    aug = [(r << 1) | (t & 1) for r, t in zip(rows, rhs)]
    v = 0
    for r in _rref(aug):
        piv = r.bit_length() - 1
        if piv == 0:
            return None
        if r & 1:
            v |= 1 << (piv - 1)
    return v


def _to_words(vectors: Sequence[int], nbits: int) -> np.ndarray:
    nwords = max(1, (nbits + 63) // 64)
    out = np.zeros((len(vectors), nwords), dtype=np.uint64)
    mask = (1 << 64) - 1
    for i, v in enumerate(vectors):
        v = int(v)
        for w in range(nwords):
            out[i, w] = np.uint64((v >> (64 * w)) & mask)
    return out


def _from_words(words: np.ndarray) -> int:
    v = 0
    for w, val in enumerate(words):
        v |= int(val) << (64 * w)
    return v


def lex_key(v: int) -> tuple[int, tuple[int, ...]]:
    s = support(v)
    return (len(s), s)


def min_weight_coset(
    v0: int,
    basis: Sequence[int],
    nbits: int,
    fold: int | None = None,
) -> int:
    """Minimum-weight element of ``v0 + span(basis)``.

    Ties are broken by the lexicographically smallest support. When ``fold``
    is given, vectors are symplectic (x | z << fold) and weight counts qubits
    touched by either half.

    Exhaustive when ``len(basis) <= EXACT_ENUMERATION_DIM``; otherwise a
    deterministic descent that only accepts strict improvements.
    """
    v0 = int(v0)
    basis = [int(b) for b in basis if b]

    def key(v: int):
        if fold is None:
            return lex_key(v)
        m = (1 << fold) - 1
        return lex_key((v | (v >> fold)) & m)

    if len(basis) <= EXACT_ENUMERATION_DIM:
        words = _to_words([v0, *basis], nbits)
        elems = words[:1].copy()
        for row in words[1:]:
            elems = np.concatenate([elems, elems ^ row])
        if fold is None:
            w = np.bitwise_count(elems).sum(axis=1)
        else:
            w = _folded_weights(elems, fold)
        best = int(w.min())
        cands = [_from_words(e) for e in elems[w == best]]
        return min(cands, key=key)

    v = v0
    improved = True
    while improved:
        improved = False
        for b in basis:
            if key(v ^ b) < key(v):
                v ^= b
                improved = True
    return v


def _folded_weights(elems: np.ndarray, fold: int) -> np.ndarray:
    # Rebuild per-row ints for the symplectic case; only used at small sizes.
    out = np.empty(elems.shape[0], dtype=np.int64)
    m = (1 << fold) - 1
    for i, e in enumerate(elems):
        v = _from_words(e)
        out[i] = ((v | (v >> fold)) & m).bit_count()
    return out


def shortest_path_solution(
    columns: Sequence[Sequence[int]],
    n_nodes: int,
    target: int,
) -> tuple[int, ...] | None:
    """Minimum set of columns whose node incidences XOR to ``{target}``.

    ``columns[q]`` lists the nodes touched by column ``q`` (at most two); a
    column touching one node connects it to a virtual boundary. Solutions are
    shortest target-to-boundary paths, found by BFS in column order.
    """
    boundary = n_nodes
    adj: list[list[tuple[int, int]]] = [[] for _ in range(n_nodes + 1)]
    for q, nodes in enumerate(columns):
        if len(nodes) == 1:
            adj[nodes[0]].append((boundary, q))
            adj[boundary].append((nodes[0], q))
        elif len(nodes) == 2:
            a, b = nodes
            adj[a].append((b, q))
            adj[b].append((a, q))
        elif len(nodes) > 2:
            raise ValueError("column touches more than two nodes")
    prev: dict[int, tuple[int, int]] = {target: (-1, -1)}
    queue = deque([target])
    while queue:
        u = queue.popleft()
        if u == boundary:
            break
        for v, q in adj[u]:
            if v not in prev:
                prev[v] = (u, q)
                queue.append(v)
    if boundary not in prev:
        return None
    cols = []
    u = boundary
    while u != target:
        u, q = prev[u]
        cols.append(q)
    return tuple(sorted(cols))
