"""Pauli operators in symplectic form and the stabilizer-group queries built on them.

An n-qubit Pauli is stored as two packed bit vectors and a phase exponent::

    P = i**phase * X^x Z^z        (X factors left of Z factors on every qubit)

so that ``Y = i X Z`` is ``x=1, z=1, phase=1``. Qubit ``j`` is bit ``j`` of
``x``/``z`` and the leftmost character of a label.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import reduce
from typing import Iterable, NamedTuple, Sequence

import numpy as np

from . import gf2

_PHASE_LABELS = {0: "+", 1: "+i", 2: "-", 3: "-i"}
_LABEL_PHASES = {"": 0, "+": 0, "+i": 1, "i": 1, "-": 2, "-i": 3}


class DimensionError(ValueError):
    """Operands act on different numbers of qubits."""


class InvalidGroupError(ValueError):
    """Generators are not independent or do not commute."""


@dataclass(frozen=True)
class PauliOperator:
    n: int
    x: int
    z: int
    phase: int = 0

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("a Pauli operator needs at least one qubit")
        if self.x >> self.n or self.z >> self.n or self.x < 0 or self.z < 0:
            raise ValueError("bit vectors longer than n")
        object.__setattr__(self, "phase", self.phase % 4)

    # -- constructors -------------------------------------------------------
    @classmethod
    def identity(cls, n: int) -> "PauliOperator":
        return cls(n, 0, 0)

    @classmethod
    def hermitian(cls, n: int, x: int, z: int) -> "PauliOperator":
        """The +1-signed Hermitian Pauli with the given support (Y where x=z=1)."""
        return cls(n, x, z, (x & z).bit_count())

    @classmethod
    def from_support(cls, n: int, qubits: Iterable[int], kind: str) -> "PauliOperator":
        bits = 0
        for q in qubits:
            if not 0 <= q < n:
                raise IndexError(f"qubit {q} out of range for n={n}")
            bits |= 1 << q
        if kind == "X":
            return cls(n, bits, 0)
        if kind == "Z":
            return cls(n, 0, bits)
        if kind == "Y":
            return cls.hermitian(n, bits, bits)
        raise ValueError(f"unknown Pauli kind {kind!r}")

    @classmethod
    def from_label(cls, label: str) -> "PauliOperator":
        """Parse labels such as ``"XZI"``, ``"-iYX"`` or ``"+ZZ"``."""
        body = label.lstrip("+-i")
        prefix = label[: len(label) - len(body)]
        if prefix not in _LABEL_PHASES:
            raise ValueError(f"bad phase prefix in {label!r}")
        x = z = ny = 0
        for j, ch in enumerate(body):
            if ch == "X":
                x |= 1 << j
            elif ch == "Z":
                z |= 1 << j
            elif ch == "Y":
                x |= 1 << j
                z |= 1 << j
                ny += 1
            elif ch != "I":
                raise ValueError(f"bad Pauli character {ch!r}")
        return cls(len(body), x, z, _LABEL_PHASES[prefix] + ny)

    # -- views --------------------------------------------------------------
    @property
    def x_bits(self) -> np.ndarray:
        return np.array([(self.x >> j) & 1 for j in range(self.n)], dtype=bool)

    @property
    def z_bits(self) -> np.ndarray:
        return np.array([(self.z >> j) & 1 for j in range(self.n)], dtype=bool)

    @property
    def symplectic(self) -> int:
        return self.x | (self.z << self.n)

    @property
    def support(self) -> tuple[int, ...]:
        return gf2.support(self.x | self.z)

    @property
    def weight(self) -> int:
        return (self.x | self.z).bit_count()

    @property
    def kind(self) -> str:
        """``"X"``/``"Z"`` for pure types, ``"I"`` for identity, else ``"mixed"``."""
        if not (self.x | self.z):
            return "I"
        if not self.z:
            return "X"
        if not self.x:
            return "Z"
        return "mixed"

    @property
    def label(self) -> str:
        ny = (self.x & self.z).bit_count()
        chars = []
        for j in range(self.n):
            xb, zb = (self.x >> j) & 1, (self.z >> j) & 1
            chars.append("IXZY"[xb + 2 * zb])
        sign = _PHASE_LABELS[(self.phase - ny) % 4]
        return ("" if sign == "+" else sign) + "".join(chars)

    def __repr__(self) -> str:
        return f"PauliOperator({self.label!r})"

    def to_matrix(self) -> np.ndarray:
        x1 = np.array([[0, 1], [1, 0]], dtype=complex)
        z1 = np.array([[1, 0], [0, -1]], dtype=complex)
        eye = np.eye(2, dtype=complex)
        mats = []
        for j in range(self.n):
            m = eye
            if (self.x >> j) & 1:
                m = m @ x1
            if (self.z >> j) & 1:
                m = m @ z1
            mats.append(m)
        return (1j**self.phase) * reduce(np.kron, mats)

    def __mul__(self, other: "PauliOperator") -> "PauliOperator":
        return pauli_mul(self, other)


def _check_dims(a: PauliOperator, b: PauliOperator) -> None:
    if a.n != b.n:
        raise DimensionError(f"operands act on {a.n} and {b.n} qubits")


def pauli_mul(a: PauliOperator, b: PauliOperator) -> PauliOperator:
    """Matrix product a·b, phase tracked exactly."""
    _check_dims(a, b)
    # Z^za X^xb = (-1)^(za.xb) X^xb Z^za
    sign = 2 * ((a.z & b.x).bit_count() & 1)
    return PauliOperator(a.n, a.x ^ b.x, a.z ^ b.z, a.phase + b.phase + sign)


def product(ops: Sequence[PauliOperator], n: int) -> PauliOperator:
    out = PauliOperator.identity(n)
    for op in ops:
        out = pauli_mul(out, op)
    return out


def symplectic_product(a: PauliOperator, b: PauliOperator) -> int:
    _check_dims(a, b)
    return ((a.x & b.z) ^ (a.z & b.x)).bit_count() & 1


def commutes(a: PauliOperator, b: PauliOperator) -> bool:
    return symplectic_product(a, b) == 0


class GroupMembership(NamedTuple):
    """``op == i**phase * g[indices[0]] * g[indices[1]] * ...``"""

    indices: tuple[int, ...]
    phase: int


def in_group(op: PauliOperator, generators: Sequence[PauliOperator]) -> GroupMembership | None:
    """Decompose ``op`` over ``generators`` up to phase, or None if it is not in the group."""
    for g in generators:
        _check_dims(op, g)
    combo = gf2.solve_combination([g.symplectic for g in generators], op.symplectic)
    if combo is None:
        return None
    prod = product([generators[i] for i in combo], op.n)
    return GroupMembership(combo, (op.phase - prod.phase) % 4)


def check_group(generators: Sequence[PauliOperator]) -> None:
    """Raise InvalidGroupError unless generators commute pairwise and are independent."""
    for i, a in enumerate(generators):
        for b in generators[i + 1 :]:
            if not commutes(a, b):
                raise InvalidGroupError(f"{a.label} and {b.label} anticommute")
    if not gf2.independent([g.symplectic for g in generators]):
        raise InvalidGroupError("generators are not independent")


def _is_css(generators: Sequence[PauliOperator]) -> bool:
    return all(g.x == 0 or g.z == 0 for g in generators)


def _quotient_basis(space: Sequence[int], sub: Sequence[int]) -> list[int]:
    """Vectors of ``space`` extending a basis of ``sub`` to a basis of span(space ∪ sub)."""
    chosen: list[int] = []
    current = gf2.rank(sub)
    for v in space:
        r = gf2.rank([*sub, *chosen, v])
        if r > current:
            chosen.append(v)
            current = r
    return chosen


def _span(basis: Sequence[int]) -> list[int]:
    out = [0]
    for b in basis:
        out += [v ^ b for v in out]
    return out


def _restrict(basis: list[int], form) -> list[int]:
    """Basis of {v in span(basis) : form(v) == 0} for a linear functional ``form``."""
    pivot = next((b for b in basis if form(b)), None)
    if pivot is None:
        return list(basis)
    return [b ^ pivot if form(b) else b for b in basis if b is not pivot]


def _swap_halves(v: int, n: int) -> int:
    m = (1 << n) - 1
    return ((v & m) << n) | (v >> n)


def _symp(a: int, b: int, n: int) -> int:
    m = (1 << n) - 1
    return (((a & m) & (b >> n)) ^ ((a >> n) & (b & m))).bit_count() & 1


def residual_logicals(
    n: int, generators: Sequence[PauliOperator]
) -> list[tuple[PauliOperator, PauliOperator]]:
    """Symplectic pairs of logical operators left free by ``generators``.

    Returns ``n - rank`` pairs ``(first, second)``. For CSS generator sets the
    first member is X-type and the second Z-type. Representatives are chosen
    greedily: the first member of each pair is the lightest logical still
    available (ties broken by lexicographic support), its partner is the
    lightest available operator anticommuting with it, and later pairs are
    restricted to commute with earlier ones. Minimisation inside a stabilizer
    coset is exact up to ``gf2.EXACT_ENUMERATION_DIM`` stabilizer dimensions
    and a deterministic descent beyond.
    """
    gens = list(generators)
    for g in gens:
        if g.n != n:
            raise DimensionError(f"generator on {g.n} qubits, expected {n}")
    check_group(gens)

    if _is_css(gens):
        hx = [g.x for g in gens if g.x]
        hz = [g.z for g in gens if g.z]
        x_log = _quotient_basis(gf2.nullspace(hz, n), hx)
        z_log = _quotient_basis(gf2.nullspace(hx, n), hz)

        def form(a, b):
            return (a & b).bit_count() & 1

        first_pool, second_pool = x_log, z_log
        first_mod, second_mod = hx, hz
        nbits, fold = n, None

        def to_ops(a, b):
            return PauliOperator(n, a, 0), PauliOperator(n, 0, b)

    else:
        rows = [g.symplectic for g in gens]
        norm = gf2.nullspace([_swap_halves(r, n) for r in rows], 2 * n)
        logs = _quotient_basis(norm, rows)

        def form(a, b):
            return _symp(a, b, n)

        first_pool = second_pool = logs
        first_mod = second_mod = rows
        nbits, fold = 2 * n, n
        m = (1 << n) - 1

        def to_ops(a, b):
            return (
                PauliOperator.hermitian(n, a & m, a >> n),
                PauliOperator.hermitian(n, b & m, b >> n),
            )

    cache: dict[tuple[int, int], int] = {}

    def rep(v: int, mod: Sequence[int]) -> int:
        key = (v, id(mod))
        if key not in cache:
            cache[key] = gf2.min_weight_coset(v, mod, nbits, fold)
        return cache[key]

    def weight_key(v: int):
        if fold is None:
            return gf2.lex_key(v)
        return gf2.lex_key((v | (v >> fold)) & ((1 << fold) - 1))

    pairs = []
    v1, v2 = list(first_pool), list(second_pool)
    while v1:
        firsts = [rep(u, first_mod) for u in _span(v1)[1:]]
        a = min(firsts, key=weight_key)
        seconds = [rep(w, second_mod) for w in _span(v2)[1:] if form(a, w)]
        b = min(seconds, key=weight_key)
        pairs.append(to_ops(a, b))
        v1 = _restrict(v1, lambda u: form(u, b))
        v2 = _restrict(v2, lambda w: form(a, w))
        if fold is not None:
            # one shared pool: both members leave it
            v1 = _restrict(v1, lambda u: form(u, a))
            v2 = v1
    return pairs


def minimal_solution(
    n: int,
    constraints: Sequence[PauliOperator],
    syndrome: Sequence[int],
    kind: str,
) -> PauliOperator | None:
    """Lightest ``kind``-type Pauli P with symplectic_product(c_i, P) == syndrome[i].

    Exact by kernel enumeration when the solution space is small; for larger
    spaces with a single unsatisfied constraint on a graph-like check matrix
    it is the BFS shortest path to a boundary. Returns None when no solution
    exists.
    """
    if kind not in ("X", "Z"):
        raise ValueError("kind must be 'X' or 'Z'")
    # an X-type P sees the Z part of each constraint and vice versa
    rows = [c.z if kind == "X" else c.x for c in constraints]
    v0 = gf2.solve_affine(rows, syndrome, n)
    if v0 is None:
        return None
    kernel = gf2.nullspace(rows, n)
    if len(kernel) > gf2.EXACT_ENUMERATION_DIM and sum(syndrome) == 1:
        columns = [[i for i, r in enumerate(rows) if (r >> q) & 1] for q in range(n)]
        if all(len(c) <= 2 for c in columns):
            target = list(syndrome).index(1)
            cols = gf2.shortest_path_solution(columns, len(rows), target)
            if cols is not None:
                return PauliOperator.from_support(n, cols, kind)
    best = gf2.min_weight_coset(v0, kernel, n)
    return PauliOperator(n, best, 0) if kind == "X" else PauliOperator(n, 0, best)
