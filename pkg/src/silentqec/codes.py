"""Repetition and planar surface code layouts, hole punching and braid algebra."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple, Sequence

from . import gf2
from .pauli import (
    PauliOperator,
    commutes,
    minimal_solution,
    pauli_mul,
    symplectic_product,
)


class Ancilla(NamedTuple):
    coord: tuple[int, int]
    data: tuple[int, ...]  # CNOT order: N, W, E, S


@dataclass(frozen=True)
class CodeLayout:
    name: str
    n_data: int
    coords: tuple[tuple[int, int], ...]
    stabilizers: tuple[PauliOperator, ...]
    kinds: tuple[str, ...]
    logicals: tuple[tuple[PauliOperator, PauliOperator], ...]
    ancillas: tuple[Ancilla, ...] | None
    distance: int
    _cache: dict = field(default_factory=dict, repr=False, compare=False, hash=False)

    @property
    def n_stabilizers(self) -> int:
        return len(self.stabilizers)

    def stabilizer_indices(self, kind: str) -> list[int]:
        return [i for i, k in enumerate(self.kinds) if k == kind]

    def index_of(self, coord: tuple[int, int]) -> int:
        return self.coords.index(tuple(coord))

    def ancilla_index(self, coord: tuple[int, int]) -> int:
        if self.ancillas is None:
            raise ValueError("layout has no ancilla map")
        for i, a in enumerate(self.ancillas):
            if a.coord == tuple(coord):
                return i
        raise KeyError(f"no ancilla at {coord}")


@dataclass(frozen=True)
class Hole:
    removed: frozenset[int]
    silent_logicals: tuple[tuple[PauliOperator, PauliOperator], ...]


@dataclass(frozen=True)
class ValidationReport:
    ok: bool
    message: str = "ok"

    def __bool__(self) -> bool:
        return self.ok


def repetition_code(n_c: int) -> CodeLayout:
    """Bit-flip repetition code on a line with checks Z_i Z_{i+1}."""
    if n_c < 2:
        raise ValueError("repetition code needs at least 2 qubits")
    stabs = tuple(PauliOperator.from_support(n_c, (i, i + 1), "Z") for i in range(n_c - 1))
    ancillas = tuple(Ancilla((0, 2 * i + 1), (i, i + 1)) for i in range(n_c - 1))
    logical = (
        PauliOperator.from_support(n_c, range(n_c), "X"),
        PauliOperator.from_support(n_c, (0,), "Z"),
    )
    return CodeLayout(
        name=f"repetition-{n_c}",
        n_data=n_c,
        coords=tuple((0, 2 * i) for i in range(n_c)),
        stabilizers=stabs,
        kinds=("Z",) * (n_c - 1),
        logicals=(logical,),
        ancillas=ancillas,
        distance=n_c,
    )


def _planar(rows: int, cols: int) -> tuple[list, dict, list[Ancilla], list[str]]:
    """Unrotated planar lattice on a (rows x cols) grid of sites.

    Data qubits sit where r + c is even. Z checks sit on (even r, odd c) and
    X checks on (odd r, even c); each acts on its N/W/E/S data neighbours.
    """
    coords = [(r, c) for r in range(rows) for c in range(cols) if (r + c) % 2 == 0]
    index = {rc: i for i, rc in enumerate(coords)}
    ancillas, kinds = [], []
    for r in range(rows):
        for c in range(cols):
            if (r + c) % 2 == 0:
                continue
            nbrs = [(r - 1, c), (r, c - 1), (r, c + 1), (r + 1, c)]
            data = tuple(index[p] for p in nbrs if p in index)
            ancillas.append(Ancilla((r, c), data))
            kinds.append("Z" if r % 2 == 0 else "X")
    return coords, index, ancillas, kinds


def surface_code(d: int) -> CodeLayout:
    """Planar (unrotated) surface code of odd distance ``d``: d² + (d-1)² data qubits."""
    if d < 3 or d % 2 == 0:
        raise ValueError("surface code distance must be odd and >= 3")
    size = 2 * d - 1
    coords, index, ancillas, kinds = _planar(size, size)
    n = len(coords)
    stabs = tuple(PauliOperator.from_support(n, a.data, k) for a, k in zip(ancillas, kinds))
    x_bar = PauliOperator.from_support(n, [index[(0, c)] for c in range(0, size, 2)], "X")
    z_bar = PauliOperator.from_support(n, [index[(r, 0)] for r in range(0, size, 2)], "Z")
    return CodeLayout(
        name=f"surface-{d}",
        n_data=n,
        coords=tuple(coords),
        stabilizers=stabs,
        kinds=tuple(kinds),
        logicals=((x_bar, z_bar),),
        ancillas=tuple(ancillas),
        distance=d,
    )


def validate(layout: CodeLayout) -> ValidationReport:
    """Check the layout invariants, returning the first violation found."""
    n = layout.n_data
    if len(layout.coords) != n:
        return ValidationReport(False, "coords: length differs from n_data")
    ops = list(layout.stabilizers) + [p for pair in layout.logicals for p in pair]
    if any(op.n != n for op in ops):
        return ValidationReport(False, "dimension: operator size differs from n_data")
    if len(layout.kinds) != len(layout.stabilizers):
        return ValidationReport(False, "kinds: length differs from stabilizer count")
    for i, (g, k) in enumerate(zip(layout.stabilizers, layout.kinds)):
        if g.kind not in (k, "I") and k != "mixed":
            return ValidationReport(False, f"kinds: stabilizer {i} is not {k}-type")

    stabs = layout.stabilizers
    for i, a in enumerate(stabs):
        for j in range(i + 1, len(stabs)):
            if not commutes(a, stabs[j]):
                return ValidationReport(
                    False, f"commutation: stabilizers {i} and {j} anticommute"
                )
    if not gf2.independent([g.symplectic for g in stabs]):
        return ValidationReport(False, "independence: stabilizers are linearly dependent")
    if len(stabs) != n - len(layout.logicals):
        return ValidationReport(
            False,
            f"count: {len(stabs)} stabilizers for {n} qubits and "
            f"{len(layout.logicals)} logical pairs",
        )

    for p, (xl, zl) in enumerate(layout.logicals):
        if commutes(xl, zl):
            return ValidationReport(False, f"logicals: pair {p} commutes internally")
        for i, g in enumerate(stabs):
            if not (commutes(xl, g) and commutes(zl, g)):
                return ValidationReport(
                    False, f"logicals: pair {p} anticommutes with stabilizer {i}"
                )
        for q in range(p + 1, len(layout.logicals)):
            for a in (xl, zl):
                for b in layout.logicals[q]:
                    if not commutes(a, b):
                        return ValidationReport(
                            False, f"logicals: pairs {p} and {q} do not commute"
                        )
    all_rows = [op.symplectic for op in ops]
    if not gf2.independent(all_rows):
        return ValidationReport(False, "logicals: a logical operator lies in the stabilizer group")

    if layout.ancillas is not None:
        if len(layout.ancillas) != len(stabs):
            return ValidationReport(False, "ancillas: count differs from stabilizer count")
        for i, (a, g) in enumerate(zip(layout.ancillas, stabs)):
            if tuple(sorted(a.data)) != g.support:
                return ValidationReport(False, f"ancillas: support mismatch at stabilizer {i}")
    return ValidationReport(True)


def punch_hole(layout: CodeLayout, removed) -> tuple[CodeLayout, Hole]:
    """Stop measuring the stabilizers in ``removed``.

    Each removed generator becomes one half of a silent logical pair (it is
    the operator the missing measurement would have fixed). Its partner is
    the lightest opposite-type operator that anticommutes with it and
    commutes with every other generator, removed or not. The original
    logical pairs are projected so the returned basis stays symplectic.
    """
    removed = sorted(set(removed))
    m = layout.n_stabilizers
    if any(not 0 <= i < m for i in removed):
        raise IndexError("removed stabilizer index out of range")
    n = layout.n_data
    keep = [i for i in range(m) if i not in removed]
    kept = [layout.stabilizers[i] for i in keep]

    silent: list[list[PauliOperator]] = []
    for idx in removed:
        g = layout.stabilizers[idx]
        kind = layout.kinds[idx]
        if kind not in ("X", "Z"):
            raise ValueError("hole punching needs pure X- or Z-type stabilizers")
        others = kept + [layout.stabilizers[j] for j in removed if j != idx]
        partner = minimal_solution(
            n, others + [g], [0] * len(others) + [1], "Z" if kind == "X" else "X"
        )
        if partner is None:
            raise ValueError(f"no partner operator for stabilizer {idx}")
        silent.append([g, partner] if kind == "X" else [partner, g])

    # Partners of mixed-kind removals may anticommute; fix with the removed generators.
    for j in range(len(silent)):
        for i in range(j):
            gi = layout.stabilizers[removed[i]]
            pi = silent[i][1] if layout.kinds[removed[i]] == "X" else silent[i][0]
            slot = 1 if layout.kinds[removed[j]] == "X" else 0
            if not commutes(silent[j][slot], pi):
                silent[j][slot] = pauli_mul(silent[j][slot], gi)

    def project(v: PauliOperator) -> PauliOperator:
        for a, b in silent:
            wa, wb = symplectic_product(v, a), symplectic_product(v, b)
            if wb:
                v = pauli_mul(v, a)
            if wa:
                v = pauli_mul(v, b)
        return v

    originals = tuple((project(xl), project(zl)) for xl, zl in layout.logicals)
    silent_pairs = tuple((a, b) for a, b in silent)
    ancillas = None if layout.ancillas is None else tuple(layout.ancillas[i] for i in keep)
    weights = [op.weight for pair in silent_pairs for op in pair]
    deformed = CodeLayout(
        name=f"{layout.name}-hole",
        n_data=n,
        coords=layout.coords,
        stabilizers=tuple(kept),
        kinds=tuple(layout.kinds[i] for i in keep),
        logicals=originals + silent_pairs,
        ancillas=ancillas,
        distance=min([layout.distance, *weights]),
    )
    return deformed, Hole(frozenset(removed), silent_pairs)


def loop_operator(layout: CodeLayout, path: Sequence[int], kind: str) -> PauliOperator:
    """Product of single-qubit ``kind`` Paulis along ``path``."""
    path = list(path)
    if len(set(path)) != len(path):
        raise ValueError("path visits a qubit more than once")
    return PauliOperator.from_support(layout.n_data, path, kind)


def region_boundary(layout: CodeLayout, stabilizer_indices: Sequence[int]) -> tuple[int, ...]:
    """Data qubits on the closed loop enclosing a region of same-type checks.

    The loop is the symmetric difference of the checks' supports, so the loop
    operator equals their product.
    """
    acc = 0
    for i in stabilizer_indices:
        g = layout.stabilizers[i]
        acc ^= g.x | g.z
    return gf2.support(acc)


def braid_transform(logical: PauliOperator, loop: PauliOperator) -> PauliOperator:
    """Heisenberg update of ``logical`` transported around ``loop``."""
    return pauli_mul(logical, loop)


def describe(layout: CodeLayout) -> str:
    lines = [
        f"code {layout.name}",
        f"data qubits {layout.n_data}",
        f"stabilizers {layout.n_stabilizers}",
        f"logical pairs {len(layout.logicals)}",
        f"distance {layout.distance}",
        "",
        "qubit coordinates:",
    ]
    lines += [f"  q{i} {r} {c}" for i, (r, c) in enumerate(layout.coords)]
    lines.append("stabilizers:")
    for i, (g, k) in enumerate(zip(layout.stabilizers, layout.kinds)):
        where = ""
        if layout.ancillas is not None:
            where = " at {} {}".format(*layout.ancillas[i].coord)
        lines.append(f"  s{i} {k}{where} support {' '.join(map(str, g.support))}")
    lines.append("logicals:")
    for p, (xl, zl) in enumerate(layout.logicals):
        lines.append(f"  L{p} X {' '.join(map(str, xl.support))}")
        lines.append(f"  L{p} Z {' '.join(map(str, zl.support))}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# Double-hole qubits and a silent hole on a planar patch


@dataclass(frozen=True)
class BraidConfig:
    """Grid positions of the holes; every hole is one removed check.

    A holes are Z checks (even row, odd column), B and silent holes are X
    checks (odd row, even column).
    """

    size: int
    a_upper: tuple[int, int]
    a_lower: tuple[int, int]
    b_upper: tuple[int, int]
    b_lower: tuple[int, int]
    silent: tuple[int, int]
    trivial_center: tuple[int, int]

    @classmethod
    def for_separation(cls, d: int = 3) -> "BraidConfig":
        if d < 2:
            raise ValueError("hole separation must be at least 2")
        rows_needed = 5 + 2 * d + 5
        size = max(23, rows_needed)
        if size % 2 == 0:
            size += 1
        return cls(
            size=size,
            a_upper=(4, 3),
            a_lower=(4 + 2 * d, 3),
            b_upper=(5, 12),
            b_lower=(5 + 2 * d, 12),
            silent=(5, 8),
            trivial_center=(5, 18),
        )


@dataclass(frozen=True)
class BraidSetup:
    layout: CodeLayout  # deformed: all five holes open
    hole: Hole
    operators: dict[str, PauliOperator]
    loops: dict[str, PauliOperator]


def _region(layout: CodeLayout, center: tuple[int, int], radius: int = 2) -> list[int]:
    r0, c0 = center
    out = []
    for i, a in enumerate(layout.ancillas):
        r, c = a.coord
        if r % 2 == 1 and abs(r - r0) <= radius and abs(c - c0) <= radius:
            out.append(i)
    return out


def braiding_layout(d: int = 3, config: BraidConfig | None = None) -> BraidSetup:
    """Two double-hole logical qubits A and B plus a one-check silent hole.

    ``d`` is the separation of each qubit's two holes (the length of X_A and
    Z_B). X_A is an X chain joining A's holes and Z_A the Z loop around the
    upper A hole; for B the roles swap. X_S is the unmeasured check itself,
    Z_S its lightest partner chain. Loops are X-type region boundaries:
    around the silent hole, around B's upper hole, around both, and around a
    hole-free region.
    """
    cfg = config or BraidConfig.for_separation(d)
    size = cfg.size
    coords, index, ancillas, kinds = _planar(size, size)
    n = len(coords)
    stabs = tuple(PauliOperator.from_support(n, a.data, k) for a, k in zip(ancillas, kinds))
    x_bar = PauliOperator.from_support(n, [index[(0, c)] for c in range(0, size, 2)], "X")
    z_bar = PauliOperator.from_support(n, [index[(r, 0)] for r in range(0, size, 2)], "Z")
    base = CodeLayout(
        name=f"braid-{d}",
        n_data=n,
        coords=tuple(coords),
        stabilizers=stabs,
        kinds=tuple(kinds),
        logicals=((x_bar, z_bar),),
        ancillas=tuple(ancillas),
        distance=(size + 1) // 2,
    )
    pos = {a.coord: i for i, a in enumerate(ancillas)}
    holes = {
        name: pos[getattr(cfg, name)]
        for name in ("a_upper", "a_lower", "b_upper", "b_lower", "silent")
    }
    for name in ("a_upper", "a_lower"):
        if base.kinds[holes[name]] != "Z":
            raise ValueError(f"{name} must sit on a Z check")
    for name in ("b_upper", "b_lower", "silent"):
        if base.kinds[holes[name]] != "X":
            raise ValueError(f"{name} must sit on an X check")

    deformed, hole = punch_hole(base, holes.values())
    silent_pair = hole.silent_logicals[sorted(holes.values()).index(holes["silent"])]

    def chain(a: tuple[int, int], b: tuple[int, int]) -> list[int]:
        (r1, c1), (r2, c2) = a, b
        if c1 != c2:
            raise ValueError("chain endpoints must share a column")
        return [index[(r, c1)] for r in range(min(r1, r2) + 1, max(r1, r2), 2)]

    operators = {
        "X_A": loop_operator(base, chain(cfg.a_upper, cfg.a_lower), "X"),
        "Z_A": base.stabilizers[holes["a_upper"]],
        "X_B": base.stabilizers[holes["b_upper"]],
        "Z_B": loop_operator(base, chain(cfg.b_upper, cfg.b_lower), "Z"),
        "X_S": silent_pair[0],
        "Z_S": silent_pair[1],
    }
    hole_set = set(holes.values())

    def loop(center, include=()):
        region = set(_region(base, center))
        region |= set(include)
        bad = (region & hole_set) - set(include)
        if bad:
            raise ValueError(f"loop region around {center} swallows another hole")
        return loop_operator(base, region_boundary(base, sorted(region)), "X")

    both = set(_region(base, cfg.silent)) | set(_region(base, cfg.b_upper))
    loops = {
        "silent": loop(cfg.silent, include=[holes["silent"]]),
        "b_upper": loop(cfg.b_upper, include=[holes["b_upper"]]),
        "b_upper_and_silent": loop_operator(
            base, region_boundary(base, sorted(both)), "X"
        ),
        "trivial": loop(cfg.trivial_center),
    }
    return BraidSetup(deformed, hole, operators, loops)
