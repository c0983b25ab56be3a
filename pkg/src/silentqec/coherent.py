"""Dense state-vector simulation of QEC cycles under coherent rotation noise.

Qubit 0 is the most significant bit of the amplitude index. All heavy
operations work on a batch of states stored as a (B, 2**n) array so that many
shots advance together; the single-state functions are thin wrappers.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, field
from functools import lru_cache
from typing import Sequence

import numpy as np

from . import streams
from .codes import CodeLayout
from .decoding import get_decoder, syndrome_bits
from .pauli import PauliOperator

MAX_QUBITS = 24
NORM_TOL = 1e-10
LEAK_TOL = 1e-6
SKIPPED = 0


class ContractViolation(RuntimeError):
    """A state or input broke a documented precondition at run time."""


@dataclass(frozen=True)
class NoiseConfig:
    eta: float = 0.0
    angle_mode: str = "fixed"  # fixed | uniform
    p: float = 0.0
    q: float = 0.0
    p_s: float = 0.0
    silent_duration: int = 1
    apply_to_ancillas: bool = False
    # Also rotate the ancilla while it idles right after reset and right before readout.
    ancilla_idle: bool = False

    def __post_init__(self):
        if not self.eta >= 0:
            raise ValueError("eta must be >= 0")
        if self.angle_mode not in ("fixed", "uniform"):
            raise ValueError(f"unknown angle_mode {self.angle_mode!r}")
        for name in ("p", "q", "p_s"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1]")
        if self.silent_duration < 0:
            raise ValueError("silent_duration must be >= 0")

    def draw_angles(self, rng: np.random.Generator | None, size) -> np.ndarray:
        if self.angle_mode == "fixed" or self.eta == 0:
            return np.full(size, float(self.eta))
        if rng is None:
            raise ValueError("uniform angles need an rng")
        return rng.uniform(-self.eta, self.eta, size)

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass
class StateVector:
    n: int
    amplitudes: np.ndarray

    def __post_init__(self):
        self.amplitudes = np.asarray(self.amplitudes, dtype=np.complex128).reshape(-1)
        if self.amplitudes.size != 1 << self.n:
            raise ValueError("amplitude count does not match qubit count")

    @classmethod
    def basis(cls, n: int, index: int = 0) -> "StateVector":
        a = np.zeros(1 << n, dtype=np.complex128)
        a[index] = 1.0
        return cls(n, a)

    def norm(self) -> float:
        return float(np.vdot(self.amplitudes, self.amplitudes).real)

    def copy(self) -> "StateVector":
        return StateVector(self.n, self.amplitudes.copy())

    def _batch(self) -> np.ndarray:
        return self.amplitudes[None, :].copy()


@dataclass
class SyndromeRecord:
    """Per-round outcomes: +1, -1 or SKIPPED (0)."""

    n_stabilizers: int
    rows: list = field(default_factory=list)
    reported_rows: list = field(default_factory=list)

    def append(self, row, reported=None) -> None:
        row = np.asarray(row, dtype=np.int8)
        if row.shape != (self.n_stabilizers,):
            raise ValueError("syndrome row length does not match the layout")
        if reported is None:
            prev = self.reported_rows[-1] if self.reported_rows else np.ones_like(row)
            reported = np.where(row == SKIPPED, prev, row)
        self.rows.append(row)
        self.reported_rows.append(np.asarray(reported, dtype=np.int8))

    def reported(self) -> np.ndarray:
        """Outcomes as seen by the decoder (skipped entries frozen)."""
        if not self.rows:
            return np.ones((0, self.n_stabilizers), dtype=np.int8)
        return np.array(self.reported_rows)

    def skipped(self) -> np.ndarray:
        return np.array(self.rows) == SKIPPED

    def __len__(self) -> int:
        return len(self.rows)


# ---------------------------------------------------------------------------
# batched kernels


def _index_mask(bits: int, n: int) -> int:
    """Qubit bitmask (bit q = qubit q) to amplitude-index mask (qubit 0 = MSB)."""
    out = 0
    for q in range(n):
        if (bits >> q) & 1:
            out |= 1 << (n - 1 - q)
    return out


@lru_cache(maxsize=4096)
def _pauli_table(n: int, x: int, z: int, phase: int) -> tuple[np.ndarray, np.ndarray]:
    idx = np.arange(1 << n, dtype=np.int64)
    xm, zm = _index_mask(x, n), _index_mask(z, n)
    src = idx ^ xm
    sign = 1 - 2 * (np.bitwise_count(src & zm) & 1).astype(np.int64)
    return src, (1j ** phase) * sign.astype(np.complex128)


def _apply_pauli(arr: np.ndarray, n: int, op: PauliOperator) -> np.ndarray:
    src, factor = _pauli_table(n, op.x, op.z, op.phase % 4)
    return arr[:, src] * factor


def _apply_flips(arr: np.ndarray, n: int, fx: np.ndarray, fz: np.ndarray) -> np.ndarray:
    """Apply a different X^fx Z^fz to every row of the batch (phases dropped)."""
    weights = (1 << (n - 1 - np.arange(n))).astype(np.int64)
    xm = fx.astype(np.int64) @ weights
    zm = fz.astype(np.int64) @ weights
    if not xm.any() and not zm.any():
        return arr
    idx = np.arange(arr.shape[1], dtype=np.int64)
    src = idx[None, :] ^ xm[:, None]
    sign = 1 - 2 * (np.bitwise_count(src & zm[:, None]) & 1).astype(np.int64)
    return np.take_along_axis(arr, src, axis=1) * sign


def _rotate(arr: np.ndarray, n: int, qubit: int, theta) -> np.ndarray:
    b = arr.shape[0]
    v = arr.reshape(b, 1 << qubit, 2, 1 << (n - qubit - 1))
    theta = np.broadcast_to(np.asarray(theta, dtype=float), (b,))
    c = np.cos(theta / 2)[:, None, None]
    s = np.sin(theta / 2)[:, None, None]
    a0, a1 = v[:, :, 0, :], v[:, :, 1, :]
    out = np.empty_like(v)
    out[:, :, 0, :] = c * a0 - s * a1
    out[:, :, 1, :] = s * a0 + c * a1
    return out.reshape(b, -1)


def _norms(arr: np.ndarray) -> np.ndarray:
    return np.einsum("bi,bi->b", arr.conj(), arr).real


def _measure_ideal(arr, n, g: PauliOperator, rng, forced=None):
    """Projective measurement of Hermitian ``g`` on every row.

    Returns outcomes (+1/-1), post-states and the probability of the
    outcome that occurred.
    """
    garr = _apply_pauli(arr, n, g)
    ev = np.einsum("bi,bi->b", arr.conj(), garr).real
    p_plus = np.clip((1.0 + ev) / 2.0, 0.0, 1.0)
    if forced is not None:
        out = np.broadcast_to(np.asarray(forced, dtype=np.int8), p_plus.shape).copy()
    else:
        out = np.where(rng.random(arr.shape[0]) < p_plus, 1, -1).astype(np.int8)
    prob = np.where(out == 1, p_plus, 1.0 - p_plus)
    post = (arr + out[:, None] * garr) / 2.0
    scale = np.where(prob > 0, 1.0 / np.sqrt(np.maximum(prob, 1e-300)), 0.0)
    return out, post * scale[:, None], prob


def _circuit_gates(kind: str, data: Sequence[int]) -> list[tuple]:
    if kind == "Z":
        return [("cx_da", q) for q in data]
    if kind == "X":
        return [("h",)] + [("cx_ad", q) for q in data] + [("h",)]
    raise ValueError("circuit mode supports only X- or Z-type checks")


def _measure_circuit(arr, n, kind, data, rng, cfg: NoiseConfig | None, forced=None):
    """Ancilla-based measurement: one reset ancilla appended as the last qubit."""
    b, dim = arr.shape
    ext = np.zeros((b, dim, 2), dtype=np.complex128)
    ext[:, :, 0] = arr
    idx = np.arange(dim, dtype=np.int64)
    noisy = cfg is not None and cfg.apply_to_ancillas and cfg.eta > 0
    gates = _circuit_gates(kind, data)
    if noisy and cfg.ancilla_idle:
        gates = [("idle",)] + gates + [("idle",)]
    for gi, gate in enumerate(gates):
        if gate[0] == "idle":
            pass
        elif gate[0] == "h":
            a0, a1 = ext[:, :, 0].copy(), ext[:, :, 1].copy()
            ext[:, :, 0] = (a0 + a1) / np.sqrt(2)
            ext[:, :, 1] = (a0 - a1) / np.sqrt(2)
        elif gate[0] == "cx_da":
            mask = ((idx >> (n - 1 - gate[1])) & 1).astype(bool)
            tmp = ext[:, mask, 0].copy()
            ext[:, mask, 0] = ext[:, mask, 1]
            ext[:, mask, 1] = tmp
        else:
            ext[:, :, 1] = ext[:, idx ^ (1 << (n - 1 - gate[1])), 1]
        if noisy and gi < len(gates) - 1:
            theta = cfg.draw_angles(rng, b)
            c = np.cos(theta / 2)[:, None]
            s = np.sin(theta / 2)[:, None]
            a0, a1 = ext[:, :, 0].copy(), ext[:, :, 1].copy()
            ext[:, :, 0] = c * a0 - s * a1
            ext[:, :, 1] = s * a0 + c * a1
    p1 = np.clip(_norms(ext[:, :, 1]), 0.0, 1.0)
    if forced is not None:
        out = np.broadcast_to(np.asarray(forced, dtype=np.int8), p1.shape).copy()
    else:
        out = np.where(rng.random(b) < p1, -1, 1).astype(np.int8)
    prob = np.where(out == -1, p1, 1.0 - p1)
    post = np.where((out == -1)[:, None], ext[:, :, 1], ext[:, :, 0])
    scale = np.where(prob > 0, 1.0 / np.sqrt(np.maximum(prob, 1e-300)), 0.0)
    return out, post * scale[:, None], prob


def _measure_round(arr, layout: CodeLayout, skip, mode, rng, cfg=None):
    """Measure every non-skipped stabilizer in index order."""
    n = layout.n_data
    m = layout.n_stabilizers
    out = np.zeros((arr.shape[0], m), dtype=np.int8)
    for i, g in enumerate(layout.stabilizers):
        if i in skip:
            continue
        if mode == "ideal":
            o, arr, _ = _measure_ideal(arr, n, g, rng)
        else:
            anc = layout.ancillas[i]
            o, arr, _ = _measure_circuit(arr, n, layout.kinds[i], anc.data, rng, cfg)
        out[:, i] = o
    return out, arr


def _noise(arr, n, cfg: NoiseConfig, rng):
    if cfg.eta == 0:
        return arr
    thetas = cfg.draw_angles(rng, (arr.shape[0], n))
    for q in range(n):
        arr = _rotate(arr, n, q, thetas[:, q])
    return arr


def _check_mode(layout: CodeLayout, mode: str) -> None:
    if mode not in ("ideal", "circuit"):
        raise ValueError(f"unknown measurement mode {mode!r}")
    if mode == "circuit":
        if layout.ancillas is None:
            raise ValueError("circuit mode needs a layout with an ancilla map")
        if layout.n_data + 1 > MAX_QUBITS:
            raise ValueError("circuit mode register exceeds the qubit cap")
    if layout.n_data > MAX_QUBITS:
        raise ValueError(f"{layout.n_data} data qubits exceed the cap of {MAX_QUBITS}")


# ---------------------------------------------------------------------------
# logical states


def logical_basis(layout: CodeLayout) -> tuple[np.ndarray, np.ndarray]:
    """|0_L> (all stabilizers +1, Z-bar +1) and |1_L> = X-bar |0_L>."""
    cached = layout._cache.get("logical_basis")
    if cached is not None:
        return cached
    n = layout.n_data
    if n > MAX_QUBITS:
        raise ValueError(f"{n} data qubits exceed the cap of {MAX_QUBITS}")
    xl, zl = layout.logicals[0]
    arr = np.zeros((1, 1 << n), dtype=np.complex128)
    arr[0, 0] = 1.0
    for g in (*layout.stabilizers, zl):
        garr = _apply_pauli(arr, n, g)
        proj = (arr + garr) / 2.0
        nrm = np.sqrt(_norms(proj))
        if nrm[0] < 1e-8:
            # |0...0> has no overlap; restart from the other eigenvector
            proj = (arr - garr) / 2.0
            nrm = np.sqrt(_norms(proj))
        arr = proj / nrm[:, None]
    zero = arr[0]
    one = _apply_pauli(arr, n, xl)[0]
    layout._cache["logical_basis"] = (zero, one)
    return zero, one


def prepare_logical(layout: CodeLayout, alpha: complex, beta: complex) -> StateVector:
    """alpha |0_L> + beta |1_L>."""
    if abs(abs(alpha) ** 2 + abs(beta) ** 2 - 1.0) > 1e-10:
        raise ValueError("|alpha|^2 + |beta|^2 must equal 1")
    zero, one = logical_basis(layout)
    return StateVector(layout.n_data, alpha * zero + beta * one)


def apply_rotation(state: StateVector, qubit: int, theta: float) -> StateVector:
    """Real rotation [[c, -s], [s, c]] with c = cos(theta/2), s = sin(theta/2)."""
    if not 0 <= qubit < state.n:
        raise IndexError(f"qubit {qubit} out of range")
    return StateVector(state.n, _rotate(state._batch(), state.n, qubit, theta)[0])


def apply_pauli(state: StateVector, op: PauliOperator) -> StateVector:
    if op.n != state.n:
        raise ValueError("operator size does not match the state")
    return StateVector(state.n, _apply_pauli(state._batch(), state.n, op)[0])


def noise_round(
    state: StateVector, layout: CodeLayout, cfg: NoiseConfig, rng: np.random.Generator | None = None
) -> StateVector:
    """Rotate every data qubit by an angle drawn according to ``cfg``."""
    return StateVector(state.n, _noise(state._batch(), state.n, cfg, rng)[0])


def measure_stabilizer(
    state: StateVector,
    g: PauliOperator,
    mode: str = "ideal",
    rng: np.random.Generator | None = None,
    layout: CodeLayout | None = None,
    cfg: NoiseConfig | None = None,
    outcome: int | None = None,
) -> tuple[int, StateVector]:
    """Measure ``g``; pass ``outcome`` to force a branch instead of sampling.

    Circuit mode looks the check up in ``layout`` to get its ancilla wiring.
    """
    rng = rng if rng is not None else np.random.default_rng()
    if mode == "ideal":
        o, post, prob = _measure_ideal(state._batch(), state.n, g, rng, forced=outcome)
    elif mode == "circuit":
        if layout is None or layout.ancillas is None:
            raise ValueError("circuit mode needs a layout with an ancilla map")
        try:
            i = layout.stabilizers.index(g)
        except ValueError:
            raise ValueError("operator is not a stabilizer of the layout") from None
        o, post, prob = _measure_circuit(
            state._batch(), state.n, layout.kinds[i], layout.ancillas[i].data, rng, cfg, forced=outcome
        )
    else:
        raise ValueError(f"unknown measurement mode {mode!r}")
    if prob[0] <= 0:
        raise ContractViolation("forced outcome has zero probability")
    return int(o[0]), StateVector(state.n, post[0])


def outcome_probability(state: StateVector, g: PauliOperator, outcome: int) -> float:
    arr = state._batch()
    ev = np.vdot(arr[0], _apply_pauli(arr, state.n, g)[0]).real
    return float((1.0 + outcome * ev) / 2.0)


def qec_cycle(
    state: StateVector,
    layout: CodeLayout,
    skip=(),
    mode: str = "ideal",
    rng: np.random.Generator | None = None,
    cfg: NoiseConfig | None = None,
    record: SyndromeRecord | None = None,
) -> tuple[np.ndarray, StateVector]:
    """One round over all stabilizers; skipped ones are neither measured nor reported.

    The returned row holds +1/-1 for measured checks and SKIPPED for the
    rest. If ``record`` is given the row is appended to it, which also fixes
    the frozen value the decoder sees for skipped checks.
    """
    _check_mode(layout, mode)
    skip = set(skip)
    if any(not 0 <= i < layout.n_stabilizers for i in skip):
        raise IndexError("skip index out of range")
    rng = rng if rng is not None else np.random.default_rng()
    row, post = _measure_round(state._batch(), layout, skip, mode, rng, cfg)
    if record is not None:
        record.append(row[0])
    return row[0], StateVector(state.n, post[0])


def decode_and_correct(record: SyndromeRecord, layout: CodeLayout) -> PauliOperator:
    """Recovery for the latest reported round of ``record``."""
    rep = record.reported()
    if len(rep) == 0:
        return PauliOperator.identity(layout.n_data)
    return get_decoder(layout).recovery((rep[-1] == -1).astype(np.uint8))


def _overlaps(arr, layout: CodeLayout):
    zero, one = logical_basis(layout)
    a0 = arr @ zero.conj()
    a1 = arr @ one.conj()
    return a0, a1


def _eta_l(arr, layout: CodeLayout, alpha, beta, strict: bool = True) -> np.ndarray:
    a0, a1 = _overlaps(arr, layout)
    leak = _norms(arr) - np.abs(a0) ** 2 - np.abs(a1) ** 2
    if strict and np.any(leak > LEAK_TOL):
        raise ContractViolation(f"state leaves the codespace (weight {leak.max():.3g})")
    par = np.abs(np.conj(alpha) * a0 + np.conj(beta) * a1)
    perp = np.abs(-beta * a0 + alpha * a1)
    return 2.0 * np.arctan2(perp, par)


def logical_error_angle(state: StateVector, layout: CodeLayout, alpha: complex, beta: complex) -> float:
    """Bloch angle between the state and alpha|0_L> + beta|1_L>.

    Equal to 2 arccos |<target|state>|, evaluated with atan2 so that tiny
    angles keep full relative precision.
    """
    return float(_eta_l(state._batch(), layout, alpha, beta)[0])


# ---------------------------------------------------------------------------
# closed forms


def rotated_amplitudes(alpha: complex, beta: complex, thetas: Sequence[float]) -> np.ndarray:
    """Closed-form amplitudes of three rotated qubits starting from alpha|000> + beta|111>."""
    t = np.asarray(thetas, dtype=float)
    c, s = np.cos(t / 2), np.sin(t / 2)
    c1, c2, c3 = c
    s1, s2, s3 = s
    a, b = alpha, beta
    return np.array(
        [
            a * c1 * c2 * c3 - b * s1 * s2 * s3,  # 000
            a * c1 * c2 * s3 + b * s1 * s2 * c3,  # 001
            a * c1 * s2 * c3 + b * s1 * c2 * s3,  # 010
            a * c1 * s2 * s3 - b * s1 * c2 * c3,  # 011
            a * s1 * c2 * c3 + b * c1 * s2 * s3,  # 100
            a * s1 * c2 * s3 - b * c1 * s2 * c3,  # 101
            a * s1 * s2 * c3 - b * c1 * c2 * s3,  # 110
            a * s1 * s2 * s3 + b * c1 * c2 * c3,  # 111
        ],
        dtype=np.complex128,
    )


def closed_form_deviation(alpha: complex, beta: complex, thetas: Sequence[float]) -> float:
    """Max |simulated - closed form| after one rotation round on the 3-qubit code."""
    from .codes import repetition_code

    layout = repetition_code(3)
    st = prepare_logical(layout, alpha, beta)
    for q, th in enumerate(thetas):
        st = apply_rotation(st, q, th)
    return float(np.max(np.abs(st.amplitudes - rotated_amplitudes(alpha, beta, thetas))))


def no_error_probability(alpha: complex, beta: complex, thetas: Sequence[float]) -> float:
    amp = rotated_amplitudes(alpha, beta, thetas)
    return float(abs(amp[0]) ** 2 + abs(amp[7]) ** 2)


def syndrome_branches(
    state: StateVector, layout: CodeLayout, skip=()
) -> list[tuple[tuple[int, ...], float, StateVector]]:
    """All outcomes of one ideal round with their exact probabilities and post-states."""
    branches = [((), 1.0, state._batch())]
    for i, g in enumerate(layout.stabilizers):
        if i in skip:
            branches = [(o + (SKIPPED,), p, a) for o, p, a in branches]
            continue
        nxt = []
        for o, p, a in branches:
            for s in (1, -1):
                _, post, prob = _measure_ideal(a, state.n, g, None, forced=s)
                if prob[0] * p > 1e-300:
                    nxt.append((o + (s,), p * float(prob[0]), post))
        branches = nxt
    return [(o, p, StateVector(state.n, a[0])) for o, p, a in branches]


# ---------------------------------------------------------------------------
# experiments


def _chunk_size(n_qubits: int) -> int:
    return int(max(1, min(4096, (1 << 22) >> n_qubits)))


@dataclass
class BranchStats:
    n: int
    count: int
    frequency: float
    freq_se: float
    mean_eta_l: float
    eta_l_se: float


@dataclass
class PrecisionStats:
    shots: int
    cycles: int
    branches: dict  # n -> BranchStats
    mean_eta_l: float
    eta_l_se: float
    rows: list = field(repr=False, default_factory=list)

    def branch(self, n: int) -> BranchStats:
        if n in self.branches:
            return self.branches[n]
        return BranchStats(n, 0, 0.0, 0.0, float("nan"), float("nan"))


def _run_cycles(arr, layout, cfg, cycles, mode, rounds, rng_noise, rng_meas, skip_at=None):
    """Advance a batch through ``cycles`` noisy cycles with windowed decoding.

    Returns the final batch, per-cycle (defect_count, n_detected, last reported
    row) arrays and the total inferred fault count per shot.
    """
    n = layout.n_data
    m = layout.n_stabilizers
    b = arr.shape[0]
    dec = get_decoder(layout)
    reference = np.zeros((b, m), dtype=np.uint8)  # expected defect bits
    total = np.zeros(b, dtype=np.int64)
    log = []
    for cyc in range(cycles):
        arr = _noise(arr, n, cfg, rng_noise)
        skip = skip_at(cyc) if skip_at is not None else set()
        hist = np.zeros((b, rounds, m), dtype=np.uint8)
        reported = None
        prev = reference
        for r in range(rounds):
            out, arr = _measure_round(arr, layout, skip, mode, rng_meas, cfg)
            bits = (out == -1).astype(np.uint8)
            for j in skip:
                bits[:, j] = prev[:, j]
            hist[:, r] = bits
            prev = bits
            reported = bits
        events = hist.copy()
        events[:, 0] ^= reference
        events[:, 1:] ^= hist[:, :-1]
        rx, rz, cost = dec.decode_events(events)
        arr = _apply_flips(arr, n, rx, rz)
        reference = reported ^ syndrome_bits(layout, rx, rz)
        total += cost
        log.append((reported.sum(axis=1), cost, reported))
    return arr, log, total, reference


def _precision_chunk(layout, cfg, cycles, mode, rounds, alpha, beta, seed, chunk, size, final_round):
    rng_noise = streams.stream(seed, streams.TAG_NOISE, chunk)
    rng_meas = streams.stream(seed, streams.TAG_MEASURE, chunk)
    zero, one = logical_basis(layout)
    arr = np.tile(alpha * zero + beta * one, (size, 1))
    arr, log, total, reference = _run_cycles(arr, layout, cfg, cycles, mode, rounds, rng_noise, rng_meas)
    if final_round:
        out, arr = _measure_round(arr, layout, set(), "ideal", rng_meas)
        events = ((out == -1).astype(np.uint8) ^ reference)[:, None, :]
        rx, rz, cost = get_decoder(layout).decode_events(events)
        arr = _apply_flips(arr, layout.n_data, rx, rz)
        total = total + cost
    eta = _eta_l(arr, layout, alpha, beta)
    return log, total, eta


def _mean_se(x: np.ndarray) -> tuple[float, float]:
    if x.size == 0:
        return float("nan"), float("nan")
    se = float(x.std(ddof=1) / np.sqrt(x.size)) if x.size > 1 else 0.0
    return float(x.mean()), se


def syndrome_class(bits: np.ndarray) -> str:
    return "".join("-" if v else "+" for v in bits)


def precision_experiment(
    layout: CodeLayout,
    cfg: NoiseConfig,
    cycles: int = 1,
    shots: int = 1000,
    seed: int = 0,
    alpha: complex = 1.0,
    beta: complex = 0.0,
    mode: str = "ideal",
    rounds: int | None = None,
    workers: int = 1,
    keep_rows: bool = False,
) -> PrecisionStats:
    """Prepare, apply ``cycles`` of noise + measurement + correction, score eta_L.

    ``n`` per shot is the number of faults the decoder inferred over the whole
    run. With ancilla noise each cycle measures ``rounds`` (default: the code
    distance) rounds and the run ends with one ideal round so that eta_L is
    evaluated on a codespace state.
    """
    _check_mode(layout, mode)
    if cycles < 0 or shots < 1:
        raise ValueError("need cycles >= 0 and shots >= 1")
    noisy_anc = mode == "circuit" and cfg.apply_to_ancillas and cfg.eta > 0
    if rounds is None:
        rounds = layout.distance if noisy_anc else 1
    size = _chunk_size(layout.n_data)

    def work(ci, a, b):
        return _precision_chunk(layout, cfg, cycles, mode, rounds, alpha, beta, seed, ci, b - a, noisy_anc)

    parts = streams.run_chunks(work, shots, size, workers)
    total = np.concatenate([p[1] for p in parts])
    eta = np.concatenate([p[2] for p in parts])
    branches = {}
    for n_val in np.unique(total):
        sel = eta[total == n_val]
        f = sel.size / shots
        mu, se = _mean_se(sel)
        branches[int(n_val)] = BranchStats(
            int(n_val), int(sel.size), f, float(np.sqrt(f * (1 - f) / shots)), mu, se
        )
    mu, se = _mean_se(eta)
    rows = []
    if keep_rows:
        shot0 = 0
        for log, tot, et in parts:
            for k in range(tot.size):
                for cyc, (dcount, cost, rep) in enumerate(log):
                    last = cyc == len(log) - 1
                    rows.append(
                        {
                            "shot": shot0 + k,
                            "cycle": cyc,
                            "defect_count": int(dcount[k]),
                            "n_detected": int(cost[k]),
                            "syndrome_class": syndrome_class(rep[k]),
                            "eta_L": repr(float(et[k])) if last else "",
                        }
                    )
            shot0 += tot.size
    return PrecisionStats(shots, cycles, branches, mu, se, rows)


@dataclass
class DriftCurve:
    cycles: np.ndarray  # 1..T+1 (last entry is the resumption cycle)
    silent: int
    branch_occupation: np.ndarray  # no-defect branch, skipped run
    control_occupation: np.ndarray  # no-defect branch, nothing skipped
    ensemble_occupation: np.ndarray
    ensemble_se: np.ndarray
    control_ensemble: np.ndarray
    resume_alone_frequency: float  # sampled: g_j = -1 with every other check +1
    resume_alone_probability: float  # Born prediction averaged over shots
    resume_alone_se: float
    resume_defect_frequency: float  # sampled: g_j = -1 regardless of others
    shots: int


def _sector_weight(arr, n, g: PauliOperator) -> np.ndarray:
    """Squared norm of the g = -1 component."""
    ev = np.einsum("bi,bi->b", arr.conj(), _apply_pauli(arr, n, g)).real
    return np.clip((1.0 - ev) / 2.0, 0.0, 1.0)


def _pattern_probability(arr, layout: CodeLayout, pattern: Sequence[int]) -> np.ndarray:
    prob = np.ones(arr.shape[0])
    for g, s in zip(layout.stabilizers, pattern):
        _, arr, p = _measure_ideal(arr, layout.n_data, g, None, forced=s)
        prob = prob * p
    return prob


def _postselected_curve(layout, cfg, T, silent, alpha, beta, skipping=True):
    zero, one = logical_basis(layout)
    n = layout.n_data
    occ = []
    arr = (alpha * zero + beta * one)[None, :]
    g = layout.stabilizers[silent]
    for cyc in range(T + 1):
        arr = _noise(arr, n, cfg, None)
        occ.append(_sector_weight(arr, n, g)[0])
        for i, s in enumerate(layout.stabilizers):
            if skipping and cyc < T and i == silent:
                continue
            _, arr, _ = _measure_ideal(arr, n, s, None, forced=1)
    return np.array(occ)


def silent_drift_experiment(
    layout: CodeLayout,
    cfg: NoiseConfig,
    T: int,
    silent: int,
    shots: int = 2000,
    seed: int = 0,
    alpha: complex = 1.0,
    beta: complex = 0.0,
    workers: int = 1,
) -> DriftCurve:
    """Skip stabilizer ``silent`` for ``T`` cycles, then measure it again once.

    Occupations are the weight outside the g_silent = +1 sector after each
    cycle's noise and before its measurements. The no-defect branch curves
    are deterministic for fixed angles; the ensemble curves average sampled
    trajectories with per-cycle decoding.
    """
    if T < 0:
        raise ValueError("T must be >= 0")
    if not 0 <= silent < layout.n_stabilizers:
        raise IndexError("silent stabilizer index out of range")
    _check_mode(layout, "ideal")
    if cfg.angle_mode == "fixed":
        branch = _postselected_curve(layout, cfg, T, silent, alpha, beta)
        control = _postselected_curve(layout, cfg, T, silent, alpha, beta, skipping=False)
    else:
        branch = control = np.full(T + 1, np.nan)
    n = layout.n_data
    m = layout.n_stabilizers
    g = layout.stabilizers[silent]
    alone = tuple(-1 if i == silent else 1 for i in range(m))
    size = _chunk_size(n)

    def work(ci, a, b):
        out = []
        for run_skip in (True, False):
            rng_noise = streams.stream(seed, streams.TAG_NOISE, ci)
            rng_meas = streams.stream(seed, streams.TAG_MEASURE, ci)
            zero, one = logical_basis(layout)
            arr = np.tile(alpha * zero + beta * one, (b - a, 1))
            dec = get_decoder(layout)
            reference = np.zeros((b - a, m), dtype=np.uint8)
            occ = np.zeros((T + 1, b - a))
            for cyc in range(T + 1):
                arr = _noise(arr, n, cfg, rng_noise)
                occ[cyc] = _sector_weight(arr, n, g)
                skip = {silent} if (run_skip and cyc < T) else set()
                if cyc == T:
                    born = _pattern_probability(arr, layout, alone)
                rows, arr = _measure_round(arr, layout, skip, "ideal", rng_meas)
                bits = (rows == -1).astype(np.uint8)
                for j in skip:
                    bits[:, j] = reference[:, j]
                if cyc == T:
                    seen_alone = np.all(rows == np.array(alone, dtype=np.int8), axis=1)
                    seen_defect = rows[:, silent] == -1
                rx, rz, _ = dec.decode_events((bits ^ reference)[:, None, :])
                arr = _apply_flips(arr, n, rx, rz)
                reference = bits ^ syndrome_bits(layout, rx, rz)
            out.append((occ, born, seen_alone, seen_defect))
        return out

    parts = streams.run_chunks(work, shots, size, workers)
    occ = np.concatenate([p[0][0] for p in parts], axis=1)
    occ_c = np.concatenate([p[1][0] for p in parts], axis=1)
    born = np.concatenate([p[0][1] for p in parts])
    seen = np.concatenate([p[0][2] for p in parts])
    seen_def = np.concatenate([p[0][3] for p in parts])
    p_pred = float(born.mean())
    return DriftCurve(
        cycles=np.arange(1, T + 2),
        silent=silent,
        branch_occupation=branch,
        control_occupation=control,
        ensemble_occupation=occ.mean(axis=1),
        ensemble_se=occ.std(axis=1, ddof=1) / np.sqrt(shots) if shots > 1 else np.zeros(T + 1),
        control_ensemble=occ_c.mean(axis=1),
        resume_alone_frequency=float(seen.mean()),
        resume_alone_probability=p_pred,
        resume_alone_se=float(np.sqrt(max(p_pred * (1 - p_pred), 1e-300) / shots)),
        resume_defect_frequency=float(seen_def.mean()),
        shots=shots,
    )
