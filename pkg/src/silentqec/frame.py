"""Pauli-frame Monte Carlo for the discrete error model.

Frames are kept as (B, n) uint8 arrays of X and Z flips so a whole chunk of
shots moves through each cycle with a few array operations. Errors, noisy
readout and silent failures draw from separate seeded streams, which makes
runs with and without silent injection share their error samples.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import streams
from .codes import CodeLayout
from .decoding import check_matrices, get_decoder, syndrome_bits
from .stats import wilson_interval

SHOT_CHUNK = 8192


@dataclass
class PauliFrame:
    x_flips: np.ndarray
    z_flips: np.ndarray

    def __post_init__(self):
        self.x_flips = np.asarray(self.x_flips, dtype=np.uint8)
        self.z_flips = np.asarray(self.z_flips, dtype=np.uint8)
        if self.x_flips.shape != self.z_flips.shape:
            raise ValueError("x and z flip vectors differ in length")

    @classmethod
    def empty(cls, n: int) -> "PauliFrame":
        return cls(np.zeros(n, np.uint8), np.zeros(n, np.uint8))

    @property
    def n(self) -> int:
        return self.x_flips.shape[-1]


@dataclass(frozen=True)
class ShotStats:
    shots: int
    failures: int
    p_L_hat: float
    ci_low: float
    ci_high: float
    silent_events: int = 0
    event_shots: int = 0
    event_failures: int = 0
    candidates: int = 0

    @classmethod
    def from_counts(cls, shots: int, failures: int, **extra) -> "ShotStats":
        lo, hi = wilson_interval(failures, shots)
        return cls(shots, failures, failures / shots if shots else 0.0, lo, hi, **extra)


@dataclass(frozen=True)
class SilentConfig:
    p_s: float = 0.0
    duration: int = 1
    window: int | None = None  # cycles per injection window; None = whole run

    def __post_init__(self):
        if not 0.0 <= self.p_s <= 1.0:
            raise ValueError("p_s must lie in [0, 1]")
        if self.duration < 0:
            raise ValueError("duration must be >= 0")


def error_kinds(layout: CodeLayout) -> str:
    """'XZ' when the layout has X-type checks (surface code), else 'X'."""
    return "XZ" if "X" in layout.kinds else "X"


def _flips(rng: np.random.Generator, p: float, shape) -> np.ndarray:
    if p <= 0:
        return np.zeros(shape, np.uint8)
    if p >= 1:
        return np.ones(shape, np.uint8)
    return (rng.random(shape) < p).astype(np.uint8)


def sample_errors(frame: PauliFrame, p: float, rng: np.random.Generator, kinds: str = "X") -> PauliFrame:
    """Independent flips with probability ``p`` per qubit and per listed kind."""
    if not 0.0 <= p <= 1.0:
        raise ValueError("p must lie in [0, 1]")
    fx = frame.x_flips ^ (_flips(rng, p, frame.x_flips.shape) if "X" in kinds else 0)
    fz = frame.z_flips ^ (_flips(rng, p, frame.z_flips.shape) if "Z" in kinds else 0)
    return PauliFrame(fx, fz)


def measure_syndrome(
    frame: PauliFrame,
    layout: CodeLayout,
    q: float = 0.0,
    silent=(),
    rng: np.random.Generator | None = None,
    frozen=None,
) -> np.ndarray:
    """Stabilizer outcomes (+1/-1) for ``frame``.

    Each outcome is flipped with probability ``q``. Silent stabilizers report
    ``frozen`` (default +1) instead of a measured value.
    """
    fx = np.atleast_2d(frame.x_flips)
    fz = np.atleast_2d(frame.z_flips)
    bits = syndrome_bits(layout, fx, fz)
    if q > 0:
        if rng is None:
            raise ValueError("measurement noise needs an rng")
        bits ^= _flips(rng, q, bits.shape)
    out = (1 - 2 * bits.astype(np.int8)).astype(np.int8)
    for j in silent:
        out[:, j] = 1 if frozen is None else np.asarray(frozen)[..., j]
    return out[0] if np.ndim(frame.x_flips) == 1 else out


def inject_silent_failures(
    layout: CodeLayout, p_s: float, window: int, rng: np.random.Generator, duration: int = 1
) -> set[tuple[int, int, int]]:
    """Events (stabilizer, start cycle, duration) for one window.

    Each stabilizer fails independently with probability ``p_s``; the start is
    uniform over the window.
    """
    if not 0.0 <= p_s <= 1.0:
        raise ValueError("p_s must lie in [0, 1]")
    hit = _flips(rng, p_s, layout.n_stabilizers).astype(bool)
    starts = rng.integers(0, max(window, 1), layout.n_stabilizers)
    return {(int(j), int(starts[j]), int(duration)) for j in np.flatnonzero(hit)}


def occurrence_rate(n_stabilizers: int, p_s: float, windows: int, seed: int = 0) -> tuple[float, int]:
    """Fraction of windows with at least one silent event, and the raw count."""
    hits = 0
    for ci, (a, b) in enumerate(streams.chunks(windows, 1 << 16)):
        rng = streams.stream(seed, streams.TAG_SILENT, ci)
        hits += int(np.any(_flips(rng, p_s, (b - a, n_stabilizers)), axis=1).sum())
    return hits / windows, hits


def _silent_mask(rng, b, cycles, m, cfg: SilentConfig) -> np.ndarray:
    """(B, cycles, m) bool mask of silent stabilizers."""
    mask = np.zeros((b, cycles, m), dtype=bool)
    if cfg is None or cfg.p_s <= 0 or cycles == 0 or cfg.duration == 0:
        return mask
    window = cfg.window or cycles
    t = np.arange(cycles)
    for w0 in range(0, cycles, window):
        wlen = min(window, cycles - w0)
        hit = _flips(rng, cfg.p_s, (b, m)).astype(bool)
        start = w0 + rng.integers(0, wlen, (b, m))
        active = (t[None, :, None] >= start[:, None, :]) & (t[None, :, None] < start[:, None, :] + cfg.duration)
        mask |= active & hit[:, None, :]
    return mask


def _failed(layout: CodeLayout, fx: np.ndarray, fz: np.ndarray) -> np.ndarray:
    fail = np.zeros(fx.shape[0], dtype=bool)
    for xl, zl in layout.logicals[:1]:
        zb = zl.z_bits.astype(np.uint8)
        fail |= ((fx.astype(np.int32) @ zb) & 1).astype(bool)
        if "X" in layout.kinds:
            xb = xl.x_bits.astype(np.uint8)
            fail |= ((fz.astype(np.int32) @ xb) & 1).astype(bool)
    return fail


def _shots_chunk(layout, p, q, cycles, b, silent_cfg, seed, ci):
    n = layout.n_data
    m = layout.n_stabilizers
    kinds = error_kinds(layout)
    rng_err = streams.stream(seed, streams.TAG_ERRORS, ci)
    rng_meas = streams.stream(seed, streams.TAG_MEASURE, ci)
    rng_sil = streams.stream(seed, streams.TAG_SILENT, ci)
    dec = get_decoder(layout)
    mask = _silent_mask(rng_sil, b, cycles, m, silent_cfg)
    fx = np.zeros((b, n), np.uint8)
    fz = np.zeros((b, n), np.uint8)
    # errors landing on a silent check's support while it is silent
    candidate = np.zeros(b, dtype=bool)
    gx_any = None
    if mask.any():
        gx, gz = check_matrices(layout)
        gx_any = (gx | gz).astype(np.int32)

    if q == 0:
        reference = np.zeros((b, m), np.uint8)
        for t in range(cycles):
            ex = _flips(rng_err, p, (b, n)) if "X" in kinds else np.zeros((b, n), np.uint8)
            ez = _flips(rng_err, p, (b, n)) if "Z" in kinds else np.zeros((b, n), np.uint8)
            fx ^= ex
            fz ^= ez
            bits = syndrome_bits(layout, fx, fz)
            sil = mask[:, t]
            if gx_any is not None:
                candidate |= _touch(ex | ez, gx_any, sil)
            bits = np.where(sil, reference, bits)
            rx, rz, _ = dec.decode_events((bits ^ reference)[:, None, :])
            fx ^= rx
            fz ^= rz
            reference = bits ^ syndrome_bits(layout, rx, rz)
        # closing perfect round
        bits = syndrome_bits(layout, fx, fz)
        rx, rz, _ = dec.decode_events((bits ^ reference)[:, None, :])
        fx ^= rx
        fz ^= rz
    else:
        hist = np.zeros((b, cycles + 1, m), np.uint8)
        prev = np.zeros((b, m), np.uint8)
        for t in range(cycles):
            ex = _flips(rng_err, p, (b, n)) if "X" in kinds else np.zeros((b, n), np.uint8)
            ez = _flips(rng_err, p, (b, n)) if "Z" in kinds else np.zeros((b, n), np.uint8)
            fx ^= ex
            fz ^= ez
            bits = syndrome_bits(layout, fx, fz) ^ _flips(rng_meas, q, (b, m))
            sil = mask[:, t]
            if gx_any is not None:
                candidate |= _touch(ex | ez, gx_any, sil)
            bits = np.where(sil, prev, bits)
            hist[:, t] = bits
            prev = bits
        hist[:, cycles] = syndrome_bits(layout, fx, fz)
        rx, rz = dec.decode_history(hist)
        fx ^= rx
        fz ^= rz
    fail = _failed(layout, fx, fz)
    event = mask.any(axis=(1, 2))
    return {
        "failures": int(fail.sum()),
        "events": int((np.diff(np.concatenate([np.zeros((b, 1, m), bool), mask], axis=1).astype(np.int8), axis=1) == 1).sum()),
        "event_shots": int(event.sum()),
        "event_failures": int((fail & event).sum()),
        "candidates": int(candidate.sum()),
    }


def _touch(err: np.ndarray, gsupp: np.ndarray, sil: np.ndarray) -> np.ndarray:
    """Shots with an error on the support of a check that is silent now."""
    if not sil.any():
        return np.zeros(err.shape[0], dtype=bool)
    hits = (err.astype(np.int32) @ gsupp.T) > 0
    return np.any(hits & sil, axis=1)


def run_shots(
    layout: CodeLayout,
    p: float,
    q: float = 0.0,
    cycles: int = 1,
    shots: int = 10000,
    silent_cfg: SilentConfig | None = None,
    seed: int = 0,
    workers: int = 1,
) -> ShotStats:
    """Logical failure rate of ``cycles`` rounds of noise, readout and matching.

    With q = 0 every round is decoded immediately. With q > 0 the whole
    history (plus one closing perfect round) is decoded at once by spacetime
    matching. A shot fails if the leftover frame flips a logical operator.
    """
    if shots < 1:
        raise ValueError("shots must be >= 1")
    if cycles < 0:
        raise ValueError("cycles must be >= 0")
    for name, v in (("p", p), ("q", q)):
        if not 0.0 <= v <= 1.0:
            raise ValueError(f"{name} must lie in [0, 1]")

    def work(ci, a, b):
        return _shots_chunk(layout, p, q, cycles, b - a, silent_cfg, seed, ci)

    parts = streams.run_chunks(work, shots, SHOT_CHUNK, workers)
    tot = {k: sum(part[k] for part in parts) for k in parts[0]}
    return ShotStats.from_counts(
        shots,
        tot["failures"],
        silent_events=tot["events"],
        event_shots=tot["event_shots"],
        event_failures=tot["event_failures"],
        candidates=tot["candidates"],
    )


def exact_failure_probability(layout: CodeLayout, p: float) -> float:
    """Single-round (q = 0) failure probability by enumerating every error pattern.

    X and Z sectors are independent, so each is enumerated separately
    (2**n patterns each); practical up to about 20 data qubits.
    """
    n = layout.n_data
    if n > 22:
        raise ValueError("enumeration limited to 22 data qubits")
    dec = get_decoder(layout)
    pats = ((np.arange(1 << n)[:, None] >> np.arange(n)[None, :]) & 1).astype(np.uint8)
    wt = pats.sum(axis=1)
    prob = p**wt * (1 - p) ** (n - wt)
    zero = np.zeros_like(pats)
    out_fail = 1.0
    for kind in error_kinds(layout):
        fx, fz = (pats, zero) if kind == "X" else (zero, pats)
        bits = syndrome_bits(layout, fx, fz)
        rx, rz, _ = dec.decode_events(bits[:, None, :])
        fail = _failed(layout, fx ^ rx, fz ^ rz)
        out_fail *= 1.0 - float(prob[fail].sum())
    return 1.0 - out_fail


@dataclass
class ScanRow:
    size: int
    p: float
    q: float
    p_s: float
    cycles: int
    stats: ShotStats


@dataclass
class ThresholdScan:
    code: str
    rows: list = field(default_factory=list)

    def table(self) -> dict:
        return {(r.size, r.p): r.stats for r in self.rows}

    def crossings(self) -> list[tuple[int, int, float | None]]:
        """Per pair of consecutive sizes, the p where their p_L order inverts.

        The crossing is interpolated linearly in log p between the last grid
        point where the larger code is better and the first where it is worse.
        """
        sizes = sorted({r.size for r in self.rows})
        tab = self.table()
        ps = sorted({r.p for r in self.rows})
        out = []
        for d1, d2 in zip(sizes, sizes[1:]):
            cross = None
            for pa, pb in zip(ps, ps[1:]):
                da = tab[(d2, pa)].p_L_hat - tab[(d1, pa)].p_L_hat
                db = tab[(d2, pb)].p_L_hat - tab[(d1, pb)].p_L_hat
                if da < 0 <= db:
                    f = -da / (db - da) if db != da else 0.5
                    cross = float(np.exp(np.log(pa) + f * (np.log(pb) - np.log(pa))))
                    break
            out.append((d1, d2, cross))
        return out

    def estimate(self) -> float | None:
        vals = [c for _, _, c in self.crossings() if c is not None]
        return float(np.exp(np.mean(np.log(vals)))) if vals else None


def make_layout(code: str, size: int) -> CodeLayout:
    from .codes import repetition_code, surface_code

    if code == "surface":
        return surface_code(size)
    if code == "repetition":
        return repetition_code(size)
    raise ValueError(f"unknown code {code!r}")


def threshold_scan(
    distances,
    ps,
    cycles: int = 1,
    shots: int = 10000,
    seed: int = 0,
    q: float = 0.0,
    code: str = "surface",
    workers: int = 1,
) -> ThresholdScan:
    """Full factorial scan of run_shots over sizes and error rates."""
    scan = ThresholdScan(code)
    for i, d in enumerate(sorted(distances)):
        layout = make_layout(code, d)
        for j, p in enumerate(sorted(ps)):
            st = run_shots(layout, p, q, cycles, shots, None, _derive(seed, i, j), workers)
            scan.rows.append(ScanRow(d, p, q, 0.0, cycles, st))
    return scan


def _derive(seed: int, *keys: int) -> int:
    ss = np.random.SeedSequence(entropy=int(seed), spawn_key=tuple(int(k) for k in keys))
    return int(ss.generate_state(2, np.uint32).view(np.uint64)[0])


@dataclass
class SilentRow:
    size: int
    n_stabilizers: int
    on: ShotStats
    off: ShotStats
    occurrence: float
    occurrence_expected: float
    conditional_failure: float


def silent_failure_experiment(
    sizes,
    p: float,
    p_s: float,
    cycles: int = 10,
    shots: int = 10000,
    seed: int = 0,
    code: str = "repetition",
    duration: int | None = None,
    q: float = 0.0,
    workers: int = 1,
) -> list[SilentRow]:
    """run_shots with silent injection on and off for each code size.

    Each stabilizer fails with probability ``p_s`` once per run (the run is a
    single injection window) and stays silent for ``duration`` cycles,
    half the run by default. Off and on runs share the error stream.
    """
    if duration is None:
        duration = max(1, cycles // 2)
    rows = []
    for i, size in enumerate(sorted(sizes)):
        layout = make_layout(code, size)
        s = _derive(seed, i)
        on = run_shots(layout, p, q, cycles, shots, SilentConfig(p_s, duration, cycles), s, workers)
        off = run_shots(layout, p, q, cycles, shots, None, s, workers)
        m = layout.n_stabilizers
        cond = on.event_failures / on.event_shots if on.event_shots else float("nan")
        rows.append(
            SilentRow(size, m, on, off, on.event_shots / shots, 1.0 - (1.0 - p_s) ** m, cond)
        )
    return rows
