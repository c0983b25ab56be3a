"""Command-line runner for every experiment.

    silentqec <experiment> [--config FILE] [--key value ...]

Every config key has a kebab-case flag. Flags override the config file, which
may be flat or grouped (noise / budget / sweep / run). Each run writes
``header.json`` (resolved config, seed, version) and ``results.csv`` into the
output directory; ``header.json`` is itself a valid ``--config`` file.
Exit codes: 0 success, 2 invalid configuration, 3 runtime contract violation.
"""

from __future__ import annotations

import argparse
import math
import sys
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Any, Callable

import numpy as np
import yaml

from . import artifacts, budget, codes, coherent, frame
from .coherent import ContractViolation, NoiseConfig
from .decoding import DecodingError

EXPERIMENTS = (
    "describe",
    "eq4-check",
    "precision",
    "silent-drift",
    "montecarlo",
    "threshold",
    "silent-mc",
    "budget",
)

EXIT_OK, EXIT_INVALID, EXIT_CONTRACT = 0, 2, 3


class ConfigError(ValueError):
    def __init__(self, key: str, msg: str):
        super().__init__(f"{key}: {msg}")
        self.key = key


# ---------------------------------------------------------------------------
# value parsers (scientific notation allowed everywhere)


def _float(v) -> float:
    if isinstance(v, bool):
        raise ValueError("expected a number")
    return float(v)


def _int(v) -> int:
    if isinstance(v, bool):
        raise ValueError("expected an integer")
    if isinstance(v, int):
        return v
    f = float(v)
    if not math.isfinite(f) or f != int(f):
        raise ValueError(f"expected an integer, got {v!r}")
    return int(f)


def _bool(v) -> bool:
    if isinstance(v, bool):
        return v
    s = str(v).strip().lower()
    if s in ("1", "true", "yes", "on"):
        return True
    if s in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"expected a boolean, got {v!r}")


def _str(v) -> str:
    return str(v)


def _list(conv: Callable) -> Callable:
    def parse(v):
        if isinstance(v, str):
            v = [x for x in v.replace(",", " ").split() if x]
        elif not isinstance(v, (list, tuple)):
            v = [v]
        return [conv(x) for x in v]

    return parse


def _opt(conv: Callable) -> Callable:
    def parse(v):
        if v is None or (isinstance(v, str) and v.strip().lower() in ("", "none", "null")):
            return None
        return conv(v)

    return parse


@dataclass(frozen=True)
class Key:
    name: str
    group: str | None
    parse: Callable
    default: Any
    help: str


KEYS = (
    Key("experiment", None, _str, None, "experiment to run"),
    Key("code", None, _str, "repetition", "repetition | surface"),
    Key("size", None, _int, 3, "N_c for repetition, distance d for surface"),
    Key("shots", None, _int, 1000, "Monte Carlo shots (eq4-check: random trials)"),
    Key("cycles", None, _int, 1, "QEC cycles per shot"),
    Key("seed", None, _int, 0, "64-bit seed"),
    Key("output", None, _str, "silentqec-out", "output directory"),
    Key("threads", None, _int, 1, "worker threads"),
    Key("mode", None, _str, "ideal", "stabilizer readout: ideal | circuit"),
    Key("eta", "noise", _float, 0.0, "coherent rotation angle"),
    Key("angle_mode", "noise", _str, "fixed", "fixed | uniform in [-eta, eta]"),
    Key("p", "noise", _float, 0.0, "physical error probability"),
    Key("q", "noise", _float, 0.0, "measurement error probability"),
    Key("p_s", "noise", _float, 0.0, "silent stabilizer failure probability"),
    Key("silent_duration", "noise", _opt(_int), None, "cycles a silent stabilizer stays silent"),
    Key("apply_to_ancillas", "noise", _bool, False, "rotate ancillas between gates"),
    Key("ancilla_idle", "noise", _bool, False, "also rotate ancillas after reset and before readout"),
    Key("n_ops", "budget", _float, 1e15, "logical operations N_#"),
    Key("n_logical", "budget", _float, 100.0, "logical qubits N_L"),
    Key("n_code", "budget", _float, 1000.0, "physical qubits per logical qubit N_c"),
    Key("p_th", "budget", _float, 1e-2, "threshold error rate"),
    Key("form", "budget", _str, "surface", "exponent form: surface | repetition"),
    Key("target", "budget", _float, 1.0, "target global failure for required p_s"),
    Key("nc_min", "budget", _opt(_int), None, "N_c scan lower bound"),
    Key("nc_max", "budget", _opt(_int), None, "N_c scan upper bound"),
    Key("sizes", "sweep", _list(_int), [3, 5, 7], "code sizes for threshold / silent-mc"),
    Key("ps", "sweep", _list(_float), [0.01, 0.03, 0.05, 0.1], "error rates for threshold"),
    Key("etas", "sweep", _list(_float), [], "angle sweep for precision (empty: use eta)"),
    Key("alpha", "run", _float, 1.0, "logical amplitude on |0_L> (real)"),
    Key("beta", "run", _float, 0.0, "logical amplitude on |1_L> (real)"),
    Key("silent", "run", _int, 0, "index of the skipped stabilizer"),
    Key("T", "run", _int, 10, "cycles the stabilizer stays silent"),
    Key("rounds", "run", _opt(_int), None, "readout rounds per cycle (default: d with ancilla noise)"),
    Key("rows", "run", _bool, False, "precision: also write per-shot rows"),
)
KEYMAP = {k.name: k for k in KEYS}
GROUPS = sorted({k.group for k in KEYS if k.group})


def defaults() -> dict:
    return {k.name: (list(k.default) if isinstance(k.default, list) else k.default) for k in KEYS}


def _flatten(raw: dict) -> dict:
    """Merge grouped and flat keys; reject anything unknown."""
    flat = {}
    for key, val in raw.items():
        key = str(key).replace("-", "_")
        if key in GROUPS:
            if not isinstance(val, dict):
                raise ConfigError(key, "group must be a mapping")
            for sub, v in val.items():
                sub = str(sub).replace("-", "_")
                if sub not in KEYMAP or KEYMAP[sub].group != key:
                    raise ConfigError(f"{key}.{sub}", "unknown key")
                flat[sub] = v
        elif key in KEYMAP:
            flat[key] = val
        else:
            raise ConfigError(key, "unknown key")
    return flat


def load_file(path: str | Path) -> dict:
    path = Path(path)
    if not path.is_file():
        raise ConfigError("config", f"no such file {str(path)!r}")
    try:
        raw = yaml.safe_load(path.read_text())
    except yaml.YAMLError as exc:
        raise ConfigError("config", f"malformed file: {exc}") from None
    if raw is None:
        return {}
    if not isinstance(raw, dict):
        raise ConfigError("config", "top level must be a mapping")
    # a run header is accepted as a config: take its resolved config and seed
    if raw.get("tool") == artifacts.TOOL and isinstance(raw.get("config"), dict):
        cfg = dict(raw["config"])
        if "seed" in raw:
            cfg["seed"] = raw["seed"]
        raw = cfg
    return _flatten(raw)


# ---------------------------------------------------------------------------
# validation


def _check(cond: bool, key: str, msg: str) -> None:
    if not cond:
        raise ConfigError(key, msg)


def validate(cfg: dict) -> dict:
    """Type-coerce and check every key; returns the resolved flat config."""
    out = {}
    for k in KEYS:
        v = cfg.get(k.name, k.default)
        if v is None and k.default is None:
            out[k.name] = None
            continue
        try:
            out[k.name] = k.parse(v)
        except (TypeError, ValueError) as exc:
            raise ConfigError(k.name, str(exc)) from None
    exp = out["experiment"]
    _check(exp in EXPERIMENTS, "experiment", f"must be one of {', '.join(EXPERIMENTS)}")
    _check(out["code"] in ("repetition", "surface"), "code", "must be repetition or surface")
    _check(out["mode"] in ("ideal", "circuit"), "mode", "must be ideal or circuit")
    _check(out["angle_mode"] in ("fixed", "uniform"), "angle_mode", "must be fixed or uniform")
    _check(out["form"] in ("surface", "repetition"), "form", "must be surface or repetition")
    _check(out["shots"] >= 1, "shots", "must be >= 1")
    _check(out["cycles"] >= 0, "cycles", "must be >= 0")
    _check(out["threads"] >= 1, "threads", "must be >= 1")
    _check(0 <= out["seed"] < 2**64, "seed", "must be a 64-bit unsigned integer")
    _check(out["T"] >= 0, "T", "must be >= 0")
    _check(out["eta"] >= 0 and math.isfinite(out["eta"]), "eta", "must be finite and >= 0")
    for name in ("p", "q", "p_s"):
        _check(0.0 <= out[name] <= 1.0, name, "must lie in [0, 1]")
    if out["silent_duration"] is not None:
        _check(out["silent_duration"] >= 0, "silent_duration", "must be >= 0")
    if out["rounds"] is not None:
        _check(out["rounds"] >= 1, "rounds", "must be >= 1")
    _check(all(e >= 0 for e in out["etas"]), "etas", "angles must be >= 0")
    _check(all(0 <= p <= 1 for p in out["ps"]), "ps", "must lie in [0, 1]")
    _check(len(out["ps"]) > 0, "ps", "must not be empty")
    _check(len(out["sizes"]) > 0, "sizes", "must not be empty")
    norm = out["alpha"] ** 2 + out["beta"] ** 2
    _check(abs(norm - 1.0) < 1e-9, "alpha", "alpha**2 + beta**2 must equal 1")

    def size_ok(s, key):
        if out["code"] == "repetition":
            _check(s >= 2, key, "repetition code needs N_c >= 2")
        else:
            _check(s >= 3 and s % 2 == 1, key, "surface distance must be odd and >= 3")

    if exp in ("describe", "precision", "silent-drift", "montecarlo"):
        size_ok(out["size"], "size")
    if exp in ("threshold", "silent-mc"):
        for s in out["sizes"]:
            size_ok(s, "sizes")
    if exp == "eq4-check":
        _check(out["code"] == "repetition" and out["size"] == 3, "size", "eq4-check needs the repetition code with N_c = 3")
    if exp in ("precision", "silent-drift", "eq4-check"):
        layout = frame.make_layout(out["code"], out["size"])
        if out["mode"] == "circuit":
            _check(exp == "precision", "mode", "circuit mode applies to precision only")
            _check(
                layout.n_data + 1 <= coherent.MAX_QUBITS,
                "mode",
                f"circuit mode needs n_data + 1 <= {coherent.MAX_QUBITS}"
                f" ({out['code']} size {out['size']} has {layout.n_data} data qubits)",
            )
        _check(layout.n_data <= coherent.MAX_QUBITS, "size", f"state vector capped at {coherent.MAX_QUBITS} qubits")
    if exp == "silent-drift":
        m = frame.make_layout(out["code"], out["size"]).n_stabilizers
        _check(0 <= out["silent"] < m, "silent", f"must index one of the {m} stabilizers")
    if exp == "budget":
        for name in ("n_ops", "n_logical", "n_code"):
            _check(out[name] >= 1, name, "must be >= 1")
        _check(0 < out["p"] <= 1, "p", "budget needs p in (0, 1]")
        _check(out["p_th"] > 0, "p_th", "must be > 0")
        _check(0 < out["target"] <= 1, "target", "must lie in (0, 1]")
        lo, hi = out["nc_min"], out["nc_max"]
        _check((lo is None) == (hi is None), "nc_min", "nc_min and nc_max go together")
        if lo is not None:
            _check(1 <= lo <= hi, "nc_max", "need 1 <= nc_min <= nc_max")
    return out


def canonical(cfg: dict) -> dict:
    """Grouped, key-sorted form written to the run header."""
    out: dict = {}
    for k in KEYS:
        v = cfg[k.name]
        if k.name == "seed":
            continue
        if k.group is None:
            out[k.name] = v
        else:
            out.setdefault(k.group, {})[k.name] = v
    return out


# ---------------------------------------------------------------------------
# argument parsing


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="silentqec",
        description="Coherent-error, threshold and silent-stabilizer experiments.",
        formatter_class=argparse.ArgumentDefaultsHelpFormatter,
    )
    ap.add_argument("experiment_pos", nargs="?", metavar="experiment", choices=EXPERIMENTS,
                    help="one of: " + ", ".join(EXPERIMENTS))
    ap.add_argument("--config", help="YAML or JSON config file (a run header works too)")
    for k in KEYS:
        ap.add_argument("--" + k.name.replace("_", "-"), dest=k.name, default=argparse.SUPPRESS,
                        help=f"{k.help} (default: {k.default})")
    return ap


def parse_config(argv: list[str] | None = None) -> dict:
    """Resolve defaults < config file < flags and validate the result."""
    ap = build_parser()
    ns = vars(ap.parse_args(argv))
    pos = ns.pop("experiment_pos", None)
    path = ns.pop("config", None)
    cfg = defaults()
    if path is not None:
        cfg.update(load_file(path))
    cfg.update(ns)
    if pos is not None:
        _check("experiment" not in ns or ns["experiment"] == pos, "experiment", "positional and flag disagree")
        cfg["experiment"] = pos
    if cfg.get("experiment") is None:
        raise ConfigError("experiment", "missing; give it as the first argument or via --experiment")
    return validate(cfg)


# ---------------------------------------------------------------------------
# experiments; each returns (columns, rows, lines to print)


def _noise(cfg) -> NoiseConfig:
    dur = cfg["silent_duration"] if cfg["silent_duration"] is not None else 1
    return NoiseConfig(
        eta=cfg["eta"],
        angle_mode=cfg["angle_mode"],
        p=cfg["p"],
        q=cfg["q"],
        p_s=cfg["p_s"],
        silent_duration=dur,
        apply_to_ancillas=cfg["apply_to_ancillas"],
        ancilla_idle=cfg["ancilla_idle"],
    )


def _layout(cfg, size=None):
    return frame.make_layout(cfg["code"], cfg["size"] if size is None else size)


def run_describe(cfg):
    layout = _layout(cfg)
    rows = []
    for i, (g, k) in enumerate(zip(layout.stabilizers, layout.kinds)):
        rows.append({"object": "stabilizer", "index": i, "kind": k, "weight": len(g.support),
                     "support": " ".join(map(str, g.support))})
    for j, (xl, zl) in enumerate(layout.logicals):
        for kind, op in (("X", xl), ("Z", zl)):
            rows.append({"object": "logical", "index": j, "kind": kind, "weight": len(op.support),
                         "support": " ".join(map(str, op.support))})
    return ("object", "index", "kind", "weight", "support"), rows, codes.describe(layout).splitlines()


def run_closed_form(cfg):
    rng = np.random.default_rng(np.random.SeedSequence(cfg["seed"]))
    layout = _layout(cfg)
    zero, one = coherent.logical_basis(layout)
    rows, worst = [], 0.0
    for t in range(cfg["shots"]):
        v = rng.normal(size=4)
        v /= np.linalg.norm(v)
        alpha, beta = complex(v[0], v[1]), complex(v[2], v[3])
        if cfg["angle_mode"] == "fixed" and cfg["eta"] > 0:
            thetas = np.full(3, cfg["eta"])
        else:
            # random angles: uniform in [-eta, eta], or [-pi, pi] when eta is 0
            lim = cfg["eta"] if cfg["eta"] > 0 else math.pi
            thetas = rng.uniform(-lim, lim, 3)
        st = coherent.StateVector(3, alpha * zero + beta * one)
        for qb, th in enumerate(thetas):
            st = coherent.apply_rotation(st, qb, float(th))
        dev = float(np.max(np.abs(st.amplitudes - coherent.rotated_amplitudes(alpha, beta, thetas))))
        worst = max(worst, dev)
        rows.append({"trial": t, "alpha_re": v[0], "alpha_im": v[1], "beta_re": v[2], "beta_im": v[3],
                     "theta_1": thetas[0], "theta_2": thetas[1], "theta_3": thetas[2], "max_deviation": dev})
    cols = ("trial", "alpha_re", "alpha_im", "beta_re", "beta_im", "theta_1", "theta_2", "theta_3", "max_deviation")
    return cols, _floats(rows), [f"max amplitude deviation {worst:.3e} over {cfg['shots']} trials"]


def _floats(rows):
    return [{k: (float(v) if isinstance(v, (np.floating, float)) else v) for k, v in r.items()} for r in rows]


PRECISION_COLS = ("eta", "n", "count", "frequency", "freq_se", "mean_eta_L", "eta_L_se")
PRECISION_ROW_COLS = ("eta", "shot", "cycle", "defect_count", "n_detected", "syndrome_class", "eta_L")


def run_precision(cfg):
    layout = _layout(cfg)
    etas = cfg["etas"] or [cfg["eta"]]
    base = _noise(cfg)
    rows, shot_rows, lines = [], [], []
    for eta in etas:
        nc = NoiseConfig(**{**base.to_dict(), "eta": eta})
        st = coherent.precision_experiment(
            layout, nc, cycles=cfg["cycles"], shots=cfg["shots"], seed=cfg["seed"],
            alpha=cfg["alpha"], beta=cfg["beta"], mode=cfg["mode"], rounds=cfg["rounds"],
            workers=cfg["threads"], keep_rows=cfg["rows"],
        )
        for n in sorted(st.branches):
            b = st.branches[n]
            rows.append({"eta": float(eta), "n": n, "count": b.count, "frequency": b.frequency,
                         "freq_se": b.freq_se, "mean_eta_L": b.mean_eta_l, "eta_L_se": b.eta_l_se})
        shot_rows += [{"eta": float(eta), **r} for r in st.rows]
        b0 = st.branch(0)
        lines.append(f"eta {eta:.4g}: P(n=0) {b0.frequency:.4f}  eta_L|n=0 {b0.mean_eta_l:.4g}"
                     f"  mean eta_L {st.mean_eta_l:.4g}")
    extra = {"shots.csv": (PRECISION_ROW_COLS, shot_rows)} if cfg["rows"] else {}
    return PRECISION_COLS, _floats(rows), lines, extra


DRIFT_COLS = ("cycle", "skipped", "branch_occupation", "control_occupation",
              "ensemble_occupation", "ensemble_se", "control_ensemble")


def run_drift(cfg):
    layout = _layout(cfg)
    cur = coherent.silent_drift_experiment(
        layout, _noise(cfg), cfg["T"], cfg["silent"], shots=cfg["shots"], seed=cfg["seed"],
        alpha=cfg["alpha"], beta=cfg["beta"], workers=cfg["threads"],
    )
    rows = []
    for k in range(len(cur.cycles)):
        rows.append({"cycle": int(cur.cycles[k]), "skipped": k < cfg["T"],
                     "branch_occupation": float(cur.branch_occupation[k]),
                     "control_occupation": float(cur.control_occupation[k]),
                     "ensemble_occupation": float(cur.ensemble_occupation[k]),
                     "ensemble_se": float(cur.ensemble_se[k]),
                     "control_ensemble": float(cur.control_ensemble[k])})
    z = (cur.resume_alone_frequency - cur.resume_alone_probability) / cur.resume_alone_se \
        if cur.resume_alone_se > 0 else 0.0
    lines = [
        f"silent-sector occupation after {cfg['T']} skipped cycles: {cur.branch_occupation[-1]:.4g}"
        f" (control {cur.control_occupation[-1]:.4g})",
        f"resumption: g_{cfg['silent']} alone fired in {cur.resume_alone_frequency:.4g} of shots,"
        f" Born prediction {cur.resume_alone_probability:.4g} (z = {z:.2f})",
    ]
    return DRIFT_COLS, rows, lines


def _size_col(cfg):
    return "d" if cfg["code"] == "surface" else "N_c"


def _frame_cols(cfg, *extra):
    return (_size_col(cfg), "p", "q", "p_s", "cycles", "shots", "failures", "p_L_hat",
            "ci_low", "ci_high", "silent_events") + extra


def _frame_row(cfg, size, p, q, p_s, cycles, st: frame.ShotStats, **extra):
    return {_size_col(cfg): size, "p": float(p), "q": float(q), "p_s": float(p_s), "cycles": cycles,
            "shots": st.shots, "failures": st.failures, "p_L_hat": st.p_L_hat, "ci_low": st.ci_low,
            "ci_high": st.ci_high, "silent_events": st.silent_events, **extra}


def run_montecarlo(cfg):
    layout = _layout(cfg)
    sil = None
    if cfg["p_s"] > 0:
        dur = cfg["silent_duration"] if cfg["silent_duration"] is not None else max(1, cfg["cycles"] // 2)
        sil = frame.SilentConfig(cfg["p_s"], dur, max(cfg["cycles"], 1))
    st = frame.run_shots(layout, cfg["p"], cfg["q"], cfg["cycles"], cfg["shots"], sil, cfg["seed"], cfg["threads"])
    row = _frame_row(cfg, cfg["size"], cfg["p"], cfg["q"], cfg["p_s"], cfg["cycles"], st)
    return _frame_cols(cfg), [row], [f"p_L = {st.p_L_hat:.4g}  95% CI [{st.ci_low:.4g}, {st.ci_high:.4g}]"]


def run_threshold(cfg):
    scan = frame.threshold_scan(cfg["sizes"], cfg["ps"], cfg["cycles"], cfg["shots"], cfg["seed"],
                                cfg["q"], cfg["code"], cfg["threads"])
    rows = [_frame_row(cfg, r.size, r.p, r.q, r.p_s, r.cycles, r.stats) for r in scan.rows]
    lines = []
    for d1, d2, c in scan.crossings():
        lines.append(f"crossing {d1}/{d2}: " + (f"p ~ {c:.4g}" if c is not None else "not in range"))
    est = scan.estimate()
    lines.append("threshold estimate: " + (f"{est:.4g}" if est is not None else "none"))
    return _frame_cols(cfg), rows, lines


def run_silent_mc(cfg):
    res = frame.silent_failure_experiment(
        cfg["sizes"], cfg["p"], cfg["p_s"], cfg["cycles"], cfg["shots"], cfg["seed"], cfg["code"],
        cfg["silent_duration"], cfg["q"], cfg["threads"],
    )
    rows, lines = [], []
    for r in res:
        for label, st in (("on", r.on), ("off", r.off)):
            rows.append(_frame_row(
                cfg, r.size, cfg["p"], cfg["q"], cfg["p_s"] if label == "on" else 0.0, cfg["cycles"], st,
                injection=label, n_stabilizers=r.n_stabilizers,
                occurrence=r.occurrence if label == "on" else 0.0,
                occurrence_expected=r.occurrence_expected if label == "on" else 0.0,
                conditional_failure=r.conditional_failure if label == "on" else "",
            ))
        lines.append(f"size {r.size}: p_L on {r.on.p_L_hat:.4g} off {r.off.p_L_hat:.4g}"
                     f"  occurrence {r.occurrence:.4g} (expected {r.occurrence_expected:.4g})")
    cols = _frame_cols(cfg, "injection", "n_stabilizers", "occurrence", "occurrence_expected", "conditional_failure")
    return cols, rows, lines


BUDGET_COLS = budget.BUDGET_COLUMNS + ("qec_term", "silent_term", "exceeded", "above_threshold", "required_p_s")


def run_budget(cfg):
    base = budget.BudgetParams(cfg["n_ops"], cfg["n_logical"], cfg["n_code"], cfg["p"], cfg["p_th"],
                               cfg["p_s"], cfg["form"])
    need = budget.required_ps(base, cfg["target"])
    grid = [cfg["n_code"]] if cfg["nc_min"] is None else range(cfg["nc_min"], cfg["nc_max"] + 1)
    rows = []
    for nc in grid:
        bp = replace(base, n_code=float(nc))
        res = budget.failure_budget(bp)
        rn = budget.required_ps(bp, cfg["target"])
        rows.append({"n_ops": bp.n_ops, "n_logical": bp.n_logical, "n_code": bp.n_code, "p": bp.p,
                     "p_th": bp.p_th, "p_s": bp.p_s, "p_total": res.p_total,
                     "log10_p_total": res.log_p_total / math.log(10), "qec_term": res.qec_term,
                     "silent_term": res.silent_term, "exceeded": res.exceeded,
                     "above_threshold": res.above_threshold,
                     "required_p_s": rn.p_s if rn.feasible else ""})
    res = budget.failure_budget(base)
    lines = [f"p_total {res.p_total:.6g} (QEC {res.qec_term:.3g}, silent {res.silent_term:.6g})",
             "required p_s for target {:.3g}: {}".format(
                 cfg["target"], f"{need.p_s:.6g}" if need.feasible else "infeasible (QEC term alone exceeds target)")]
    if cfg["nc_min"] is not None:
        opt = budget.optimal_nc(base, grid)
        where = "interior" if opt.interior else "at the range edge"
        lines.append(f"optimal N_c {opt.n_code} ({where}), p_total {opt.p_total:.6g}")
    return BUDGET_COLS, rows, lines


RUNNERS = {
    "describe": run_describe,
    "eq4-check": run_closed_form,
    "precision": run_precision,
    "silent-drift": run_drift,
    "montecarlo": run_montecarlo,
    "threshold": run_threshold,
    "silent-mc": run_silent_mc,
    "budget": run_budget,
}


def run(cfg: dict, out=None) -> int:
    """Dispatch a validated config, write artifacts, return the exit code."""
    out = out if out is not None else sys.stdout
    outdir = Path(cfg["output"])
    try:
        result = RUNNERS[cfg["experiment"]](cfg)
    except (ContractViolation, DecodingError) as exc:
        print(f"error: contract violation: {exc}", file=sys.stderr)
        return EXIT_CONTRACT
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    cols, rows, lines = result[:3]
    extra = result[3] if len(result) > 3 else {}
    outdir.mkdir(parents=True, exist_ok=True)
    artifacts.write_json(outdir / "header.json", artifacts.header(canonical(cfg), cfg["seed"]))
    artifacts.write_csv(outdir / "results.csv", cols, rows)
    for name, (c, r) in extra.items():
        artifacts.write_csv(outdir / name, c, r)
    for ln in lines:
        print(ln, file=out)
    print(f"wrote {outdir / 'results.csv'}", file=out)
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    try:
        cfg = parse_config(argv)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except SystemExit as exc:  # argparse usage errors
        return EXIT_INVALID if exc.code else EXIT_OK
    return run(cfg)


if __name__ == "__main__":
    sys.exit(main())
