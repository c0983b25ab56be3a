"""Global failure budget of a fault-tolerant computation.

    p_# = N_# * N_L * [ (p / p_th) ** (sqrt(N_c) / 2) + p_s * N_c ]

taken as an equality with unit prefactors. The repetition-code form replaces
the exponent sqrt(N_c)/2 by N_c/2. Everything is evaluated in log space so
that 10**-300-scale QEC terms neither underflow nor lose precision.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, replace
from typing import Iterable

import numpy as np


@dataclass(frozen=True)
class BudgetParams:
    n_ops: float
    n_logical: float
    n_code: float
    p: float
    p_th: float
    p_s: float = 0.0
    form: str = "surface"  # surface | repetition

    def __post_init__(self):
        for name in ("n_ops", "n_logical", "n_code"):
            if not getattr(self, name) >= 1:
                raise ValueError(f"{name} must be >= 1")
        if not 0 < self.p <= 1:
            raise ValueError("p must lie in (0, 1]")
        if not self.p_th > 0:
            raise ValueError("p_th must be > 0")
        if not 0 <= self.p_s <= 1:
            raise ValueError("p_s must lie in [0, 1]")
        if self.form not in ("surface", "repetition"):
            raise ValueError(f"unknown form {self.form!r}")

    def exponent(self) -> float:
        return math.sqrt(self.n_code) / 2 if self.form == "surface" else self.n_code / 2

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class BudgetResult:
    p_total: float
    log_p_total: float
    qec_term: float  # N_# N_L (p/p_th)^e
    silent_term: float  # N_# N_L p_s N_c
    log_qec_term: float
    log_silent_term: float
    exceeded: bool  # p_total > 1
    above_threshold: bool  # p > p_th


def _log_terms(bp: BudgetParams) -> tuple[float, float]:
    base = math.log(bp.n_ops) + math.log(bp.n_logical)
    log_qec = base + bp.exponent() * (math.log(bp.p) - math.log(bp.p_th))
    log_sil = base + math.log(bp.p_s) + math.log(bp.n_code) if bp.p_s > 0 else -math.inf
    return log_qec, log_sil


def _exp(x: float) -> float:
    if x > 709.0:
        return math.inf
    return math.exp(x)


def failure_budget(params: BudgetParams) -> BudgetResult:
    log_qec, log_sil = _log_terms(params)
    log_tot = float(np.logaddexp(log_qec, log_sil))
    return BudgetResult(
        p_total=_exp(log_tot),
        log_p_total=log_tot,
        qec_term=_exp(log_qec),
        silent_term=_exp(log_sil) if log_sil > -math.inf else 0.0,
        log_qec_term=log_qec,
        log_silent_term=log_sil,
        exceeded=log_tot > 0.0,
        above_threshold=params.p > params.p_th,
    )


@dataclass(frozen=True)
class RequiredPs:
    p_s: float
    feasible: bool
    qec_term: float


def required_ps(params: BudgetParams, target: float) -> RequiredPs:
    """Largest p_s keeping p_# at ``target``; ``params.p_s`` is ignored.

    Infeasible (p_s = 0, feasible False) when the QEC term alone already
    reaches the target.
    """
    if not 0 < target <= 1:
        raise ValueError("target must lie in (0, 1]")
    log_qec, _ = _log_terms(replace(params, p_s=0.0))
    log_scale = math.log(params.n_ops) + math.log(params.n_logical)
    log_target = math.log(target)
    qec = _exp(log_qec)
    if log_qec >= log_target:
        return RequiredPs(0.0, False, qec)
    # target/(N_# N_L) - QEC/(N_# N_L) = (target/(N_# N_L)) * (1 - exp(log_qec - log_target))
    log_room = log_target - log_scale + math.log1p(-math.exp(log_qec - log_target))
    return RequiredPs(math.exp(log_room - math.log(params.n_code)), True, qec)


@dataclass(frozen=True)
class OptimalNc:
    n_code: int
    p_total: float
    grid: np.ndarray
    curve: np.ndarray  # log p_# over the grid
    interior: bool  # minimum strictly inside the scanned range


def optimal_nc(params: BudgetParams, n_range: Iterable[int]) -> OptimalNc:
    """Scan N_c over ``n_range`` and return the minimizer of p_#.

    Ties go to the smallest N_c.
    """
    grid = np.array(sorted({int(v) for v in n_range}), dtype=np.int64)
    if grid.size == 0:
        raise ValueError("empty N_c range")
    curve = np.array([failure_budget(replace(params, n_code=int(v))).log_p_total for v in grid])
    k = int(np.argmin(curve))
    return OptimalNc(int(grid[k]), _exp(curve[k]), grid, curve, 0 < k < grid.size - 1)


BUDGET_COLUMNS = ("n_ops", "n_logical", "n_code", "p", "p_th", "p_s", "p_total", "log10_p_total")


def sweep(base: BudgetParams, **axes) -> list[dict]:
    """Full factorial sweep; each keyword maps a parameter name to its values."""
    names = list(axes)
    for nm in names:
        if nm not in ("n_ops", "n_logical", "n_code", "p", "p_th", "p_s"):
            raise ValueError(f"cannot sweep {nm!r}")
    rows = []
    grids = np.meshgrid(*[np.asarray(list(axes[nm]), dtype=float) for nm in names], indexing="ij")
    for point in zip(*(g.ravel() for g in grids)):
        bp = replace(base, **dict(zip(names, (float(v) for v in point))))
        res = failure_budget(bp)
        rows.append(
            {
                "n_ops": bp.n_ops,
                "n_logical": bp.n_logical,
                "n_code": bp.n_code,
                "p": bp.p,
                "p_th": bp.p_th,
                "p_s": bp.p_s,
                "p_total": res.p_total,
                "log10_p_total": res.log_p_total / math.log(10),
            }
        )
    return rows
