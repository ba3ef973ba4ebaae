"""Penalized order selection on quantized data.

Each candidate order is scored by the residual sum of squares of its
regularized least-squares fit plus a linear complexity penalty:

    score(p, q) = rss(p, q) + slope * n * (p + q)

The AR order is selected by scanning p with the exogenous order pinned at
its upper bound; the exogenous order by scanning q with the AR order
pinned. Ties resolve to the smallest order. The admissible range of the
penalty slope, given hypothesized excitation and growth constants, is
computed by :func:`ar_penalty_interval` / :func:`exo_penalty_interval`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .estimator import accumulate_rows, new_gram_state, regressor_matrix, solve_theta
from .model import Trajectory

__all__ = [
    "PenaltySchedule",
    "CriterionRow",
    "CriterionTable",
    "OrderCheckpoint",
    "PenaltyHypothesis",
    "PenaltyInterval",
    "residual_sum_squares",
    "penalized_criterion",
    "estimate_ar_order",
    "estimate_exo_order",
    "order_trajectories",
    "ar_penalty_interval",
    "exo_penalty_interval",
]


@dataclass(frozen=True)
class PenaltySchedule:
    """Linear penalty: slope * n at sample count n."""

    slope: float

    def __post_init__(self):
        if not (math.isfinite(self.slope) and self.slope > 0.0):
            raise ValueError(f"penalty slope must be positive, got {self.slope}")

    def penalty(self, n: int) -> float:
        return self.slope * n


@dataclass(frozen=True)
class CriterionRow:
    sigma: float
    value: float


@dataclass(frozen=True)
class CriterionTable:
    """Criterion values along one axis of the order grid.

    axis is "p" (AR order varies, exogenous pinned at ``fixed_order``) or
    "q" (exogenous varies, AR pinned). rows maps the varying order to its
    (sigma, value) pair; value = sigma + slope * n * (p + q) exactly as
    computed.
    """

    axis: str
    fixed_order: int
    n: int
    slope: float
    rows: dict[int, CriterionRow]

    def __post_init__(self):
        if self.axis not in ("p", "q"):
            raise ValueError(f"axis must be 'p' or 'q', got {self.axis!r}")

    def total_order(self, order: int) -> int:
        return order + self.fixed_order


@dataclass(frozen=True)
class OrderCheckpoint:
    """Order estimates and criterion tables at one sample count."""

    n: int
    ar_estimate: int
    exo_estimate: int
    ar_table: CriterionTable
    exo_table: CriterionTable


def residual_sum_squares(traj: Trajectory, theta: np.ndarray, p: int, q: int, n: int) -> float:
    """Sum over the first n samples of (s[i+1] - theta' psi_i(p, q))^2."""
    theta = np.asarray(theta, dtype=float)
    if theta.shape != (p + q,):
        raise ValueError(f"theta for orders ({p}, {q}) must have length {p + q}")
    rows = regressor_matrix(traj, p, q, n)
    return _rss(rows, traj.s[1 : n + 1], theta)


def _rss(rows: np.ndarray, targets: np.ndarray, theta: np.ndarray) -> float:
    resid = targets - rows @ theta
    return float(resid @ resid)


def penalized_criterion(sigma: float, schedule: PenaltySchedule, n: int, p: int, q: int) -> float:
    """sigma plus the complexity penalty slope * n * (p + q)."""
    if sigma < 0.0:
        raise ValueError(f"sigma must be non-negative, got {sigma}")
    return float(sigma + schedule.penalty(n) * (p + q))


def _argmin_ascending(values: dict[int, float]) -> int:
    best_order = None
    best_value = math.inf
    for order in sorted(values):
        if values[order] < best_value:
            best_order = order
            best_value = values[order]
    return best_order


def _axis_cells(axis: str, p_max: int, q_max: int) -> tuple[list[int], int]:
    """Varying orders and the pinned order for one grid axis."""
    if p_max < 0:
        raise ValueError(f"AR order bound must be non-negative, got {p_max}")
    if q_max < 1:
        raise ValueError(f"exogenous order bound must be at least 1, got {q_max}")
    if axis == "p":
        return list(range(0, p_max + 1)), q_max
    return list(range(1, q_max + 1)), p_max


def _axis_tables(
    traj: Trajectory,
    axis: str,
    p_max: int,
    q_max: int,
    schedule: PenaltySchedule,
    checkpoints: list[int],
) -> list[CriterionTable]:
    """Evaluate one grid axis at every checkpoint, sharing accumulations.

    The Gram state of each cell is extended chunk by chunk between
    checkpoints; since accumulation is sequential in the sample index, the
    state at each checkpoint is bitwise identical to a from-scratch build.
    """
    orders, fixed = _axis_cells(axis, p_max, q_max)
    n_max = checkpoints[-1]
    targets = traj.require_quantized()[1 : n_max + 1]
    per_cell: dict[int, list[CriterionRow]] = {}
    for order in orders:
        p, q = (order, fixed) if axis == "p" else (fixed, order)
        rows = regressor_matrix(traj, p, q, n_max)
        state = new_gram_state(p, q)
        done = 0
        cells = []
        for n in checkpoints:
            state = accumulate_rows(state, rows[done:n], targets[done:n])
            done = n
            theta = solve_theta(state)
            sigma = _rss(rows[:n], targets[:n], theta)
            value = penalized_criterion(sigma, schedule, n, p, q)
            cells.append(CriterionRow(sigma=sigma, value=value))
        per_cell[order] = cells
    return [
        CriterionTable(
            axis=axis,
            fixed_order=fixed,
            n=n,
            slope=schedule.slope,
            rows={order: per_cell[order][k] for order in orders},
        )
        for k, n in enumerate(checkpoints)
    ]


def _validate_checkpoints(traj: Trajectory, checkpoints: list[int]) -> None:
    if not checkpoints:
        raise ValueError("at least one checkpoint is required")
    if any(n < 1 for n in checkpoints):
        raise ValueError("checkpoints must be at least 1")
    if any(b <= a for a, b in zip(checkpoints, checkpoints[1:])):
        raise ValueError("checkpoints must be strictly increasing")
    if checkpoints[-1] > traj.horizon:
        raise ValueError(
            f"checkpoint {checkpoints[-1]} exceeds trajectory horizon {traj.horizon}"
        )


def estimate_ar_order(
    traj: Trajectory, p_max: int, q_max: int, schedule: PenaltySchedule, n: int
) -> tuple[int, CriterionTable]:
    """Select the AR order on the first n samples, exogenous pinned at q_max.

    Fits theta(p, q_max) for every p in 0..p_max, scores each fit, and
    returns the argmin together with the full criterion table. Ties break
    toward the smallest order.
    """
    _validate_checkpoints(traj, [n])
    table = _axis_tables(traj, "p", p_max, q_max, schedule, [n])[0]
    return _argmin_ascending({o: r.value for o, r in table.rows.items()}), table


def estimate_exo_order(
    traj: Trajectory, p_max: int, q_max: int, schedule: PenaltySchedule, n: int
) -> tuple[int, CriterionTable]:
    """Select the exogenous order on the first n samples, AR pinned at p_max.

    Scans q in 1..q_max; the exogenous polynomial is never empty, so the
    grid starts at one. Ties break toward the smallest order.
    """
    _validate_checkpoints(traj, [n])
    table = _axis_tables(traj, "q", p_max, q_max, schedule, [n])[0]
    return _argmin_ascending({o: r.value for o, r in table.rows.items()}), table


def order_trajectories(
    traj: Trajectory,
    p_max: int,
    q_max: int,
    ar_schedule: PenaltySchedule,
    exo_schedule: PenaltySchedule,
    checkpoints: list[int],
) -> list[OrderCheckpoint]:
    """Order estimates at a strictly increasing list of sample counts.

    Equivalent to calling :func:`estimate_ar_order` and
    :func:`estimate_exo_order` at every checkpoint, but Gram accumulations
    are reused across checkpoints of the same cell.
    """
    checkpoints = [int(n) for n in checkpoints]
    _validate_checkpoints(traj, checkpoints)
    ar_tables = _axis_tables(traj, "p", p_max, q_max, ar_schedule, checkpoints)
    exo_tables = _axis_tables(traj, "q", p_max, q_max, exo_schedule, checkpoints)
    out = []
    for n, ar_table, exo_table in zip(checkpoints, ar_tables, exo_tables):
        out.append(
            OrderCheckpoint(
                n=n,
                ar_estimate=_argmin_ascending({o: r.value for o, r in ar_table.rows.items()}),
                exo_estimate=_argmin_ascending({o: r.value for o, r in exo_table.rows.items()}),
                ar_table=ar_table,
                exo_table=exo_table,
            )
        )
    return out


@dataclass(frozen=True)
class PenaltyHypothesis:
    """Hypothesized constants under which the selector is consistent.

    The slope bounds below are conditions on external constants (coefficient
    bound, excitation floors, Gram growth caps, parameter-error caps,
    trailing true coefficients); none of them is estimated from data. The
    evaluator only substitutes them into the bound formulas.
    """

    coef_bound: float
    max_ar_order: int
    max_exo_order: int
    step: float
    excitation_floor_ar: float
    excitation_floor_exo: float
    growth_cap_ar: float
    growth_cap_exo: float
    error_cap_ar: float
    error_cap_exo: float
    trailing_ar_sq: float
    trailing_exo_sq: float
    lower_margin_ar: float
    lower_margin_exo: float
    upper_shrink_ar: float
    upper_shrink_exo: float

    def __post_init__(self):
        for name in ("coef_bound", "step", "excitation_floor_ar", "excitation_floor_exo",
                     "growth_cap_ar", "growth_cap_exo"):
            if getattr(self, name) <= 0.0:
                raise ValueError(f"{name} must be positive")
        for name in ("error_cap_ar", "error_cap_exo", "trailing_ar_sq", "trailing_exo_sq"):
            if getattr(self, name) < 0.0:
                raise ValueError(f"{name} must be non-negative")
        if self.lower_margin_ar <= 0.0 or self.lower_margin_exo <= 0.0:
            raise ValueError("lower margins must be positive")
        if not 0.0 < self.upper_shrink_ar < 1.0:
            raise ValueError(f"upper_shrink_ar must be in (0, 1), got {self.upper_shrink_ar}")
        if not 0.0 < self.upper_shrink_exo < 1.0:
            raise ValueError(f"upper_shrink_exo must be in (0, 1), got {self.upper_shrink_exo}")


@dataclass(frozen=True)
class PenaltyInterval:
    """Admissible slope range [lo, hi]; feasible iff lo <= hi."""

    lo: float
    hi: float
    feasible: bool


def _step_scale(h: PenaltyHypothesis) -> float:
    return (1.0 + h.max_ar_order * h.coef_bound) * h.step


def ar_penalty_interval(h: PenaltyHypothesis) -> PenaltyInterval:
    """Slope interval under which the AR-order selector is consistent.

    The bounds are reported per sample (slope), with lo <= slope <= hi the
    admissible condition. An empty interval is reported honestly via
    ``feasible``; it is never assumed away.
    """
    if h.max_ar_order < 1:
        raise ValueError("AR order bound must be at least 1 for the upper slope bound")
    base = _step_scale(h)
    lo = 5.0 * base + h.lower_margin_ar
    hi = (h.upper_shrink_ar / h.max_ar_order) * (
        h.trailing_ar_sq * h.excitation_floor_ar
        - 2.0 * h.error_cap_ar * math.sqrt(h.growth_cap_ar * base)
        - 3.0 * base
    )
    return PenaltyInterval(lo=lo, hi=hi, feasible=lo <= hi)


def exo_penalty_interval(h: PenaltyHypothesis) -> PenaltyInterval:
    """Slope interval for the exogenous-order selector; mirrors the AR case.

    The step scale keeps the AR order bound (the pinned axis) in both
    intervals; only the excitation floor, growth cap, error cap, trailing
    coefficient, margins, and the dividing order bound switch sides.
    """
    if h.max_exo_order < 1:
        raise ValueError("exogenous order bound must be at least 1 for the upper slope bound")
    base = _step_scale(h)
    lo = 5.0 * base + h.lower_margin_exo
    hi = (h.upper_shrink_exo / h.max_exo_order) * (
        h.trailing_exo_sq * h.excitation_floor_exo
        - 2.0 * h.error_cap_exo * math.sqrt(h.growth_cap_exo * base)
        - 3.0 * base
    )
    return PenaltyInterval(lo=lo, hi=hi, feasible=lo <= hi)
