"""Regularized least squares over quantized regressors.

For a candidate order pair (p, q) the regressor at time i stacks the last p
quantized outputs and the last q inputs:

    psi_i = [s[i], ..., s[i-p+1], u[i], ..., u[i-q+1]]

The normal equations are regularized with an identity term, so the Gram
matrix I + sum_i psi_i psi_i' is always positive definite and the estimate

    theta = (I + sum psi psi')^{-1} (sum psi * s[i+1])

is well defined from the first sample on. Accumulation is done in
increasing i so repeated runs are bit-reproducible.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .model import ArxModel, Trajectory, lagged_matrix

__all__ = [
    "Regressor",
    "GramState",
    "PaddedTheta",
    "build_regressor",
    "regressor_matrix",
    "new_gram_state",
    "accumulate",
    "accumulate_rows",
    "solve_theta",
    "eigenvalue_extremes",
    "pad_theta",
    "true_theta",
    "param_error_norm",
]


def _check_orders(p: int, q: int) -> None:
    if p < 0:
        raise ValueError(f"AR order must be non-negative, got {p}")
    if q < 1:
        raise ValueError(f"exogenous order must be at least 1, got {q}")


@dataclass(frozen=True)
class Regressor:
    """Regressor vector for one sample at candidate orders (p, q)."""

    p: int
    q: int
    entries: np.ndarray

    def __post_init__(self):
        entries = np.asarray(self.entries, dtype=float)
        entries.setflags(write=False)
        object.__setattr__(self, "entries", entries)
        _check_orders(self.p, self.q)
        if entries.shape != (self.p + self.q,):
            raise ValueError(
                f"regressor for orders ({self.p}, {self.q}) needs "
                f"{self.p + self.q} entries, got shape {entries.shape}"
            )


@dataclass(frozen=True)
class GramState:
    """Accumulated normal equations for one (p, q) cell.

    gram = I + sum of psi psi' over the accumulated samples, moment is the
    matching sum of psi * s_next, count the number of samples folded in.
    """

    p: int
    q: int
    gram: np.ndarray
    moment: np.ndarray
    count: int

    def __post_init__(self):
        gram = np.asarray(self.gram, dtype=float)
        moment = np.asarray(self.moment, dtype=float)
        gram.setflags(write=False)
        moment.setflags(write=False)
        object.__setattr__(self, "gram", gram)
        object.__setattr__(self, "moment", moment)
        dim = self.p + self.q
        if gram.shape != (dim, dim) or moment.shape != (dim,):
            raise ValueError(
                f"state for orders ({self.p}, {self.q}) needs a {dim}x{dim} gram "
                f"and a {dim}-vector moment, got {gram.shape} and {moment.shape}"
            )

    @property
    def dim(self) -> int:
        return self.p + self.q


def new_gram_state(p: int, q: int) -> GramState:
    """Fresh state: gram is the identity regularizer, moment is zero."""
    _check_orders(p, q)
    dim = p + q
    return GramState(p=p, q=q, gram=np.eye(dim), moment=np.zeros(dim), count=0)


def build_regressor(traj: Trajectory, i: int, p: int, q: int) -> Regressor:
    """Regressor psi_i(p, q) from a quantized trajectory.

    Entries with underlying time index below zero are exactly zero.
    """
    _check_orders(p, q)
    s = traj.require_quantized()
    if not 0 <= i <= traj.horizon - 1:
        raise ValueError(f"sample index {i} outside 0..{traj.horizon - 1}")
    entries = np.zeros(p + q)
    for lag in range(p):
        if i - lag >= 0:
            entries[lag] = s[i - lag]
    for lag in range(q):
        if i - lag >= 0:
            entries[p + lag] = traj.u[i - lag]
    return Regressor(p=p, q=q, entries=entries)


def regressor_matrix(traj: Trajectory, p: int, q: int, n: int) -> np.ndarray:
    """Rows psi_0 .. psi_{n-1} stacked into an (n, p+q) matrix."""
    _check_orders(p, q)
    s = traj.require_quantized()
    if not 1 <= n <= traj.horizon:
        raise ValueError(f"sample count {n} outside 1..{traj.horizon}")
    return np.hstack([lagged_matrix(s[:n], n, p), lagged_matrix(traj.u[:n], n, q)])


def accumulate(state: GramState, psi: Regressor, s_next: float) -> GramState:
    """Fold one sample into the normal equations; returns a new state."""
    if (psi.p, psi.q) != (state.p, state.q):
        raise ValueError(
            f"regressor orders ({psi.p}, {psi.q}) do not match state orders "
            f"({state.p}, {state.q})"
        )
    v = psi.entries
    return GramState(
        p=state.p,
        q=state.q,
        gram=state.gram + np.outer(v, v),
        moment=state.moment + v * s_next,
        count=state.count + 1,
    )


def accumulate_rows(state: GramState, rows: np.ndarray, targets: np.ndarray) -> GramState:
    """Fold a block of samples, one row at a time in increasing index.

    Produces exactly the state of repeated :func:`accumulate` calls (same
    summation order, hence bitwise-equal arrays).
    """
    rows = np.asarray(rows, dtype=float)
    targets = np.asarray(targets, dtype=float)
    if rows.ndim != 2 or rows.shape[1] != state.dim:
        raise ValueError(f"rows must have shape (m, {state.dim}), got {rows.shape}")
    if targets.shape != (rows.shape[0],):
        raise ValueError("targets must match the number of rows")
    gram = state.gram.copy()
    moment = state.moment.copy()
    for v, t in zip(rows, targets):
        gram += np.outer(v, v)
        moment += v * t
    return GramState(
        p=state.p, q=state.q, gram=gram, moment=moment, count=state.count + rows.shape[0]
    )


def solve_theta(state: GramState) -> np.ndarray:
    """Solve gram * theta = moment by Cholesky factorization.

    The identity regularizer guarantees positive definiteness; a
    factorization failure therefore indicates corrupted state and is
    re-raised as such. Layout of the solution:
    [-a_1, ..., -a_p, b_1, ..., b_q].
    """
    try:
        factor = scipy.linalg.cho_factor(state.gram, lower=True)
    except np.linalg.LinAlgError as exc:
        raise ArithmeticError(
            "gram matrix is numerically indefinite despite the identity "
            "regularizer; state is corrupted"
        ) from exc
    return scipy.linalg.cho_solve(factor, state.moment)


def eigenvalue_extremes(state: GramState) -> tuple[float, float]:
    """Smallest and largest eigenvalue of the gram matrix.

    The identity regularizer keeps the smallest eigenvalue at or above one
    (up to eigensolver rounding). The growth of both extremes with the
    sample count is the observable form of the persistent-excitation
    condition.
    """
    eigs = np.linalg.eigvalsh(state.gram)
    return float(eigs[0]), float(eigs[-1])


@dataclass(frozen=True)
class PaddedTheta:
    """Parameter vector laid out for reference orders (ar_order, exo_order).

    values = [-a_1, ..., -a_{ar_order}, b_1, ..., b_{exo_order}] with zeros
    beyond the underlying model's true orders.
    """

    ar_order: int
    exo_order: int
    values: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        values.setflags(write=False)
        object.__setattr__(self, "values", values)
        if values.shape != (self.ar_order + self.exo_order,):
            raise ValueError(
                f"padded layout ({self.ar_order}, {self.exo_order}) needs "
                f"{self.ar_order + self.exo_order} values, got {values.shape}"
            )


def pad_theta(theta: np.ndarray, p: int, q: int, p_ref: int, q_ref: int) -> PaddedTheta:
    """Zero-pad a (p, q) estimate into the (p_ref, q_ref) reference layout.

    The AR block gains p_ref - p trailing zeros, the exogenous block
    q_ref - q trailing zeros; signs are preserved as stored.
    """
    theta = np.asarray(theta, dtype=float)
    if theta.shape != (p + q,):
        raise ValueError(f"theta for orders ({p}, {q}) must have length {p + q}")
    if p > p_ref or q > q_ref:
        raise ValueError(
            f"cannot pad orders ({p}, {q}) into smaller layout ({p_ref}, {q_ref})"
        )
    values = np.zeros(p_ref + q_ref)
    values[:p] = theta[:p]
    values[p_ref : p_ref + q] = theta[p:]
    return PaddedTheta(ar_order=p_ref, exo_order=q_ref, values=values)


def true_theta(model: ArxModel, p_ref: int, q_ref: int) -> PaddedTheta:
    """True parameter vector [-a, b] padded to the (p_ref, q_ref) layout."""
    theta = np.concatenate([-np.asarray(model.a), np.asarray(model.b)])
    return pad_theta(theta, model.ar_order, model.exo_order, p_ref, q_ref)


def param_error_norm(estimate: PaddedTheta, truth: PaddedTheta) -> float:
    """Euclidean norm of the difference between two same-layout vectors."""
    if (estimate.ar_order, estimate.exo_order) != (truth.ar_order, truth.exo_order):
        raise ValueError(
            f"layout mismatch: ({estimate.ar_order}, {estimate.exo_order}) vs "
            f"({truth.ar_order}, {truth.exo_order})"
        )
    return float(np.linalg.norm(estimate.values - truth.values))
