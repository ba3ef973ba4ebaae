"""ARX system definition, simulation, and uniform output quantization.

The system evolves as

    y[t+1] = -(a[1]*y[t] + ... + a[p]*y[t+1-p])
             + b[1]*u[t] + ... + b[q]*u[t+1-q] + w[t+1]

with all signals of negative time index treated as zero and y[0] = 0.
Coefficients follow the monic-polynomial convention: the AR polynomial is
1 + a[1]*z + ... + a[p]*z**p in the backward-shift operator z, so the
regression parameter vector is [-a[1], ..., -a[p], b[1], ..., b[q]].

Outputs are observed only through a mid-tread uniform quantizer with step
``epsilon``: y is mapped to epsilon * floor(y/epsilon + 1/2), i.e. the cell
[k*eps - eps/2, k*eps + eps/2) maps to k*eps.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

__all__ = [
    "ArxModel",
    "InputSpec",
    "Quantizer",
    "Trajectory",
    "simulate",
    "response",
    "quantize",
    "quantize_array",
    "quantize_trajectory",
    "quantization_noise_bound",
    "quantization_noise_sequence",
    "check_stability",
    "step_bound",
    "satisfies_step_bound",
    "lagged_matrix",
]


def _freeze(array: np.ndarray) -> np.ndarray:
    out = np.asarray(array, dtype=float)
    out.setflags(write=False)
    return out


@dataclass(frozen=True)
class ArxModel:
    """True ARX system: AR coefficients ``a``, exogenous coefficients ``b``.

    Parameters
    ----------
    a : sequence of float
        Coefficients a[1]..a[p] of the monic AR polynomial
        1 + a[1]*z + ... + a[p]*z**p. May be empty (pure exogenous model).
        The trailing coefficient must be nonzero when present.
    b : sequence of float
        Coefficients b[1]..b[q] of the exogenous polynomial
        b[1] + b[2]*z + ... + b[q]*z**(q-1). Must be non-empty with a
        nonzero trailing coefficient.
    noise_std : float
        Standard deviation of the i.i.d. Gaussian driving noise. Zero is
        accepted and disables the noise (useful for deterministic checks).
    """

    a: tuple[float, ...]
    b: tuple[float, ...]
    noise_std: float = 1.0

    def __init__(self, a, b, noise_std: float = 1.0):
        object.__setattr__(self, "a", tuple(float(x) for x in a))
        object.__setattr__(self, "b", tuple(float(x) for x in b))
        object.__setattr__(self, "noise_std", float(noise_std))
        self._validate()

    def _validate(self) -> None:
        if len(self.b) < 1:
            raise ValueError("exogenous order must be at least 1 (b is empty)")
        if self.b[-1] == 0.0:
            raise ValueError("trailing exogenous coefficient b[q] must be nonzero")
        if self.a and self.a[-1] == 0.0:
            raise ValueError("trailing AR coefficient a[p] must be nonzero")
        if not all(math.isfinite(x) for x in self.a + self.b):
            raise ValueError("coefficients must be finite")
        if not math.isfinite(self.noise_std) or self.noise_std < 0.0:
            raise ValueError(f"noise_std must be non-negative, got {self.noise_std}")

    @property
    def ar_order(self) -> int:
        return len(self.a)

    @property
    def exo_order(self) -> int:
        return len(self.b)

    def coefficient_bound(self) -> float:
        """Smallest c > 0 with |a[i]| <= c and |b[j]| <= c for all i, j."""
        return max(abs(x) for x in self.a + self.b)

    def check_coefficients(self, coef_bound: float) -> bool:
        """True iff every coefficient magnitude is within ``coef_bound``."""
        return self.coefficient_bound() <= coef_bound


@dataclass(frozen=True)
class InputSpec:
    """Input law: i.i.d. uniform draws on [-delta, delta]."""

    delta: float

    def __post_init__(self):
        if not (math.isfinite(self.delta) and self.delta > 0.0):
            raise ValueError(f"delta must be positive, got {self.delta}")


@dataclass(frozen=True)
class Quantizer:
    """Mid-tread uniform quantizer with cell width ``epsilon``."""

    epsilon: float

    def __post_init__(self):
        if not (math.isfinite(self.epsilon) and self.epsilon > 0.0):
            raise ValueError(f"epsilon must be positive, got {self.epsilon}")


@dataclass(frozen=True)
class Trajectory:
    """Aligned signal record over a horizon n.

    Index conventions (t is absolute time):
      u[t]  for t = 0..n-1   inputs
      w[t]  holds the noise driving y[t+1], t = 0..n-1
      y[t]  for t = 0..n     outputs, y[0] = 0
      s[t]  for t = 0..n     quantized outputs (None until quantized)

    Instances produced by :func:`simulate` / :func:`quantize_trajectory`
    satisfy y[0] = s[0] = 0, s on the epsilon grid, and |s - y| <= eps/2.
    Arrays are made read-only so trajectories can be shared freely.
    """

    u: np.ndarray
    w: np.ndarray
    y: np.ndarray
    s: np.ndarray | None = None
    epsilon_used: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "u", _freeze(self.u))
        object.__setattr__(self, "w", _freeze(self.w))
        object.__setattr__(self, "y", _freeze(self.y))
        if self.s is not None:
            object.__setattr__(self, "s", _freeze(self.s))
        n = self.u.shape[0]
        if n < 1:
            raise ValueError("horizon must be at least 1")
        if self.w.shape != (n,):
            raise ValueError(f"w must have shape ({n},), got {self.w.shape}")
        if self.y.shape != (n + 1,):
            raise ValueError(f"y must have shape ({n + 1},), got {self.y.shape}")
        if self.s is not None and self.s.shape != (n + 1,):
            raise ValueError(f"s must have shape ({n + 1},), got {self.s.shape}")

    @property
    def horizon(self) -> int:
        return self.u.shape[0]

    def require_quantized(self) -> np.ndarray:
        if self.s is None:
            raise ValueError("trajectory has no quantized outputs; quantize it first")
        return self.s


def lagged_matrix(series: np.ndarray, rows: int, lags: int) -> np.ndarray:
    """Matrix M with M[i, l] = series[i - l], zero where i - l < 0.

    Shape (rows, lags); lags may be 0. Used to stack delayed copies of a
    signal into regressor blocks.
    """
    series = np.asarray(series, dtype=float)
    out = np.zeros((rows, lags))
    for lag in range(lags):
        m = min(max(rows - lag, 0), series.shape[0])
        out[lag : lag + m, lag] = series[:m]
    return out


def response(model: ArxModel, u: np.ndarray, w: np.ndarray) -> Trajectory:
    """Run the ARX recursion for given input and noise sequences.

    ``u`` and ``w`` must have equal length n; ``w[t]`` drives ``y[t+1]``.
    Returns the trajectory with y[0] = 0 and no quantized outputs.
    """
    u = np.asarray(u, dtype=float)
    w = np.asarray(w, dtype=float)
    if u.ndim != 1 or w.shape != u.shape:
        raise ValueError("u and w must be 1-d arrays of equal length")
    n = u.shape[0]
    if n < 1:
        raise ValueError("horizon must be at least 1")
    a = model.a
    b = model.b
    y = np.zeros(n + 1)
    for t in range(n):
        acc = w[t]
        for i, ai in enumerate(a, start=1):
            idx = t + 1 - i
            if idx < 0:
                break
            acc -= ai * y[idx]
        for j, bj in enumerate(b, start=1):
            idx = t + 1 - j
            if idx < 0:
                break
            acc += bj * u[idx]
        y[t + 1] = acc
    return Trajectory(u=u, w=w, y=y)


def simulate(model: ArxModel, input_spec: InputSpec, horizon: int, seed: int) -> Trajectory:
    """Simulate the system over ``horizon`` steps, deterministically per seed.

    Inputs are i.i.d. uniform on [-delta, delta]; noise is i.i.d. Gaussian
    with the model's standard deviation. One PCG64 generator is seeded per
    call and consumed in a fixed order (inputs first, then noise), so equal
    arguments yield bit-identical trajectories.
    """
    if horizon < 1:
        raise ValueError(f"horizon must be at least 1, got {horizon}")
    rng = np.random.default_rng(seed)
    u = rng.uniform(-input_spec.delta, input_spec.delta, size=horizon)
    w = rng.normal(0.0, model.noise_std, size=horizon)
    return response(model, u, w)


def quantize_array(values: np.ndarray, epsilon: float) -> np.ndarray:
    """Vectorized mid-tread quantization: eps * floor(v/eps + 1/2).

    Adding 0.0 normalizes any negative zero in the output.
    """
    values = np.asarray(values, dtype=float)
    return epsilon * np.floor(values / epsilon + 0.5) + 0.0


def quantize(y_value: float, q: Quantizer) -> float:
    """Quantize a single output sample; rejects non-finite input."""
    if not math.isfinite(y_value):
        raise ValueError(f"cannot quantize non-finite value {y_value}")
    return float(q.epsilon * math.floor(y_value / q.epsilon + 0.5) + 0.0)


def quantize_trajectory(traj: Trajectory, q: Quantizer) -> Trajectory:
    """Return a copy of ``traj`` with s = quantize(y) element-wise."""
    if not np.all(np.isfinite(traj.y)):
        raise ValueError("trajectory outputs contain non-finite values")
    s = quantize_array(traj.y, q.epsilon)
    return replace(traj, s=s, epsilon_used=q.epsilon)


def quantization_noise_bound(model: ArxModel, q: Quantizer) -> float:
    """Uniform bound on the disturbance induced by quantized regression.

    Equals (eps/2) * (|a[1]| + ... + |a[p]| + 1): one half-cell from the
    quantized target plus one half-cell per AR regressor entry.
    """
    return 0.5 * q.epsilon * (sum(abs(x) for x in model.a) + 1.0)


def quantization_noise_sequence(traj: Trajectory, model: ArxModel) -> np.ndarray:
    """Realized quantization disturbance at times 1..n.

    Entry t-1 is s[t] - theta' psi[t-1] - w[t], where theta is the true
    parameter vector and psi is the regressor built from quantized outputs
    and inputs at the true orders. Requires ``traj`` to be quantized and
    generated by ``model``.
    """
    s = traj.require_quantized()
    n = traj.horizon
    theta = np.concatenate([-np.asarray(model.a), np.asarray(model.b)])
    psi = np.hstack(
        [lagged_matrix(s[:n], n, model.ar_order), lagged_matrix(traj.u, n, model.exo_order)]
    )
    return s[1:] - psi @ theta - traj.w


def check_stability(model: ArxModel, tol: float = 1e-9) -> bool:
    """True iff the AR polynomial has no root in the closed unit disk.

    Roots of 1 + a[1]*z + ... + a[p]*z**p are found as companion-matrix
    eigenvalues; every root modulus must exceed 1 + tol, so float-exact
    unit-circle roots fail.
    """
    if model.ar_order == 0:
        return True
    coeffs = np.concatenate([np.asarray(model.a)[::-1], [1.0]])
    roots = np.roots(coeffs)
    return bool(np.all(np.abs(roots) > 1.0 + tol))


def step_bound(model: ArxModel, coef_bound: float | None = None) -> float:
    """Largest admissible quantization step for this model, 1/(2*(1 + p*c)).

    ``coef_bound`` defaults to the smallest bound covering the model's
    coefficients.
    """
    c = model.coefficient_bound() if coef_bound is None else coef_bound
    if c <= 0.0:
        raise ValueError(f"coefficient bound must be positive, got {c}")
    if not model.check_coefficients(c):
        raise ValueError(f"coefficient bound {c} does not cover the model coefficients")
    return 1.0 / (2.0 * (1.0 + model.ar_order * c))


def satisfies_step_bound(model: ArxModel, q: Quantizer, coef_bound: float | None = None) -> bool:
    """True iff the quantizer step is strictly below :func:`step_bound`."""
    return q.epsilon < step_bound(model, coef_bound)
