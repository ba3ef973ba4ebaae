"""Configuration-driven Monte Carlo order-estimation experiments.

A config describes one input law, one quantizer step, and one order-grid
bound; every trial simulates a fresh seeded trajectory, quantizes it, and
records the order estimates at each requested sample count. Artifacts are
plain CSV plus a JSON echo of the resolved configuration, written
atomically (temp file then rename) so partial output can never be mistaken
for a complete run.
"""

from __future__ import annotations

import io
import json
import math
import os
import tempfile
import warnings
from collections import Counter
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, NamedTuple

from .criterion import OrderCheckpoint, PenaltyHypothesis, PenaltySchedule, order_trajectories
from .model import ArxModel, InputSpec, Quantizer, check_stability, quantize_trajectory, simulate, step_bound

__all__ = [
    "ConfigError",
    "ExperimentConfig",
    "TrialResult",
    "OrderRecord",
    "SummaryRow",
    "load_config",
    "config_to_dict",
    "run_experiment",
    "write_results",
    "records_from_results",
    "read_orders",
    "summarize",
    "format_summary",
    "write_summary",
]

_MODEL_KEYS = {"a", "b", "noise_std"}
_CONFIG_KEYS = {
    "model",
    "input_delta",
    "epsilon",
    "p_star",
    "q_star",
    "slope_l",
    "slope_v",
    "horizon",
    "checkpoints",
    "trials",
    "base_seed",
    "output_dir",
    "coef_bound",
    "write_criteria",
    "hypothesis",
}
_HYPOTHESIS_KEYS = {
    "coef_bound",
    "max_ar_order",
    "max_exo_order",
    "step",
    "excitation_floor_ar",
    "excitation_floor_exo",
    "growth_cap_ar",
    "growth_cap_exo",
    "error_cap_ar",
    "error_cap_exo",
    "trailing_ar_sq",
    "trailing_exo_sq",
    "lower_margin_ar",
    "lower_margin_exo",
    "upper_shrink_ar",
    "upper_shrink_exo",
}

ORDERS_HEADER = "trial,seed,n,p_hat,q_hat"
CRITERIA_HEADER = "trial,n,axis,order,sigma,criterion"
SUMMARY_HEADER = "n,modal_p,frac_p,modal_q,frac_q"


class ConfigError(ValueError):
    """Invalid experiment configuration."""


@dataclass(frozen=True)
class ExperimentConfig:
    """Resolved experiment configuration.

    Field names double as the config-file keys. ``coef_bound`` defaults to
    the smallest bound covering the model coefficients; ``hypothesis`` is
    only consulted by the feasibility report.
    """

    model: ArxModel
    input_delta: float
    epsilon: float
    p_star: int
    q_star: int
    slope_l: float
    slope_v: float
    horizon: int
    checkpoints: tuple[int, ...]
    trials: int
    base_seed: int
    output_dir: str
    coef_bound: float | None = None
    write_criteria: bool = True
    hypothesis: PenaltyHypothesis | None = None

    def __post_init__(self):
        self.validate()

    def validate(self) -> None:
        if not (math.isfinite(self.input_delta) and self.input_delta > 0):
            raise ConfigError(f"input_delta must be positive, got {self.input_delta}")
        if not (math.isfinite(self.epsilon) and self.epsilon > 0):
            raise ConfigError(f"epsilon must be positive, got {self.epsilon}")
        if self.p_star < 1:
            raise ConfigError(f"p_star must be at least 1, got {self.p_star}")
        if self.q_star < 1:
            raise ConfigError(f"q_star must be at least 1, got {self.q_star}")
        for name in ("slope_l", "slope_v"):
            slope = getattr(self, name)
            if not (math.isfinite(slope) and slope > 0):
                raise ConfigError(f"{name} must be positive, got {slope}")
        if self.horizon < 1:
            raise ConfigError(f"horizon must be at least 1, got {self.horizon}")
        if any(n < 1 for n in self.checkpoints):
            raise ConfigError("checkpoints must be at least 1")
        if any(b <= a for a, b in zip(self.checkpoints, self.checkpoints[1:])):
            raise ConfigError("checkpoints must be strictly increasing")
        if self.checkpoints and self.checkpoints[-1] > self.horizon:
            raise ConfigError(
                f"largest checkpoint {self.checkpoints[-1]} exceeds horizon {self.horizon}"
            )
        if self.trials < 1:
            raise ConfigError(f"trials must be at least 1, got {self.trials}")
        if self.coef_bound is not None and not self.model.check_coefficients(self.coef_bound):
            raise ConfigError(
                f"coef_bound {self.coef_bound} does not cover the model coefficients"
            )
        if not check_stability(self.model):
            warnings.warn("AR polynomial has a root inside the closed unit disk", stacklevel=2)
        if self.epsilon >= step_bound(self.model, self.coef_bound):
            warnings.warn(
                f"epsilon {self.epsilon} is not below the admissible step bound "
                f"{step_bound(self.model, self.coef_bound)}",
                stacklevel=2,
            )


def _require_keys(block: dict, allowed: set[str], where: str) -> None:
    unknown = set(block) - allowed
    if unknown:
        raise ConfigError(f"unknown key(s) in {where}: {', '.join(sorted(unknown))}")


def _config_from_dict(raw: dict) -> ExperimentConfig:
    if not isinstance(raw, dict):
        raise ConfigError("config document must be a JSON object")
    _require_keys(raw, _CONFIG_KEYS, "config")
    missing = (_CONFIG_KEYS - {"coef_bound", "write_criteria", "hypothesis"}) - set(raw)
    if missing:
        raise ConfigError(f"missing config key(s): {', '.join(sorted(missing))}")

    model_block = raw["model"]
    if not isinstance(model_block, dict):
        raise ConfigError("model must be an object with keys a, b, noise_std")
    _require_keys(model_block, _MODEL_KEYS, "model")
    if "a" not in model_block or "b" not in model_block:
        raise ConfigError("model requires keys a and b")
    try:
        model = ArxModel(
            a=model_block["a"],
            b=model_block["b"],
            noise_std=model_block.get("noise_std", 1.0),
        )
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"invalid model: {exc}") from exc

    hypothesis = None
    if raw.get("hypothesis") is not None:
        block = raw["hypothesis"]
        if not isinstance(block, dict):
            raise ConfigError("hypothesis must be an object")
        _require_keys(block, _HYPOTHESIS_KEYS, "hypothesis")
        missing = _HYPOTHESIS_KEYS - set(block)
        if missing:
            raise ConfigError(f"missing hypothesis key(s): {', '.join(sorted(missing))}")
        try:
            hypothesis = PenaltyHypothesis(**block)
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"invalid hypothesis: {exc}") from exc

    try:
        return ExperimentConfig(
            model=model,
            input_delta=float(raw["input_delta"]),
            epsilon=float(raw["epsilon"]),
            p_star=int(raw["p_star"]),
            q_star=int(raw["q_star"]),
            slope_l=float(raw["slope_l"]),
            slope_v=float(raw["slope_v"]),
            horizon=int(raw["horizon"]),
            checkpoints=tuple(int(n) for n in raw["checkpoints"]),
            trials=int(raw["trials"]),
            base_seed=int(raw["base_seed"]),
            output_dir=str(raw["output_dir"]),
            coef_bound=None if raw.get("coef_bound") is None else float(raw["coef_bound"]),
            write_criteria=bool(raw.get("write_criteria", True)),
            hypothesis=hypothesis,
        )
    except (TypeError, ValueError) as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(f"invalid config value: {exc}") from exc


def load_config(path: str | Path) -> ExperimentConfig:
    """Parse and validate a JSON config file; unknown keys are an error."""
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
    return _config_from_dict(raw)


def config_to_dict(config: ExperimentConfig) -> dict:
    """Full provenance echo: every field that affected the run, defaults included."""
    out = {
        "model": {
            "a": list(config.model.a),
            "b": list(config.model.b),
            "noise_std": config.model.noise_std,
        },
        "input_delta": config.input_delta,
        "epsilon": config.epsilon,
        "p_star": config.p_star,
        "q_star": config.q_star,
        "slope_l": config.slope_l,
        "slope_v": config.slope_v,
        "horizon": config.horizon,
        "checkpoints": list(config.checkpoints),
        "trials": config.trials,
        "base_seed": config.base_seed,
        "output_dir": config.output_dir,
        "coef_bound": config.coef_bound,
        "write_criteria": config.write_criteria,
        "hypothesis": None if config.hypothesis is None else vars(config.hypothesis).copy(),
    }
    return out


@dataclass(frozen=True)
class TrialResult:
    """Per-trial outcome: one order-estimate record per checkpoint."""

    trial: int
    seed: int
    checkpoints: tuple[OrderCheckpoint, ...]


def run_experiment(config: ExperimentConfig) -> list[TrialResult]:
    """Run all trials serially; trial k uses seed base_seed + k.

    Each trial simulates under the config's input law, quantizes the
    outputs, and evaluates both order selectors at every checkpoint.
    Deterministic given the config.
    """
    spec = InputSpec(config.input_delta)
    quantizer = Quantizer(config.epsilon)
    results = []
    for k in range(config.trials):
        seed = config.base_seed + k
        traj = quantize_trajectory(
            simulate(config.model, spec, config.horizon, seed), quantizer
        )
        if config.checkpoints:
            checkpoints = order_trajectories(
                traj,
                config.p_star,
                config.q_star,
                PenaltySchedule(config.slope_l),
                PenaltySchedule(config.slope_v),
                list(config.checkpoints),
            )
        else:
            checkpoints = []
        results.append(TrialResult(trial=k, seed=seed, checkpoints=tuple(checkpoints)))
    return results


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def _atomic_write(path: Path, text: str) -> None:
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as handle:
            handle.write(text)
        os.replace(tmp, path)
    except OSError:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_results(results: list[TrialResult], config: ExperimentConfig) -> dict[str, Path]:
    """Write orders.csv, criteria.csv (when enabled), and config.json.

    Rows are ordered by (trial, n); floats are printed with 17 significant
    digits so re-parsing is lossless. Files are replaced atomically.
    """
    if not results:
        raise ValueError("write_results needs at least one trial result")
    out_dir = Path(config.output_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    paths = {}

    buf = io.StringIO()
    buf.write(ORDERS_HEADER + "\n")
    for result in sorted(results, key=lambda r: r.trial):
        for cp in result.checkpoints:
            buf.write(f"{result.trial},{result.seed},{cp.n},{cp.ar_estimate},{cp.exo_estimate}\n")
    paths["orders"] = out_dir / "orders.csv"
    _atomic_write(paths["orders"], buf.getvalue())

    if config.write_criteria:
        buf = io.StringIO()
        buf.write(CRITERIA_HEADER + "\n")
        for result in sorted(results, key=lambda r: r.trial):
            for cp in result.checkpoints:
                for table in (cp.ar_table, cp.exo_table):
                    for order in sorted(table.rows):
                        row = table.rows[order]
                        buf.write(
                            f"{result.trial},{cp.n},{table.axis},{order},"
                            f"{_fmt(row.sigma)},{_fmt(row.value)}\n"
                        )
        paths["criteria"] = out_dir / "criteria.csv"
        _atomic_write(paths["criteria"], buf.getvalue())

    paths["config"] = out_dir / "config.json"
    _atomic_write(paths["config"], json.dumps(config_to_dict(config), indent=2) + "\n")
    return paths


class OrderRecord(NamedTuple):
    trial: int
    seed: int
    n: int
    p_hat: int
    q_hat: int


class SummaryRow(NamedTuple):
    n: int
    modal_p: int
    frac_p: float
    modal_q: int
    frac_q: float


def records_from_results(results: Iterable[TrialResult]) -> list[OrderRecord]:
    records = []
    for result in results:
        for cp in result.checkpoints:
            records.append(
                OrderRecord(result.trial, result.seed, cp.n, cp.ar_estimate, cp.exo_estimate)
            )
    return records


def read_orders(path: str | Path) -> list[OrderRecord]:
    """Re-parse an orders.csv written by :func:`write_results`."""
    path = Path(path)
    lines = path.read_text().splitlines()
    if not lines or lines[0] != ORDERS_HEADER:
        raise ValueError(f"{path} does not look like an orders table")
    records = []
    for line in lines[1:]:
        trial, seed, n, p_hat, q_hat = line.split(",")
        records.append(OrderRecord(int(trial), int(seed), int(n), int(p_hat), int(q_hat)))
    return records


def _mode(values: list[int]) -> tuple[int, float]:
    counts = Counter(values)
    top = max(counts.values())
    modal = min(v for v, c in counts.items() if c == top)
    return modal, top / len(values)


def summarize(records: Iterable[OrderRecord]) -> list[SummaryRow]:
    """Per checkpoint: modal order estimates and the fraction attaining them.

    An empty record set yields an empty summary.
    """
    by_n: dict[int, list[OrderRecord]] = {}
    for record in records:
        by_n.setdefault(record.n, []).append(record)
    rows = []
    for n in sorted(by_n):
        group = by_n[n]
        modal_p, frac_p = _mode([r.p_hat for r in group])
        modal_q, frac_q = _mode([r.q_hat for r in group])
        rows.append(SummaryRow(n, modal_p, frac_p, modal_q, frac_q))
    return rows


def format_summary(rows: list[SummaryRow]) -> str:
    out = [f"{'n':>8}  {'modal p':>8}  {'frac':>6}  {'modal q':>8}  {'frac':>6}"]
    for row in rows:
        out.append(
            f"{row.n:>8}  {row.modal_p:>8}  {row.frac_p:>6.3f}  "
            f"{row.modal_q:>8}  {row.frac_q:>6.3f}"
        )
    return "\n".join(out)


def write_summary(rows: list[SummaryRow], out_dir: str | Path) -> Path:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    buf = io.StringIO()
    buf.write(SUMMARY_HEADER + "\n")
    for row in rows:
        buf.write(
            f"{row.n},{row.modal_p},{_fmt(row.frac_p)},{row.modal_q},{_fmt(row.frac_q)}\n"
        )
    path = out_dir / "summary.csv"
    _atomic_write(path, buf.getvalue())
    return path
