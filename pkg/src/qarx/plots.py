"""Figure rendering for experiment output.

Consumes the CSV artifacts written by the harness (the CSV stays the
source of truth) and renders the per-trial order-estimate trajectories to
PNG files next to them: one figure for the AR order, one for the
exogenous order, each showing every trial as a step line over the sample
count with the true order marked when the config echo is available.
"""

from __future__ import annotations

import json
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .experiment import OrderRecord, read_orders

__all__ = ["render_order_plots"]


def _trial_series(records: list[OrderRecord], field: str) -> dict[int, tuple[list[int], list[int]]]:
    series: dict[int, tuple[list[int], list[int]]] = {}
    for record in sorted(records, key=lambda r: (r.trial, r.n)):
        xs, ys = series.setdefault(record.trial, ([], []))
        xs.append(record.n)
        ys.append(getattr(record, field))
    return series


def _true_orders(run_dir: Path) -> tuple[int | None, int | None]:
    config_path = run_dir / "config.json"
    if not config_path.exists():
        return None, None
    try:
        raw = json.loads(config_path.read_text())
        return len(raw["model"]["a"]), len(raw["model"]["b"])
    except (json.JSONDecodeError, KeyError, TypeError):
        return None, None


def _render_axis(
    records: list[OrderRecord],
    field: str,
    ylabel: str,
    true_order: int | None,
    path: Path,
) -> None:
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    for xs, ys in _trial_series(records, field).values():
        ax.step(xs, ys, where="post", alpha=0.5, linewidth=1.2)
    if true_order is not None:
        ax.axhline(true_order, color="black", linestyle="--", linewidth=1.0, label="true order")
        ax.legend(loc="upper right", frameon=False)
    ax.set_xlabel("sample count n")
    ax.set_ylabel(ylabel)
    orders = [getattr(r, field) for r in records] + ([true_order] if true_order is not None else [])
    ax.set_yticks(range(min(orders), max(orders) + 1))
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def render_order_plots(run_dir: str | Path, out_dir: str | Path | None = None) -> list[Path]:
    """Render order-estimate trajectory figures from a run directory.

    Reads ``orders.csv`` (and ``config.json`` for the true orders, when
    present) and writes ``ar_order_trajectories.png`` and
    ``exo_order_trajectories.png`` into ``out_dir`` (default: the run
    directory). Returns the written paths.
    """
    run_dir = Path(run_dir)
    out_dir = run_dir if out_dir is None else Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    records = read_orders(run_dir / "orders.csv")
    if not records:
        raise ValueError(f"no order records in {run_dir / 'orders.csv'}")
    true_p, true_q = _true_orders(run_dir)
    paths = []
    for field, ylabel, true_order, name in (
        ("p_hat", "estimated AR order", true_p, "ar_order_trajectories.png"),
        ("q_hat", "estimated exogenous order", true_q, "exo_order_trajectories.png"),
    ):
        path = out_dir / name
        _render_axis(records, field, ylabel, true_order, path)
        paths.append(path)
    return paths
