import numpy as np
import pytest

from qarx.model import ArxModel, InputSpec, Quantizer, Trajectory, quantize_trajectory, simulate


@pytest.fixture
def arx21() -> ArxModel:
    """Benchmark system: AR order 2, exogenous order 1, unit noise."""
    return ArxModel(a=(0.7, 0.1), b=(1.0,), noise_std=1.0)


@pytest.fixture
def make_quantized(arx21):
    """Factory for quantized benchmark trajectories."""

    def factory(delta=3.0, epsilon=0.001, horizon=200, seed=0, model=None):
        model = arx21 if model is None else model
        traj = simulate(model, InputSpec(delta), horizon, seed)
        return quantize_trajectory(traj, Quantizer(epsilon))

    return factory


def manual_trajectory(u, w, y, s=None, epsilon_used=None) -> Trajectory:
    """Trajectory with hand-picked signals for small worked examples."""
    return Trajectory(
        u=np.asarray(u, dtype=float),
        w=np.asarray(w, dtype=float),
        y=np.asarray(y, dtype=float),
        s=None if s is None else np.asarray(s, dtype=float),
        epsilon_used=epsilon_used,
    )
