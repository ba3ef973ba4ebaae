import cmath

import numpy as np
import pytest
from numpy.testing import assert_allclose, assert_array_equal

from conftest import manual_trajectory
from oracles import reference_arx_outputs
from qarx.model import (
    ArxModel,
    InputSpec,
    Quantizer,
    check_stability,
    lagged_matrix,
    quantization_noise_bound,
    quantization_noise_sequence,
    quantize_trajectory,
    response,
    satisfies_step_bound,
    simulate,
    step_bound,
)


# model validation ----------------------------------------------------------

def test_model_requires_exogenous_part():
    with pytest.raises(ValueError):
        ArxModel(a=[0.5], b=[])


def test_model_rejects_zero_trailing_coefficients():
    with pytest.raises(ValueError):
        ArxModel(a=[0.5, 0.0], b=[1.0])
    with pytest.raises(ValueError):
        ArxModel(a=[0.5], b=[1.0, 0.0])


def test_model_rejects_negative_noise_std():
    with pytest.raises(ValueError):
        ArxModel(a=[], b=[1.0], noise_std=-0.1)


def test_coefficient_bound(arx21):
    assert arx21.coefficient_bound() == 1.0
    assert arx21.check_coefficients(1.0)
    assert not arx21.check_coefficients(0.9)


def test_step_bound(arx21):
    assert step_bound(arx21) == pytest.approx(1.0 / 6.0, rel=1e-15)
    assert satisfies_step_bound(arx21, Quantizer(0.001))
    assert not satisfies_step_bound(arx21, Quantizer(0.2))
    with pytest.raises(ValueError):
        step_bound(arx21, coef_bound=0.5)


# simulation ----------------------------------------------------------------

def test_passthrough_identity():
    model = ArxModel(a=[], b=[1.0], noise_std=0.0)
    u = np.array([0.3, -1.2, 2.5, 0.0, 4.0])
    traj = response(model, u, np.zeros(5))
    assert traj.y[0] == 0.0
    assert_array_equal(traj.y[1:], u)


def test_zero_streams_give_zero_output(arx21):
    traj = response(arx21, np.zeros(50), np.zeros(50))
    assert_array_equal(traj.y, np.zeros(51))


def test_matches_reference_recursion():
    model = ArxModel(a=[0.4, -0.2, 0.05], b=[1.0, -0.5], noise_std=1.0)
    rng = np.random.default_rng(17)
    u = rng.uniform(-2, 2, size=300)
    w = rng.normal(size=300)
    traj = response(model, u, w)
    assert_allclose(traj.y, reference_arx_outputs(model.a, model.b, u, w), rtol=1e-12, atol=1e-12)


def test_seed_determinism(arx21):
    t1 = simulate(arx21, InputSpec(3.0), 400, 123)
    t2 = simulate(arx21, InputSpec(3.0), 400, 123)
    assert_array_equal(t1.u, t2.u)
    assert_array_equal(t1.w, t2.w)
    assert_array_equal(t1.y, t2.y)
    t3 = simulate(arx21, InputSpec(3.0), 400, 124)
    assert not np.array_equal(t1.y, t3.y)


def test_input_law_and_noise_law(arx21):
    traj = simulate(arx21, InputSpec(3.0), 20_000, 5)
    assert np.all(np.abs(traj.u) <= 3.0)
    assert abs(traj.u.mean()) < 0.05
    assert abs(traj.w.mean()) < 0.03
    assert traj.w.std() == pytest.approx(1.0, abs=0.02)


def test_mean_square_output_stays_bounded(arx21):
    # stable dynamics: the running mean of y^2 settles to a finite level
    traj = simulate(arx21, InputSpec(3.0), 5000, 21)
    mean_sq = np.cumsum(traj.y**2) / (np.arange(len(traj.y)) + 1)
    assert mean_sq[-1] < 20.0
    assert abs(mean_sq[-1] - mean_sq[2500]) < 1.0


def test_rejects_zero_horizon(arx21):
    with pytest.raises(ValueError):
        simulate(arx21, InputSpec(3.0), 0, 0)


def test_trajectory_shape_validation():
    with pytest.raises(ValueError):
        manual_trajectory(u=[1.0, 2.0], w=[0.0], y=[0.0, 0.0, 0.0])
    with pytest.raises(ValueError):
        manual_trajectory(u=[1.0], w=[0.0], y=[0.0])


def test_trajectory_arrays_are_frozen(arx21):
    traj = simulate(arx21, InputSpec(1.0), 10, 0)
    with pytest.raises(ValueError):
        traj.y[0] = 1.0


# quantization noise --------------------------------------------------------

def test_noise_bound_values(arx21):
    assert quantization_noise_bound(arx21, Quantizer(0.001)) == pytest.approx(0.0009, rel=1e-12)
    assert quantization_noise_bound(arx21, Quantizer(0.002)) == pytest.approx(0.0018, rel=1e-12)
    pure_exo = ArxModel(a=[], b=[2.0])
    assert quantization_noise_bound(pure_exo, Quantizer(0.01)) == pytest.approx(0.005, rel=1e-12)


def test_noise_sequence_zero_trajectory(arx21):
    traj = manual_trajectory(
        u=np.zeros(5), w=np.zeros(5), y=np.zeros(6), s=np.zeros(6), epsilon_used=0.1
    )
    assert_array_equal(quantization_noise_sequence(traj, arx21), np.zeros(5))


def test_noise_sequence_within_bound(arx21, make_quantized):
    for seed in range(4):
        traj = make_quantized(delta=3.0, epsilon=0.001, horizon=1000, seed=seed)
        seq = quantization_noise_sequence(traj, arx21)
        assert seq.shape == (1000,)
        assert np.max(np.abs(seq)) <= quantization_noise_bound(arx21, Quantizer(0.001))


def test_noise_sequence_vanishes_with_step(arx21, make_quantized):
    traj = make_quantized(delta=3.0, epsilon=1e-12, horizon=500, seed=3)
    seq = quantization_noise_sequence(traj, arx21)
    assert np.max(np.abs(seq)) <= 1e-11


def test_noise_sequence_requires_quantized(arx21):
    traj = simulate(arx21, InputSpec(3.0), 10, 0)
    with pytest.raises(ValueError):
        quantization_noise_sequence(traj, arx21)


# stability -----------------------------------------------------------------

def test_stability_examples(arx21):
    assert check_stability(arx21)  # roots -2 and -5
    assert check_stability(ArxModel(a=[], b=[1.0]))
    assert not check_stability(ArxModel(a=[-1.0], b=[1.0]))  # root exactly on the circle


def test_stability_matches_closed_form_for_low_orders():
    rng = np.random.default_rng(8)
    for _ in range(200):
        order = int(rng.integers(1, 3))
        coeffs = rng.uniform(-1.5, 1.5, size=order)
        if coeffs[-1] == 0.0:
            continue
        model = ArxModel(a=coeffs, b=[1.0])
        if order == 1:
            stable = abs(-1.0 / coeffs[0]) > 1.0 + 1e-9
        else:
            c1, c2 = coeffs
            disc = cmath.sqrt(c1 * c1 - 4.0 * c2)
            roots = [(-c1 + disc) / (2.0 * c2), (-c1 - disc) / (2.0 * c2)]
            stable = all(abs(r) > 1.0 + 1e-9 for r in roots)
        assert check_stability(model) == stable


# lagged matrix helper ------------------------------------------------------

def test_lagged_matrix_layout():
    series = np.array([1.0, 2.0, 3.0, 4.0])
    out = lagged_matrix(series, 4, 3)
    expected = np.array(
        [[1.0, 0.0, 0.0], [2.0, 1.0, 0.0], [3.0, 2.0, 1.0], [4.0, 3.0, 2.0]]
    )
    assert_array_equal(out, expected)
    assert lagged_matrix(series, 3, 0).shape == (3, 0)
