import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from optsample.estimator import SamplingSchedule
from optsample.signals import Multisine, eval_multisine, regressor_phi
from optsample.systems import (
    RationalTransferFunction,
    freq_response,
    simulate_measurements,
    steady_state_output,
    true_theta,
)


@st.composite
def stable_plants(draw):
    # real poles and complex pairs with negative real part
    n_real = draw(st.integers(0, 2))
    n_pair = draw(st.integers(0, 2))
    if n_real + n_pair == 0:
        n_real = 1
    den = np.poly1d([1.0])
    for _ in range(n_real):
        den *= np.poly1d([1.0, draw(st.floats(0.1, 10.0))])
    for _ in range(n_pair):
        a, b = draw(st.floats(0.1, 5.0)), draw(st.floats(0.1, 20.0))
        den *= np.poly1d([1.0, 2 * a, a * a + b * b])
    deg = den.order
    num = [draw(st.floats(-5.0, 5.0)) for _ in range(draw(st.integers(1, deg + 1)))]
    if not any(num):
        num[0] = 1.0
    return RationalTransferFunction(num, den.coeffs[::-1])


@st.composite
def inputs(draw):
    w = draw(st.lists(st.floats(0.1, 30.0), min_size=0, max_size=4, unique=True))
    amps = [draw(st.floats(0.2, 3.0)) for _ in w]
    phases = [draw(st.floats(-3.0, 3.0)) for _ in w]
    return Multisine.from_arrays(draw(st.floats(0.2, 3.0)), w, amps, phases)


def test_sec5_dc_gain(sec5_plant):
    assert freq_response(sec5_plant, 0.0) == 2.0 + 0j


def test_sec5_unit_frequency(sec5_plant):
    # 2 / ((j)^2 + 2j + 1) = 2 / (2j) = -j
    g = freq_response(sec5_plant, 1.0)
    assert g == pytest.approx(-1j, abs=1e-15)
    assert abs(g) == pytest.approx(1.0)
    assert np.angle(g) == pytest.approx(-np.pi / 2)


@given(G=stable_plants(), w=st.floats(-100.0, 100.0))
def test_conjugate_symmetry(G, w):
    g = freq_response(G, w)
    assert freq_response(G, -w) == pytest.approx(np.conj(g), rel=1e-14, abs=1e-300)


@pytest.mark.parametrize(
    "num, den",
    [([1.0], [0.0]), ([1.0, 1.0, 1.0], [1.0, 1.0]), ([1.0], [-1.0, 1.0]), ([1.0], [1.0, 0.0, 1.0]), ([1.0], [0.0, 1.0])],
)
def test_invalid_plants_rejected(num, den):
    with pytest.raises(ValueError):
        RationalTransferFunction(num, den)


def test_true_theta_layout(sec5_plant, sec5_basis):
    th = true_theta(sec5_plant, sec5_basis)
    assert th[0] == 2.0
    np.testing.assert_allclose(th[1::2], np.conj(th[2::2]), rtol=1e-15)
    expected = [freq_response(sec5_plant, b) for b in sec5_basis.betas]
    np.testing.assert_allclose(th, expected, rtol=0, atol=0)
    assert np.linalg.norm(th) == pytest.approx(np.linalg.norm(expected))


def test_constant_input_gives_dc(sec5_plant):
    u = Multisine(1.0, [])
    np.testing.assert_allclose(steady_state_output(sec5_plant, u, np.linspace(0, 10, 7)), 2.0)


def test_identity_plant_passes_input(sec5_input):
    G = RationalTransferFunction([1.0], [1.0])
    t = np.linspace(0, 5, 13)
    np.testing.assert_allclose(steady_state_output(G, sec5_input, t), eval_multisine(sec5_input, t), atol=1e-14)


def test_sec5_output_matches_regression_path(sec5_plant, sec5_input):
    t = 1.3
    direct = steady_state_output(sec5_plant, sec5_input, t)
    via_regressor = (regressor_phi(sec5_input, t) @ true_theta(sec5_plant, sec5_input.basis)).real
    assert direct == pytest.approx(via_regressor, rel=1e-10)


@given(G=stable_plants(), u=inputs(), t=st.floats(0.0, 10.0))
@settings(max_examples=150)
def test_output_equals_regression_model(G, u, t):
    direct = steady_state_output(G, u, t)
    theta = true_theta(G, u.basis)
    phi_theta = regressor_phi(u, t) @ theta
    assert abs(phi_theta.imag) <= 1e-10 * max(1.0, np.abs(regressor_phi(u, t)) @ np.abs(theta))
    assert direct == pytest.approx(phi_theta.real, rel=1e-10, abs=1e-10)


def test_noise_free_measurements(sec5_plant, sec5_input):
    sched = SamplingSchedule(np.linspace(0, 5, 20), 5.0)
    rec = simulate_measurements(sec5_plant, sec5_input, sched, 0.0, seed=3)
    np.testing.assert_array_equal(rec.y, steady_state_output(sec5_plant, sec5_input, sched.times))


@pytest.mark.parametrize("noise", ["gaussian", "uniform"])
def test_measurements_deterministic(sec5_plant, sec5_input, noise):
    sched = SamplingSchedule(np.linspace(0, 5, 20), 5.0)
    a = simulate_measurements(sec5_plant, sec5_input, sched, 0.3, seed=11, noise=noise)
    b = simulate_measurements(sec5_plant, sec5_input, sched, 0.3, seed=11, noise=noise)
    np.testing.assert_array_equal(a.y, b.y)
    c = simulate_measurements(sec5_plant, sec5_input, sched, 0.3, seed=12, noise=noise)
    assert not np.array_equal(a.y, c.y)


def test_negative_sigma_rejected(sec5_plant, sec5_input):
    with pytest.raises(ValueError):
        simulate_measurements(sec5_plant, sec5_input, SamplingSchedule([0.0], 1.0), -0.1)


@pytest.mark.parametrize("noise", ["gaussian", "uniform"])
def test_noise_moments(sec5_plant, sec5_input, noise):
    sigma, n = 0.5, 100_000
    sched = SamplingSchedule(np.full(n, 0.25), 1.0)
    rec = simulate_measurements(sec5_plant, sec5_input, sched, sigma, seed=5, noise=noise)
    e = rec.y - steady_state_output(sec5_plant, sec5_input, 0.25)
    assert abs(e.mean()) <= 4 * sigma / np.sqrt(n)
    assert e.std() == pytest.approx(sigma, rel=0.02)
