import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from kuramoto_moments.coupling import CouplingFunction
from kuramoto_moments.errors import NonFiniteStateError
from kuramoto_moments.measures import UniformFrequency
from kuramoto_moments.orthopoly import eval_polys, recurrence_coefficients
from kuramoto_moments.oscillators import (OscillatorState, default_dt, empirical_lattice,
                                          empirical_moment, integrate, integrate_at,
                                          moment_identity_residual, order_parameter, pairwise_rhs,
                                          rhs)

DAIDO = CouplingFunction.from_sin_cos(sin={1: 0.8, 3: -0.25}, cos={0: 0.1, 2: 0.4})


def daido_direct(x):
    return 0.8 * np.sin(x) - 0.25 * np.sin(3 * x) + 0.1 + 0.4 * np.cos(2 * x)


def circ_dist(a, b):
    return np.abs(np.angle(np.exp(1j * (a - b))))


# ------------------------------------------------------------- coupling


def test_sine_coupling_values():
    f = CouplingFunction.sine()
    x = np.linspace(-7, 7, 101)
    np.testing.assert_allclose(f(x), np.sin(x), atol=1e-15)
    np.testing.assert_allclose(f.derivative(x), np.cos(x), atol=1e-15)
    assert f.is_sine()
    assert f.sup_norm() == pytest.approx(1.0, abs=1e-8)
    assert f.lipschitz() == pytest.approx(1.0, abs=1e-8)


def test_daido_coupling_values():
    x = np.linspace(-7, 7, 101)
    np.testing.assert_allclose(DAIDO(x), daido_direct(x), atol=1e-14)
    fc = DAIDO.fourier()
    for l, c in fc.items():
        assert fc[-l] == pytest.approx(np.conj(c))


def test_from_fourier_rejects_nonreal():
    with pytest.raises(ValueError):
        CouplingFunction.from_fourier({1: 0.5j, -1: 0.5j})
    f = CouplingFunction.from_fourier({1: 1 / 2j, -1: -1 / 2j})
    assert f.is_sine()


# ------------------------------------------------------------- order parameter / rhs


def test_order_parameter_examples():
    assert order_parameter(OscillatorState([0.0], [0.0])) == 1 + 0j
    z = order_parameter(OscillatorState([0, np.pi / 2, np.pi, 3 * np.pi / 2], np.zeros(4)))
    assert abs(z) < 1e-15
    z = order_parameter(OscillatorState([0, np.pi / 2], [0, 0]))
    assert z == pytest.approx((1 + 1j) / 2, abs=1e-15)
    assert abs(z) == pytest.approx(np.sqrt(2) / 2)


def test_phases_reduced():
    s = OscillatorState([-1.0, 7.0, 2 * np.pi], [0, 0, 0])
    assert np.all((s.theta >= 0) & (s.theta < 2 * np.pi))


def test_rhs_examples():
    s = OscillatorState([0.3, 1.1, 4.0], [0.5, -1.0, 2.0], K=0.0)
    np.testing.assert_array_equal(rhs(s), s.omega)
    s = OscillatorState([0.0, np.pi / 2], [0.0, 0.0], K=1.0)
    np.testing.assert_allclose(rhs(s), [0.5, -0.5], atol=1e-15)
    s = OscillatorState(np.full(5, 2.2), np.arange(5.0), K=3.0)
    np.testing.assert_allclose(rhs(s), s.omega, atol=1e-14)


@pytest.mark.parametrize("N", [1, 2, 17, 200])
@pytest.mark.parametrize("coupling,direct", [(CouplingFunction.sine(), np.sin), (DAIDO, daido_direct)],
                         ids=["sin", "daido"])
def test_mean_field_matches_pairwise(N, coupling, direct, rng):
    theta = rng.uniform(0, 2 * np.pi, N)
    omega = rng.normal(size=N)
    s = OscillatorState(theta, omega, K=1.7, coupling=coupling)
    oracle = omega + 1.7 / N * np.array([direct(theta - theta[i]).sum() for i in range(N)])
    np.testing.assert_allclose(rhs(s), oracle, rtol=0, atol=1e-12)
    np.testing.assert_allclose(pairwise_rhs(s), oracle, rtol=0, atol=1e-12)


@given(theta=arrays(float, st.integers(1, 60), elements=st.floats(-50, 50)),
       K=st.floats(0, 10), seed=st.integers(0, 1000))
@settings(max_examples=60, deadline=None)
def test_property_mean_field_equals_pairwise(theta, K, seed):
    omega = np.random.default_rng(seed).normal(size=theta.size)
    s = OscillatorState(theta, omega, K=K, coupling=DAIDO)
    np.testing.assert_allclose(rhs(s), pairwise_rhs(s), rtol=0, atol=1e-12 * max(1.0, K))


# ------------------------------------------------------------- integration


def test_linear_flow_exact():
    theta0 = np.array([0.1, 2.0, 5.5])
    omega = np.array([1.0, -0.5, 0.25])
    traj = integrate(OscillatorState(theta0, omega, K=0.0), t_end=3.0, dt=0.01)
    np.testing.assert_allclose(circ_dist(traj.final.theta, theta0 + 3.0 * omega), 0, atol=1e-12)
    assert traj.times[-1] == 3.0
    assert np.all(np.diff(traj.times) > 0)


def test_two_oscillators_closed_form():
    # Delta = theta_2 - theta_1 obeys Delta' = -K sin Delta: tan(Delta/2) = tan(Delta0/2) e^{-Kt}
    K, d0 = 1.0, np.pi - 0.1
    traj = integrate(OscillatorState([0.0, d0], [0.0, 0.0], K=K), t_end=6.0, dt=1e-3)
    t = traj.times
    exact = 2 * np.arctan(np.tan(d0 / 2) * np.exp(-K * t))
    delta = np.angle(np.exp(1j * (traj.thetas[:, 1] - traj.thetas[:, 0])))
    np.testing.assert_allclose(delta, exact, atol=1e-10)
    assert np.all(np.diff(np.abs(delta)) < 0)
    # the mean phase is conserved for identical oscillators
    mean = np.angle(np.exp(1j * traj.thetas).sum(axis=1))
    np.testing.assert_allclose(circ_dist(mean, d0 / 2), 0, atol=1e-10)


def test_rk4_fourth_order(rng):
    s = OscillatorState(rng.uniform(0, 2 * np.pi, 30), rng.normal(size=30), K=2.0)
    ref = integrate(s, 2.0, dt=0.0025).final.theta
    errs = [np.max(circ_dist(integrate(s, 2.0, dt=dt).final.theta, ref)) for dt in (0.08, 0.04)]
    assert 10 < errs[0] / errs[1] < 22


def test_integrate_is_deterministic(rng):
    s = OscillatorState(rng.uniform(0, 2 * np.pi, 50), rng.normal(size=50), K=1.5, coupling=DAIDO)
    a = integrate(s, 1.0, dt=0.01).thetas
    b = integrate(s, 1.0, dt=0.01).thetas
    assert np.array_equal(a, b)


def test_integrate_at_agrees_with_integrate(rng):
    s = OscillatorState(rng.uniform(0, 2 * np.pi, 20), rng.normal(size=20), K=1.0)
    full = integrate(s, 2.0, dt=0.01, stride=100)
    at = integrate_at(s, [0.0, 1.0, 2.0], dt=0.01)
    np.testing.assert_allclose(circ_dist(full.thetas, at.thetas), 0, atol=1e-12)


def test_batched_integration_matches_single(rng):
    theta = rng.uniform(0, 2 * np.pi, (3, 40))
    omega = rng.normal(size=(3, 40))
    batch = integrate(OscillatorState(theta, omega, K=2.0), 1.0, dt=0.01).final.theta
    for b in range(3):
        one = integrate(OscillatorState(theta[b], omega[b], K=2.0), 1.0, dt=0.01).final.theta
        np.testing.assert_allclose(circ_dist(batch[b], one), 0, atol=1e-13)


@pytest.mark.filterwarnings("ignore::RuntimeWarning")
def test_nonfinite_state_reports_step():
    with pytest.raises(NonFiniteStateError) as err:
        integrate(OscillatorState([0.0, 1.0], [np.inf, 0.0]), 1.0, dt=0.1)
    assert err.value.step == 1


def test_default_dt():
    assert default_dt(np.array([0.5, -0.2]), 0.3) == pytest.approx(1e-3 * 2 * np.pi)
    assert default_dt(np.array([4.0]), 2.0) == pytest.approx(1e-3 * 2 * np.pi / 4)


def test_csv_export(tmp_path, hermite_coeffs, rng):
    s = OscillatorState(rng.uniform(0, 2 * np.pi, 10), rng.normal(size=10))
    traj = integrate(s, 0.5, dt=0.1)
    path = traj.to_csv(tmp_path / "t.csv", hermite_coeffs, pairs=[(1, 1)])
    lines = path.read_text().splitlines()
    assert lines[0] == "t,re_Z01,im_Z01,r,re_Z1_1,im_Z1_1"
    assert len(lines) == len(traj) + 1
    row = [float(v) for v in lines[-1].split(",")]
    z = traj.order_parameter[-1]
    assert row[1] == z.real and row[2] == z.imag and row[3] == abs(z)


# ------------------------------------------------------------- moments


def test_empirical_moment_examples(hermite_coeffs, rng):
    s = OscillatorState(rng.uniform(0, 2 * np.pi, 9), rng.normal(size=9))
    assert empirical_moment(s, hermite_coeffs, 0, 0) == pytest.approx(1.0, abs=1e-15)
    assert empirical_moment(s, hermite_coeffs, 0, 1) == pytest.approx(order_parameter(s), abs=1e-15)
    s2 = OscillatorState([0.4, 1.9], [-1.0, 1.0])
    assert abs(empirical_moment(s2, hermite_coeffs, 1, 0)) < 1e-15
    for m in range(4):
        for k in range(1, 4):
            assert empirical_moment(s, hermite_coeffs, m, -k) == pytest.approx(
                np.conj(empirical_moment(s, hermite_coeffs, m, k)), abs=0)
    with pytest.raises(IndexError):
        empirical_moment(s, hermite_coeffs, 21, 0)


def test_empirical_lattice_layout(hermite_coeffs, rng):
    s = OscillatorState(rng.uniform(0, 2 * np.pi, 12), rng.normal(size=12))
    L = empirical_lattice(s, hermite_coeffs, 4, 3)
    for m in range(5):
        for k in range(4):
            assert L[m, k] == pytest.approx(empirical_moment(s, hermite_coeffs, m, k), abs=1e-14)


def test_identity_k_zero_vanishes(hermite_coeffs, rng):
    s = OscillatorState(rng.uniform(0, 2 * np.pi, 9), rng.normal(size=9), K=2.0)
    assert moment_identity_residual(s, hermite_coeffs, 2, 0) == 0.0


def test_identity_uncoupled(hermite_coeffs, rng):
    s = OscillatorState(rng.uniform(0, 2 * np.pi, 9), rng.normal(size=9), K=0.0)
    assert moment_identity_residual(s, hermite_coeffs, 0, 1) < 1e-12
    # direct substitution: dZ^0_1/dt = i (b_0 Z^1_1 + a_0 Z^0_1) with P_1 = omega
    direct = np.mean(1j * s.omega * np.exp(1j * s.theta))
    rhs_ = 1j * (hermite_coeffs.b[0] * empirical_moment(s, hermite_coeffs, 1, 1))
    assert abs(direct - rhs_) < 1e-12


def test_identity_needs_coefficients(rng):
    coeffs = recurrence_coefficients(UniformFrequency(-1, 1), 3)
    s = OscillatorState(rng.uniform(0, 2 * np.pi, 5), rng.uniform(-1, 1, 5))
    with pytest.raises(IndexError):
        moment_identity_residual(s, coeffs, 3, 1)


@given(N=st.integers(1, 120), K=st.floats(0, 5), seed=st.integers(0, 2 ** 32),
       daido=st.booleans())
@settings(max_examples=40, deadline=None)
def test_property_identity_holds(N, K, seed, daido, hermite_coeffs):
    r = np.random.default_rng(seed)
    coupling = DAIDO if daido else CouplingFunction.sine()
    s = OscillatorState(r.uniform(0, 2 * np.pi, N), r.normal(size=N), K=K, coupling=coupling)
    for m in range(4):
        for k in range(-3, 4):
            assert moment_identity_residual(s, hermite_coeffs, m, k) < 1e-10


@given(N=st.integers(1, 80), seed=st.integers(0, 2 ** 32))
@settings(max_examples=30, deadline=None)
def test_property_moment_bounds(N, seed, hermite_coeffs):
    r = np.random.default_rng(seed)
    s = OscillatorState(r.uniform(0, 2 * np.pi, N), r.normal(size=N))
    L = empirical_lattice(s, hermite_coeffs, 6, 4)
    P = eval_polys(hermite_coeffs, s.omega, 6)
    bound = np.abs(P).max(axis=1)
    assert np.all(np.abs(L) <= bound[:, None] + 1e-12)
    assert np.all(np.abs(L[0]) <= 1 + 1e-12)


def test_k0_moments_constant_along_trajectory(hermite_coeffs, rng):
    s = OscillatorState(rng.uniform(0, 2 * np.pi, 100), rng.normal(size=100), K=2.0)
    traj = integrate(s, 10.0, dt=0.01, stride=100)
    mom = traj.moments(hermite_coeffs, [(m, 0) for m in range(6)])
    assert np.max(np.abs(mom - mom[0])) < 1e-8
