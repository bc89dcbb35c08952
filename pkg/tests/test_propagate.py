"""Moment propagation: closed forms vs exact propagation vs RK4 oracle."""

import io
import math

import numpy as np
import pytest
from scipy.linalg import expm, solve_continuous_lyapunov

from lindosc.model import (
    DiffusionCoefficients,
    GaussianState,
    InitialStateSpec,
    OscillatorConfig,
    TemperatureSpec,
    initial_state,
    thermal_coefficients,
)
from lindosc.propagate import (
    TRAJECTORY_HEADER,
    Trajectory,
    asymptotic_covariance,
    closed_form_state_quantities,
    covariance_lyapunov,
    drift_matrix,
    format_float,
    integrate_moments_rk4,
    mean_closed_form,
    propagator,
    sigma_det_closed,
    sigma_pq_closed,
    steady_state_covariance,
    trajectory_lyapunov,
)


def make_cfg(lam=0.2, mu=0.1, c=3.0, m=1.0, omega=1.0):
    return OscillatorConfig(
        m=m, omega=omega, lam=lam, mu=mu, hbar=1.0, temp=TemperatureSpec.from_coth(c)
    )


REF = make_cfg()
REF_D = thermal_coefficients(REF)


# ---------------------------------------------------------------------------
# propagator against scipy's general-purpose matrix exponential
# ---------------------------------------------------------------------------


@pytest.mark.parametrize("t", [0.0, 0.3, 1.7, 10.0])
def test_propagator_matches_expm(t):
    expected = expm(drift_matrix(REF) * t)
    assert np.allclose(propagator(REF, t), expected, rtol=1e-12, atol=1e-14)


def test_propagator_random_parameters():
    rng = np.random.default_rng(7)
    for _ in range(25):
        lam = rng.uniform(0.0, 0.5)
        mu = rng.uniform(-0.8, 0.8)
        omega = rng.uniform(0.9, 2.0)
        if omega <= abs(mu):
            continue
        cfg = make_cfg(lam=lam, mu=mu, omega=omega, m=rng.uniform(0.5, 2.0))
        t = rng.uniform(0.0, 8.0)
        assert np.allclose(
            propagator(cfg, t), expm(drift_matrix(cfg) * t), rtol=1e-11, atol=1e-13
        )


def test_propagator_semigroup_property():
    e1 = propagator(REF, 0.8)
    e2 = propagator(REF, 1.3)
    assert np.allclose(e1 @ e2, propagator(REF, 2.1), rtol=1e-13)


# ---------------------------------------------------------------------------
# steady state / asymptotics
# ---------------------------------------------------------------------------


def test_steady_state_matches_scipy_lyapunov():
    y = drift_matrix(REF)
    expected = solve_continuous_lyapunov(y, -2.0 * REF_D.matrix())
    assert np.allclose(steady_state_covariance(REF, REF_D), expected, rtol=1e-12)


def test_steady_state_is_thermal_for_thermal_coefficients():
    s = steady_state_covariance(REF, REF_D)
    assert s[0, 0] == pytest.approx(1.5, rel=1e-12)
    assert s[1, 1] == pytest.approx(1.5, rel=1e-12)
    assert s[0, 1] == pytest.approx(0.0, abs=1e-14)


@pytest.mark.parametrize(
    "c, var", [(1.0, 0.5), (3.0, 1.5), (20.0, 10.0)]
)
def test_asymptotic_covariance_values(c, var):
    state = asymptotic_covariance(make_cfg(c=c))
    assert state.s_qq == pytest.approx(var, rel=1e-15)
    assert state.s_pp == pytest.approx(var, rel=1e-15)
    assert state.s_pq == 0.0
    assert state.mean_q == 0.0 and state.mean_p == 0.0


def test_asymptotic_requires_damping():
    with pytest.raises(ValueError):
        asymptotic_covariance(OscillatorConfig.closed())
    with pytest.raises(ValueError):
        asymptotic_covariance(make_cfg(c=math.inf))


def test_steady_state_requires_damping():
    with pytest.raises(ValueError):
        steady_state_covariance(OscillatorConfig.closed(), REF_D)


# ---------------------------------------------------------------------------
# exact propagation vs closed forms (dual route, seeded random parameters)
# ---------------------------------------------------------------------------


def _random_setup(rng):
    lam = 10.0 ** rng.uniform(math.log10(0.02), math.log10(0.5))
    mu = lam * rng.uniform(-0.9, 0.9)
    c_min = lam / math.sqrt(lam * lam - mu * mu)
    c = c_min * (1.0 + 9.0 * rng.uniform(0.0, 1.0))
    cfg = make_cfg(lam=lam, mu=mu, c=c)
    spec = InitialStateSpec(
        spread=10.0 ** rng.uniform(-0.7, 0.9),
        correlation=rng.uniform(-0.95, 0.95),
        center_q=rng.uniform(-3.0, 3.0),
        center_p=rng.uniform(-3.0, 3.0),
    )
    return cfg, spec


@pytest.mark.parametrize("seed", range(8))
def test_closed_forms_agree_with_exact_propagation(seed):
    rng = np.random.default_rng(1000 + seed)
    cfg, spec = _random_setup(rng)
    d = thermal_coefficients(cfg)
    state0 = initial_state(spec, cfg)
    for t in rng.uniform(0.0, 30.0, size=6):
        exact = covariance_lyapunov(state0, cfg, d, float(t))
        q, p, s_pq, sigma = closed_form_state_quantities(spec, cfg, float(t))
        assert q == pytest.approx(exact.mean_q, abs=1e-10)
        assert p == pytest.approx(exact.mean_p, abs=1e-10)
        assert abs(sigma - exact.sigma_det) / exact.sigma_det < 1e-8
        assert abs(s_pq - exact.s_pq) / math.sqrt(exact.sigma_det) < 1e-8


def test_sigma_det_initial_and_final_values():
    spec = InitialStateSpec(spread=4.0, correlation=0.3)
    assert sigma_det_closed(spec, REF, 0.0) == pytest.approx(0.25, rel=1e-12)
    # relaxes to (hbar^2/4) C^2 = 2.25
    assert sigma_det_closed(spec, REF, 200.0) == pytest.approx(2.25, rel=1e-12)


def test_sigma_pq_initial_value_and_decay():
    spec = InitialStateSpec(spread=1.0, correlation=0.6)
    assert sigma_pq_closed(spec, REF, 0.0) == pytest.approx(0.375, rel=1e-12)
    assert sigma_pq_closed(spec, REF, 200.0) == pytest.approx(0.0, abs=1e-12)


# ---------------------------------------------------------------------------
# RK4 oracle
# ---------------------------------------------------------------------------


def test_rk4_fourth_order_convergence():
    state0 = initial_state(InitialStateSpec(spread=4.0, correlation=0.5), REF)
    exact = covariance_lyapunov(state0, REF, REF_D, 2.0)
    errors = []
    for dt in (1e-2, 5e-3, 2.5e-3):
        approx = integrate_moments_rk4(state0, REF, REF_D, 2.0, dt).final
        errors.append(abs(approx.s_qq - exact.s_qq) + abs(approx.s_pp - exact.s_pp))
    # halving dt should shrink the error ~16x
    assert errors[0] / errors[1] > 12.0
    assert errors[1] / errors[2] > 12.0


def test_rk4_matches_exact_propagation():
    state0 = initial_state(InitialStateSpec(spread=2.0, correlation=-0.4), REF)
    exact = covariance_lyapunov(state0, REF, REF_D, 1.5)
    approx = integrate_moments_rk4(state0, REF, REF_D, 1.5, 1e-4, record_every=15000)
    f = approx.final
    assert f.t == pytest.approx(1.5)
    for attr in ("mean_q", "mean_p", "s_qq", "s_pp", "s_pq"):
        assert getattr(f, attr) == pytest.approx(getattr(exact, attr), abs=1e-10)


def test_rk4_zero_time_returns_initial_state():
    state0 = initial_state(InitialStateSpec(spread=1.0, correlation=0.0), REF)
    traj = integrate_moments_rk4(state0, REF, REF_D, 0.0, 0.01)
    assert len(traj) == 1
    assert traj.final == state0


def test_rk4_rejects_incommensurate_step():
    state0 = initial_state(InitialStateSpec(spread=1.0, correlation=0.0), REF)
    with pytest.raises(ValueError):
        integrate_moments_rk4(state0, REF, REF_D, 1.0, 0.3)


# ---------------------------------------------------------------------------
# physics sanity
# ---------------------------------------------------------------------------


def test_closed_system_conserves_determinant():
    cfg = OscillatorConfig.closed()
    zero = DiffusionCoefficients.zero()
    state0 = initial_state(InitialStateSpec(spread=4.0, correlation=0.5), cfg)
    for t in (0.7, 2.9, 11.3):
        s = covariance_lyapunov(state0, cfg, zero, t)
        assert s.sigma_det == pytest.approx(0.25, rel=1e-12)


def test_closed_system_means_rotate():
    cfg = OscillatorConfig.closed()
    state0 = initial_state(
        InitialStateSpec(spread=1.0, correlation=0.0, center_q=2.0), cfg
    )
    q, p = mean_closed_form(state0, cfg, math.pi / 2.0)
    assert q == pytest.approx(0.0, abs=1e-12)
    assert p == pytest.approx(-2.0, rel=1e-12)
    q, p = mean_closed_form(state0, cfg, 2.0 * math.pi)
    assert q == pytest.approx(2.0, rel=1e-12)


def test_initial_condition_forgetting():
    # two very different initial states converge to the same thermal state
    a = initial_state(InitialStateSpec(spread=8.0, correlation=0.9, center_q=3.0), REF)
    b = initial_state(InitialStateSpec(spread=0.3, correlation=-0.5, center_p=-2.0), REF)
    late_a = covariance_lyapunov(a, REF, REF_D, 150.0)
    late_b = covariance_lyapunov(b, REF, REF_D, 150.0)
    assert late_a.s_qq == pytest.approx(late_b.s_qq, abs=1e-10)
    assert late_a.s_pp == pytest.approx(late_b.s_pp, abs=1e-10)
    assert late_a.mean_q == pytest.approx(0.0, abs=1e-10)


def test_undamped_diffusion_uses_quadrature_route():
    # lam = 0 with nonzero diffusion exercises the explicit integral
    cfg = make_cfg(lam=0.0, mu=0.0)
    d = DiffusionCoefficients(d_pp=0.3, d_qq=0.1, d_pq=0.0)
    state0 = initial_state(InitialStateSpec(spread=1.0, correlation=0.0), cfg)
    got = covariance_lyapunov(state0, cfg, d, 2.0)
    ref = integrate_moments_rk4(state0, cfg, d, 2.0, 1e-4).final
    assert got.s_qq == pytest.approx(ref.s_qq, abs=1e-9)
    assert got.s_pp == pytest.approx(ref.s_pp, abs=1e-9)
    assert got.s_pq == pytest.approx(ref.s_pq, abs=1e-9)


def test_uncertainty_floor_along_trajectory():
    state0 = initial_state(InitialStateSpec(spread=6.0, correlation=0.8), REF)
    for t in np.linspace(0.0, 30.0, 301):
        s = covariance_lyapunov(state0, REF, REF_D, float(t))
        assert s.sigma_det >= 0.25 - 1e-12


# ---------------------------------------------------------------------------
# Trajectory container and CSV contract
# ---------------------------------------------------------------------------


def test_trajectory_requires_increasing_times():
    s = initial_state(InitialStateSpec(spread=1.0, correlation=0.0), REF)
    with pytest.raises(ValueError):
        Trajectory(states=(s, s), provenance="lyapunov")


def test_trajectory_csv_layout():
    state0 = initial_state(InitialStateSpec(spread=4.0, correlation=0.0), REF)
    traj = trajectory_lyapunov(state0, REF, REF_D, [0.0, 0.5, 1.0])
    buf = io.StringIO()
    traj.to_csv(buf)
    lines = buf.getvalue().splitlines()
    assert lines[0] == TRAJECTORY_HEADER
    assert len(lines) == 4
    first = lines[1].split(",")
    assert first[0] == "0"
    assert float(first[3]) == pytest.approx(2.0)
    assert float(first[6]) == pytest.approx(0.25)


def test_format_float_round_trips():
    for x in (0.1, 1.0 / 3.0, 2.25, 1e-17, 123456.789):
        assert float(format_float(x)) == x
