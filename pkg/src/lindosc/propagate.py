"""Time evolution of Gaussian moments, three independent ways.

1. Closed forms: the damped-oscillation expressions for the means, and the
   explicit formulas for the covariance determinant and the position-momentum
   covariance from a correlated-coherent initial state under a thermal bath.
2. Exact propagation: the first-moment drift matrix has the closed-form
   exponential ``exp(Y t) = e^{-lam t}[cos(Om t) I + sin(Om t)/Om (Y + lam I)]``
   in the underdamped regime, and the covariance obeys
   ``Sigma(t) = E (Sigma0 - Sigma_inf) E^T + Sigma_inf`` with ``Sigma_inf`` the
   steady-state (Lyapunov) solution.
3. A fixed-step RK4 integration of the five-dimensional moment ODE system, used
   as an independent oracle.

All three must agree to tight tolerances; the test suite enforces this.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path
from typing import IO, Iterable, Iterator, Sequence

import numpy as np

from .model import (
    DiffusionCoefficients,
    GaussianState,
    InitialStateSpec,
    NumericError,
    OscillatorConfig,
    initial_state,
)

__all__ = [
    "drift_matrix",
    "propagator",
    "mean_closed_form",
    "steady_state_covariance",
    "asymptotic_covariance",
    "covariance_lyapunov",
    "sigma_det_closed",
    "sigma_pq_closed",
    "integrate_moments_rk4",
    "Trajectory",
    "trajectory_lyapunov",
    "format_float",
]

TRAJECTORY_HEADER = "t,mean_q,mean_p,s_qq,s_pp,s_pq,sigma_det"


def format_float(x: float) -> str:
    """Locale-independent formatting with 17 significant digits."""
    return format(float(x), ".17g")


def drift_matrix(cfg: OscillatorConfig) -> np.ndarray:
    """Drift matrix Y of the first-moment equations d<q>/dt, d<p>/dt.

    ``Y = [[-(lam - mu), 1/m], [-m omega^2, -(lam + mu)]]``; its trace is
    ``-2 lam`` and its eigenvalues are ``-lam +/- i Omega`` in the underdamped
    regime.
    """
    return np.array(
        [
            [-(cfg.lam - cfg.mu), 1.0 / cfg.m],
            [-cfg.m * cfg.omega**2, -(cfg.lam + cfg.mu)],
        ]
    )


def propagator(cfg: OscillatorConfig, t: float) -> np.ndarray:
    """``exp(Y t)`` evaluated in closed form (exact for all t >= 0)."""
    big_omega = cfg.shifted_frequency
    phase = big_omega * t
    decay = math.exp(-cfg.lam * t)
    cos_part = math.cos(phase)
    sinc_part = math.sin(phase) / big_omega
    # Y + lam*I, the traceless oscillatory generator.
    k00, k01 = cfg.mu, 1.0 / cfg.m
    k10, k11 = -cfg.m * cfg.omega**2, -cfg.mu
    return decay * np.array(
        [
            [cos_part + sinc_part * k00, sinc_part * k01],
            [sinc_part * k10, cos_part + sinc_part * k11],
        ]
    )


def mean_closed_form(
    state0: GaussianState, cfg: OscillatorConfig, t: float
) -> tuple[float, float]:
    """Mean coordinate and momentum at time ``t`` (damped oscillation).

    Decays to (0, 0) as ``t -> inf`` whenever ``lam > 0``; pure rotation with
    frequency ``omega`` in the closed system.
    """
    if t < 0.0:
        raise ValueError("t must be >= 0")
    e = propagator(cfg, t)
    q = e[0, 0] * state0.mean_q + e[0, 1] * state0.mean_p
    p = e[1, 0] * state0.mean_q + e[1, 1] * state0.mean_p
    return float(q), float(p)


def steady_state_covariance(
    cfg: OscillatorConfig, d: DiffusionCoefficients
) -> np.ndarray:
    """Steady-state covariance: the unique solution of
    ``Y S + S Y^T + 2 D = 0`` (exists iff ``lam > 0``)."""
    if cfg.lam <= 0.0:
        raise ValueError("no steady state without damping (lam > 0 required)")
    y = drift_matrix(cfg)
    a, b = y[0]
    c, e = y[1]
    # Unknowns (s_qq, s_pq, s_pp); three linear equations from the symmetric
    # matrix equation.
    lhs = np.array(
        [
            [2.0 * a, 2.0 * b, 0.0],
            [c, a + e, b],
            [0.0, 2.0 * c, 2.0 * e],
        ]
    )
    rhs = -2.0 * np.array([d.d_qq, d.d_pq, d.d_pp])
    s_qq, s_pq, s_pp = np.linalg.solve(lhs, rhs)
    return np.array([[s_qq, s_pq], [s_pq, s_pp]])


def asymptotic_covariance(cfg: OscillatorConfig) -> GaussianState:
    """Long-time Gaussian state under a thermal bath: zero means and

        s_qq(inf) = hbar*C/(2 m omega),  s_pp(inf) = hbar*m*omega*C/2,
        s_pq(inf) = 0,

    independent of the initial state.  Requires ``lam > 0``.
    """
    if cfg.lam <= 0.0:
        raise ValueError("no asymptotic state without damping (lam > 0 required)")
    c = cfg.coth_epsilon
    if math.isinf(c):
        raise ValueError("asymptotic covariance diverges at infinite temperature")
    scale = cfg.m * cfg.omega
    return GaussianState(
        mean_q=0.0,
        mean_p=0.0,
        s_qq=cfg.hbar * c / (2.0 * scale),
        s_pp=cfg.hbar * scale * c / 2.0,
        s_pq=0.0,
        t=math.inf,
    )


def _particular_integral(
    cfg: OscillatorConfig, d: DiffusionCoefficients, t: float
) -> np.ndarray:
    # Undamped case: integral of exp(Y s) (2D) exp(Y^T s) ds over [0, t],
    # evaluated by Simpson refinement (the integrand is bounded and smooth).
    two_d = 2.0 * d.matrix()

    def integrand(s: float) -> np.ndarray:
        e = propagator(cfg, s)
        return e @ two_d @ e.T

    n = 64
    previous: np.ndarray | None = None
    for _ in range(18):
        step = t / n
        nodes = [integrand(i * step) for i in range(n + 1)]
        weights = np.ones(n + 1)
        weights[1:-1:2] = 4.0
        weights[2:-1:2] = 2.0
        estimate = (step / 3.0) * sum(w * v for w, v in zip(weights, nodes))
        if previous is not None:
            err = float(np.max(np.abs(estimate - previous)))
            scale = max(1.0, float(np.max(np.abs(estimate))))
            if err < 1e-12 * scale:
                return estimate
        previous = estimate
        n *= 2
    raise NumericError("covariance quadrature did not converge")


def covariance_lyapunov(
    state0: GaussianState,
    cfg: OscillatorConfig,
    d: DiffusionCoefficients,
    t: float,
) -> GaussianState:
    """Exact Gaussian state at time ``t`` from the matrix-exponential solution.

    With damping, ``Sigma(t) = E (Sigma0 - Sigma_inf) E^T + Sigma_inf`` where
    ``E = exp(Y t)`` and ``Sigma_inf`` solves the steady-state equation.  In the
    undamped case there is no steady state and the inhomogeneous part is
    evaluated as an explicit quadrature (skipped entirely for zero diffusion).
    """
    if t < 0.0:
        raise ValueError("t must be >= 0")
    e = propagator(cfg, t)
    mean = e @ state0.mean()
    cov0 = state0.covariance()
    if cfg.lam > 0.0:
        s_inf = steady_state_covariance(cfg, d)
        cov = e @ (cov0 - s_inf) @ e.T + s_inf
    else:
        cov = e @ cov0 @ e.T
        if not d.is_zero() and t > 0.0:
            cov = cov + _particular_integral(cfg, d, t)
    return GaussianState.from_moments(mean, cov, t=t)


def _squeeze_terms(spec: InitialStateSpec) -> tuple[float, float, float]:
    d = spec.spread
    r = spec.correlation
    one_minus = 1.0 - r * r
    k_plus = d + 1.0 / (d * one_minus)
    k_minus = d - 1.0 / (d * one_minus)
    return k_plus, k_minus, math.sqrt(one_minus)


def sigma_det_closed(
    spec: InitialStateSpec, cfg: OscillatorConfig, t: float
) -> float:
    """Covariance determinant sigma(t) in closed form (thermal bath).

    Starts at exactly ``hbar^2/4`` and relaxes to ``(hbar^2/4) C^2``; constant
    in the closed system.
    """
    if t < 0.0:
        raise ValueError("t must be >= 0")
    c = cfg.coth_epsilon
    w2 = cfg.omega * cfg.omega
    mu2 = cfg.mu * cfg.mu
    big2 = w2 - mu2
    big = cfg.shifted_frequency
    k_plus, k_minus, root = _squeeze_terms(spec)
    r = spec.correlation
    cos2 = math.cos(2.0 * big * t)
    sin2 = math.sin(2.0 * big * t)
    term_fast = math.exp(-4.0 * cfg.lam * t) * (1.0 - k_plus * c + c * c)
    inner = (
        (k_plus - 2.0 * c) * (w2 - mu2 * cos2) / big2
        + k_minus * cfg.mu * sin2 / big
        + 2.0 * r * cfg.mu * cfg.omega * (1.0 - cos2) / (big2 * root)
    )
    term_slow = math.exp(-2.0 * cfg.lam * t) * c * inner
    return (cfg.hbar * cfg.hbar / 4.0) * (term_fast + term_slow + c * c)


def sigma_pq_closed(
    spec: InitialStateSpec, cfg: OscillatorConfig, t: float
) -> float:
    """Position-momentum covariance s_pq(t) in closed form (thermal bath).

    Sign convention: this is cov(q, p) of the moment system, so
    ``sigma_pq_closed(spec, cfg, 0)`` equals the initial-state value
    ``+hbar*r/(2*sqrt(1-r^2))``.  Oscillates at twice the shifted frequency and
    decays to zero.
    """
    if t < 0.0:
        raise ValueError("t must be >= 0")
    c = cfg.coth_epsilon
    w = cfg.omega
    mu = cfg.mu
    big = cfg.shifted_frequency
    big2 = big * big
    k_plus, k_minus, root = _squeeze_terms(spec)
    r = spec.correlation
    cos2 = math.cos(2.0 * big * t)
    sin2 = math.sin(2.0 * big * t)
    bracket = (
        (mu * w * (2.0 * c - k_plus) - 2.0 * w * w * r / root) * cos2
        + w * big * k_minus * sin2
        + mu * w * (k_plus - 2.0 * c)
        + 2.0 * mu * mu * r / root
    )
    return -(cfg.hbar / (4.0 * big2)) * math.exp(-2.0 * cfg.lam * t) * bracket


@dataclass(frozen=True)
class Trajectory:
    """Immutable sequence of Gaussian states at strictly increasing times."""

    states: tuple[GaussianState, ...]
    provenance: str  # "closed-form" | "lyapunov" | "rk4-oracle"

    def __post_init__(self) -> None:
        if not self.states:
            raise ValueError("trajectory must contain at least one state")
        times = [s.t for s in self.states]
        if any(b <= a for a, b in zip(times, times[1:])):
            raise ValueError("trajectory times must be strictly increasing")

    def __len__(self) -> int:
        return len(self.states)

    def __iter__(self) -> Iterator[GaussianState]:
        return iter(self.states)

    def __getitem__(self, index: int) -> GaussianState:
        return self.states[index]

    @property
    def times(self) -> np.ndarray:
        return np.array([s.t for s in self.states])

    @property
    def final(self) -> GaussianState:
        return self.states[-1]

    def to_csv(self, target: str | Path | IO[str]) -> None:
        """Write the pinned trajectory CSV (header + one row per state)."""
        if hasattr(target, "write"):
            _write_trajectory(self.states, target)  # type: ignore[arg-type]
        else:
            with open(target, "w", encoding="utf-8", newline="\n") as handle:
                _write_trajectory(self.states, handle)


def _write_trajectory(states: Iterable[GaussianState], handle: IO[str]) -> None:
    handle.write(TRAJECTORY_HEADER + "\n")
    for s in states:
        row = (
            s.t,
            s.mean_q,
            s.mean_p,
            s.s_qq,
            s.s_pp,
            s.s_pq,
            s.sigma_det,
        )
        handle.write(",".join(format_float(x) for x in row) + "\n")


def trajectory_lyapunov(
    state0: GaussianState,
    cfg: OscillatorConfig,
    d: DiffusionCoefficients,
    times: Sequence[float],
) -> Trajectory:
    """Exact-propagation trajectory sampled at the given times."""
    states = tuple(covariance_lyapunov(state0, cfg, d, float(t)) for t in times)
    return Trajectory(states=states, provenance="lyapunov")


def integrate_moments_rk4(
    state0: GaussianState,
    cfg: OscillatorConfig,
    d: DiffusionCoefficients,
    t_end: float,
    dt: float,
    record_every: int = 1,
) -> Trajectory:
    """Fixed-step classic RK4 on the five-dimensional moment system.

    The state vector is (mean_q, mean_p, s_qq, s_pq, s_pp) with

        d(mean)/dt  = Y mean
        d(Sigma)/dt = Y Sigma + Sigma Y^T + 2D.

    Deterministic by construction; every ``record_every``-th step (plus the
    final step) is recorded.  Aborts with :class:`NumericError` on non-finite
    values.
    """
    if dt <= 0.0:
        raise ValueError("dt must be > 0")
    if t_end < 0.0:
        raise ValueError("t_end must be >= 0")
    if record_every < 1:
        raise ValueError("record_every must be >= 1")

    y = drift_matrix(cfg)
    a, b = float(y[0, 0]), float(y[0, 1])
    c, e = float(y[1, 0]), float(y[1, 1])
    two_dqq, two_dpq, two_dpp = 2.0 * d.d_qq, 2.0 * d.d_pq, 2.0 * d.d_pp

    def rhs(q, p, sqq, spq, spp):
        return (
            a * q + b * p,
            c * q + e * p,
            2.0 * a * sqq + 2.0 * b * spq + two_dqq,
            c * sqq + (a + e) * spq + b * spp + two_dpq,
            2.0 * c * spq + 2.0 * e * spp + two_dpp,
        )

    q, p = state0.mean_q, state0.mean_p
    sqq, spq, spp = state0.s_qq, state0.s_pq, state0.s_pp
    n_steps = int(round(t_end / dt))
    if abs(n_steps * dt - t_end) > 1e-9 * max(1.0, t_end):
        raise ValueError("t_end must be an integer multiple of dt")

    states = [
        GaussianState(
            mean_q=q, mean_p=p, s_qq=sqq, s_pp=spp, s_pq=spq, t=0.0
        )
    ]
    half = 0.5 * dt
    sixth = dt / 6.0
    for k in range(1, n_steps + 1):
        k1 = rhs(q, p, sqq, spq, spp)
        k2 = rhs(
            q + half * k1[0],
            p + half * k1[1],
            sqq + half * k1[2],
            spq + half * k1[3],
            spp + half * k1[4],
        )
        k3 = rhs(
            q + half * k2[0],
            p + half * k2[1],
            sqq + half * k2[2],
            spq + half * k2[3],
            spp + half * k2[4],
        )
        k4 = rhs(
            q + dt * k3[0],
            p + dt * k3[1],
            sqq + dt * k3[2],
            spq + dt * k3[3],
            spp + dt * k3[4],
        )
        q += sixth * (k1[0] + 2.0 * (k2[0] + k3[0]) + k4[0])
        p += sixth * (k1[1] + 2.0 * (k2[1] + k3[1]) + k4[1])
        sqq += sixth * (k1[2] + 2.0 * (k2[2] + k3[2]) + k4[2])
        spq += sixth * (k1[3] + 2.0 * (k2[3] + k3[3]) + k4[3])
        spp += sixth * (k1[4] + 2.0 * (k2[4] + k3[4]) + k4[4])
        if not (math.isfinite(sqq) and math.isfinite(spp) and math.isfinite(q)):
            raise NumericError(
                f"moment integration became non-finite at step {k}", step=k
            )
        if sqq <= 0.0 or spp <= 0.0 or sqq * spp - spq * spq <= 0.0:
            # exact dynamics keep the covariance positive definite, so a sign
            # loss can only mean the step size is unstable for these parameters
            raise NumericError(
                f"covariance lost positivity at step {k}; decrease dt", step=k
            )
        if k % record_every == 0 or k == n_steps:
            states.append(
                GaussianState(
                    mean_q=q, mean_p=p, s_qq=sqq, s_pp=spp, s_pq=spq, t=k * dt
                )
            )
    return Trajectory(states=tuple(states), provenance="rk4-oracle")


def closed_form_state_quantities(
    spec: InitialStateSpec, cfg: OscillatorConfig, t: float
) -> tuple[float, float, float, float]:
    """Everything the closed forms provide at time ``t``:
    (mean_q, mean_p, s_pq, sigma_det).

    The individual variances have no published closed form; use the exact
    propagation route for those.
    """
    q, p = mean_closed_form(initial_state(spec, cfg), cfg, t)
    return q, p, sigma_pq_closed(spec, cfg, t), sigma_det_closed(spec, cfg, t)
