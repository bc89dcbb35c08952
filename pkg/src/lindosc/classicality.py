"""Classicality diagnostics: decoherence degree, classical-correlation degree,
the one-sigma covariance contour, and detection of time windows where both
criteria hold simultaneously.

Two dimensionless measures:

* ``delta_qd = hbar/(2 sqrt(sigma_det))`` — degree of quantum decoherence.
  Equals 1 on minimum-uncertainty states and decreases as the state mixes;
  small values mean strong decoherence.
* ``delta_cc = sqrt(sigma_det)/|s_pq|`` — degree of classical correlations.
  Small values mean the phase-space ellipse is strongly squeezed along a
  classical trajectory direction; ``+inf`` whenever the position-momentum
  covariance vanishes (no correlations at all).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path
from typing import IO, Callable, Iterable, Sequence

import numpy as np

from .model import GaussianState, InitialStateSpec, OscillatorConfig
from .propagate import (
    Trajectory,
    format_float,
    sigma_det_closed,
    sigma_pq_closed,
)
from .states import alpha_beta_gamma

__all__ = [
    "ClassicalityMetrics",
    "delta_qd",
    "delta_qd_asymptotic",
    "delta_cc",
    "delta_cc_closed_system",
    "metrics_from_state",
    "write_metrics_csv",
    "one_sigma_contour",
    "contour_semi_axes",
    "contour_area",
    "classicality_window",
    "closed_form_metric_evaluator",
    "find_windows",
]

METRICS_HEADER = "t,delta_qd,delta_cc,gamma,sigma_det,sigma_pq"


def delta_qd(state: GaussianState, hbar: float = 1.0) -> float:
    """Degree of quantum decoherence, ``hbar/(2 sqrt(sigma_det))`` in (0, 1]."""
    return hbar / (2.0 * math.sqrt(state.sigma_det))


def delta_qd_asymptotic(cfg: OscillatorConfig) -> float:
    """Long-time decoherence degree ``tanh(hbar*omega/(2kT)) = 1/C``.

    Depends on temperature only — the initial squeezing and correlation are
    forgotten.  Equals 1 at T=0 (the asymptotic state is pure) and tends to 0
    at high temperature.
    """
    c = cfg.coth_epsilon
    if math.isinf(c):
        return 0.0
    return 1.0 / c


def delta_cc(state: GaussianState) -> float:
    """Degree of classical correlations ``sqrt(sigma_det)/|s_pq|``.

    Returns ``math.inf`` when ``s_pq == 0`` — legitimately unbounded, not an
    error (the covariance crosses zero repeatedly during damped oscillation).
    """
    if state.s_pq == 0.0:
        return math.inf
    return math.sqrt(state.sigma_det) / abs(state.s_pq)


def delta_cc_closed_system(
    spread: float, cfg: OscillatorConfig, t: float
) -> float:
    """Classical-correlation degree of an undamped oscillator started from an
    uncorrelated squeezed state: ``2/|(spread - 1/spread) sin(2 omega t)|``.

    ``+inf`` for the unsqueezed state (spread=1) at every time, and at the
    zeros of the sine for any spread.
    """
    if spread <= 0.0:
        raise ValueError("spread must be > 0")
    envelope = abs((spread - 1.0 / spread) * math.sin(2.0 * cfg.omega * t))
    if envelope == 0.0:
        return math.inf
    return 2.0 / envelope


@dataclass(frozen=True)
class ClassicalityMetrics:
    """Classicality measures of one state sample."""

    t: float
    delta_qd: float
    delta_cc: float
    gamma: float
    sigma_det: float
    sigma_pq: float


def metrics_from_state(state: GaussianState, hbar: float = 1.0) -> ClassicalityMetrics:
    coeff = alpha_beta_gamma(state, hbar)
    return ClassicalityMetrics(
        t=state.t,
        delta_qd=delta_qd(state, hbar),
        delta_cc=delta_cc(state),
        gamma=coeff.gamma,
        sigma_det=state.sigma_det,
        sigma_pq=state.s_pq,
    )


def write_metrics_csv(
    metrics: Iterable[ClassicalityMetrics], target: str | Path | IO[str]
) -> None:
    """Metrics CSV with infinity serialized as the literal ``inf``."""

    def write(handle: IO[str]) -> None:
        handle.write(METRICS_HEADER + "\n")
        for m in metrics:
            row = (m.t, m.delta_qd, m.delta_cc, m.gamma, m.sigma_det, m.sigma_pq)
            handle.write(",".join(format_float(x) for x in row) + "\n")

    if hasattr(target, "write"):
        write(target)  # type: ignore[arg-type]
    else:
        with open(target, "w", encoding="utf-8", newline="\n") as handle:
            write(handle)


def contour_semi_axes(state: GaussianState) -> tuple[float, float]:
    """Semi-axis lengths (major, minor) of the one-sigma contour ellipse,
    ``sqrt(2 * eigenvalue)`` of the covariance matrix."""
    eigvals = np.linalg.eigvalsh(state.covariance())
    minor, major = float(eigvals[0]), float(eigvals[1])
    return math.sqrt(2.0 * major), math.sqrt(2.0 * minor)


def contour_area(state: GaussianState) -> float:
    """Area enclosed by the one-sigma contour: ``2 pi sqrt(sigma_det)``.

    ``delta_qd * area == pi * hbar`` — the decoherence degree is inversely
    proportional to the occupied phase-space area.
    """
    return 2.0 * math.pi * math.sqrt(state.sigma_det)


def one_sigma_contour(state: GaussianState, n_points: int = 256) -> np.ndarray:
    """Closed polyline sampling the one-sigma contour

        (x - mean)^T Sigma^{-1} (x - mean) = 2

    (the level at which the quadratic form scaled by 1/(2 sigma_det) equals 1).
    Returns an (n_points + 1, 2) array whose last row repeats the first.
    """
    if n_points < 8:
        raise ValueError("n_points must be >= 8")
    eigvals, eigvecs = np.linalg.eigh(state.covariance())
    angles = np.linspace(0.0, 2.0 * math.pi, n_points + 1)
    circle = np.stack([np.cos(angles), np.sin(angles)])
    points = (eigvecs * np.sqrt(2.0 * eigvals)) @ circle
    return points.T + state.mean()


# -- simultaneous-classicality windows --------------------------------------


def _condition(qd: float, cc: float, qd_threshold: float, cc_threshold: float) -> bool:
    return qd < qd_threshold and cc < cc_threshold


def _refine_crossing(
    evaluator: Callable[[float], tuple[float, float]],
    t_out: float,
    t_in: float,
    qd_threshold: float,
    cc_threshold: float,
    time_tol: float,
) -> float:
    # Bisect between a time outside the window and a time inside it.
    while abs(t_in - t_out) > time_tol:
        mid = 0.5 * (t_in + t_out)
        qd, cc = evaluator(mid)
        if _condition(qd, cc, qd_threshold, cc_threshold):
            t_in = mid
        else:
            t_out = mid
    return 0.5 * (t_in + t_out)


def _windows_from_samples(
    times: Sequence[float],
    flags: Sequence[bool],
    qd_threshold: float,
    cc_threshold: float,
    evaluator: Callable[[float], tuple[float, float]] | None,
    time_tol: float,
) -> list[tuple[float, float]]:
    windows: list[tuple[float, float]] = []
    i = 0
    n = len(times)
    while i < n:
        if not flags[i]:
            i += 1
            continue
        start_index = i
        while i + 1 < n and flags[i + 1]:
            i += 1
        end_index = i
        start = times[start_index]
        end = times[end_index]
        if evaluator is not None:
            if start_index > 0:
                start = _refine_crossing(
                    evaluator,
                    times[start_index - 1],
                    start,
                    qd_threshold,
                    cc_threshold,
                    time_tol,
                )
            if end_index + 1 < n:
                end = _refine_crossing(
                    evaluator,
                    times[end_index + 1],
                    end,
                    qd_threshold,
                    cc_threshold,
                    time_tol,
                )
        windows.append((start, end))
        i += 1
    return windows


def classicality_window(
    traj: Trajectory,
    qd_threshold: float,
    cc_threshold: float,
    *,
    hbar: float = 1.0,
    evaluator: Callable[[float], tuple[float, float]] | None = None,
    time_tol: float = 1e-6,
) -> list[tuple[float, float]]:
    """Maximal time intervals where ``delta_qd < qd_threshold`` and
    ``delta_cc < cc_threshold`` hold simultaneously.

    Thresholds are mandatory (they are conventions, not physics).  The window
    membership is decided on the trajectory samples; when ``evaluator`` is
    given (mapping t -> (delta_qd, delta_cc), typically the cheap closed
    forms), interval endpoints are refined by bisection to ``time_tol``.
    Returns an empty list when the condition never holds.
    """
    if not (0.0 < qd_threshold and 0.0 < cc_threshold):
        raise ValueError("thresholds must be positive")
    if len(traj) < 2:
        raise ValueError("need at least 2 trajectory samples to detect windows")
    times = [s.t for s in traj]
    flags = [
        _condition(delta_qd(s, hbar), delta_cc(s), qd_threshold, cc_threshold)
        for s in traj
    ]
    return _windows_from_samples(
        times, flags, qd_threshold, cc_threshold, evaluator, time_tol
    )


def closed_form_metric_evaluator(
    spec: InitialStateSpec, cfg: OscillatorConfig
) -> Callable[[float], tuple[float, float]]:
    """(delta_qd(t), delta_cc(t)) from the closed-form covariance expressions."""

    def evaluate(t: float) -> tuple[float, float]:
        sigma = sigma_det_closed(spec, cfg, t)
        s_pq = sigma_pq_closed(spec, cfg, t)
        qd = cfg.hbar / (2.0 * math.sqrt(sigma))
        cc = math.inf if s_pq == 0.0 else math.sqrt(sigma) / abs(s_pq)
        return qd, cc

    return evaluate


def find_windows(
    spec: InitialStateSpec,
    cfg: OscillatorConfig,
    t_end: float,
    dt: float,
    qd_threshold: float,
    cc_threshold: float,
    time_tol: float = 1e-6,
) -> list[tuple[float, float]]:
    """Closed-form window detection on a uniform sampling grid with bisection
    refinement of the interval endpoints."""
    if t_end <= 0.0 or dt <= 0.0:
        raise ValueError("t_end and dt must be positive")
    evaluator = closed_form_metric_evaluator(spec, cfg)
    n = int(math.floor(t_end / dt + 1e-9))
    times = [min(i * dt, t_end) for i in range(n + 1)]
    if times[-1] < t_end:
        times.append(t_end)
    flags = [
        _condition(*evaluator(t), qd_threshold, cc_threshold) for t in times
    ]
    return _windows_from_samples(
        times, flags, qd_threshold, cc_threshold, evaluator, time_tol
    )
