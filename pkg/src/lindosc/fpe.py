"""Explicit finite-difference solver for the phase-space transport equation
obeyed by the Wigner distribution of the damped oscillator.

The equation is integrated in conservative flux form,

    dW/dt = -d/dq F_q - d/dp F_p,
    F_q = v_q W - d_qq dW/dq - d_pq dW/dp,   v_q = p/m - (lam - mu) q,
    F_p = v_p W - d_pp dW/dp - d_pq dW/dq,   v_p = -m omega^2 q - (lam + mu) p,

which contains all seven generator terms: the two unitary drift terms, the two
friction terms, and the three diffusion terms.  Faces use second-order linear
upwind reconstruction for advection (two-cell stencil on the upwind side) and
centered differences for diffusion; time stepping is forward Euler under a
CFL-style bound.  The boundary is zero-inflow Dirichlet: ghost cells hold
W = 0, so nothing is advected in and diffusion may leak mass out through the
tails (tracked and reported).

This solver is deliberately independent of the closed-form machinery in
``propagate``/``states`` so the two can be compared as oracles.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .model import (
    DiffusionCoefficients,
    GaussianState,
    NumericError,
    OscillatorConfig,
)
from .states import GridGeometry, PhaseSpaceGrid

__all__ = [
    "FpeRunSpec",
    "FpeResult",
    "stable_dt",
    "run_fpe",
    "evolve_wigner",
    "grid_moments",
    "grid_l2_diff",
    "grid_linf_diff",
]

_EPS0 = 1e-300  # keeps zero-diffusion denominators from dividing by zero
_MASS_TOL = 1e-3


@dataclass(frozen=True)
class FpeRunSpec:
    """Run parameters for the grid solver.

    ``dt=None`` picks the largest stable step automatically.  ``safety`` is
    the fraction of the stability bound used by the automatic step; it may be
    lowered but not raised above 0.5.  ``snapshot_times`` are intermediate
    times (each in (0, t_end]) at which the grid is captured.  ``geom``, when
    given, must match the geometry of the initial grid (a consistency check
    for callers that build the two separately).
    """

    t_end: float
    dt: float | None = None
    snapshot_times: tuple[float, ...] = ()
    safety: float = 0.5
    boundary: str = "zero-inflow"
    geom: GridGeometry | None = None

    def __post_init__(self) -> None:
        if not math.isfinite(self.t_end) or self.t_end < 0.0:
            raise ValueError(f"t_end must be finite and >= 0, got {self.t_end!r}")
        if self.dt is not None and (not math.isfinite(self.dt) or self.dt <= 0.0):
            raise ValueError(f"dt must be finite and > 0, got {self.dt!r}")
        if not 0.0 < self.safety <= 0.5:
            raise ValueError(f"safety must be in (0, 0.5], got {self.safety!r}")
        if self.boundary != "zero-inflow":
            raise ValueError(f"unsupported boundary policy {self.boundary!r}")
        object.__setattr__(self, "snapshot_times", tuple(float(t) for t in self.snapshot_times))
        for t in self.snapshot_times:
            if not 0.0 < t <= self.t_end:
                raise ValueError(f"snapshot time {t!r} outside (0, t_end]")
        if len(set(self.snapshot_times)) != len(self.snapshot_times):
            raise ValueError("snapshot times must be distinct")


def _velocity_extremes(
    geom: GridGeometry, cfg: OscillatorConfig
) -> tuple[float, float]:
    """Upper bounds on |v_q| and |v_p| over the domain (attained at corners)."""
    q_abs = max(abs(geom.q_min), abs(geom.q_max))
    p_abs = max(abs(geom.p_min), abs(geom.p_max))
    vq_max = p_abs / cfg.m + abs(cfg.lam - cfg.mu) * q_abs
    vp_max = cfg.m * cfg.omega**2 * q_abs + (cfg.lam + cfg.mu) * p_abs
    return vq_max, vp_max


def _cfl_bound(
    geom: GridGeometry, cfg: OscillatorConfig, d: DiffusionCoefficients
) -> float:
    """The four-term stability bound min(dx^2/2D, dx/|v|max) per axis,
    before the safety factor."""
    vq_max, vp_max = _velocity_extremes(geom, cfg)
    dq, dp = geom.dq, geom.dp
    return min(
        dq * dq / (2.0 * d.d_qq + _EPS0),
        dp * dp / (2.0 * d.d_pp + _EPS0),
        dq / (vq_max + _EPS0),
        dp / (vp_max + _EPS0),
    )


def stable_dt(
    geom: GridGeometry,
    cfg: OscillatorConfig,
    d: DiffusionCoefficients,
    safety: float = 0.5,
) -> float:
    """Largest recommended forward-Euler step for this grid and dynamics.

    Three ingredients, all scaled by ``safety``:

    * the four-term CFL bound (per-axis advection and diffusion);
    * the combined sawtooth bound ``0.5 / (v_q/dq + v_p/dp + D_qq/dq^2 +
      D_pp/dp^2)`` — at the odd-even Fourier mode the linear-upwind advection
      operator contributes ``4 v/dx`` and centered diffusion ``4 D/dx^2`` per
      axis, and the contributions add, so the per-axis terms alone are not
      sufficient;
    * the long-wave guard ``2 D / v_max^2`` on each diffusive axis (below it
      the explicit scheme's advective phase error is dominated by diffusive
      damping).  Axes without diffusion skip the guard; their residual
      long-wave growth is cubic in the Courant number and negligible for the
      short runs this solver targets.
    """
    if not 0.0 < safety <= 0.5:
        raise ValueError(f"safety must be in (0, 0.5], got {safety!r}")
    vq_max, vp_max = _velocity_extremes(geom, cfg)
    bound = _cfl_bound(geom, cfg, d)
    rate_sum = (
        vq_max / geom.dq
        + vp_max / geom.dp
        + d.d_qq / geom.dq**2
        + d.d_pp / geom.dp**2
    )
    if rate_sum > 0.0:
        bound = min(bound, 0.5 / rate_sum)
    if d.d_qq > 0.0 and vq_max > 0.0:
        bound = min(bound, 2.0 * d.d_qq / (vq_max * vq_max))
    if d.d_pp > 0.0 and vp_max > 0.0:
        bound = min(bound, 2.0 * d.d_pp / (vp_max * vp_max))
    return safety * bound


class _Stepper:
    """Precomputed face velocities and one forward-Euler update.

    Grid layout: ``values[i, j] = W(q_i, p_j)`` with q along axis 0.  Faces in
    q sit at ``q_min + k*dq`` (k = 0..n_q); the advective face value is the
    two-cell linear-upwind extrapolation from the side the interface velocity
    blows from, with two ghost cells of zeros beyond each boundary.
    """

    def __init__(
        self,
        geom: GridGeometry,
        cfg: OscillatorConfig,
        d: DiffusionCoefficients,
    ) -> None:
        self.geom = geom
        self.d = d
        q = geom.q_centers()
        p = geom.p_centers()
        q_faces = geom.q_min + geom.dq * np.arange(geom.n_q + 1)
        p_faces = geom.p_min + geom.dp * np.arange(geom.n_p + 1)
        # v_q on q-faces: shape (n_q + 1, n_p)
        self.vq = q_faces[:, None] * (-(cfg.lam - cfg.mu)) + p[None, :] / cfg.m
        # v_p on p-faces: shape (n_q, n_p + 1)
        self.vp = -cfg.m * cfg.omega**2 * q[:, None] - (cfg.lam + cfg.mu) * p_faces[None, :]
        self.vq_pos = self.vq >= 0.0
        self.vp_pos = self.vp >= 0.0

    def step(self, w: np.ndarray, dt: float) -> np.ndarray:
        geom = self.geom
        d = self.d
        nq, npp = geom.n_q, geom.n_p
        dq, dp = geom.dq, geom.dp

        pq = np.zeros((nq + 4, npp))
        pq[2:-2, :] = w
        adv_q = np.where(
            self.vq_pos,
            1.5 * pq[1 : nq + 2, :] - 0.5 * pq[0 : nq + 1, :],
            1.5 * pq[2 : nq + 3, :] - 0.5 * pq[3 : nq + 4, :],
        )
        flux_q = self.vq * adv_q
        if d.d_qq != 0.0:
            flux_q -= d.d_qq * (pq[2 : nq + 3, :] - pq[1 : nq + 2, :]) / dq

        pp = np.zeros((nq, npp + 4))
        pp[:, 2:-2] = w
        adv_p = np.where(
            self.vp_pos,
            1.5 * pp[:, 1 : npp + 2] - 0.5 * pp[:, 0 : npp + 1],
            1.5 * pp[:, 2 : npp + 3] - 0.5 * pp[:, 3 : npp + 4],
        )
        flux_p = self.vp * adv_p
        if d.d_pp != 0.0:
            flux_p -= d.d_pp * (pp[:, 2 : npp + 3] - pp[:, 1 : npp + 2]) / dp

        if d.d_pq != 0.0:
            # Cross-derivative on faces: average the centered cell-derivative
            # of the transverse direction onto the face (ghost cells are 0).
            dwdp = np.zeros((nq + 2, npp))
            dwdp[1:-1, :] = (pp[:, 3 : npp + 3] - pp[:, 1 : npp + 1]) / (2.0 * dp)
            flux_q -= d.d_pq * 0.5 * (dwdp[0 : nq + 1, :] + dwdp[1 : nq + 2, :])
            dwdq = np.zeros((nq, npp + 2))
            dwdq[:, 1:-1] = (pq[3 : nq + 3, :] - pq[1 : nq + 1, :]) / (2.0 * dq)
            flux_p -= d.d_pq * 0.5 * (dwdq[:, 0 : npp + 1] + dwdq[:, 1 : npp + 2])

        div = (flux_q[1:, :] - flux_q[:-1, :]) / dq + (
            flux_p[:, 1:] - flux_p[:, :-1]
        ) / dp
        return w - dt * div


@dataclass(frozen=True)
class FpeResult:
    """Outcome of a grid run: final grid, optional snapshots, and telemetry.

    ``min_value`` is the smallest cell value seen at any step (a positivity
    diagnostic); ``mass_*`` use the Riemann cell sum.
    """

    final: PhaseSpaceGrid
    snapshots: tuple[tuple[float, PhaseSpaceGrid], ...]
    dt: float
    steps: int
    t_end: float
    mass_initial: float
    mass_final: float
    min_value: float
    boundary: str = "zero-inflow"

    def summary(self) -> dict:
        g = self.final.geom
        return {
            "t_end": self.t_end,
            "dt": self.dt,
            "steps": self.steps,
            "boundary": self.boundary,
            "mass_initial": self.mass_initial,
            "mass_final": self.mass_final,
            "mass_drift": self.mass_final - self.mass_initial,
            "min_value": self.min_value,
            "q_min": g.q_min,
            "q_max": g.q_max,
            "p_min": g.p_min,
            "p_max": g.p_max,
            "n_q": g.n_q,
            "n_p": g.n_p,
            "snapshot_times": [t for t, _ in self.snapshots],
        }


def run_fpe(
    w0: PhaseSpaceGrid,
    cfg: OscillatorConfig,
    d: DiffusionCoefficients,
    run: FpeRunSpec,
) -> FpeResult:
    """Integrate the transport equation from ``w0`` to ``run.t_end``.

    Raises ``ValueError`` for an unnormalized initial grid (|mass - 1| >
    1e-3), a geometry mismatch, or a time step above the stability bound, and
    ``NumericError`` (with the offending step index) if the solution stops
    being finite mid-run.
    """
    geom = w0.geom
    if run.geom is not None and run.geom != geom:
        raise ValueError("run geometry does not match the initial grid")
    mass0 = w0.mass()
    if abs(mass0 - 1.0) > _MASS_TOL:
        raise ValueError(
            f"initial grid mass {mass0:.6g} deviates from 1 by more than {_MASS_TOL}"
        )
    hard_bound = 0.5 * _cfl_bound(geom, cfg, d)
    if run.dt is not None:
        dt = run.dt
        if dt > hard_bound * (1.0 + 1e-12):
            raise ValueError(
                f"dt={dt:.6g} violates the stability bound {hard_bound:.6g}"
            )
    else:
        dt = stable_dt(geom, cfg, d, run.safety)

    events = sorted(set(run.snapshot_times) | {run.t_end})
    if events and events[0] <= 0.0:  # t_end == 0: nothing to do
        events = [t for t in events if t > 0.0]

    stepper = _Stepper(geom, cfg, d)
    w = np.array(w0.values, dtype=float, copy=True)
    min_value = float(w.min())
    snapshots: list[tuple[float, PhaseSpaceGrid]] = []
    steps = 0
    t_cur = 0.0
    for t_event in events:
        span = t_event - t_cur
        n = max(1, math.ceil(span / dt - 1e-12))
        h = span / n
        # an unstable run overflows before the finite check trips; keep numpy
        # quiet about it so the NumericError below is the only signal
        with np.errstate(over="ignore", invalid="ignore"):
            for _ in range(n):
                w = stepper.step(w, h)
                steps += 1
                lo = float(w.min())
                if not (math.isfinite(lo) and math.isfinite(float(w.max()))):
                    raise NumericError(
                        f"non-finite grid value at step {steps} (t ~ {t_cur + h:.6g})",
                        step=steps,
                    )
                if lo < min_value:
                    min_value = lo
        t_cur = t_event
        grid = PhaseSpaceGrid(geom, w.copy())
        if t_event in run.snapshot_times:
            snapshots.append((t_event, grid))
    final = PhaseSpaceGrid(geom, w)
    return FpeResult(
        final=final,
        snapshots=tuple(snapshots),
        dt=dt,
        steps=steps,
        t_end=run.t_end,
        mass_initial=mass0,
        mass_final=final.mass(),
        min_value=min_value,
        boundary=run.boundary,
    )


def evolve_wigner(
    w0: PhaseSpaceGrid,
    cfg: OscillatorConfig,
    d: DiffusionCoefficients,
    run: FpeRunSpec,
) -> PhaseSpaceGrid:
    """Final grid of :func:`run_fpe` (convenience wrapper)."""
    return run_fpe(w0, cfg, d, run).final


def grid_moments(grid: PhaseSpaceGrid, t: float = 0.0) -> GaussianState:
    """Riemann-sum means and second central moments of a phase-space grid,
    normalized by the grid's own mass, packaged as a Gaussian state at time
    ``t`` for comparison against the moment propagators."""
    geom = grid.geom
    w = np.asarray(grid.values, dtype=float)
    q = geom.q_centers()[:, None]
    p = geom.p_centers()[None, :]
    cell = geom.dq * geom.dp
    mass = float(w.sum()) * cell
    if mass <= 0.0:
        raise ValueError("grid mass must be positive to extract moments")
    mean_q = float((w * q).sum()) * cell / mass
    mean_p = float((w * p).sum()) * cell / mass
    dq_ = q - mean_q
    dp_ = p - mean_p
    s_qq = float((w * dq_ * dq_).sum()) * cell / mass
    s_pp = float((w * dp_ * dp_).sum()) * cell / mass
    s_pq = float((w * dq_ * dp_).sum()) * cell / mass
    return GaussianState(
        mean_q=mean_q, mean_p=mean_p, s_qq=s_qq, s_pp=s_pp, s_pq=s_pq, t=t
    )


def _check_same_geometry(a: PhaseSpaceGrid, b: PhaseSpaceGrid) -> None:
    if a.geom != b.geom:
        raise ValueError("grids have different geometries")


def grid_l2_diff(a: PhaseSpaceGrid, b: PhaseSpaceGrid) -> float:
    """L2 distance sqrt(sum (a-b)^2 dq dp) between two grids."""
    _check_same_geometry(a, b)
    diff = np.asarray(a.values, dtype=float) - np.asarray(b.values, dtype=float)
    return float(math.sqrt((diff * diff).sum() * a.geom.dq * a.geom.dp))


def grid_linf_diff(a: PhaseSpaceGrid, b: PhaseSpaceGrid) -> float:
    """Largest absolute cell difference between two grids."""
    _check_same_geometry(a, b)
    diff = np.asarray(a.values, dtype=float) - np.asarray(b.values, dtype=float)
    return float(np.abs(diff).max())
