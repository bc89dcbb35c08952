"""Pointwise evaluation of Gaussian states: density matrix, Wigner function,
stationary limits, and phase-space grids.

The density matrix is evaluated in coordinate representation.  In the
center/offset variables ``center = (q + q')/2`` and ``offset = q - q'`` a
Gaussian state is

    rho(center, offset) = sqrt(alpha/pi) * exp(-alpha*(center - <q>)^2
                           - gamma*offset^2
                           + i*beta*(center - <q>)*offset
                           + i*<p>*offset/hbar)

with the spread coefficients

    alpha = 1/(2 s_qq),  gamma = sigma_det/(2 hbar^2 s_qq),
    beta  = s_pq/(hbar s_qq).

The Wigner function is the Fourier transform of the density matrix in the
offset coordinate and is an ordinary bivariate Gaussian over (q, p) with the
state's covariance matrix.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path
from typing import IO, Iterable, Sequence

import numpy as np

from .model import GaussianState, OscillatorConfig
from .propagate import asymptotic_covariance, format_float
from .quadrature import simpson_refine

__all__ = [
    "AlphaBetaGamma",
    "alpha_beta_gamma",
    "density_matrix",
    "density_sigma_delta",
    "wigner",
    "wigner_from_coefficients",
    "wigner_from_density",
    "stationary_density",
    "stationary_wigner",
    "GridGeometry",
    "PhaseSpaceGrid",
    "render_grid",
    "density_grid",
    "geometry_for_states",
    "stationary_grid",
]


@dataclass(frozen=True)
class AlphaBetaGamma:
    """Spread coefficients of the coordinate-representation Gaussian.

    ``alpha`` sets the diagonal width, ``gamma`` the decay of off-diagonal
    coherences (larger gamma = stronger decoherence), ``beta`` the
    position-momentum cross phase.  ``alpha`` and ``gamma`` are positive for
    every valid state.
    """

    alpha: float
    beta: float
    gamma: float

    def covariance(self, hbar: float = 1.0) -> tuple[float, float, float]:
        """Invert back to (s_qq, s_pp, s_pq); exact round trip."""
        s_qq = 1.0 / (2.0 * self.alpha)
        s_pq = hbar * self.beta * s_qq
        sigma = hbar * hbar * self.gamma / self.alpha
        s_pp = (sigma + s_pq * s_pq) / s_qq
        return s_qq, s_pp, s_pq


def alpha_beta_gamma(state: GaussianState, hbar: float = 1.0) -> AlphaBetaGamma:
    return AlphaBetaGamma(
        alpha=1.0 / (2.0 * state.s_qq),
        beta=state.s_pq / (hbar * state.s_qq),
        gamma=state.sigma_det / (2.0 * hbar * hbar * state.s_qq),
    )


def _maybe_item(result, *inputs):
    if all(np.ndim(x) == 0 for x in inputs):
        return result[()] if isinstance(result, np.ndarray) else result
    return result


def density_sigma_delta(state: GaussianState, center, offset, hbar: float = 1.0):
    """Density matrix in center/offset coordinates (complex value).

    ``center = (q + q')/2`` and ``offset = q - q'``; accepts scalars or
    broadcastable arrays.
    """
    center = np.asarray(center, dtype=float)
    offset = np.asarray(offset, dtype=float)
    coeff = alpha_beta_gamma(state, hbar)
    dq = center - state.mean_q
    exponent = (
        -coeff.alpha * dq * dq
        - coeff.gamma * offset * offset
        + 1j * coeff.beta * dq * offset
        + 1j * state.mean_p * offset / hbar
    )
    value = math.sqrt(coeff.alpha / math.pi) * np.exp(exponent)
    return _maybe_item(value, center, offset)


def density_matrix(state: GaussianState, q, qp, hbar: float = 1.0):
    """Density matrix element rho(q, q') (complex).  Hermitian:
    ``rho(q, q') == conj(rho(q', q))``; the diagonal is the positive position
    distribution."""
    q = np.asarray(q, dtype=float)
    qp = np.asarray(qp, dtype=float)
    return density_sigma_delta(state, 0.5 * (q + qp), q - qp, hbar)


def wigner(state: GaussianState, q, p):
    """Wigner function value at (q, p): the bivariate Gaussian with the
    state's means and covariance.  Strictly positive; peak value
    ``1/(2*pi*sqrt(sigma_det))`` at the means."""
    q = np.asarray(q, dtype=float)
    p = np.asarray(p, dtype=float)
    sigma = state.sigma_det
    dq = q - state.mean_q
    dp = p - state.mean_p
    quad = (
        state.s_pp * dq * dq
        - 2.0 * state.s_pq * dq * dp
        + state.s_qq * dp * dp
    )
    value = np.exp(-quad / (2.0 * sigma)) / (2.0 * math.pi * math.sqrt(sigma))
    return _maybe_item(value, q, p)


def wigner_from_coefficients(state: GaussianState, q, p, hbar: float = 1.0):
    """Wigner function written through the spread coefficients:

        W = (1/pi hbar) sqrt(alpha/(4 gamma))
            * exp(-alpha (q - <q>)^2 - (p - <p> - hbar beta (q - <q>))^2/(4 hbar^2 gamma))

    Pointwise identical to :func:`wigner`; kept as an independent evaluation
    route for consistency tests.
    """
    q = np.asarray(q, dtype=float)
    p = np.asarray(p, dtype=float)
    coeff = alpha_beta_gamma(state, hbar)
    dq = q - state.mean_q
    shifted = p - state.mean_p - hbar * coeff.beta * dq
    value = (
        math.sqrt(coeff.alpha / (4.0 * coeff.gamma))
        / (math.pi * hbar)
        * np.exp(
            -coeff.alpha * dq * dq
            - shifted * shifted / (4.0 * hbar * hbar * coeff.gamma)
        )
    )
    return _maybe_item(value, q, p)


def wigner_from_density(
    state: GaussianState, q: float, p: float, hbar: float = 1.0
) -> float:
    """Wigner value via numerical Fourier transform of the density matrix:

        W(q, p) = (1/2 pi hbar) Integral rho(center=q, offset) e^{-i p offset/hbar} d(offset)

    Quadrature route, independent of the closed-form Gaussian; used to verify
    the transform convention.
    """
    coeff = alpha_beta_gamma(state, hbar)
    half_width = 8.0 / math.sqrt(coeff.gamma)

    def integrand(offset: np.ndarray) -> np.ndarray:
        return density_sigma_delta(state, q, offset, hbar) * np.exp(
            -1j * p * offset / hbar
        )

    integral = simpson_refine(
        integrand, -half_width, half_width, rel_tol=1e-11, abs_tol=1e-13
    )
    return float(np.real(integral) / (2.0 * math.pi * hbar))


def stationary_density(cfg: OscillatorConfig, q, qp):
    """Long-time density matrix (real Gaussian), evaluated directly:

        rho_inf(q, q') = sqrt(m omega/(pi hbar C))
            * exp(-(m omega/(4 hbar)) [ (q + q')^2 / C + C (q - q')^2 ])

    Requires damping (the asymptotic state must exist).
    """
    if cfg.lam <= 0.0:
        raise ValueError("no stationary state without damping")
    q = np.asarray(q, dtype=float)
    qp = np.asarray(qp, dtype=float)
    c = cfg.coth_epsilon
    scale = cfg.m * cfg.omega
    pref = math.sqrt(scale / (math.pi * cfg.hbar * c))
    plus = q + qp
    minus = q - qp
    value = pref * np.exp(
        -(scale / (4.0 * cfg.hbar)) * (plus * plus / c + c * minus * minus)
    )
    return _maybe_item(value, q, qp)


def stationary_wigner(cfg: OscillatorConfig, q, p):
    """Long-time Wigner function, evaluated directly:

        W_inf(q, p) = (1/(pi hbar C)) exp(-(1/(hbar C)) [ m omega q^2 + p^2/(m omega) ])

    Axially symmetric in the scaled coordinates (quantum equipartition); peak
    ``1/(pi hbar C)`` at the origin.
    """
    if cfg.lam <= 0.0:
        raise ValueError("no stationary state without damping")
    q = np.asarray(q, dtype=float)
    p = np.asarray(p, dtype=float)
    c = cfg.coth_epsilon
    scale = cfg.m * cfg.omega
    value = (
        1.0
        / (math.pi * cfg.hbar * c)
        * np.exp(-(scale * q * q + p * p / scale) / (cfg.hbar * c))
    )
    return _maybe_item(value, q, p)


# -- grids -------------------------------------------------------------------


@dataclass(frozen=True)
class GridGeometry:
    """Cell-centered rectangular lattice over (q, p)."""

    q_min: float
    q_max: float
    p_min: float
    p_max: float
    n_q: int
    n_p: int

    def __post_init__(self) -> None:
        if not (self.q_max > self.q_min and self.p_max > self.p_min):
            raise ValueError("degenerate grid range")
        if self.n_q < 3 or self.n_p < 3:
            raise ValueError("grid sizes must be >= 3")

    @property
    def dq(self) -> float:
        return (self.q_max - self.q_min) / self.n_q

    @property
    def dp(self) -> float:
        return (self.p_max - self.p_min) / self.n_p

    def q_centers(self) -> np.ndarray:
        return self.q_min + (np.arange(self.n_q) + 0.5) * self.dq

    def p_centers(self) -> np.ndarray:
        return self.p_min + (np.arange(self.n_p) + 0.5) * self.dp

    @classmethod
    def centered(
        cls, q_half: float, p_half: float, n_q: int, n_p: int | None = None
    ) -> "GridGeometry":
        return cls(
            q_min=-q_half,
            q_max=q_half,
            p_min=-p_half,
            p_max=p_half,
            n_q=n_q,
            n_p=n_p if n_p is not None else n_q,
        )


@dataclass(frozen=True, eq=False)
class PhaseSpaceGrid:
    """Sampled real field over a cell-centered phase-space lattice.

    ``values`` has shape (n_q, n_p): the row index walks the q axis (slow
    axis in the CSV layout), the column index the p axis.
    """

    geom: GridGeometry
    values: np.ndarray

    def __post_init__(self) -> None:
        values = np.asarray(self.values, dtype=float)
        if values.shape != (self.geom.n_q, self.geom.n_p):
            raise ValueError(
                f"values shape {values.shape} does not match grid "
                f"({self.geom.n_q}, {self.geom.n_p})"
            )
        object.__setattr__(self, "values", values)

    @property
    def dq(self) -> float:
        return self.geom.dq

    @property
    def dp(self) -> float:
        return self.geom.dp

    def mass(self) -> float:
        """Riemann-sum integral of the field over the domain."""
        return float(self.values.sum() * self.dq * self.dp)

    def to_csv(self, target: str | Path | IO[str]) -> None:
        """Header line ``# q_min q_max p_min p_max n_q n_p`` then one
        comma-separated row per q-line (row-major, q slow)."""
        if hasattr(target, "write"):
            self._write(target)  # type: ignore[arg-type]
        else:
            with open(target, "w", encoding="utf-8", newline="\n") as handle:
                self._write(handle)

    def _write(self, handle: IO[str]) -> None:
        g = self.geom
        handle.write(
            "# "
            + " ".join(
                format_float(x) for x in (g.q_min, g.q_max, g.p_min, g.p_max)
            )
            + f" {g.n_q} {g.n_p}\n"
        )
        for row in self.values:
            handle.write(",".join(format_float(x) for x in row) + "\n")

    @classmethod
    def from_csv(cls, source: str | Path | IO[str]) -> "PhaseSpaceGrid":
        if hasattr(source, "read"):
            lines = source.read().splitlines()  # type: ignore[union-attr]
        else:
            lines = Path(source).read_text(encoding="utf-8").splitlines()
        if not lines or not lines[0].startswith("#"):
            raise ValueError("grid CSV must start with a '# bounds sizes' line")
        parts = lines[0][1:].split()
        if len(parts) != 6:
            raise ValueError("grid CSV header must have 6 fields")
        q_min, q_max, p_min, p_max = map(float, parts[:4])
        n_q, n_p = int(parts[4]), int(parts[5])
        rows = [
            [float(x) for x in line.split(",")] for line in lines[1:] if line.strip()
        ]
        geom = GridGeometry(q_min, q_max, p_min, p_max, n_q, n_p)
        return cls(geom=geom, values=np.array(rows))


def render_grid(state: GaussianState, geom: GridGeometry) -> PhaseSpaceGrid:
    """Wigner function sampled at the cell centers of ``geom``."""
    q = geom.q_centers()[:, None]
    p = geom.p_centers()[None, :]
    return PhaseSpaceGrid(geom=geom, values=wigner(state, q, p))


def density_grid(
    state: GaussianState,
    q_min: float,
    q_max: float,
    n: int,
    hbar: float = 1.0,
) -> tuple[np.ndarray, np.ndarray]:
    """Density matrix sampled on an n x n cell-centered (q, q') lattice.

    Returns ``(values, axis)`` with complex ``values[i, j] = rho(q_i, q'_j)``
    (q slow axis) and the shared coordinate axis.
    """
    if q_max <= q_min:
        raise ValueError("degenerate grid range")
    if n < 3:
        raise ValueError("grid size must be >= 3")
    step = (q_max - q_min) / n
    axis = q_min + (np.arange(n) + 0.5) * step
    values = density_matrix(state, axis[:, None], axis[None, :], hbar)
    return values, axis


def geometry_for_states(
    states: Sequence[GaussianState] | Iterable[GaussianState],
    n_q: int,
    n_p: int | None = None,
    coverage: float = 6.0,
) -> GridGeometry:
    """Smallest symmetric-per-axis box covering mean +/- coverage * std for
    every given state (the domain-sizing rule used by the grid solver)."""
    states = list(states)
    if not states:
        raise ValueError("need at least one state")
    q_lo = min(s.mean_q - coverage * math.sqrt(s.s_qq) for s in states)
    q_hi = max(s.mean_q + coverage * math.sqrt(s.s_qq) for s in states)
    p_lo = min(s.mean_p - coverage * math.sqrt(s.s_pp) for s in states)
    p_hi = max(s.mean_p + coverage * math.sqrt(s.s_pp) for s in states)
    return GridGeometry(
        q_min=q_lo,
        q_max=q_hi,
        p_min=p_lo,
        p_max=p_hi,
        n_q=n_q,
        n_p=n_p if n_p is not None else n_q,
    )


def stationary_grid(cfg: OscillatorConfig, n: int, coverage: float = 6.0) -> PhaseSpaceGrid:
    """Stationary Wigner function rendered over its own +/- coverage std box."""
    state = asymptotic_covariance(cfg)
    geom = geometry_for_states([state], n, coverage=coverage)
    q = geom.q_centers()[:, None]
    p = geom.p_centers()[None, :]
    return PhaseSpaceGrid(geom=geom, values=stationary_wigner(cfg, q, p))
