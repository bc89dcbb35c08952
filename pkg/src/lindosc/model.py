"""Parameter model for a damped quantum harmonic oscillator coupled to a thermal bath.

The open-system dynamics is Markovian (Lindblad form) with constant friction
constants ``lam`` (overall dissipation) and ``mu`` (asymmetry between the
coordinate and momentum friction terms) and constant diffusion coefficients.
Everything downstream works with Gaussian states, so a state is fully described
by its first moments (mean coordinate/momentum) and its three second central
moments.

Conventions
-----------
* Natural units ``m = omega = hbar = boltzmann = 1`` are the defaults; all
  dimensionless reference values in the tests assume them.  SI values are only
  needed for the macroscopic decoherence estimate, see
  :meth:`OscillatorConfig.si`.
* The bath temperature is carried canonically as ``C = coth(hbar*omega/(2kT))``
  so that ``T = 0`` maps to exactly ``C = 1`` (no overflow in the exponent
  argument) and the infinite-temperature limit is ``C = inf``.
* Underdamped regime only: ``omega > |mu|``, giving the shifted frequency
  ``Omega = sqrt(omega**2 - mu**2)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "BOLTZMANN_SI",
    "HBAR_SI",
    "NumericError",
    "TemperatureSpec",
    "OscillatorConfig",
    "DiffusionCoefficients",
    "InitialStateSpec",
    "GaussianState",
    "CheckResult",
    "ValidationReport",
    "thermal_coefficients",
    "validate",
    "initial_state",
]

# 2019 SI exact value / CODATA 2018 recommended value.
BOLTZMANN_SI = 1.380649e-23  # J/K
HBAR_SI = 1.054571817e-34  # J*s


class NumericError(RuntimeError):
    """An evolution or quadrature produced non-finite values.

    ``step`` carries the offending step index when available.
    """

    def __init__(self, message: str, step: int | None = None):
        super().__init__(message)
        self.step = step


def _require_finite(name: str, value: float) -> None:
    if not math.isfinite(value):
        raise ValueError(f"{name} must be finite, got {value!r}")


@dataclass(frozen=True)
class TemperatureSpec:
    """Bath temperature in one of two equivalent encodings.

    Exactly one of the two fields is set:

    ``coth_value``
        The dimensionless factor ``C = coth(hbar*omega/(2kT))`` >= 1.  This is
        the canonical form: every thermal formula uses ``C`` (or its inverse,
        ``tanh``), ``C = 1`` encodes ``T = 0`` exactly, and ``C = inf`` the
        infinite-temperature limit.
    ``temperature``
        Temperature in whatever unit system the attached oscillator uses
        (kelvin in SI mode).  Conversion to ``C`` needs ``hbar*omega/boltzmann``
        and is therefore deferred until an oscillator supplies those values.
    """

    coth_value: float | None = None
    temperature: float | None = None

    def __post_init__(self) -> None:
        if (self.coth_value is None) == (self.temperature is None):
            raise ValueError(
                "exactly one of coth_value or temperature must be given"
            )
        if self.coth_value is not None:
            c = self.coth_value
            if math.isnan(c) or c < 1.0:
                raise ValueError(f"coth factor must be >= 1, got {c!r}")
        if self.temperature is not None:
            t = self.temperature
            if math.isnan(t) or t < 0.0:
                raise ValueError(f"temperature must be >= 0, got {t!r}")

    @classmethod
    def zero(cls) -> "TemperatureSpec":
        """Zero temperature, i.e. ``C = 1``."""
        return cls(coth_value=1.0)

    @classmethod
    def from_coth(cls, value: float) -> "TemperatureSpec":
        return cls(coth_value=float(value))

    @classmethod
    def from_temperature(cls, value: float) -> "TemperatureSpec":
        return cls(temperature=float(value))

    @classmethod
    def from_epsilon(cls, eps: float) -> "TemperatureSpec":
        """Build from the thermal exponent argument ``eps = hbar*omega/(2kT)`` > 0."""
        eps = float(eps)
        if math.isnan(eps) or eps <= 0.0:
            raise ValueError(f"thermal exponent argument must be > 0, got {eps!r}")
        return cls(coth_value=1.0 / math.tanh(eps))

    def coth(self, *, omega: float = 1.0, hbar: float = 1.0, boltzmann: float = 1.0) -> float:
        """``C = coth(hbar*omega/(2kT))`` for the given oscillator scales."""
        if self.coth_value is not None:
            return self.coth_value
        temp = self.temperature
        if temp == 0.0:
            return 1.0
        if math.isinf(temp):
            return math.inf
        return 1.0 / math.tanh(hbar * omega / (2.0 * boltzmann * temp))

    def epsilon(self, *, omega: float = 1.0, hbar: float = 1.0, boltzmann: float = 1.0) -> float:
        """Exponent argument ``hbar*omega/(2kT)``; ``inf`` at T=0, ``0`` at T=inf."""
        if self.temperature is not None:
            temp = self.temperature
            if temp == 0.0:
                return math.inf
            if math.isinf(temp):
                return 0.0
            return hbar * omega / (2.0 * boltzmann * temp)
        c = self.coth_value
        if c == 1.0:
            return math.inf
        if math.isinf(c):
            return 0.0
        return math.atanh(1.0 / c)

    def kelvin(self, *, omega: float = 1.0, hbar: float = 1.0, boltzmann: float = 1.0) -> float:
        """Temperature in the oscillator's units (kelvin when those are SI)."""
        if self.temperature is not None:
            return self.temperature
        eps = self.epsilon(omega=omega, hbar=hbar, boltzmann=boltzmann)
        if math.isinf(eps):
            return 0.0
        if eps == 0.0:
            return math.inf
        return hbar * omega / (2.0 * boltzmann * eps)


@dataclass(frozen=True)
class OscillatorConfig:
    """Oscillator and bath parameters.

    ``lam`` >= 0 is the dissipation constant (decay rate of the mean motion is
    exactly ``lam``); ``mu`` splits the friction asymmetrically between the
    coordinate and momentum equations.  Only the underdamped regime
    ``omega > |mu|`` is supported.  ``closed_system`` marks the zero-damping
    limit ``lam = mu = 0`` explicitly; it is the only way to obtain all-zero
    thermal diffusion without tripping validation.
    """

    m: float = 1.0
    omega: float = 1.0
    lam: float = 0.0
    mu: float = 0.0
    hbar: float = 1.0
    boltzmann: float = 1.0
    temp: TemperatureSpec = field(default_factory=TemperatureSpec.zero)
    closed_system: bool = False

    def __post_init__(self) -> None:
        for name in ("m", "omega", "hbar", "boltzmann"):
            value = getattr(self, name)
            _require_finite(name, value)
            if value <= 0.0:
                raise ValueError(f"{name} must be > 0, got {value!r}")
        _require_finite("lam", self.lam)
        _require_finite("mu", self.mu)
        if self.lam < 0.0:
            raise ValueError(f"lam must be >= 0, got {self.lam!r}")
        if abs(self.mu) >= self.omega:
            raise ValueError(
                f"underdamped regime requires omega > |mu|; got omega={self.omega!r}, mu={self.mu!r}"
            )
        if self.closed_system and (self.lam != 0.0 or self.mu != 0.0):
            raise ValueError("closed_system requires lam = mu = 0")

    @classmethod
    def closed(cls, *, m: float = 1.0, omega: float = 1.0, hbar: float = 1.0) -> "OscillatorConfig":
        """Zero-damping configuration (no bath, zero diffusion)."""
        return cls(m=m, omega=omega, hbar=hbar, closed_system=True)

    @classmethod
    def si(
        cls,
        *,
        m: float,
        omega: float,
        temperature: float,
        lam: float = 0.0,
        mu: float = 0.0,
    ) -> "OscillatorConfig":
        """SI-unit configuration (kg, rad/s, K) with pinned physical constants."""
        return cls(
            m=m,
            omega=omega,
            lam=lam,
            mu=mu,
            hbar=HBAR_SI,
            boltzmann=BOLTZMANN_SI,
            temp=TemperatureSpec.from_temperature(temperature),
        )

    # -- derived scalars ----------------------------------------------------

    @property
    def shifted_frequency(self) -> float:
        """Oscillation frequency of the damped motion, ``sqrt(omega^2 - mu^2)``."""
        return math.sqrt(self.omega * self.omega - self.mu * self.mu)

    @property
    def coth_epsilon(self) -> float:
        return self.temp.coth(omega=self.omega, hbar=self.hbar, boltzmann=self.boltzmann)

    @property
    def epsilon(self) -> float:
        return self.temp.epsilon(omega=self.omega, hbar=self.hbar, boltzmann=self.boltzmann)

    @property
    def temperature(self) -> float:
        return self.temp.kelvin(omega=self.omega, hbar=self.hbar, boltzmann=self.boltzmann)

    @property
    def thermal_energy(self) -> float:
        """``k*T`` in the configured units."""
        return self.boltzmann * self.temperature


@dataclass(frozen=True)
class DiffusionCoefficients:
    """Constant diffusion coefficients of the master / Fokker-Planck equation.

    ``d_pp`` drives momentum diffusion (and thereby the damping of spatial
    coherences), ``d_qq`` coordinate diffusion, ``d_pq`` the cross term.
    """

    d_pp: float
    d_qq: float
    d_pq: float = 0.0

    def __post_init__(self) -> None:
        for name in ("d_pp", "d_qq", "d_pq"):
            _require_finite(name, getattr(self, name))
        if self.d_pp < 0.0 or self.d_qq < 0.0:
            raise ValueError("diagonal diffusion coefficients must be >= 0")

    @classmethod
    def zero(cls) -> "DiffusionCoefficients":
        return cls(d_pp=0.0, d_qq=0.0, d_pq=0.0)

    def matrix(self) -> np.ndarray:
        """2x2 diffusion matrix in (q, p) ordering."""
        return np.array(
            [[self.d_qq, self.d_pq], [self.d_pq, self.d_pp]], dtype=float
        )

    def is_zero(self) -> bool:
        return self.d_pp == 0.0 and self.d_qq == 0.0 and self.d_pq == 0.0


def thermal_coefficients(cfg: OscillatorConfig) -> DiffusionCoefficients:
    """Diffusion coefficients of a bath driving the oscillator to a Gibbs state.

        d_pp = (lam + mu)/2 * hbar * m * omega * C
        d_qq = (lam - mu)/2 * hbar / (m * omega) * C
        d_pq = 0

    with ``C`` the thermal coth factor.  Requires ``lam > |mu|`` so both
    diagonal coefficients are positive; the explicit closed system returns all
    zeros.
    """
    if cfg.closed_system:
        return DiffusionCoefficients.zero()
    if cfg.lam <= abs(cfg.mu):
        raise ValueError(
            "thermal coefficients need lam > |mu| for positive diffusion; "
            f"got lam={cfg.lam!r}, mu={cfg.mu!r}"
        )
    c = cfg.coth_epsilon
    if math.isinf(c):
        raise ValueError("thermal coefficients diverge at infinite temperature")
    half_sum = 0.5 * (cfg.lam + cfg.mu)
    half_diff = 0.5 * (cfg.lam - cfg.mu)
    scale = cfg.m * cfg.omega
    return DiffusionCoefficients(
        d_pp=half_sum * cfg.hbar * scale * c,
        d_qq=half_diff * cfg.hbar / scale * c,
        d_pq=0.0,
    )


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    hard: bool
    detail: str

    def line(self) -> str:
        verdict = "pass" if self.passed else "FAIL"
        kind = "" if self.hard else " (advisory)"
        return f"{verdict:4s}  {self.name}{kind}: {self.detail}"


@dataclass(frozen=True)
class ValidationReport:
    """Outcome of the physical-admissibility checks for a configuration."""

    checks: tuple[CheckResult, ...]

    @property
    def ok(self) -> bool:
        """True when every hard check passed (advisories may still fail)."""
        return all(c.passed for c in self.checks if c.hard)

    @property
    def failures(self) -> tuple[CheckResult, ...]:
        return tuple(c for c in self.checks if c.hard and not c.passed)

    @property
    def advisories(self) -> tuple[CheckResult, ...]:
        return tuple(c for c in self.checks if not c.hard and not c.passed)

    def __str__(self) -> str:
        return "\n".join(c.line() for c in self.checks)


def _ge_with_slack(lhs: float, rhs: float) -> bool:
    # ">=" admitting floating-point slack so exact-equality cases (closed
    # system, constraint boundary) do not flap on rounding.
    tol = 1e-12 * max(1.0, abs(lhs), abs(rhs))
    return lhs >= rhs - tol


def validate(
    cfg: OscillatorConfig, coeffs: DiffusionCoefficients | None = None
) -> ValidationReport:
    """Check a configuration (and optionally explicit diffusion coefficients).

    Hard checks: positivity of ``d_pp``/``d_qq`` (waived for the explicit
    closed system), the fundamental determinant bound
    ``d_pp*d_qq - d_pq**2 >= (lam*hbar/2)**2``, the thermal-bath constraint
    ``(lam^2 - mu^2) C^2 >= lam^2``, and the underdamped condition.  The
    weak-coupling condition ``lam < omega/10`` is advisory only.
    """
    checks: list[CheckResult] = []
    coeffs_error: str | None = None
    if coeffs is None:
        try:
            coeffs = thermal_coefficients(cfg)
        except ValueError as exc:
            coeffs_error = str(exc)

    if cfg.closed_system:
        checks.append(
            CheckResult("d_pp_positive", True, True, "closed system, zero diffusion")
        )
        checks.append(
            CheckResult("d_qq_positive", True, True, "closed system, zero diffusion")
        )
    elif coeffs is None:
        checks.append(CheckResult("d_pp_positive", False, True, coeffs_error or ""))
        checks.append(CheckResult("d_qq_positive", False, True, coeffs_error or ""))
    else:
        checks.append(
            CheckResult(
                "d_pp_positive", coeffs.d_pp > 0.0, True, f"d_pp={coeffs.d_pp:.6g}"
            )
        )
        checks.append(
            CheckResult(
                "d_qq_positive", coeffs.d_qq > 0.0, True, f"d_qq={coeffs.d_qq:.6g}"
            )
        )

    bound = (cfg.lam * cfg.hbar / 2.0) ** 2
    if coeffs is not None:
        det = coeffs.d_pp * coeffs.d_qq - coeffs.d_pq**2
        checks.append(
            CheckResult(
                "determinant_bound",
                _ge_with_slack(det, bound),
                True,
                f"d_pp*d_qq - d_pq^2 = {det:.6g} vs (lam*hbar/2)^2 = {bound:.6g}",
            )
        )
    else:
        checks.append(
            CheckResult("determinant_bound", False, True, coeffs_error or "")
        )

    c = cfg.coth_epsilon
    lam2 = cfg.lam * cfg.lam
    if math.isinf(c):
        thermal_ok = cfg.lam > abs(cfg.mu) or cfg.lam == 0.0
        lhs_text = "inf"
    else:
        lhs = (lam2 - cfg.mu * cfg.mu) * c * c
        thermal_ok = _ge_with_slack(lhs, lam2)
        lhs_text = f"{lhs:.6g}"
    checks.append(
        CheckResult(
            "thermal_constraint",
            thermal_ok,
            True,
            f"(lam^2 - mu^2)*C^2 = {lhs_text} vs lam^2 = {lam2:.6g}",
        )
    )

    checks.append(
        CheckResult(
            "underdamped",
            cfg.omega > abs(cfg.mu),
            True,
            f"omega={cfg.omega:.6g}, |mu|={abs(cfg.mu):.6g}",
        )
    )

    checks.append(
        CheckResult(
            "weak_coupling",
            cfg.lam < 0.1 * cfg.omega,
            False,
            f"lam={cfg.lam:.6g} vs omega/10={0.1 * cfg.omega:.6g}",
        )
    )
    return ValidationReport(checks=tuple(checks))


@dataclass(frozen=True)
class InitialStateSpec:
    """Correlated coherent (squeezed, correlated Gaussian) initial condition.

    ``spread``
        Dimensionless squared-width parameter: the initial position variance is
        ``hbar*spread/(2*m*omega)``, so ``spread = 1`` is the unsqueezed
        coherent state, larger values are position-broadened.
    ``correlation``
        Initial position-momentum correlation coefficient ``r``, ``|r| < 1``.
    ``center_q``, ``center_p``
        Initial expectation values.
    """

    spread: float = 1.0
    correlation: float = 0.0
    center_q: float = 0.0
    center_p: float = 0.0

    def __post_init__(self) -> None:
        _require_finite("spread", self.spread)
        _require_finite("correlation", self.correlation)
        _require_finite("center_q", self.center_q)
        _require_finite("center_p", self.center_p)
        if self.spread <= 0.0:
            raise ValueError(f"spread must be > 0, got {self.spread!r}")
        if abs(self.correlation) >= 1.0:
            raise ValueError(
                f"correlation must satisfy |r| < 1, got {self.correlation!r}"
            )


@dataclass(frozen=True)
class GaussianState:
    """First and second moments of a Gaussian phase-space state at time ``t``.

    ``s_qq``, ``s_pp``, ``s_pq`` are the central second moments (variances and
    covariance); the determinant ``s_qq*s_pp - s_pq**2`` is the generalized
    uncertainty, bounded below by ``hbar**2/4`` for physical states.
    """

    mean_q: float
    mean_p: float
    s_qq: float
    s_pp: float
    s_pq: float
    t: float = 0.0

    def __post_init__(self) -> None:
        for name in ("mean_q", "mean_p", "s_qq", "s_pp", "s_pq"):
            _require_finite(name, getattr(self, name))
        if math.isnan(self.t):
            raise ValueError("t must not be NaN")
        if self.s_qq <= 0.0 or self.s_pp <= 0.0:
            raise ValueError("variances must be positive")
        if self.sigma_det <= 0.0:
            raise ValueError("covariance matrix must be positive definite")

    @property
    def sigma_det(self) -> float:
        """Generalized uncertainty: determinant of the covariance matrix."""
        return self.s_qq * self.s_pp - self.s_pq * self.s_pq

    @property
    def correlation(self) -> float:
        return self.s_pq / math.sqrt(self.s_qq * self.s_pp)

    def mean(self) -> np.ndarray:
        return np.array([self.mean_q, self.mean_p])

    def covariance(self) -> np.ndarray:
        return np.array(
            [[self.s_qq, self.s_pq], [self.s_pq, self.s_pp]], dtype=float
        )

    @classmethod
    def from_moments(
        cls, mean: np.ndarray, cov: np.ndarray, t: float = 0.0
    ) -> "GaussianState":
        return cls(
            mean_q=float(mean[0]),
            mean_p=float(mean[1]),
            s_qq=float(cov[0, 0]),
            s_pp=float(cov[1, 1]),
            s_pq=float(0.5 * (cov[0, 1] + cov[1, 0])),
            t=t,
        )


def initial_state(spec: InitialStateSpec, cfg: OscillatorConfig) -> GaussianState:
    """Gaussian state of a correlated coherent state at ``t = 0``.

    Variances::

        s_qq = hbar*spread / (2*m*omega)
        s_pp = hbar*m*omega / (2*spread*(1 - r^2))
        s_pq = hbar*r / (2*sqrt(1 - r^2))

    The determinant is exactly ``hbar^2/4`` (minimum uncertainty) for every
    admissible ``(spread, r)``.
    """
    d = spec.spread
    r = spec.correlation
    one_minus = 1.0 - r * r
    scale = cfg.m * cfg.omega
    return GaussianState(
        mean_q=spec.center_q,
        mean_p=spec.center_p,
        s_qq=cfg.hbar * d / (2.0 * scale),
        s_pp=cfg.hbar * scale / (2.0 * d * one_minus),
        s_pq=cfg.hbar * r / (2.0 * math.sqrt(one_minus)),
        t=0.0,
    )
