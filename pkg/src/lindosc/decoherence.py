"""Decoherence and relaxation time scales, short-time expansions, the
macroscopic decoherence/relaxation rate ratio, and the asymptotic uncertainty
regime classification.

The central object is the short-time growth rate of the off-diagonal spread
coefficient gamma: coherences of length scale L decay like
``exp(-gamma(t) L^2 ...)``, so the reciprocal of gamma's initial logarithmic
growth rate is the decoherence time.  All formulas below assume a thermal bath
and a correlated-coherent initial state.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .model import DiffusionCoefficients, InitialStateSpec, OscillatorConfig

__all__ = [
    "TimeScales",
    "RegimeReport",
    "decoherence_rate",
    "decoherence_time",
    "decoherence_time_order",
    "decoherence_time_high_temperature",
    "statistical_time",
    "relaxation_time",
    "gamma_short_time",
    "sigma_short_time",
    "pure_decoherence_factor",
    "pure_decoherence_decay",
    "rate_ratio",
    "regime_report",
    "time_scales",
]


def _terms(spec: InitialStateSpec) -> tuple[float, float, float, float, float]:
    """spread, r, and the squeezing combinations entering rates:
    k_plus/minus = spread +/- 1/(spread*(1-r^2)), correction = r^2/(spread*(1-r^2))."""
    d = spec.spread
    r = spec.correlation
    one_minus = 1.0 - r * r
    k_plus = d + 1.0 / (d * one_minus)
    k_minus = d - 1.0 / (d * one_minus)
    correction = r * r / (d * one_minus)
    return d, r, k_plus, k_minus, correction


def decoherence_rate(spec: InitialStateSpec, cfg: OscillatorConfig) -> float:
    """Initial logarithmic growth rate of the off-diagonal spread coefficient:

        2 [ lam*(spread + corr)*C + mu*(spread - corr)*C
            - lam - mu - omega*r/(spread*sqrt(1 - r^2)) ]

    with ``corr = r^2/(spread*(1 - r^2))``.  May be <= 0 (no decoherence, e.g.
    the unsqueezed state at T=0).
    """
    d, r, _, _, correction = _terms(spec)
    c = cfg.coth_epsilon
    rate = (
        cfg.lam * (d + correction) * c
        + cfg.mu * (d - correction) * c
        - cfg.lam
        - cfg.mu
        - cfg.omega * r / (d * math.sqrt(1.0 - r * r))
    )
    return 2.0 * rate


def decoherence_time(spec: InitialStateSpec, cfg: OscillatorConfig) -> float:
    """Reciprocal of :func:`decoherence_rate`; ``+inf`` when the rate is <= 0
    (the state never loses coherence — e.g. spread=1, r=0 at T=0)."""
    rate = decoherence_rate(spec, cfg)
    if rate <= 0.0:
        return math.inf
    return 1.0 / rate


def decoherence_time_order(cfg: OscillatorConfig, s_qq0: float) -> float:
    """Order-of-magnitude decoherence time for coherences spread over the
    initial position dispersion: ``2 hbar / ((lam + mu) m omega s_qq0 C)``."""
    if s_qq0 <= 0.0:
        raise ValueError("initial position variance must be > 0")
    c = cfg.coth_epsilon
    denom = (cfg.lam + cfg.mu) * cfg.m * cfg.omega * s_qq0 * c
    if denom <= 0.0:
        return math.inf
    return 2.0 * cfg.hbar / denom


def _tau(cfg: OscillatorConfig) -> float:
    """High-temperature expansion parameter ``tau = 2kT/(hbar omega)`` (the
    reciprocal of the thermal exponent argument); 0 at T=0."""
    eps = cfg.epsilon
    if math.isinf(eps):
        return 0.0
    if eps == 0.0:
        return math.inf
    return 1.0 / eps


def decoherence_time_high_temperature(
    spec: InitialStateSpec, cfg: OscillatorConfig
) -> float:
    """High-temperature decoherence time: the dominant thermal part of the
    rate with the coth factor replaced by ``tau = 2kT/(hbar omega)``:

        1 / (2 tau [ lam*(spread + corr) + mu*(spread - corr) ])

    reducing to ``1/(2 (lam + mu) spread tau)`` for r=0.
    """
    d, _, _, _, correction = _terms(spec)
    tau = _tau(cfg)
    rate = 2.0 * tau * (cfg.lam * (d + correction) + cfg.mu * (d - correction))
    if rate <= 0.0:
        return math.inf
    return 1.0 / rate


def statistical_time(spec: InitialStateSpec, cfg: OscillatorConfig) -> float:
    """Time at which thermal (statistical) fluctuations of the uncertainty
    catch up with the quantum ones, in the high-temperature regime:

        1 / (2 tau [ lam*k_plus + mu*k_minus ])

    with ``k_plus/minus = spread +/- 1/(spread*(1 - r^2))``.  Diverges at T=0
    (tau = 0), where thermal fluctuations never take over.
    """
    _, _, k_plus, k_minus, _ = _terms(spec)
    tau = _tau(cfg)
    rate = 2.0 * tau * (cfg.lam * k_plus + cfg.mu * k_minus)
    if rate <= 0.0:
        return math.inf
    return 1.0 / rate


def relaxation_time(cfg: OscillatorConfig) -> float:
    """Energy-relaxation time scale, ``1/lam``; ``inf`` without damping."""
    if cfg.lam <= 0.0:
        return math.inf
    return 1.0 / cfg.lam


def gamma_short_time(
    spec: InitialStateSpec, cfg: OscillatorConfig, t: float
) -> float:
    """Short-time (linearized) off-diagonal spread coefficient:

        gamma(t) = (m omega / (4 hbar spread)) * (1 + decoherence_rate * t)

    valid for ``lam*t << 1``.  The value at t=0 is exactly the gamma of the
    initial correlated coherent state.
    """
    gamma0 = cfg.m * cfg.omega / (4.0 * cfg.hbar * spec.spread)
    return gamma0 * (1.0 + decoherence_rate(spec, cfg) * t)


def sigma_short_time(
    spec: InitialStateSpec, cfg: OscillatorConfig, t: float
) -> float:
    """Short-time (linearized) covariance determinant:

        sigma(t) = (hbar^2/4) * (1 + 2 [lam*k_plus*C + mu*k_minus*C - 2 lam] t)

    Slope zero for the unsqueezed state at T=0 (sigma stays minimal).
    """
    _, _, k_plus, k_minus, _ = _terms(spec)
    c = cfg.coth_epsilon
    slope = 2.0 * (cfg.lam * k_plus * c + cfg.mu * k_minus * c - 2.0 * cfg.lam)
    return (cfg.hbar * cfg.hbar / 4.0) * (1.0 + slope * t)


def pure_decoherence_factor(
    d: DiffusionCoefficients, q: float, qp: float, t: float, hbar: float = 1.0
) -> float:
    """Attenuation factor of the coherence between positions q and q' when
    momentum diffusion dominates: ``exp(-(d_pp/hbar^2) (q - q')^2 t)``.
    The diagonal (q = q') is untouched."""
    sep = q - qp
    return math.exp(-(d.d_pp / (hbar * hbar)) * sep * sep * t)


def pure_decoherence_decay(
    rho0_offdiag: complex,
    cfg: OscillatorConfig,
    d: DiffusionCoefficients,
    q: float,
    qp: float,
    t: float,
) -> complex:
    """Apply the pure-decoherence attenuation to an initial off-diagonal
    density-matrix value."""
    return rho0_offdiag * pure_decoherence_factor(d, q, qp, t, cfg.hbar)


def rate_ratio(cfg: OscillatorConfig, separation: float) -> float:
    """Decoherence rate over relaxation rate for a superposition separated by
    ``separation`` in position: ``(m omega / (2 hbar)) separation^2 C``,
    approximately ``m k T separation^2 / hbar^2`` at high temperature.

    An order-of-magnitude quantity; requires ``mu = 0`` (the pure
    momentum-diffusion regime in which the two rates share the factor lam).
    """
    if cfg.mu != 0.0:
        raise ValueError("rate_ratio is defined for mu = 0")
    c = cfg.coth_epsilon
    return (cfg.m * cfg.omega / (2.0 * cfg.hbar)) * separation * separation * c


@dataclass(frozen=True)
class RegimeReport:
    """Asymptotic uncertainty levels and the regime they indicate.

    ``sigma_be``        thermal (Bose-Einstein) value ``(hbar^2/4) C^2``;
    ``sigma_heisenberg``  quantum floor ``hbar^2/4``;
    ``sigma_mb``        classical high-temperature value ``(kT/omega)^2``.

    ``sigma_be`` interpolates between the other two: it equals the floor at
    T=0 and approaches ``sigma_mb`` as T grows.
    """

    sigma_be: float
    sigma_heisenberg: float
    sigma_mb: float
    regime: str  # "quantum" | "quantum-statistical" | "classical-statistical"

    def as_dict(self) -> dict:
        return {
            "sigma_be": self.sigma_be,
            "sigma_heisenberg": self.sigma_heisenberg,
            "sigma_mb": self.sigma_mb,
            "regime": self.regime,
        }


def regime_report(cfg: OscillatorConfig) -> RegimeReport:
    """Classify the asymptotic uncertainty regime.

    * ``quantum`` when C < 1.01 (essentially the pure-state floor),
    * ``classical-statistical`` when the thermal value agrees with the
      classical one to 1% (high temperature),
    * ``quantum-statistical`` in between.

    The 1% agreement bands are conventions of this library.
    """
    c = cfg.coth_epsilon
    quarter = cfg.hbar * cfg.hbar / 4.0
    sigma_be = math.inf if math.isinf(c) else quarter * c * c
    kt = cfg.thermal_energy
    sigma_mb = math.inf if math.isinf(kt) else (kt / cfg.omega) ** 2
    if c < 1.01:
        regime = "quantum"
    elif math.isinf(c) or abs(sigma_be / sigma_mb - 1.0) <= 0.01:
        regime = "classical-statistical"
    else:
        regime = "quantum-statistical"
    return RegimeReport(
        sigma_be=sigma_be,
        sigma_heisenberg=quarter,
        sigma_mb=sigma_mb,
        regime=regime,
    )


@dataclass(frozen=True)
class TimeScales:
    """The three time scales governing the quantum-to-classical transition.

    ``t_deco <= t_d <= t_rel`` in the typical open-system regime: coherences
    die first, thermal fluctuations take over next, energy relaxes last.
    ``variant`` records which formula produced ``t_deco``.
    """

    t_deco: float
    t_d: float
    t_rel: float
    variant: str  # "general" | "r0" | "high_T" | "high_T_r0" | "order-estimate"

    def __post_init__(self) -> None:
        for name in ("t_deco", "t_d", "t_rel"):
            value = getattr(self, name)
            if math.isnan(value) or value <= 0.0:
                raise ValueError(f"{name} must be positive (may be inf), got {value!r}")


def time_scales(
    spec: InitialStateSpec,
    cfg: OscillatorConfig,
    *,
    high_temperature: bool = False,
) -> TimeScales:
    """Bundle the decoherence, statistical, and relaxation times.

    With ``high_temperature=True`` the decoherence time uses the
    high-temperature reduction (tau in place of the coth factor).
    """
    r_zero = spec.correlation == 0.0
    if high_temperature:
        t_deco = decoherence_time_high_temperature(spec, cfg)
        variant = "high_T_r0" if r_zero else "high_T"
    else:
        t_deco = decoherence_time(spec, cfg)
        variant = "r0" if r_zero else "general"
    return TimeScales(
        t_deco=t_deco,
        t_d=statistical_time(spec, cfg),
        t_rel=relaxation_time(cfg),
        variant=variant,
    )
