"""Command-line front end.

Subcommands
    coeffs      print the bath diffusion coefficients for a configuration
    validate    run the physicality checks and print the report
    trajectory  emit the moment trajectory as CSV (closed/lyapunov/rk4/all)
    metrics     emit classicality metrics along the trajectory as CSV
    window      report classicality windows (JSON)
    deco        time-scale / regime report (text or JSON)
    figdata     regenerate the data grids behind the reference figures
    sweep       1- or 2-axis parameter sweeps to long-form CSV
    fpe         grid-solver runs with snapshot dumps and a JSON manifest
    selftest    run the acceptance suite, one verdict line per criterion

Exit codes: 0 success, 1 validation failure (bad input or failed physical
constraint), 2 numeric failure, 3 I/O failure.  All output is deterministic:
identical inputs give byte-identical files.
"""

from __future__ import annotations

import argparse
import contextlib
import json
import math
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import IO, Iterator, Sequence

import numpy as np

from .classicality import (
    closed_form_metric_evaluator,
    find_windows,
    metrics_from_state,
    one_sigma_contour,
    write_metrics_csv,
)
from .config_io import ConfigError, build_model, load_config_file
from .decoherence import (
    decoherence_rate,
    decoherence_time,
    rate_ratio,
    regime_report,
    relaxation_time,
    statistical_time,
    time_scales,
)
from .fpe import FpeRunSpec, grid_linf_diff, run_fpe
from .model import (
    DiffusionCoefficients,
    InitialStateSpec,
    NumericError,
    OscillatorConfig,
    TemperatureSpec,
    initial_state,
    thermal_coefficients,
    validate,
)
from .propagate import (
    TRAJECTORY_HEADER,
    Trajectory,
    format_float,
    integrate_moments_rk4,
    mean_closed_form,
    sigma_det_closed,
    sigma_pq_closed,
    trajectory_lyapunov,
)
from .states import (
    GridGeometry,
    PhaseSpaceGrid,
    density_grid,
    geometry_for_states,
    render_grid,
    stationary_density,
    stationary_grid,
)
from .propagate import asymptotic_covariance

PROG = "lindosc"

__all__ = ["main", "json_safe", "PROG"]


# --------------------------------------------------------------------------- #
# plumbing
# --------------------------------------------------------------------------- #


class _Parser(argparse.ArgumentParser):
    """Argument errors surface as validation failures (exit 1), not the
    argparse default of exit 2 (2 is reserved for numeric failures here)."""

    def error(self, message: str) -> None:  # type: ignore[override]
        raise ConfigError(message)


def json_safe(obj):
    """Recursively replace non-finite floats with the strings ``"inf"``,
    ``"-inf"``, ``"nan"`` so JSON stays portable."""
    if isinstance(obj, float):
        if math.isinf(obj):
            return "inf" if obj > 0 else "-inf"
        if math.isnan(obj):
            return "nan"
        return obj
    if isinstance(obj, dict):
        return {k: json_safe(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [json_safe(v) for v in obj]
    return obj


@contextlib.contextmanager
def _open_out(target: str | None) -> Iterator[IO[str]]:
    if target is None or target == "-":
        yield sys.stdout
    else:
        with open(target, "w", encoding="utf-8", newline="\n") as handle:
            yield handle


def _emit_json(payload, target: str | None) -> None:
    text = json.dumps(json_safe(payload), indent=2, sort_keys=True) + "\n"
    with _open_out(target) as handle:
        handle.write(text)


def _add_model_flags(parser: argparse.ArgumentParser) -> None:
    group = parser.add_argument_group("model parameters")
    group.add_argument("--config", metavar="FILE", help="key=value config file")
    group.add_argument("--m", type=float, help="mass (default 1)")
    group.add_argument("--omega", type=float, help="oscillator frequency (default 1)")
    group.add_argument(
        "--lambda", dest="lam", type=float, help="friction constant (default 0)"
    )
    group.add_argument("--mu", type=float, help="friction asymmetry (default 0)")
    group.add_argument("--hbar", type=float, help="hbar (default 1)")
    group.add_argument(
        "--coth", type=float, help="thermal coth factor C (exclusive with --temp)"
    )
    group.add_argument(
        "--temp", type=float, help="bath temperature (exclusive with --coth)"
    )
    group.add_argument(
        "--delta-sq", dest="spread", type=float, help="initial squeezing delta"
    )
    group.add_argument(
        "--corr-r", dest="corr", type=float, help="initial correlation r"
    )
    group.add_argument("--q0", type=float, help="initial mean coordinate")
    group.add_argument("--p0", type=float, help="initial mean momentum")
    group.add_argument(
        "--closed",
        action="store_true",
        help="closed system (forces lambda = mu = 0)",
    )


def _model_from_args(args) -> tuple[OscillatorConfig, InitialStateSpec]:
    file_values = load_config_file(args.config) if args.config else {}
    overrides = {
        "m": args.m,
        "omega": args.omega,
        "lambda": args.lam,
        "mu": args.mu,
        "hbar": args.hbar,
        "temp.C": args.coth,
        "temp.T": args.temp,
        "init.delta": args.spread,
        "init.r": args.corr,
        "init.q0": args.q0,
        "init.p0": args.p0,
    }
    if args.closed:
        for key in ("lambda", "mu"):
            if overrides[key] not in (None, 0.0):
                raise ConfigError("--closed conflicts with nonzero --lambda/--mu")
            overrides[key] = 0.0
    return build_model(file_values, overrides)


def _coefficients(cfg: OscillatorConfig) -> DiffusionCoefficients:
    return thermal_coefficients(cfg)  # returns zeros for a closed system


def _time_grid(t_end: float, dt: float) -> list[float]:
    if t_end < 0.0:
        raise ValueError("t-end must be >= 0")
    if dt <= 0.0:
        raise ValueError("dt must be > 0")
    n = int(math.floor(t_end / dt + 1e-9))
    times = [i * dt for i in range(n + 1)]
    if times[-1] < t_end - 1e-12 * max(1.0, t_end):
        times.append(t_end)
    return times


# --------------------------------------------------------------------------- #
# simple reports
# --------------------------------------------------------------------------- #


def _cmd_coeffs(args) -> int:
    cfg, _ = _model_from_args(args)
    d = _coefficients(cfg)
    payload = {"d_pp": d.d_pp, "d_qq": d.d_qq, "d_pq": d.d_pq}
    if args.json:
        _emit_json(payload, args.out)
    else:
        with _open_out(args.out) as handle:
            for key in ("d_pp", "d_qq", "d_pq"):
                handle.write(f"{key} = {format_float(payload[key])}\n")
    return 0


def _cmd_validate(args) -> int:
    cfg, _ = _model_from_args(args)
    report = validate(cfg)
    with _open_out(args.out) as handle:
        handle.write(str(report) + "\n")
    return 0 if report.ok else 1


def _cmd_deco(args) -> int:
    cfg, spec = _model_from_args(args)
    scales = time_scales(spec, cfg, high_temperature=args.high_t)
    regime = regime_report(cfg)
    payload: dict[str, object] = {
        "m": cfg.m,
        "omega": cfg.omega,
        "lambda": cfg.lam,
        "mu": cfg.mu,
        "hbar": cfg.hbar,
        "coth_C": cfg.coth_epsilon,
        "delta": spec.spread,
        "r": spec.correlation,
        "rate": decoherence_rate(spec, cfg),
        "t_deco": scales.t_deco,
        "t_d": scales.t_d,
        "t_rel": scales.t_rel,
        "variant": scales.variant,
        "sigma_be": regime.sigma_be,
        "sigma_heisenberg": regime.sigma_heisenberg,
        "sigma_mb": regime.sigma_mb,
        "regime": regime.regime,
    }
    if args.separation is not None:
        payload["separation"] = args.separation
        payload["rate_ratio"] = rate_ratio(cfg, args.separation)
    if args.json:
        _emit_json(payload, args.out)
    else:
        with _open_out(args.out) as handle:
            for key, value in payload.items():
                text = value if isinstance(value, str) else format_float(float(value))
                handle.write(f"{key} = {text}\n")
    return 0


# --------------------------------------------------------------------------- #
# trajectory / metrics / window
# --------------------------------------------------------------------------- #


def _closed_rows(
    spec: InitialStateSpec, cfg: OscillatorConfig, times: Sequence[float]
) -> list[tuple[float, ...]]:
    state0 = initial_state(spec, cfg)
    rows = []
    for t in times:
        q, p = mean_closed_form(state0, cfg, t)
        s_pq = sigma_pq_closed(spec, cfg, t)
        sigma = sigma_det_closed(spec, cfg, t)
        rows.append((t, q, p, math.nan, math.nan, s_pq, sigma))
    return rows


def _write_rows(handle: IO[str], header: str, rows) -> None:
    handle.write(header + "\n")
    for row in rows:
        handle.write(",".join(format_float(float(x)) for x in row) + "\n")


def _cmd_trajectory(args) -> int:
    cfg, spec = _model_from_args(args)
    d = _coefficients(cfg)
    state0 = initial_state(spec, cfg)
    times = _time_grid(args.t_end, args.dt)

    if args.route == "closed":
        with _open_out(args.out) as handle:
            _write_rows(handle, TRAJECTORY_HEADER, _closed_rows(spec, cfg, times))
        return 0
    if args.route == "lyapunov":
        traj = trajectory_lyapunov(state0, cfg, d, times)
        with _open_out(args.out) as handle:
            traj.to_csv(handle)
        return 0
    if args.route == "rk4":
        traj = integrate_moments_rk4(state0, cfg, d, args.t_end, args.dt)
        with _open_out(args.out) as handle:
            traj.to_csv(handle)
        return 0

    # route == "all": pinned columns from the exact propagation, plus the
    # worst per-row cross-route deviation (amplitude-normalized per quantity).
    n = int(round(args.t_end / args.dt))
    if args.t_end > 0 and abs(n * args.dt - args.t_end) > 1e-9 * max(1.0, args.t_end):
        raise ValueError("route=all needs t-end to be an integer multiple of dt")
    times = [i * args.dt for i in range(n + 1)]
    lyap = trajectory_lyapunov(state0, cfg, d, times)
    closed = _closed_rows(spec, cfg, times)
    if n == 0:
        rk4 = Trajectory(states=(state0,), provenance="rk4-oracle")
    else:
        sub = max(1, math.ceil(args.dt / 2e-3))
        rk4 = integrate_moments_rk4(
            state0, cfg, d, args.t_end, args.dt / sub, record_every=sub
        )
    if len(rk4) != len(times):
        raise NumericError("route grids fell out of alignment")

    def amplitude(values: Sequence[float]) -> float:
        peak = max(abs(v) for v in values)
        return peak if peak > 0.0 else 1.0

    scale_q = amplitude([s.mean_q for s in lyap])
    scale_p = amplitude([s.mean_p for s in lyap])
    scale_pq = amplitude([s.s_pq for s in lyap])
    scale_det = amplitude([s.sigma_det for s in lyap])
    scale_sqq = amplitude([s.s_qq for s in lyap])
    scale_spp = amplitude([s.s_pp for s in lyap])

    rows = []
    for i, s in enumerate(lyap):
        _, cq, cp, _, _, cpq, cdet = closed[i]
        r = rk4[i]
        dev = max(
            abs(s.mean_q - cq) / scale_q,
            abs(s.mean_p - cp) / scale_p,
            abs(s.s_pq - cpq) / scale_pq,
            abs(s.sigma_det - cdet) / scale_det,
            abs(s.mean_q - r.mean_q) / scale_q,
            abs(s.mean_p - r.mean_p) / scale_p,
            abs(s.s_qq - r.s_qq) / scale_sqq,
            abs(s.s_pp - r.s_pp) / scale_spp,
            abs(s.s_pq - r.s_pq) / scale_pq,
            abs(s.sigma_det - r.sigma_det) / scale_det,
        )
        rows.append(
            (s.t, s.mean_q, s.mean_p, s.s_qq, s.s_pp, s.s_pq, s.sigma_det, dev)
        )
    with _open_out(args.out) as handle:
        _write_rows(handle, TRAJECTORY_HEADER + ",max_route_dev", rows)
    return 0


def _cmd_metrics(args) -> int:
    cfg, spec = _model_from_args(args)
    d = _coefficients(cfg)
    state0 = initial_state(spec, cfg)
    times = _time_grid(args.t_end, args.dt)
    traj = trajectory_lyapunov(state0, cfg, d, times)
    metrics = [metrics_from_state(s, hbar=cfg.hbar) for s in traj]
    with _open_out(args.out) as handle:
        write_metrics_csv(metrics, handle)
    return 0


def _cmd_window(args) -> int:
    cfg, spec = _model_from_args(args)
    windows = find_windows(
        spec,
        cfg,
        args.t_end,
        args.dt,
        args.qd_threshold,
        args.cc_threshold,
    )
    payload = {
        "qd_threshold": args.qd_threshold,
        "cc_threshold": args.cc_threshold,
        "t_end": args.t_end,
        "dt": args.dt,
        "windows": [[a, b] for a, b in windows],
        "count": len(windows),
        "empty": not windows,
    }
    _emit_json(payload, args.out)
    return 0


# --------------------------------------------------------------------------- #
# figure data
# --------------------------------------------------------------------------- #

_FIGURES = ("1", "2a", "2b", "3a", "3b", "3c", "4a", "4b")


def _figure_cfg(c: float) -> OscillatorConfig:
    return OscillatorConfig(
        m=1.0,
        omega=1.0,
        lam=0.2,
        mu=0.1,
        hbar=1.0,
        temp=TemperatureSpec.from_coth(c),
    )


def _write_fig1(out_dir: Path, n_time: int) -> list[Path]:
    cfg = _figure_cfg(3.0)
    files = []
    spec = InitialStateSpec(spread=1.0, correlation=0.0, center_q=6.0, center_p=4.0)
    state0 = initial_state(spec, cfg)
    path = out_dir / "fig1_trajectory.csv"
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        handle.write("t,mean_q,mean_p\n")
        for i in range(n_time):
            t = 14.0 * i / (n_time - 1)
            q, p = mean_closed_form(state0, cfg, t)
            handle.write(
                ",".join(format_float(x) for x in (t, q, p)) + "\n"
            )
    files.append(path)
    for spread in (1.0, 4.0):
        contour_spec = InitialStateSpec(
            spread=spread, correlation=0.0, center_q=6.0, center_p=4.0
        )
        points = one_sigma_contour(initial_state(contour_spec, cfg))
        path = out_dir / f"fig1_contour_delta{int(spread)}.csv"
        with open(path, "w", encoding="utf-8", newline="\n") as handle:
            handle.write("q,p\n")
            for q, p in points:
                handle.write(f"{format_float(q)},{format_float(p)}\n")
        files.append(path)
    return files


def _write_fig2(out_dir: Path, which: str, n_time: int) -> list[Path]:
    spec = InitialStateSpec(spread=4.0, correlation=0.0)
    c_values = [1.0 + 5.0 * i / 50 for i in range(51)]
    t_values = [20.0 * i / (n_time - 1) for i in range(n_time)]
    column = "delta_qd" if which == "2a" else "delta_cc"
    path = out_dir / f"fig{which}.csv"
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        handle.write(f"C,t,{column}\n")
        for c in c_values:
            evaluate = closed_form_metric_evaluator(spec, _figure_cfg(c))
            for t in t_values:
                qd, cc = evaluate(t)
                value = qd if which == "2a" else cc
                handle.write(
                    ",".join(format_float(x) for x in (c, t, value)) + "\n"
                )
    return [path]


def _density_figure(which: str, n: int) -> PhaseSpaceGrid:
    spec = InitialStateSpec(spread=4.0, correlation=0.0)
    if which == "3a":
        cfg = _figure_cfg(3.0)
        state0 = initial_state(spec, cfg)
        bound = 6.0 * math.sqrt(state0.s_qq)
        values, _ = density_grid(state0, -bound, bound, n, hbar=cfg.hbar)
        values = np.abs(values)
    else:
        cfg = _figure_cfg(3.0 if which == "3b" else 20.0)
        std = math.sqrt(cfg.hbar * cfg.coth_epsilon / (2.0 * cfg.m * cfg.omega))
        bound = 6.0 * std
        step = 2.0 * bound / n
        axis = -bound + (np.arange(n) + 0.5) * step
        values = np.asarray(
            stationary_density(cfg, axis[:, None], axis[None, :]), dtype=float
        )
    geom = GridGeometry(-bound, bound, -bound, bound, n, n)
    return PhaseSpaceGrid(geom=geom, values=values)


def _wigner_figure(which: str, n: int) -> PhaseSpaceGrid:
    cfg = _figure_cfg(3.0)
    if which == "4a":
        state0 = initial_state(InitialStateSpec(spread=4.0, correlation=0.0), cfg)
        geom = geometry_for_states([state0], n)
        return render_grid(state0, geom)
    return stationary_grid(cfg, n)


def _cmd_figdata(args) -> int:
    if args.t_samples < 2:
        raise ValueError("t-samples must be >= 2")
    if args.n < 3:
        raise ValueError("n must be >= 3")
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    figures = _FIGURES if args.figure == "all" else (args.figure,)
    written: list[Path] = []
    for figure in figures:
        if figure == "1":
            written += _write_fig1(out_dir, args.t_samples)
        elif figure in ("2a", "2b"):
            written += _write_fig2(out_dir, figure, args.t_samples)
        elif figure in ("3a", "3b", "3c"):
            grid = _density_figure(figure, args.n)
            path = out_dir / f"fig{figure}.csv"
            grid.to_csv(path)
            written.append(path)
        else:  # 4a / 4b
            grid = _wigner_figure(figure, args.n)
            path = out_dir / f"fig{figure}.csv"
            grid.to_csv(path)
            written.append(path)
    for path in written:
        print(path)
    return 0


# --------------------------------------------------------------------------- #
# sweep
# --------------------------------------------------------------------------- #

_SWEEP_AXES = ("lambda", "mu", "delta", "r", "C", "t")
_SWEEP_RECORDS = (
    "delta_qd",
    "delta_cc",
    "sigma_det",
    "sigma_pq",
    "t_deco",
    "t_d",
    "t_rel",
)


@dataclass(frozen=True)
class SweepAxis:
    """One swept parameter: name, inclusive bounds, sample count, spacing."""

    name: str
    lo: float
    hi: float
    count: int
    log: bool = False

    def __post_init__(self) -> None:
        if self.name not in _SWEEP_AXES:
            raise ValueError(
                f"unknown sweep axis {self.name!r}; choose from {_SWEEP_AXES}"
            )
        if self.count < 1:
            raise ValueError("axis count must be >= 1")
        if self.log and (self.lo <= 0.0 or self.hi <= 0.0):
            raise ValueError("log spacing needs positive bounds")

    def values(self) -> list[float]:
        if self.count == 1:
            return [self.lo]
        if self.log:
            ratio = (self.hi / self.lo) ** (1.0 / (self.count - 1))
            return [self.lo * ratio**i for i in range(self.count)]
        step = (self.hi - self.lo) / (self.count - 1)
        return [self.lo + step * i for i in range(self.count)]


@dataclass(frozen=True)
class SweepSpec:
    """Axes (1 or 2), quantities to record, and the evaluation time for the
    state-dependent quantities."""

    axes: tuple[SweepAxis, ...]
    records: tuple[str, ...]
    t: float = 0.0

    def __post_init__(self) -> None:
        if not 1 <= len(self.axes) <= 2:
            raise ValueError("sweeps take one or two axes")
        names = [axis.name for axis in self.axes]
        if len(set(names)) != len(names):
            raise ValueError("sweep axes must be distinct")
        if not self.records:
            raise ValueError("nothing to record")
        for record in self.records:
            if record not in _SWEEP_RECORDS:
                raise ValueError(
                    f"unknown record {record!r}; choose from {_SWEEP_RECORDS}"
                )


def parse_sweep_axis(text: str) -> SweepAxis:
    """Parse ``name:min:max:count[:log]``."""
    parts = text.split(":")
    if len(parts) not in (4, 5):
        raise ValueError(f"axis spec {text!r} is not name:min:max:count[:log]")
    log = False
    if len(parts) == 5:
        if parts[4] != "log":
            raise ValueError(f"axis spec {text!r}: fifth field must be 'log'")
        log = True
    try:
        lo, hi, count = float(parts[1]), float(parts[2]), int(parts[3])
    except ValueError as exc:
        raise ValueError(f"axis spec {text!r}: bad numbers") from exc
    return SweepAxis(name=parts[0], lo=lo, hi=hi, count=count, log=log)


def _sweep_point(
    base_cfg: OscillatorConfig,
    base_spec: InitialStateSpec,
    assignments: dict[str, float],
    records: tuple[str, ...],
    t_default: float,
) -> list[float]:
    lam = assignments.get("lambda", base_cfg.lam)
    mu = assignments.get("mu", base_cfg.mu)
    temp = (
        TemperatureSpec.from_coth(assignments["C"])
        if "C" in assignments
        else base_cfg.temp
    )
    cfg = OscillatorConfig(
        m=base_cfg.m,
        omega=base_cfg.omega,
        lam=lam,
        mu=mu,
        hbar=base_cfg.hbar,
        boltzmann=base_cfg.boltzmann,
        temp=temp,
        closed_system=(lam == 0.0 and mu == 0.0),
    )
    spec = InitialStateSpec(
        spread=assignments.get("delta", base_spec.spread),
        correlation=assignments.get("r", base_spec.correlation),
        center_q=base_spec.center_q,
        center_p=base_spec.center_p,
    )
    t = assignments.get("t", t_default)
    values = []
    for record in records:
        if record == "t_deco":
            values.append(decoherence_time(spec, cfg))
        elif record == "t_d":
            values.append(statistical_time(spec, cfg))
        elif record == "t_rel":
            values.append(relaxation_time(cfg))
        else:
            sigma = sigma_det_closed(spec, cfg, t)
            if record == "sigma_det":
                values.append(sigma)
            elif record == "sigma_pq":
                values.append(sigma_pq_closed(spec, cfg, t))
            elif record == "delta_qd":
                values.append(cfg.hbar / (2.0 * math.sqrt(sigma)))
            else:  # delta_cc
                s_pq = sigma_pq_closed(spec, cfg, t)
                values.append(
                    math.inf if s_pq == 0.0 else math.sqrt(sigma) / abs(s_pq)
                )
    return values


def run_sweep(
    sweep: SweepSpec,
    base_cfg: OscillatorConfig,
    base_spec: InitialStateSpec,
    handle: IO[str],
) -> None:
    """Evaluate the sweep grid row-major (first axis slow) into CSV.

    Points where the parameter combination is invalid (e.g. |mu| >= omega, so
    the motion is no longer underdamped, or C below 1) record ``nan`` for
    every quantity rather than aborting the sweep.
    """
    names = [axis.name for axis in sweep.axes]
    handle.write(",".join(names + list(sweep.records)) + "\n")
    grids = [axis.values() for axis in sweep.axes]
    if len(grids) == 1:
        points = [(v,) for v in grids[0]]
    else:
        points = [(a, b) for a in grids[0] for b in grids[1]]
    for point in points:
        assignments = dict(zip(names, point))
        try:
            values = _sweep_point(
                base_cfg, base_spec, assignments, sweep.records, sweep.t
            )
        except ValueError:
            values = [math.nan] * len(sweep.records)
        row = list(point) + values
        handle.write(",".join(format_float(float(x)) for x in row) + "\n")


def _cmd_sweep(args) -> int:
    cfg, spec = _model_from_args(args)
    axes = tuple(parse_sweep_axis(text) for text in args.axis)
    records = tuple(
        record.strip() for chunk in args.record for record in chunk.split(",")
    )
    sweep = SweepSpec(axes=axes, records=records, t=args.t)
    with _open_out(args.out) as handle:
        run_sweep(sweep, cfg, spec, handle)
    return 0


# --------------------------------------------------------------------------- #
# grid solver
# --------------------------------------------------------------------------- #


def _cmd_fpe(args) -> int:
    cfg, spec = _model_from_args(args)
    d = _coefficients(cfg)
    if args.stationary:
        w0 = stationary_grid(cfg, args.grid_n, coverage=args.coverage)
        initial_desc: dict[str, object] = {"stationary": True}
    else:
        state0 = initial_state(spec, cfg)
        cover = [state0]
        if cfg.lam > 0.0 and not math.isinf(cfg.coth_epsilon):
            cover.append(asymptotic_covariance(cfg))
        geom = geometry_for_states(cover, args.grid_n, coverage=args.coverage)
        w0 = render_grid(state0, geom)
        initial_desc = {
            "stationary": False,
            "delta": spec.spread,
            "r": spec.correlation,
            "q0": spec.center_q,
            "p0": spec.center_p,
        }

    snapshots: tuple[float, ...] = ()
    if args.snapshots:
        snapshots = tuple(float(x) for x in args.snapshots.split(","))
    run = FpeRunSpec(
        t_end=args.t_end, dt=args.dt, snapshot_times=snapshots, safety=args.safety
    )
    result = run_fpe(w0, cfg, d, run)

    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    w0.to_csv(out_dir / "initial.csv")
    result.final.to_csv(out_dir / "final.csv")
    snapshot_files = {}
    for t, grid in result.snapshots:
        name = f"snapshot_{format_float(t)}.csv"
        grid.to_csv(out_dir / name)
        snapshot_files[format_float(t)] = name
    drift = grid_linf_diff(result.final, w0)
    manifest = {
        "config": {
            "m": cfg.m,
            "omega": cfg.omega,
            "lambda": cfg.lam,
            "mu": cfg.mu,
            "hbar": cfg.hbar,
            "coth_C": cfg.coth_epsilon,
            "closed": cfg.closed_system,
        },
        "coefficients": {"d_pp": d.d_pp, "d_qq": d.d_qq, "d_pq": d.d_pq},
        "initial": initial_desc,
        "run": result.summary(),
        "linf_drift_vs_initial": drift,
        "files": {
            "initial": "initial.csv",
            "final": "final.csv",
            "snapshots": snapshot_files,
        },
    }
    manifest_path = out_dir / "manifest.json"
    with open(manifest_path, "w", encoding="utf-8", newline="\n") as handle:
        handle.write(json.dumps(json_safe(manifest), indent=2, sort_keys=True) + "\n")
    print(f"linf_drift_vs_initial = {format_float(drift)}")
    print(manifest_path)
    return 0


# --------------------------------------------------------------------------- #
# selftest
# --------------------------------------------------------------------------- #


def _cmd_selftest(args) -> int:
    from .acceptance import run_acceptance

    results = run_acceptance()
    failed = 0
    for result in results:
        status = "PASS" if result.passed else "FAIL"
        print(f"{status}  {result.name}: {result.detail}")
        if not result.passed:
            failed += 1
    print(f"{len(results) - failed}/{len(results)} criteria passed")
    return 0 if failed == 0 else 1


# --------------------------------------------------------------------------- #
# parser assembly
# --------------------------------------------------------------------------- #


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog=PROG, description=__doc__.split("\n", 1)[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name: str, func, help_text: str, model: bool = True):
        p = sub.add_parser(name, help=help_text)
        if model:
            _add_model_flags(p)
        p.set_defaults(func=func)
        return p

    p = add("coeffs", _cmd_coeffs, "print bath diffusion coefficients")
    p.add_argument("--json", action="store_true")
    p.add_argument("--out", default="-")

    p = add("validate", _cmd_validate, "run physicality checks")
    p.add_argument("--out", default="-")

    p = add("trajectory", _cmd_trajectory, "emit moment trajectory CSV")
    p.add_argument("--t-end", dest="t_end", type=float, default=10.0)
    p.add_argument("--dt", type=float, default=0.01)
    p.add_argument(
        "--route",
        choices=("closed", "lyapunov", "rk4", "all"),
        default="lyapunov",
    )
    p.add_argument("--out", default="-")

    p = add("metrics", _cmd_metrics, "emit classicality metrics CSV")
    p.add_argument("--t-end", dest="t_end", type=float, default=20.0)
    p.add_argument("--dt", type=float, default=0.01)
    p.add_argument("--out", default="-")

    p = add("window", _cmd_window, "report classicality windows (JSON)")
    p.add_argument("--t-end", dest="t_end", type=float, default=20.0)
    p.add_argument("--dt", type=float, default=0.01)
    p.add_argument(
        "--qd-threshold", dest="qd_threshold", type=float, default=0.99
    )
    p.add_argument(
        "--cc-threshold", dest="cc_threshold", type=float, default=10.0
    )
    p.add_argument("--out", default="-")

    p = add("deco", _cmd_deco, "time-scale and regime report")
    p.add_argument("--high-T", dest="high_t", action="store_true")
    p.add_argument("--separation", type=float)
    p.add_argument("--json", action="store_true")
    p.add_argument("--out", default="-")

    p = add("figdata", _cmd_figdata, "regenerate figure data files", model=False)
    p.add_argument("figure", choices=_FIGURES + ("all",))
    p.add_argument("--out-dir", dest="out_dir", required=True)
    p.add_argument("--n", type=int, default=201, help="grid points per axis")
    p.add_argument(
        "--t-samples", dest="t_samples", type=int, default=561,
        help="time samples for the trajectory/surface figures",
    )

    p = add("sweep", _cmd_sweep, "parameter sweep to long-form CSV")
    p.add_argument(
        "--axis",
        action="append",
        required=True,
        metavar="NAME:MIN:MAX:COUNT[:log]",
        help=f"swept parameter, one or two axes; names: {', '.join(_SWEEP_AXES)}",
    )
    p.add_argument(
        "--record",
        action="append",
        required=True,
        metavar="NAME[,NAME...]",
        help=f"quantities to record: {', '.join(_SWEEP_RECORDS)}",
    )
    p.add_argument("--t", type=float, default=0.0, help="evaluation time")
    p.add_argument("--out", default="-")

    p = add("fpe", _cmd_fpe, "grid-solver run with manifest")
    p.add_argument("--grid-n", dest="grid_n", type=int, default=256)
    p.add_argument("--coverage", type=float, default=6.0)
    p.add_argument("--t-end", dest="t_end", type=float, default=1.0)
    p.add_argument("--dt", type=float)
    p.add_argument("--snapshots", help="comma-separated snapshot times")
    p.add_argument("--safety", type=float, default=0.5)
    p.add_argument("--stationary", action="store_true")
    p.add_argument("--out-dir", dest="out_dir", required=True)

    add("selftest", _cmd_selftest, "run the acceptance suite", model=False)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except NumericError as exc:
        print(f"{PROG}: numeric failure: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"{PROG}: i/o failure: {exc}", file=sys.stderr)
        return 3
    except ValueError as exc:
        print(f"{PROG}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
