"""Command-line front end for segmented-channel sweeps.

Subcommands: gamma (dephasing exponent tables), gfun (damping amplitude
tables), simulate (full metric sweeps), classify (Markovianity report),
zeno (rate-vs-dwell-time tables), figure (bundled demonstration presets,
rendered to CSV plus a PNG report).

All output tables are UTF-8 CSV with a single header row, LF line endings,
and 12-significant-digit numbers.  Times are dimensionless: the thermal
correlation time is the unit for dephasing baths, the inverse free decay
rate for the damping channel.

Exit codes: 0 success, 2 usage or validation error, 3 numerical failure;
classify instead encodes its verdict as 10 (time-independent Markovian),
11 (time-dependent Markovian), or 12 (non-Markovian).
"""

from __future__ import annotations

import argparse
import math
import sys
from pathlib import Path
from typing import Callable, Mapping, Sequence

import numpy as np

from . import baths, plotting, sweep
from .states import TwoQubitPure, bell_pair, plus_state, pure_qubit_density

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_NUMERICAL = 3
CLASSIFICATION_EXIT_CODES = {
    baths.MarkovClass.TIME_INDEPENDENT_MARKOVIAN: 10,
    baths.MarkovClass.TIME_DEPENDENT_MARKOVIAN: 11,
    baths.MarkovClass.NON_MARKOVIAN: 12,
}

DEPHASING_BATHS = ("thermal", "vacuum", "squeezed", "constant")
ALL_BATHS = DEPHASING_BATHS + ("lorentzian",)

# forward-difference step used for the rate column at t = 0, and the point
# below which the central difference is pivoted on the origin
RATE_T_FLOOR = 1e-8

GRID_EPS = 1e-9
AMPLITUDE_NORM_TOL = 1e-6

# Demonstration presets; manifests/*.cfg mirror these exactly, so
# `figure NAME` and `simulate --config manifests/NAME.cfg` agree byte for
# byte.  Keys are long flag names.
PRESETS: dict[str, dict[str, str]] = {
    "fig2": {
        "channel": "dephasing",
        "bath": "thermal",
        "omega-tau": "20",
        "dt": "0.025,0.05,0.1",
        "t": "0.1:1:0.1",
    },
    "fig3": {
        "channel": "dephasing",
        "bath": "squeezed",
        "omega-tau": "20",
        "r0": "3",
        "omega0": "10",
        "sigma": "0.5",
        "theta": "0.7853981633974483",
        "dt": "0.025,0.05,0.1",
        "t": "0.1:1:0.1",
    },
    "fig4": {
        "channel": "damping",
        "lam": "200",
        "detuning": "40",
        "dt": "0.05,0.2,0.5",
        "t": "1:8:1",
    },
}


class UsageError(Exception):
    """Bad arguments or configuration; maps to exit code 2."""


class NumericalFailure(Exception):
    """Evaluation hit a singularity or lost convergence; maps to exit code 3."""


_fmt = sweep.format_number


# --- configuration files ----------------------------------------------------

def _read_config(path: str) -> list[str]:
    """Turn a key=value file into a flag list (true/false toggle bare flags)."""
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"cannot read config file {path}: {exc}") from None
    flags: list[str] = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{lineno}: expected key=value, got {raw.strip()!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        key = key.replace("_", "-")
        if not key:
            raise UsageError(f"{path}:{lineno}: empty key")
        if key == "config":
            raise UsageError(f"{path}:{lineno}: config files cannot nest")
        if value.lower() == "true":
            flags.append(f"--{key}")
        elif value.lower() == "false":
            pass
        else:
            flags.extend([f"--{key}", value])
    return flags


def _expand_configs(argv: list[str]) -> list[str]:
    """Splice config-file flags in ahead of explicit flags, so flags win."""
    if not argv:
        return argv
    head, rest = argv[0], argv[1:]
    from_files: list[str] = []
    kept: list[str] = []
    i = 0
    while i < len(rest):
        token = rest[i]
        if token == "--config":
            if i + 1 >= len(rest):
                raise UsageError("--config requires a file path")
            from_files.extend(_read_config(rest[i + 1]))
            i += 2
        elif token.startswith("--config="):
            from_files.extend(_read_config(token.split("=", 1)[1]))
            i += 1
        else:
            kept.append(token)
            i += 1
    return [head] + from_files + kept


# --- argument parsing helpers ----------------------------------------------

def _parse_grid(text: str, what: str) -> list[float]:
    """'a:b:s' -> inclusive arithmetic grid; a bare number -> single point."""
    try:
        if ":" not in text:
            return [float(text)]
        parts = text.split(":")
        if len(parts) != 3:
            raise ValueError
        a, b, s = (float(p) for p in parts)
    except ValueError:
        raise UsageError(
            f"{what} must be 'a:b:s' or a single number, got {text!r}") from None
    if not s > 0.0:
        raise UsageError(f"{what} step must be positive, got {s:g}")
    if b < a:
        raise UsageError(f"{what} has end {b:g} before start {a:g}")
    count = int(math.floor((b - a) / s + GRID_EPS)) + 1
    return [a + k * s for k in range(count)]


def _parse_float_list(text: str, what: str) -> list[float]:
    try:
        values = [float(part) for part in text.split(",") if part.strip()]
    except ValueError:
        raise UsageError(f"{what} must be comma-separated numbers, got {text!r}") from None
    if not values:
        raise UsageError(f"{what} is empty")
    return values


def _parse_dt_list(text: str) -> tuple[float, ...]:
    """Dwell times for simulate: positive, distinct, returned ascending."""
    values = _parse_float_list(text, "--dt")
    if min(values) <= 0.0:
        raise UsageError(f"dwell times must be positive, got {min(values):g}")
    if len(set(values)) != len(values):
        raise UsageError(f"dwell times must be distinct, got {text!r}")
    return tuple(sorted(values))


def _parse_complex_list(text: str, expected: int, what: str) -> list[complex]:
    parts = [part.strip() for part in text.split(",")]
    if len(parts) != expected:
        raise UsageError(f"{what} needs {expected} comma-separated amplitudes, got {len(parts)}")
    try:
        return [complex(part) for part in parts]
    except ValueError:
        raise UsageError(f"{what} has a malformed complex amplitude in {text!r}") from None


def _parse_state(text: str) -> np.ndarray:
    """Initial qubit: '+', '0', '1', or two complex amplitudes 'c0,c1'."""
    if text == "+":
        return plus_state()
    if text == "0":
        return pure_qubit_density(1.0, 0.0)
    if text == "1":
        return pure_qubit_density(0.0, 1.0)
    c0, c1 = _parse_complex_list(text, 2, "--state")
    norm_sq = abs(c0) ** 2 + abs(c1) ** 2
    if abs(norm_sq - 1.0) > AMPLITUDE_NORM_TOL:
        raise UsageError(f"--state amplitudes have norm^2 = {norm_sq:.6g}, expected 1")
    scale = 1.0 / math.sqrt(norm_sq)
    return pure_qubit_density(c0 * scale, c1 * scale)


def _parse_pair(text: str) -> TwoQubitPure:
    """Initial pair: 'bell' or four complex amplitudes 'a,b,c,d'."""
    if text == "bell":
        return bell_pair()
    a, b, c, d = _parse_complex_list(text, 4, "--pair")
    norm_sq = abs(a) ** 2 + abs(b) ** 2 + abs(c) ** 2 + abs(d) ** 2
    if abs(norm_sq - 1.0) > AMPLITUDE_NORM_TOL:
        raise UsageError(f"--pair amplitudes have norm^2 = {norm_sq:.6g}, expected 1")
    scale = 1.0 / math.sqrt(norm_sq)
    return TwoQubitPure(a * scale, b * scale, c * scale, d * scale)


# --- bath construction -------------------------------------------------------

def _gamma_function(bath: str, args: argparse.Namespace,
                    quad: baths.QuadratureConfig,
                    verbatim_sign: bool = False) -> Callable[[float], float]:
    """Dephasing exponent Gamma(t) for the selected bath."""
    spectrum = baths.OhmicSpectrum(args.omega_tau)
    if bath == "thermal":
        thermal = baths.ThermalBath(1.0)
        return lambda t: baths.decoherence_thermal(t, spectrum, thermal, quad)
    if bath == "vacuum":
        return lambda t: baths.decoherence_vacuum(t, spectrum, quad)
    if bath == "squeezed":
        squeezed = baths.SqueezedVacuumBath(args.r0, args.omega0, args.sigma, args.theta)
        return lambda t: baths.decoherence_squeezed(t, spectrum, squeezed, quad,
                                                    verbatim_sign=verbatim_sign)
    if bath == "constant":
        rate = args.rate
        return lambda t: rate * t
    raise UsageError(f"bath {bath!r} has no dephasing exponent")


def _lorentzian(args: argparse.Namespace) -> baths.LorentzianSpectrum:
    return baths.LorentzianSpectrum(1.0, args.lam, args.detuning)


def _dephasing_rate_at(gamma_fn: Callable[[float], float], t: float) -> float:
    if t == 0.0:
        return (gamma_fn(RATE_T_FLOOR) - gamma_fn(0.0)) / RATE_T_FLOOR
    if t < RATE_T_FLOOR:
        return baths.dephasing_rate(gamma_fn, t, h=t)
    return baths.dephasing_rate(gamma_fn, t)


def _damping_decay_rate(t: float, spectrum: baths.LorentzianSpectrum) -> float:
    try:
        return baths.damping_rates(t, spectrum).decay_rate
    except ValueError as exc:
        raise NumericalFailure(f"at t = {t:g}: {exc}") from None


# --- output ------------------------------------------------------------------

def _write_output(path: str | None, text: str) -> None:
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8", newline="") as stream:
            stream.write(text)


# --- subcommand handlers -----------------------------------------------------

def cmd_gamma(args: argparse.Namespace) -> int:
    if args.verbatim_sign and args.bath != "squeezed":
        raise UsageError("--verbatim-sign applies only to the squeezed bath")
    quad = baths.QuadratureConfig(rel_tol=args.rel_tol)
    gamma_fn = _gamma_function(args.bath, args, quad, verbatim_sign=args.verbatim_sign)
    grid = _parse_grid(args.t, "--t")
    if grid[0] < 0.0:
        raise UsageError(f"times must be nonnegative, got {grid[0]:g}")
    rows = []
    for t in grid:
        gamma = gamma_fn(t)
        rate = _dephasing_rate_at(gamma_fn, t)
        unphysical = "1" if gamma < 0.0 else "0"
        rows.append([_fmt(t), _fmt(gamma), _fmt(rate), unphysical])
    _write_output(args.output,
                  sweep.write_table(["t", "Gamma", "gamma_rate", "unphysical"], rows))
    return EXIT_OK


def cmd_gfun(args: argparse.Namespace) -> int:
    spectrum = _lorentzian(args)
    grid = _parse_grid(args.t, "--t")
    if grid[0] < 0.0:
        raise UsageError(f"times must be nonnegative, got {grid[0]:g}")
    rows = []
    for t in grid:
        g = baths.lorentzian_amplitude(t, spectrum)
        g_dot = baths.lorentzian_amplitude_derivative(t, spectrum)
        try:
            rates = baths.rates_from_amplitude(g, g_dot)
        except ValueError as exc:
            raise NumericalFailure(f"at t = {t:g}: {exc}") from None
        rows.append([_fmt(t), _fmt(g.real), _fmt(g.imag), _fmt(abs(g)),
                     _fmt(rates.lamb_shift), _fmt(rates.decay_rate)])
    _write_output(args.output,
                  sweep.write_table(
                      ["t", "g_real", "g_imag", "g_abs", "lamb_shift", "decay_rate"],
                      rows))
    return EXIT_OK


def _simulate_rows(args: argparse.Namespace) -> list[sweep.SweepRow]:
    quad = baths.QuadratureConfig(rel_tol=args.rel_tol)
    if args.channel == "dephasing":
        gamma_fn = _gamma_function(args.bath or "thermal", args, quad)
        segment_factor = lambda dt: complex(math.exp(-gamma_fn(dt)))
    else:
        if args.bath is not None:
            raise UsageError("--bath selects a dephasing bath; "
                             "the damping channel always uses the Lorentzian spectrum")
        spectrum = _lorentzian(args)
        segment_factor = lambda dt: baths.lorentzian_amplitude(dt, spectrum)
    spec = sweep.SweepSpec(
        kind=args.channel,
        dt_values=_parse_dt_list(args.dt),
        t_values=tuple(_parse_grid(args.t, "--t")),
        rho0=_parse_state(args.state),
        psi0=_parse_pair(args.pair),
        segment_factor=segment_factor,
    )
    return sweep.run_sweep(spec, check_compose=args.check_compose)


def cmd_simulate(args: argparse.Namespace) -> int:
    rows = _simulate_rows(args)
    _write_output(args.output, sweep.csv_text(rows))
    return EXIT_OK


def cmd_classify(args: argparse.Namespace) -> int:
    grid = _parse_grid(args.t, "--t")
    if args.bath == "lorentzian":
        spectrum = _lorentzian(args)
        rates = [_damping_decay_rate(t, spectrum) for t in grid]
    else:
        quad = baths.QuadratureConfig(rel_tol=args.rel_tol)
        gamma_fn = _gamma_function(args.bath, args, quad)
        rates = [_dephasing_rate_at(gamma_fn, t) for t in grid]
    verdict = baths.classify_markovianity(list(zip(grid, rates)), eps=args.eps)
    lines = [
        f"classification: {verdict.value}",
        f"min_rate: {_fmt(min(rates))}",
        f"max_rate: {_fmt(max(rates))}",
    ]
    for t, rate in zip(grid, rates):
        if rate < -args.eps:
            lines.append(f"first_negativity_t: {_fmt(t)}")
            break
    print("\n".join(lines))
    return CLASSIFICATION_EXIT_CODES[verdict]


def cmd_zeno(args: argparse.Namespace) -> int:
    dt_values = _parse_float_list(args.dt, "--dt")
    if min(dt_values) <= 0.0:
        raise UsageError(f"dwell times must be positive, got {min(dt_values):g}")
    for a, b in zip(dt_values, dt_values[1:]):
        if not b < a:
            raise UsageError(f"--dt must be strictly decreasing, got {a:g} then {b:g}")
    total_time = args.total_time
    if not total_time > 0.0:
        raise UsageError(f"--total-time must be positive, got {total_time:g}")
    counts = [sweep.segments_for(total_time, dt) for dt in dt_values]

    rows = []
    if args.bath == "lorentzian":
        spectrum = _lorentzian(args)
        for dt, n in zip(dt_values, counts):
            g = baths.lorentzian_amplitude(dt, spectrum)
            if abs(g) <= 1e-14:
                raise NumericalFailure(
                    f"amplitude factor vanishes at dt = {dt:g}; rate undefined")
            effective_rate = -2.0 * math.log(abs(g)) / dt
            factor = abs(sweep.segment_power(g, n))
            rows.append([_fmt(dt), _fmt(effective_rate), _fmt(factor)])
    else:
        quad = baths.QuadratureConfig(rel_tol=args.rel_tol)
        gamma_fn = _gamma_function(args.bath, args, quad)
        for dt, n in zip(dt_values, counts):
            gamma = gamma_fn(dt)
            effective_rate = gamma / dt
            factor = sweep.segment_power(math.exp(-gamma), n).real
            rows.append([_fmt(dt), _fmt(effective_rate), _fmt(factor)])
    _write_output(args.output,
                  sweep.write_table(["dt", "R", "coherence_factor"], rows))
    return EXIT_OK


def cmd_figure(args: argparse.Namespace) -> int:
    preset = PRESETS[args.preset]
    flags: list[str] = []
    for key, value in preset.items():
        flags.extend([f"--{key}", value])
    flags.extend(["--rel-tol", repr(args.rel_tol)])
    sim_args = _build_parser().parse_args(["simulate"] + flags)
    rows = _simulate_rows(sim_args)

    out_dir = Path(args.output_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    csv_path = out_dir / f"{args.preset}.csv"
    with open(csv_path, "w", encoding="utf-8", newline="") as stream:
        stream.write(sweep.csv_text(rows))
    print(f"wrote {csv_path}")
    if not args.no_plot:
        png_path = plotting.render_report(rows, out_dir / f"{args.preset}.png",
                                          title=args.preset)
        print(f"wrote {png_path}")
    return EXIT_OK


# --- parser ------------------------------------------------------------------

def _add_config_flag(parser: argparse.ArgumentParser) -> None:
    # consumed before parsing by _expand_configs; registered for help only
    parser.add_argument("--config", metavar="FILE", action="append",
                        help="key=value file merged ahead of flags (flags win)")


def _add_output_flag(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--output", metavar="PATH", default=None,
                        help="write the CSV here instead of stdout")


def _add_rel_tol_flag(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--rel-tol", type=float, default=1e-10,
                        help="relative tolerance for frequency integrals (default 1e-10)")


def _add_dephasing_bath_flags(parser: argparse.ArgumentParser,
                              choices: Sequence[str],
                              default: str | None) -> None:
    parser.add_argument("--bath", choices=list(choices), default=default,
                        required=default is None and "lorentzian" in choices,
                        help="bath model")
    parser.add_argument("--omega-tau", type=float, default=20.0,
                        help="Ohmic cutoff in units of the inverse correlation time (default 20)")
    parser.add_argument("--r0", type=float, default=3.0,
                        help="squeezed bath: peak squeeze weight (default 3)")
    parser.add_argument("--omega0", type=float, default=10.0,
                        help="squeezed bath: profile center frequency (default 10)")
    parser.add_argument("--sigma", type=float, default=0.5,
                        help="squeezed bath: profile width (default 0.5)")
    parser.add_argument("--theta", type=float, default=math.pi / 4,
                        help="squeezed bath: squeeze phase in radians (default pi/4)")
    parser.add_argument("--rate", type=float, default=1.0,
                        help="constant bath: fixed dephasing rate (default 1)")


def _add_lorentzian_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--lam", type=float, default=200.0,
                        help="Lorentzian width in units of the free decay rate (default 200)")
    parser.add_argument("--detuning", type=float, default=40.0,
                        help="Lorentzian detuning in units of the free decay rate (default 40)")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sqcsim",
        description="Metric sweeps for segmented dephasing and damping channels.")
    commands = parser.add_subparsers(dest="command", required=True, metavar="command")

    gamma = commands.add_parser(
        "gamma", help="tabulate the dephasing exponent Gamma(t) and its rate")
    gamma.add_argument("--t", required=True, metavar="GRID",
                       help="time grid a:b:s (inclusive) or a single time")
    _add_dephasing_bath_flags(gamma, DEPHASING_BATHS, default="thermal")
    gamma.add_argument("--verbatim-sign", action="store_true",
                       help="squeezed bath: print the negated exponent "
                            "(rows with Gamma < 0 get unphysical=1)")
    _add_rel_tol_flag(gamma)
    _add_output_flag(gamma)
    _add_config_flag(gamma)
    gamma.set_defaults(handler=cmd_gamma)

    gfun = commands.add_parser(
        "gfun", help="tabulate the damping amplitude factor G(t) and its rates")
    gfun.add_argument("--t", required=True, metavar="GRID",
                      help="time grid a:b:s (inclusive) or a single time")
    _add_lorentzian_flags(gfun)
    _add_output_flag(gfun)
    _add_config_flag(gfun)
    gfun.set_defaults(handler=cmd_gfun)

    simulate = commands.add_parser(
        "simulate", help="sweep purity/fidelity/concurrence over a (dt, T) grid")
    simulate.add_argument("--channel", choices=["dephasing", "damping"], required=True)
    _add_dephasing_bath_flags(simulate, DEPHASING_BATHS, default=None)
    _add_lorentzian_flags(simulate)
    simulate.add_argument("--dt", required=True, metavar="LIST",
                          help="comma-separated dwell times; rows are emitted ascending")
    simulate.add_argument("--t", required=True, metavar="GRID",
                          help="total-time grid a:b:s (inclusive) or a single time; "
                               "every T must be an integer multiple of every dt")
    simulate.add_argument("--state", default="+", metavar="SPEC",
                          help="initial qubit: '+', '0', '1', or 'c0,c1' (default '+')")
    simulate.add_argument("--pair", default="bell", metavar="SPEC",
                          help="initial two-qubit amplitudes: 'bell' or 'a,b,c,d' (default 'bell')")
    simulate.add_argument("--check-compose", action="store_true",
                          help="also run the literal Kraus composition and require "
                               "agreement with the closed form to 1e-10")
    _add_rel_tol_flag(simulate)
    _add_output_flag(simulate)
    _add_config_flag(simulate)
    simulate.set_defaults(handler=cmd_simulate)

    classify = commands.add_parser(
        "classify", help="classify the bath's time-local rate curve")
    classify.add_argument("--t", required=True, metavar="GRID",
                          help="sample grid a:b:s (inclusive), strictly positive times")
    _add_dephasing_bath_flags(classify, ALL_BATHS, default=None)
    _add_lorentzian_flags(classify)
    classify.add_argument("--eps", type=float, default=1e-6,
                          help="rate tolerance for the classification (default 1e-6)")
    _add_rel_tol_flag(classify)
    _add_config_flag(classify)
    classify.set_defaults(handler=cmd_classify)

    zeno = commands.add_parser(
        "zeno", help="tabulate the effective rate R(dt) at fixed total time")
    zeno.add_argument("--dt", required=True, metavar="LIST",
                      help="comma-separated dwell times, strictly decreasing")
    zeno.add_argument("--total-time", type=float, required=True, metavar="T",
                      help="fixed channel length; must be divisible by every dt")
    _add_dephasing_bath_flags(zeno, ALL_BATHS, default=None)
    _add_lorentzian_flags(zeno)
    _add_rel_tol_flag(zeno)
    _add_output_flag(zeno)
    _add_config_flag(zeno)
    zeno.set_defaults(handler=cmd_zeno)

    figure = commands.add_parser(
        "figure", help="run a bundled preset to CSV plus a PNG report")
    figure.add_argument("preset", choices=sorted(PRESETS))
    figure.add_argument("--output-dir", default=".", metavar="DIR",
                        help="directory for <preset>.csv and <preset>.png (default '.')")
    figure.add_argument("--no-plot", action="store_true",
                        help="skip the PNG report; write only the CSV")
    _add_rel_tol_flag(figure)
    _add_config_flag(figure)
    figure.set_defaults(handler=cmd_figure)

    return parser


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:]) if argv is None else list(argv)
    try:
        argv = _expand_configs(argv)
        args = _build_parser().parse_args(argv)
        return args.handler(args)
    except (UsageError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (baths.QuadratureError, sweep.ConsistencyError, NumericalFailure) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
