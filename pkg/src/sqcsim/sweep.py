"""Metric sweeps over (dwell time, total time) grids and their CSV form.

A sweep fixes a channel kind, a per-segment factor provider, and initial
states, then tabulates every (dt, T) pair with T an integer multiple of dt.
Rows are emitted dt-major in grid order, and the expensive per-dt factor is
computed exactly once per dt, so output is deterministic (byte-identical)
whether the factors are evaluated serially or on a thread pool.
"""

from __future__ import annotations

import concurrent.futures
import os
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .channels import (
    amplitude_damping_kraus,
    dephasing_kraus,
    segment_power,
    segmented_damping_output,
    segmented_dephasing_output,
    two_qubit_output,
)
from .metrics import MetricSet, metrics_after_damping, metrics_after_dephasing
from .states import TwoQubitPure, compose_segments, extend_first_qubit, require_valid_state

THREADS_ENV_VAR = "SQC_SIM_THREADS"
DIVISIBILITY_TOL = 1e-9
COMPOSE_CHECK_TOL = 1e-10

CSV_HEADER = ("dt,T,n,purity,fidelity_verbatim,fidelity_uhlmann,"
              "concurrence,concurrence_normalized,"
              "channel_factor_real,channel_factor_imag")


class ConsistencyError(RuntimeError):
    """Closed-form output and literal Kraus composition disagreed."""


def segments_for(total_time: float, dt: float,
                 tol: float = DIVISIBILITY_TOL) -> int:
    """Segment count n = T / dt, requiring divisibility within tol."""
    if not dt > 0.0:
        raise ValueError(f"dwell time must be positive, got {dt}")
    if total_time < 0.0:
        raise ValueError(f"total time must be nonnegative, got {total_time}")
    ratio = total_time / dt
    n = round(ratio)
    if abs(ratio - n) > tol:
        raise ValueError(
            f"total time {total_time:g} is not an integer multiple of "
            f"dwell time {dt:g} (T/dt = {ratio:.12g})")
    return int(n)


def _strictly_increasing(values: Sequence[float], label: str) -> None:
    for a, b in zip(values, values[1:]):
        if not b > a:
            raise ValueError(f"{label} must be strictly increasing, got {a:g} then {b:g}")


@dataclass(frozen=True)
class SweepSpec:
    """One sweep: channel kind, grids, initial states, per-segment factor.

    segment_factor maps a dwell time to the channel's per-segment coherence
    factor: exp(-Gamma(dt)) for dephasing, G(dt) for damping.
    """

    kind: str
    dt_values: tuple[float, ...]
    t_values: tuple[float, ...]
    rho0: np.ndarray
    psi0: TwoQubitPure
    segment_factor: Callable[[float], complex]

    def __post_init__(self):
        if self.kind not in ("dephasing", "damping"):
            raise ValueError(
                f"unknown channel kind {self.kind!r}; expected 'dephasing' or 'damping'")
        if not self.dt_values:
            raise ValueError("dt_values must be non-empty")
        if not self.t_values:
            raise ValueError("t_values must be non-empty")
        if min(self.dt_values) <= 0.0:
            raise ValueError(f"dwell times must be positive, got {min(self.dt_values)}")
        if min(self.t_values) < 0.0:
            raise ValueError(f"total times must be nonnegative, got {min(self.t_values)}")
        _strictly_increasing(self.dt_values, "dt_values")
        _strictly_increasing(self.t_values, "t_values")
        require_valid_state(self.rho0)
        for total_time in self.t_values:
            for dt in self.dt_values:
                segments_for(total_time, dt)


@dataclass(frozen=True)
class SweepRow:
    dt: float
    total_time: float
    segments: int
    metrics: MetricSet
    channel_factor: complex


def _thread_count(threads: int | None) -> int:
    if threads is None:
        raw = os.environ.get(THREADS_ENV_VAR)
        if raw is None:
            return 1
        try:
            threads = int(raw)
        except ValueError:
            raise ValueError(
                f"{THREADS_ENV_VAR} must be a positive integer, got {raw!r}") from None
    if threads < 1:
        raise ValueError(f"thread count must be positive, got {threads}")
    return threads


def _check_composition(spec: SweepSpec, dt: float, factor: complex, n: int) -> None:
    """Assert the closed-form outputs match the literal n-segment composition."""
    if spec.kind == "dephasing":
        e = float(complex(factor).real)
        gamma_dt = -float(np.log(e)) if e > 0.0 else float("inf")
        kraus = dephasing_kraus(gamma_dt, dt)
        closed_1q = segmented_dephasing_output(spec.rho0, gamma_dt, n)
    else:
        kraus = amplitude_damping_kraus(factor, dt)
        closed_1q = segmented_damping_output(spec.rho0, factor, n)
    composed_1q = compose_segments(spec.rho0, kraus, n)
    defect_1q = float(np.max(np.abs(closed_1q - composed_1q)))
    closed_2q = two_qubit_output(spec.psi0, spec.kind, factor, n)
    composed_2q = compose_segments(spec.psi0.density(), extend_first_qubit(kraus), n)
    defect_2q = float(np.max(np.abs(closed_2q - composed_2q)))
    worst = max(defect_1q, defect_2q)
    if worst > COMPOSE_CHECK_TOL:
        raise ConsistencyError(
            f"closed form and {n}-segment composition disagree by {worst:.3e} "
            f"at dt={dt:g} (tolerance {COMPOSE_CHECK_TOL:g})")


def run_sweep(spec: SweepSpec, threads: int | None = None,
              check_compose: bool = False) -> list[SweepRow]:
    """Evaluate the full grid; rows dt-major, then T, matching grid order.

    threads=None reads SQC_SIM_THREADS (default 1).  Only the per-dt factor
    evaluations are farmed out; assembly order is fixed by the grids, so the
    result is identical at any thread count.
    """
    workers = _thread_count(threads)
    if workers == 1 or len(spec.dt_values) == 1:
        factors = [complex(spec.segment_factor(dt)) for dt in spec.dt_values]
    else:
        with concurrent.futures.ThreadPoolExecutor(max_workers=workers) as pool:
            factors = [complex(f) for f in pool.map(spec.segment_factor, spec.dt_values)]

    metric_fn = (metrics_after_dephasing if spec.kind == "dephasing"
                 else metrics_after_damping)
    rows: list[SweepRow] = []
    for dt, factor in zip(spec.dt_values, factors):
        for total_time in spec.t_values:
            n = segments_for(total_time, dt)
            total = segment_power(factor, n)
            if spec.kind == "dephasing":
                metrics = metric_fn(spec.rho0, spec.psi0, total.real)
            else:
                metrics = metric_fn(spec.rho0, spec.psi0, total)
            if check_compose and n >= 1:
                _check_composition(spec, dt, factor, n)
            rows.append(SweepRow(dt=dt, total_time=total_time, segments=n,
                                 metrics=metrics, channel_factor=total))
    return rows


def format_number(value: float) -> str:
    """Decimal text with 12 significant digits; -0.0 normalized to 0."""
    return format(float(value) + 0.0, ".12g")


def csv_text(rows: Sequence[SweepRow]) -> str:
    """The full CSV document (header + rows, LF line endings)."""
    lines = [CSV_HEADER]
    for row in rows:
        m = row.metrics
        normalized = ("undefined" if m.concurrence_normalized is None
                      else format_number(m.concurrence_normalized))
        lines.append(",".join([
            format_number(row.dt),
            format_number(row.total_time),
            str(row.segments),
            format_number(m.purity),
            format_number(m.fidelity_verbatim),
            format_number(m.fidelity_uhlmann),
            format_number(m.concurrence),
            normalized,
            format_number(row.channel_factor.real),
            format_number(row.channel_factor.imag),
        ]))
    return "\n".join(lines) + "\n"


def write_table(header: Sequence[str], rows: Sequence[Sequence[str]]) -> str:
    """Generic CSV document from pre-formatted cells (LF line endings)."""
    lines = [",".join(header)]
    lines.extend(",".join(row) for row in rows)
    return "\n".join(lines) + "\n"
