"""Bath spectra and the decoherence functions they induce.

Dephasing strength accumulated over a dwell time t is

    Gamma(t) = int_0^inf dw J(w) W(w, t) (1 - cos wt) / w^2

with J an Ohmic spectrum w*exp(-w/cutoff) and W a thermal coth weight or a
squeezed-vacuum bracket.  Amplitude damping is driven by a Lorentzian
spectrum, for which the excited-amplitude factor G(t) has a closed form; a
fixed-step integrator for its second-order ODE doubles as a cross-check.
"""

from __future__ import annotations

import cmath
import enum
import math
import warnings
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
import scipy.integrate


@dataclass(frozen=True)
class OhmicSpectrum:
    """J(w) = w * exp(-w / cutoff)."""

    cutoff: float

    def __post_init__(self):
        if not self.cutoff > 0.0:
            raise ValueError(f"cutoff must be positive, got {self.cutoff}")

    def density(self, w: float) -> float:
        return w * math.exp(-w / self.cutoff)


@dataclass(frozen=True)
class ThermalBath:
    """Thermal weight coth(w * tau_b / 2); tau_b is the inverse temperature."""

    tau_b: float = 1.0

    def __post_init__(self):
        if not self.tau_b > 0.0:
            raise ValueError(f"tau_b must be positive, got {self.tau_b}")


@dataclass(frozen=True)
class SqueezedVacuumBath:
    """Squeezed vacuum with a Gaussian squeeze profile around omega0.

    r(w) = r0 / (sqrt(2 pi) sigma) * exp(-(w - omega0)^2 / (2 sigma^2)),
    entering the integrand as cosh(2r) - sinh(2r) cos(wt - theta).
    omega0 and sigma are in the same frequency units as the spectrum cutoff.
    """

    r0: float
    omega0: float
    sigma: float
    theta: float

    def __post_init__(self):
        if self.r0 < 0.0:
            raise ValueError(f"r0 must be nonnegative, got {self.r0}")
        if not self.sigma > 0.0:
            raise ValueError(f"sigma must be positive, got {self.sigma}")
        if not self.omega0 >= 0.0:
            raise ValueError(f"omega0 must be nonnegative, got {self.omega0}")
        # exp(2 r) must stay inside float range over the whole peak
        if self.peak_squeeze() > 300.0:
            raise ValueError(
                f"peak squeeze amplitude {self.peak_squeeze():.3g} too large; "
                "cosh(2r) would overflow")

    def peak_squeeze(self) -> float:
        return self.r0 / (math.sqrt(2.0 * math.pi) * self.sigma)

    def squeeze_amplitude(self, w: float) -> float:
        u = (w - self.omega0) / self.sigma
        return self.peak_squeeze() * math.exp(-0.5 * u * u)


@dataclass(frozen=True)
class LorentzianSpectrum:
    """Lorentzian coupling spectrum for amplitude damping.

    gamma0 is the flat-spectrum decay rate, lam the spectral width, and
    detuning the offset of the qubit frequency from the spectrum center.
    """

    gamma0: float
    lam: float
    detuning: float = 0.0

    def __post_init__(self):
        if not self.gamma0 > 0.0:
            raise ValueError(f"gamma0 must be positive, got {self.gamma0}")
        if not self.lam > 0.0:
            raise ValueError(f"lam must be positive, got {self.lam}")


@dataclass(frozen=True)
class QuadratureConfig:
    """Controls for the semi-infinite frequency integrals.

    The integral is truncated at omega_max_factor * cutoff.  A squeezed peak
    gets its own panel spanning peak_window_sigmas on each side of omega0.
    """

    rel_tol: float = 1e-10
    omega_max_factor: float = 50.0
    peak_window_sigmas: float = 10.0

    def __post_init__(self):
        if not self.rel_tol > 0.0:
            raise ValueError(f"rel_tol must be positive, got {self.rel_tol}")
        if not self.omega_max_factor >= 10.0:
            raise ValueError(
                f"omega_max_factor must be at least 10, got {self.omega_max_factor}")
        if not self.peak_window_sigmas >= 5.0:
            raise ValueError(
                f"peak_window_sigmas must be at least 5, got {self.peak_window_sigmas}")


DEFAULT_QUAD = QuadratureConfig()


class QuadratureError(RuntimeError):
    """Frequency integral did not converge; carries the achieved tolerance."""

    def __init__(self, message: str, achieved_rel: float):
        super().__init__(f"{message} (achieved relative tolerance {achieved_rel:.3e})")
        self.achieved_rel = achieved_rel


class QuadratureWarning(UserWarning):
    pass


def _adaptive(f: Callable[[float], float], a: float, b: float,
              rel_tol: float, limit: int) -> tuple[float, float]:
    """Adaptive panel integral; returns (value, error estimate)."""
    out = scipy.integrate.quad(f, a, b, epsabs=0.0, epsrel=rel_tol,
                               limit=limit, full_output=1)
    if len(out) > 3:
        value, abserr = out[0], out[1]
        achieved = abserr / max(abs(value), 1e-300)
        raise QuadratureError(f"integral over [{a:g}, {b:g}] did not converge",
                              achieved)
    return out[0], out[1]


def _oscillation_limit(width: float, t: float) -> int:
    # QUADPACK workspace sized to the number of cos(wt) periods in the window
    return 60 + min(12000, int(2.0 * width * max(t, 0.0) / math.pi))


def decoherence_thermal(t: float, spectrum: OhmicSpectrum, bath: ThermalBath,
                        quad: QuadratureConfig = DEFAULT_QUAD) -> float:
    """Thermal-bath dephasing exponent Gamma(t); Gamma(0) = 0 exactly.

    The integrand's w -> 0 limit is finite (t^2 / tau_b); below
    1e-6 / tau_b it is replaced by that series value so the panel may start
    at w = 0.
    """
    if t < 0.0:
        raise ValueError(f"t must be nonnegative, got {t}")
    if t == 0.0:
        return 0.0
    cutoff, tau_b = spectrum.cutoff, bath.tau_b
    w_series = 1e-6 / tau_b

    def f(w: float) -> float:
        if w < w_series:
            return math.exp(-w / cutoff) * t * t / tau_b
        s = math.sin(0.5 * w * t)
        coth = 1.0 / math.tanh(0.5 * w * tau_b)
        return math.exp(-w / cutoff) * coth * 2.0 * s * s / w

    w_max = quad.omega_max_factor * cutoff
    value, _ = _adaptive(f, 0.0, w_max, quad.rel_tol,
                         _oscillation_limit(w_max, t))
    return value


def decoherence_vacuum(t: float, spectrum: OhmicSpectrum,
                       quad: QuadratureConfig = DEFAULT_QUAD) -> float:
    """Zero-temperature dephasing exponent (coth weight -> 1 limit)."""
    if t < 0.0:
        raise ValueError(f"t must be nonnegative, got {t}")
    if t == 0.0:
        return 0.0
    cutoff = spectrum.cutoff

    def f(w: float) -> float:
        if w == 0.0:
            return 0.0
        s = math.sin(0.5 * w * t)
        return math.exp(-w / cutoff) * 2.0 * s * s / w

    w_max = quad.omega_max_factor * cutoff
    value, _ = _adaptive(f, 0.0, w_max, quad.rel_tol,
                         _oscillation_limit(w_max, t))
    return value


def decoherence_squeezed(t: float, spectrum: OhmicSpectrum,
                         bath: SqueezedVacuumBath,
                         quad: QuadratureConfig = DEFAULT_QUAD,
                         verbatim_sign: bool = False) -> float:
    """Squeezed-vacuum dephasing exponent.

    The default sign makes Gamma positive (the r0 -> 0 limit then matches the
    vacuum integral); verbatim_sign=True returns the exact negation instead.
    The Gaussian squeeze peak is integrated on its own panel so a narrow peak
    cannot be stepped over; a warning is issued if that panel's error
    estimate exceeds rel_tol times the total.
    """
    if t < 0.0:
        raise ValueError(f"t must be nonnegative, got {t}")
    if t == 0.0:
        return 0.0
    cutoff, theta = spectrum.cutoff, bath.theta

    def f(w: float) -> float:
        if w == 0.0:
            return 0.0
        s = math.sin(0.5 * w * t)
        base = math.exp(-w / cutoff) * 2.0 * s * s / w
        two_r = 2.0 * bath.squeeze_amplitude(w)
        c = math.cos(w * t - theta)
        # cosh(2r) - sinh(2r) cos(...), written to stay finite for large r
        bracket = 0.5 * (math.exp(two_r) * (1.0 - c) + math.exp(-two_r) * (1.0 + c))
        return base * bracket

    w_max = quad.omega_max_factor * cutoff
    if bath.r0 == 0.0:
        # degenerate profile: bracket == 1 everywhere, no peak to resolve
        value, _ = _adaptive(f, 0.0, w_max, quad.rel_tol,
                             _oscillation_limit(w_max, t))
        return -value if verbatim_sign else value

    lo = max(0.0, bath.omega0 - quad.peak_window_sigmas * bath.sigma)
    hi = bath.omega0 + quad.peak_window_sigmas * bath.sigma
    w_max = max(w_max, hi)
    edges = sorted({0.0, lo, hi, w_max})
    total = 0.0
    peak_err = 0.0
    for a, b in zip(edges, edges[1:]):
        value, err = _adaptive(f, a, b, quad.rel_tol,
                               _oscillation_limit(b - a, t))
        total += value
        if (a, b) == (lo, hi):
            peak_err = err
    if peak_err > quad.rel_tol * max(abs(total), 1e-300):
        warnings.warn(
            f"squeeze-peak panel [{lo:g}, {hi:g}] unresolved: error estimate "
            f"{peak_err:.3e} exceeds rel_tol * |Gamma|", QuadratureWarning)
    return -total if verbatim_sign else total


def dephasing_rate(gamma_fn: Callable[[float], float], t: float,
                   h: float | None = None, h_floor: float = 1e-8) -> float:
    """Instantaneous dephasing rate dGamma/dt by central difference.

    The default step is 1e-4 * t, floored at h_floor (which is in the same
    time units as t).  Requires t >= h > 0.
    """
    if h is None:
        h = max(1e-4 * t, h_floor)
    if not h > 0.0:
        raise ValueError(f"step must be positive, got {h}")
    if t < h:
        raise ValueError(f"need t >= h, got t={t}, h={h}")
    return (gamma_fn(t + h) - gamma_fn(t - h)) / (2.0 * h)


# --- amplitude damping -----------------------------------------------------

def _lorentzian_parts(spec: LorentzianSpectrum) -> tuple[complex, complex]:
    mu = complex(spec.lam, -spec.detuning)
    delta = cmath.sqrt(mu * mu - 2.0 * spec.gamma0 * spec.lam)
    return mu, delta


def lorentzian_amplitude(t: float, spec: LorentzianSpectrum) -> complex:
    """Excited-amplitude factor G(t) for the Lorentzian spectrum.

    G(t) = exp(-mu t/2) [cosh(delta t/2) + (mu/delta) sinh(delta t/2)] with
    mu = lam - i*detuning and delta = sqrt(mu^2 - 2 gamma0 lam).  Evaluated
    in a merged-exponent form so large t cannot overflow the cosh, and by
    series near delta = 0 where the two exponentials would cancel.
    """
    if t < 0.0:
        raise ValueError(f"t must be nonnegative, got {t}")
    mu, delta = _lorentzian_parts(spec)
    z = 0.5 * delta * t
    if abs(z) < 1e-3:
        z2 = z * z
        cosh = 1.0 + z2 / 2.0 + z2 * z2 / 24.0
        sinhc = 1.0 + z2 / 6.0 + z2 * z2 / 120.0
        return cmath.exp(-0.5 * mu * t) * (cosh + 0.5 * mu * t * sinhc)
    ratio = mu / delta
    return 0.5 * ((1.0 + ratio) * cmath.exp(0.5 * (delta - mu) * t)
                  + (1.0 - ratio) * cmath.exp(-0.5 * (delta + mu) * t))


def lorentzian_amplitude_derivative(t: float, spec: LorentzianSpectrum) -> complex:
    """dG/dt = -gamma0 lam exp(-mu t/2) sinh(delta t/2) / delta; zero at t=0."""
    if t < 0.0:
        raise ValueError(f"t must be nonnegative, got {t}")
    mu, delta = _lorentzian_parts(spec)
    z = 0.5 * delta * t
    scale = -spec.gamma0 * spec.lam
    if abs(z) < 1e-3:
        z2 = z * z
        sinhc = 1.0 + z2 / 6.0 + z2 * z2 / 120.0
        return scale * cmath.exp(-0.5 * mu * t) * 0.5 * t * sinhc
    return (scale / (2.0 * delta)) * (cmath.exp(0.5 * (delta - mu) * t)
                                      - cmath.exp(-0.5 * (delta + mu) * t))


def lorentzian_amplitude_by_ode(t: float, spec: LorentzianSpectrum,
                                step: float) -> complex:
    """G(t) by classical fixed-step RK4 on G'' + mu G' + (gamma0 lam / 2) G = 0.

    An independent arithmetic path against the closed form.  Refuses steps
    with lam * step > 0.1, where the scheme is too coarse to trust.
    """
    if t < 0.0:
        raise ValueError(f"t must be nonnegative, got {t}")
    if not step > 0.0:
        raise ValueError(f"step must be positive, got {step}")
    if spec.lam * step > 0.1:
        raise ValueError(
            f"step too coarse: lam * step = {spec.lam * step:.3g} > 0.1")
    if t == 0.0:
        return 1.0 + 0.0j
    mu, _ = _lorentzian_parts(spec)
    k = 0.5 * spec.gamma0 * spec.lam
    n = max(1, math.ceil(t / step - 1e-12))
    h = t / n
    g, gd = 1.0 + 0.0j, 0.0 + 0.0j

    def deriv(y0: complex, y1: complex) -> tuple[complex, complex]:
        return y1, -mu * y1 - k * y0

    for _ in range(n):
        a0, a1 = deriv(g, gd)
        b0, b1 = deriv(g + 0.5 * h * a0, gd + 0.5 * h * a1)
        c0, c1 = deriv(g + 0.5 * h * b0, gd + 0.5 * h * b1)
        d0, d1 = deriv(g + h * c0, gd + h * c1)
        g = g + (h / 6.0) * (a0 + 2.0 * b0 + 2.0 * c0 + d0)
        gd = gd + (h / 6.0) * (a1 + 2.0 * b1 + 2.0 * c1 + d1)
    return g


@dataclass(frozen=True)
class DampingRates:
    """Time-local rates of the damping master equation."""

    lamb_shift: float
    decay_rate: float


def rates_from_amplitude(g: complex, g_dot: complex) -> DampingRates:
    """lamb_shift = -2 Im(G'/G), decay_rate = -2 Re(G'/G)."""
    if abs(g) <= 1e-14:
        raise ValueError("amplitude factor vanishes; time-local rates are singular")
    ratio = g_dot / g
    return DampingRates(lamb_shift=-2.0 * ratio.imag, decay_rate=-2.0 * ratio.real)


def damping_rates(t: float, spec: LorentzianSpectrum) -> DampingRates:
    return rates_from_amplitude(lorentzian_amplitude(t, spec),
                                lorentzian_amplitude_derivative(t, spec))


# --- Markovianity ----------------------------------------------------------

class MarkovClass(enum.Enum):
    TIME_INDEPENDENT_MARKOVIAN = "time-independent Markovian"
    TIME_DEPENDENT_MARKOVIAN = "time-dependent Markovian"
    NON_MARKOVIAN = "non-Markovian"


def classify_markovianity(samples: Sequence[tuple[float, float]],
                          eps: float = 1e-6) -> MarkovClass:
    """Classify a sampled time-local rate curve.

    Any rate below -eps means non-Markovian; otherwise a curve whose
    deviation from its mean stays within eps * |mean| counts as
    time-independent, and anything else as time-dependent Markovian.
    Needs at least 3 samples at strictly increasing positive times.
    """
    if len(samples) < 3:
        raise ValueError(f"need at least 3 samples, got {len(samples)}")
    times = [s[0] for s in samples]
    rates = np.array([s[1] for s in samples], dtype=float)
    if times[0] <= 0.0:
        raise ValueError(f"sample times must be positive, got {times[0]}")
    for t_prev, t_next in zip(times, times[1:]):
        if not t_next > t_prev:
            raise ValueError(
                f"sample times must be strictly increasing, got {t_prev} then {t_next}")
    if bool(np.any(rates < -eps)):
        return MarkovClass.NON_MARKOVIAN
    mean = float(np.mean(rates))
    if float(np.max(np.abs(rates - mean))) <= eps * abs(mean):
        return MarkovClass.TIME_INDEPENDENT_MARKOVIAN
    return MarkovClass.TIME_DEPENDENT_MARKOVIAN
