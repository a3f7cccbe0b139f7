"""Segmented dephasing and amplitude-damping channels.

A chain of n identical segments, each applying the same single-qubit noise
for a dwell time dt, multiplies the channel's coherence factor n times.  For
dephasing the factor is E = exp(-Gamma(dt)); for amplitude damping it is the
complex excited-amplitude factor G(dt).  Closed forms for the n-segment
output are provided alongside the literal Kraus composition, together with
the two-qubit case where only the first qubit of an entangled pair traverses
the chain.
"""

from __future__ import annotations

import cmath
import math

import numpy as np

from .states import ID2, SIGMA_Z, KrausSet, TwoQubitPure, _as_square, compose_segments


def dephasing_factor(gamma_dt: float) -> float:
    """Per-segment coherence factor E = exp(-Gamma(dt))."""
    if gamma_dt < 0.0:
        raise ValueError(f"dephasing exponent must be nonnegative, got {gamma_dt}")
    return math.exp(-gamma_dt)


def dephasing_kraus(gamma_dt: float, dt: float) -> KrausSet:
    """Kraus pair {sqrt((1+E)/2) I, sqrt((1-E)/2) sigma_z} for one segment."""
    e = dephasing_factor(gamma_dt)
    k1 = math.sqrt(0.5 * (1.0 + e)) * ID2
    k2 = math.sqrt(0.5 * (1.0 - e)) * SIGMA_Z
    return KrausSet(operators=(k1, k2), dwell_time=dt)


def amplitude_damping_kraus(g_dt: complex, dt: float) -> KrausSet:
    """Kraus pair for one damping segment with amplitude factor G(dt).

    K1 = diag(1, conj(G)), K2 maps |1> to sqrt(1 - |G|^2) |0>.  Requires
    |G| <= 1 (up to roundoff) for the pair to be a valid channel.
    """
    g = complex(g_dt)
    leak = 1.0 - abs(g) ** 2
    if leak < -1e-12:
        raise ValueError(f"|G| = {abs(g):.12g} exceeds 1; not a contraction")
    leak = max(leak, 0.0)
    k1 = np.array([[1.0, 0.0], [0.0, g.conjugate()]], dtype=np.complex128)
    k2 = np.array([[0.0, math.sqrt(leak)], [0.0, 0.0]], dtype=np.complex128)
    return KrausSet(operators=(k1, k2), dwell_time=dt)


def segment_power(factor: complex, n: int) -> complex:
    """factor**n evaluated through log-polar form.

    exp(n log|factor|) with the phase reduced mod 2 pi keeps extreme powers
    (n in the thousands) from under/overflowing prematurely and keeps the
    modulus exact when the factor is real.
    """
    if not isinstance(n, (int, np.integer)) or isinstance(n, bool):
        raise TypeError(f"segment count must be an integer, got {type(n).__name__}")
    if n < 0:
        raise ValueError(f"segment count must be nonnegative, got {n}")
    z = complex(factor)
    if n == 0:
        return 1.0 + 0.0j
    if z == 0:
        return 0.0 + 0.0j
    modulus = math.exp(n * math.log(abs(z)))
    phase = math.remainder(n * cmath.phase(z), 2.0 * math.pi)
    return modulus * complex(math.cos(phase), math.sin(phase))


def segmented_dephasing_output(rho0: np.ndarray, gamma_dt: float, n: int,
                               allow_unphysical: bool = False) -> np.ndarray:
    """n dephasing segments applied to a single qubit, in closed form.

    Populations are untouched; the off-diagonal element is scaled by
    exp(-n Gamma(dt)).  allow_unphysical admits a negative exponent (an
    amplifying segment) for what-if runs; the default rejects it.
    """
    rho = _as_square(rho0)
    if rho.shape[0] != 2:
        raise ValueError(f"expected a 2x2 state, got {rho.shape[0]}x{rho.shape[0]}")
    if gamma_dt < 0.0 and not allow_unphysical:
        raise ValueError(
            f"dephasing exponent must be nonnegative, got {gamma_dt}; "
            "pass allow_unphysical=True to scale coherence up anyway")
    e_total = segment_power(math.exp(-gamma_dt), n).real
    out = rho.copy()
    out[0, 1] *= e_total
    out[1, 0] *= e_total
    return out


def segmented_damping_output(rho0: np.ndarray, g_dt: complex, n: int,
                             allow_unphysical: bool = False) -> np.ndarray:
    """n damping segments applied to a single qubit, in closed form.

    With total factor Gn = G(dt)**n: the excited population scales by
    |Gn|^2, the lost weight moves to the ground state, and the coherence
    scales by Gn.  allow_unphysical admits |G| > 1.
    """
    rho = _as_square(rho0)
    if rho.shape[0] != 2:
        raise ValueError(f"expected a 2x2 state, got {rho.shape[0]}x{rho.shape[0]}")
    if abs(complex(g_dt)) > 1.0 + 1e-12 and not allow_unphysical:
        raise ValueError(
            f"|G| = {abs(complex(g_dt)):.12g} exceeds 1; "
            "pass allow_unphysical=True to amplify anyway")
    g_total = segment_power(g_dt, n)
    mod_sq = abs(g_total) ** 2
    out = np.empty_like(rho)
    out[0, 0] = rho[0, 0] + rho[1, 1] * (1.0 - mod_sq)
    out[1, 1] = rho[1, 1] * mod_sq
    out[0, 1] = rho[0, 1] * g_total
    out[1, 0] = rho[1, 0] * np.conj(g_total)
    return out


def segmented_output_by_kraus(rho0: np.ndarray, kraus: KrausSet, n: int) -> np.ndarray:
    """Literal n-fold Kraus composition; the oracle path for the closed forms."""
    return compose_segments(rho0, kraus, n)


def two_qubit_dephasing_state(psi0: TwoQubitPure, e_total: float) -> np.ndarray:
    """Pair state after the first qubit crosses a dephasing chain.

    Every element of |psi0><psi0| whose first-qubit indices differ is
    multiplied by the total coherence factor; the rest are untouched.
    """
    rho = psi0.density()
    for i in range(4):
        for j in range(4):
            if (i >> 1) != (j >> 1):
                rho[i, j] *= e_total
    return rho


def two_qubit_damping_state(psi0: TwoQubitPure, g_total: complex) -> np.ndarray:
    """Pair state after the first qubit crosses a damping chain.

    Built from the closed form for one damping channel on the first qubit of
    |psi0> = a|00> + b|01> + c|10> + d|11>: excited-row weight |c|^2, |d|^2
    shrinks by |G|^2 and feeds the ground row, while first-qubit coherences
    pick up one factor of G.
    """
    g = complex(g_total)
    a, b, c, d = psi0.a, psi0.b, psi0.c, psi0.d
    leak = 1.0 - abs(g) ** 2
    rho = np.empty((4, 4), dtype=np.complex128)
    rho[0, 0] = abs(a) ** 2 + abs(c) ** 2 * leak
    rho[0, 1] = a * np.conj(b) + c * np.conj(d) * leak
    rho[0, 2] = a * np.conj(c) * g
    rho[0, 3] = a * np.conj(d) * g
    rho[1, 1] = abs(b) ** 2 + abs(d) ** 2 * leak
    rho[1, 2] = b * np.conj(c) * g
    rho[1, 3] = b * np.conj(d) * g
    rho[2, 2] = abs(c) ** 2 * abs(g) ** 2
    rho[2, 3] = c * np.conj(d) * abs(g) ** 2
    rho[3, 3] = abs(d) ** 2 * abs(g) ** 2
    for i in range(4):
        for j in range(i):
            rho[i, j] = np.conj(rho[j, i])
    return rho


def two_qubit_output(psi0: TwoQubitPure, kind: str, factor: complex,
                     n: int) -> np.ndarray:
    """Pair state after n segments of the named channel on the first qubit.

    kind is "dephasing" (factor = per-segment E, must be real in [0, 1]) or
    "damping" (factor = per-segment G, |G| <= 1).
    """
    total = segment_power(factor, n)
    if kind == "dephasing":
        e = complex(factor)
        if abs(e.imag) > 1e-14 or not 0.0 <= e.real <= 1.0 + 1e-12:
            raise ValueError(f"dephasing factor must be real in [0, 1], got {factor}")
        return two_qubit_dephasing_state(psi0, total.real)
    if kind == "damping":
        if abs(complex(factor)) > 1.0 + 1e-12:
            raise ValueError(f"|G| = {abs(complex(factor)):.12g} exceeds 1")
        return two_qubit_damping_state(psi0, total)
    raise ValueError(f"unknown channel kind {kind!r}; expected 'dephasing' or 'damping'")
