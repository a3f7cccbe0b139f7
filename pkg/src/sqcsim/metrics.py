"""Output-quality metrics: coherence purity, fidelity, and concurrence.

`uhlmann_fidelity` returns the root fidelity tr sqrt(sqrt(rho) sigma
sqrt(rho)).  Its square has, for qubits, the closed form
tr(rho sigma) + 2 sqrt(det rho det sigma), and the closed-form chain metrics
live on that squared scale: `fidelity_verbatim` keeps the coherence factor
to the first power inside the determinant bracket (the traditional printed
form), while `fidelity_uhlmann` squares it, which is what the actual
output-state determinant contains.  The two coincide for pure inputs and
for the damping chain.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .states import SIGMA_Y, TwoQubitPure, _as_square, require_valid_state

_EPS = float(np.finfo(np.float64).eps)
# eigenvalues this far below the largest are treated as exact zeros; states
# produced by rank-deficient channels then behave exactly, at the cost of
# ~1e-7 resolution for adversarial near-degenerate inputs
_RELATIVE_EIGEN_CLAMP = 1e-13
_ABSOLUTE_EIGEN_FLOOR = 1e-14
_NEGATIVE_EIGEN_LIMIT = -1e-10
_CONCURRENCE_DEFINED_MIN = 1e-12


def coherence_purity(rho: np.ndarray) -> float:
    """|rho_01| of a qubit state.

    Populations are preserved (dephasing) or recoverable (damping feeds a
    known ground-state pole), so the off-diagonal magnitude is the purity
    figure that degrades across a segmented chain.
    """
    r = _as_square(rho)
    if r.shape[0] != 2:
        raise ValueError(f"expected a 2x2 state, got {r.shape[0]}x{r.shape[0]}")
    return abs(complex(r[0, 1]))


def _clamped_eigh(m: np.ndarray, name: str) -> tuple[np.ndarray, np.ndarray]:
    """eigh of a nominally PSD Hermitian matrix with roundoff cleanup."""
    w, u = np.linalg.eigh(0.5 * (m + m.conj().T))
    if float(w[0]) < _NEGATIVE_EIGEN_LIMIT:
        raise ValueError(
            f"{name} has eigenvalue {float(w[0]):.3e}; not positive semidefinite")
    w_max = max(float(w[-1]), 0.0)
    w = np.where(w < _RELATIVE_EIGEN_CLAMP * w_max, 0.0, w)
    return w, u


def _psd_sqrt(rho: np.ndarray, name: str) -> np.ndarray:
    w, u = _clamped_eigh(rho, name)
    return (u * np.sqrt(w)) @ u.conj().T


def uhlmann_fidelity(rho: np.ndarray, sigma: np.ndarray) -> float:
    """Root fidelity tr sqrt(sqrt(rho) sigma sqrt(rho)), in [0, 1].

    Symmetric in its arguments up to roundoff; square it to land on the
    overlap scale used by the closed-form chain metrics.
    """
    r = _as_square(rho)
    s = _as_square(sigma)
    if r.shape != s.shape:
        raise ValueError(f"dimension mismatch: {r.shape} vs {s.shape}")
    root = _psd_sqrt(r, "rho")
    inner = root @ s @ root
    w, _ = _clamped_eigh(inner, "sqrt(rho) sigma sqrt(rho)")
    return float(np.sum(np.sqrt(w)))


def concurrence(rho: np.ndarray) -> float:
    """Two-qubit concurrence max(0, l1 - l2 - l3 - l4).

    The l_i are the decreasing square roots of the eigenvalues of
    rho (sy x sy) rho* (sy x sy), computed through the Hermitian equivalent
    sqrt(rho) rho~ sqrt(rho) so the spectrum stays real under roundoff.
    Eigenvalues below an absolute floor of 1e-14 are zeroed: the junk modes
    of rank-deficient states would otherwise each leak ~1e-8 into the sum.
    """
    r = _as_square(rho)
    if r.shape[0] != 4:
        raise ValueError(f"expected a 4x4 state, got {r.shape[0]}x{r.shape[0]}")
    flip = np.kron(SIGMA_Y, SIGMA_Y)
    spun = flip @ r.conj() @ flip
    root = _psd_sqrt(r, "rho")
    inner = root @ spun @ root
    w, _ = _clamped_eigh(inner, "sqrt(rho) rho~ sqrt(rho)")
    w = np.where(w < _ABSOLUTE_EIGEN_FLOOR, 0.0, w)
    lam = np.sqrt(w)[::-1]
    return max(0.0, float(lam[0] - lam[1] - lam[2] - lam[3]))


@dataclass(frozen=True)
class MetricSet:
    """All per-(dt, T) figures of merit for one chain traversal.

    concurrence_normalized is C(T)/C(0), or None when the initial pair
    carries no entanglement to normalize by (C(0) < 1e-12).
    """

    purity: float
    fidelity_verbatim: float
    fidelity_uhlmann: float
    concurrence: float
    concurrence_normalized: float | None


def _qubit_entries(rho0: np.ndarray) -> tuple[float, float, float, float]:
    """(p0, p1, |rho01|, |rho01|^2) of a validated qubit state."""
    r = _as_square(rho0)
    if r.shape[0] != 2:
        raise ValueError(f"expected a 2x2 state, got {r.shape[0]}x{r.shape[0]}")
    require_valid_state(r)
    coh = abs(complex(r[0, 1]))
    return float(r[0, 0].real), float(r[1, 1].real), coh, coh * coh


def _clamped_det(p0: float, p1: float, coh_sq: float) -> float:
    """det rho0 = p0 p1 - |rho01|^2, snapped to 0 when pure up to roundoff.

    Without the snap, an exactly-pure input's float determinant (~1e-16)
    would feed the fidelity a spurious sqrt term of order 1e-8.
    """
    det = p0 * p1 - coh_sq
    if det < _NEGATIVE_EIGEN_LIMIT:
        raise ValueError(f"det rho0 = {det:.3e}; not a state")
    if det < 100.0 * _EPS * max(p0 * p1, coh_sq):
        return 0.0
    return det


def metrics_after_dephasing(rho0: np.ndarray, psi0: TwoQubitPure,
                            e_total: float) -> MetricSet:
    """Closed-form metrics after a dephasing chain with total factor e_total.

    The qubit metrics read rho0; the concurrence figures describe a pair
    prepared in psi0 whose first member crossed the same chain.
    """
    if not 0.0 <= e_total <= 1.0 + 1e-12:
        raise ValueError(f"coherence factor must lie in [0, 1], got {e_total}")
    p0, p1, coh, coh_sq = _qubit_entries(rho0)
    trace_term = p0 * p0 + p1 * p1 + 2.0 * coh_sq * e_total
    det0 = _clamped_det(p0, p1, coh_sq)
    bracket_verbatim = max(p0 * p1 - coh_sq * e_total, 0.0)
    bracket_exact = max(p0 * p1 - coh_sq * e_total * e_total, 0.0)
    c0 = psi0.initial_concurrence()
    c_total = c0 * e_total
    return MetricSet(
        purity=coh * e_total,
        fidelity_verbatim=trace_term + 2.0 * math.sqrt(det0 * bracket_verbatim),
        fidelity_uhlmann=trace_term + 2.0 * math.sqrt(det0 * bracket_exact),
        concurrence=c_total,
        concurrence_normalized=(c_total / c0 if c0 >= _CONCURRENCE_DEFINED_MIN
                                else None),
    )


def metrics_after_damping(rho0: np.ndarray, psi0: TwoQubitPure,
                          g_total: complex) -> MetricSet:
    """Closed-form metrics after a damping chain with total factor g_total.

    For this channel the printed fidelity form and the squared overlap
    coincide, so both fields carry the same value.
    """
    g = complex(g_total)
    mod = abs(g)
    if mod > 1.0 + 1e-12:
        raise ValueError(f"|G| = {mod:.12g} exceeds 1")
    mod_sq = mod * mod
    p0, p1, coh, coh_sq = _qubit_entries(rho0)
    trace_term = p0 + p1 * (p1 - p0) * mod_sq + 2.0 * coh_sq * g.real
    det0 = _clamped_det(p0, p1, coh_sq)
    bracket = max(p1 * mod_sq * (1.0 - p1 * mod_sq) - coh_sq * mod_sq, 0.0)
    fidelity = trace_term + 2.0 * math.sqrt(det0 * bracket)
    c0 = psi0.initial_concurrence()
    c_total = c0 * mod
    return MetricSet(
        purity=coh * mod,
        fidelity_verbatim=fidelity,
        fidelity_uhlmann=fidelity,
        concurrence=c_total,
        concurrence_normalized=(c_total / c0 if c0 >= _CONCURRENCE_DEFINED_MIN
                                else None),
    )
