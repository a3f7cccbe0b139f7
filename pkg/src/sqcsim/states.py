"""Qubit and two-qubit density-matrix algebra for segmented channels.

States are plain complex ndarrays (2x2 for one qubit, 4x4 for a pair in the
product basis |00>, |01>, |10>, |11>).  A channel segment is a Kraus set
{K_j} acting as rho -> sum_j K_j rho K_j^dag, and an n-segment chain is that
map composed n times.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

ID2 = np.eye(2, dtype=np.complex128)
SIGMA_X = np.array([[0, 1], [1, 0]], dtype=np.complex128)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=np.complex128)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=np.complex128)

# tolerance ladder: algebraic identities vs eigen-decomposition paths
ATOL_ALGEBRAIC = 1e-12
ATOL_EIGEN = 1e-10
KRAUS_COMPLETENESS_ATOL = 1e-10


def _as_square(rho: np.ndarray) -> np.ndarray:
    rho = np.asarray(rho, dtype=np.complex128)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1] or rho.shape[0] not in (2, 4):
        raise ValueError(f"expected a 2x2 or 4x4 matrix, got shape {rho.shape}")
    return rho


@dataclass(frozen=True)
class InvariantCheck:
    """One validated invariant: its name, verdict, and how badly it failed."""

    name: str
    passed: bool
    violation: float


@dataclass(frozen=True)
class ValidationReport:
    checks: tuple[InvariantCheck, ...]

    @property
    def ok(self) -> bool:
        return all(c.passed for c in self.checks)

    def violation(self, name: str) -> float:
        for c in self.checks:
            if c.name == name:
                return c.violation
        raise KeyError(name)


def validate_state(rho: np.ndarray) -> ValidationReport:
    """Check Hermiticity, unit trace, and positive semidefiniteness.

    Returns a report with the measured violation magnitude per invariant
    rather than a bare bool, so callers can see *how* a matrix fails.
    2x2 positivity uses the closed-form eigenvalue pair at tolerance 1e-12;
    4x4 positivity goes through a symmetric eigensolver at 1e-10.
    """
    rho = _as_square(rho)
    dim = rho.shape[0]
    atol = ATOL_ALGEBRAIC if dim == 2 else ATOL_EIGEN

    herm_violation = float(np.max(np.abs(rho - rho.conj().T)))
    trace_violation = float(abs(rho.trace() - 1.0))

    herm = (rho + rho.conj().T) / 2.0
    if dim == 2:
        mean = herm[0, 0].real + herm[1, 1].real
        disc = np.sqrt(((herm[0, 0].real - herm[1, 1].real) / 2.0) ** 2
                       + abs(herm[0, 1]) ** 2)
        min_eig = mean / 2.0 - disc
    else:
        min_eig = float(np.linalg.eigvalsh(herm)[0])
    psd_violation = max(0.0, -float(min_eig))

    return ValidationReport(checks=(
        InvariantCheck("hermitian", herm_violation <= atol, herm_violation),
        InvariantCheck("unit_trace", trace_violation <= atol, trace_violation),
        InvariantCheck("positive_semidefinite", psd_violation <= atol, psd_violation),
    ))


def require_valid_state(rho: np.ndarray) -> np.ndarray:
    rho = _as_square(rho)
    report = validate_state(rho)
    if not report.ok:
        bad = ", ".join(f"{c.name} (violation {c.violation:.3e})"
                        for c in report.checks if not c.passed)
        raise ValueError(f"invalid density matrix: {bad}")
    return rho


@dataclass(frozen=True)
class KrausSet:
    """Kraus operators of one channel segment plus the dwell time they model.

    Invariant: sum_j K_j^dag K_j = I to 1e-10 per element.  Construction does
    not enforce it (stubs and deliberately broken sets are useful in tests);
    apply_kraus does.
    """

    operators: tuple[np.ndarray, ...]
    dwell_time: float

    def __init__(self, operators: Sequence[np.ndarray], dwell_time: float):
        ops = tuple(np.asarray(k, dtype=np.complex128) for k in operators)
        if not ops:
            raise ValueError("KrausSet needs at least one operator")
        dim = ops[0].shape[0]
        for k in ops:
            if k.ndim != 2 or k.shape != (dim, dim) or dim not in (2, 4):
                raise ValueError("Kraus operators must all be 2x2 or all 4x4")
        if not dwell_time > 0.0:
            raise ValueError(f"dwell_time must be positive, got {dwell_time}")
        object.__setattr__(self, "operators", ops)
        object.__setattr__(self, "dwell_time", float(dwell_time))

    @property
    def dim(self) -> int:
        return self.operators[0].shape[0]

    def completeness_defect(self) -> float:
        acc = np.zeros((self.dim, self.dim), dtype=np.complex128)
        for k in self.operators:
            acc += k.conj().T @ k
        return float(np.max(np.abs(acc - np.eye(self.dim))))

    def is_complete(self, atol: float = KRAUS_COMPLETENESS_ATOL) -> bool:
        return self.completeness_defect() <= atol


def apply_kraus(rho: np.ndarray, kraus: KrausSet) -> np.ndarray:
    """One segment: rho -> sum_j K_j rho K_j^dag."""
    rho = _as_square(rho)
    if rho.shape[0] != kraus.dim:
        raise ValueError(f"state dim {rho.shape[0]} != Kraus dim {kraus.dim}")
    if not kraus.is_complete():
        raise ValueError(
            f"Kraus set not trace preserving (defect {kraus.completeness_defect():.3e})")
    out = np.zeros_like(rho)
    for k in kraus.operators:
        out += k @ rho @ k.conj().T
    return out


def compose_segments(rho: np.ndarray, kraus: KrausSet, n: int) -> np.ndarray:
    """Send rho through n identical segments (left fold of apply_kraus).

    Splitting the count is exactly associative: composing m+n segments is the
    same operation sequence as m segments followed by n.
    """
    if not isinstance(n, (int, np.integer)) or n < 1:
        raise ValueError(f"segment count must be a positive integer, got {n!r}")
    rho = _as_square(rho)
    if rho.shape[0] != kraus.dim:
        raise ValueError(f"state dim {rho.shape[0]} != Kraus dim {kraus.dim}")
    if not kraus.is_complete():
        raise ValueError(
            f"Kraus set not trace preserving (defect {kraus.completeness_defect():.3e})")
    out = rho
    ops = [(k, k.conj().T) for k in kraus.operators]
    for _ in range(n):
        nxt = np.zeros_like(out)
        for k, kd in ops:
            nxt += k @ out @ kd
        out = nxt
    return out


def extend_first_qubit(kraus: KrausSet) -> KrausSet:
    """Lift a single-qubit segment to qubit 1 of a pair: K_j -> K_j (x) I."""
    if kraus.dim != 2:
        raise ValueError("can only extend a single-qubit Kraus set")
    return KrausSet([np.kron(k, ID2) for k in kraus.operators], kraus.dwell_time)


def reduced_state(rho4: np.ndarray, keep: int) -> np.ndarray:
    """Partial trace of a two-qubit state; keep=0 keeps the transmitted qubit."""
    rho4 = _as_square(rho4)
    if rho4.shape[0] != 4:
        raise ValueError("reduced_state expects a 4x4 matrix")
    if keep not in (0, 1):
        raise ValueError("keep must be 0 or 1")
    r = rho4.reshape(2, 2, 2, 2)
    return np.einsum("abcb->ac", r) if keep == 0 else np.einsum("abac->bc", r)


@dataclass(frozen=True)
class TwoQubitPure:
    """Pure two-qubit input a|00> + b|01> + c|10> + d|11>, unit norm to 1e-12."""

    a: complex
    b: complex
    c: complex
    d: complex

    def __post_init__(self):
        norm = self.norm_sq()
        if abs(norm - 1.0) > ATOL_ALGEBRAIC:
            raise ValueError(f"amplitudes not normalized: |psi|^2 = {norm}")

    def norm_sq(self) -> float:
        return float(abs(self.a) ** 2 + abs(self.b) ** 2
                     + abs(self.c) ** 2 + abs(self.d) ** 2)

    def vector(self) -> np.ndarray:
        return np.array([self.a, self.b, self.c, self.d], dtype=np.complex128)

    def density(self) -> np.ndarray:
        v = self.vector()
        return np.outer(v, v.conj())

    def initial_concurrence(self) -> float:
        """C of the input itself: 2|ad - bc|."""
        return 2.0 * abs(self.a * self.d - self.b * self.c)


def bell_pair() -> TwoQubitPure:
    """(|00> + |11>)/sqrt(2), the default entangled input."""
    s = 1.0 / np.sqrt(2.0)
    return TwoQubitPure(s, 0.0, 0.0, s)


def pure_qubit_density(c0: complex, c1: complex) -> np.ndarray:
    """Density matrix of c0|0> + c1|1| (normalized to 1e-12)."""
    v = np.array([c0, c1], dtype=np.complex128)
    norm = float(np.vdot(v, v).real)
    if abs(norm - 1.0) > ATOL_ALGEBRAIC:
        raise ValueError(f"qubit amplitudes not normalized: |psi|^2 = {norm}")
    return np.outer(v, v.conj())


def plus_state() -> np.ndarray:
    """(|0> + |1>)/sqrt(2) as a density matrix, the default qubit input."""
    return np.full((2, 2), 0.5, dtype=np.complex128)
