"""Dense complex linear algebra: Hermitian eigendecomposition, unitary
matrix exponentials, fidelities.

All operations are pure functions; matrices are validated once on entry.
Energies are dimensionless (hbar = 1).
"""

from dataclasses import dataclass

import numpy as np

from trimersense import backends
from trimersense.errors import ValidationError
from trimersense.tolerances import HERMITIAN_ATOL, STATE_NORM_ATOL


@dataclass(frozen=True)
class HermitianEig:
    """Spectral decomposition: ascending eigenvalues, orthonormal columns."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray


def hermiticity_defect(m):
    """max |M - M^dagger| entry."""
    m = np.asarray(m)
    return float(np.abs(m - m.conj().T).max())


def unitarity_defect(u):
    """max |U^dagger U - I| entry."""
    u = np.asarray(u)
    return float(np.abs(u.conj().T @ u - np.eye(u.shape[0])).max())


def require_hermitian(m, name="matrix"):
    """Validate and return a square Hermitian complex array."""
    m = np.ascontiguousarray(m, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] < 1:
        raise ValidationError(f"{name} must be square with dim >= 1, got {m.shape}")
    defect = hermiticity_defect(m)
    if defect >= HERMITIAN_ATOL:
        raise ValidationError(
            f"{name} is not Hermitian: max asymmetry {defect:.3e} "
            f"exceeds {HERMITIAN_ATOL:.0e}"
        )
    return m


def hermitian_eig(m):
    """Diagonalize a Hermitian matrix.

    Eigenvalues come back ascending; eigenvector phases follow the fixed
    convention (largest-magnitude component real positive), so identical
    input gives identical output.  Eigenvectors inside a degenerate
    subspace are only pinned up to that convention; compare projectors,
    not individual columns, at degeneracies.
    """
    m = require_hermitian(m)
    w, v = backends.eigh(m)
    return HermitianEig(eigenvalues=w, eigenvectors=v)


def expm_unitary(m, dt):
    """exp(-i dt M) for Hermitian M, via the eigendecomposition."""
    m = require_hermitian(m)
    if not np.isfinite(dt):
        raise ValidationError("dt must be finite")
    w, v = backends.eigh(m)
    return (v * np.exp(-1j * dt * w)) @ v.conj().T


def state_fidelity(a, b):
    """|<a|b>|^2 for normalized state vectors."""
    a = np.asarray(a, dtype=complex).ravel()
    b = np.asarray(b, dtype=complex).ravel()
    if a.shape != b.shape:
        raise ValidationError(f"dimension mismatch: {a.shape} vs {b.shape}")
    for name, vec in (("a", a), ("b", b)):
        norm = np.linalg.norm(vec)
        if abs(norm - 1.0) > STATE_NORM_ATOL:
            raise ValidationError(f"state {name} not normalized: |norm-1|={abs(norm-1):.3e}")
    f = abs(np.vdot(a, b)) ** 2
    return min(max(f, 0.0), 1.0)
