"""Sensor Hamiltonians: H(t) = H0 + sum_axis b_axis(t) * H1_axis.

Four families, all in the computational basis |q1 q2 q3 ...> with qubit 1
the leftmost tensor factor and |0> the +1 eigenstate of Z:

  standard      H = b(t) X                       (dim 2)
  landau-zener  H = Z + b(t) X                   (dim 2)
  dimer         H = ZZ + b(t) (XI + IX)          (dim 4)
  trimer        H = X1X2 + Y2Y3 + Z1Z3 + b(t).sigma   (dim 8)

The trimer couples to the collective operators sigma = (sum X_i, sum Y_i,
sum Z_i); the bond-to-axis assignment above is normative, other frustrated
assignments change the zero-field eigenbasis.
"""

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from trimersense.errors import ValidationError

PAULI = {
    "x": np.array([[0, 1], [1, 0]], dtype=complex),
    "y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "z": np.array([[1, 0], [0, -1]], dtype=complex),
}
AXES = ("x", "y", "z")
KINDS = ("standard", "landau-zener", "dimer", "trimer")


@dataclass(frozen=True)
class FieldVector:
    """Dimensionless field amplitudes along the three cartesian axes."""

    bx: float = 0.0
    by: float = 0.0
    bz: float = 0.0

    def __post_init__(self):
        for name, val in (("bx", self.bx), ("by", self.by), ("bz", self.bz)):
            if not np.isfinite(val):
                raise ValidationError(f"field component {name} must be finite")

    def as_array(self):
        return np.array([self.bx, self.by, self.bz])


@dataclass(frozen=True)
class SensorModel:
    """One Table-row sensor: bare Hamiltonian plus field couplings."""

    kind: str
    dim: int
    h0: np.ndarray
    couplings: dict  # axis -> Hermitian coupling matrix
    default_axis: str

    @property
    def axes(self):
        return tuple(sorted(self.couplings))


def _op_on(pauli, site, nsites):
    ops = [np.eye(2, dtype=complex)] * nsites
    ops[site] = PAULI[pauli]
    out = ops[0]
    for o in ops[1:]:
        out = np.kron(out, o)
    return out


def _collective(axis, nsites):
    return sum(_op_on(axis, k, nsites) for k in range(nsites))


@lru_cache(maxsize=None)
def sensor_model(kind):
    """Build (and cache) the model for a kind name."""
    if kind == "standard":
        h0 = np.zeros((2, 2), dtype=complex)
        couplings = {"x": PAULI["x"].copy()}
        axis = "x"
    elif kind == "landau-zener":
        h0 = PAULI["z"].copy()
        couplings = {"x": PAULI["x"].copy()}
        axis = "x"
    elif kind == "dimer":
        h0 = np.kron(PAULI["z"], PAULI["z"])
        xi = np.kron(PAULI["x"], np.eye(2)) + np.kron(np.eye(2), PAULI["x"])
        couplings = {"x": xi}
        axis = "x"
    elif kind == "trimer":
        h0 = (_op_on("x", 0, 3) @ _op_on("x", 1, 3)
              + _op_on("y", 1, 3) @ _op_on("y", 2, 3)
              + _op_on("z", 0, 3) @ _op_on("z", 2, 3))
        couplings = {ax: _collective(ax, 3) for ax in AXES}
        axis = "z"
    else:
        raise ValidationError(f"unknown model kind {kind!r}; choose from {KINDS}")
    for mat in (h0, *couplings.values()):
        mat.flags.writeable = False
    return SensorModel(kind=kind, dim=h0.shape[0], h0=h0,
                       couplings=couplings, default_axis=axis)


def bare_hamiltonian(model):
    """H0 of the model (a fresh copy)."""
    return model.h0.copy()


def coupling_hamiltonian(model, axis):
    """H1 along an axis; rejects axes the model does not couple to."""
    axis = axis.lower()
    if axis not in model.couplings:
        raise ValidationError(
            f"model {model.kind!r} has no {axis!r} coupling (supported: {model.axes})"
        )
    return model.couplings[axis].copy()


def direction_coupling(model, direction):
    """H1 projected on a unit direction vector (trimer only for off-axis)."""
    d = np.asarray(direction, dtype=float)
    if d.shape != (3,):
        raise ValidationError("direction must be a 3-vector")
    out = np.zeros((model.dim, model.dim), dtype=complex)
    for ax, comp in zip(AXES, d):
        if comp != 0.0:
            if ax not in model.couplings:
                raise ValidationError(
                    f"model {model.kind!r} has no {ax!r} coupling"
                )
            out += comp * model.couplings[ax]
    return out


def hamiltonian_at(model, b):
    """H0 + sum_axis b_axis * H1_axis for a FieldVector (or scalar along
    the model's default axis)."""
    if np.isscalar(b):
        b = FieldVector(**{"b" + model.default_axis: float(b)})
    h = model.h0.astype(complex)
    for ax, comp in zip(AXES, (b.bx, b.by, b.bz)):
        if comp != 0.0:
            if ax not in model.couplings:
                raise ValidationError(
                    f"model {model.kind!r} has no {ax!r} coupling but "
                    f"b{ax}={comp} was requested"
                )
            h = h + comp * model.couplings[ax]
    return h
