"""Kernel backend selection.

Two implementations of the hot kernels exist: a compiled Cython extension
(cyclic Jacobi eigensolver plus C propagation loops) and a pure-numpy
fallback.  The extension is used when importable; set
``TRIMERSENSE_BACKEND=python`` or ``=ext`` to force a choice.

Dimensions above ``JACOBI_DIM_LIMIT`` (the 64-dimensional two-sensor
cross-check) are always routed to the LAPACK-backed fallback, where an
O(n^3)-per-sweep Jacobi would be needlessly slow.
"""

import os

from trimersense.errors import ValidationError
from trimersense.tolerances import JACOBI_DIM_LIMIT

from . import pykernels

try:
    from . import _kernels as _ext
except ImportError:
    _ext = None

_choice = os.environ.get("TRIMERSENSE_BACKEND", "auto").strip().lower()
if _choice in ("", "auto"):
    _active = _ext if _ext is not None else pykernels
elif _choice in ("ext", "compiled", "cython"):
    if _ext is None:
        raise ImportError(
            "TRIMERSENSE_BACKEND=ext requested but the compiled extension "
            "is not available; build with `pip install -e .`"
        )
    _active = _ext
elif _choice in ("python", "numpy", "py"):
    _active = pykernels
else:
    raise ValidationError(f"unknown TRIMERSENSE_BACKEND value: {_choice!r}")

HAVE_EXT = _ext is not None


def backend_name():
    return _active.NAME


def _kernels_for(dim):
    if dim > JACOBI_DIM_LIMIT:
        return pykernels
    return _active


def eigh(a):
    return _kernels_for(a.shape[0]).eigh(a)


def propagate(h0, hdir, bmid, dt, psi0=None, checkpoints=None):
    return _kernels_for(h0.shape[0]).propagate(h0, hdir, bmid, dt, psi0, checkpoints)


def tracked_spectra(h0, hdir, bgrid, psi_ref, vec_checkpoints=None):
    return _kernels_for(h0.shape[0]).tracked_spectra(
        h0, hdir, bgrid, psi_ref, vec_checkpoints
    )
