"""Pure-numpy reference kernels.

Same contracts as the compiled extension in ``_kernels.pyx``: ascending
eigenvalues with a fixed eigenvector phase convention, midpoint-sampled
time-ordered products, and overlap-continuity branch tracking.  The
diagonalization here is LAPACK's; the extension uses cyclic Jacobi.  Both
land on the same canonical form, so results agree to solver tolerance.
"""

import numpy as np

from trimersense.errors import NumericalError
from trimersense.tolerances import TRACKING_CLUSTER_ATOL, TRACKING_QUALITY_FLOOR

NAME = "python"


def canonicalize(w, v):
    """Sort eigenpairs ascending and fix each eigenvector's global phase.

    Phase convention: the largest-magnitude component of every column is
    made real and positive (first index wins ties), which pins the output
    for any eigensolver and makes runs reproducible bit-for-bit.
    """
    order = np.argsort(w, kind="stable")
    w = w[order]
    v = v[:, order]
    idx = np.argmax(np.abs(v), axis=0)
    lead = v[idx, np.arange(v.shape[1])]
    mag = np.abs(lead)
    mag[mag == 0] = 1.0
    v = v * (lead.conj() / mag)
    return w, v


def eigh(a):
    """Eigendecomposition of a Hermitian matrix, canonicalized."""
    w, v = np.linalg.eigh(a)
    return canonicalize(w, v)


def propagate(h0, hdir, bmid, dt, psi0=None, checkpoints=None):
    """Time-ordered product of step exponentials, later times on the left.

    ``bmid`` holds the field amplitude at the midpoint of every step.  When
    ``checkpoints`` (ascending step counts) is given, ``psi0`` is propagated
    and recorded after each checkpointed step.
    """
    n = h0.shape[0]
    steps = len(bmid)
    hs = h0[None, :, :] + bmid[:, None, None] * hdir[None, :, :]
    ws, vs = np.linalg.eigh(hs)
    u = np.eye(n, dtype=complex)
    if checkpoints is None:
        checkpoints = np.empty(0, dtype=np.int64)
    psis = np.empty((len(checkpoints), n), dtype=complex)
    c = 0
    for m in range(steps):
        u = (vs[m] * np.exp(-1j * dt * ws[m])) @ vs[m].conj().T @ u
        while c < len(checkpoints) and checkpoints[c] == m + 1:
            psis[c] = u @ psi0
            c += 1
    return u, psis


def _assign(overlap):
    """Greedy max-overlap assignment prev-branch -> new column."""
    n = overlap.shape[0]
    perm = np.full(n, -1, dtype=np.int64)
    quality = 1.0
    work = overlap.copy()
    for _ in range(n):
        i, j = np.unravel_index(np.argmax(work), work.shape)
        perm[i] = j
        quality = min(quality, overlap[i, j])
        work[i, :] = -1.0
        work[:, j] = -1.0
    return perm, quality


def _clusters(lam_tracked):
    """Group tracked branch indices whose eigenvalues coincide within the
    cluster tolerance (the b = 0 quartets, the |b| = 1 crossings)."""
    order = np.argsort(lam_tracked, kind="stable")
    groups = []
    cur = [order[0]]
    for a, b in zip(order, order[1:]):
        if lam_tracked[b] - lam_tracked[a] < TRACKING_CLUSTER_ATOL:
            cur.append(b)
        else:
            groups.append(cur)
            cur = [b]
    groups.append(cur)
    return groups


def _align(prev, cur, lam_tracked):
    """Rotate each degenerate cluster of ``cur`` columns to the closest frame
    of ``prev`` (polar alignment).  Non-degenerate columns just get their
    transport phase fixed.  Returns the aligned frame."""
    for group in _clusters(lam_tracked):
        if len(group) == 1:
            j = group[0]
            phase = np.vdot(prev[:, j], cur[:, j])
            mag = abs(phase)
            if mag > 0:
                cur[:, j] *= phase.conj() / mag
        else:
            b = cur[:, group]
            m = b.conj().T @ prev[:, group]
            u, _, vt = np.linalg.svd(m)
            cur[:, group] = b @ (u @ vt)
    return cur


def tracked_spectra(h0, hdir, bgrid, psi_ref, vec_checkpoints=None):
    """Instantaneous spectra along ``bgrid`` with branch continuity.

    Branches are matched step to step by maximal eigenvector overlap, with
    exactly-degenerate clusters rotated onto the previous frame so that the
    quartets at b = 0 (and the crossings at |b| = 1) pass through without
    scrambling labels.  The first grid point is pinned to the column order
    of ``psi_ref``.  Returns the tracked eigenvalue array, the worst
    post-alignment overlap seen, and parallel-transported eigenvector
    matrices at the requested grid indices.
    """
    n = h0.shape[0]
    npts = len(bgrid)
    hs = h0[None, :, :] + bgrid[:, None, None] * hdir[None, :, :]
    ws, vs = np.linalg.eigh(hs)
    lams = np.empty((npts, n))
    if vec_checkpoints is None:
        vec_checkpoints = np.empty(0, dtype=np.int64)
    vecs = np.empty((len(vec_checkpoints), n, n), dtype=complex)
    prev = np.asarray(psi_ref, dtype=complex)
    quality = 1.0
    c = 0
    for m in range(npts):
        overlap = np.abs(prev.conj().T @ vs[m]) ** 2
        perm, _ = _assign(overlap)
        lam_tracked = ws[m][perm]
        cur = _align(prev, vs[m][:, perm].copy(), lam_tracked)
        quality = min(quality, float(np.min(np.abs(np.sum(prev.conj() * cur, axis=0)) ** 2)))
        lams[m] = lam_tracked
        prev = cur
        while c < len(vec_checkpoints) and vec_checkpoints[c] == m:
            vecs[c] = cur
            c += 1
    if quality < TRACKING_QUALITY_FLOOR:
        raise NumericalError(
            f"branch tracking became ambiguous: worst overlap {quality:.3f} "
            f"< {TRACKING_QUALITY_FLOOR}; refine the grid"
        )
    return lams, quality, vecs
