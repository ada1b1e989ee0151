"""Central table of numerical tolerances and solver limits.

Every module reads its thresholds from here so that a tolerance change is a
one-line diff.  Values are absolute unless the name says otherwise.
"""

# -- linear algebra kernel --------------------------------------------------
HERMITIAN_ATOL = 1e-12        # max |M - M^dagger| accepted as Hermitian
EIG_RECONSTRUCT_ATOL = 1e-10  # ||M V - V diag(w)||_max after diagonalization
ORTHONORMAL_ATOL = 1e-12      # ||V^dagger V - I||_max
UNITARY_STEP_ATOL = 1e-12     # single matrix exponential
UNITARY_PROPAGATOR_ATOL = 1e-9  # full time-ordered product
STATE_NORM_ATOL = 1e-10       # state vectors accepted as normalized
JACOBI_OFFDIAG_RTOL = 1e-14   # Jacobi sweep stop, relative to Frobenius norm
JACOBI_MAX_SWEEPS = 60
JACOBI_DIM_LIMIT = 16         # above this the LAPACK path is used instead

# -- signals and quadrature ---------------------------------------------------
QUADRATURE_ATOL = 1e-9        # adaptive Simpson target
QUADRATURE_MAX_INTERVALS = 1 << 22
DIRECTION_NORM_ATOL = 1e-12

# -- spectral closed forms ----------------------------------------------------
PSI0_ORTHONORMAL_ATOL = 1e-12
PSI0_RESIDUAL_ATOL = 1e-10    # H(0) Psi0 - Psi0 Lambda(0)
CLOSED_FORM_SPECTRUM_ATOL = 1e-10

# -- evolution ----------------------------------------------------------------
TRACKING_QUALITY_FLOOR = 0.5  # min |<v_new|v_prev>|^2 accepted while tracking
TRACKING_CLUSTER_ATOL = 1e-9  # eigenvalues closer than this form one cluster
GAP_FIELD_FLOOR = 0.05        # |b| below which the gap is not sampled
GAP_VALUE_FLOOR = 1e-9        # reject spectral gaps smaller than this
REFINE_SURVIVAL_TOL = 1e-6    # grid-doubling stop criterion
REFINE_MAX_STEPS = 1 << 24

# -- probabilities ------------------------------------------------------------
PROBABILITY_SLACK = 1e-12     # allowed excursion above 1.0
FISHER_EXTREMUM_FLOOR = 1e-12  # reject P(1-P) below this (fringe extremum)

TOLERANCES = {
    name: value
    for name, value in sorted(globals().items())
    if name.isupper() and isinstance(value, (int, float)) and name != "TOLERANCES"
}
