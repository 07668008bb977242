"""Numerical constants and defaults.

Shared tolerances and limits for the Lie-group core, the rate-function optimizers,
the measurement simulator and the CLI.
"""

# Linear algebra guards
CONDITION_LIMIT = 1e12  # reject group elements beyond this condition number
HERMITIAN_TOL = 1e-12
UNITARY_TOL = 1e-12
PAIRING_IMAG_TOL = 1e-12  # relative to the magnitude of the pairing
MINOR_UNDERFLOW = 1e-14  # relative threshold for principal minors

# State validation
STATE_TOL = 1e-10

# Chamber decomposition
EIGENVALUE_CLUSTER_TOL = 1e-10  # eigenvalues closer than this share a cluster
CHI_INVARIANCE_TOL = 1e-8

# Weight polytope
POLYTOPE_TOL = 1e-9  # membership, boundary and separation gap threshold

# Optimizer defaults
MAX_ITERATIONS = 500
GRADIENT_TOLERANCE = 1e-8
ACCEPTANCE_TOLERANCE = 1e-5  # gradient norm still accepted as converged
RESTARTS = 8
RESTART_SCALES = (0.5, 1.0, 2.0, 4.0)
DIVERGENCE_NORM = 1e3
FD_RELATIVE_STEP = 1e-6
ALPHA_CAP = 50.0  # dominant-chamber box for maximally mixed rates
CONTRACTION_STEPS = 60
CONTRACTION_FD_STEP = 1e-5

# Simulator
M_MAX = 14  # explicit qubit isotypic decompositions
QUBIT_CACHE_MAX = 10  # decompositions kept in memory; 2^(2m) complex entries each
PROJECTOR_AUTO_LIMIT = 8  # auto method uses projectors up to this power
SIMULATION_MAX_POWER = 2000  # closed-form block probabilities
ACCEPTANCE_FLOOR = 1e-6
MAX_REJECTION_ROUNDS = 10_000
QUADRATURE_NODES = 32
CONFIDENCE_LEVEL = 0.95
INFIMUM_GRID = 41

# CLI exit codes
EXIT_OK = 0
EXIT_ERROR = 1
EXIT_INFINITE = 2

# Environment variables
ENV_CONFIG = "MOMENTRATE_CONFIG"
ENV_SEED = "MOMENTRATE_SEED"
ENV_WORKERS = "MOMENTRATE_WORKERS"
