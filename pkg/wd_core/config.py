"""
Configuration for WD-Learn
Defines default parameters for simulation, training, bound solving and experiments.
"""

# Random Number Generation
RNG_ALGORITHM = "PCG64"  # numpy bit generator used for every stream
MANIFEST_VERSION = 1

# Process Simulation Parameters
DEFAULT_BURN_IN = 500
DEFAULT_COVARIATE_AR = 0.5  # AR(1) coefficient of the exogenous covariate
DEFAULT_COVARIATE_STD = 1.0  # Gaussian innovation std of the covariate
DEFAULT_ACX_INNOVATION_STD = 1.0
LINK_TOLERANCE = 1e-12  # slack allowed when checking f in [-1, 1]
COVARIATE_GRID_SIZE = 401  # grid used to validate the link over covariates
COVARIATE_GRID_HALF_WIDTH = 10.0

# DGP coefficient presets
DGP1_COEFFICIENTS = (-0.25, 0.6)  # intercept, lag-1
DGP2_COEFFICIENTS = (0.1, -0.15, 0.25, 0.15, 0.2)  # intercept, pos-part, neg-part, lag-2, covariate kernel

# Network Parameters
DEFAULT_HIDDEN_LAYERS = 2
DEFAULT_HIDDEN_WIDTH = 16
DEFAULT_HIDDEN_ACTIVATION = "relu"
DEFAULT_OUTPUT_ACTIVATION = "tanh"
SPARSITY_THRESHOLD = 1e-6

# Training Parameters
DEFAULT_LEARNING_RATE = 1e-3
DEFAULT_BATCH_SIZE = 32
DEFAULT_PATIENCE_EPOCHS = 30
DEFAULT_MAX_EPOCHS = 1000
DEFAULT_ADAM_BETA1 = 0.9
DEFAULT_ADAM_BETA2 = 0.999
DEFAULT_ADAM_EPSILON = 1e-8
DEFAULT_LOSS = "hinge"

# Bound Solver Parameters
BISECTION_LOWER_FACTOR = 1e-30  # lower bracket is this times 2M
BISECTION_UPPER_SHRINK = 1e-12  # upper bracket is 2M(1 - this)
BISECTION_MAX_ITER = 200
BISECTION_XTOL = 1e-14
BISECTION_RTOL = 8.9e-16
ROOT_RESIDUAL_TOL = 1e-8
DEFAULT_C3 = 1.0
DEFAULT_VARIANCE_PROXY = 1.0  # the constant C of Theorem 2
DEFAULT_NU = 0.5
DEFAULT_ETA = 0.05
DEFAULT_ALPHA = 3.0

# Weak Dependence Parameters
RIEMANNIAN_TRUNCATION = 10**6
DEFAULT_A3_K_MAX = 8
DEFAULT_A3_J_MAX = 100_000
A3_FIT_INFLATION = 1.10
DEFAULT_ENVELOPE_J_MAX = 200

# Experiment Parameters
DESK_N_GRID = tuple(range(200, 2001, 200))
PAPER_N_GRID = tuple(range(200, 2001, 20))
DESK_REPLICATIONS = 50
PAPER_REPLICATIONS = 500
DEFAULT_TARGET_M = 10_000
MAX_FAILURE_SHARE = 0.02  # experiments abort above this share of failed replications

# Recession Pipeline Parameters
USRECQ_FIXTURE = "data/USRECQ.csv"
USRECQ_URL = "https://fred.stlouisfed.org/graph/fredgraph.csv?id=USRECQ"
MLE_GRID_STEP = 0.01
MLE_SIMPLEX_TOL = 1e-6
MLE_MIN_LENGTH = 10

# CSV output
CSV_LINE_TERMINATOR = "\n"
