from pathlib import Path

# Base paths
PROJECT_ROOT = Path(__file__).parent.parent.parent.absolute()


## output / log paths
OUTPUT_DIR = PROJECT_ROOT / "results"
LOG_DIR = Path("logs")
LOG_FILE_NAME = "glrt.log"
CONFIG_DIR = PROJECT_ROOT / "configs"


## numerical defaults

# absolute tolerance for PD evaluations (series bound, quadrature, contour)
DEFAULT_TOLERANCE = 1e-9

# residue series hard cap
SERIES_MAX_TERMS = 10_000

# hypergeometric power series cap (per evaluation)
HYPERGEOMETRIC_MAX_TERMS = 100_000

# 1F1 switches from the local Taylor series to scipy above this argument
KUMMER_TAYLOR_LIMIT = 30.0

# doubly noncentral F double series
DNF_REL_TOL = 1e-14
DNF_MAX_SHELLS = 10_000

# subdivision budget for scipy.integrate.quad
QUAD_LIMIT = 200

# Fox-H contour settings: half-length of the truncated contour and curvature of loop contours
FOXH_TRUNCATION = 100.0
FOXH_LOOP_CURVATURE = 1.0
# log-magnitude above which the kernel is reported as numerically unsafe
FOXH_LOG_LIMIT = 700.0


## Monte-Carlo defaults
DEFAULT_SEED = 20240917
MC_TRIALS = 1_000_000
MC_BATCH_SIZE = 50_000
# cap on N*M*batch floats generated per batch and component
MC_BATCH_ELEMENTS = 2_000_000
MC_SHARDS = 16
MAX_WORKERS = 4
# minimum trials * pfa accepted by threshold calibration
MIN_EXCEEDANCES = 100
CONFIDENCE_LEVEL = 0.95


## experiment defaults
TARGET_PD = 0.8
