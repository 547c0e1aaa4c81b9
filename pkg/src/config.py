# src/config.py
import os
from dotenv import load_dotenv

# Load .env from project root
load_dotenv()

# ================================
# Series / output defaults
# ================================

# Total-degree truncation N of expanded series
DEFAULT_TRUNCATION = int(os.getenv("SINGPOINCARE_TRUNCATION", "20"))

# Default CLI output: text | json | dot
OUTPUT_FORMAT = os.getenv("SINGPOINCARE_FORMAT", "text")

# ================================
# Curvettes
# ================================

# Seed of the pseudo-random rational seed sequence
DEFAULT_SEED = int(os.getenv("SINGPOINCARE_SEED", "0"))

# Independent seed families that must agree on curvette-derived results
CURVETTE_SEED_COUNT = int(os.getenv("CURVETTE_SEED_COUNT", "3"))

# Attempts to draw a seed away from the special points of a component
SEED_RETRIES = int(os.getenv("SEED_RETRIES", "32"))

# ================================
# Blowup simulation
# ================================

# Initial t-adic precision budget, doubled on exhaustion up to the cap
PUISEUX_PRECISION = int(os.getenv("PUISEUX_PRECISION", "64"))
PUISEUX_PRECISION_CAP = int(os.getenv("PUISEUX_PRECISION_CAP", "2048"))

# ================================
# Oracle
# ================================

# Inclusion-exclusion runs over 2^r subsets
ORACLE_MAX_INDICES = int(os.getenv("ORACLE_MAX_INDICES", "4"))
