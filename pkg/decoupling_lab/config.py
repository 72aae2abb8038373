"""
Configuration constants for the decoupling toolkit.
"""

import os
from pathlib import Path

# Base directories
TMP_DIR = Path('/tmp')
DEFAULT_OUT_DIR = Path(os.getenv("DECOUPLING_LAB_OUT", "results"))

# Numerical tolerances
TOLERANCE = 1e-10  # Hermiticity, trace, isometry
NORM_TOL = 1e-12  # normalized state vectors
NEGATIVE_EIGENVALUE_TOL = 1e-10  # clamp window for spectra
MARGINAL_TOL = 1e-8  # "maximally mixed" marginals
DECODER_MARGINAL_TOL = 1e-6
TRACE_WARNING_TOL = 1e-6  # per-U trace deviation of psi_U
BOUND_TOL = 1e-9  # slack on numerically evaluated inequalities

# Monte-Carlo acceptance band, in standard errors
SIGMA_BAND = 5.0

# Maximum number of matrix entries any single operation may materialize
DIMENSION_BUDGET = int(os.getenv("DECOUPLING_LAB_BUDGET", str(2 ** 26)))

# Worker threads for trial-level parallelism
DEFAULT_THREADS = int(os.getenv("DECOUPLING_LAB_THREADS", str(os.cpu_count() or 1)))

# Experiment config schema
CONFIG_SCHEMA_VERSION = 1

# Result files
FLOAT_DIGITS = 17
MANIFEST_FILE = "manifest.json"

# Log file
LOG_FILE = Path(os.getenv("DECOUPLING_LAB_LOG_FILE", str(TMP_DIR / "decoupling_lab.log")))

# Log level
LOG_LEVEL = os.getenv("DECOUPLING_LAB_LOG_LEVEL", "INFO").upper()
