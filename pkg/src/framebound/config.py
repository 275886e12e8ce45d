#!/usr/bin/env python3
"""Configuration constants for frame-bound time estimation."""

# Numerical tolerances
STATE_NORM_TOL: float = 1e-12
HERMITIAN_TOL: float = 1e-12
TRAJECTORY_NORM_TOL: float = 1e-9
ROOT_RTOL: float = 1e-10
STATIONARY_RTOL: float = 1e-9
STATIONARY_SAMPLES: int = 16
RENORM_DRIFT_WARN: float = 1e-6

# Time-grid resolution (points per shortest oscillation period)
MIN_STEPS_PER_PERIOD: int = 40
DEFAULT_SCAN_OVERSAMPLE: int = 40
DEFAULT_RK4_OVERSAMPLE: int = 200
MIN_SCAN_POINTS: int = 512
MAX_BISECTION_ITERATIONS: int = 200

# Block sizes for vectorized passes over long time grids
RK4_BLOCK: int = 4096
PROFILE_BLOCK: int = 65536

# Sweep defaults
DEFAULT_N_PHASE: int = 8
TOY_N_PHASE: int = 64
DEFAULT_N_ANGLE: int = 8
DEFAULT_SWEEP_OVERSAMPLE: int = 8
DEFAULT_REFINE: int = 0
DEFAULT_SWEEP_CHUNK: int = 64
DEFAULT_THREADS: int = 1

# Runner defaults
DEFAULT_FIDELITY_GRID: str = "0.05:0.95:19"
DEFAULT_SEED: int = 7
DEFAULT_LOG_LEVEL: str = "INFO"
DESK_SCALE: float = 1e-3
DEFAULT_COMPARE_EPSILON: float = 0.05

# CSV output
CSV_FLOAT_FORMAT: str = ".17g"
