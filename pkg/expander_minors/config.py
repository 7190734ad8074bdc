"""
Runtime configuration
Defaults for every tunable, overridable through environment variables or a .env file.
"""
import os

from dotenv import load_dotenv

load_dotenv()


class Config:
    # Brute-force limits
    EXHAUSTIVE_LIMIT = int(os.environ.get('MINORS_EXHAUSTIVE_LIMIT', '20'))
    CCL_LIMIT = int(os.environ.get('MINORS_CCL_LIMIT', '10'))

    # Eigensolver
    EIGEN_TOL = float(os.environ.get('MINORS_EIGEN_TOL', '1e-8'))
    EIGEN_MAX_ITER = int(os.environ.get('MINORS_EIGEN_MAX_ITER', '100000'))

    # Engine
    ENGINE_TOL = float(os.environ.get('MINORS_ENGINE_TOL', '1e-6'))
    RETRY_COEFFICIENT = float(os.environ.get('MINORS_RETRY_COEFFICIENT', '3'))

    # Generators
    REGULAR_RETRIES = int(os.environ.get('MINORS_REGULAR_RETRIES', '500'))
    JUMBLED_SAMPLES = int(os.environ.get('MINORS_JUMBLED_SAMPLES', '10000'))

    # Harness
    DEFAULT_CONFIG = os.environ.get('MINORS_CONFIG')
    LOG_LEVEL = os.environ.get('MINORS_LOG_LEVEL', 'INFO')
