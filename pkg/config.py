import os
from dotenv import load_dotenv

load_dotenv()


def _env_float(name, default):
    value = os.environ.get(name)
    return float(value) if value else default


def _env_int(name, default):
    value = os.environ.get(name)
    return int(value) if value else default


def _env_bool(name, default):
    value = os.environ.get(name)
    if value is None:
        return default
    return value.strip().lower() in {'1', 'true', 'yes', 'on'}


class Config:
    """Base configuration"""

    # Experiment defaults
    DESIGN_LABEL = os.environ.get('DESIGN_LABEL') or 'icosahedral'
    EPSILON_MODE = os.environ.get('EPSILON_MODE') or 'projected'
    RANK_CUTOFF = _env_float('RANK_CUTOFF', 1e-10)
    KERNEL_RESIDUAL_TOL = _env_float('KERNEL_RESIDUAL_TOL', 1e-8)
    GRID_POINTS = _env_int('GRID_POINTS', 11)
    CUBE_POINTS = _env_int('CUBE_POINTS', 20)
    REGION_THRESHOLD = _env_float('REGION_THRESHOLD', 0.5)
    TRUNCATION_RADIUS = _env_float('TRUNCATION_RADIUS', 0.95)

    # Upper bound on complex entries held at once while building moments for a chunk of states
    STATE_CHUNK_ENTRIES = _env_int('STATE_CHUNK_ENTRIES', 2 ** 21)

    # Self-verification
    VERIFY_SEED = _env_int('VERIFY_SEED', 20240521)
    VERIFY_MATRICES = _env_int('VERIFY_MATRICES', 50)
    VERIFY_STATES = _env_int('VERIFY_STATES', 100)
    HAAR_ORACLE_ENABLED = _env_bool('HAAR_ORACLE_ENABLED', True)

    # Development server for python run.py
    API_HOST = os.environ.get('API_HOST') or '127.0.0.1'
    API_PORT = _env_int('API_PORT', 3758)

    # Folders
    BASE_DIR = os.path.dirname(os.path.abspath(__file__))
    ENSEMBLE_FOLDER = os.environ.get('ENSEMBLE_FOLDER') or os.path.join(BASE_DIR, 'ensembles')
    LOG_FOLDER = os.environ.get('LOG_FOLDER') or 'logs'


class DevelopmentConfig(Config):
    """Development configuration"""
    DEBUG = True


class TestingConfig(Config):
    """Testing configuration"""
    TESTING = True
    WTF_CSRF_ENABLED = False
    VERIFY_MATRICES = 10
    VERIFY_STATES = 10


class ProductionConfig(Config):
    """Production configuration"""
    DEBUG = False


# Configuration mapping
config = {
    'development': DevelopmentConfig,
    'testing': TestingConfig,
    'production': ProductionConfig,
    'default': Config
}
