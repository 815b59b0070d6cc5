"""
Base settings for plqeigen.

Every value can be overridden from the environment or a .env file.
"""

from pathlib import Path

import structlog
from decouple import Csv, config

# Build paths inside the project like this: BASE_DIR / 'subdir'.
BASE_DIR = Path(__file__).resolve().parent.parent.parent

DEBUG = config('DEBUG', default=False, cast=bool)
LOG_LEVEL = config('LOG_LEVEL', default='INFO')

# Grids
GRID_SIZE = config('PLQEIGEN_GRID_SIZE', default=65, cast=int)

# Solver defaults
MAX_ITER = config('PLQEIGEN_MAX_ITER', default=5000, cast=int)
TOL_GRAD = config('PLQEIGEN_TOL_GRAD', default=1e-6, cast=float)
TOL_CONSTRAINT = config('PLQEIGEN_TOL_CONSTRAINT', default=1e-8, cast=float)
STEP0 = config('PLQEIGEN_STEP0', default=1.0, cast=float)
BACKTRACK_FACTOR = config('PLQEIGEN_BACKTRACK_FACTOR', default=0.5, cast=float)
MAX_BACKTRACKS = config('PLQEIGEN_MAX_BACKTRACKS', default=40, cast=int)
SEED = config('PLQEIGEN_SEED', default=0, cast=int)

# Limit experiments
P_SCHEDULE = config('PLQEIGEN_P_SCHEDULE', default='4,8,16,32,64', cast=Csv(float))
ORACLE_SAMPLES = config('PLQEIGEN_ORACLE_SAMPLES', default=2000, cast=int)

# Artifacts
RESULTS_DIR = Path(config('PLQEIGEN_RESULTS_DIR', default=str(BASE_DIR / 'results')))

# Logging with structlog
# See: https://www.structlog.org/en/stable/
LOGGING = {
    'version': 1,
    'disable_existing_loggers': False,
    'formatters': {
        'json': {
            '()': structlog.stdlib.ProcessorFormatter,
            'processor': structlog.processors.JSONRenderer(),
        },
        'colored': {
            '()': structlog.stdlib.ProcessorFormatter,
            'processor': structlog.dev.ConsoleRenderer(colors=True),
        },
    },
    'handlers': {
        'console': {
            'level': LOG_LEVEL,
            'class': 'logging.StreamHandler',
            'formatter': 'colored',
        },
    },
    'root': {
        'handlers': ['console'],
        'level': LOG_LEVEL,
    },
    'loggers': {
        'apps': {
            'handlers': ['console'],
            'level': LOG_LEVEL,
            'propagate': False,
        },
    },
}

# Structlog configuration
structlog.configure(
    processors=[
        structlog.contextvars.merge_contextvars,
        structlog.stdlib.filter_by_level,
        structlog.stdlib.add_logger_name,
        structlog.stdlib.add_log_level,
        structlog.stdlib.PositionalArgumentsFormatter(),
        structlog.processors.TimeStamper(fmt="iso"),
        structlog.processors.StackInfoRenderer(),
        structlog.processors.format_exc_info,
        structlog.processors.UnicodeDecoder(),
        structlog.stdlib.ProcessorFormatter.wrap_for_formatter,
    ],
    logger_factory=structlog.stdlib.LoggerFactory(),
    wrapper_class=structlog.stdlib.BoundLogger,
    context_class=dict,
    cache_logger_on_first_use=True,
)
