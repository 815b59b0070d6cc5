"""
Production settings for plqeigen: JSON console output and a rotating log file.
"""

import os

from .base import *

DEBUG = False

LOG_DIR = BASE_DIR / 'logs'
os.makedirs(LOG_DIR, exist_ok=True)

# Production logging
LOGGING['handlers']['console']['formatter'] = 'json'
LOGGING['handlers']['file'] = {
    'level': 'INFO',
    'class': 'logging.handlers.RotatingFileHandler',
    'filename': LOG_DIR / 'plqeigen.log',
    'maxBytes': 10485760,  # 10MB
    'backupCount': 5,
    'formatter': 'json',
}
LOGGING['root']['handlers'] = ['console', 'file']
LOGGING['loggers']['apps']['handlers'] = ['console', 'file']
