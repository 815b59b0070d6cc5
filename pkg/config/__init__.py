import copy
import logging.config

from . import settings


def setup(quiet=False):
    """Apply the LOGGING dict of the active settings; quiet keeps console warnings and errors only."""
    logging_config = copy.deepcopy(settings.LOGGING)
    if quiet:
        logging_config['handlers']['console']['level'] = 'WARNING'
    logging.config.dictConfig(logging_config)
