"""
Settings selected by PLQEIGEN_SETTINGS_MODULE, imported on first attribute access.

    from config import settings
    settings.GRID_SIZE
"""
import importlib
import os

ENVIRONMENT_VARIABLE = 'PLQEIGEN_SETTINGS_MODULE'
DEFAULT_SETTINGS_MODULE = 'config.settings.development'

_wrapped = None


def _load():
    global _wrapped
    if _wrapped is None:
        _wrapped = importlib.import_module(
            os.environ.get(ENVIRONMENT_VARIABLE, DEFAULT_SETTINGS_MODULE)
        )
    return _wrapped


def __getattr__(name):
    if name.isupper():
        return getattr(_load(), name)
    raise AttributeError(f'module {__name__!r} has no attribute {name!r}')
