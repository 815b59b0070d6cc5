"""
RunConfig: the flat JSON document that drives one CLI run.

Absent keys (or null) take their defaults from the active settings module, so
a parsed RunConfig is complete and serializing it reproduces the run.
"""
import json
import math
import numbers
from dataclasses import asdict, dataclass, fields

import structlog

from apps.calculus.models import Exponents
from apps.core.exceptions import ConfigError, ValidationError
from apps.eigensolver import SolverOptions
from apps.geometry import build_disk_grid, build_rectangle_grid
from apps.limits import LimitSpec
from config import settings

logger = structlog.get_logger(__name__)

CONFIG_VERSION = 1
COMMANDS = ('solve', 'sweep', 'limit', 'oracle', 'residual', 'calibrate')
DOMAINS = ('disk', 'rectangle')
MIN_ORACLE_SAMPLES = 1000

# Commands built on the limit spec (gamma, Q) rather than an explicit (p, q, alpha)
SCHEDULE_COMMANDS = ('sweep', 'limit', 'oracle', 'residual')


@dataclass(frozen=True)
class RunConfig:
    command: str
    version: int = CONFIG_VERSION
    domain: str = 'disk'
    R: float = 1.0
    L: float | None = None
    nx: int | None = None
    ny: int | None = None
    p: float | None = None
    q: float | None = None
    alpha: float | None = None
    gamma: float | None = None
    Q: float | None = None
    p_schedule: tuple | None = None
    max_iter: int | None = None
    tol_grad: float | None = None
    tol_constraint: float | None = None
    step0: float | None = None
    backtrack_factor: float | None = None
    max_backtracks: int | None = None
    seed: int | None = None
    oracle_samples: int | None = None
    excluded_radius: float | None = None
    out_dir: str | None = None

    @property
    def exponents(self):
        """Exponents of a single solve, or None when p is not configured."""
        if self.p is None:
            return None
        if self.gamma is not None:
            return Exponents.from_schedule(self.p, self.gamma, self.Q)
        if self.alpha is not None:
            return Exponents.from_pqa(self.p, self.q, self.alpha)
        return None

    def build_domain(self):
        if self.domain == 'disk':
            return build_disk_grid(self.R, self.nx)
        return build_rectangle_grid(self.R, self.L, self.nx, self.ny)

    def limit_spec(self):
        L = self.L if self.domain == 'rectangle' else None
        return LimitSpec(gamma=self.gamma, Q=self.Q, R=self.R, L=L)

    def solver_options(self, **changes):
        options = SolverOptions(
            max_iter=self.max_iter,
            tol_grad=self.tol_grad,
            tol_constraint=self.tol_constraint,
            step0=self.step0,
            backtrack_factor=self.backtrack_factor,
            max_backtracks=self.max_backtracks,
            seed=self.seed,
        )
        return options.evolve(**changes) if changes else options

    def as_dict(self):
        values = asdict(self)
        if values['p_schedule'] is not None:
            values['p_schedule'] = list(values['p_schedule'])
        return values

    def echo(self):
        """as_dict plus the derived exponents of a single solve."""
        exponents = self.exponents
        return {**self.as_dict(), 'derived': exponents.as_dict() if exponents else None}


KEYS = tuple(f.name for f in fields(RunConfig))


def _is_number(value):
    is_real = isinstance(value, numbers.Real) and not isinstance(value, bool)
    return is_real and math.isfinite(value)


def _is_integer(value):
    return isinstance(value, numbers.Integral) and not isinstance(value, bool)


class _Checker:
    """Collects {field: message} errors while coercing values."""

    def __init__(self, values):
        self.values = values
        self.errors = {}

    def number(self, key, default=None, positive=True):
        value = self.values.get(key, default)
        if value is None:
            return None
        if not _is_number(value) or (positive and value <= 0):
            qualifier = 'a finite number > 0' if positive else 'a finite number'
            self.errors[key] = f'must be {qualifier} (got {value!r})'
            return None
        return float(value)

    def integer(self, key, default, minimum):
        value = self.values.get(key, default)
        if not _is_integer(value) or value < minimum:
            self.errors[key] = f'must be an integer >= {minimum} (got {value!r})'
            return None
        return int(value)

    def choice(self, key, choices, default=None):
        value = self.values.get(key, default)
        if value not in choices:
            self.errors[key] = f'must be one of {", ".join(choices)} (got {value!r})'
            return None
        return value

    def forbid(self, keys, reason):
        for key in keys:
            if key in self.values:
                self.errors[key] = reason


def _check_exponent_forms(check, command):
    values = check.values
    triple = [key for key in ('q', 'alpha') if key in values]
    schedule = [key for key in ('gamma', 'Q') if key in values]
    if triple and schedule:
        check.errors['exponents'] = 'give either (p, q, alpha) or (p, gamma, Q), not both'
        return

    if command in SCHEDULE_COMMANDS:
        check.forbid(triple, f'not used by {command}; give gamma and Q')
        for key in ('gamma', 'Q'):
            if key not in values:
                check.errors[key] = f'is required by {command}'
    if command in ('sweep', 'limit', 'oracle'):
        check.forbid(['p'], f'not used by {command}')
    if command == 'solve':
        if 'p' not in values:
            check.errors['p'] = 'is required by solve'
        if not (set(triple) == {'q', 'alpha'} or set(schedule) == {'gamma', 'Q'}):
            check.errors['exponents'] = 'solve needs (p, q, alpha) or (p, gamma, Q)'
    if command == 'calibrate':
        if 'p' not in values:
            check.errors['p'] = 'is required by calibrate'
        check.forbid(['alpha', 'gamma', 'Q'], 'not used by calibrate')


def _check_schedule(check, default):
    schedule = check.values.get('p_schedule', default)
    if not isinstance(schedule, (list, tuple)) or not schedule:
        check.errors['p_schedule'] = f'must be a non-empty list of numbers (got {schedule!r})'
        return None
    if not all(_is_number(p) and p > 1 for p in schedule):
        check.errors['p_schedule'] = f'every entry must be a finite number > 1 (got {schedule!r})'
        return None
    return tuple(float(p) for p in schedule)


def _check_theory(config):
    """Exponent checks that need the assembled config."""
    if config.command in ('solve', 'residual') and config.p is not None:
        config.exponents.require_theory()
    if config.command == 'residual' and config.p is not None:
        e = config.exponents
        if e.p < 2 or e.q < 2:
            raise ValidationError(
                {'p': f'the strong-form residuals need p >= 2 and q >= 2 (got p={e.p}, q={e.q})'}
            )
    if config.command == 'sweep':
        for p in config.p_schedule:
            Exponents.from_schedule(p, config.gamma, config.Q).require_theory()
    if config.command in SCHEDULE_COMMANDS:
        config.limit_spec()


def validate_document(document):
    """Turn a decoded JSON object into a complete RunConfig."""
    if not isinstance(document, dict):
        raise ConfigError({'document': 'must be a JSON object'})
    unknown = sorted(set(document) - set(KEYS))
    if unknown:
        raise ConfigError({key: 'unknown key' for key in unknown})

    values = {key: value for key, value in document.items() if value is not None}
    check = _Checker(values)
    version = values.get('version', CONFIG_VERSION)
    if version != CONFIG_VERSION or not _is_integer(version):
        check.errors['version'] = f'must be {CONFIG_VERSION} (got {version!r})'
    command = check.choice('command', COMMANDS)
    domain = check.choice('domain', DOMAINS, default='disk')

    R = check.number('R', default=1.0)
    L = None
    if domain == 'disk':
        check.forbid(['L'], 'only applies to the rectangle domain')
    elif domain == 'rectangle':
        L = check.number('L', default=R)
        if L is not None and R is not None and L > R:
            check.errors['L'] = f'must satisfy L <= R (got L={L:g}, R={R:g})'

    minimum = 5 if domain == 'disk' else 3
    nx = check.integer('nx', settings.GRID_SIZE, minimum)
    ny = check.integer('ny', values.get('nx', settings.GRID_SIZE), minimum)
    if domain == 'disk' and nx is not None:
        if nx % 2 == 0:
            check.errors['nx'] = f'must be odd on the disk (got {nx})'
        if ny is not None and ny != nx:
            check.errors['ny'] = f'must equal nx on the disk (got nx={nx}, ny={ny})'

    exponents = {key: check.number(key) for key in ('p', 'q', 'alpha', 'gamma', 'Q')}
    if command is not None:
        _check_exponent_forms(check, command)

    config_values = {
        'command': command,
        'version': CONFIG_VERSION,
        'domain': domain,
        'R': R,
        'L': L,
        'nx': nx,
        'ny': ny,
        **exponents,
        'p_schedule': _check_schedule(check, settings.P_SCHEDULE),
        'max_iter': check.integer('max_iter', settings.MAX_ITER, 1),
        'tol_grad': check.number('tol_grad', settings.TOL_GRAD),
        'tol_constraint': check.number('tol_constraint', settings.TOL_CONSTRAINT),
        'step0': check.number('step0', settings.STEP0),
        'backtrack_factor': check.number('backtrack_factor', settings.BACKTRACK_FACTOR),
        'max_backtracks': check.integer('max_backtracks', settings.MAX_BACKTRACKS, 1),
        'seed': check.integer('seed', settings.SEED, 0),
        'oracle_samples': check.integer(
            'oracle_samples', settings.ORACLE_SAMPLES, MIN_ORACLE_SAMPLES
        ),
        'excluded_radius': check.number('excluded_radius'),
        'out_dir': values.get('out_dir', str(settings.RESULTS_DIR)),
    }
    if not isinstance(config_values['out_dir'], str) or not config_values['out_dir']:
        check.errors['out_dir'] = f'must be a non-empty path (got {config_values["out_dir"]!r})'
    if check.errors:
        raise ConfigError(check.errors)

    config = RunConfig(**config_values)
    try:
        config.solver_options()
    except ValidationError as exc:
        raise ConfigError(exc.detail) from exc
    _check_theory(config)
    return config


def parse_config(text, overrides=None):
    """
    Parse and validate a RunConfig document.

    Args:
        text: UTF-8 JSON object
        overrides: keys that replace the document's values (None entries are skipped)

    Raises:
        ConfigError: malformed JSON, unknown keys or invalid values
        UnsupportedExponentsError: beta <= 1 for a command that solves
    """
    try:
        document = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError({'document': f'invalid JSON ({exc})'}) from exc
    if isinstance(document, dict) and overrides:
        overrides = {key: value for key, value in overrides.items() if value is not None}
        declared, requested = document.get('command'), overrides.get('command')
        if declared is not None and requested is not None and declared != requested:
            raise ConfigError(
                {'command': f'config declares {declared!r} but {requested!r} was requested'}
            )
        document = {**document, **overrides}
    config = validate_document(document)
    logger.debug("config_parsed", command=config.command, domain=config.domain)
    return config


def serialize_config(config):
    """JSON text that parse_config maps back onto an equal RunConfig."""
    return json.dumps(config.as_dict(), indent=2, sort_keys=True) + '\n'
