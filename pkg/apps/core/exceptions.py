"""
Exception hierarchy shared by every plqeigen app.

The CLI maps these classes onto exit statuses (see apps.cli.runner).
"""


class PlqError(Exception):
    """Base class for all plqeigen failures."""


class ValidationError(PlqError):
    """
    Invalid arguments, domains or exponents.

    Carries a mapping of field name to message so callers can report every
    offending field at once.
    """

    def __init__(self, detail, message=None):
        if isinstance(detail, str):
            detail = {'non_field_errors': detail}
        self.detail = dict(detail)
        super().__init__(message or self._render())

    def _render(self):
        return '; '.join(f'{field}: {message}' for field, message in self.detail.items())


class ConfigError(ValidationError):
    """Problems in a RunConfig document."""


class UnsupportedExponentsError(ValidationError):
    """Exponents outside the supported range (beta <= 1 where the constraint needs beta > 1)."""


class DomainMismatchError(ValidationError):
    """A limit spec and a grid describe different domains."""


class ScaleError(PlqError):
    """A power evaluation would overflow; the fields need renormalizing."""


class AdmissibilityError(PlqError):
    """A field pair leaves the admissible set (zero coupling, violated constraint)."""


class ShiftError(AdmissibilityError):
    """The shift constant is undefined because u vanishes identically."""


class DegenerateFieldError(PlqError):
    """A component has zero gradient energy, so it cannot be rescaled."""

    def __init__(self, component):
        self.component = component
        super().__init__(f'component {component!r} is flat (zero gradient energy)')


class StagnationError(PlqError):
    """The line search could not decrease the quotient."""

    def __init__(self, message, diagnostics=None):
        self.diagnostics = dict(diagnostics or {})
        super().__init__(message)


class SweepAborted(PlqError):
    """An inner solve failed; the rows computed so far are preserved."""

    def __init__(self, rows, p, cause):
        self.rows = list(rows)
        self.p = p
        self.cause = cause
        super().__init__(f'sweep aborted at p={p}: {cause}')


class OutputError(PlqError):
    """An artifact could not be written."""

    def __init__(self, path, reason):
        self.path = path
        super().__init__(f'cannot write {path}: {reason}')
