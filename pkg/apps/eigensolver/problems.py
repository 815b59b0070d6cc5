"""
Quotient problems driven by the projected descent engine.

A problem names its unknown blocks, maps trial fields onto its admissible
set, and supplies the log quotient, the Euler-Lagrange residual and a
positive definite curvature matrix for every block.
"""
import math
from abc import ABC, abstractmethod

import numpy as np
from scipy import sparse

from apps.calculus.energy import (
    DEFAULT_HESSIAN_FLOOR,
    constraint_value,
    coupling_curvature,
    coupling_gradient,
    log_power_energy,
    log_rayleigh_quotient,
    power_energy_gradient,
    power_energy_hessian,
)
from apps.calculus.logmath import check_log_scale, log_abs, log_sum, safe_exp, signed_log_sum
from apps.calculus.models import FieldPair
from apps.core.exceptions import AdmissibilityError

from .projection import balancing_shift, project_pair


def log_power_norm(f, power, dom):
    """log of int |f|^power."""
    active = dom.active_mask
    log_terms = np.log(dom.node_weights[active]) + power * log_abs(f[active])
    check_log_scale(log_terms, f'|f|^{power:g}')
    return log_sum(log_terms)


def power_mass_gradient(f, power, dom):
    """w |f|^(power-2) f at every node, the nodal derivative of int |f|^power / power."""
    active = dom.active_mask & (f != 0)
    log_terms = np.log(dom.node_weights[active]) + (power - 1.0) * np.log(np.abs(f[active]))
    check_log_scale(log_terms, f'|f|^{power - 1.0:g}')
    out = np.zeros(dom.shape)
    out[active] = np.sign(f[active]) * np.exp(log_terms)
    return out


def power_balance(f, power, dom):
    """int |f|^(power-2) f."""
    active = dom.active_mask & (f != 0)
    log_terms = np.log(dom.node_weights[active]) + (power - 1.0) * np.log(np.abs(f[active]))
    log_value, sign = signed_log_sum(log_terms, np.sign(f[active]))
    return sign * safe_exp(log_value, 'balance integral') if sign else 0.0


class QuotientProblem(ABC):
    """Blocks of unknowns and the quotient they minimize."""

    names = ()
    constant_blocks = frozenset()

    def __init__(self, dom, floor=DEFAULT_HESSIAN_FLOOR):
        self.dom = dom
        self.floor = floor
        # Block name -> boolean node mask of its free values
        self.unknowns = {}

    @abstractmethod
    def project(self, fields):
        """Admissible, normalized representative of fields (a name -> array mapping)."""

    @abstractmethod
    def log_quotient(self, fields):
        """log of the quotient at admissible fields."""

    @abstractmethod
    def residuals(self, fields, lam):
        """Nodal Euler-Lagrange residual of every block at eigenvalue estimate lam."""

    @abstractmethod
    def curvature(self, fields, lam):
        """Sparse positive definite curvature of every block over all nodes."""

    def constraint_defect(self, fields):
        """|side constraint| at admissible fields; 0 when the problem has none."""
        return 0.0


class CoupledProblem(QuotientProblem):
    """The coupled (u, v) quotient at fixed exponents."""

    names = ('u', 'v')
    constant_blocks = frozenset({'v'})

    def __init__(self, dom, e, floor=DEFAULT_HESSIAN_FLOOR):
        super().__init__(dom, floor)
        self.e = e
        self.unknowns = {'u': dom.interior_mask & dom.active_mask, 'v': dom.active_mask}

    @staticmethod
    def pair(fields):
        return FieldPair(u=fields['u'], v=fields['v'])

    def project(self, fields):
        fp = project_pair(self.pair(fields), self.e, self.dom)
        return {'u': fp.u, 'v': fp.v}

    def log_quotient(self, fields):
        return log_rayleigh_quotient(self.pair(fields), self.e, self.dom)

    def residuals(self, fields, lam):
        fp = self.pair(fields)
        du, dv = coupling_gradient(fp, self.e, self.dom)
        return {
            'u': power_energy_gradient(fp.u, self.e.p, self.dom) - lam * du,
            'v': power_energy_gradient(fp.v, self.e.q, self.dom) - lam * dv,
        }

    def curvature(self, fields, lam):
        fp = self.pair(fields)
        cuu, _ = coupling_curvature(fp, self.e, self.dom)
        # Only the convex part of -lam C enters; beta > 1 makes the v part concave
        extra = sparse.diags(np.maximum(-lam * cuu, 0.0).ravel())
        return {
            'u': power_energy_hessian(fp.u, self.e.p, self.dom, self.floor) + extra,
            'v': power_energy_hessian(fp.v, self.e.q, self.dom, self.floor),
        }

    def constraint_defect(self, fields):
        return abs(constraint_value(self.pair(fields), self.e, self.dom))


class _ScalarProblem(QuotientProblem):
    """int |grad f|^power / int |f|^power for a single field."""

    name = 'f'

    def __init__(self, dom, power, floor=DEFAULT_HESSIAN_FLOOR):
        super().__init__(dom, floor)
        self.power = power
        self.names = (self.name,)

    def normalized(self, f):
        log_norm = log_power_norm(f, self.power, self.dom)
        if log_norm == -np.inf:
            raise AdmissibilityError(f'{self.name} vanishes identically')
        return f * math.exp(-log_norm / self.power)

    def log_quotient(self, fields):
        f = fields[self.name]
        return (
            log_power_energy(f, self.power, self.dom)
            + math.log(self.power)
            - log_power_norm(f, self.power, self.dom)
        )

    def residuals(self, fields, lam):
        f = fields[self.name]
        gradient = power_energy_gradient(f, self.power, self.dom)
        mass = power_mass_gradient(f, self.power, self.dom)
        return {self.name: self.power * (gradient - lam * mass)}

    def curvature(self, fields, lam):
        f = fields[self.name]
        return {self.name: self.power * power_energy_hessian(f, self.power, self.dom, self.floor)}


class DirichletProblem(_ScalarProblem):
    """First Dirichlet eigenvalue of the p-Laplacian."""

    name = 'u'

    def __init__(self, dom, power, floor=DEFAULT_HESSIAN_FLOOR):
        super().__init__(dom, power, floor)
        self.unknowns = {self.name: dom.interior_mask & dom.active_mask}

    def project(self, fields):
        u = np.where(self.dom.boundary_mask, 0.0, fields[self.name])
        return {self.name: self.normalized(u)}


class NeumannProblem(_ScalarProblem):
    """First nontrivial Neumann eigenvalue of the q-Laplacian."""

    name = 'v'
    constant_blocks = frozenset({'v'})

    def __init__(self, dom, power, floor=DEFAULT_HESSIAN_FLOOR):
        super().__init__(dom, power, floor)
        self.unknowns = {self.name: dom.active_mask}

    def project(self, fields):
        v = fields[self.name]
        active = self.dom.active_mask
        shift = balancing_shift(v[active], np.log(self.dom.node_weights[active]), self.power)
        return {self.name: self.normalized(v - shift)}

    def constraint_defect(self, fields):
        return abs(power_balance(fields[self.name], self.power, self.dom))
