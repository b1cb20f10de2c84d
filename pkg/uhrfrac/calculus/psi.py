# == PSI ======================================================================
# Kernel-generating functions psi, the fractional order (alpha, beta) and the
# pointwise kernel and weight of the psi-fractional integral.
# License: BSD (see LICENSE.txt for details).

from dataclasses import dataclass

import numpy as np
from scipy.special import gamma as _gamma

from ..errors import DomainError, SingularityError

__all__ = (
    'IDENTITY',
    'POWER',
    'LOGARITHM',
    'EXPONENTIAL',
    'FAMILIES',
    'FractionalOrder',
    'PsiFunction',
    'clamp',
    'lerp',
    'psi_derivative',
    'psi_eval',
    'psi_inverse',
    'psi_kernel',
    'singular_weight'
)

IDENTITY = "identity"
POWER = "power"
LOGARITHM = "logarithm"
EXPONENTIAL = "exponential"

# Default parameter per family: unused, exponent sigma, shift c in ln(t+c),
# rate lambda in exp(lambda*t).
FAMILIES = {
    IDENTITY: 0.0,
    POWER: 1.0,
    LOGARITHM: 1.0,
    EXPONENTIAL: 1.0,
}


# =============================================================================

# -- INTERPOLATION ------------------------------------------------------------

def lerp(a, b, t):
    """Return linear interpolation between a and b for weight t in 0.0-1.0.

    For example: lerp(100, 200, 0.5) => 150.

    """
    if t < 0.0:
        return a

    if t > 1.0:
        return b

    return a + (b - a) * t


def clamp(v, a=0.0, b=1.0):
    """Clamp value to between a and b (inclusive)."""
    if a > b:
        a, b, = b, a

    return max(a, min(v, b))


# =============================================================================

# -- FRACTIONAL ORDER ---------------------------------------------------------

@dataclass(frozen=True)
class FractionalOrder(object):
    """The (alpha, beta) pair of the psi-Hilfer derivative.

    beta = 0 gives the psi-Riemann-Liouville case, beta = 1 the psi-Caputo
    case. The mild solution depends on beta only through gamma.

    """
    alpha: float
    beta: float = 0.0

    def __post_init__(self):
        if not 0.0 < self.alpha <= 1.0:
            raise DomainError("alpha must lie in (0, 1], got %r" % self.alpha)
        if not 0.0 <= self.beta <= 1.0:
            raise DomainError("beta must lie in [0, 1], got %r" % self.beta)

    @property
    def gamma(self):
        return self.alpha + self.beta * (1.0 - self.alpha)

    @property
    def is_riemann_liouville(self):
        return self.beta == 0.0

    @property
    def is_caputo(self):
        return self.beta == 1.0

    @property
    def kind(self):
        if self.is_riemann_liouville:
            return "psi-Riemann-Liouville"
        if self.is_caputo:
            return "psi-Caputo"
        return "psi-Hilfer"

    def __repr__(self):
        return "FractionalOrder(alpha=%r, beta=%r, gamma=%r)" % (
            self.alpha, self.beta, self.gamma)


# -- PSI FUNCTION -------------------------------------------------------------

@dataclass(frozen=True)
class PsiFunction(object):
    """A strictly increasing function psi from a closed catalog.

    The catalog is what makes psi' and the inverse exact, which the
    u = psi(s) substitution of the quadrature relies on:

    - identity:    psi(t) = t
    - power:       psi(t) = t**sigma, sigma > 0
    - logarithm:   psi(t) = ln(t + c), c > 0 (c = 1 gives ln(1 + t))
    - exponential: psi(t) = exp(lambda * t), lambda > 0

    Calls accept scalars or numpy arrays.

    """
    kind: str = IDENTITY
    parameter: float = 0.0

    def __post_init__(self):
        if self.kind not in FAMILIES:
            raise DomainError("unknown psi family %r (expected one of %s)" % (
                self.kind, ", ".join(sorted(FAMILIES))))
        if self.kind != IDENTITY and not self.parameter > 0:
            raise DomainError("psi family %r needs a positive parameter, "
                              "got %r" % (self.kind, self.parameter))

    @classmethod
    def from_spec(cls, kind, parameter=None):
        kind = kind.strip().lower()
        if parameter is None:
            parameter = FAMILIES.get(kind, 0.0)
        if kind == IDENTITY:
            parameter = 0.0
        return cls(kind, float(parameter))

    def describe(self):
        if self.kind == IDENTITY:
            return "t"
        if self.kind == POWER:
            return "t^%r" % self.parameter
        if self.kind == LOGARITHM:
            return "ln(t + %r)" % self.parameter
        return "exp(%r t)" % self.parameter

    # Domain of the formula itself; the problem interval is [0, T] on top.
    def _check(self, t):
        a = np.asarray(t, dtype=float)
        if not np.all(np.isfinite(a)):
            raise DomainError("psi argument must be finite")
        if self.kind == LOGARITHM:
            if np.any(a + self.parameter <= 0):
                raise DomainError(
                    "ln(t + %r) undefined at t = %r" % (
                        self.parameter, float(np.min(a))))
        elif self.kind == POWER and np.any(a < 0):
            raise DomainError("t**%r undefined at t = %r" % (
                self.parameter, float(np.min(a))))
        return a

    def __call__(self, t):
        a = self._check(t)
        if self.kind == IDENTITY:
            v = a * 1.0
        elif self.kind == POWER:
            v = np.power(a, self.parameter)
        elif self.kind == LOGARITHM:
            v = np.log(a + self.parameter)
        else:
            v = np.exp(self.parameter * a)
        return v if v.ndim else float(v)

    def derivative(self, t):
        a = self._check(t)
        if self.kind == IDENTITY:
            v = np.ones_like(a)
        elif self.kind == POWER:
            with np.errstate(divide="ignore"):
                v = self.parameter * np.power(a, self.parameter - 1.0)
        elif self.kind == LOGARITHM:
            v = 1.0 / (a + self.parameter)
        else:
            v = self.parameter * np.exp(self.parameter * a)
        return v if v.ndim else float(v)

    def inverse(self, u):
        u = np.asarray(u, dtype=float)
        if self.kind == IDENTITY:
            v = u * 1.0
        elif self.kind == POWER:
            if np.any(u < 0):
                raise DomainError("no real t with t**%r < 0" % self.parameter)
            v = np.power(u, 1.0 / self.parameter)
        elif self.kind == LOGARITHM:
            v = np.exp(u) - self.parameter
        else:
            if np.any(u <= 0):
                raise DomainError("exp never reaches %r" % float(np.min(u)))
            v = np.log(u) / self.parameter
        return v if v.ndim else float(v)


# =============================================================================

# -- POINTWISE OPERATIONS -----------------------------------------------------

def psi_eval(psi, t):
    """Return psi(t) as a float."""
    return float(psi(t))


def psi_derivative(psi, t):
    return float(psi.derivative(t))


def psi_inverse(psi, u):
    return float(psi.inverse(u))


def psi_kernel(psi, alpha, t, s):
    """Return N(t, s) = psi'(s) * (psi(t) - psi(s))**(alpha - 1).

    The kernel is unbounded at s = t for alpha < 1; integrate it (see the
    quadrature module) instead of evaluating it there.

    """
    if not 0.0 < alpha <= 1.0:
        raise DomainError("alpha must lie in (0, 1], got %r" % alpha)
    if s > t:
        raise DomainError("kernel needs s <= t, got s=%r > t=%r" % (s, t))
    d = psi(t) - psi(s)
    if alpha == 1.0:
        return psi_derivative(psi, s)
    if d <= 0.0:
        raise SingularityError(
            "kernel is singular at s = t = %r for alpha = %r" % (t, alpha))
    return psi_derivative(psi, s) * d ** (alpha - 1.0)


def singular_weight(psi, gamma, t):
    """Return (psi(t) - psi(0))**(gamma - 1) / Gamma(gamma).

    For gamma = 1 this is exactly 1 everywhere.

    """
    if gamma == 1.0:
        return 1.0
    if t < 0.0:
        raise DomainError("weight undefined for t = %r < 0" % t)
    d = psi(t) - psi(0.0)
    if d <= 0.0:
        raise SingularityError(
            "weight (psi(t) - psi(0))**%r is unbounded at t = 0" % (gamma - 1))
    return d ** (gamma - 1.0) / float(_gamma(gamma))
