# -*- coding: utf-8 -*-
"""The one-parameter Mittag-Leffler function E_alpha(t).

    E_alpha(t) = sum_{k >= 0} t**k / Gamma(alpha*k + 1)

Evaluated by direct summation of the series for 0 < alpha <= 1 and t >= 0.
For t in the desk range (t <= 5) the terms eventually decrease with a ratio

    r_k = t * Gamma(alpha*k + 1) / Gamma(alpha*k + alpha + 1)

that is itself decreasing in k (log-convexity of Gamma), so once r_k < 1 the
discarded tail is bounded by the geometric series term_k * r_k / (1 - r_k).

Example::

    >>> round(mittag_leffler(1.0, 1.0), 12)
    2.718281828459
    >>> mittag_leffler(0.5, 0.0)
    1.0

"""

import logging
import warnings

import numpy as np
from scipy.special import gammaln

from ..errors import ConvergenceError, DomainError
from ..state import settings_mixin

__all__ = ('DESK_RANGE', 'mittag_leffler')

log = logging.getLogger(__name__)

# Largest argument for which plain summation stays accurate in double
# precision (the peak term grows like exp(t**(1/alpha))).
DESK_RANGE = 5.0


def _series(alpha, t, tol, max_terms):
    if t == 0.0:
        return 1.0
    log_t = np.log(t)
    total = 1.0
    k = 1
    while True:
        if k > max_terms:
            raise ConvergenceError(
                "E_%r(%r): tail bound not met within %i terms" % (
                    alpha, t, max_terms))
        term = np.exp(k * log_t - gammaln(alpha * k + 1.0))
        total += term
        ratio = np.exp(log_t + gammaln(alpha * k + 1.0)
                       - gammaln(alpha * (k + 1) + 1.0))
        if ratio < 1.0:
            tail = term * ratio / (1.0 - ratio)
            if tail < tol * max(1.0, abs(total)):
                return float(total)
        k += 1


def mittag_leffler(alpha, t, tol=None, max_terms=None):
    """Return E_alpha(t) for 0 < alpha <= 1 and t >= 0.

    t may be a scalar or a numpy array (evaluated element-wise). The series
    is truncated once the discarded tail is below tol * max(1, |E|);
    ConvergenceError is raised when that takes more than max_terms terms.

    """
    tol, max_terms = settings_mixin(
        "ml_tol", "ml_max_terms", ml_tol=tol, ml_max_terms=max_terms)
    if not 0.0 < alpha <= 1.0:
        raise DomainError("Mittag-Leffler order must lie in (0, 1], got %r"
                          % alpha)
    if not tol > 0:
        raise DomainError("tolerance must be positive, got %r" % tol)
    a = np.asarray(t, dtype=float)
    if not np.all(np.isfinite(a)) or np.any(a < 0.0):
        raise DomainError("Mittag-Leffler argument must be finite and >= 0")
    if np.any(a > DESK_RANGE):
        warnings.warn("E_%r evaluated beyond t = %r; series summation loses "
                      "relative accuracy there" % (alpha, DESK_RANGE))
    if a.ndim == 0:
        return _series(alpha, float(a), tol, max_terms)
    log.debug("E_%r on %i points", alpha, a.size)
    flat = [_series(alpha, float(v), tol, max_terms) for v in a.ravel()]
    return np.array(flat).reshape(a.shape)
