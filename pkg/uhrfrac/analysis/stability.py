# -*- coding: utf-8 -*-
"""Contraction constant, Ulam-Hyers-Rassias envelope and residual checks.

The contraction constant of the mild-solution operator is

    Phi = max_i (L C + L P^alpha / Gamma(alpha + 1) + 1) L_gi
          + (K P^(2 alpha) / Gamma(alpha + 1) C^2 + K C^2 + C) L_f

with C = C_phi, L = L_ell, K = K_bar and P = psi(T) - psi(0). When Phi < 1
every y whose integral defect stays below phi and delta satisfies

    |y(t) - y0(t)| <= (1 + C_phi) / (1 - Phi) * (phi(t) + delta).

"""

import logging
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from scipy.special import gamma as _gamma

from .picard import MildOperator
from ..calculus.quadrature import HEAD, IMPULSE, ProductRule
from ..errors import ContractionError, DomainError, MeshMismatchError
from ..model.expr import evaluate
from ..state import settings_mixin

__all__ = (
    'HypothesisCheck',
    'ResidualEntry',
    'ResidualReport',
    'StabilityCertificate',
    'certify',
    'check_hypotheses',
    'envelope',
    'envelope_coeff',
    'generalized_distance',
    'phi_constant',
    'residual_check',
    'verify_envelope',
    'verify_h6'
)

log = logging.getLogger(__name__)


def as_fraction(value, max_denominator=1000):
    """Return a short fraction text for a reference value, e.g. '3/8'."""
    f = Fraction(value).limit_denominator(max_denominator)
    if abs(float(f) - value) > 1e-12 * max(1.0, abs(value)):
        return repr(value)
    return str(f)


# =============================================================================

#--- CONTRACTION CONSTANT -----------------------------------------------------

def phi_constant(h, order, psi, T):
    """Return Phi for the hypothesis data (the L_g term is 0 when m = 0)."""
    a = order.alpha
    P = psi(T) - psi(0.0)
    G = float(_gamma(a + 1.0))
    C = h.C_phi
    impulse = 0.0
    if h.L_g:
        impulse = max((h.L_ell * C + h.L_ell * P ** a / G + 1.0) * L_g
                      for L_g in h.L_g)
    forcing = (h.K_bar * P ** (2 * a) / G * C * C + h.K_bar * C * C + C) * h.L_f
    return impulse + forcing


def envelope_coeff(phi_c, c_phi):
    """Return (1 + c_phi) / (1 - phi_c); ContractionError if phi_c >= 1."""
    if not phi_c < 1.0:
        raise ContractionError(
            "contraction constant %r is not below 1" % phi_c)
    return (1.0 + c_phi) / (1.0 - phi_c)


@dataclass(frozen=True)
class StabilityCertificate(object):
    phi_constant: float
    contraction_ok: bool
    envelope_coeff: float
    c_phi_used: float
    delta: float
    reference_phi: float = None
    reference_envelope: float = None
    reference_label: str = "reference"

    @property
    def phi_discrepancy(self):
        if self.reference_phi is None:
            return None
        return self.phi_constant - self.reference_phi

    @property
    def envelope_discrepancy(self):
        if self.reference_envelope is None or self.envelope_coeff is None:
            return None
        return self.envelope_coeff - self.reference_envelope

    def lines(self):
        """Return the certificate as 'key: value' text lines."""
        out = ["Phi (formula): %.17g" % self.phi_constant]
        if self.reference_phi is not None:
            out.append("Phi, %s: %s (formula - %s = %.6g)" % (
                self.reference_label, as_fraction(self.reference_phi),
                self.reference_label, self.phi_discrepancy))
        out.append("contraction: %s" % ("yes" if self.contraction_ok
                                        else "no (Phi >= 1)"))
        if self.envelope_coeff is not None:
            out.append("envelope coefficient (1 + C_phi)/(1 - Phi): %.17g" %
                       self.envelope_coeff)
        if self.reference_envelope is not None:
            note = ""
            if self.envelope_discrepancy is not None and \
               abs(self.envelope_discrepancy) > 1e-12:
                note = " (differs from the formula value)"
            out.append("envelope coefficient, %s: %s%s" % (
                self.reference_label, as_fraction(self.reference_envelope),
                note))
        out.append("C_phi: %r" % self.c_phi_used)
        out.append("delta: %r" % self.delta)
        return out


def certify(problem, h):
    """Return the StabilityCertificate of a problem and its hypotheses."""
    phi_c = phi_constant(h, problem.order, problem.psi, problem.T)
    ok = phi_c < 1.0
    coeff = envelope_coeff(phi_c, h.C_phi) if ok else None
    cert = StabilityCertificate(phi_c, ok, coeff, h.C_phi, h.delta,
                                h.reference_phi, h.reference_envelope,
                                h.reference_label)
    if cert.phi_discrepancy is not None and abs(cert.phi_discrepancy) > 1e-12:
        log.info("Phi formula %.12g differs from %s %s", phi_c,
                 h.reference_label, as_fraction(h.reference_phi))
    if not ok:
        log.warning("Phi = %.12g >= 1: no contraction", phi_c)
    return cert


# =============================================================================

#--- HYPOTHESIS H6 ------------------------------------------------------------

def _phi_on(phi, mesh, psi):
    values = evaluate(phi, t=mesh.nodes, psi=psi)
    return np.asarray(values, dtype=float) * np.ones(len(mesh))


def verify_h6(psi, alpha, phi, mesh):
    """Return max over nodes t > 0 of I^{alpha,psi} phi(t) / phi(t).

    H6 holds with constant C_phi when the result is <= C_phi.

    """
    values = _phi_on(phi, mesh, psi)
    if np.any(values[1:] <= 0):
        raise DomainError("phi must be positive on (0, T]")
    integral = ProductRule(psi, alpha, mesh).integrate_all(values, 0)
    return float(np.max(integral[1:] / values[1:]))


@dataclass(frozen=True)
class HypothesisCheck(object):
    h6_sup: float
    h6_ok: bool
    phi_nondecreasing: bool


def check_hypotheses(problem, h, mesh=None):
    """Check H6 and the monotonicity of phi numerically."""
    mesh = problem.mesh() if mesh is None else mesh
    sup = verify_h6(problem.psi, problem.alpha, h.phi, mesh)
    values = _phi_on(h.phi, mesh, problem.psi)
    monotone = bool(np.all(np.diff(values) >= -1e-12 * np.maximum(
        1.0, np.abs(values[1:]))))
    ok = sup <= h.C_phi * (1.0 + 1e-6)
    if not ok:
        log.warning("H6: sup I phi / phi = %.6g exceeds C_phi = %r",
                    sup, h.C_phi)
    return HypothesisCheck(sup, ok, monotone)


# =============================================================================

#--- RESIDUALS ----------------------------------------------------------------

@dataclass(frozen=True)
class ResidualEntry(object):
    """Maxima over one interval of the defect |y - Omega y| and its excess.

    excess is the largest defect minus bound; satisfied compares it with the
    numerical slack.

    """
    kind: str
    index: int
    defect: float
    excess: float
    satisfied: bool


@dataclass(frozen=True)
class ResidualReport(object):
    entries: tuple = field(default_factory=tuple)

    @property
    def satisfied(self):
        return all(e.satisfied for e in self.entries)

    @property
    def max_defect(self):
        return max([e.defect for e in self.entries] or [0.0])

    def lines(self):
        out = []
        for e in self.entries:
            out.append("%-8s %i: max defect %.6e, max excess %.6e, %s" % (
                e.kind, e.index, e.defect, e.excess,
                "ok" if e.satisfied else "NOT satisfied"))
        return out


def residual_check(problem, h, y, memory_anchor=None, slack_abs=None,
                   slack_rel=None):
    """Evaluate the integral inequalities of an approximate solution y.

    On an impulse interval the defect |y - g_i(t, y, M)| is compared with
    delta, on the head |y - Psi^gamma y_0 - I_0 f| with I_0^alpha phi (both in
    weighted form), and on a free interval |y - g_i(s_i, ...) - I_{s_i} f|
    with delta + I_{s_i}^alpha phi. The head uses y's own initial datum
    Gamma(gamma) * (weighted y)(0).

    """
    slack_abs, slack_rel = settings_mixin(
        "slack_abs", "slack_rel", slack_abs=slack_abs, slack_rel=slack_rel)
    mesh = y.mesh
    omega = MildOperator(problem, mesh, memory_anchor, "explicit")
    if y.gamma != problem.gamma or not y.weighted_head:
        raise MeshMismatchError("y must use the problem's head weighting")
    x0 = float(_gamma(problem.gamma)) * y.values[0]
    # Stored representation: both sides of the head inequality carry the
    # positive weight (psi(t) - psi(0))**(1 - gamma).
    oy = omega(y, x0=x0)
    defect = np.abs(y.values - oy.values)
    # The right limit opening an impulse or free interval is checked too;
    # there I_{s_i} phi vanishes and the bound is delta.
    limit_defect = np.abs(y.right_limits() - oy.right_limits())
    slot = dict((b, k) for k, b in enumerate(mesh.boundaries))
    phi = _phi_on(h.phi, mesh, problem.psi)
    weights = y.weights()
    rule = omega.rule
    entries = []
    for iv in mesh.intervals:
        nodes = np.array([j for j in iv.nodes if j > 0])
        if len(nodes) == 0:
            continue
        if iv.kind == HEAD:
            bound = weights[nodes] * rule.integrate_all(phi, 0)[nodes]
        elif iv.kind == IMPULSE:
            bound = np.full(len(nodes), h.delta)
        else:
            bound = h.delta + rule.integrate_all(phi, iv.start)[nodes]
        d = defect[nodes]
        if iv.kind != HEAD:
            d = np.append(d, limit_defect[slot[iv.start]])
            bound = np.append(bound, h.delta)
        excess = d - bound
        ok = bool(np.all(excess <= slack_abs + slack_rel * np.abs(bound)))
        entries.append(ResidualEntry(iv.kind, iv.index, float(np.max(d)),
                                     float(np.max(excess)), ok))
    report = ResidualReport(tuple(entries))
    log.info("residual check: %s", "satisfied" if report.satisfied
             else "not satisfied")
    return report


# =============================================================================

#--- ENVELOPE -----------------------------------------------------------------

def envelope(cert, phi, mesh, psi=None):
    """Return envelope_coeff * (phi(t) + delta) at every node."""
    if not cert.contraction_ok:
        raise ContractionError("no envelope without contraction")
    return cert.envelope_coeff * (_phi_on(phi, mesh, psi) + cert.delta)


def verify_envelope(y, y0, cert, phi, mesh, psi=None):
    """Return (flag, max_violation) of |y - y0| <= envelope at nodes t > 0."""
    if y.mesh != mesh or y0.mesh != mesh:
        raise MeshMismatchError("y, y0 and the envelope use different meshes")
    bound = envelope(cert, phi, mesh, psi)
    gap = np.abs(y.raw() - y0.raw())[1:] - bound[1:]
    violation = float(max(0.0, np.max(gap))) if len(gap) else 0.0
    return violation == 0.0, violation


def generalized_distance(a, b, phi, delta, psi=None):
    """Return the smallest C with |a - b| <= C (phi + delta) at nodes t > 0."""
    if a.mesh != b.mesh:
        raise MeshMismatchError("grid functions live on different meshes")
    scale = _phi_on(phi, a.mesh, psi) + delta
    if np.any(scale[1:] <= 0):
        raise DomainError("phi + delta must be positive on (0, T]")
    return float(np.max(np.abs(a.raw() - b.raw())[1:] / scale[1:]))
