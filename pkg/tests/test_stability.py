import dataclasses
import math

import mpmath
import numpy as np
import pytest

from uhrfrac.analysis.picard import perturb, picard_solve
from uhrfrac.analysis.stability import (as_fraction, certify,
                                        check_hypotheses, envelope,
                                        envelope_coeff, generalized_distance,
                                        phi_constant, residual_check,
                                        verify_envelope, verify_h6)
from uhrfrac.calculus import caching
from uhrfrac.calculus.psi import FractionalOrder, PsiFunction
from uhrfrac.calculus.quadrature import GridFunction, build_mesh
from uhrfrac.errors import ContractionError, DomainError, MeshMismatchError
from uhrfrac.model.expr import parse
from uhrfrac.model.problem import builtin_scenario

IDENTITY = PsiFunction("identity")


@pytest.fixture(autouse=True)
def fresh_cache():
    caching.flush()
    yield
    caching.flush()


@pytest.fixture(scope="module")
def solved():
    """Converged y0 of each built-in scenario, started from x0 = 1."""
    out = {}
    for name in ("example-integer", "example-rl"):
        problem, h = builtin_scenario(name)
        problem = problem.with_x0(1.0)
        out[name] = problem, h, picard_solve(problem, tol=1e-12,
                                             n_per_interval=32)
    return out


def reference_phi(h, alpha, P):
    """The contraction constant in 50-digit arithmetic."""
    with mpmath.workdps(50):
        a = mpmath.mpf(alpha)
        G = mpmath.gamma(a + 1)
        C, L, K = (mpmath.mpf(v) for v in (h.C_phi, h.L_ell, h.K_bar))
        P = mpmath.mpf(P)
        impulse = max([(L * C + L * P ** a / G + 1) * mpmath.mpf(L_g)
                       for L_g in h.L_g] or [mpmath.mpf(0)])
        forcing = (K * P ** (2 * a) / G * C ** 2 + K * C ** 2 + C) * \
            mpmath.mpf(h.L_f)
        return float(impulse + forcing)


#--- CONTRACTION CONSTANT -----------------------------------------------------

@pytest.mark.parametrize("name", ["example-integer", "example-rl"])
def test_phi_constant_against_high_precision(name):
    problem, h = builtin_scenario(name)
    value = phi_constant(h, problem.order, problem.psi, problem.T)
    assert value == pytest.approx(reference_phi(h, problem.alpha, 2.0),
                                  rel=1e-12)


def test_phi_constant_examples():
    problem, h = builtin_scenario("example-integer")
    assert phi_constant(h, problem.order, problem.psi, 2.0) == \
        pytest.approx(0.54, rel=1e-12)
    problem, h = builtin_scenario("example-rl")
    assert phi_constant(h, problem.order, problem.psi, 2.0) == \
        pytest.approx(0.499745, abs=1e-6)


def test_phi_constant_without_impulses():
    problem, h = builtin_scenario("example-integer")
    bare = dataclasses.replace(h, L_g=())
    value = phi_constant(bare, problem.order, problem.psi, 2.0)
    # (K P^2 C^2 + K C^2 + C) L_f with P = 2
    assert value == pytest.approx((0.4 + 0.1 + 1.0) * 0.2, rel=1e-12)


def test_phi_constant_is_monotone():
    problem, h = builtin_scenario("example-rl")
    base = phi_constant(h, problem.order, problem.psi, 2.0)
    for change in [dict(L_f=0.3), dict(L_g=(0.3,)), dict(K_bar=0.2),
                   dict(L_ell=0.1), dict(C_phi=1.5)]:
        bigger = dataclasses.replace(h, **change)
        assert phi_constant(bigger, problem.order, problem.psi, 2.0) > base
    assert phi_constant(h, problem.order, problem.psi, 3.0) > base


def test_phi_with_other_psi():
    _, h = builtin_scenario("example-rl")
    order = FractionalOrder(0.5, 0.0)
    psi = PsiFunction("logarithm", 1.0)
    value = phi_constant(h, order, psi, 2.0)
    assert value == pytest.approx(reference_phi(h, 0.5, math.log(3.0)),
                                  rel=1e-12)


def test_envelope_coefficient():
    assert envelope_coeff(14 / 25, 1.0) == pytest.approx(50 / 11, rel=1e-15)
    assert envelope_coeff(3 / 8, 1.0) == pytest.approx(16 / 5, rel=1e-15)
    assert envelope_coeff(1 - 1e-6, 1.0) > 1e6
    with pytest.raises(ContractionError):
        envelope_coeff(1.0, 1.0)
    with pytest.raises(ContractionError):
        envelope_coeff(1.3, 1.0)


def test_as_fraction():
    assert as_fraction(0.375) == "3/8"
    assert as_fraction(50 / 11) == "50/11"
    assert as_fraction(math.pi) == repr(math.pi)


#--- CERTIFICATE --------------------------------------------------------------

def test_certify_integer():
    problem, h = builtin_scenario("example-integer")
    cert = certify(problem, h)
    assert cert.contraction_ok
    assert cert.phi_constant == pytest.approx(0.54, rel=1e-12)
    assert cert.envelope_coeff == pytest.approx(2.0 / 0.46, rel=1e-12)
    assert cert.phi_discrepancy == pytest.approx(-0.02, abs=1e-12)
    assert cert.envelope_discrepancy < 0
    lines = cert.lines()
    assert lines[0].startswith("Phi (formula): ")
    assert float(lines[0].split(": ")[1]) == cert.phi_constant
    assert "Phi, %s: 14/25 (formula - %s = -0.02)" % (
        h.reference_label, h.reference_label) in lines
    assert any(line.startswith("envelope coefficient, %s: 50/11"
                               % h.reference_label) for line in lines)
    assert "contraction: yes" in lines


def test_certify_rl():
    problem, h = builtin_scenario("example-rl")
    cert = certify(problem, h)
    assert cert.contraction_ok
    assert cert.reference_phi == 0.375
    assert cert.reference_label == h.reference_label
    assert any("%s: 3/8" % h.reference_label in line for line in cert.lines())
    assert cert.phi_discrepancy == pytest.approx(0.499745 - 0.375, abs=1e-6)


def test_certify_without_contraction():
    problem, h = builtin_scenario("example-integer")
    big = dataclasses.replace(h, L_f=2.0)
    cert = certify(problem, big)
    assert not cert.contraction_ok
    assert cert.envelope_coeff is None
    assert "contraction: no (Phi >= 1)" in cert.lines()
    mesh = problem.mesh(8)
    with pytest.raises(ContractionError):
        envelope(cert, big.phi, mesh)


#--- HYPOTHESIS H6 ------------------------------------------------------------

def test_h6_constant_phi():
    # I^1 1 = t, sup over (0, 2] is 2
    mesh = build_mesh([], 2.0, 16, 2.0)
    assert verify_h6(IDENTITY, 1.0, parse("1"), mesh) == pytest.approx(
        2.0, rel=1e-12)
    # I^{1/2} 1 = t^{1/2} / Gamma(3/2)
    assert verify_h6(IDENTITY, 0.5, parse("1"), mesh) == pytest.approx(
        math.sqrt(2.0) / math.gamma(1.5), rel=1e-10)


def test_h6_exponential_phi():
    # I^1 e^t / e^t = 1 - e^{-t}
    mesh = build_mesh([], 2.0, 128, 2.0)
    sup = verify_h6(IDENTITY, 1.0, parse("mitlef(1, t)"), mesh)
    assert sup == pytest.approx(1.0 - math.exp(-2.0), abs=1e-3)
    assert sup <= 1.0


def test_h6_mittag_leffler_phi():
    mesh = build_mesh([(1.0, 2.0)], 2.0, 64, 2.0)
    sup = verify_h6(IDENTITY, 0.5, parse("mitlef(0.5, t)"), mesh)
    assert 0.0 < sup <= 1.0 + 1e-3


def test_h6_rejects_nonpositive_phi():
    mesh = build_mesh([], 1.0, 8, 1.0)
    with pytest.raises(DomainError):
        verify_h6(IDENTITY, 0.5, parse("t - 0.5"), mesh)


@pytest.mark.parametrize("name", ["example-integer", "example-rl"])
def test_check_hypotheses(name):
    problem, h = builtin_scenario(name)
    check = check_hypotheses(problem, h, problem.mesh(32))
    assert check.h6_ok
    assert check.phi_nondecreasing
    assert check.h6_sup <= h.C_phi


def test_check_hypotheses_flags_small_c_phi():
    problem, h = builtin_scenario("example-integer")
    check = check_hypotheses(problem, dataclasses.replace(h, C_phi=0.1),
                             problem.mesh(32))
    assert not check.h6_ok


#--- RESIDUALS ----------------------------------------------------------------

@pytest.mark.parametrize("name", ["example-integer", "example-rl"])
def test_fixed_point_has_small_defect(solved, name):
    problem, h, result = solved[name]
    report = residual_check(problem, h, result.y0)
    assert report.satisfied
    assert report.max_defect <= 1e-10
    assert len(report.lines()) == len(report.entries)


@pytest.mark.parametrize("name", ["example-integer", "example-rl"])
def test_small_perturbation_satisfies_inequalities(solved, name):
    problem, h, result = solved[name]
    y = perturb(result.y0, h.phi, h.delta, 1e-3, problem.psi)
    report = residual_check(problem, h, y)
    assert report.satisfied
    assert all(e.excess < 0 for e in report.entries)


def test_large_perturbation_violates_inequalities(solved):
    problem, h, result = solved["example-integer"]
    y = perturb(result.y0, h.phi, h.delta, 10.0, problem.psi)
    report = residual_check(problem, h, y)
    assert not report.satisfied
    assert any("NOT satisfied" in line for line in report.lines())


def test_residual_rejects_foreign_weighting(solved):
    problem, h, result = solved["example-rl"]
    plain = GridFunction(result.mesh, np.zeros(len(result.mesh)))
    with pytest.raises(MeshMismatchError):
        residual_check(problem, h, plain)


#--- ENVELOPE -----------------------------------------------------------------

@pytest.mark.parametrize("name", ["example-integer", "example-rl"])
def test_envelope_holds_for_small_perturbation(solved, name):
    problem, h, result = solved[name]
    cert = certify(problem, h)
    y0 = result.y0
    assert verify_envelope(y0, y0, cert, h.phi, y0.mesh, problem.psi) == \
        (True, 0.0)
    y = perturb(y0, h.phi, h.delta, 1e-3, problem.psi)
    ok, violation = verify_envelope(y, y0, cert, h.phi, y0.mesh, problem.psi)
    assert ok and violation == 0.0


def test_envelope_violation_is_reported(solved):
    problem, h, result = solved["example-integer"]
    cert = certify(problem, h)
    y0 = result.y0
    y = perturb(y0, h.phi, h.delta, 2.0 * cert.envelope_coeff, problem.psi)
    ok, violation = verify_envelope(y, y0, cert, h.phi, y0.mesh, problem.psi)
    assert not ok
    assert violation > 0
    bound = envelope(cert, h.phi, y0.mesh, problem.psi)
    assert bound == pytest.approx(
        cert.envelope_coeff * (np.exp(y0.mesh.nodes) + 1.0), rel=1e-12)


def test_generalized_distance(solved):
    problem, h, result = solved["example-integer"]
    y0 = result.y0
    y = perturb(y0, h.phi, h.delta, 1e-3, problem.psi)
    assert generalized_distance(y, y0, h.phi, h.delta) == pytest.approx(
        1e-3, rel=1e-9)
    assert generalized_distance(y0, y0, h.phi, h.delta) == 0.0
    other = GridFunction(build_mesh([], 2.0, 4, 1.0), np.zeros(5))
    with pytest.raises(MeshMismatchError):
        generalized_distance(y0, other, h.phi, h.delta)
