# == PICARD ===================================================================
# The mild-solution operator of the impulsive problem and Picard iteration to
# its fixed point.
# License: BSD (see LICENSE.txt for details).

# On the head [0, t1] the operator is
#
#   (Omega x)(t) = Psi^gamma(t, 0) x0 + I_0^alpha f(., x, w)(t),
#
# with w = I_0^alpha K(., x) the inner memory. On an impulse interval
# (t_i, s_i] it is g_i(t, x(t), M(t)) with M = I_0^alpha ell(., x), and on
# a free interval (s_i, t_{i+1}] it is
#
#   g_i(s_i, x(s_i), M_t(s_i)) + I_{s_i}^alpha f(., x, w)(t),
#
# where M_t(s_i) integrates ell up to s_i with the kernel anchored at t (or at
# s_i, with memory_anchor = "s_i"). Values on the head are kept in weighted
# form (psi(t) - psi(0))**(1 - gamma) * x(t).
#
# x jumps where an impulse or free interval opens. Iterates carry the right
# limit there next to the node value (the left limit), and the integrands f,
# K and ell inherit it, so no quadrature panel interpolates across a jump.

import logging
from dataclasses import dataclass, field

import numpy as np
from scipy.special import gamma as _gamma

from ..calculus.psi import lerp
from ..calculus.quadrature import HEAD, IMPULSE, GridFunction, ProductRule
from ..errors import ConvergenceError, DomainError, MeshMismatchError
from ..model.expr import evaluate
from ..state import settings_mixin

__all__ = (
    'MildOperator',
    'SolveResult',
    'impulse_pointwise_solve',
    'omega_apply',
    'perturb',
    'picard_solve',
    'skeleton',
    'weighted_sup_distance'
)

log = logging.getLogger(__name__)


def _resolve(problem, **kwargs):
    """Resolve solver options: keyword > problem [solver] > global."""
    names = list(kwargs)
    merged = {}
    for name in names:
        value = kwargs[name]
        if value is None:
            value = problem.option(name)
        merged[name] = value
    return dict(zip(names, settings_mixin(*names, **merged)))


# =============================================================================

#--- DISTANCE -----------------------------------------------------------------

def weighted_sup_distance(a, b):
    """Return max |a - b| over the nodes in the stored representation.

    That is the weighted value on the head and the raw value elsewhere. The
    right limits at the interval boundaries count as extra nodes.

    """
    if a.mesh != b.mesh:
        raise MeshMismatchError("grid functions live on different meshes")
    if a.singular_head != b.singular_head or \
       (a.singular_head and a.gamma != b.gamma):
        raise MeshMismatchError("grid functions use different head weights")
    d = np.abs(a.values - b.values)
    d = np.concatenate([d, np.abs(a.right_limits() - b.right_limits())])
    if len(d) == 0:
        return 0.0
    return float(np.max(d))


#--- IMPULSES -----------------------------------------------------------------

def impulse_pointwise_solve(problem, i, t, memory_M, start=0.0, damping=None,
                            tol=None, max_iter=None):
    """Return the solution x of x = g_i(t, x, M) at one point t in (t_i, s_i].

    Plain iteration is used while the steps shrink. Once a step fails to
    shrink, the iteration switches to x <- lerp(x, g(x), damping) for the
    rest of the solve. Raises ConvergenceError when max_iter steps do not
    reach |step| <= tol * max(1, |x|).

    """
    damping, tol, max_iter = settings_mixin(
        "damping", "impulse_tol", "impulse_max_iter",
        damping=damping, impulse_tol=tol, impulse_max_iter=max_iter)
    if not 1 <= i <= problem.m:
        raise DomainError("impulse index %r outside 1..%i" % (i, problem.m))
    g = problem.g[i - 1]
    x = float(start)
    damped = False
    previous = np.inf
    for k in range(1, int(max_iter) + 1):
        gx = evaluate(g, t=t, x=x, w=memory_M, psi=problem.psi)
        step = abs(gx - x)
        if step <= tol * max(1.0, abs(x)):
            return gx if not damped else lerp(x, gx, damping)
        if not damped and step >= previous:
            damped = True
            log.warning("g%i at t = %r oscillates, damping with %r",
                        i, t, damping)
        x = lerp(x, gx, damping) if damped else gx
        previous = step
    raise ConvergenceError("x = g%i(%r, x, %r) unresolved after %i steps" % (
        i, t, memory_M, max_iter))


# =============================================================================

#--- OPERATOR -----------------------------------------------------------------

class MildOperator(object):

    def __init__(self, problem, mesh, memory_anchor=None, impulse_mode=None,
                 threads=None):
        """The operator Omega of the problem on a fixed mesh.

        Weight tables are shared through the quadrature cache, so applying
        the operator repeatedly only costs matrix-vector products.

        """
        opts = _resolve(problem, memory_anchor=memory_anchor,
                        impulse_mode=impulse_mode)
        self.problem = problem
        self.mesh = mesh
        self.memory_anchor = opts["memory_anchor"]
        self.impulse_mode = opts["impulse_mode"]
        if self.memory_anchor not in ("t", "s_i"):
            raise DomainError("memory anchor must be t or s_i, got %r"
                              % self.memory_anchor)
        if self.impulse_mode not in ("explicit", "implicit"):
            raise DomainError("impulse mode must be explicit or implicit, "
                              "got %r" % self.impulse_mode)
        self.rule = ProductRule(problem.psi, problem.alpha, mesh, threads)
        self.t = mesh.nodes
        self.gamma = problem.gamma
        self.boundaries = list(mesh.boundaries)
        self._slot = dict((b, k) for k, b in enumerate(self.boundaries))

    def grid(self, values, limits=None):
        return GridFunction(self.mesh, values, self.gamma, self.problem.psi,
                            weighted_head=True, limits=limits)

    def skeleton(self, x0=None):
        """Return Psi^gamma(t, 0) x0 on the head (weighted), 0 elsewhere."""
        x0 = self.problem.x0 if x0 is None else x0
        values = np.zeros(len(self.mesh))
        head = self.mesh.head
        values[list(head.nodes)] = x0 / float(_gamma(self.gamma))
        return self.grid(values, np.zeros(len(self.boundaries)))

    def _integrand(self, values, limits):
        # Expression values at the nodes, in the grid's head representation.
        return GridFunction.from_raw(self.mesh, values, self.gamma,
                                     self.problem.psi, weighted_head=True,
                                     limits=limits)

    def _at_boundaries(self, expr, x, w=0.0):
        # Right limits of an expression from the right limits of x.
        if not self.boundaries:
            return None
        tb = self.t[self.boundaries]
        values = evaluate(expr, t=tb, x=x, w=w, psi=self.problem.psi)
        return np.asarray(values, dtype=float) * np.ones(len(tb))

    def parts(self, x):
        """Return raw x, the inner memory w, and the integrands f and ell."""
        p = self.problem
        raw = x.raw()
        xb = x.right_limits()
        K = self._integrand(evaluate(p.K, t=self.t, x=raw, psi=p.psi),
                            self._at_boundaries(p.K, xb))
        w = self.rule.integrate_all(K, 0)
        f = self._integrand(evaluate(p.f, t=self.t, x=raw, w=w, psi=p.psi),
                            self._at_boundaries(p.f, xb,
                                                w[self.boundaries]))
        ell = self._integrand(evaluate(p.ell, t=self.t, x=raw, psi=p.psi),
                              self._at_boundaries(p.ell, xb))
        return raw, w, f, ell

    def __call__(self, x, x0=None, impulse_mode=None):
        """Return Omega x as a GridFunction in weighted-head form.

        The right limits at the interval boundaries come out alongside the
        node values. x0 overrides the problem's initial datum, impulse_mode
        the operator's.

        """
        if x.mesh != self.mesh:
            raise MeshMismatchError("iterate lives on another mesh")
        p = self.problem
        x0 = p.x0 if x0 is None else x0
        mode = impulse_mode or self.impulse_mode
        raw, w, f, ell = self.parts(x)
        xb = x.right_limits()
        out = np.zeros(len(self.mesh))
        limits = np.zeros(len(self.boundaries))
        If0 = self.rule.integrate_all(f, 0)
        M = None
        for iv in self.mesh.intervals:
            nodes = np.array(list(iv.nodes))
            if iv.kind == HEAD:
                weights = np.ones(len(nodes))
                if self.gamma < 1.0:
                    u = p.psi(self.t[nodes]) - p.psi(0.0)
                    weights = np.power(u, 1.0 - self.gamma)
                out[nodes] = x0 / float(_gamma(self.gamma)) + \
                    weights * If0[nodes]
                continue
            j = iv.start
            k = self._slot[j]
            g = p.g[iv.index - 1]
            if iv.kind == IMPULSE:
                if M is None:
                    M = self.rule.integrate_all(ell, 0)
                if mode == "implicit":
                    out[nodes] = [
                        impulse_pointwise_solve(p, iv.index, self.t[n], M[n],
                                                start=raw[n])
                        for n in nodes]
                    limits[k] = impulse_pointwise_solve(
                        p, iv.index, self.t[j], M[j], start=xb[k])
                else:
                    out[nodes] = evaluate(g, t=self.t[nodes], x=raw[nodes],
                                          w=M[nodes], psi=p.psi)
                    limits[k] = evaluate(g, t=self.t[j], x=xb[k], w=M[j],
                                         psi=p.psi)
            else:
                s = iv.left
                Mss = self.rule.memory_at(ell, s, s)
                if self.memory_anchor == "t":
                    Ms = self.rule.memory_all(ell, s)[nodes]
                else:
                    Ms = Mss
                # x(s_i) of the current iterate, or of Omega x when the
                # impulse is resolved implicitly on (t_i, s_i].
                xs = raw[j]
                if mode == "implicit" and self.mesh.tags[j] == (IMPULSE,
                                                                iv.index):
                    xs = out[j]
                jump = evaluate(g, t=s, x=xs, w=Ms, psi=p.psi)
                Ifs = self.rule.integrate_all(f, j)
                out[nodes] = jump + Ifs[nodes]
                limits[k] = evaluate(g, t=s, x=xs, w=Mss, psi=p.psi)
        return self.grid(out, limits)


def omega_apply(problem, x, memory_anchor=None, impulse_mode=None):
    """Return Omega x evaluated at every node of x's mesh."""
    return MildOperator(problem, x.mesh, memory_anchor, impulse_mode)(x)


def skeleton(problem, mesh):
    return MildOperator(problem, mesh).skeleton()


#--- PICARD ITERATION ---------------------------------------------------------

@dataclass
class SolveResult(object):
    """Outcome of a Picard solve; diff_history[k] = d(x_{k+1}, x_k)."""
    y0: GridFunction
    iterations: int
    diff_history: list = field(default_factory=list)
    converged: bool = False
    tol: float = None

    @property
    def mesh(self):
        return self.y0.mesh

    @property
    def final_diff(self):
        return self.diff_history[-1] if self.diff_history else float("nan")

    def ratios(self):
        """Return successive difference ratios d_{k+1} / d_k."""
        d = self.diff_history
        return [d[k + 1] / d[k] if d[k] > 0 else 0.0
                for k in range(len(d) - 1)]


def picard_solve(problem, tol=None, max_iter=None, initial=None, mesh=None,
                 n_per_interval=None, grading=None, memory_anchor=None,
                 impulse_mode=None):
    """Iterate x_{n+1} = Omega x_n until the weighted sup distance < tol.

    The default start is the skeleton. Non-convergence after max_iter steps
    is reported through SolveResult.converged, not raised.

    """
    opts = _resolve(problem, tol=tol, max_iter=max_iter)
    tol, max_iter = opts["tol"], int(opts["max_iter"])
    if not tol > 0:
        raise DomainError("tolerance must be positive, got %r" % tol)
    if max_iter < 1:
        raise DomainError("need max_iter >= 1, got %r" % max_iter)
    if mesh is None:
        mesh = initial.mesh if initial is not None else \
            problem.mesh(n_per_interval, grading)
    omega = MildOperator(problem, mesh, memory_anchor, impulse_mode)
    x = omega.skeleton() if initial is None else initial
    history = []
    converged = False
    for k in range(1, max_iter + 1):
        y = omega(x)
        d = weighted_sup_distance(y, x)
        history.append(d)
        log.debug("picard %i: distance %.3e", k, d)
        x = y
        if d < tol:
            converged = True
            break
    if converged:
        log.info("converged in %i iterations (distance %.3e)", k, d)
    else:
        log.warning("no convergence after %i iterations (distance %.3e)",
                    max_iter, history[-1])
    return SolveResult(x, k, history, converged, tol)


def perturb(y, phi, delta, epsilon, psi=None):
    """Return y + epsilon * (phi(t) + delta), added to the raw values.

    On the head the perturbation is added in weighted form; at t = 0 it
    vanishes when the head is singular. The right limits move with it.

    """
    bump = np.asarray(evaluate(phi, t=y.mesh.nodes, psi=psi), dtype=float) \
        * np.ones(len(y.mesh)) + delta
    limits = y.right_limits() + epsilon * bump[list(y.mesh.boundaries)]
    return y.copy(y.values + epsilon * bump * y.weights(), limits)
