# == QUADRATURE ===============================================================
# Product integration of the psi-fractional Riemann-Liouville integral
#
#   I^{alpha,psi}_{lower+} F(t) = 1/Gamma(alpha) int_lower^t
#                                 psi'(s) (psi(t) - psi(s))**(alpha-1) F(s) ds
#
# on graded meshes that never straddle an impulse boundary.
# License: BSD (see LICENSE.txt for details).

# After the substitution u = psi(s) the kernel is the pure power
# (U - u)**(alpha - 1) with U = psi(t). F is interpolated piecewise-linearly
# in u and every panel is integrated exactly against the power, so all
# weights are closed-form and nonnegative.

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy.special import beta as _beta, betainc, gamma as _gamma

from . import caching
from .grading import graded, tween
from .psi import clamp
from ..errors import (DomainError, MeshMismatchError, NodeAlignmentError,
                      OrderingError)
from ..state import settings_mixin

__all__ = (
    'HEAD',
    'IMPULSE',
    'FREE',
    'GridFunction',
    'Interval',
    'Mesh',
    'ProductRule',
    'build_mesh',
    'check_partition',
    'frac_integral_at',
    'precompute_weights'
)

log = logging.getLogger(__name__)

# Interval kinds: [0, t1], (t_i, s_i] and (s_i, t_{i+1}].
HEAD = "head"
IMPULSE = "impulse"
FREE = "free"


# =============================================================================

#--- PARTITION ----------------------------------------------------------------

def check_partition(partition, T):
    """Validate 0 < t1 <= s1 <= t2 ... <= sm <= T with t_i < t_{i+1}.

    Returns the partition as a tuple of float pairs. s_m = T is accepted: it
    leaves the trailing free interval empty.

    """
    pairs = tuple((float(t), float(s)) for t, s in partition)
    if not T > 0:
        raise OrderingError("T must be positive, got %r" % T)
    previous_t, previous_s = 0.0, 0.0
    for i, (t, s) in enumerate(pairs, 1):
        if not t > previous_t:
            raise OrderingError("t%i = %r must exceed t%i = %r" % (
                i, t, i - 1, previous_t))
        if not previous_s <= t:
            raise OrderingError("t%i = %r precedes s%i = %r" % (
                i, t, i - 1, previous_s))
        if not t <= s:
            raise OrderingError("s%i = %r precedes t%i = %r" % (i, s, i, t))
        if not s <= T:
            raise OrderingError("s%i = %r exceeds T = %r" % (i, s, T))
        if t == T:
            raise OrderingError("t%i = %r leaves no room before T" % (i, t))
        previous_t, previous_s = t, s
    return pairs


#--- MESH ---------------------------------------------------------------------

@dataclass(frozen=True)
class Interval(object):
    """A partition interval and the node indices of its endpoints.

    Node ``start`` is the left endpoint (it belongs to the previous interval,
    except for node 0 of the head), node ``stop`` the right endpoint.

    """
    kind: str
    index: int
    left: float
    right: float
    start: int
    stop: int

    @property
    def nodes(self):
        """Indices of the nodes that belong to this interval."""
        first = self.start if self.start == 0 else self.start + 1
        return range(first, self.stop + 1)


class Mesh(object):

    def __init__(self, nodes, intervals, grading=1.0, partition=(), T=None):
        """A strictly increasing set of nodes on [0, T].

        Every partition point t_i and s_i is a node, and every node carries
        the (kind, index) tag of the interval it belongs to.

        """
        nodes = np.array(nodes, dtype=float)
        nodes.setflags(write=False)
        if nodes[0] != 0.0 or np.any(np.diff(nodes) <= 0):
            raise OrderingError("mesh nodes must start at 0 and increase")
        self.nodes = nodes
        self.intervals = tuple(intervals)
        self.grading = float(grading)
        self.partition = tuple(partition)
        self.T = float(nodes[-1] if T is None else T)
        tags = [None] * len(nodes)
        for iv in self.intervals:
            for j in iv.nodes:
                tags[j] = (iv.kind, iv.index)
        self.tags = tuple(tags)
        # Nodes where an impulse or free interval opens; the trajectory may
        # jump there, the node itself holds the left limit.
        self.boundaries = tuple(iv.start for iv in self.intervals
                                if iv.kind != HEAD)
        self.key = (tuple(nodes.tolist()), self.partition)

    def __len__(self):
        return len(self.nodes)

    def __eq__(self, mesh):
        if not isinstance(mesh, Mesh):
            return False
        return self.key == mesh.key

    def __ne__(self, mesh):
        return not self.__eq__(mesh)

    def __hash__(self):
        return hash(self.key)

    @property
    def head(self):
        return self.intervals[0]

    def interval(self, kind, index):
        for iv in self.intervals:
            if iv.kind == kind and iv.index == index:
                return iv
        return None

    def index_of(self, t):
        """Return the index of the node at t, or raise NodeAlignmentError."""
        j = int(np.searchsorted(self.nodes, t))
        for k in (j - 1, j):
            if 0 <= k < len(self.nodes) and \
               abs(self.nodes[k] - t) <= 1e-12 * max(1.0, self.T):
                return k
        raise NodeAlignmentError("t = %r is not a mesh node" % t)

    def head_mask(self):
        return np.array([tag[0] == HEAD for tag in self.tags])

    def __repr__(self):
        return "Mesh(nodes=%i, T=%r, intervals=%i, grading=%r)" % (
            len(self), self.T, len(self.intervals), self.grading)


def build_mesh(partition, T, n_per_interval=None, grading=None):
    """Return a graded Mesh covering [0, T].

    Each nonempty interval gets n_per_interval panels. The head [0, t1] and
    every free interval (s_i, t_{i+1}] are graded towards their left end with
    exponent ``grading``; impulse intervals (t_i, s_i] are uniform.

    """
    n, r = settings_mixin("n_per_interval", "grading",
                          n_per_interval=n_per_interval, grading=grading)
    n = int(n)
    if n < 2:
        raise DomainError("need at least 2 panels per interval, got %r" % n)
    if not r >= 1.0:
        raise DomainError("grading exponent must be >= 1, got %r" % r)
    pairs = check_partition(partition, T)
    T = float(T)

    pieces = []
    ends = [t for t, s in pairs] + [T]
    pieces.append((HEAD, 0, 0.0, ends[0]))
    for i, (t, s) in enumerate(pairs, 1):
        pieces.append((IMPULSE, i, t, s))
        pieces.append((FREE, i, s, ends[i]))

    nodes = [0.0]
    intervals = []
    for kind, index, left, right in pieces:
        if kind != HEAD and right <= left:
            continue
        start = len(nodes) - 1
        ease = graded(1.0 if kind == IMPULSE else r)
        nodes.extend(tween(ease, left, right, n))
        nodes[-1] = right
        intervals.append(
            Interval(kind, index, left, right, start, len(nodes) - 1))
    mesh = Mesh(nodes, intervals, r, pairs, T)
    log.debug("built %r", mesh)
    return mesh


# =============================================================================

#--- GRID FUNCTION ------------------------------------------------------------

class GridFunction(object):

    def __init__(self, mesh, values, gamma=1.0, psi=None, weighted_head=True,
                 limits=None):
        """Node values of a piecewise trajectory on a mesh.

        With weighted_head, the values on the head [0, t1] are stored as the
        weighted representative (psi(t) - psi(0))**(1 - gamma) * x(t), which
        stays finite where x behaves like (psi(t) - psi(0))**(gamma - 1).
        Values elsewhere are raw.

        A node at mesh.boundaries holds the left limit of the trajectory.
        limits holds the raw right limits at those nodes, in the same order;
        without it the trajectory is taken to be continuous there.

        """
        values = np.array(values, dtype=float)
        if values.shape != (len(mesh),):
            raise MeshMismatchError("%i values for %i mesh nodes" % (
                values.size, len(mesh)))
        if limits is not None:
            limits = np.array(limits, dtype=float)
            if limits.shape != (len(mesh.boundaries),):
                raise MeshMismatchError("%i right limits for %i boundaries" % (
                    limits.size, len(mesh.boundaries)))
        if weighted_head and gamma < 1.0 and psi is None:
            raise DomainError("a weighted head with gamma < 1 needs psi")
        self.mesh = mesh
        self.values = values
        self.limits = limits
        self.gamma = float(gamma)
        self.psi = psi
        self.weighted_head = bool(weighted_head)

    @property
    def singular_head(self):
        return self.weighted_head and self.gamma < 1.0

    def weights(self):
        """Return the factor (psi(t) - psi(0))**(1 - gamma) per node.

        It is 1 outside the head and everywhere when gamma = 1.

        """
        w = np.ones(len(self.mesh))
        if self.singular_head:
            mask = self.mesh.head_mask()
            u = self.psi(self.mesh.nodes[mask]) - self.psi(0.0)
            w[mask] = np.power(u, 1.0 - self.gamma)
        return w

    def raw(self):
        """Return raw values x(t); node 0 is nan when the head is singular."""
        w = self.weights()
        out = np.empty_like(self.values)
        ok = w > 0
        out[ok] = self.values[ok] / w[ok]
        out[~ok] = np.nan
        return out

    def right_limits(self):
        """Return the raw right limits x(b+) at the mesh boundaries."""
        if self.limits is not None:
            return self.limits.copy()
        return self.raw()[list(self.mesh.boundaries)]

    def jumps(self):
        """Return x(b+) - x(b) at the mesh boundaries, None if continuous."""
        if self.limits is None:
            return None
        return self.limits - self.raw()[list(self.mesh.boundaries)]

    @classmethod
    def from_raw(cls, mesh, raw, gamma=1.0, psi=None, weighted_head=True,
                 head0=None, limits=None):
        """Build a GridFunction from raw node values.

        For a singular head, the weighted value at t = 0 cannot come from a
        raw value: it is head0 when given, otherwise the weighted value at
        the first interior node.

        """
        f = cls(mesh, np.zeros(len(mesh)), gamma, psi, weighted_head, limits)
        raw = np.array(raw, dtype=float)
        w = f.weights()
        with np.errstate(invalid="ignore"):
            values = raw * w
        if f.singular_head:
            values[0] = values[1] if head0 is None else head0
        f.values = values
        return f

    def map(self, function):
        """Return function applied to the stored values and right limits."""
        limits = None if self.limits is None else function(self.limits)
        return self.copy(function(self.values), limits)

    def copy(self, values=None, limits=None):
        if limits is None:
            limits = self.limits
        return GridFunction(self.mesh,
                            self.values if values is None else values,
                            self.gamma, self.psi, self.weighted_head, limits)

    def __repr__(self):
        return "GridFunction(nodes=%i, gamma=%r, weighted_head=%r)" % (
            len(self.mesh), self.gamma, self.weighted_head)


# =============================================================================

#--- PRODUCT RULE -------------------------------------------------------------

def _one_minus_power(r, p):
    # 1 - (1 - r)**p for r in (0, 1] without cancellation.
    with np.errstate(divide="ignore"):
        return -np.expm1(p * np.log1p(-r))


def _panel_parts(a, h, alpha):
    """Return the (left, right) end weights of one panel of width h.

    The panel is integrated against (U - v)**(alpha-1) with F linear on it;
    a = U - v_left is the distance of its left end from the anchor U.

    """
    b = a - h
    r = np.minimum(h / a, 1.0)
    A = np.power(a, alpha + 1.0) * _one_minus_power(r, alpha + 1.0) \
        / (alpha + 1.0)
    B = np.power(a, alpha) * _one_minus_power(r, alpha) / alpha
    left = np.maximum((A - b * B) / h, 0.0)
    right = np.maximum((a * B - A) / h, 0.0)
    return left, right


def _panel_weights(u, alpha, U, lo, hi):
    """Weights of int_{u[lo]}^{u[hi]} (U - v)**(alpha-1) F(v) dv, F linear.

    Requires U >= u[hi]. Returns the vector of node weights (length of u),
    without the 1/Gamma(alpha) factor.

    """
    w = np.zeros(len(u))
    if hi <= lo:
        return w
    left, right = _panel_parts(U - u[lo:hi], u[lo + 1:hi + 1] - u[lo:hi],
                               alpha)
    w[lo:hi] += left
    w[lo + 1:hi + 1] += right
    return w


def _jump_table(u, alpha, boundaries, lo, hi=None):
    """Return the left-end weights of the panels that open an interval.

    Entry [n, k] is the weight of node b = boundaries[k] in the panel
    [u[b], u[b+1]] for the integral with kernel anchored at u[n]. Panels
    before lo are left out. With hi, only panels below node hi count and
    rows start at hi (memory integrals); otherwise row n covers b < n.

    """
    N = len(u)
    out = np.zeros((N, len(boundaries)))
    for k, b in enumerate(boundaries):
        if b < lo or (hi is not None and b >= hi):
            continue
        n = np.arange(b + 1 if hi is None else hi, N)
        out[n, k] = _panel_parts(u[n] - u[b], u[b + 1] - u[b], alpha)[0]
    out.setflags(write=False)
    return out


def _head_panel(u1, alpha, gamma, U):
    """Return int_0^{u1} (U - v)**(alpha-1) v**(gamma-1) dv for U >= u1."""
    x = clamp(u1 / U, 0.0, 1.0)
    return U ** (alpha + gamma - 1.0) * _beta(gamma, alpha) * \
        betainc(gamma, alpha, x)


def _table(u, alpha, lo, skip_first, threads):
    N = len(u)
    first = lo + 1 if skip_first else lo

    def row(n):
        return _panel_weights(u, alpha, u[n], first, n)

    rows = range(lo + 1, N)
    table = np.zeros((N, N))
    if threads > 1 and len(rows) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            for n, w in zip(rows, pool.map(row, rows)):
                table[n] = w
    else:
        for n in rows:
            table[n] = row(n)
    table.setflags(write=False)
    return table


class ProductRule(object):

    def __init__(self, psi, alpha, mesh, threads=None):
        """Product-integration rule for I^{alpha,psi} on a mesh.

        Weight tables are computed on first use and cached across rules with
        the same psi, alpha and mesh. The integrand is linear on every panel
        between its one-sided values, so a panel that opens an impulse or
        free interval starts from the right limit at the boundary node.

        """
        if not 0.0 < alpha <= 1.0:
            raise DomainError("alpha must lie in (0, 1], got %r" % alpha)
        (threads,) = settings_mixin("threads", threads=threads)
        self.psi = psi
        self.alpha = float(alpha)
        self.mesh = mesh
        self.threads = int(threads)
        # Shifted so that u[0] = 0 exactly.
        self.u = np.asarray(psi(mesh.nodes)) - psi(0.0)
        self.u[0] = 0.0
        self._scale = 1.0 / float(_gamma(self.alpha))

    def _key(self, *extra):
        return (self.psi, self.alpha) + extra + (self.mesh.key,)

    def table(self, lower_index=0, skip_first=False):
        """Return the matrix whose row n holds the weights for t = node n.

        Rows at or before lower_index are zero. With skip_first, the panel
        [node lower, node lower + 1] is left out (the head correction
        supplies it).

        """
        key = self._key("table", int(lower_index), bool(skip_first))
        caching.precompile(key, _table, self.u, self.alpha, int(lower_index),
                           bool(skip_first), self.threads)
        return caching.precompiled(key)

    def jump_table(self, lower_index=0, upper_index=None):
        """Return the boundary corrections matching table() or memory_all().

        Multiplied by GridFunction.jumps() it moves the left end of every
        interval-opening panel from the left to the right limit.

        """
        key = self._key("jumps", int(lower_index), upper_index)
        caching.precompile(key, _jump_table, self.u, self.alpha,
                           self.mesh.boundaries, int(lower_index),
                           upper_index)
        return caching.precompiled(key)

    def head_column(self, gamma):
        """Return per target node the exact first-panel integral of v**(gamma-1).

        Multiplied by the (constant) weighted value of the integrand on the
        first panel this replaces the linear first panel.

        """
        key = self._key("head", float(gamma))

        def column():
            c = np.zeros(len(self.u))
            for n in range(1, len(self.u)):
                c[n] = _head_panel(self.u[1], self.alpha, gamma, self.u[n])
            c.setflags(write=False)
            return c

        caching.precompile(key, column)
        return caching.precompiled(key)

    def weights(self, t, lower=0.0):
        """Return the node weights w with I F(t) = w . F for raw F."""
        lo = self.mesh.index_of(lower)
        n = self.mesh.index_of(t)
        if n <= lo:
            raise NodeAlignmentError("need lower < t, got %r >= %r" % (
                lower, t))
        return _panel_weights(self.u, self.alpha, self.u[n], lo, n) * \
            self._scale

    def _operands(self, F, lo):
        """Return (raw values, head coefficient or None, jumps or None)."""
        if isinstance(F, GridFunction):
            if F.mesh != self.mesh:
                raise MeshMismatchError("integrand lives on another mesh")
            raw = F.raw()
            jumps = F.jumps()
            if F.singular_head:
                raw[0] = 0.0
                if lo == 0:
                    return raw, F.values[1], jumps
            return raw, None, jumps
        raw = np.array(F, dtype=float)
        if raw.shape != (len(self.mesh),):
            raise MeshMismatchError("%i values for %i mesh nodes" % (
                raw.size, len(self.mesh)))
        return raw, None, None

    def integrate_all(self, F, lower_index=0):
        """Return I_{lower}^{alpha,psi} F at every node (0 up to lower)."""
        raw, c, jumps = self._operands(F, lower_index)
        out = self.table(lower_index, c is not None).dot(raw)
        if c is not None:
            out = out + c * self.head_column(F.gamma)
        if jumps is not None:
            out = out + self.jump_table(lower_index).dot(jumps)
        return out * self._scale

    def integrate(self, F, lower, t):
        lo = self.mesh.index_of(lower)
        n = self.mesh.index_of(t)
        if n <= lo:
            raise NodeAlignmentError("need lower < t, got %r >= %r" % (
                lower, t))
        return float(self.integrate_all(F, lo)[n])

    def memory_all(self, F, upper):
        """Return per node t >= upper the memory integral anchored at t.

        Entry n is 1/Gamma(alpha) int_0^upper N(t_n, s) F(s) ds; entries
        before upper are zero.

        """
        hi = self.mesh.index_of(upper)
        out = np.zeros(len(self.u))
        if hi == 0:
            return out
        raw, c, jumps = self._operands(F, 0)
        skip = c is not None
        key = self._key("memory", hi, skip)

        def table():
            m = np.zeros((len(self.u), len(self.u)))
            for n in range(hi, len(self.u)):
                m[n] = _panel_weights(self.u, self.alpha, self.u[n],
                                      1 if skip else 0, hi)
            m.setflags(write=False)
            return m

        caching.precompile(key, table)
        out = caching.precompiled(key).dot(raw)
        if skip:
            out = out + c * self.head_column(F.gamma)
            out[:hi] = 0.0
        if jumps is not None:
            out = out + self.jump_table(0, hi).dot(jumps)
        return out * self._scale

    def memory_at(self, F, upper, anchor):
        """Return 1/Gamma(alpha) int_0^upper N(anchor, s) F(s) ds.

        upper is a node and anchor >= upper; for anchor = upper this is the
        ordinary fractional integral at upper.

        """
        hi = self.mesh.index_of(upper)
        U = float(self.psi(anchor) - self.psi(0.0))
        if U < self.u[hi]:
            raise DomainError("kernel anchor %r precedes upper limit %r" % (
                anchor, upper))
        if hi == 0:
            return 0.0
        raw, c, jumps = self._operands(F, 0)
        U = max(U, self.u[hi])
        w = _panel_weights(self.u, self.alpha, U, 1 if c is not None else 0,
                           hi)
        total = w.dot(raw)
        if c is not None:
            total += c * _head_panel(self.u[1], self.alpha, F.gamma, U)
        if jumps is not None:
            for k, b in enumerate(self.mesh.boundaries):
                if b < hi:
                    left, _ = _panel_parts(U - self.u[b],
                                           self.u[b + 1] - self.u[b],
                                           self.alpha)
                    total += left * jumps[k]
        return float(total * self._scale)


# -- MODULE-LEVEL COMMANDS ----------------------------------------------------

def precompute_weights(psi, alpha, mesh, t, lower=0.0):
    """Return the convolution weights of I^{alpha,psi}_{lower+} at node t."""
    return ProductRule(psi, alpha, mesh).weights(t, lower)


def frac_integral_at(psi, alpha, F, lower, t):
    """Return I^{alpha,psi}_{lower+} F(t) by product integration.

    F is a GridFunction on the mesh; lower and t must be mesh nodes.

    """
    if not isinstance(F, GridFunction):
        raise DomainError("frac_integral_at needs a GridFunction integrand")
    return ProductRule(psi, alpha, F.mesh).integrate(F, lower, t)
