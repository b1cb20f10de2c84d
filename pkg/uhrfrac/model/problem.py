# -*- coding: utf-8 -*-
"""Problem model, hypothesis data and configuration files.

A problem file is INI text with the sections [order], [psi], [partition],
[functions], [hypotheses] and an optional [solver]; see README.txt for the
keys. Expression values may be quoted.

"""

import configparser
import dataclasses
import logging
import os
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .expr import evaluate, parse, to_source, variables
from ..calculus.psi import FractionalOrder, PsiFunction
from ..calculus.quadrature import build_mesh, check_partition
from ..errors import ConfigError, DomainError, ParseError, UnknownScenarioError

__all__ = (
    'SCENARIOS',
    'HypothesisData',
    'ImpulsiveProblem',
    'builtin_scenario',
    'dump_problem',
    'list_scenarios',
    'load_problem',
    'load_problem_file',
    'scenario_path'
)

log = logging.getLogger(__name__)

SCENARIO_DIR = os.path.join(os.path.dirname(__file__), "scenarios")
SCENARIOS = ("example-rl", "example-integer")

# Keys of the optional [solver] section and their types.
SOLVER_KEYS = {
    "n_per_interval": int,
    "grading": float,
    "tol": float,
    "max_iter": int,
    "memory_anchor": str,
    "impulse_mode": str,
}

ANCHORS = ("t", "s_i")
IMPULSE_MODES = ("explicit", "implicit")

# Sample count of the phi-nondecreasing check.
PHI_SAMPLES = 200

# Arguments of f, g_i and of K, ell.
VARIABLES_FG = ("t", "x", "w")
VARIABLES_KL = ("t", "x")


# =============================================================================

#--- PROBLEM ------------------------------------------------------------------

def _check_variables(expression, allowed, key):
    extra = variables(expression) - frozenset(allowed)
    if extra:
        raise ConfigError("uses %s, only %s allowed" % (
            ", ".join(sorted(extra)), ", ".join(allowed)), key=key)


@dataclass(frozen=True)
class ImpulsiveProblem(object):
    """A scalar non-instantaneous impulsive psi-Hilfer problem on [0, T].

    x0 is the weighted initial datum I^{1-gamma,psi} x(0+). f and g take
    (t, x, w), K and ell take (t, x); g holds one expression per impulse.

    """
    order: FractionalOrder
    psi: PsiFunction
    T: float
    partition: tuple
    f: object
    K: object
    ell: object
    g: tuple = ()
    x0: float = 0.0
    name: str = field(default=None, compare=False)
    description: str = field(default="", compare=False)
    options: tuple = field(default=(), compare=False)

    def __post_init__(self):
        object.__setattr__(self, "T", float(self.T))
        object.__setattr__(self, "x0", float(self.x0))
        object.__setattr__(self, "partition",
                           check_partition(self.partition, self.T))
        object.__setattr__(self, "g", tuple(self.g))
        if len(self.g) != len(self.partition):
            raise ConfigError("%i impulse functions for %i impulses" % (
                len(self.g), len(self.partition)), key="functions")
        self.psi._check(self.T)
        _check_variables(self.f, VARIABLES_FG, "functions.f")
        _check_variables(self.K, VARIABLES_KL, "functions.K")
        _check_variables(self.ell, VARIABLES_KL, "functions.ell")
        for i, g in enumerate(self.g, 1):
            _check_variables(g, VARIABLES_FG, "functions.g%i" % i)
        opts = dict(self.options)
        if opts.get("memory_anchor", "t") not in ANCHORS:
            raise ConfigError("must be one of %s" % ", ".join(ANCHORS),
                              key="solver.memory_anchor")
        if opts.get("impulse_mode", "explicit") not in IMPULSE_MODES:
            raise ConfigError("must be one of %s" % ", ".join(IMPULSE_MODES),
                              key="solver.impulse_mode")

    @property
    def m(self):
        return len(self.partition)

    @property
    def alpha(self):
        return self.order.alpha

    @property
    def gamma(self):
        return self.order.gamma

    def option(self, name, default=None):
        return dict(self.options).get(name, default)

    def with_x0(self, x0):
        """Return a copy of the problem with another initial datum."""
        return dataclasses.replace(self, x0=float(x0))

    def mesh(self, n_per_interval=None, grading=None):
        if n_per_interval is None:
            n_per_interval = self.option("n_per_interval")
        if grading is None:
            grading = self.option("grading")
        return build_mesh(self.partition, self.T, n_per_interval, grading)

    def __repr__(self):
        return "ImpulsiveProblem(%s, %r, psi=%s, T=%r, m=%i, x0=%r)" % (
            self.name or "unnamed", self.order, self.psi.describe(), self.T,
            self.m, self.x0)


#--- HYPOTHESES ---------------------------------------------------------------

@dataclass(frozen=True)
class HypothesisData(object):
    """Lipschitz data and the weight phi of the stability analysis.

    All constants are strictly positive except delta >= 0. The reference
    values are numbers published alongside a scenario; they are reported,
    never used.

    """
    L_f: float
    L_g: tuple
    K_bar: float
    L_ell: float
    C_phi: float
    phi: object
    delta: float = 0.0
    reference_phi: float = None
    reference_envelope: float = None
    reference_label: str = "reference"

    def __post_init__(self):
        object.__setattr__(self, "L_g", tuple(float(v) for v in self.L_g))
        for key in ("L_f", "K_bar", "L_ell", "C_phi"):
            value = float(getattr(self, key))
            if not value > 0:
                raise ConfigError("must be positive, got %r" % value,
                                  key="hypotheses." + key)
            object.__setattr__(self, key, value)
        if any(not v > 0 for v in self.L_g):
            raise ConfigError("must be positive", key="hypotheses.L_g")
        if not float(self.delta) >= 0:
            raise ConfigError("must be >= 0", key="hypotheses.delta")
        object.__setattr__(self, "delta", float(self.delta))
        _check_variables(self.phi, ("t",), "hypotheses.phi")

    def phi_values(self, t, psi=None):
        return evaluate(self.phi, t=t, psi=psi)

    def check_phi(self, T, psi=None):
        """Raise ConfigError unless phi is nondecreasing on [0, T]."""
        grid = np.linspace(0.0, T, PHI_SAMPLES)
        values = np.asarray(self.phi_values(grid, psi)) * np.ones(len(grid))
        steps = np.diff(values)
        tol = 1e-12 * np.maximum(1.0, np.abs(values[1:]))
        if np.any(steps < -tol):
            j = int(np.argmax(steps < -tol))
            raise ConfigError("phi decreases near t = %r" % grid[j + 1],
                              key="hypotheses.phi")


# =============================================================================

#--- CONFIG INGESTION ---------------------------------------------------------

REQUIRED = (
    "order.alpha",
    "order.beta",
    "psi.kind",
    "partition.T",
    "functions.f",
    "functions.K",
    "functions.ell",
    "hypotheses.L_f",
    "hypotheses.K_bar",
    "hypotheses.L_ell",
    "hypotheses.C_phi",
    "hypotheses.phi",
    "hypotheses.delta",
)


def _unquote(text):
    text = text.strip()
    if len(text) >= 2 and text[0] == text[-1] and text[0] in "\"'":
        return text[1:-1].strip()
    return text


def _number(text, key):
    text = _unquote(text)
    try:
        return float(text)
    except ValueError:
        pass
    try:
        return float(Fraction(text.replace(" ", "")))
    except (ValueError, ZeroDivisionError):
        raise ConfigError("not a number: %r" % text, key=key)


def _expression(text, key):
    try:
        return parse(_unquote(text))
    except ParseError as e:
        err = ConfigError(str(e), key=key)
        err.position = e.position
        raise err from e


def _impulses(text):
    text = _unquote(text)
    pairs = []
    for item in text.split(","):
        item = item.strip()
        if not item:
            continue
        if ":" not in item:
            raise ConfigError("impulse %r is not t_i:s_i" % item,
                              key="partition.impulses")
        t, s = item.split(":", 1)
        pairs.append((_number(t, "partition.impulses"),
                      _number(s, "partition.impulses")))
    return tuple(pairs)


def _parser(config_text):
    cp = configparser.ConfigParser(interpolation=None,
                                   inline_comment_prefixes=("#", ";"))
    # Keys are case sensitive (K versus k).
    cp.optionxform = str
    try:
        cp.read_string(config_text)
    except configparser.Error as e:
        raise ConfigError("malformed config: %s" % e.message)
    return cp


def load_problem(config_text, name=None):
    """Return a validated (ImpulsiveProblem, HypothesisData) pair.

    Raises ConfigError listing every missing required key (in the order of
    REQUIRED), ConfigError with the key for malformed values, and
    OrderingError for a partition out of order.

    """
    cp = _parser(config_text)

    def get(key, default=None):
        section, option = key.split(".", 1)
        if cp.has_option(section, option):
            return cp.get(section, option)
        return default

    impulses = ()
    if get("partition.impulses") is not None:
        impulses = _impulses(get("partition.impulses"))
    required = list(REQUIRED)
    required.extend("functions.g%i" % i for i in range(1, len(impulses) + 1))
    if impulses:
        required.append("hypotheses.L_g")
    missing = [key for key in required if get(key) is None]
    if missing:
        raise ConfigError("missing required keys: %s" % ", ".join(missing),
                          missing=missing)

    try:
        order = FractionalOrder(_number(get("order.alpha"), "order.alpha"),
                                _number(get("order.beta"), "order.beta"))
    except DomainError as e:
        raise ConfigError(str(e), key="order") from e
    parameter = get("psi.parameter")
    try:
        psi = PsiFunction.from_spec(
            _unquote(get("psi.kind")),
            None if parameter is None else _number(parameter, "psi.parameter"))
    except DomainError as e:
        raise ConfigError(str(e), key="psi") from e

    options = []
    if cp.has_section("solver"):
        for key, value in cp.items("solver"):
            if key not in SOLVER_KEYS:
                raise ConfigError("unknown solver option", key="solver." + key)
            kind = SOLVER_KEYS[key]
            if kind is str:
                options.append((key, _unquote(value)))
            else:
                options.append((key, kind(_number(value, "solver." + key))))

    problem = ImpulsiveProblem(
        order=order,
        psi=psi,
        T=_number(get("partition.T"), "partition.T"),
        partition=impulses,
        f=_expression(get("functions.f"), "functions.f"),
        K=_expression(get("functions.K"), "functions.K"),
        ell=_expression(get("functions.ell"), "functions.ell"),
        g=[_expression(get("functions.g%i" % i), "functions.g%i" % i)
           for i in range(1, len(impulses) + 1)],
        x0=_number(get("functions.x0", "0"), "functions.x0"),
        name=name or _unquote(get("scenario.name", "")) or None,
        description=_unquote(get("scenario.description", "")),
        options=tuple(sorted(options)))

    L_g = ()
    if impulses:
        L_g = [_number(v, "hypotheses.L_g")
               for v in _unquote(get("hypotheses.L_g")).split(",")
               if v.strip()]
        if len(L_g) == 1:
            L_g = L_g * len(impulses)
        if len(L_g) != len(impulses):
            raise ConfigError("%i constants for %i impulses" % (
                len(L_g), len(impulses)), key="hypotheses.L_g")

    def optional(key):
        value = get(key)
        return None if value is None else _number(value, key)

    hypotheses = HypothesisData(
        L_f=_number(get("hypotheses.L_f"), "hypotheses.L_f"),
        L_g=L_g,
        K_bar=_number(get("hypotheses.K_bar"), "hypotheses.K_bar"),
        L_ell=_number(get("hypotheses.L_ell"), "hypotheses.L_ell"),
        C_phi=_number(get("hypotheses.C_phi"), "hypotheses.C_phi"),
        phi=_expression(get("hypotheses.phi"), "hypotheses.phi"),
        delta=_number(get("hypotheses.delta"), "hypotheses.delta"),
        reference_phi=optional("hypotheses.reference_phi"),
        reference_envelope=optional("hypotheses.reference_envelope"),
        reference_label=_unquote(get("hypotheses.reference_label",
                                     "reference")))
    hypotheses.check_phi(problem.T, problem.psi)
    log.debug("loaded %r", problem)
    return problem, hypotheses


def load_problem_file(path):
    with open(path, encoding="utf-8") as f:
        text = f.read()
    name = os.path.splitext(os.path.basename(path))[0]
    return load_problem(text, name=name)


def dump_problem(problem, hypotheses):
    """Return config text that load_problem() reads back to an equal pair."""
    q = lambda node: '"%s"' % to_source(node)
    lines = []
    if problem.name or problem.description:
        lines += ["[scenario]"]
        if problem.name:
            lines += ["name = %s" % problem.name]
        if problem.description:
            lines += ['description = "%s"' % problem.description]
        lines += [""]
    lines += [
        "[order]",
        "alpha = %r" % problem.order.alpha,
        "beta = %r" % problem.order.beta,
        "",
        "[psi]",
        "kind = %s" % problem.psi.kind,
        "parameter = %r" % problem.psi.parameter,
        "",
        "[partition]",
        "T = %r" % problem.T,
        'impulses = "%s"' % ", ".join(
            "%r:%r" % pair for pair in problem.partition),
        "",
        "[functions]",
        "x0 = %r" % problem.x0,
        "f = %s" % q(problem.f),
        "K = %s" % q(problem.K),
        "ell = %s" % q(problem.ell),
    ]
    lines += ["g%i = %s" % (i, q(g)) for i, g in enumerate(problem.g, 1)]
    lines += [
        "",
        "[hypotheses]",
        "L_f = %r" % hypotheses.L_f,
    ]
    if hypotheses.L_g:
        lines += ['L_g = "%s"' % ", ".join(repr(v) for v in hypotheses.L_g)]
    lines += [
        "K_bar = %r" % hypotheses.K_bar,
        "L_ell = %r" % hypotheses.L_ell,
        "C_phi = %r" % hypotheses.C_phi,
        "phi = %s" % q(hypotheses.phi),
        "delta = %r" % hypotheses.delta,
    ]
    if hypotheses.reference_phi is not None:
        lines += ["reference_phi = %r" % hypotheses.reference_phi]
    if hypotheses.reference_envelope is not None:
        lines += ["reference_envelope = %r" % hypotheses.reference_envelope]
    if hypotheses.reference_label != "reference":
        lines += ['reference_label = "%s"' % hypotheses.reference_label]
    if problem.options:
        lines += ["", "[solver]"]
        lines += ["%s = %s" % kv for kv in problem.options]
    return "\n".join(lines) + "\n"


#--- SCENARIOS ----------------------------------------------------------------

def scenario_path(name):
    if name not in SCENARIOS:
        raise UnknownScenarioError("unknown scenario %r (expected one of %s)"
                                   % (name, ", ".join(SCENARIOS)))
    return os.path.join(SCENARIO_DIR, name + ".cfg")


def builtin_scenario(name):
    """Return the (ImpulsiveProblem, HypothesisData) of a built-in scenario."""
    problem, hypotheses = load_problem_file(scenario_path(name))
    return dataclasses.replace(problem, name=name), hypotheses


def list_scenarios():
    """Return (name, description) of the built-in scenarios."""
    return [(name, builtin_scenario(name)[0].description)
            for name in SCENARIOS]
