# == EXPRESSIONS ==============================================================
# Scalar expressions for f(t, x, w), g_i(t, x, w), K(t, x), ell(t, x) and
# phi(t) in problem configuration files.
# License: BSD (see LICENSE.txt for details).

# Grammar (whitespace is insignificant):
#
#   expr    = term { ("+" | "-") term } ;
#   term    = unary { ("*" | "/") unary } ;
#   unary   = "-" unary | primary ;
#   primary = number | "t" | "x" | "w"
#           | "abs" "(" expr ")" | "psi" "(" expr ")"
#           | "mitlef" "(" literal "," expr ")"
#           | "pow" "(" expr "," literal ")"
#           | "(" expr ")" ;
#   literal = [ "-" ] number ;
#   number  = digits [ "." digits ] [ ("e" | "E") [ "+" | "-" ] digits ]
#           | "." digits [ exponent ] ;

import re
from dataclasses import dataclass, field

import numpy as np

from ..calculus.mittagleffler import mittag_leffler
from ..errors import DivideByZeroError, EvaluationError, ParseError

__all__ = (
    'VARIABLES',
    'FUNCTIONS',
    'Node',
    'Number',
    'Variable',
    'Negate',
    'BinaryOp',
    'Call',
    'evaluate',
    'parse',
    'to_source',
    'tokenize',
    'variables'
)

VARIABLES = ("t", "x", "w")

# name => (takes a literal argument, literal comes first)
FUNCTIONS = {
    "abs": (False, False),
    "psi": (False, False),
    "mitlef": (True, True),
    "pow": (True, False),
}


# =============================================================================

#--- TREE ---------------------------------------------------------------------

class Node(object):
    """Base class of expression tree nodes; str() prints source text."""

    def __str__(self):
        return to_source(self)


@dataclass(frozen=True)
class Number(Node):
    value: float


@dataclass(frozen=True)
class Variable(Node):
    name: str


@dataclass(frozen=True)
class Negate(Node):
    operand: Node


@dataclass(frozen=True)
class BinaryOp(Node):
    op: str
    left: Node
    right: Node
    # Source offset of the operator, reported on division by zero.
    position: int = field(default=-1, compare=False)


@dataclass(frozen=True)
class Call(Node):
    name: str
    argument: Node
    literal: float = None

    def __post_init__(self):
        if self.name not in FUNCTIONS:
            raise ValueError("unknown function %r" % self.name)


#--- TOKENIZER ----------------------------------------------------------------

NUMBER = "number"
NAME = "name"
OP = "op"
END = "end"

_token = re.compile(r"""
    \s*(?:
      (?P<number>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)
    | (?P<name>[A-Za-z_][A-Za-z_0-9]*)
    | (?P<op>[-+*/(),])
    | (?P<bad>\S)
    )""", re.VERBOSE)


def tokenize(source):
    """Yield (kind, text, offset) tokens, ending with an END token."""
    i = 0
    n = len(source)
    while i < n:
        m = _token.match(source, i)
        if m is None:
            # Only trailing whitespace is left.
            break
        kind = m.lastgroup
        if kind == "bad":
            raise ParseError(m.start(kind),
                             "unexpected character %r" % m.group(kind))
        yield kind, m.group(kind), m.start(kind)
        i = m.end()
    yield END, "", n


#--- PARSER -------------------------------------------------------------------

class _Parser(object):

    def __init__(self, source):
        self.source = source
        self.tokens = list(tokenize(source))
        self.i = 0

    @property
    def token(self):
        return self.tokens[self.i]

    def advance(self):
        token = self.tokens[self.i]
        if token[0] != END:
            self.i += 1
        return token

    def expect(self, text):
        kind, value, pos = self.token
        if kind != OP or value != text:
            found = "end of input" if kind == END else repr(value)
            raise ParseError(pos, "expected %r, found %s" % (text, found))
        return self.advance()

    def parse(self):
        tree = self.expr()
        kind, value, pos = self.token
        if kind != END:
            raise ParseError(pos, "unexpected trailing %r" % value)
        return tree

    def expr(self):
        left = self.term()
        while self.token[0] == OP and self.token[1] in "+-":
            _, op, pos = self.advance()
            left = BinaryOp(op, left, self.term(), pos)
        return left

    def term(self):
        left = self.unary()
        while self.token[0] == OP and self.token[1] in "*/":
            _, op, pos = self.advance()
            left = BinaryOp(op, left, self.unary(), pos)
        return left

    def unary(self):
        if self.token[0] == OP and self.token[1] == "-":
            self.advance()
            return Negate(self.unary())
        return self.primary()

    def literal(self):
        sign = 1.0
        if self.token[0] == OP and self.token[1] == "-":
            self.advance()
            sign = -1.0
        kind, value, pos = self.token
        if kind != NUMBER:
            raise ParseError(pos, "expected a numeric literal")
        self.advance()
        return sign * float(value)

    def primary(self):
        kind, value, pos = self.token
        if kind == NUMBER:
            self.advance()
            return Number(float(value))
        if kind == NAME:
            self.advance()
            if value in VARIABLES:
                return Variable(value)
            if value not in FUNCTIONS:
                raise ParseError(pos, "unknown identifier %r" % value)
            takes_literal, literal_first = FUNCTIONS[value]
            self.expect("(")
            literal = None
            if takes_literal and literal_first:
                literal = self.literal()
                self.expect(",")
            argument = self.expr()
            if takes_literal and not literal_first:
                self.expect(",")
                literal = self.literal()
            self.expect(")")
            return Call(value, argument, literal)
        if kind == OP and value == "(":
            self.advance()
            tree = self.expr()
            self.expect(")")
            return tree
        if kind == END:
            raise ParseError(pos, "unexpected end of input")
        raise ParseError(pos, "unexpected %r" % value)


def parse(source):
    """Return the expression tree for the given source text.

    Raises ParseError with the character offset of the offending token.

    """
    return _Parser(source).parse()


#--- PRINTER ------------------------------------------------------------------

def to_source(node):
    """Return fully parenthesized source text that parses back to node."""
    if isinstance(node, Number):
        return repr(float(node.value))
    if isinstance(node, Variable):
        return node.name
    if isinstance(node, Negate):
        return "(-%s)" % to_source(node.operand)
    if isinstance(node, BinaryOp):
        return "(%s %s %s)" % (
            to_source(node.left), node.op, to_source(node.right))
    if isinstance(node, Call):
        if node.literal is None:
            return "%s(%s)" % (node.name, to_source(node.argument))
        if FUNCTIONS[node.name][1]:
            return "%s(%r, %s)" % (
                node.name, float(node.literal), to_source(node.argument))
        return "%s(%s, %r)" % (
            node.name, to_source(node.argument), float(node.literal))
    raise TypeError("not an expression node: %r" % (node,))


def variables(node):
    """Return the set of variable names the expression references."""
    if isinstance(node, Variable):
        return frozenset((node.name,))
    if isinstance(node, Negate):
        return variables(node.operand)
    if isinstance(node, BinaryOp):
        return variables(node.left) | variables(node.right)
    if isinstance(node, Call):
        return variables(node.argument)
    return frozenset()


#--- EVALUATION ---------------------------------------------------------------

def _eval(node, env, psi):
    if isinstance(node, Number):
        return node.value
    if isinstance(node, Variable):
        return env[node.name]
    if isinstance(node, Negate):
        return -_eval(node.operand, env, psi)
    if isinstance(node, BinaryOp):
        a = _eval(node.left, env, psi)
        b = _eval(node.right, env, psi)
        if node.op == "+":
            return a + b
        if node.op == "-":
            return a - b
        if node.op == "*":
            return a * b
        if np.any(np.asarray(b) == 0):
            raise DivideByZeroError(node.position, "division by zero")
        return a / b
    name, arg = node.name, _eval(node.argument, env, psi)
    if name == "abs":
        return np.abs(arg)
    if name == "psi":
        if psi is None:
            raise EvaluationError(-1, "psi() used without a psi function")
        return psi(arg)
    if name == "mitlef":
        return mittag_leffler(node.literal, arg)
    with np.errstate(invalid="ignore", divide="ignore"):
        v = np.power(np.asarray(arg, dtype=float), node.literal)
    if not np.all(np.isfinite(v)) and np.all(np.isfinite(arg)):
        raise EvaluationError(-1, "pow(., %r) undefined for argument %r" % (
            node.literal, float(np.min(arg))))
    return v


def evaluate(node, t=0.0, x=0.0, w=0.0, psi=None):
    """Evaluate the expression at t, x, w (scalars or broadcastable arrays).

    psi resolves psi(.) calls. Returns a float when all inputs are scalars.

    """
    env = {"t": np.asarray(t, dtype=float),
           "x": np.asarray(x, dtype=float),
           "w": np.asarray(w, dtype=float)}
    with np.errstate(invalid="ignore"):
        v = np.asarray(_eval(node, env, psi), dtype=float)
    shape = np.broadcast(env["t"], env["x"], env["w"]).shape
    if v.shape != shape:
        v = np.broadcast_to(v, shape).copy()
    return float(v) if v.ndim == 0 else v
