"""psi-fractional calculus: kernels, special functions and quadrature."""

from .psi import *
from .mittagleffler import *
from .quadrature import *
