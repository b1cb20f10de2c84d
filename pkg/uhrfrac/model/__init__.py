"""Problem model and the expression language of its configuration files."""

from .expr import *
from .problem import *
