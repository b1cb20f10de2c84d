"""Picard solver and stability analysis of the mild solution."""

from .picard import *
from .stability import *
