# == UHRFRAC ==================================================================

# uhrfrac is a Python package for solving non-instantaneous impulsive
# fractional integrodifferential equations written with the psi-Hilfer
# derivative.
# It computes the mild solution by Picard iteration on the piecewise integral
# form, evaluates the contraction constant and the Ulam-Hyers-Rassias
# envelope, and checks the hypotheses numerically.

import logging as _logging

__author__    = "uhrfrac developers"
__version__   = "0.3.0"
__copyright__ = "Copyright (c) 2026 uhrfrac developers"
__license__   = "BSD"

# The package logger is quiet by default, the command line raises its level.
logger = _logging.getLogger("uhrfrac")
if not logger.handlers:
    _handler = _logging.StreamHandler()
    _handler.setFormatter(
        _logging.Formatter("[%(levelname)s] %(name)s: %(message)s"))
    logger.addHandler(_handler)
    logger.setLevel(_logging.WARNING)
