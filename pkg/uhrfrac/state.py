# -*- coding: utf-8 -*-
"""Module to keep global solver settings."""

import os

__all__ = ('Settings', 'global_settings', 'settings_mixin', 'THREADS_ENV')

# Environment variable capping internal parallelism.
THREADS_ENV = "UHRFRAC_THREADS"


def _threads_from_env(environ=None):
    environ = os.environ if environ is None else environ
    try:
        return max(1, int(environ.get(THREADS_ENV, 1)))
    except ValueError:
        return 1


class Settings(object):
    def __init__(self, environ=None):
        self.n_per_interval = 64       # mesh nodes per partition interval
        self.grading = 2.0             # mesh grading exponent (1 = uniform)
        self.tol = 1e-10               # Picard stopping distance
        self.max_iter = 100            # Picard iteration budget
        self.memory_anchor = "t"       # kernel anchor of g_i memory: t | s_i
        self.impulse_mode = "explicit" # g_i in Omega: explicit | implicit
        self.damping = 0.5             # damped impulse iteration weight
        self.impulse_tol = 1e-14       # scalar impulse solve tolerance
        self.impulse_max_iter = 500    # scalar impulse solve budget
        self.ml_tol = 1e-15            # Mittag-Leffler tail tolerance
        self.ml_max_terms = 2000       # Mittag-Leffler term cap
        self.slack_abs = 1e-8          # residual inequality slack
        self.slack_rel = 1e-6
        self.cache_tables = 64         # weight tables kept in memory
        self.threads = _threads_from_env(environ)

    def copy(self, **kwargs):
        s = Settings.__new__(Settings)
        s.__dict__.update(self.__dict__)
        for k, v in kwargs.items():
            if v is not None:
                setattr(s, k, v)
        return s

    def __repr__(self):
        return "Settings(%s)" % ", ".join(
            "%s=%r" % kv for kv in sorted(self.__dict__.items()))


global_settings = Settings()


# -- SETTINGS MIXIN -----------------------------------------------------------
# Solver commands take optional keyword overrides (tol, max_iter, ...) that
# default to the global settings.

def settings_mixin(*names, **kwargs):
    """Return the values of the given setting names.

    A keyword argument that is not None overrides the global setting.

    """
    return tuple(
        kwargs[k] if kwargs.get(k) is not None else getattr(global_settings, k)
        for k in names)
