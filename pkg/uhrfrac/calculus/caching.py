# -*- coding: utf-8 -*-
"""Caching of product-integration weight tables.

Weight tables depend only on (psi, alpha, mesh, lower limit) and are reused
by every Picard iteration, so they are precompiled once and looked up by id.
The drawback is that a table, once compiled, can't be modified: it is keyed
on immutable inputs only.

The store keeps at most global_settings.cache_tables tables; the least
recently used one is dropped first.

"""

import logging
import threading
from collections import OrderedDict

from ..state import settings_mixin

__all__ = (
    'flush',
    'precompile',
    'precompiled'
)

log = logging.getLogger(__name__)

_tables = OrderedDict()
_lock = threading.Lock()


def precompile(key, function, *args, **kwargs):
    """Compute function(*args, **kwargs) once and store it under key.

    Returns the key, which can be used with precompiled() to fetch the cached
    table. Calling precompile() again with the same key is a cache hit.

    """
    with _lock:
        if key in _tables:
            _tables.move_to_end(key)
            log.debug("weight cache hit %r", key[:2])
            return key
    table = function(*args, **kwargs)
    (limit,) = settings_mixin("cache_tables")
    with _lock:
        _tables.setdefault(key, table)
        _tables.move_to_end(key)
        while len(_tables) > max(1, int(limit)):
            _tables.popitem(last=False)
    log.debug("weight cache store %r (%i tables)", key[:2], len(_tables))
    return key


def precompiled(key):
    """Return the table stored under the given key."""
    return _tables[key]


def flush(key=None):
    """Remove the table with the given key from memory (all when None)."""
    with _lock:
        if key is None:
            _tables.clear()
        else:
            _tables.pop(key, None)
