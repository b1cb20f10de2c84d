import pytest

from uhrfrac.calculus import caching
from uhrfrac.state import global_settings


@pytest.fixture
def small_store():
    caching.flush()
    limit = global_settings.cache_tables
    global_settings.cache_tables = 2
    yield
    global_settings.cache_tables = limit
    caching.flush()


def test_precompile_is_computed_once(small_store):
    calls = []

    def build(n):
        calls.append(n)
        return [n] * n

    key = caching.precompile(("a", 3), build, 3)
    assert caching.precompile(("a", 3), build, 3) == key
    assert caching.precompiled(key) == [3, 3, 3]
    assert calls == [3]


def test_store_drops_least_recently_used(small_store):
    caching.precompile(("a",), list, "a")
    caching.precompile(("b",), list, "b")
    # A hit refreshes ("a",), so ("b",) is the oldest when ("c",) arrives.
    caching.precompile(("a",), list, "a")
    caching.precompile(("c",), list, "c")
    assert caching.precompiled(("a",)) == ["a"]
    assert caching.precompiled(("c",)) == ["c"]
    with pytest.raises(KeyError):
        caching.precompiled(("b",))


def test_flush(small_store):
    caching.precompile(("a",), list, "a")
    caching.precompile(("b",), list, "b")
    caching.flush(("a",))
    with pytest.raises(KeyError):
        caching.precompiled(("a",))
    caching.flush()
    with pytest.raises(KeyError):
        caching.precompiled(("b",))
