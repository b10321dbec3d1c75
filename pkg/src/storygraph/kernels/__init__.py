"""Pair-scoring kernels: compiled core with a pure-Python fallback.

The compiled extension is optional; whichever backend loads first wins.
``BACKEND`` names the active one, and both expose the same functions with
bit-identical results (see tests/test_kernels.py and benchmarks/).
"""

try:
    from . import _native as _impl
except ImportError:  # extension not built; pure Python carries the load
    from . import _purepy as _impl

BACKEND: str = _impl.NAME

score_pairs = _impl.score_pairs
accept_all_pairs = _impl.accept_all_pairs


def backends() -> dict[str, object]:
    """All importable backends, keyed by name (for tests and benchmarks)."""
    from . import _purepy

    found = {_purepy.NAME: _purepy}
    try:
        from . import _native

        found[_native.NAME] = _native
    except ImportError:
        pass
    return found
