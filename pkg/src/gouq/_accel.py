"""JIT switch.

Set ``GOUQ_DISABLE_NUMBA=1`` to force the pure-numpy kernels even when numba
is importable. ``set_backend`` flips the choice at runtime (used by the tests
and the benchmark).
"""

import os

try:
    import numba

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is an optional speedup
    numba = None
    HAVE_NUMBA = False

_disabled = os.environ.get("GOUQ_DISABLE_NUMBA", "").strip().lower() not in ("", "0", "false", "no")

NUMBA_OPTS = {"cache": True, "nogil": True}

_backend = "numba" if HAVE_NUMBA and not _disabled else "numpy"


def njit(fn):
    if not HAVE_NUMBA:
        return fn
    return numba.njit(**NUMBA_OPTS)(fn)


def backend() -> str:
    return _backend


def set_backend(name: str) -> str:
    """Select ``"numba"`` or ``"numpy"``; returns the previous choice."""
    global _backend
    if name not in ("numba", "numpy"):
        raise ValueError(f"unknown backend {name!r}")
    if name == "numba" and not HAVE_NUMBA:
        raise RuntimeError("numba is not installed")
    prev, _backend = _backend, name
    return prev
