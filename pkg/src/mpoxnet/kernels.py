"""Kernel backend selection.

The compiled extension is used when it was built; otherwise the pure-Python
twin is imported.  Set ``MPOXNET_PURE=1`` to force the fallback.
"""
import os

from . import _kernels_py

BACKEND = "python"
if os.environ.get("MPOXNET_PURE", "") not in ("1", "true", "yes"):
    try:
        from . import _kernels as _compiled
    except ImportError:  # extension not built
        _compiled = None
    else:
        BACKEND = "cython"
else:
    _compiled = None

_impl = _compiled if _compiled is not None else _kernels_py

pair_stubs = _impl.pair_stubs
pair_waitlist = _impl.pair_waitlist
spread = _impl.spread


def backend(name):
    """Return the kernel module for ``name`` ('cython' or 'python')."""
    if name == "python":
        return _kernels_py
    if name == "cython":
        if _compiled is None:
            from . import _kernels as mod  # raises ImportError if not built
            return mod
        return _compiled
    raise ValueError(f"unknown kernel backend {name!r}")
