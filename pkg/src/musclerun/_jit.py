"""numba shim: jit when available, plain Python when disabled.

Set MUSCLERUN_NUMBA=0 to force the pure-Python path (same arithmetic,
much slower; useful for debugging).
"""

import os

_DISABLED = os.environ.get("MUSCLERUN_NUMBA", "1") == "0"

if not _DISABLED:
    try:
        from numba import njit as _njit
    except ImportError:          # pragma: no cover
        _DISABLED = True

if _DISABLED:
    def njit(*args, **kwargs):
        if args and callable(args[0]):
            return args[0]
        return lambda f: f
else:
    def njit(*args, **kwargs):
        kwargs.setdefault("cache", True)
        if args and callable(args[0]):
            return _njit(cache=True)(args[0])
        return _njit(*args, **kwargs)
