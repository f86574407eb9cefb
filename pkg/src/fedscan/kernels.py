"""Kernel dispatch: the compiled extension when importable, the pure-Python twin otherwise.

Set ``FEDSCAN_PURE_PYTHON=1`` to force the fallback.
"""

import os

from . import _pykernels

BACKEND = "python"

if os.environ.get("FEDSCAN_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from . import _ckernels as _impl

        BACKEND = "cython"
    except ImportError:  # extension not built
        _impl = _pykernels
else:
    _impl = _pykernels

greedy_search = _impl.greedy_search
exhaustive_search = _impl.exhaustive_search
objective = _impl.objective
