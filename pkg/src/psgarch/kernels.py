"""Backend selection for the hot inner loops.

The compiled extension is used when it imports; otherwise the numpy
fallback is used. Set ``PSGARCH_PURE_PYTHON=1`` to force the fallback.
"""
import os

from . import _pykernels

BACKEND = "python"
if os.environ.get("PSGARCH_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from . import _ckernels as _impl
    except ImportError:
        _impl = _pykernels
    else:
        BACKEND = "cython"
else:
    _impl = _pykernels

garch11_filter = _impl.garch11_filter
garch11_simulate = _impl.garch11_simulate
garch11_nll = _impl.garch11_nll
lag_cosine_sum = _impl.lag_cosine_sum

__all__ = [
    "BACKEND",
    "garch11_filter",
    "garch11_simulate",
    "garch11_nll",
    "lag_cosine_sum",
]
