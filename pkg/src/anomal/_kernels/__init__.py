"""Scalar special-function kernels, compiled when available.

The Cython build (``_ckernels``) is used by default. Setting the environment
variable ``ANOMAL_PUREPY=1`` before import forces the pure-Python twin, which
is also the automatic fallback when the extension was not built.
"""
import os

from . import _pykernels

if os.environ.get("ANOMAL_PUREPY", "") not in ("", "0"):
    _impl = _pykernels
else:
    try:
        from . import _ckernels as _impl
    except ImportError:  # extension not built
        _impl = _pykernels

BACKEND = _impl.BACKEND
sinpi = _impl.sinpi
gamma = _impl.gamma
rgamma = _impl.rgamma
hyp1f1 = _impl.hyp1f1
hyp1f1_series = _impl.hyp1f1_series
hyperu = _impl.hyperu
hyperu_pair = _impl.hyperu_pair
hyperu_poly = _impl.hyperu_poly
hyperu_quad = _impl.hyperu_quad
hyperu_asym = _impl.hyperu_asym


def backends():
    """Return the importable kernel modules keyed by backend name."""
    out = {"python": _pykernels}
    try:
        from . import _ckernels
    except ImportError:
        pass
    else:
        out["cython"] = _ckernels
    return out
