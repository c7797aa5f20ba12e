"""Kernel selection.

The compiled extension ``coopifc._ckernels`` is used when it imports; the
numpy implementation in ``coopifc._pykernels`` is the fallback.  Set
``COOPIFC_PURE_PYTHON=1`` to force the fallback.
"""

import os

import numpy as np

from . import _pykernels

# relative amplitude tolerances (see _pykernels)
DROP_TOL = 1e-14
DEG_TOL = 1e-14

BACKEND = "python"
_impl = _pykernels

if os.environ.get("COOPIFC_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from . import _ckernels as _impl  # noqa: F811
        BACKEND = "cython"
    except ImportError:  # pragma: no cover - depends on the build
        _impl = _pykernels


def _pick(backend):
    if backend is None:
        return _impl
    if backend == "python":
        return _pykernels
    if backend == "cython":
        from . import _ckernels
        return _ckernels
    raise ValueError(f"unknown backend {backend!r}")


def cond_logdet(F, target, given, backend=None):
    F = np.ascontiguousarray(F, dtype=complex)
    return _pick(backend).cond_logdet(
        F, np.asarray(target, dtype=np.intp), np.asarray(given, dtype=np.intp),
        DROP_TOL, DEG_TOL)


def combo(F, program, backend=None):
    return _pick(backend).combo(F, program, DROP_TOL, DEG_TOL)
