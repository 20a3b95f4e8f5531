"""Kernel backend selection.

The compiled Cython kernels are preferred when the extension built; the
numpy implementations are the fallback. ``MVAPPROX_BACKEND`` overrides the
choice: ``auto`` (default), ``compiled`` (fail hard if missing) or
``python``. The selected module is re-exported here so the rest of the
package imports one place.
"""

from __future__ import annotations

import os
import warnings

from . import _pykernels


def _load():
    requested = os.environ.get("MVAPPROX_BACKEND", "auto").strip().lower()
    if requested not in {"auto", "compiled", "python"}:
        warnings.warn(f"unknown MVAPPROX_BACKEND={requested!r}; using auto")
        requested = "auto"
    if requested == "python":
        return _pykernels
    try:
        from . import _ckernels

        return _ckernels
    except ImportError:
        if requested == "compiled":
            raise
        return _pykernels


def available_backends() -> dict:
    """Map backend name to kernel module, for benchmarks and tests."""
    out = {"python": _pykernels}
    try:
        from . import _ckernels

        out["compiled"] = _ckernels
    except ImportError:
        pass
    return out


_impl = _load()
BACKEND = _impl.BACKEND_NAME
divided_difference_rows = _impl.divided_difference_rows
annihilation_solve = _impl.annihilation_solve
