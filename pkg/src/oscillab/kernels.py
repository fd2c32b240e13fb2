"""Backend selection for the numerical kernels.

The compiled Cython extension is preferred when it was built; otherwise the
pure NumPy implementation is used.  Set ``OSCILLAB_PURE_PY=1`` to force the
pure backend (useful for debugging and for the backend benchmark).
"""

from __future__ import annotations

import os

from . import _kernels_py

if os.environ.get("OSCILLAB_PURE_PY", "") not in ("", "0"):
    _impl = _kernels_py
    BACKEND = "pure"
else:
    try:
        from . import _kernels_cy as _impl  # type: ignore[attr-defined]

        BACKEND = "compiled"
    except ImportError:
        _impl = _kernels_py
        BACKEND = "pure"

thomas_solve = _impl.thomas_solve
tridiag_matvec = _impl.tridiag_matvec
tridiag_eigenvalues = _impl.tridiag_eigenvalues
tridiag_eigenvectors = _impl.tridiag_eigenvectors


def available_backends() -> dict[str, object]:
    """Importable kernel modules keyed by backend name."""
    backends: dict[str, object] = {"pure": _kernels_py}
    try:
        from . import _kernels_cy  # type: ignore[attr-defined]

        backends["compiled"] = _kernels_cy
    except ImportError:
        pass
    return backends
