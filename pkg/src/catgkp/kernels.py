"""Kernel backend selection.

The Cython extension ``_ckernels`` is used when it was built; otherwise the
numpy fallback in ``_kernels_py`` is imported. Set ``CATGKP_PURE_PYTHON=1`` to
force the fallback.
"""

from __future__ import annotations

import os

from . import _kernels_py as python_backend

compiled_backend = None
if os.environ.get("CATGKP_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from . import _ckernels as compiled_backend
    except ImportError:
        compiled_backend = None

_impl = compiled_backend if compiled_backend is not None else python_backend
BACKEND = "cython" if compiled_backend is not None else "python"

displacement_elements = _impl.displacement_elements
wigner_pure = _impl.wigner_pure
