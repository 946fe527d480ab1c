"""Pick the kernel implementation at import time.

The compiled ``_kernels_c`` extension is used when it was built; otherwise the
numpy fallback in ``_kernels_py``. Set ``EIGENGESTURE_PURE_PYTHON=1`` to force
the fallback.
"""
import os

from . import _kernels_py

if os.environ.get("EIGENGESTURE_PURE_PYTHON") == "1":
    kernels = _kernels_py
else:
    try:
        from . import _kernels_c as kernels
    except ImportError:  # extension not built
        kernels = _kernels_py

BACKEND = kernels.NAME


def available():
    """Names of the kernel modules importable in this environment, keyed by name."""
    found = {"python": _kernels_py}
    try:
        from . import _kernels_c
    except ImportError:
        pass
    else:
        found["cython"] = _kernels_c
    return found
