"""Select the compiled kernels when available, else the pure-Python ones.

Set ``DIFFSQUARES_PURE=1`` to force the fallback.
"""

import os

from . import _pykernels

BACKEND = "python"
_impl = _pykernels
if os.environ.get("DIFFSQUARES_PURE") != "1":
    try:
        from . import _ckernels as _impl  # type: ignore[no-redef]

        BACKEND = "cython"
    except ImportError:
        _impl = _pykernels

max_clique = _impl.max_clique
scan_block = _impl.scan_block
jacobi_many = _impl.jacobi_many

__all__ = ["BACKEND", "max_clique", "scan_block", "jacobi_many"]
