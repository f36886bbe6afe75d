"""Kernel backend selection.

The compiled Cython core is preferred; the NumPy implementation is the
fallback.  ``MORPHOFV_KERNELS=numpy`` or ``=compiled`` overrides the choice
(the latter raises if the extension was not built).
"""

import os

from . import _numpy

_choice = os.environ.get("MORPHOFV_KERNELS", "").strip().lower()

if _choice == "numpy":
    _impl = _numpy
elif _choice == "compiled":
    from . import _core as _impl
else:
    try:
        from . import _core as _impl
    except ImportError:
        _impl = _numpy

BACKEND = _impl.NAME
log_joint = _impl.log_joint
fv_sums = _impl.fv_sums
