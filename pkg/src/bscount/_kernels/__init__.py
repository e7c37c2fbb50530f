"""Hot inner loops, compiled when available.

The Cython extension ``_ckernels`` is used if it was built; otherwise the
pure-Python module ``_pykernels`` with identical contracts is used. Setting
``BSCOUNT_PURE_PYTHON=1`` forces the fallback.
"""

import os

from . import _pykernels

BACKEND = "python"
_impl = _pykernels

if not os.environ.get("BSCOUNT_PURE_PYTHON"):
    try:
        from . import _ckernels as _impl  # noqa: F811

        BACKEND = "cython"
    except ImportError:
        _impl = _pykernels

lanczos_gamma = _impl.lanczos_gamma
cluster_labels = _impl.cluster_labels
wedge_coefficients = _impl.wedge_coefficients
negative_part_power_sum = _impl.negative_part_power_sum

__all__ = [
    "BACKEND",
    "lanczos_gamma",
    "cluster_labels",
    "wedge_coefficients",
    "negative_part_power_sum",
]
