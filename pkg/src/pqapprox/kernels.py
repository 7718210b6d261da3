"""Kernel backend selection.

The compiled extension is used when it imports; setting
``PQAPPROX_PURE_PYTHON=1`` forces the numpy fallback.
"""

import os

from . import _pykernels

BACKEND = "python"
weight_matrix = _pykernels.weight_matrix
sup_modulus = _pykernels.sup_modulus

if os.environ.get("PQAPPROX_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from . import _ckernels
    except ImportError:
        pass
    else:
        BACKEND = "cython"
        weight_matrix = _ckernels.weight_matrix
        sup_modulus = _ckernels.sup_modulus

__all__ = ["BACKEND", "weight_matrix", "sup_modulus"]
