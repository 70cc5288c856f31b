"""Kernel backend selection.

The compiled Cython kernel is preferred; the pure-numpy fallback is used when
the extension is unavailable or when THERMALPROP_BACKEND=python is set.
Both expose the same ``apply_gate`` contract (see ``pykernel``).
"""

import os

from . import pykernel

PAULI = pykernel.PAULI
MAJORANA = pykernel.MAJORANA

_requested = os.environ.get("THERMALPROP_BACKEND", "").lower()

if _requested == "python":
    _impl = pykernel
    BACKEND = "python"
else:
    try:
        from . import _core as _impl

        if not all(hasattr(_impl, a) for a in ("apply_gate", "dense_pair_gate", "dense_diag_gate")):
            raise ImportError("compiled kernel is incomplete")
        BACKEND = "cython"
    except ImportError:
        if _requested == "cython":
            raise
        _impl = pykernel
        BACKEND = "python"

apply_gate = _impl.apply_gate
dense_pair_gate = _impl.dense_pair_gate
dense_diag_gate = _impl.dense_diag_gate


def backend_name() -> str:
    return BACKEND
