"""Backend selection for the hot contraction kernels.

The compiled extension is preferred when it imported cleanly; the NumPy
fallback is always available.  Set ``TESALOCS_KERNELS`` to ``python`` or
``native`` to force a backend (``native`` raises if the extension is
missing), or leave it at ``auto``.
"""

import os

from . import _python

try:
    from . import _native
except ImportError:
    _native = None


def available_backends():
    names = ["python"]
    if _native is not None:
        names.append("native")
    return names


def _select():
    choice = os.environ.get("TESALOCS_KERNELS", "auto").lower()
    if choice == "python":
        return _python
    if choice == "native":
        if _native is None:
            raise ImportError(
                "TESALOCS_KERNELS=native but the compiled kernels are not built"
            )
        return _native
    if choice != "auto":
        raise ValueError(f"unknown TESALOCS_KERNELS value: {choice!r}")
    return _native if _native is not None else _python


_backend = _select()

backend_name = _backend.NAME
log_eval_many = _backend.log_eval_many
sample_indices = _backend.sample_indices


def get_backend(name):
    """Return a specific backend module by name (for tests and benchmarks)."""
    if name == "python":
        return _python
    if name == "native":
        if _native is None:
            raise KeyError("native kernels are not built")
        return _native
    raise KeyError(name)
