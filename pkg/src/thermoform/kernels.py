"""Backend selection for the hot loops.

The compiled extension is used when it was built and importable; otherwise
the numpy fallback.  Set ``THERMOFORM_PURE_PYTHON=1`` to force the fallback.
"""

import os

from . import _pykernels

BACKEND = "python"
_impl = _pykernels

if os.environ.get("THERMOFORM_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from . import _ckernels as _impl  # noqa: F811

        BACKEND = "cython"
    except ImportError:
        _impl = _pykernels


def backend(name=None):
    """Kernel module for ``name`` ('cython' or 'python'); default the active one."""
    if name is None:
        return _impl
    if name == "python":
        return _pykernels
    if name == "cython":
        from . import _ckernels

        return _ckernels
    raise ValueError(f"unknown backend {name!r}")


def chain_birkhoff_sums(*args, **kwargs):
    return _impl.chain_birkhoff_sums(*args, **kwargs)


def lyapunov_sums(*args, **kwargs):
    return _impl.lyapunov_sums(*args, **kwargs)
