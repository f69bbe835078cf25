"""Kernel backend selection.

Two interchangeable backends provide the elementwise hot loops: the
compiled Cython module and a pure-numpy fallback.  Selection happens
once at import time; set ``TREESEQ_KERNELS`` to ``c`` or ``py`` to
force a backend (``c`` raises if the extension is missing), ``auto``
or unset means "compiled if available".  Unknown names are rejected
rather than silently falling back.
"""

from __future__ import annotations

import os

from ..errors import ValidationError
from . import fallback


def _load_compiled():
    from . import _core  # noqa: PLC0415

    return _core


def get_backend(name: str | None = None):
    """Return a kernel module by name: 'c', 'py', or None for the default."""
    if name is None:
        name = os.environ.get("TREESEQ_KERNELS", "auto")
    if name in ("py", "numpy"):
        return fallback
    if name in ("c", "cython"):
        return _load_compiled()
    if name in ("auto", ""):
        try:
            return _load_compiled()
        except ImportError:
            return fallback
    raise ValidationError(
        f"unknown kernel backend {name!r}; use 'c', 'py', or 'auto'"
    )


kernels = get_backend()


def active_backend() -> str:
    return kernels.NAME


def available_backends() -> list[str]:
    names = ["numpy"]
    try:
        _load_compiled()
        names.insert(0, "cython")
    except ImportError:
        pass
    return names
