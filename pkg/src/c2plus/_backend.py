"""Pick the compiled kernels when available, otherwise the numpy ones."""

from __future__ import annotations

import os

from . import _pure

NAME = "pure"
kernels = _pure

if os.environ.get("C2PLUS_PURE", "") not in ("1", "true", "yes"):
    try:
        from ._cython import _core as _compiled
    except ImportError:  # extension not built
        pass
    else:
        kernels = _compiled
        NAME = "cython"


def use(name: str) -> None:
    """Switch the active kernels at run time ('cython' or 'pure')."""
    global kernels, NAME
    if name == "pure":
        kernels, NAME = _pure, "pure"
    elif name == "cython":
        from ._cython import _core as compiled

        kernels, NAME = compiled, "cython"
    else:
        raise ValueError(f"unknown backend {name!r}")
