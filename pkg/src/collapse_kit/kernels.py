"""Kernel dispatch: compiled ``_ckernels`` when importable, else ``_pykernels``.

Set ``COLLAPSE_KIT_PURE_PYTHON=1`` to force the fallback.
"""

from __future__ import annotations

import os

from . import _pykernels
from ._pykernels import (  # noqa: F401
    STATUS_BLOW_UP,
    STATUS_MINIMAL_SPHERE,
    STATUS_OK,
    STATUS_UNDERFLOW,
    dopri_nodes,
    fd_weights,
    jang_rhs,
)

_impl = _pykernels
BACKEND = "python"
if os.environ.get("COLLAPSE_KIT_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from . import _ckernels as _impl  # type: ignore[no-redef]

        BACKEND = "cython"
    except ImportError:
        _impl = _pykernels

diff1 = _impl.diff1
diff2 = _impl.diff2
cumtrapz = _impl.cumtrapz
cumsimpson = _impl.cumsimpson
running_min = _impl.running_min
jang_tabulated = _impl.jang_tabulated


def backends():
    """Return every importable kernel implementation keyed by name."""
    out = {"python": _pykernels}
    try:
        from . import _ckernels

        out["cython"] = _ckernels
    except ImportError:
        pass
    return out
