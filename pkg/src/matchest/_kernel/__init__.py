"""Kernel selection: compiled extension when available, pure twin otherwise.

Set MATCHEST_PURE_KERNEL=1 to force the pure-Python implementation even
when the extension is built (used by the parity tests and the kernel
benchmark).
"""

import os

from . import _pykern

_compiled = None
if os.environ.get("MATCHEST_PURE_KERNEL") != "1":
    try:
        from . import _ckern as _compiled  # type: ignore[attr-defined]
    except ImportError:
        _compiled = None

KERNEL_IMPL = "compiled" if _compiled is not None else "pure"


def compiled_available() -> bool:
    return _compiled is not None


def compiled_module():
    """The extension module, or None when not built / disabled."""
    return _compiled


def pure_module():
    return _pykern
