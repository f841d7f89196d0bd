"""Kernel backend selection.

The compiled extension is preferred when it imported cleanly; setting
SPECHIT_PURE=1 in the environment forces the pure-Python fallback.
Both backends are deterministic and bit-identical (see _pure.py), so
selection only affects speed.
"""

from __future__ import annotations

import os

from . import _pure

if os.environ.get("SPECHIT_PURE"):
    _impl = _pure
else:
    try:
        from . import _corex as _impl  # type: ignore[no-redef]
    except ImportError:
        _impl = _pure

IMPL = _impl.IMPL
connected_masks = _impl.connected_masks
walk_hitting_times = _impl.walk_hitting_times


def backends() -> dict:
    """All importable backends, keyed by name (used by tests and benchmarks)."""
    found = {"pure": _pure}
    try:
        from . import _corex
        found["cython"] = _corex
    except ImportError:
        pass
    return found
