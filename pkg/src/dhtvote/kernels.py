"""Kernel backend selection.

Prefers the compiled extension; falls back to the pure-Python twin when the
extension is missing or when DHTVOTE_PURE_PYTHON=1 is set in the environment.
"""

from __future__ import annotations

import os

if os.environ.get("DHTVOTE_PURE_PYTHON") == "1":
    from . import _fast_py as _impl
else:
    try:
        from . import _fast as _impl  # type: ignore[attr-defined]
    except ImportError:
        from . import _fast_py as _impl

BACKEND: str = _impl.BACKEND
positions_from_sorted = _impl.positions_from_sorted
route_hops_many = _impl.route_hops_many
