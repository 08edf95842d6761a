"""Backend selection for the hot distance kernel.

The compiled extension is preferred when it built; the pure-Python module is
the fallback.  Set DIAMONDLIM_PURE=1 to force the fallback (used by the
benchmark and by tests comparing the two).
"""

from __future__ import annotations

import os

from . import _dijkstra_py

try:
    from . import _dijkstra as _compiled
except ImportError:  # extension not built; pure fallback below
    _compiled = None

_FORCE_PURE = os.environ.get("DIAMONDLIM_PURE", "").strip().lower() not in ("", "0", "false")

if _compiled is not None and not _FORCE_PURE:
    bounded_dijkstra = _compiled.bounded_dijkstra
    BACKEND = "compiled"
else:
    bounded_dijkstra = _dijkstra_py.bounded_dijkstra
    BACKEND = "pure"


def backends() -> dict:
    """Name -> kernel for every backend importable in this environment."""
    table = {"pure": _dijkstra_py.bounded_dijkstra}
    if _compiled is not None:
        table["compiled"] = _compiled.bounded_dijkstra
    return table
