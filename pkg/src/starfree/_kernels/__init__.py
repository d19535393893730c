"""Kernel backend selection: compiled extension if available, else pure Python.

Both backends implement identical semantics (verified by tests and the
benchmark), so which one loads only affects speed.
"""

try:
    from . import _ballscan as _impl
except ImportError:  # pragma: no cover - depends on build environment
    from . import _ballscan_py as _impl

from . import _ballscan_py as pure

BACKEND = _impl.BACKEND
ball_vertices = _impl.ball_vertices
scan_candidates = _impl.scan_candidates

try:
    from . import _ballscan as compiled
except ImportError:  # pragma: no cover
    compiled = None

__all__ = ["BACKEND", "ball_vertices", "scan_candidates", "pure", "compiled"]
