"""Kernel backend selection.

The compiled extension ``xcover._kernels`` is preferred; the pure-Python
module ``xcover._kernels_py`` is the drop-in fallback.  Set the environment
variable ``XCOVER_PURE_PYTHON`` to any non-empty value to force the
fallback (useful for benchmarking and debugging).
"""

from __future__ import annotations

import os

if os.environ.get("XCOVER_PURE_PYTHON"):
    from xcover import _kernels_py as _impl
else:
    try:
        from xcover import _kernels as _impl  # type: ignore[attr-defined]
    except ImportError:
        from xcover import _kernels_py as _impl

BACKEND = _impl.BACKEND

cover_optimum = _impl.cover_optimum
exact_cover_optimum = _impl.exact_cover_optimum
ham_cycle = _impl.ham_cycle


def colorful_trial_yes(k, post_order, parent, orient, out_adj, in_adj, colors):
    """Dispatch a color-coding trial; hosts beyond 64 nodes use pure Python.

    The compiled kernel keeps host adjacency in single machine words, so
    wider hosts fall back transparently.
    """
    if len(colors) > 64 and _impl.BACKEND == "cython":
        from xcover import _kernels_py

        return _kernels_py.colorful_trial_yes(
            k, post_order, parent, orient, out_adj, in_adj, colors)
    return _impl.colorful_trial_yes(k, post_order, parent, orient, out_adj, in_adj, colors)


def backend_name() -> str:
    return BACKEND
