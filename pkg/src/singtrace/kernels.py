"""Kernel selection: compiled extension when built, pure Python otherwise.

Set ``SINGTRACE_PURE_PYTHON=1`` to force the fallback.
"""
import os

USING_COMPILED = False

if os.environ.get("SINGTRACE_PURE_PYTHON") != "1":
    try:
        from ._kernels import compensated_sum, kahan_cumsum, window_extrema  # noqa: F401

        USING_COMPILED = True
    except ImportError:
        pass

if not USING_COMPILED:
    from ._kernels_py import compensated_sum, kahan_cumsum, window_extrema  # noqa: F401

__all__ = ["USING_COMPILED", "compensated_sum", "kahan_cumsum", "window_extrema"]
