"""Kernel backend selection.

The compiled Cython extension is preferred; a pure-numpy implementation with
the identical interface is used when the extension was not built.  Both
expose ``apply_shifted`` and ``raw_moments``; ``benchmarks/bench_kernels.py``
compares them head to head.
"""

try:
    from . import _kernels_cy as _impl
except ImportError:  # pragma: no cover - depends on the build
    from . import _kernels_py as _impl

BACKEND = _impl.BACKEND
apply_shifted = _impl.apply_shifted
raw_moments = _impl.raw_moments
