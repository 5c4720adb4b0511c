"""Hot-kernel backend selection.

The compiled Cython extension is preferred; the numpy implementation is a
drop-in fallback so the package works from a plain source checkout.
``benchmarks/bench_kernels.py`` compares the two.
"""

from . import _pykernels

try:  # pragma: no cover - depends on the build environment
    from . import _ckernels as _impl

    BACKEND = "cython"
except ImportError:  # pragma: no cover
    _impl = _pykernels
    BACKEND = "python"

hysteresis_mask = _impl.hysteresis_mask
gini_best_split = _impl.gini_best_split


def get_backend(name):
    """Return the kernel module for ``name`` ('cython' or 'python')."""
    if name == "python":
        return _pykernels
    if name == "cython":
        from . import _ckernels

        return _ckernels
    raise ValueError(f"unknown kernel backend: {name!r}")
