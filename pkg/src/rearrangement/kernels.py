"""Backend selection for the hot kernels.

The compiled extension is used when it imports; otherwise the numpy fallback
is used. ``REARRANGEMENT_PURE_PYTHON=1`` forces the fallback. Both backends
return identical results, so the choice only affects speed.
"""

import os

import numpy as np

from . import _pykernels

_impl = _pykernels
BACKEND = "python"
if not os.environ.get("REARRANGEMENT_PURE_PYTHON"):
    try:
        from . import _kernels as _impl  # noqa: F811

        BACKEND = "cython"
    except ImportError:
        pass

_U64 = 1 << 64


def _vector(x):
    return np.ascontiguousarray(x, dtype=np.float64).reshape(-1)


def spline_eval(samples, y, backend=None):
    """Evaluate the linear spline through ``samples`` at equally spaced nodes."""
    impl = _resolve(backend)
    return impl.spline_eval(_vector(samples), _vector(y))


def step_eval(samples, y, backend=None):
    impl = _resolve(backend)
    return impl.step_eval(_vector(samples), _vector(y))


def inverse_cdf(F, y, backend=None):
    """Index of the first entry of the non-decreasing ``F`` that is >= each ``y``."""
    impl = _resolve(backend)
    return impl.inverse_cdf(_vector(F), _vector(y))


def jitter_unit(seed, start, count, d, backend=None):
    """Counter-based uniform offsets in the open interval (-1, 1).

    Entry ``[p, j]`` depends only on ``seed`` and the counter
    ``(start + p) * d + j``.
    """
    impl = _resolve(backend)
    return impl.jitter_unit(int(seed) % _U64, int(start), int(count), int(d))


def _resolve(backend):
    if backend is None:
        return _impl
    if backend == "python":
        return _pykernels
    if backend == "cython":
        from . import _kernels

        return _kernels
    raise ValueError(f"unknown kernel backend {backend!r}")


def available_backends():
    names = ["python"]
    try:
        from . import _kernels  # noqa: F401

        names.append("cython")
    except ImportError:
        pass
    return names
