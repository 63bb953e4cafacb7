"""Pure numpy implementations of the hot kernels.

These are the reference semantics; ``_kernels.pyx`` must reproduce them bit
for bit. Inputs are assumed validated by the callers in :mod:`kernels`.
"""

import numpy as np

_GAMMA = np.uint64(0x9E3779B97F4A7C15)
_MIX1 = np.uint64(0xBF58476D1CE4E5B9)
_MIX2 = np.uint64(0x94D049BB133111EB)


def spline_eval(s, y):
    omega = s.shape[0] - 1
    nodes = np.arange(omega + 1, dtype=np.float64) / omega
    seg = np.searchsorted(nodes, y, side="right") - 1
    seg = np.clip(seg, 0, omega)
    at_node = nodes[seg] == y
    lo = np.minimum(seg, omega - 1)
    hi = lo + 1
    s_lo, s_hi = s[lo], s[hi]
    frac = (y - nodes[lo]) / (nodes[hi] - nodes[lo])
    v = s_lo + frac * (s_hi - s_lo)
    # clamping keeps rounding from pushing a value past the next knot
    v = np.minimum(np.maximum(v, s_lo), s_hi)
    return np.where(at_node, s[seg], v)


def step_eval(s, y):
    m = s.shape[0]
    bounds = np.arange(m + 1, dtype=np.float64) / m
    i = np.searchsorted(bounds, y, side="left") - 1
    return s[np.clip(i, 0, m - 1)]


def inverse_cdf(F, y):
    return np.searchsorted(F, y, side="left").astype(np.int64)


def jitter_unit(seed, start, count, d):
    counter = (
        (np.arange(count, dtype=np.uint64) + np.uint64(start))[:, None] * np.uint64(d)
        + np.arange(d, dtype=np.uint64)[None, :]
    )
    z = np.uint64(seed) + (counter + np.uint64(1)) * _GAMMA
    z = (z ^ (z >> np.uint64(30))) * _MIX1
    z = (z ^ (z >> np.uint64(27))) * _MIX2
    z = z ^ (z >> np.uint64(31))
    k = (z >> np.uint64(12)).astype(np.float64)
    return (2.0 * k + 1.0) * 2.0**-52 - 1.0
