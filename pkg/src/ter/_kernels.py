"""Compiled single-point versions of the benchmark functions.

Line searches evaluate one point at a time, where numpy's per-call overhead
dominates at moderate D. These loops take ``(x, shift)`` directly. Batches
still go through the numpy versions in :mod:`ter.benchmarks`; the two agree
to rounding.
"""
import math

try:
    from numba import njit
except ImportError:  # pragma: no cover - numba is optional
    njit = None

TWO_PI = 2.0 * math.pi


def _sphere(x, o):
    s = 0.0
    for i in range(x.shape[0]):
        z = x[i] - o[i]
        s += z * z
    return s


def _schwefel221(x, o):
    m = 0.0
    for i in range(x.shape[0]):
        z = abs(x[i] - o[i])
        if z > m:
            m = z
    return m


def _rosenbrock(x, o):
    s = 0.0
    prev = x[0] - o[0] + 1.0
    for i in range(1, x.shape[0]):
        cur = x[i] - o[i] + 1.0
        a = prev * prev - cur
        b = prev - 1.0
        s += 100.0 * a * a + b * b
        prev = cur
    return s


def _rastrigin(x, o):
    s = 0.0
    for i in range(x.shape[0]):
        z = x[i] - o[i]
        s += z * z + 10.0 * (1.0 - math.cos(TWO_PI * z))
    return s


def _griewank(x, o):
    s = 0.0
    p = 1.0
    for i in range(x.shape[0]):
        z = x[i] - o[i]
        s += z * z
        p *= math.cos(z / math.sqrt(i + 1.0))
    return s / 4000.0 + (1.0 - p)


def _ackley(x, o):
    d = x.shape[0]
    sq = 0.0
    cs = 0.0
    for i in range(d):
        z = x[i] - o[i]
        sq += z * z
        cs += math.cos(TWO_PI * z)
    return 20.0 * (1.0 - math.exp(-0.2 * math.sqrt(sq / d))) + (math.e - math.exp(cs / d))


_PY = {
    "sphere": _sphere,
    "schwefel221": _schwefel221,
    "rosenbrock": _rosenbrock,
    "rastrigin": _rastrigin,
    "griewank": _griewank,
    "ackley": _ackley,
}

_compiled: dict = {}


def single_point_kernel(function_id: str):
    """Compiled kernel for ``function_id``, or ``None`` without numba."""
    if njit is None:
        return None
    if function_id not in _compiled:
        _compiled[function_id] = njit(cache=True)(_PY[function_id])
    return _compiled[function_id]
