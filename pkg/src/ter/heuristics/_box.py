import numpy as np


def reflect(x: np.ndarray, lower: np.ndarray, upper: np.ndarray) -> np.ndarray:
    """Mirror out-of-box components at the violated bound, then clamp."""
    x = np.where(x < lower, 2.0 * lower - x, x)
    x = np.where(x > upper, 2.0 * upper - x, x)
    return np.clip(x, lower, upper)


def distinct_indices(rng: np.random.Generator, n: int, pool: int, exclude: list[np.ndarray]) -> np.ndarray:
    """Draw ``n`` indices from ``range(pool)`` with ``out[i]`` differing from every ``exclude[k][i]``."""
    out = rng.integers(pool, size=n)
    while True:
        bad = np.zeros(n, dtype=bool)
        for ex in exclude:
            bad |= out == ex
        if not bad.any():
            return out
        out[bad] = rng.integers(pool, size=int(bad.sum()))
