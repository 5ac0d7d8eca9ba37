"""Shifted, scalable test functions (sphere, Schwefel 2.21, Rosenbrock,
Rastrigin, Griewank, Ackley) with their optimum value moved to 0.

Every function takes ``z = x - o`` along the last axis, so the same code
serves single points and ``(n, D)`` batches.
"""
from __future__ import annotations

from pathlib import Path
from typing import Callable

import numpy as np

from ._kernels import single_point_kernel
from .core import ContractViolation, Objective


class ShiftFormatError(ValueError):
    pass


def sphere(z: np.ndarray) -> np.ndarray:
    return (z * z).sum(axis=-1)


def schwefel221(z: np.ndarray) -> np.ndarray:
    return np.abs(z).max(axis=-1)


def rosenbrock(z: np.ndarray) -> np.ndarray:
    # caller passes z = x - o + 1
    head, tail = z[..., :-1], z[..., 1:]
    return (100.0 * (head * head - tail) ** 2 + (head - 1.0) ** 2).sum(axis=-1)


def rastrigin(z: np.ndarray) -> np.ndarray:
    return (z * z + 10.0 * (1.0 - np.cos(2.0 * np.pi * z))).sum(axis=-1)


def griewank(z: np.ndarray) -> np.ndarray:
    d = z.shape[-1]
    scale = np.sqrt(np.arange(1, d + 1, dtype=float))
    return (z * z).sum(axis=-1) / 4000.0 + (1.0 - np.cos(z / scale).prod(axis=-1))


def ackley(z: np.ndarray) -> np.ndarray:
    # written as two non-negative terms so f(o) is exactly 0
    d = z.shape[-1]
    rms = np.sqrt((z * z).sum(axis=-1) / d)
    mean_cos = np.cos(2.0 * np.pi * z).sum(axis=-1) / d
    return 20.0 * (1.0 - np.exp(-0.2 * rms)) + (np.e - np.exp(mean_cos))


FUNCTIONS: dict[str, tuple[Callable[[np.ndarray], np.ndarray], float]] = {
    "sphere": (sphere, 100.0),
    "schwefel221": (schwefel221, 100.0),
    "rosenbrock": (rosenbrock, 100.0),
    "rastrigin": (rastrigin, 5.0),
    "griewank": (griewank, 600.0),
    "ackley": (ackley, 32.0),
}

# f1..f6 of the 2008 large-scale suite, in order
SUITE = ["sphere", "schwefel221", "rosenbrock", "rastrigin", "griewank", "ackley"]


class BenchmarkProblem(Objective):
    def __init__(self, function_id: str, shift: np.ndarray):
        if function_id not in FUNCTIONS:
            raise ContractViolation(
                f"unknown function {function_id!r}; choose from {sorted(FUNCTIONS)}"
            )
        func, half_width = FUNCTIONS[function_id]
        shift = np.asarray(shift, dtype=float)
        if shift.ndim != 1 or shift.size < 1:
            raise ContractViolation("shift must be a non-empty 1-D vector")
        if function_id == "rosenbrock" and shift.size < 2:
            raise ContractViolation("rosenbrock needs dimension >= 2")
        self.function_id = function_id
        self.shift = shift
        self._f = func
        self._offset = 1.0 if function_id == "rosenbrock" else 0.0
        self._kernel = single_point_kernel(function_id)
        d = shift.size
        super().__init__(
            self._single,
            np.full(d, -half_width),
            np.full(d, half_width),
            batch_func=self._batch,
            name=function_id,
        )

    def _check(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if x.shape[-1] != self.shift.size:
            raise ContractViolation(
                f"expected dimension {self.shift.size}, got {x.shape[-1]}"
            )
        return x

    def _single(self, x: np.ndarray) -> float:
        if getattr(x, "shape", None) != self.shift.shape:
            x = self._check(x)
            if x.ndim != 1:
                raise ContractViolation("single evaluation expects a 1-D point")
        if self._kernel is not None and x.dtype == np.float64:
            return self._kernel(x, self.shift)
        if self._offset:
            return float(self._f(x - self.shift + self._offset))
        return float(self._f(x - self.shift))

    def _batch(self, xs: np.ndarray) -> np.ndarray:
        return self._f(self._check(xs) - self.shift + self._offset)

    @property
    def optimum(self) -> np.ndarray:
        return self.shift.copy()


def evaluate(problem: BenchmarkProblem, x: np.ndarray) -> float:
    return problem(x)


def read_shift_file(path: str | Path, dimension: int) -> np.ndarray:
    try:
        lines = [ln.strip() for ln in Path(path).read_text().splitlines()]
    except OSError as exc:
        raise ShiftFormatError(f"cannot read shift file {path}: {exc}") from exc
    values = [ln for ln in lines if ln]
    if len(values) < dimension:
        raise ShiftFormatError(
            f"shift file {path} has {len(values)} values, dimension {dimension} needs {dimension}"
        )
    try:
        return np.array([float(v) for v in values[:dimension]])
    except ValueError as exc:
        raise ShiftFormatError(f"non-numeric entry in shift file {path}: {exc}") from exc


def write_shift_file(path: str | Path, shift: np.ndarray) -> None:
    Path(path).write_text("".join(f"{float(v)!r}\n" for v in shift))


def make_problem(
    function_id: str,
    dimension: int,
    shift_seed: int | None = 0,
    shift_file: str | Path | None = None,
) -> BenchmarkProblem:
    """Build a shifted problem; a shift file wins over a seed.

    Seeded shifts are uniform over the central half of the box.
    """
    if dimension < 1:
        raise ContractViolation(f"dimension must be >= 1, got {dimension}")
    if function_id not in FUNCTIONS:
        raise ContractViolation(f"unknown function {function_id!r}")
    if shift_file is not None:
        shift = read_shift_file(shift_file, dimension)
    else:
        half_width = FUNCTIONS[function_id][1]
        rng = np.random.default_rng(shift_seed)
        shift = rng.uniform(-half_width / 2.0, half_width / 2.0, size=dimension)
    return BenchmarkProblem(function_id, shift)
