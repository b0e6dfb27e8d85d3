"""Shared numeric kernels: log-domain aggregation and deterministic parallel maps.

Weighted sums on the infinite-type space overflow double precision long
before the truncation indices of interest (exponents reach k*alpha_n ~ 4000),
so every aggregation here works on logarithms and only exponentiates on
demand, with a compensated sum after shifting by the running maximum.
"""

from __future__ import annotations

import math
import os
from fractions import Fraction
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, Sequence, TypeVar

import numpy as np

NEG_INF = float("-inf")
LOG_FLOAT_MAX = math.log(np.finfo(np.float64).max)

T = TypeVar("T")
R = TypeVar("R")


def exp_guarded(x: float) -> float:
    """exp(x) that saturates to inf instead of raising OverflowError."""
    if x > LOG_FLOAT_MAX:
        return math.inf
    return math.exp(x)


def log_abs(x) -> float:
    a = abs(x)
    if a == 0:
        return NEG_INF
    if isinstance(a, Fraction):
        # floats underflow long before exact rationals do
        return math.log(a.numerator) - math.log(a.denominator)
    return math.log(a)


def sum_exp(log_terms: Iterable[float]) -> tuple[float, float]:
    """Sum of exp(t) over log-domain terms. Returns (value, log_value).

    The sum is shifted by the maximum term and accumulated with math.fsum,
    so log_value stays finite and accurate even when value overflows.
    """
    terms = [t for t in log_terms if t != NEG_INF]
    if not terms:
        return 0.0, NEG_INF
    top = max(terms)
    if top == math.inf:
        return math.inf, math.inf
    s = math.fsum(math.exp(t - top) for t in terms)
    logv = top + math.log(s)
    return exp_guarded(logv), logv


def log_sum_exp(arr: np.ndarray, axis=None) -> np.ndarray | float:
    """Shift-stabilized log(sum(exp(arr))) along axis; handles -inf blocks."""
    a = np.asarray(arr, dtype=float)
    top = np.max(a, axis=axis, keepdims=True) if a.size else np.float64(NEG_INF)
    top = np.where(np.isfinite(top), top, 0.0)
    with np.errstate(divide="ignore"):
        out = np.log(np.sum(np.exp(a - top), axis=axis)) + np.squeeze(top, axis=axis)
    if np.ndim(out) == 0:
        out = float(out)
        if np.all(a == NEG_INF):
            return NEG_INF
    return out


def log_cumsum_exp(arr: np.ndarray) -> np.ndarray:
    """Running log-sum-exp along a 1-d array (np.logaddexp is overflow-safe)."""
    return np.logaddexp.accumulate(np.asarray(arr, dtype=float))


def logaddexp(a: float, b: float) -> float:
    if a == NEG_INF:
        return b
    if b == NEG_INF:
        return a
    return float(np.logaddexp(a, b))


def log1p_tol(tol: float) -> float:
    """Log-domain width of a relative tolerance band."""
    return math.log1p(tol)


def worker_count(cells: int) -> int:
    """Worker cap for sweep pools; PSOP_THREADS overrides the CPU count."""
    env = os.environ.get("PSOP_THREADS")
    cap = os.cpu_count() or 1
    if env:
        try:
            cap = max(1, int(env))
        except ValueError:
            pass
    return max(1, min(cap, cells))


def map_cells(fn: Callable[[T], R], cells: Sequence[T]) -> list[R]:
    """Apply fn over independent sweep cells, results in submission order.

    Collection order is fixed, so reductions over the result list are
    deterministic regardless of scheduling.
    """
    n = worker_count(len(cells))
    if n <= 1 or len(cells) <= 1:
        return [fn(c) for c in cells]
    with ThreadPoolExecutor(max_workers=n) as pool:
        return list(pool.map(fn, cells))


def fmt17(x: float) -> str:
    """17-significant-digit formatting for CSV series."""
    if isinstance(x, complex):
        return f"{x.real:.17g}{x.imag:+.17g}j"
    return f"{float(x):.17g}"
