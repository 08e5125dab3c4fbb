"""Finite-support discrete-time signals with explicit start indices.

Every sequence handled by this package is a dense run of samples anchored
at an integer start index; samples outside the stored window are implicitly
zero.  All types are immutable after construction (the backing arrays are
marked read-only), so values can be shared freely between threads.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "Signal",
    "IntSignal",
    "Correlogram",
    "reverse",
    "shift",
    "l2_norm",
    "trim",
    "scale",
    "add",
    "crop",
]


def _freeze(samples, dtype) -> np.ndarray:
    arr = np.array(samples, dtype=dtype, copy=True)
    if arr.ndim != 1 or arr.size == 0:
        raise ValueError("samples must be a non-empty 1-D sequence")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class Signal:
    """Real-valued finite-support signal: ``self[n] = samples[n - start]``."""

    start: int
    samples: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "samples", _freeze(self.samples, np.float64))

    def __len__(self) -> int:
        return self.samples.size

    @property
    def end(self) -> int:
        """Index of the last stored sample."""
        return self.start + len(self) - 1

    def window(self, start: int, length: int) -> np.ndarray:
        """Samples over ``[start, start+length)``, zero outside the stored run."""
        return _window(self.samples, self.start, start, length)

    def __eq__(self, other) -> bool:
        if type(other) is not type(self):
            return NotImplemented
        return self.start == other.start and np.array_equal(self.samples, other.samples)


@dataclass(frozen=True, eq=False)
class IntSignal:
    """Bounded integer signal; ``bound`` is a magnitude bound, never violated."""

    start: int
    samples: np.ndarray
    bound: int

    def __post_init__(self):
        arr = _freeze(self.samples, np.int64)
        if self.bound < 0:
            raise ValueError("bound must be >= 0")
        if arr.size and int(np.abs(arr).max()) > self.bound:
            raise ValueError("samples exceed the declared magnitude bound")
        object.__setattr__(self, "samples", arr)

    def __len__(self) -> int:
        return self.samples.size

    @property
    def end(self) -> int:
        return self.start + len(self) - 1

    def window(self, start: int, length: int) -> np.ndarray:
        return _window(self.samples, self.start, start, length)

    def __eq__(self, other) -> bool:
        if type(other) is not type(self):
            return NotImplemented
        return self.start == other.start and np.array_equal(self.samples, other.samples)


@dataclass(frozen=True, eq=False)
class Correlogram:
    """Lag-indexed cross-correlation values.

    ``values[i]`` is the correlation at lag ``first_lag + i``.  For inputs of
    lengths N_x and N_y the full overlap range has N_x + N_y - 1 lags and
    ``first_lag = start_y - (start_x + N_x - 1)``.  ``norm_x``/``norm_y``
    optionally carry the input l2 norms so a normalized view is available.
    """

    first_lag: int
    values: np.ndarray
    norm_x: float | None = None
    norm_y: float | None = None

    def __post_init__(self):
        arr = np.array(self.values, copy=True)
        if arr.ndim != 1 or arr.size == 0:
            raise ValueError("values must be a non-empty 1-D sequence")
        if not (np.issubdtype(arr.dtype, np.integer) or np.issubdtype(arr.dtype, np.floating)):
            raise ValueError("values must be integer or real")
        arr.setflags(write=False)
        object.__setattr__(self, "values", arr)

    def __len__(self) -> int:
        return self.values.size

    @property
    def last_lag(self) -> int:
        return self.first_lag + len(self) - 1

    @property
    def lags(self) -> np.ndarray:
        return np.arange(self.first_lag, self.first_lag + len(self))

    def value_at(self, lag: int):
        if not self.first_lag <= lag <= self.last_lag:
            raise IndexError(f"lag {lag} outside [{self.first_lag}, {self.last_lag}]")
        return self.values[lag - self.first_lag]

    def normalized(self) -> np.ndarray:
        """Values divided by the product of the input norms."""
        if self.norm_x is None or self.norm_y is None:
            raise ValueError("input norms were not recorded")
        return self.values / (self.norm_x * self.norm_y)

    def __eq__(self, other) -> bool:
        if type(other) is not type(self):
            return NotImplemented
        return self.first_lag == other.first_lag and np.array_equal(self.values, other.values)


def _window(samples: np.ndarray, have_start: int, want_start: int, length: int) -> np.ndarray:
    if length < 1:
        raise ValueError("window length must be >= 1")
    out = np.zeros(length, dtype=samples.dtype)
    lo = max(want_start, have_start)
    hi = min(want_start + length, have_start + samples.size)
    if lo < hi:
        out[lo - want_start : hi - want_start] = samples[lo - have_start : hi - have_start]
    return out


def _rebuild(s, start: int, samples: np.ndarray):
    if isinstance(s, IntSignal):
        return IntSignal(start, samples, s.bound)
    return Signal(start, samples)


def reverse(s):
    """Time reversal: result[m] = s[-m]."""
    return _rebuild(s, -(s.start + len(s) - 1), s.samples[::-1])


def shift(s, d: int):
    """Relabel indices so that result[n] = s[n + d]."""
    return _rebuild(s, s.start - d, s.samples)


def l2_norm(s) -> float:
    """Euclidean norm of the stored samples.

    Summation is order-independent (exact integer sum, or fsum for reals),
    so reversal and shift leave the norm bit-identical.
    """
    if np.issubdtype(s.samples.dtype, np.integer):
        total = sum(v * v for v in s.samples.tolist())
        return math.sqrt(total)
    return math.sqrt(math.fsum(v * v for v in s.samples.tolist()))


def trim(s):
    """Drop stored leading/trailing zeros; all-zero collapses to [0] at index 0."""
    nz = np.flatnonzero(s.samples)
    if nz.size == 0:
        return _rebuild(s, 0, np.zeros(1, dtype=s.samples.dtype))
    lo, hi = int(nz[0]), int(nz[-1])
    return _rebuild(s, s.start + lo, s.samples[lo : hi + 1])


def scale(s: Signal, a: float) -> Signal:
    return Signal(s.start, s.samples * a)


def add(a: Signal, b: Signal) -> Signal:
    """Pointwise sum over the union of the two supports."""
    lo = min(a.start, b.start)
    hi = max(a.end, b.end)
    out = np.zeros(hi - lo + 1, dtype=np.float64)
    out[a.start - lo : a.start - lo + len(a)] += a.samples
    out[b.start - lo : b.start - lo + len(b)] += b.samples
    return Signal(lo, out)


def crop(s, start: int, length: int):
    """Restrict to ``[start, start+length)``, zero-padding where s has no samples."""
    return _rebuild(s, start, s.window(start, length))
