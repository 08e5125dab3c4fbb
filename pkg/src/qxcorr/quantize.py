"""Monotone non-decreasing integer quantizers that fix zero.

Peak positions of the cross-correlation between two shifted signals survive
any transformation from this class, so an estimator may quantize as hard as
it likes (down to the sign function) before correlating.  Three kinds are
provided: ``sign``, midrise-free ``uniform`` rounding, and an arbitrary
``custom`` staircase given by its threshold list.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .signals import IntSignal, Signal

__all__ = ["Quantizer", "sign", "uniform", "custom", "from_spec", "apply", "random_monotone"]


@dataclass(frozen=True)
class Quantizer:
    """Monotone map from reals to integers in [-k, k] with q(0) = 0.

    ``kind`` is one of "sign", "uniform", "custom".  Uniform quantization
    rounds value/step half away from zero and clamps to +-k.  A custom
    quantizer with thresholds t_1 < ... < t_2k maps r to (number of
    thresholds <= r) - k; zero must sit strictly between t_k and t_{k+1}
    so that level 0 contains it.
    """

    kind: str
    k: int
    step: float = 1.0
    thresholds: tuple[float, ...] = field(default=())

    def __post_init__(self):
        if self.k < 1:
            raise ValueError("level bound k must be >= 1")
        if self.kind == "uniform" and not self.step > 0:
            raise ValueError("uniform step must be > 0")
        if self.kind == "custom":
            t = np.asarray(self.thresholds, dtype=np.float64)
            if t.size != 2 * self.k:
                raise ValueError("custom quantizer needs exactly 2k thresholds")
            if not np.all(np.diff(t) > 0):
                raise ValueError("thresholds must be strictly increasing")
            if not (t[self.k - 1] <= 0.0 < t[self.k]):
                raise ValueError("level 0 must contain the input 0")
        elif self.kind not in ("sign", "uniform"):
            raise ValueError(f"unknown quantizer kind {self.kind!r}")

    def __call__(self, values) -> np.ndarray:
        """Quantize an array (or scalar) of finite reals to int64 levels."""
        v = np.asarray(values, dtype=np.float64)
        if self.kind == "sign":
            out = np.sign(v)
        elif self.kind == "uniform":
            # round half away from zero, then clamp to +-k
            out = np.sign(v) * np.floor(np.abs(v) / self.step + 0.5)
            out = np.clip(out, -self.k, self.k)
        else:
            t = np.asarray(self.thresholds, dtype=np.float64)
            out = np.searchsorted(t, v, side="right") - self.k
        return out.astype(np.int64)

    def spec(self) -> str:
        """Round-trippable textual form (used in CSV rows and CLI flags)."""
        if self.kind == "sign":
            return "sign"
        if self.kind == "uniform":
            return f"uniform:{self.k}:{self.step:g}"
        return f"custom[{2 * self.k} thresholds]"


def sign() -> Quantizer:
    """The sign function with sign(0) = 0; the extreme one-bit case (k = 1)."""
    return Quantizer(kind="sign", k=1)


def uniform(k: int, step: float) -> Quantizer:
    return Quantizer(kind="uniform", k=k, step=step)


def custom(thresholds) -> Quantizer:
    t = tuple(float(x) for x in thresholds)
    if len(t) % 2:
        raise ValueError("threshold count must be even")
    return Quantizer(kind="custom", k=len(t) // 2, thresholds=t)


def from_spec(text: str) -> Quantizer:
    """Parse the CLI syntax: ``sign`` or ``uniform:K:STEP``."""
    parts = text.strip().split(":")
    if parts == ["sign"]:
        return sign()
    if parts[0] == "uniform" and len(parts) == 3:
        try:
            return uniform(int(parts[1]), float(parts[2]))
        except ValueError as exc:
            raise ValueError(f"bad uniform quantizer spec {text!r}: {exc}") from exc
    raise ValueError(f"unknown quantizer spec {text!r} (expected 'sign' or 'uniform:K:STEP')")


def apply(q: Quantizer, s: Signal) -> IntSignal:
    """Quantize every stored sample; start and length are preserved."""
    return IntSignal(s.start, q(s.samples), bound=q.k)


def random_monotone(seed: int, k: int, levels: int | None = None, scale: float = 1.0) -> Quantizer:
    """Random custom quantizer for property testing.

    Thresholds are strictly increasing, straddle zero, and span roughly
    ``[-scale, scale]`` so signals of unit scale exercise several levels.
    ``levels`` caps the number of output levels (an odd count including 0);
    by default the depth is drawn at random in [1, k].
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    rng = np.random.default_rng(seed)
    if levels is None:
        depth = int(rng.integers(1, k + 1))
    else:
        depth = max(1, min(k, (levels - 1) // 2))
    # strictly increasing gaps, then recentre so zero falls inside the middle gap
    gaps = rng.uniform(0.05, 1.0, size=2 * depth)
    t = np.cumsum(gaps)
    t = t / t[-1] * 2.0 * scale
    zero_point = rng.uniform(t[depth - 1], t[depth])
    t = t - zero_point
    return custom(t)
