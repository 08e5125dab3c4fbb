"""Exact integer cross-correlation: brute force and a Kronecker fast path.

The cross-correlation of two integer sequences equals the convolution of one
with the time reversal of the other, and convolution is polynomial
multiplication.  Kronecker substitution evaluates both polynomials at 2**L
with L wide enough that coefficients of the product cannot collide, so the
whole correlation collapses into ONE big-integer multiplication followed by
slot extraction.

Signed coefficients are handled by bias rather than borrow-propagating limb
extraction: each coefficient c in [-K, K] is packed as c + K in [0, 2K], and
the three bias cross-terms are removed afterwards with O(N) sliding-window
sums.  That costs one extra bit per slot over the signed-coefficient bound
and keeps unpacking branch-free.

Everything here is exact; the brute-force path doubles as the oracle for the
fast one.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateInput, InternalOverflow
from .signals import Correlogram, IntSignal, l2_norm, reverse

try:
    import gmpy2

    _HAVE_GMPY2 = True
except ImportError:  # pragma: no cover - present in the normal install
    _HAVE_GMPY2 = False

__all__ = [
    "KSPlan",
    "xcorr_int_bf",
    "plan_ks",
    "pack",
    "big_mul",
    "unpack_and_correct",
    "xcorr_int_ks",
    "MUL_BACKENDS",
]

# Correlation values are materialized as int64; the provable coefficient
# bound N_min * K_u * K_v must leave two bits of headroom for the biased
# slots (4x) and the correction arithmetic.
_MAX_COEFF_BOUND = 1 << 59

MUL_BACKENDS = ("auto", "gmp", "native", "karatsuba", "schoolbook")


@dataclass(frozen=True)
class KSPlan:
    """Packing geometry for one correlation: slot width and bias terms."""

    slot_bits: int  # L: bits per packed coefficient slot
    n_min: int      # min(len_u, len_v): max overlap count
    k_u: int
    k_v: int

    def __post_init__(self):
        if self.slot_bits < 1:
            raise ValueError("slot_bits must be >= 1")
        # one bit beyond the signed-coefficient bound, for the nonnegative bias path
        if (1 << self.slot_bits) <= 4 * self.n_min * self.k_u * self.k_v:
            raise ValueError("slot width too narrow for biased coefficients")

    @property
    def bias_u(self) -> int:
        return self.k_u

    @property
    def bias_v(self) -> int:
        return self.k_v

    @property
    def coeff_bound(self) -> int:
        """Largest possible |correlation value|: N_min * K_u * K_v."""
        return self.n_min * self.k_u * self.k_v


def _first_lag(u: IntSignal, v: IntSignal) -> int:
    return v.start - (u.start + len(u) - 1)


def _check_coeff_bound(n_min: int, k_u: int, k_v: int) -> None:
    if n_min * k_u * k_v > _MAX_COEFF_BOUND:
        raise ValueError(
            "coefficient bound N_min*K_u*K_v exceeds the supported int64 range"
        )


def xcorr_int_bf(u: IntSignal, v: IntSignal) -> Correlogram:
    """Direct O(N^2) evaluation of sum_m u[m] * v[m+n] over all overlap lags."""
    _check_coeff_bound(min(len(u), len(v)), max(u.bound, 1), max(v.bound, 1))
    values = np.correlate(v.samples, u.samples, mode="full")
    return Correlogram(_first_lag(u, v), values, norm_x=l2_norm(u), norm_y=l2_norm(v))


def plan_ks(u: IntSignal, v: IntSignal) -> KSPlan:
    """Choose the slot width for one u*v correlation.

    L = floor(log2(N_min * K_u * K_v)) + 3, which guarantees
    2**L > 4 * N_min * K_u * K_v so biased slots cannot collide.
    """
    if not u.samples.any() or not v.samples.any():
        raise DegenerateInput("cannot plan a Kronecker correlation for an all-zero signal")
    k_u, k_v = u.bound, v.bound  # >= 1 whenever content is nonzero
    n_min = min(len(u), len(v))
    _check_coeff_bound(n_min, k_u, k_v)
    slot_bits = (n_min * k_u * k_v).bit_length() - 1 + 3
    return KSPlan(slot_bits=slot_bits, n_min=n_min, k_u=k_u, k_v=k_v)


def _combine_base2(parts: list[int], slot_bits: int) -> int:
    """sum(parts[i] << (slot_bits * i)) by pairwise merging, O(total log n)."""
    items = [(p, 1) for p in parts]
    while len(items) > 1:
        merged = []
        for i in range(0, len(items) - 1, 2):
            lo, n_lo = items[i]
            hi, n_hi = items[i + 1]
            merged.append((lo + (hi << (slot_bits * n_lo)), n_lo + n_hi))
        if len(items) & 1:
            merged.append(items[-1])
        items = merged
    return items[0][0]


def pack(w: IntSignal, plan: KSPlan, *, bias: int) -> int:
    """Evaluate sum_n (w[n] + bias) * 2**(L*n) as one big natural number.

    Every biased slot must land in [0, 2**L); the caller passes the bias for
    w's side of the plan (its magnitude bound).
    """
    shifted = w.samples + np.int64(bias)
    if shifted.size and (int(shifted.min()) < 0 or int(shifted.max()) >> plan.slot_bits):
        raise InternalOverflow("biased coefficient does not fit its slot")
    return _combine_base2(shifted.tolist(), plan.slot_bits)


def _karatsuba_mul(a: int, b: int, cutoff_bits: int = 2048) -> int:
    n = max(a.bit_length(), b.bit_length())
    if n <= cutoff_bits:
        return a * b
    half = n >> 1
    mask = (1 << half) - 1
    a_hi, a_lo = a >> half, a & mask
    b_hi, b_lo = b >> half, b & mask
    z2 = _karatsuba_mul(a_hi, b_hi, cutoff_bits)
    z0 = _karatsuba_mul(a_lo, b_lo, cutoff_bits)
    z1 = _karatsuba_mul(a_hi + a_lo, b_hi + b_lo, cutoff_bits) - z2 - z0
    return (z2 << (2 * half)) + (z1 << half) + z0


_LIMB_BITS = 30
_LIMB_MASK = (1 << _LIMB_BITS) - 1


def _to_limbs(a: int) -> list[int]:
    limbs = []
    while True:
        limbs.append(a & _LIMB_MASK)
        a >>= _LIMB_BITS
        if not a:
            return limbs


def _schoolbook_mul(a: int, b: int) -> int:
    """Quadratic limb-by-limb product; the reference oracle for the fast backends."""
    al, bl = _to_limbs(a), _to_limbs(b)
    acc = [0] * (len(al) + len(bl))
    for i, x in enumerate(al):
        if x:
            for j, y in enumerate(bl):
                acc[i + j] += x * y
    return _combine_base2(acc, _LIMB_BITS)


def big_mul(a: int, b: int, backend: str = "auto") -> int:
    """Exact product of two big integers.

    The default backend is sub-quadratic: GMP when available, otherwise the
    interpreter's divide-and-conquer multiplication.  "karatsuba" is an
    explicit recursive splitting, "schoolbook" the quadratic baseline; all
    backends return identical values.
    """
    if backend == "auto":
        backend = "gmp" if _HAVE_GMPY2 else "native"
    if backend == "gmp":
        if not _HAVE_GMPY2:
            raise ValueError("gmp backend requested but gmpy2 is not installed")
        return int(gmpy2.mpz(a) * gmpy2.mpz(b))
    if backend == "native":
        return a * b
    sign = -1 if (a < 0) != (b < 0) else 1
    a, b = abs(a), abs(b)
    if backend == "karatsuba":
        return sign * _karatsuba_mul(a, b)
    if backend == "schoolbook":
        return sign * _schoolbook_mul(a, b)
    raise ValueError(f"unknown multiplication backend {backend!r}")


def _extract_slots(p: int, slot_bits: int, count: int) -> np.ndarray:
    """Read ``count`` nonnegative slot_bits-wide slots out of the packed product."""
    buf = p.to_bytes((slot_bits * count + 7) // 8 + 8, "little")
    mask = (1 << slot_bits) - 1
    window = (slot_bits + 14) // 8 + 1  # covers slot_bits + 7 shift bits
    out = np.empty(count, dtype=np.int64)
    for n in range(count):
        bit = slot_bits * n
        byte0 = bit >> 3
        chunk = int.from_bytes(buf[byte0 : byte0 + window], "little")
        out[n] = (chunk >> (bit & 7)) & mask
    return out


def _window_sums(prefix: np.ndarray, lo: np.ndarray, hi: np.ndarray) -> np.ndarray:
    return prefix[hi + 1] - prefix[lo]


def unpack_and_correct(p: int, plan: KSPlan, u: IntSignal, v: IntSignal) -> Correlogram:
    """Recover the exact signed correlation from the packed product.

    The slots of ``p`` hold the convolution of the biased sequences
    (reverse(u) + B_u) and (v + B_v).  Subtracting the three bias
    cross-terms -- each a sliding-window sum computable from prefix sums --
    leaves the true correlation values.
    """
    n_u, n_v = len(u), len(v)
    count = n_u + n_v - 1
    slots = _extract_slots(p, plan.slot_bits, count)

    u_rev = u.samples[::-1]
    prefix_u = np.concatenate(([0], np.cumsum(u_rev, dtype=np.int64)))
    prefix_v = np.concatenate(([0], np.cumsum(v.samples, dtype=np.int64)))

    t = np.arange(count)
    i_lo = np.maximum(0, t - n_v + 1)
    i_hi = np.minimum(n_u - 1, t)
    j_lo = np.maximum(0, t - n_u + 1)
    j_hi = np.minimum(n_v - 1, t)

    values = (
        slots
        - plan.bias_v * _window_sums(prefix_u, i_lo, i_hi)
        - plan.bias_u * _window_sums(prefix_v, j_lo, j_hi)
        - plan.bias_u * plan.bias_v * (i_hi - i_lo + 1)
    )
    if int(np.abs(values).max()) > plan.coeff_bound:
        raise InternalOverflow("corrected coefficient exceeds N_min*K_u*K_v")
    return Correlogram(_first_lag(u, v), values, norm_x=l2_norm(u), norm_y=l2_norm(v))


def xcorr_int_ks(u: IntSignal, v: IntSignal, mul_backend: str = "auto") -> Correlogram:
    """Cross-correlation via one big-integer multiplication; bit-identical to
    :func:`xcorr_int_bf` on every input."""
    plan = plan_ks(u, v)
    a = pack(reverse(u), plan, bias=plan.bias_u)
    b = pack(v, plan, bias=plan.bias_v)
    return unpack_and_correct(big_mul(a, b, backend=mul_backend), plan, u, v)
