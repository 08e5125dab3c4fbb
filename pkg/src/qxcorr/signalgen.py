"""Experiment inputs: synthetic targets, fractional delay, SNR mixing, audio files."""

from __future__ import annotations

import io
import math
import wave
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import DegenerateInput, ParseError, UnsupportedFormat
from .signals import Signal, add, crop, l2_norm, scale, shift

__all__ = [
    "TrialSpec",
    "gen_target",
    "sinc_shift",
    "mix_at_snr",
    "make_trial",
    "load_wav",
    "load_wav_bytes",
    "load_raw",
    "load_raw_bytes",
    "write_wav",
]


@dataclass(frozen=True)
class TrialSpec:
    """One accuracy-experiment trial: geometry, noise level, and seeds."""

    seed: int
    target_len: int
    scene_len: int
    true_delay: float  # samples; may be fractional
    snr_db: float
    quantizer_spec: str = "sign"
    sample_rate: float = 16000.0
    target_kind: str = "am_bursts"

    def __post_init__(self):
        if self.target_len < 1:
            raise ValueError("target_len must be >= 1")
        if self.scene_len < self.target_len:
            raise ValueError("scene must be at least as long as the target")
        if not 0.0 <= self.true_delay <= self.scene_len - self.target_len:
            raise ValueError("true_delay must keep the target inside the scene")


def _bandlimited(rng: np.random.Generator, length: int, band: tuple[float, float]) -> np.ndarray:
    freqs = np.fft.rfftfreq(length)
    mask = (freqs >= band[0]) & (freqs <= band[1])
    if not mask.any():
        raise ValueError(f"length {length} has no DFT bins inside band {band}")
    spectrum = np.fft.rfft(rng.standard_normal(length)) * mask
    return np.fft.irfft(spectrum, length)


def _unit_rms(samples: np.ndarray) -> np.ndarray:
    return samples / math.sqrt(np.mean(samples * samples))


def gen_target(seed: int, length: int, kind: str = "white", *, band=(0.02, 0.2)) -> Signal:
    """Deterministic pseudo-random test signal at unit RMS, anchored at 0.

    Kinds: "white" (Gaussian), "bandlimited" (white noise masked to
    ``band`` in cycles/sample), "am_bursts" (band-limited carrier under a
    random burst envelope, mimicking speech-like on/off structure).
    """
    if length < 1:
        raise ValueError("length must be >= 1")
    rng = np.random.default_rng(seed)
    if kind == "white":
        samples = rng.standard_normal(length)
    elif kind == "bandlimited":
        samples = _bandlimited(rng, length, band)
    elif kind == "am_bursts":
        carrier = _bandlimited(rng, length, band)
        envelope = np.zeros(length)
        for _ in range(max(1, length // 512)):
            width = max(3, int(round(rng.uniform(length / 16, length / 4))))
            center = rng.uniform(0, length)
            amp = rng.uniform(0.3, 1.0)
            lo = int(round(center - width / 2))
            bump = amp * np.hanning(width)
            a = max(0, lo)
            b = min(length, lo + width)
            if a < b:
                envelope[a:b] += bump[a - lo : b - lo]
        samples = carrier * envelope
        if not samples.any():  # all bursts clipped away; keep the carrier
            samples = carrier
    else:
        raise ValueError(f"unknown target kind {kind!r}")
    return Signal(0, _unit_rms(samples))


def sinc_shift(s: Signal, d: float, *, half_width: int = 64) -> Signal:
    """Fractional delay: result[n] ~= s[n + d], windowed-sinc interpolated.

    Integer ``d`` is exact (pure index relabeling).  Fractional shifts use
    2*half_width Hann-windowed sinc taps per output sample with
    zero-extension beyond the stored run, so the result is half_width wider
    on each side.
    """
    whole = math.floor(d)
    frac = float(d) - whole
    if frac == 0.0:
        return shift(s, int(whole))
    w = half_width
    u = frac - np.arange(-w + 1, w + 1)  # tap offsets, |u|/w < 1
    taps = np.sinc(u) * (0.5 + 0.5 * np.cos(np.pi * u / w))
    out = np.convolve(s.samples, taps[::-1])
    return Signal(s.start - whole - w, out)


def mix_at_snr(target: Signal, background: Signal, snr_db: float) -> Signal:
    """target + g*background with g set so the per-unit-time energy ratio
    (||target||^2/len) / (g^2*||background||^2/len) equals 10^(snr_db/10)."""
    e_t = l2_norm(target) ** 2
    e_b = l2_norm(background) ** 2
    if e_t == 0.0 or e_b == 0.0:
        raise DegenerateInput("cannot set an SNR against an all-zero signal")
    g = math.sqrt((e_t / len(target)) / (e_b / len(background))) * 10.0 ** (-snr_db / 20.0)
    return add(target, scale(background, g))


def make_trial(spec: TrialSpec, background: Signal, target: Signal | None = None):
    """Build one (x, y, true lag) triple.

    y is the target; x is the scene: the target placed ``true_delay``
    samples into the background, mixed at ``snr_db`` and cropped to
    ``scene_len``.  The returned truth is the lag at which the
    cross-correlation of (x, y) peaks, i.e. -true_delay.
    """
    if len(background) < spec.scene_len:
        raise DegenerateInput("background is shorter than the scene")
    if target is None:
        target = gen_target(spec.seed, spec.target_len, spec.target_kind)
    elif len(target) != spec.target_len:
        raise DegenerateInput("supplied target does not match target_len")
    placed = sinc_shift(target, -spec.true_delay)
    scene_bg = crop(background, 0, spec.scene_len)
    x = crop(mix_at_snr(placed, scene_bg, spec.snr_db), 0, spec.scene_len)
    return x, target, -float(spec.true_delay)


def load_wav_bytes(data: bytes) -> Signal:
    """Decode mono 16-bit PCM WAV content to samples in [-1, 1)."""
    try:
        with wave.open(io.BytesIO(data), "rb") as wf:
            channels = wf.getnchannels()
            width = wf.getsampwidth()
            frames = wf.readframes(wf.getnframes())
    except wave.Error as exc:
        if "unknown format" in str(exc):
            raise UnsupportedFormat(f"WAV encoding not supported: {exc}") from exc
        raise ParseError(f"not a readable WAV file: {exc}") from exc
    except EOFError as exc:
        raise ParseError("WAV file is truncated") from exc
    if channels != 1:
        raise UnsupportedFormat(f"expected mono audio, got {channels} channels")
    if width != 2:
        raise UnsupportedFormat(f"expected 16-bit PCM, got {8 * width}-bit")
    if len(frames) < 2:
        raise ParseError("WAV file holds no samples")
    if len(frames) % 2:
        raise ParseError("WAV data chunk is truncated mid-sample")
    samples = np.frombuffer(frames, dtype="<i2").astype(np.float64) / 32768.0
    return Signal(0, samples)


def load_wav(path) -> Signal:
    return load_wav_bytes(Path(path).read_bytes())


def write_wav(path, s: Signal, sample_rate: float = 16000.0) -> None:
    """Write samples as mono PCM16; values are clipped to [-1, 1)."""
    ints = np.clip(np.round(s.samples * 32768.0), -32768, 32767).astype("<i2")
    with wave.open(str(path), "wb") as wf:
        wf.setnchannels(1)
        wf.setsampwidth(2)
        wf.setframerate(int(sample_rate))
        wf.writeframes(ints.tobytes())


def load_raw_bytes(data: bytes) -> Signal:
    """Decode a headerless stream of little-endian 32-bit floats."""
    if not data or len(data) % 4:
        raise ParseError("raw stream length must be a positive multiple of 4 bytes")
    samples = np.frombuffer(data, dtype="<f4").astype(np.float64)
    if not np.all(np.isfinite(samples)):
        raise ParseError("raw stream contains non-finite values")
    return Signal(0, samples)


def load_raw(path) -> Signal:
    return load_raw_bytes(Path(path).read_bytes())
