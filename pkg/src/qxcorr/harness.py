"""Batch experiment drivers: kernel timing and accuracy-vs-SNR, both CSV-backed.

The timing run compares four correlation kernels on freshly generated
inputs of each size: the integer fast path, the integer brute force, and
single-precision FFT / brute-force baselines.  Generation, quantization,
and wrapping all happen outside the timed region so a row measures nothing
but its kernel.

The accuracy run rebuilds the mixture experiment: a burst-like target hidden
in a band-limited background at a controlled SNR, estimated per trial by the
quantized pipeline (with and without tie refinement) and by the real-valued
baseline.  A trial counts as correct only when every returned lag is within
one sample of the truth.
"""

from __future__ import annotations

import csv
import logging
import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import ConfigError
from .estimator import argmax_set, estimate, estimate_real
from .intxcorr import xcorr_int_bf, xcorr_int_ks
from .quantize import Quantizer, apply, from_spec, random_monotone
from .realxcorr import ccf_bf_array, ccf_fft_array, xcorr_real_bf, xcorr_real_fft
from .signalgen import TrialSpec, gen_target, load_wav, make_trial
from .signals import IntSignal, Signal, crop, scale, shift

logger = logging.getLogger(__name__)

__all__ = [
    "BenchConfig",
    "BenchRow",
    "run_bench",
    "write_bench_csv",
    "AccuracyConfig",
    "AccuracyRow",
    "run_accuracy",
    "write_accuracy_csv",
    "run_selftest",
    "BENCH_HEADER",
    "ACCURACY_HEADER",
    "ACCURACY_MODES",
]

BENCH_HEADER = ("method", "N", "K", "trials", "mean_seconds", "stddev_seconds")
ACCURACY_HEADER = ("snr_db", "quantizer", "mode", "trials", "correct", "accuracy")
ACCURACY_MODES = ("proposed", "proposed_until_line4", "ccf_wo_quant")


# ---------------------------------------------------------------- timing run


@dataclass(frozen=True)
class BenchConfig:
    min_log2: int = 6
    max_log2: int = 14
    k_values: tuple[int, ...] = (1, 16)
    seed: int = 0
    mul_backend: str = "auto"

    def __post_init__(self):
        if self.min_log2 < 1 or self.max_log2 < self.min_log2:
            raise ConfigError("size range must satisfy 1 <= min_log2 <= max_log2")
        if self.max_log2 > 20:
            raise ConfigError("sizes above 2^20 are not supported by this harness")
        if not self.k_values or any(k < 1 for k in self.k_values):
            raise ConfigError("quantizer bounds K must be positive")


@dataclass(frozen=True)
class BenchRow:
    method: str
    n: int
    k: int | None  # None for the real-valued methods
    trials: int
    mean_seconds: float
    stddev_seconds: float


def _trial_count(n: int) -> int:
    return max(16, (1 << 16) // n)


def _time_kernel(prepare, run, trials: int) -> tuple[float, float]:
    # one extra leading run absorbs warm-up effects and is dropped
    measured = []
    for t in range(trials + 1):
        args = prepare(t)
        t0 = time.perf_counter()
        run(*args)
        measured.append(time.perf_counter() - t0)
    kept = measured[1:]
    mean = sum(kept) / len(kept)
    var = sum((v - mean) ** 2 for v in kept) / (len(kept) - 1)
    return mean, math.sqrt(var)


def _int_inputs(seed: int, log2n: int, k: int):
    n = 1 << log2n

    def prepare(t: int):
        rng = np.random.default_rng(np.random.SeedSequence([seed, log2n, 1, k, t]))
        arrays = []
        for _ in range(2):
            arr = rng.integers(-k, k + 1, size=n, dtype=np.int64)
            while not arr.any():  # the fast path refuses all-zero input
                arr = rng.integers(-k, k + 1, size=n, dtype=np.int64)
            arrays.append(arr)
        return IntSignal(0, arrays[0], bound=k), IntSignal(0, arrays[1], bound=k)

    return prepare


def _real_inputs(seed: int, log2n: int):
    n = 1 << log2n

    def prepare(t: int):
        rng = np.random.default_rng(np.random.SeedSequence([seed, log2n, 0, t]))
        xs = (rng.random(n, dtype=np.float32) * 2 - 1).astype(np.float32)
        ys = (rng.random(n, dtype=np.float32) * 2 - 1).astype(np.float32)
        return xs, ys

    return prepare


def run_bench(config: BenchConfig) -> list[BenchRow]:
    """Time each kernel at every size; single-threaded, one method at a time."""
    rows: list[BenchRow] = []
    for log2n in range(config.min_log2, config.max_log2 + 1):
        n = 1 << log2n
        trials = _trial_count(n)
        for method, kernel in (
            ("integer_ks", lambda u, v: xcorr_int_ks(u, v, mul_backend=config.mul_backend)),
            ("integer_bf", xcorr_int_bf),
        ):
            for k in config.k_values:
                mean, std = _time_kernel(_int_inputs(config.seed, log2n, k), kernel, trials)
                rows.append(BenchRow(method, n, k, trials, mean, std))
        for method, kernel in (("real_fft", ccf_fft_array), ("real_bf", ccf_bf_array)):
            mean, std = _time_kernel(_real_inputs(config.seed, log2n), kernel, trials)
            rows.append(BenchRow(method, n, None, trials, mean, std))
    return rows


def write_bench_csv(rows, path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(BENCH_HEADER)
        for r in rows:
            writer.writerow(
                [
                    r.method,
                    r.n,
                    "" if r.k is None else r.k,
                    r.trials,
                    repr(float(r.mean_seconds)),
                    repr(float(r.stddev_seconds)),
                ]
            )


# -------------------------------------------------------------- accuracy run


@dataclass(frozen=True)
class AccuracyConfig:
    snr_db_list: tuple[float, ...] = (-10.0, -5.0, 0.0, 5.0, 10.0)
    trials: int = 200
    seed: int = 0
    quantizer_spec: str = "sign"
    target_len: int = 2048
    scene_len: int = 8192
    target_kind: str = "am_bursts"
    background_kind: str = "bandlimited"
    method: str = "ks"
    sample_rate: float = 16000.0
    wav_dir: str | None = None
    threads: int | None = None

    def __post_init__(self):
        if not self.snr_db_list:
            raise ConfigError("at least one SNR value is required")
        if self.trials < 1:
            raise ConfigError("trial count must be positive")
        if self.target_len < 1 or self.scene_len < self.target_len:
            raise ConfigError("need scene_len >= target_len >= 1")
        if self.method not in ("ks", "bf"):
            raise ConfigError(f"unknown integer correlation method {self.method!r}")
        try:
            from_spec(self.quantizer_spec)
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc


@dataclass(frozen=True)
class AccuracyRow:
    snr_db: float
    quantizer: str
    mode: str
    trials: int
    correct: int
    accuracy: float


def _thread_budget(requested: int | None) -> int:
    if requested is not None:
        if requested < 1:
            raise ConfigError("thread count must be positive")
        return requested
    machine = os.cpu_count() or 1
    cap = os.environ.get("QXCORR_THREADS")
    if cap:
        try:
            return max(1, min(int(cap), machine))
        except ValueError as exc:
            raise ConfigError("QXCORR_THREADS must be an integer") from exc
    return machine


def _scan_wav_dir(wav_dir: str):
    root = Path(wav_dir)
    targets = sorted(str(p) for p in (root / "targets").glob("*.wav"))
    backgrounds = sorted(str(p) for p in (root / "backgrounds").glob("*.wav"))
    if not targets or not backgrounds:
        raise ConfigError("wav dir needs targets/*.wav and backgrounds/*.wav")
    return targets, backgrounds


def _accuracy_trial(config: AccuracyConfig, q: Quantizer, snr_idx: int, trial_idx: int, wav_lists):
    """One trial -> (correct per mode ..., tie refinement changed, errored)."""
    seq = np.random.SeedSequence([config.seed, snr_idx, trial_idx])
    rng = np.random.default_rng(seq)
    delay = float(rng.uniform(0.0, config.scene_len - config.target_len))
    target_seed = int(rng.integers(0, 2**63))
    background_seed = int(rng.integers(0, 2**63))
    spec = TrialSpec(
        seed=target_seed,
        target_len=config.target_len,
        scene_len=config.scene_len,
        true_delay=delay,
        snr_db=config.snr_db_list[snr_idx],
        quantizer_spec=config.quantizer_spec,
        sample_rate=config.sample_rate,
        target_kind=config.target_kind,
    )
    try:
        if wav_lists is None:
            background = gen_target(background_seed, config.scene_len, config.background_kind)
            x, y, nu_true = make_trial(spec, background)
        else:
            target_paths, background_paths = wav_lists
            target = crop(load_wav(target_paths[int(rng.integers(len(target_paths)))]), 0, config.target_len)
            background = crop(
                load_wav(background_paths[int(rng.integers(len(background_paths)))]), 0, config.scene_len
            )
            x, y, nu_true = make_trial(spec, background, target=target)

        quantized = estimate(x, y, q, q, config.method)
        if quantized.tie_broken:
            raw_lags = tuple(lag for lag, _ in quantized.tie_break_values)
        else:
            raw_lags = quantized.lags
        baseline = estimate_real(x, y, "fft")
    except Exception as exc:
        logger.warning("trial %d at %g dB failed: %s", trial_idx, config.snr_db_list[snr_idx], exc)
        return False, False, False, False, True

    def all_close(lags) -> bool:
        return all(abs(lag - nu_true) < 1.0 for lag in lags)

    tie_changed = quantized.lags != raw_lags
    return all_close(quantized.lags), all_close(raw_lags), all_close(baseline.lags), tie_changed, False


def run_accuracy(config: AccuracyConfig) -> tuple[list[AccuracyRow], dict]:
    """Score the three estimation modes over the SNR grid.

    Returns the CSV rows plus a diagnostics mapping with the per-SNR
    fraction of trials where tie refinement changed the returned lag set
    and the count of trials that errored (counted as incorrect).
    """
    q = from_spec(config.quantizer_spec)
    wav_lists = _scan_wav_dir(config.wav_dir) if config.wav_dir else None
    threads = _thread_budget(config.threads)
    rows: list[AccuracyRow] = []
    tie_changed_fraction: dict[float, float] = {}
    trial_errors = 0
    for snr_idx, snr_db in enumerate(config.snr_db_list):
        def one(trial_idx: int):
            return _accuracy_trial(config, q, snr_idx, trial_idx, wav_lists)

        if threads > 1:
            with ThreadPoolExecutor(max_workers=threads) as pool:
                results = list(pool.map(one, range(config.trials)))
        else:
            results = [one(t) for t in range(config.trials)]
        correct = [0, 0, 0]
        changed = 0
        for ok_proposed, ok_raw, ok_baseline, tie_changed, errored in results:
            correct[0] += ok_proposed
            correct[1] += ok_raw
            correct[2] += ok_baseline
            changed += tie_changed
            trial_errors += errored
        for mode, n_correct in zip(ACCURACY_MODES, correct):
            rows.append(
                AccuracyRow(
                    snr_db=float(snr_db),
                    quantizer=config.quantizer_spec,
                    mode=mode,
                    trials=config.trials,
                    correct=int(n_correct),
                    accuracy=n_correct / config.trials,
                )
            )
        tie_changed_fraction[float(snr_db)] = changed / config.trials
    diagnostics = {"tie_changed_fraction": tie_changed_fraction, "trial_errors": trial_errors}
    return rows, diagnostics


def write_accuracy_csv(rows, path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(ACCURACY_HEADER)
        for r in rows:
            writer.writerow(
                [
                    repr(float(r.snr_db)),
                    r.quantizer,
                    r.mode,
                    r.trials,
                    r.correct,
                    repr(float(r.accuracy)),
                ]
            )


# ------------------------------------------------------------------ selftest


def _selftest_peak_invariance(seed: int, cases: int) -> int:
    """Noise-free shifted pairs keep the true lag in the quantized argmax set."""
    failures = 0
    for case in range(cases):
        rng = np.random.default_rng(np.random.SeedSequence([seed, 11, case]))
        for attempt in range(64):
            n = int(rng.integers(8, 513))
            nu = int(rng.integers(-256, 257))
            a = float(rng.uniform(1e-3, 10.0))
            y = Signal(int(rng.integers(-64, 65)), rng.standard_normal(n))
            x = scale(shift(y, nu), a)
            qx = random_monotone(int(rng.integers(0, 2**63)), k=int(rng.integers(1, 17)))
            qy = random_monotone(int(rng.integers(0, 2**63)), k=int(rng.integers(1, 17)))
            u, v = apply(qx, x), apply(qy, y)
            if u.samples.any() and v.samples.any():
                break
        else:  # pragma: no cover - quantizers straddle 0, redraws all but never exhaust
            failures += 1
            continue
        if nu not in argmax_set(xcorr_int_ks(u, v)):
            failures += 1
    return failures


def _selftest_int_paths(seed: int, cases: int) -> int:
    failures = 0
    for case in range(cases):
        rng = np.random.default_rng(np.random.SeedSequence([seed, 13, case]))
        k = int(rng.integers(1, 17))
        n_u = int(rng.integers(1, 513))
        n_v = int(rng.integers(1, 513))
        u = IntSignal(int(rng.integers(-16, 17)), rng.integers(-k, k + 1, size=n_u), bound=k)
        v = IntSignal(int(rng.integers(-16, 17)), rng.integers(-k, k + 1, size=n_v), bound=k)
        if not (u.samples.any() and v.samples.any()):
            continue
        if xcorr_int_ks(u, v) != xcorr_int_bf(u, v):
            failures += 1
    return failures


def _selftest_fft_vs_bf(seed: int, cases: int) -> int:
    failures = 0
    for case in range(cases):
        rng = np.random.default_rng(np.random.SeedSequence([seed, 17, case]))
        x = Signal(0, rng.standard_normal(int(rng.integers(2, 1025))))
        y = Signal(0, rng.standard_normal(int(rng.integers(2, 1025))))
        fast = xcorr_real_fft(x, y)
        slow = xcorr_real_bf(x, y)
        bound = 1e-9 * fast.norm_x * fast.norm_y
        if fast.first_lag != slow.first_lag or np.abs(fast.values - slow.values).max() > bound:
            failures += 1
    return failures


def run_selftest(seed: int = 0) -> list[dict]:
    """Fast invariant suites; each entry reports name, case count, failures."""
    suites = (
        ("monotone-peak-invariance", _selftest_peak_invariance, 100),
        ("integer-fast-path-equivalence", _selftest_int_paths, 100),
        ("fft-baseline-equivalence", _selftest_fft_vs_bf, 20),
    )
    results = []
    for name, fn, cases in suites:
        started = time.perf_counter()
        failures = fn(seed, cases)
        results.append(
            {
                "name": name,
                "total": cases,
                "failures": failures,
                "elapsed_seconds": time.perf_counter() - started,
            }
        )
    return results
