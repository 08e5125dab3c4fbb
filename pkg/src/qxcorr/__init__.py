"""Exact time-difference estimation from integer-quantized signals.

Quantize two real signals with monotone integer maps, cross-correlate the
integer sequences exactly (optionally through a single big-integer
multiplication), and read the time difference off the peak lag set —
refining rare ties against the original real-valued correlation.
"""

from .errors import (
    BadLength,
    ConfigError,
    DegenerateInput,
    DegenerateQuantization,
    InternalOverflow,
    ParseError,
    QxcorrError,
    UnsupportedFormat,
)
from .estimator import EstimationResult, argmax_set, estimate, estimate_real
from .harness import (
    ACCURACY_HEADER,
    ACCURACY_MODES,
    BENCH_HEADER,
    AccuracyConfig,
    AccuracyRow,
    BenchConfig,
    BenchRow,
    run_accuracy,
    run_bench,
    run_selftest,
    write_accuracy_csv,
    write_bench_csv,
)
from .intxcorr import (
    MUL_BACKENDS,
    KSPlan,
    big_mul,
    pack,
    plan_ks,
    unpack_and_correct,
    xcorr_int_bf,
    xcorr_int_ks,
)
from .quantize import Quantizer, apply, custom, from_spec, random_monotone, sign, uniform
from .realxcorr import fft, xcorr_real_at, xcorr_real_bf, xcorr_real_fft
from .signalgen import (
    TrialSpec,
    gen_target,
    load_raw,
    load_raw_bytes,
    load_wav,
    load_wav_bytes,
    make_trial,
    mix_at_snr,
    sinc_shift,
    write_wav,
)
from .signals import Correlogram, IntSignal, Signal, add, crop, l2_norm, reverse, scale, shift, trim

__version__ = "0.1.0"

__all__ = [
    "QxcorrError",
    "DegenerateInput",
    "DegenerateQuantization",
    "InternalOverflow",
    "BadLength",
    "ParseError",
    "UnsupportedFormat",
    "ConfigError",
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
    "Quantizer",
    "sign",
    "uniform",
    "custom",
    "from_spec",
    "apply",
    "random_monotone",
    "KSPlan",
    "xcorr_int_bf",
    "xcorr_int_ks",
    "plan_ks",
    "pack",
    "big_mul",
    "unpack_and_correct",
    "MUL_BACKENDS",
    "fft",
    "xcorr_real_bf",
    "xcorr_real_fft",
    "xcorr_real_at",
    "EstimationResult",
    "argmax_set",
    "estimate",
    "estimate_real",
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
    "__version__",
]
