"""HTTP facade over the estimation library.

Endpoints mirror the CLI subcommands one-to-one: /estimate wraps the
quantized estimator, /bench and /simulate wrap the experiment harnesses
(returning rows for the client to serialize), and /selftest runs the fast
invariant suites.  Library exceptions surface as JSON bodies of the form
{"error": <code>, "message": <detail>} with a matching HTTP status.
"""

from __future__ import annotations

import base64
import binascii
import time
from dataclasses import asdict

import numpy as np
from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from ..errors import (
    BadLength,
    ConfigError,
    DegenerateInput,
    DegenerateQuantization,
    InternalOverflow,
    ParseError,
    UnsupportedFormat,
)
from ..estimator import estimate
from ..harness import AccuracyConfig, BenchConfig, run_accuracy, run_bench, run_selftest
from ..quantize import from_spec
from ..signalgen import load_raw_bytes, load_wav_bytes
from ..signals import Signal
from .schemas import (
    AccuracyRowOut,
    BenchRequest,
    BenchResponse,
    BenchRowOut,
    EstimateRequest,
    EstimateResponse,
    SelftestRequest,
    SelftestResponse,
    SelftestSuite,
    SignalIn,
    SimulateDiagnostics,
    SimulateRequest,
    SimulateResponse,
)

_ERROR_STATUS = (
    (DegenerateQuantization, "degenerate_quantization", 422),
    (DegenerateInput, "degenerate_input", 422),
    (ParseError, "parse_error", 400),
    (UnsupportedFormat, "unsupported_format", 400),
    (ConfigError, "config_error", 400),
    (BadLength, "bad_length", 400),
    (InternalOverflow, "internal_overflow", 500),
)


def _decode_signal(spec: SignalIn) -> Signal:
    if spec.samples is not None:
        if not spec.samples:
            raise ParseError("sample list is empty")
        if not all(np.isfinite(spec.samples)):
            raise ParseError("samples contain non-finite values")
        return Signal(spec.start, np.asarray(spec.samples, dtype=np.float64))
    encoded = spec.wav_b64 if spec.wav_b64 is not None else spec.raw_b64
    try:
        data = base64.b64decode(encoded, validate=True)
    except binascii.Error as exc:
        raise ParseError(f"invalid base64 payload: {exc}") from exc
    decoded = load_wav_bytes(data) if spec.wav_b64 is not None else load_raw_bytes(data)
    if spec.start:
        return Signal(spec.start, decoded.samples)
    return decoded


def _parse_quantizer(text: str):
    try:
        return from_spec(text)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def create_app() -> FastAPI:
    app = FastAPI(title="qxcorr service", version="0.1.0")

    for exc_type, code, status in _ERROR_STATUS:

        def make_handler(code=code, status=status):
            async def handler(request: Request, exc: Exception) -> JSONResponse:
                return JSONResponse({"error": code, "message": str(exc)}, status_code=status)

            return handler

        app.add_exception_handler(exc_type, make_handler())

    @app.get("/healthz")
    async def healthz() -> dict:
        return {"status": "ok"}

    @app.post("/estimate", response_model=EstimateResponse)
    def post_estimate(req: EstimateRequest) -> EstimateResponse:
        x = _decode_signal(req.ref)
        y = _decode_signal(req.query)
        q = _parse_quantizer(req.quantizer)
        started = time.perf_counter()
        result = estimate(x, y, q, q, req.method, refine_ties=req.refine_ties)
        elapsed = time.perf_counter() - started
        lags_seconds = None
        if req.sample_rate is not None:
            lags_seconds = [lag / req.sample_rate for lag in result.lags]
        return EstimateResponse(
            lags=list(result.lags),
            peak_value_int=result.peak_value_int,
            tie_broken=result.tie_broken,
            tie_break_values=list(result.tie_break_values),
            method=result.method,
            elapsed_seconds=elapsed,
            lags_seconds=lags_seconds,
        )

    @app.post("/bench", response_model=BenchResponse)
    def post_bench(req: BenchRequest) -> BenchResponse:
        config = BenchConfig(
            min_log2=req.min_log2,
            max_log2=req.max_log2,
            k_values=tuple(req.k_values),
            seed=req.seed,
            mul_backend=req.mul_backend,
        )
        started = time.perf_counter()
        rows = run_bench(config)
        return BenchResponse(
            rows=[BenchRowOut(**asdict(r)) for r in rows],
            elapsed_seconds=time.perf_counter() - started,
        )

    @app.post("/simulate", response_model=SimulateResponse)
    def post_simulate(req: SimulateRequest) -> SimulateResponse:
        config = AccuracyConfig(
            snr_db_list=tuple(req.snr_db_list),
            trials=req.trials,
            seed=req.seed,
            quantizer_spec=req.quantizer,
            target_len=req.target_len,
            scene_len=req.scene_len,
            target_kind=req.target_kind,
            background_kind=req.background_kind,
            method=req.method,
            sample_rate=req.sample_rate,
            wav_dir=req.wav_dir,
            threads=req.threads,
        )
        started = time.perf_counter()
        rows, diagnostics = run_accuracy(config)
        return SimulateResponse(
            rows=[AccuracyRowOut(**asdict(r)) for r in rows],
            diagnostics=SimulateDiagnostics(**diagnostics),
            elapsed_seconds=time.perf_counter() - started,
        )

    @app.post("/selftest", response_model=SelftestResponse)
    def post_selftest(req: SelftestRequest) -> SelftestResponse:
        started = time.perf_counter()
        suites = run_selftest(req.seed)
        return SelftestResponse(
            passed=all(s["failures"] == 0 for s in suites),
            suites=[SelftestSuite(**s) for s in suites],
            elapsed_seconds=time.perf_counter() - started,
        )

    return app
