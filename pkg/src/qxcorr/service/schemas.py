"""Request/response models for the HTTP service."""

from __future__ import annotations

from typing import Literal

from pydantic import BaseModel, Field, model_validator


class SignalIn(BaseModel):
    """One input signal, supplied as exactly one of the three encodings.

    ``samples`` is an inline float list; ``wav_b64`` holds a base64 mono
    PCM16 WAV file; ``raw_b64`` holds base64 little-endian float32 frames.
    ``start`` anchors the first sample at an integer time index.
    """

    samples: list[float] | None = None
    wav_b64: str | None = None
    raw_b64: str | None = None
    start: int = 0

    @model_validator(mode="after")
    def _exactly_one_source(self):
        sources = sum(x is not None for x in (self.samples, self.wav_b64, self.raw_b64))
        if sources != 1:
            raise ValueError("provide exactly one of samples, wav_b64, raw_b64")
        return self


class EstimateRequest(BaseModel):
    ref: SignalIn
    query: SignalIn
    quantizer: str = "sign"
    method: Literal["ks", "bf"] = "ks"
    refine_ties: bool = True
    sample_rate: float | None = Field(default=None, gt=0)


class EstimateResponse(BaseModel):
    lags: list[int]
    peak_value_int: int | float
    tie_broken: bool
    tie_break_values: list[tuple[int, float]] = []
    method: str
    elapsed_seconds: float
    lags_seconds: list[float] | None = None


class BenchRequest(BaseModel):
    min_log2: int = 6
    max_log2: int = 14
    k_values: list[int] = [1, 16]
    seed: int = 0
    mul_backend: str = "auto"


class BenchRowOut(BaseModel):
    method: str
    n: int
    k: int | None
    trials: int
    mean_seconds: float
    stddev_seconds: float


class BenchResponse(BaseModel):
    rows: list[BenchRowOut]
    elapsed_seconds: float


class SimulateRequest(BaseModel):
    snr_db_list: list[float] = [-10.0, -5.0, 0.0, 5.0, 10.0]
    trials: int = 200
    seed: int = 0
    quantizer: str = "sign"
    target_len: int = 2048
    scene_len: int = 8192
    target_kind: str = "am_bursts"
    background_kind: str = "bandlimited"
    method: Literal["ks", "bf"] = "ks"
    sample_rate: float = 16000.0
    wav_dir: str | None = None
    threads: int | None = Field(default=None, ge=1)


class AccuracyRowOut(BaseModel):
    snr_db: float
    quantizer: str
    mode: str
    trials: int
    correct: int
    accuracy: float


class SimulateDiagnostics(BaseModel):
    tie_changed_fraction: dict[float, float]
    trial_errors: int


class SimulateResponse(BaseModel):
    rows: list[AccuracyRowOut]
    diagnostics: SimulateDiagnostics
    elapsed_seconds: float


class SelftestRequest(BaseModel):
    seed: int = 0


class SelftestSuite(BaseModel):
    name: str
    total: int
    failures: int
    elapsed_seconds: float


class SelftestResponse(BaseModel):
    passed: bool
    suites: list[SelftestSuite]
    elapsed_seconds: float
