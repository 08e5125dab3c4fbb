import base64
import io
import wave

import numpy as np
import pytest
from starlette.testclient import TestClient

from qxcorr.service import create_app


@pytest.fixture(scope="module")
def client():
    return TestClient(create_app())


def _wav_b64(samples, rate=16000) -> str:
    ints = np.clip(np.round(np.asarray(samples) * 32768.0), -32768, 32767).astype("<i2")
    bio = io.BytesIO()
    with wave.open(bio, "wb") as wf:
        wf.setnchannels(1)
        wf.setsampwidth(2)
        wf.setframerate(rate)
        wf.writeframes(ints.tobytes())
    return base64.b64encode(bio.getvalue()).decode()


def _shifted_pair(d=12, n=128, seed=0):
    rng = np.random.default_rng(seed)
    x = rng.standard_normal(n)
    return list(x), {"samples": list(x), "start": d}


def test_healthz(client):
    r = client.get("/healthz")
    assert r.status_code == 200
    assert r.json() == {"status": "ok"}


def test_estimate_inline_samples(client):
    x, y = _shifted_pair(d=12)
    r = client.post("/estimate", json={"ref": {"samples": x}, "query": y})
    assert r.status_code == 200
    body = r.json()
    assert body["lags"] == [12]
    assert body["method"] == "ks"
    assert body["tie_broken"] is False
    assert isinstance(body["peak_value_int"], int)
    assert body["elapsed_seconds"] > 0
    assert body["lags_seconds"] is None


def test_estimate_sample_rate_converts_lags(client):
    x, y = _shifted_pair(d=16)
    r = client.post(
        "/estimate",
        json={"ref": {"samples": x}, "query": y, "sample_rate": 8000.0},
    )
    assert r.json()["lags_seconds"] == [16 / 8000.0]


def test_estimate_methods_agree(client):
    x, y = _shifted_pair(d=-9, seed=3)
    lags = {}
    for method in ("ks", "bf"):
        r = client.post(
            "/estimate",
            json={"ref": {"samples": x}, "query": y, "method": method, "quantizer": "uniform:4:0.5"},
        )
        assert r.status_code == 200
        lags[method] = r.json()["lags"]
        assert r.json()["method"] == method
    assert lags["ks"] == lags["bf"] == [-9]


def test_estimate_tie_break_reported(client):
    r = client.post(
        "/estimate",
        json={"ref": {"samples": [1.0]}, "query": {"samples": [1.0, 0.5]}},
    )
    body = r.json()
    assert body["tie_broken"] is True
    assert body["lags"] == [0]
    assert body["tie_break_values"] == [[0, 1.0], [1, 0.5]]


def test_estimate_wav_payload(client):
    rng = np.random.default_rng(1)
    x = rng.uniform(-0.9, 0.9, size=200)
    r = client.post(
        "/estimate",
        json={
            "ref": {"wav_b64": _wav_b64(x)},
            "query": {"wav_b64": _wav_b64(x), "start": 31},
        },
    )
    assert r.status_code == 200
    assert r.json()["lags"] == [31]


def test_estimate_raw_payload(client):
    rng = np.random.default_rng(2)
    x = rng.standard_normal(150).astype("<f4")
    payload = base64.b64encode(x.tobytes()).decode()
    r = client.post(
        "/estimate",
        json={"ref": {"raw_b64": payload}, "query": {"raw_b64": payload, "start": -7}},
    )
    assert r.status_code == 200
    assert r.json()["lags"] == [-7]


def test_signal_source_must_be_exactly_one(client):
    x, _ = _shifted_pair()
    for bad in ({}, {"samples": x, "raw_b64": "AAAA"}):
        r = client.post("/estimate", json={"ref": bad, "query": {"samples": x}})
        assert r.status_code == 422


def test_degenerate_quantization_maps_to_422(client):
    quiet = [0.001, -0.002, 0.003]
    r = client.post(
        "/estimate",
        json={
            "ref": {"samples": quiet},
            "query": {"samples": quiet},
            "quantizer": "uniform:4:1",
        },
    )
    assert r.status_code == 422
    body = r.json()
    assert body["error"] == "degenerate_quantization"
    assert "zeros" in body["message"]


def test_parse_errors_map_to_400(client):
    x, y = _shifted_pair()
    cases = [
        {"ref": {"wav_b64": "%%%not-base64%%%"}, "query": y},
        {"ref": {"wav_b64": base64.b64encode(b"definitely not audio").decode()}, "query": y},
        {"ref": {"samples": []}, "query": y},
        {"ref": {"raw_b64": base64.b64encode(b"\x01\x02\x03").decode()}, "query": y},
    ]
    for payload in cases:
        r = client.post("/estimate", json=payload)
        assert r.status_code == 400
        assert r.json()["error"] == "parse_error"


def test_unsupported_format_maps_to_400(client):
    bio = io.BytesIO()
    with wave.open(bio, "wb") as wf:
        wf.setnchannels(2)
        wf.setsampwidth(2)
        wf.setframerate(16000)
        wf.writeframes(np.zeros(64, "<i2").tobytes())
    stereo = base64.b64encode(bio.getvalue()).decode()
    x, y = _shifted_pair()
    r = client.post("/estimate", json={"ref": {"wav_b64": stereo}, "query": y})
    assert r.status_code == 400
    assert r.json()["error"] == "unsupported_format"


def test_config_errors_map_to_400(client):
    x, y = _shifted_pair()
    r = client.post(
        "/estimate", json={"ref": {"samples": x}, "query": y, "quantizer": "tanh"}
    )
    assert r.status_code == 400
    assert r.json()["error"] == "config_error"

    r = client.post("/bench", json={"min_log2": 9, "max_log2": 6})
    assert r.status_code == 400
    assert r.json()["error"] == "config_error"


def test_bench_endpoint(client):
    r = client.post("/bench", json={"min_log2": 6, "max_log2": 6, "k_values": [1]})
    assert r.status_code == 200
    body = r.json()
    rows = body["rows"]
    assert [row["method"] for row in rows] == ["integer_ks", "integer_bf", "real_fft", "real_bf"]
    assert all(row["n"] == 64 for row in rows)
    assert rows[0]["k"] == 1 and rows[2]["k"] is None
    assert all(row["trials"] == 1024 for row in rows)
    assert body["elapsed_seconds"] > 0


def test_simulate_endpoint_deterministic(client):
    payload = {
        "snr_db_list": [10.0],
        "trials": 3,
        "seed": 5,
        "target_len": 256,
        "scene_len": 1024,
        "threads": 1,
    }
    r1 = client.post("/simulate", json=payload)
    r2 = client.post("/simulate", json=payload)
    assert r1.status_code == r2.status_code == 200
    b1, b2 = r1.json(), r2.json()
    assert b1["rows"] == b2["rows"]
    assert [row["mode"] for row in b1["rows"]] == [
        "proposed",
        "proposed_until_line4",
        "ccf_wo_quant",
    ]
    assert b1["diagnostics"]["trial_errors"] == 0
    assert "10.0" in b1["diagnostics"]["tie_changed_fraction"]


def test_selftest_endpoint(client):
    r = client.post("/selftest", json={"seed": 0})
    assert r.status_code == 200
    body = r.json()
    assert body["passed"] is True
    assert len(body["suites"]) == 3
    assert all(s["failures"] == 0 for s in body["suites"])
