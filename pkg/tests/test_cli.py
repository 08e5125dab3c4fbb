import json

import numpy as np
import pytest

from qxcorr import Signal
from qxcorr.cli import EXIT_DEGENERATE, EXIT_OK, EXIT_USAGE, main
from qxcorr.harness import ACCURACY_HEADER, BENCH_HEADER
from qxcorr.signalgen import gen_target, write_wav


@pytest.fixture()
def wav_pair(tmp_path):
    """Reference scene and a copy of it delayed by 40 samples."""
    rng = np.random.default_rng(0)
    base = rng.uniform(-0.8, 0.8, size=400)
    ref = Signal(0, base)
    query = Signal(0, base[40:340])  # query[n] = ref[n+40] -> peak at lag -40
    p_ref = tmp_path / "ref.wav"
    p_query = tmp_path / "query.wav"
    write_wav(p_ref, ref)
    write_wav(p_query, query)
    return str(p_ref), str(p_query)


def test_estimate_wav_files(wav_pair, capsys):
    ref, query = wav_pair
    assert main(["estimate", "--ref", ref, "--query", query]) == EXIT_OK
    out = capsys.readouterr().out.strip().splitlines()
    assert len(out) == 1
    body = json.loads(out[0])
    assert body["lags"] == [-40]
    assert body["method"] == "ks"
    assert set(body) == {"lags", "peak_value_int", "tie_broken", "method", "elapsed_seconds"}


def test_estimate_sample_rate_and_flags(wav_pair, capsys):
    ref, query = wav_pair
    code = main(
        [
            "estimate",
            "--ref", ref,
            "--query", query,
            "--sample-rate", "16000",
            "--method", "bf",
            "--quantizer", "uniform:4:0.25",
            "--until-line-4",
        ]
    )
    assert code == EXIT_OK
    body = json.loads(capsys.readouterr().out)
    assert body["lags"] == [-40]
    assert body["lags_seconds"] == [-40 / 16000]
    assert body["method"] == "bf"


def test_estimate_identical_wavs(tmp_path, capsys):
    p = tmp_path / "same.wav"
    write_wav(p, Signal(0, np.random.default_rng(2).uniform(-0.8, 0.8, size=256)))
    assert main(["estimate", "--ref", str(p), "--query", str(p)]) == EXIT_OK
    assert json.loads(capsys.readouterr().out)["lags"] == [0]


def test_estimate_delayed_query(tmp_path, capsys):
    # query[n] = ref[n-100]: a query delayed by 100 samples reports lag +100
    rng = np.random.default_rng(3)
    base = rng.uniform(-0.8, 0.8, size=500)
    p_ref = tmp_path / "ref.wav"
    p_query = tmp_path / "query.wav"
    write_wav(p_ref, Signal(0, base[100:400]))
    write_wav(p_query, Signal(0, base[0:300]))
    assert main(["estimate", "--ref", str(p_ref), "--query", str(p_query)]) == EXIT_OK
    assert json.loads(capsys.readouterr().out)["lags"] == [100]


def test_estimate_raw_files(tmp_path, capsys):
    rng = np.random.default_rng(1)
    samples = rng.standard_normal(200).astype("<f4")
    a = tmp_path / "a.f32"
    a.write_bytes(samples.tobytes())
    assert main(["estimate", "--ref", str(a), "--query", str(a)]) == EXIT_OK
    assert json.loads(capsys.readouterr().out)["lags"] == [0]


def test_estimate_missing_file(tmp_path, capsys):
    ref = tmp_path / "nope.wav"
    code = main(["estimate", "--ref", str(ref), "--query", str(ref)])
    assert code == EXIT_USAGE
    assert "no such file" in capsys.readouterr().err


def test_estimate_degenerate_exit_code(tmp_path, capsys):
    silent = tmp_path / "silent.wav"
    write_wav(silent, Signal(0, np.zeros(64)))
    code = main(["estimate", "--ref", str(silent), "--query", str(silent)])
    assert code == EXIT_DEGENERATE
    assert "zeros" in capsys.readouterr().err


def test_estimate_bad_quantizer(wav_pair, capsys):
    ref, query = wav_pair
    code = main(["estimate", "--ref", ref, "--query", query, "--quantizer", "median"])
    assert code == EXIT_USAGE
    assert "quantizer" in capsys.readouterr().err


def test_bench_writes_csv(tmp_path, capsys):
    out = tmp_path / "bench.csv"
    code = main(["bench", "--min-log2", "6", "--max-log2", "7", "--k", "1", "--out", str(out)])
    assert code == EXIT_OK
    lines = out.read_text().splitlines()
    assert lines[0] == ",".join(BENCH_HEADER)
    assert len(lines) == 1 + 2 * 4  # two sizes x (ks + bf + two real rows)
    err = capsys.readouterr().err
    assert "wrote 8 rows" in err
    assert "integer_ks" in err  # crossover notes


def test_bench_refuses_overwrite(tmp_path, capsys):
    out = tmp_path / "bench.csv"
    out.write_text("keep me")
    code = main(["bench", "--min-log2", "6", "--max-log2", "6", "--k", "1", "--out", str(out)])
    assert code == EXIT_USAGE
    assert out.read_text() == "keep me"
    assert "--force" in capsys.readouterr().err
    code = main(
        ["bench", "--min-log2", "6", "--max-log2", "6", "--k", "1", "--out", str(out), "--force"]
    )
    assert code == EXIT_OK
    assert out.read_text().startswith("method,")


def test_bench_bad_args(tmp_path, capsys):
    out = tmp_path / "b.csv"
    assert main(["bench", "--k", "1,x", "--out", str(out)]) == EXIT_USAGE
    assert "bad K list" in capsys.readouterr().err
    assert (
        main(["bench", "--min-log2", "9", "--max-log2", "6", "--k", "1", "--out", str(out)])
        == EXIT_USAGE
    )
    with pytest.raises(SystemExit) as exc:
        main(["bench", "--mul-backend", "magic", "--out", str(out)])
    assert exc.value.code == 2


def test_simulate_writes_deterministic_csv(tmp_path, capsys):
    args = [
        "simulate",
        "--snr-list=10",
        "--trials", "3",
        "--seed", "5",
        "--target-len", "256",
        "--scene-len", "1024",
        "--threads", "1",
    ]
    out1 = tmp_path / "acc1.csv"
    out2 = tmp_path / "acc2.csv"
    assert main(args + ["--out", str(out1)]) == EXIT_OK
    assert main(args + ["--out", str(out2)]) == EXIT_OK
    b1, b2 = out1.read_bytes(), out2.read_bytes()
    assert b1 == b2
    lines = b1.decode().splitlines()
    assert lines[0] == ",".join(ACCURACY_HEADER)
    assert len(lines) == 1 + 3
    err = capsys.readouterr().err
    assert "tie refinement" in err


def test_simulate_negative_snr_list_form(tmp_path):
    # leading minus needs the = form to survive argparse
    out = tmp_path / "acc.csv"
    code = main(
        [
            "simulate",
            "--snr-list=-5,10",
            "--trials", "2",
            "--target-len", "256",
            "--scene-len", "1024",
            "--threads", "1",
            "--out", str(out),
        ]
    )
    assert code == EXIT_OK
    lines = out.read_text().splitlines()
    assert len(lines) == 1 + 6
    assert lines[1].startswith("-5.0,")


def test_simulate_bad_snr_list(tmp_path, capsys):
    out = tmp_path / "acc.csv"
    assert main(["simulate", "--snr-list=ten", "--out", str(out)]) == EXIT_USAGE
    assert "bad SNR list" in capsys.readouterr().err


def test_selftest_passes(capsys):
    assert main(["selftest"]) == EXIT_OK
    captured = capsys.readouterr()
    body = json.loads(captured.out)
    assert body["passed"] is True
    assert "monotone-peak-invariance" in captured.err
    assert " ok" in captured.err


def test_selftest_seed_flag(capsys):
    assert main(["selftest", "--seed", "123"]) == EXIT_OK
    assert json.loads(capsys.readouterr().out)["passed"] is True


def test_subcommand_required():
    with pytest.raises(SystemExit) as exc:
        main([])
    assert exc.value.code == 2
