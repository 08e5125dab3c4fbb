"""Command-line client for the estimation service.

Every subcommand speaks HTTP to the service: by default an in-process
instance (no socket), or a remote deployment via --server.  stdout carries
machine-readable payloads only (JSON for estimates, CSV files via --out);
human-oriented diagnostics go to stderr.

Exit codes: 0 success, 1 operational/selftest failure, 2 bad files or
configuration, 3 degenerate quantization (input too small for the chosen
quantizer).
"""

from __future__ import annotations

import argparse
import asyncio
import base64
import json
import sys
from pathlib import Path

import httpx

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_USAGE = 2
EXIT_DEGENERATE = 3

_USAGE_ERRORS = {"parse_error", "unsupported_format", "config_error", "degenerate_input"}


def _post(server: str | None, path: str, payload: dict) -> httpx.Response:
    if server:
        with httpx.Client(base_url=server, timeout=None) as client:
            return client.post(path, json=payload)

    from .service import create_app

    async def in_process() -> httpx.Response:
        transport = httpx.ASGITransport(app=create_app())
        async with httpx.AsyncClient(
            transport=transport, base_url="http://qxcorr.internal", timeout=None
        ) as client:
            return await client.post(path, json=payload)

    return asyncio.run(in_process())


def _fail(resp: httpx.Response) -> int:
    try:
        body = resp.json()
    except ValueError:
        body = {}
    message = body.get("message") or json.dumps(body.get("detail", body))
    print(f"error: {message}", file=sys.stderr)
    code = body.get("error")
    if code == "degenerate_quantization":
        return EXIT_DEGENERATE
    if code in _USAGE_ERRORS or resp.status_code in (400, 404, 422):
        return EXIT_USAGE
    return EXIT_FAIL


def _signal_payload(path_text: str) -> dict | None:
    """File -> SignalIn dict; .wav goes as WAV bytes, anything else as raw float32."""
    path = Path(path_text)
    if not path.is_file():
        print(f"error: no such file: {path}", file=sys.stderr)
        return None
    encoded = base64.b64encode(path.read_bytes()).decode("ascii")
    key = "wav_b64" if path.suffix.lower() in (".wav", ".wave") else "raw_b64"
    return {key: encoded}


def _checked_out_path(args) -> Path | None:
    out = Path(args.out)
    if out.exists() and not args.force:
        print(f"error: {out} exists; pass --force to overwrite", file=sys.stderr)
        return None
    return out


def _parse_list(text: str, convert):
    return [convert(part) for part in text.split(",") if part.strip()]


def cmd_estimate(args) -> int:
    ref = _signal_payload(args.ref)
    query = _signal_payload(args.query)
    if ref is None or query is None:
        return EXIT_USAGE
    payload = {
        "ref": ref,
        "query": query,
        "quantizer": args.quantizer,
        "method": args.method,
        "refine_ties": not args.until_line_4,
    }
    if args.sample_rate is not None:
        payload["sample_rate"] = args.sample_rate
    resp = _post(args.server, "/estimate", payload)
    if resp.status_code != 200:
        return _fail(resp)
    body = resp.json()
    out = {key: body[key] for key in ("lags", "peak_value_int", "tie_broken", "method", "elapsed_seconds")}
    if body.get("lags_seconds") is not None:
        out["lags_seconds"] = body["lags_seconds"]
    print(json.dumps(out, sort_keys=True))
    return EXIT_OK


def cmd_bench(args) -> int:
    from .harness import BenchRow, write_bench_csv

    out = _checked_out_path(args)
    if out is None:
        return EXIT_USAGE
    try:
        k_values = _parse_list(args.k, int)
    except ValueError:
        print(f"error: bad K list {args.k!r}", file=sys.stderr)
        return EXIT_USAGE
    payload = {
        "min_log2": args.min_log2,
        "max_log2": args.max_log2,
        "k_values": k_values,
        "seed": args.seed,
        "mul_backend": args.mul_backend,
    }
    resp = _post(args.server, "/bench", payload)
    if resp.status_code != 200:
        return _fail(resp)
    rows = [BenchRow(**row) for row in resp.json()["rows"]]
    write_bench_csv(rows, out)
    print(f"wrote {len(rows)} rows to {out}", file=sys.stderr)
    for line in _crossover_notes(rows):
        print(line, file=sys.stderr)
    return EXIT_OK


def _crossover_notes(rows) -> list[str]:
    """Human summary: where the integer fast path beats each real baseline."""
    integer_ks = [r.k for r in rows if r.k is not None]
    if not integer_ks:
        return []
    k_min = min(integer_ks)
    by_n: dict[int, dict[str, float]] = {}
    for r in rows:
        if r.method == "integer_ks" and r.k == k_min:
            by_n.setdefault(r.n, {})["ks"] = r.mean_seconds
        elif r.k is None:
            by_n.setdefault(r.n, {})[r.method] = r.mean_seconds
    notes = []
    for rival in ("real_fft", "real_bf"):
        faster = [n for n, t in sorted(by_n.items()) if "ks" in t and rival in t and t["ks"] < t[rival]]
        if faster:
            notes.append(f"integer_ks (K={k_min}) faster than {rival} at N in {faster}")
        else:
            notes.append(f"integer_ks (K={k_min}) never beat {rival} on this grid")
    return notes


def cmd_simulate(args) -> int:
    from .harness import AccuracyRow, write_accuracy_csv

    out = _checked_out_path(args)
    if out is None:
        return EXIT_USAGE
    try:
        snr_list = _parse_list(args.snr_list, float)
    except ValueError:
        print(f"error: bad SNR list {args.snr_list!r}", file=sys.stderr)
        return EXIT_USAGE
    payload = {
        "snr_db_list": snr_list,
        "trials": args.trials,
        "seed": args.seed,
        "quantizer": args.quantizer,
        "target_len": args.target_len,
        "scene_len": args.scene_len,
        "method": args.method,
    }
    if args.wav_dir:
        payload["wav_dir"] = args.wav_dir
    if args.threads:
        payload["threads"] = args.threads
    resp = _post(args.server, "/simulate", payload)
    if resp.status_code != 200:
        return _fail(resp)
    body = resp.json()
    rows = [AccuracyRow(**row) for row in body["rows"]]
    write_accuracy_csv(rows, out)
    diag = body["diagnostics"]
    print(f"wrote {len(rows)} rows to {out}", file=sys.stderr)
    print(f"tie refinement changed the lag set (fraction per SNR): {diag['tie_changed_fraction']}", file=sys.stderr)
    if diag["trial_errors"]:
        print(f"warning: {diag['trial_errors']} trial(s) errored and were scored incorrect", file=sys.stderr)
    return EXIT_OK


def cmd_selftest(args) -> int:
    resp = _post(args.server, "/selftest", {"seed": args.seed})
    if resp.status_code != 200:
        return _fail(resp)
    body = resp.json()
    width = max(len(s["name"]) for s in body["suites"])
    for suite in body["suites"]:
        status = "ok" if suite["failures"] == 0 else "FAIL"
        print(
            f"{suite['name']:<{width}}  {suite['total'] - suite['failures']}/{suite['total']}"
            f"  {suite['elapsed_seconds']:.2f}s  {status}",
            file=sys.stderr,
        )
    print(json.dumps(body, sort_keys=True))
    return EXIT_OK if body["passed"] else EXIT_FAIL


def cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    uvicorn.run(create_app(), host=args.host, port=args.port, log_level="info")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qxcorr",
        description="Time-difference estimation from integer-quantized cross-correlation.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    est = sub.add_parser("estimate", help="estimate the lag between two recordings")
    est.add_argument("--ref", required=True, help="reference file (.wav = PCM16 mono; otherwise raw float32)")
    est.add_argument("--query", required=True, help="query file; positive lag means the query is delayed")
    est.add_argument("--quantizer", default="sign", help="sign | uniform:K:STEP (default: sign)")
    est.add_argument("--method", choices=("ks", "bf"), default="ks", help="integer correlation path")
    est.add_argument("--until-line-4", action="store_true", help="skip the real-valued tie refinement stage")
    est.add_argument("--sample-rate", type=float, default=None, help="report lags in seconds as well")
    est.add_argument("--server", default=None, help="service URL (default: run in-process)")
    est.set_defaults(func=cmd_estimate)

    bench = sub.add_parser("bench", help="time the correlation kernels over a size grid")
    bench.add_argument("--min-log2", type=int, default=6)
    bench.add_argument("--max-log2", type=int, default=14)
    bench.add_argument("--k", default="1,16", help="comma-separated integer level bounds (default 1,16)")
    bench.add_argument("--seed", type=int, default=0)
    bench.add_argument("--mul-backend", default="auto", choices=("auto", "gmp", "native", "karatsuba", "schoolbook"))
    bench.add_argument("--out", required=True, help="CSV output path")
    bench.add_argument("--force", action="store_true", help="overwrite --out if it exists")
    bench.add_argument("--server", default=None)
    bench.set_defaults(func=cmd_bench)

    sim = sub.add_parser("simulate", help="accuracy vs SNR on synthetic or supplied audio")
    sim.add_argument("--snr-list", default="-10,-5,0,5,10", help="comma-separated dB values (use --snr-list=-10,... )")
    sim.add_argument("--trials", type=int, default=200)
    sim.add_argument("--seed", type=int, default=0)
    sim.add_argument("--quantizer", default="sign")
    sim.add_argument("--target-len", type=int, default=2048)
    sim.add_argument("--scene-len", type=int, default=8192)
    sim.add_argument("--method", choices=("ks", "bf"), default="ks")
    sim.add_argument("--wav-dir", default=None, help="directory with targets/*.wav and backgrounds/*.wav")
    sim.add_argument("--threads", type=int, default=None)
    sim.add_argument("--out", required=True, help="CSV output path")
    sim.add_argument("--force", action="store_true")
    sim.add_argument("--server", default=None)
    sim.set_defaults(func=cmd_simulate)

    selftest = sub.add_parser("selftest", help="run the fast invariant suites")
    selftest.add_argument("--seed", type=int, default=0)
    selftest.add_argument("--server", default=None)
    selftest.set_defaults(func=cmd_selftest)

    serve = sub.add_parser("serve", help="run the HTTP service")
    serve.add_argument("--host", default="127.0.0.1")
    serve.add_argument("--port", type=int, default=8000)
    serve.set_defaults(func=cmd_serve)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except httpx.HTTPError as exc:
        print(f"error: request failed: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
