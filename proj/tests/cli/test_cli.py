import json
import os
import socket
import subprocess
import time
import urllib.request

import pytest

BIN = os.environ.get("PREDMM_BIN", "build/predmm")


def run(*args, **kw):
    return subprocess.run([BIN, *args], capture_output=True, text=True, timeout=600, **kw)


def test_sim_is_reproducible(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    first = run("sim", "--mm", "bmm", "--jumps", "gaussian", "--runs", "5", "--seed", "7", "--out", str(a))
    second = run("sim", "--mm", "bmm", "--jumps", "gaussian", "--runs", "5", "--seed", "7", "--out", str(b),
                 "--jobs", "3")
    assert first.returncode == 0, first.stderr
    assert first.stdout == second.stdout
    for name in ("runs.csv", "series.csv", "summary.csv"):
        assert (a / name).read_bytes() == (b / name).read_bytes()
    header, row = first.stdout.strip().splitlines()
    assert header.split(",")[3:7] == ["profit", "max_loss", "spread", "rmsd"]
    assert row.startswith("bmm,gaussian,5,")
    assert len((a / "runs.csv").read_text().strip().splitlines()) == 6


def test_sim_single_run_and_generated_seed():
    r = run("sim", "--mm", "lmsr", "--runs", "1")
    assert r.returncode == 0
    assert r.stderr.startswith("seed: ")
    assert len(r.stdout.strip().splitlines()) == 2


@pytest.mark.parametrize("args", [["sim", "--bogus"], ["sim", "--mm", "cds"], ["sim", "--runs", "0"], []])
def test_usage_errors(args):
    r = run(*args)
    assert r.returncode != 0
    assert r.stderr


def test_replay_matches_the_run(tmp_path):
    r = run("sim", "--mm", "zp", "--runs", "3", "--seed", "11", "--out", str(tmp_path), "--logs")
    assert r.returncode == 0
    rows = (tmp_path / "runs.csv").read_text().strip().splitlines()[1:]
    for i, row in enumerate(rows):
        rep = run("replay", str(tmp_path / "logs" / f"run-{i:05d}.jsonl"))
        assert rep.returncode == 0, rep.stderr
        report = json.loads(rep.stdout)
        assert report["verified"] is True
        m = report["markets"]["M"]
        fields = row.split(",")
        assert float(fields[2]) == pytest.approx(m["mm_profit"], rel=1e-9, abs=1e-9)
        assert float(fields[4]) == pytest.approx(m["avg_spread"], rel=1e-9)
        assert float(fields[5]) == pytest.approx(m["rmsd"], rel=1e-9)
        assert [int(x) for x in fields[7:10]] == [m["buys"], m["sells"], m["cancels"]]


def test_replay_empty_and_truncated(tmp_path):
    empty = tmp_path / "empty.jsonl"
    empty.write_text("")
    r = run("replay", str(empty))
    assert r.returncode == 0
    assert all(v == 0 for v in json.loads(r.stdout)["markets"]["M"].values())

    run("sim", "--runs", "1", "--seed", "3", "--out", str(tmp_path), "--logs")
    lines = (tmp_path / "logs" / "run-00000.jsonl").read_text().splitlines()
    bad = tmp_path / "bad.jsonl"
    bad.write_text("\n".join(lines[:4] + [lines[4][:20]] + lines[5:]) + "\n")
    r = run("replay", str(bad))
    assert r.returncode == 2
    assert "line 5" in r.stderr

    # a fill at a price the market maker never quoted
    i = max(k for k, line in enumerate(lines) if json.loads(line)["kind"] == "accepted")
    ev = json.loads(lines[i])
    ev["payload"]["price"] += 0.01
    tampered = tmp_path / "tampered.jsonl"
    tampered.write_text("\n".join(lines[:i] + [json.dumps(ev)] + lines[i + 1:]) + "\n")
    r = run("replay", str(tampered))
    assert r.returncode == 3
    assert "mismatch" in r.stderr


def start_server(tmp_path, *extra):
    proc = subprocess.Popen([BIN, "serve", "--host", "127.0.0.1", "--port", "0", "--log-dir", str(tmp_path / "logs"),
                             *extra], stdout=subprocess.PIPE, stderr=subprocess.PIPE, text=True)
    line = proc.stdout.readline()
    startup = json.loads(line)
    assert startup["event"] == "listening"
    return proc, startup


def http(port, method, path, body=None):
    req = urllib.request.Request(f"http://127.0.0.1:{port}{path}", method=method,
                                 data=None if body is None else json.dumps(body).encode())
    try:
        with urllib.request.urlopen(req, timeout=10) as res:
            return res.status, json.loads(res.read())
    except urllib.error.HTTPError as e:
        return e.code, json.loads(e.read())


def test_serve(tmp_path):
    proc, startup = start_server(tmp_path)
    try:
        port = startup["port"]
        assert http(port, "GET", "/health") == (200, {"status": "ok", "schema": 1, "sessions": 0})
        cfg = {"id": "demo", "markets": {"LR": {"kind": "lmsr"}, "TB": {"kind": "bmm"}}}
        assert http(port, "POST", "/api/sessions", cfg) == (201, {"id": "demo"})
        assert (tmp_path / "logs" / "demo.jsonl").exists()
        assert (tmp_path / "logs" / "registry.json").exists()

        # a second server on the same port fails clearly
        busy = run("serve", "--host", "127.0.0.1", "--port", str(port), "--log-dir", str(tmp_path / "other"))
        assert busy.returncode == 1
        assert "cannot listen" in busy.stderr
    finally:
        proc.terminate()
        proc.wait(timeout=10)
    assert proc.returncode == 0

    # and the session survives a restart
    proc, startup = start_server(tmp_path)
    try:
        assert startup["sessions"] == 1
        status, state = http(startup["port"], "GET", "/api/sessions/demo/state")
        assert status == 200 and state["phase"] == "pending"
    finally:
        proc.terminate()
        proc.wait(timeout=10)
