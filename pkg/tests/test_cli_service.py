"""CLI subcommands and the HTTP session service."""

import json
import os
import urllib.request
import urllib.error

import pytest

from eigenflow import session as ses
from eigenflow.cli import main
from eigenflow.service import SessionServer


def run_cli(*args):
    return main(list(args))


@pytest.fixture(scope="module")
def sx6_session_path(tmp_path_factory):
    d = tmp_path_factory.mktemp("cli")
    path = str(d / "sx6.json")
    rc = run_cli("trace", "--flow", "stackexchange6", "--seed", "7",
                 "--t0", "-0.3", "--tf", "0.1", "--tau", "1e-4",
                 "--formula", "5", "6", "--session", path)
    assert rc == 0
    assert run_cli("analyze", "--session", path) == 0
    assert run_cli("infer", "--session", path) == 0
    return path


def test_cli_pipeline_reproduces_reference_labels(sx6_session_path):
    s = ses.load(sx6_session_path)
    assert s.ve.tolist() == [1, -1, 2, 2, -2, -2]
    assert s.blocks.sizes == (1, 1, 2, 2)


def test_cli_deterministic_session_bytes(tmp_path):
    paths = []
    for name in ("a.json", "b.json"):
        p = str(tmp_path / name)
        run_cli("trace", "--flow", "diag5", "--seed", "3", "--t0", "0",
                "--tf", "0.5", "--tau", "1e-3", "--session", p)
        run_cli("analyze", "--session", p)
        run_cli("infer", "--session", p)
        paths.append(p)
    assert open(paths[0], "rb").read() == open(paths[1], "rb").read()


def test_cli_analyze_idempotent(tmp_path):
    p = str(tmp_path / "s.json")
    run_cli("trace", "--flow", "diag5", "--seed", "3", "--t0", "0",
            "--tf", "0.5", "--tau", "1e-3", "--session", p)
    run_cli("analyze", "--session", p)
    first = open(p, "rb").read()
    run_cli("analyze", "--session", p)
    assert open(p, "rb").read() == first


def test_cli_infer_no_crossings_prints_caveat(tmp_path, capsys):
    p = str(tmp_path / "r3.json")
    run_cli("trace", "--flow", "random_hermitean(3)", "--seed", "1",
            "--t0", "0", "--tf", "0.1", "--tau", "1e-3", "--session", p)
    run_cli("analyze", "--session", p)
    rc = run_cli("infer", "--session", p)
    out = capsys.readouterr().out
    assert rc == 0
    s = ses.load(p)
    assert s.ve.tolist() == [1, 2, 3]
    assert s.blocks.sizes == (1, 1, 1)
    assert "in error" in out or "upper bound" in out


def test_cli_touch_contradiction_exits_2(tmp_path, capsys):
    p = str(tmp_path / "s.json")
    run_cli("trace", "--flow", "stackexchange6", "--seed", "7", "--t0", "-0.3",
            "--tf", "0.1", "--tau", "1e-3", "--session", p)
    run_cli("analyze", "--session", p)
    run_cli("infer", "--session", p)
    rc = run_cli("touch", "--session", p, "--pair", "1", "5")   # crossing pair
    err = capsys.readouterr().err
    assert rc == 2
    assert "row 1" in err
    # session untouched by the failed mutation
    assert ses.load(p).touch == []


def test_cli_touch_pairs_file(tmp_path):
    p = str(tmp_path / "s.json")
    run_cli("trace", "--flow", "stackexchange6", "--seed", "7", "--t0", "-0.3",
            "--tf", "0.1", "--tau", "1e-3", "--session", p)
    run_cli("analyze", "--session", p)
    run_cli("infer", "--session", p)
    pf = tmp_path / "pairs.touch"
    pf.write_text("# already-consistent pair: a visible no-op\n3 4\n")
    rc = run_cli("touch", "--session", p, "--pairs", str(pf))
    assert rc == 0
    s = ses.load(p)
    assert s.touch == [[3, 4]]
    assert s.ve.tolist() == [1, -1, 2, 2, -2, -2]


def test_cli_export(tmp_path, sx6_session_path):
    out = tmp_path / "exp"
    rc = run_cli("export", "--session", sx6_session_path, "--outdir", str(out))
    assert rc == 0
    csvs = sorted(os.listdir(out))
    assert "curve_01.csv" in csvs and "plot_data.json" in csvs
    pd = json.loads((out / "plot_data.json").read_text())
    assert len(pd["curves"]) == 6


def test_cli_session_dir_env(tmp_path, monkeypatch):
    monkeypatch.setenv("EIGENCURVE_SESSION_DIR", str(tmp_path))
    rc = run_cli("trace", "--flow", "diag5", "--t0", "0", "--tf", "0.2",
                 "--tau", "1e-3", "--session", "bare.json")
    assert rc == 0
    assert (tmp_path / "bare.json").exists()


def test_cli_unknown_flow_fails(tmp_path, capsys):
    rc = run_cli("trace", "--flow", "bogus", "--t0", "0", "--tf", "1",
                 "--session", str(tmp_path / "x.json"))
    assert rc == 1
    assert "unknown gallery flow" in capsys.readouterr().err


# --- HTTP service -------------------------------------------------------------

def http(method, url, body=None):
    data = None if body is None else json.dumps(body).encode()
    req = urllib.request.Request(url, data=data, method=method,
                                 headers={"Content-Type": "application/json"})
    try:
        with urllib.request.urlopen(req) as resp:
            return resp.status, json.loads(resp.read())
    except urllib.error.HTTPError as e:
        return e.code, json.loads(e.read())


@pytest.fixture(scope="module")
def server(sx6_session_path):
    s = ses.load(sx6_session_path)
    with SessionServer(s, path=None, port=0) as srv:
        yield f"http://127.0.0.1:{srv.port}"


def test_service_get_session(server):
    code, doc = http("GET", server + "/session")
    assert code == 200
    assert doc["version"] == "1"
    assert doc["ve"] == [1, -1, 2, 2, -2, -2]


def test_service_get_curves(server):
    code, pd = http("GET", server + "/curves")
    assert code == 200
    assert len(pd["curves"]) == 6
    assert pd["structure"] == "hermitean"


def test_service_suggestions_and_status(server):
    code, sugg = http("GET", server + "/suggestions")
    assert code == 200
    assert isinstance(sugg, list)
    code, st = http("GET", server + "/status")
    assert code == 200
    assert st["phase"] == "idle"


def test_service_touch_ok_then_conflict(server):
    code, out = http("POST", server + "/touch", {"pairs": [[3, 4]]})
    assert code == 200
    assert out["ve"] == [1, -1, 2, 2, -2, -2] and out["touch"] == [[3, 4]]
    code, out = http("POST", server + "/touch", {"pairs": [[1, 5]]})
    assert code == 409
    assert out["row"] == 1 and out["pair"] == [1, 5]
    # the failed mutation must not stick
    code, doc = http("GET", server + "/session")
    assert doc["touch"] == [[3, 4]]


def test_service_extend(server):
    code, out = http("POST", server + "/extend", {"t0": -0.35, "tf": 0.1})
    assert code == 200
    assert out["interval"] == [-0.35, 0.1]
    assert out["history"][-1]["interval"] == [-0.3, 0.1]
    code, out = http("POST", server + "/extend", {"t0": 0.0, "tf": 0.05})
    assert code == 400


def test_service_unknown_route(server):
    code, out = http("GET", server + "/bogus")
    assert code == 404
