import base64

import pytest
from fastapi.testclient import TestClient

from asflab.service.app import app
from asflab.service import handlers
from asflab.service.schemas import CheckRequest, SweepRequest, SweepSpecIn, SweepModelIn

client = TestClient(app)

CHECK_BODY = {
    "p": 2.0,
    "synth": {"shift": 1.0, "mod_step": 1.0, "win_len": 1.0},
    "grid_res": 0.25,
    "period": 4.0,
}

SWEEP_BODY = {
    "spec": {
        "axes": {"a": [0.5, 1.5], "b": [1.0], "c": [0.75], "p": [2.0]},
        "model": {"period": 6.0, "size": 24},
    },
    "workers": 2,
}


def test_health():
    resp = client.get("/health")
    assert resp.status_code == 200
    assert resp.json()["status"] == "ok"


def test_check_exact_tiling():
    resp = client.post("/check", json=CHECK_BODY)
    assert resp.status_code == 200
    doc = resp.json()
    assert doc["classification"] == "ASF"
    assert doc["condition"] == pytest.approx(1.0, abs=1e-6)
    assert doc["model"]["L"] == 16


def test_check_matches_local_handler():
    resp = client.post("/check", json=CHECK_BODY)
    local = handlers.check(CheckRequest(**CHECK_BODY))
    assert resp.json() == local


def test_check_incommensurate_is_409():
    body = dict(CHECK_BODY, synth={"shift": 1 / 3, "mod_step": 1.0, "win_len": 1.0})
    resp = client.post("/check", json=body)
    assert resp.status_code == 409
    assert resp.json()["error"]["kind"] == "incommensurate"


def test_check_bad_exponent_is_400():
    resp = client.post("/check", json=dict(CHECK_BODY, p=1.0))
    assert resp.status_code == 400
    assert resp.json()["error"]["kind"] == "config"


def test_check_malformed_body_is_422():
    resp = client.post("/check", json={"p": 2.0})
    assert resp.status_code == 422


def test_oracle():
    resp = client.post(
        "/oracle",
        json={
            "synth": {"shift": 0.5, "mod_step": 1.0, "win_len": 0.75},
            "grid_res": 0.25,
            "period": 4.0,
        },
    )
    assert resp.status_code == 200
    doc = resp.json()
    assert (doc["g_min"], doc["g_max"]) == (1, 2)
    assert (doc["lower"], doc["upper"]) == (1.0, 2.0)
    assert doc["covering"][:4] == [2, 1, 2, 1]


def test_oracle_violating_window_is_400():
    resp = client.post(
        "/oracle",
        json={
            "synth": {"shift": 0.5, "mod_step": 2.0, "win_len": 0.75},
            "grid_res": 0.25,
            "period": 4.0,
        },
    )
    assert resp.status_code == 400


def test_scale_study():
    resp = client.post(
        "/scale-study",
        json={
            "p": 2.0,
            "synth": {"shift": 0.5, "mod_step": 1.0, "win_len": 0.75},
            "period": 4.0,
            "sizes": [16, 32],
        },
    )
    assert resp.status_code == 200
    doc = resp.json()
    assert doc["trend"] == "STABLE"
    assert [r["L"] for r in doc["rows"]] == [16, 32]


def test_sweep_roundtrip_and_resume():
    resp = client.post("/sweep", json=SWEEP_BODY)
    assert resp.status_code == 200
    doc = resp.json()
    assert doc["rows"] == 2
    assert doc["skipped"] == 0
    csv_text = doc["csv"]
    assert csv_text.startswith(f"# asf-lab v1 spec={doc['spec_hash']}")

    # resuming from the full table returns identical bytes
    resumed = client.post("/sweep", json=dict(SWEEP_BODY, partial_csv=csv_text))
    assert resumed.status_code == 200
    assert resumed.json()["csv"] == csv_text

    # resuming with a foreign table is a config error
    other = csv_text.replace(doc["spec_hash"], "0" * 64)
    bad = client.post("/sweep", json=dict(SWEEP_BODY, partial_csv=other))
    assert bad.status_code == 400


def test_report_pgm():
    csv_text = client.post("/sweep", json=SWEEP_BODY).json()["csv"]
    resp = client.post(
        "/report",
        json={"csv": csv_text, "x_axis": "a", "y_axis": "b", "metric": "classification"},
    )
    assert resp.status_code == 200
    doc = resp.json()
    assert (doc["width"], doc["height"]) == (2, 1)
    pgm = base64.b64decode(doc["pgm_base64"])
    assert pgm == b"P5\n2 1\n255\n" + bytes([255, 0])


def test_sweep_request_model_validation():
    req = SweepRequest(
        spec=SweepSpecIn(
            axes={"a": [0.5], "b": [1.0], "c": [0.75]},
            model=SweepModelIn(period=4.0, size=16),
        )
    )
    out = handlers.sweep(req)
    assert out["rows"] == 1
