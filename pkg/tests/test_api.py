import pytest
from fastapi.testclient import TestClient

from newtonlab_app import main as service

ROOTS = [[1, 0], [-1, 0]]


@pytest.fixture
def client(monkeypatch):
    monkeypatch.setattr(service, "ledger_enabled", lambda: False)
    return TestClient(service.app)


def test_health(client):
    assert client.get("/health").json() == {"ok": True, "ledger": False}


def test_cycles(client):
    res = client.post("/cycles", json={"roots": ROOTS, "period": 1})
    assert res.status_code == 200
    assert len(res.json()["cycles"]) == 3


def test_bad_roots_are_unprocessable(client):
    res = client.post("/cycles", json={"roots": [1], "period": 1})
    assert res.status_code == 422


def test_blaschke(client):
    res = client.post("/blaschke", json={"k": 2, "a_count": 3})
    assert res.status_code == 200
    body = res.json()
    assert body["k"] == 2 and len(body["rows"]) == 3


def test_schemas(client):
    assert "blaschke_table" in client.get("/schemas").json()["schemas"]
    assert client.get("/schemas/cycles").status_code == 200
    assert client.get("/schemas/nope").status_code == 404


def test_render_png(client):
    res = client.post("/render/julia", json={"roots": ROOTS, "resolution": [8, 8], "iter_cap": 20})
    assert res.status_code == 200
    assert res.headers["content-type"] == "image/png"
    assert res.content.startswith(b"\x89PNG")


def test_queue_needs_a_ledger(client):
    res = client.post("/jobs/render", json={"roots": ROOTS})
    assert res.status_code == 503
