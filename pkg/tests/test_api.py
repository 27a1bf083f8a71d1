import pytest
from fastapi.testclient import TestClient

from app.cache import cache
from app.main import app

client = TestClient(app)


@pytest.fixture(autouse=True)
def empty_cache():
    cache.clear()
    yield
    cache.clear()


def test_health_and_index():
    assert client.get("/health").json()["status"] == "healthy"
    assert "endpoints" in client.get("/").json()


def test_bounds_endpoint():
    response = client.post("/bounds", json={"n": 1000, "d": 2, "r": 0.2, "t": 4})
    assert response.status_code == 200
    body = response.json()
    assert body["hs_bound"] == pytest.approx(2585.6, rel=1e-3)
    assert body["hs_informative"] is False
    assert len(body["hs_bound_terms"]) == 3
    assert body["c_d_feasible"] == pytest.approx(1.0)


def test_bounds_endpoint_validation():
    assert client.post("/bounds", json={"n": 1, "d": 2, "t": 1}).status_code == 422
    assert client.post("/bounds", json={"n": 100, "d": 2, "t": 1, "q": 0.5}).status_code == 422


def test_spectrum_endpoint_is_cached():
    payload = {"kind": "grid", "dim": 2, "side": 5}
    first = client.post("/graphs/spectrum", json=payload)
    assert first.status_code == 200
    body = first.json()
    assert body["n"] == 25
    assert body["connected"] is True
    assert body["eigenvalues"][0] == pytest.approx(1.0, abs=1e-9)
    assert len(cache) == 1
    assert client.post("/graphs/spectrum", json=payload).json() == body
    assert len(cache) == 1


def test_spectrum_endpoint_size_limit():
    assert client.post("/graphs/spectrum", json={"dim": 2, "side": 100}).status_code == 422


def test_spectrum_endpoint_isolated_vertex_maps_to_422():
    response = client.post("/graphs/spectrum", json={"kind": "sampled", "dim": 2, "side": 6, "r": 0.001})
    assert response.status_code == 422
    assert "isolated" in response.json()["detail"]


def test_matching_endpoint():
    body = client.post("/matching", json={"dim": 2, "side": 6, "seed": 1}).json()
    assert body["n"] == 36
    assert sorted(body["forward"]) == list(range(36))
    assert body["M_over_r"] == pytest.approx(body["bottleneck"] / body["r"])
