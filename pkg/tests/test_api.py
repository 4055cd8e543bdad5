"""HTTP / WebSocket 接口"""

import pytest
from fastapi.testclient import TestClient

from app.main import app


@pytest.fixture
def client():
    return TestClient(app)


def test_health(client):
    response = client.get("/health")
    assert response.status_code == 200
    assert response.json() == {"status": "ok"}


class TestRank:
    def test_rank(self, client):
        response = client.post("/api/rank", json={"matrix": [[1, 2], [3, 17]], "p": 11})
        assert response.status_code == 200
        assert response.json() == {"rank": 1, "rows": 2, "p": 11}

    def test_rank_large_prime(self, client):
        p = 2**89 - 1
        matrix = [[2**88, 3], [2**89, 6]]
        response = client.post("/api/rank", json={"matrix": matrix, "p": p})
        assert response.status_code == 200
        assert response.json() == {"rank": 1, "rows": 2, "p": p}

    @pytest.mark.parametrize(
        "payload",
        [
            {"matrix": [[1, 2]], "p": 12},
            {"matrix": [[1, "a"]], "p": 11},
            {"matrix": [[1, 2], [3]], "p": 11},
            {"p": 11},
        ],
    )
    def test_bad_input(self, client, payload):
        response = client.post("/api/rank", json=payload)
        assert response.status_code == 400
        assert "error" in response.json()


class TestCertify:
    def test_short_sweep(self, client):
        response = client.post("/api/certify", json={"case": "d1", "n_start": 12, "count": 1})
        assert response.status_code == 200
        data = response.json()
        assert data["ranks"] == [15]
        assert data["status"] == "full_rank"

    def test_null_fields_use_defaults(self, client):
        response = client.post(
            "/api/certify", json={"case": "d1", "n_start": None, "count": None, "extra": None}
        )
        assert response.status_code == 200
        data = response.json()
        assert data["ranks"] == [15]
        assert data["periodicity_samples"] == []

    @pytest.mark.parametrize(
        "payload",
        [
            {"case": "d3"},
            {"case": "d1", "n_start": "12"},
            {"case": "d1", "count": 1000},
            {"case": "d1", "n_start": 2},
        ],
    )
    def test_rejected(self, client, payload):
        response = client.post("/api/certify", json=payload)
        assert response.status_code == 400


def test_matrix(client):
    data = client.get("/api/matrix/d1/12").json()
    assert (data["rows"], data["cols"], data["prime"]) == (15, 22, 11)
    assert len(data["matrix"]) == 15
    assert all(len(row) == 22 for row in data["matrix"])

    assert client.get("/api/matrix/d1/5").status_code == 400
    assert client.get("/api/matrix/zz/12").status_code == 400


def test_websocket_sweep(client):
    with client.websocket_connect("/ws/sweep") as websocket:
        websocket.send_json({"case": "d1", "n_start": 12, "count": 1})
        first = websocket.receive_json()
        assert first == {"type": "rank", "n": 12, "rank": 15, "full_rank": True}
        done = websocket.receive_json()
        assert done["type"] == "done"
        assert done["ranks"] == [15]

        websocket.send_json({"case": "nope"})
        assert websocket.receive_json()["type"] == "error"

        websocket.send_json({"case": "d1", "n_start": 3})
        assert websocket.receive_json()["type"] == "error"
