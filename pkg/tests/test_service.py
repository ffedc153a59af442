"""HTTP layer: status codes, documents, media, and session endpoints."""

import pytest
from fastapi.testclient import TestClient

from retrace.service import create_app

GPS = (
    "timestamp,lat,lon\n"
    + "".join(f"2013-05-01T08:{m:02d}:00Z,32.65,-16.9167\n" for m in range(0, 31, 2))
    + "".join(f"2013-05-01T10:{m:02d}:00Z,32.70,-16.85\n" for m in range(0, 31, 2))
)
CONTEXT = (
    "timestamp,channel,direction,duration_s\n"
    "2013-05-01T14:00:00Z,call,in,120\n"
    "2013-05-01T10:05:00Z,sms,in,0\n"
    "2013-05-01T16:30:00Z,sms,out,0\n"
)
IMAGES = "timestamp,path\n" + "".join(
    f"2013-05-01T09:30:{s:02d}Z,media/{s:02d}.png\n" for s in range(0, 40, 10)
)


@pytest.fixture
def client(tmp_path):
    return TestClient(create_app(tmp_path / "store"))


def ingest(client, **extra):
    body = {"gps_csv": GPS, "context_csv": CONTEXT, "images_csv": IMAGES}
    body.update(extra)
    return client.post("/api/days/2013-05-01", json=body)


class TestIngestEndpoint:
    def test_created(self, client):
        r = ingest(client)
        assert r.status_code == 201
        body = r.json()
        assert body["date"] == "2013-05-01"
        assert body["counts"]["fixes"] == 32
        assert body["counts"]["stay_points"] == 2
        assert body["counts"]["images"] == 4

    def test_conflict_without_force(self, client):
        ingest(client)
        assert ingest(client).status_code == 409
        assert ingest(client, force=True).status_code == 201

    def test_parse_error_is_422(self, client):
        r = client.post("/api/days/2013-05-01", json={"gps_csv": "timestamp,lat,lon\nbad\n"})
        assert r.status_code == 422
        assert "line 2" in r.json()["detail"]

    def test_empty_day_is_422(self, client):
        r = client.post("/api/days/2013-05-01", json={"gps_csv": "timestamp,lat,lon\n"})
        assert r.status_code == 422

    def test_gps_and_gpx_together_rejected(self, client):
        r = client.post(
            "/api/days/2013-05-01", json={"gps_csv": GPS, "gpx": "<gpx></gpx>"}
        )
        assert r.status_code == 422

    def test_bad_date_in_path(self, client):
        r = client.post("/api/days/not-a-date", json={"gps_csv": GPS})
        assert r.status_code == 422

    def test_listing_and_summary(self, client):
        ingest(client)
        assert client.get("/api/days").json() == {"days": ["2013-05-01"]}
        summary = client.get("/api/days/2013-05-01").json()
        assert summary["counts"]["places"] == 2
        assert summary["start"] == "2013-05-01T00:00:00Z"

    def test_summary_unknown_day(self, client):
        assert client.get("/api/days/2013-05-01").status_code == 404


class TestTimelineEndpoint:
    def test_serves_persisted_document(self, client):
        ingest(client)
        r = client.get("/api/days/2013-05-01/timeline")
        assert r.status_code == 200
        doc = r.json()
        assert {"visual", "location", "call", "sms"} <= set(doc)

    def test_etag_round_trip(self, client):
        ingest(client)
        first = client.get("/api/days/2013-05-01/timeline")
        etag = first.headers["etag"]
        second = client.get(
            "/api/days/2013-05-01/timeline", headers={"If-None-Match": etag}
        )
        assert second.status_code == 304
        changed = client.get(
            "/api/days/2013-05-01/timeline", headers={"If-None-Match": '"stale"'}
        )
        assert changed.status_code == 200

    def test_unknown_day(self, client):
        assert client.get("/api/days/2013-05-01/timeline").status_code == 404


class TestWindowEndpoint:
    def test_places_carry_circle_radii(self, client):
        # Window clips the second stay to half its dwell, so its circle
        # must come out strictly smaller than the first.
        ingest(client)
        r = client.get(
            "/api/days/2013-05-01/window",
            params={"from": "2013-05-01T08:00:00Z", "to": "2013-05-01T10:15:00Z"},
        )
        assert r.status_code == 200
        places = r.json()["places"]
        assert len(places) == 2
        assert places[0]["circle_radius_px"] == 40.0
        assert 6.0 <= places[1]["circle_radius_px"] < 40.0

    def test_frames_carry_media_urls(self, client):
        ingest(client)
        r = client.get(
            "/api/days/2013-05-01/window",
            params={"from": "2013-05-01T09:00:00Z", "to": "2013-05-01T10:00:00Z"},
        )
        frames = r.json()["frames"]
        assert len(frames) == 4
        assert frames[0]["media_url"] == "/api/media/2013-05-01/2013-05-01%23000000"
        assert frames[0]["suggested_display_ms"] == 500

    def test_inverted_window_is_400(self, client):
        ingest(client)
        r = client.get(
            "/api/days/2013-05-01/window",
            params={"from": "2013-05-01T11:00:00Z", "to": "2013-05-01T10:00:00Z"},
        )
        assert r.status_code == 400

    def test_unparseable_instant_is_400(self, client):
        ingest(client)
        r = client.get(
            "/api/days/2013-05-01/window",
            params={"from": "noon", "to": "2013-05-01T10:00:00Z"},
        )
        assert r.status_code == 400

    def test_missing_params_is_422(self, client):
        ingest(client)
        assert client.get("/api/days/2013-05-01/window").status_code == 422

    def test_unknown_day(self, client):
        r = client.get(
            "/api/days/2013-05-01/window",
            params={"from": "2013-05-01T09:00:00Z", "to": "2013-05-01T10:00:00Z"},
        )
        assert r.status_code == 404


class TestMediaEndpoint:
    def test_serves_copied_media(self, client, tmp_path):
        media_dir = tmp_path / "incoming" / "media"
        media_dir.mkdir(parents=True)
        for s in range(0, 40, 10):
            (media_dir / f"{s:02d}.png").write_bytes(b"PNG" + bytes([s]))
        import json
        from pathlib import Path

        from retrace.store import AnalysisParams, ChannelPayloads, DayStore, ingest_day
        from datetime import date

        store_root = tmp_path / "store2"
        ingest_day(
            DayStore(store_root),
            date(2013, 5, 1),
            0,
            ChannelPayloads(gps_csv=GPS, images_csv=IMAGES, media_base=tmp_path / "incoming"),
            AnalysisParams(),
        )
        local = TestClient(create_app(store_root))
        r = local.get("/api/media/2013-05-01/2013-05-01%23000000")
        assert r.status_code == 200
        assert r.content == b"PNG\x00"
        assert r.headers["content-type"] == "image/png"
        assert "immutable" in r.headers["cache-control"]

    def test_missing_media_404(self, client):
        ingest(client)  # HTTP ingest carries no binaries
        r = client.get("/api/media/2013-05-01/2013-05-01%23000000")
        assert r.status_code == 404

    def test_malformed_id_404(self, client):
        ingest(client)
        assert client.get("/api/media/2013-05-01/..%2Fdaylog.json").status_code == 404


def episode(start, end, activity="work", **extra):
    body = {"start": start, "end": end, "activity": activity}
    body.update(extra)
    return body


class TestSessionEndpoints:
    def start_session(self, client):
        ingest(client)
        r = client.post("/api/days/2013-05-01/sessions")
        assert r.status_code == 201
        return r.json()["session_id"]

    def test_create_and_list(self, client):
        sid = self.start_session(client)
        assert sid == "s0001"
        assert client.get("/api/days/2013-05-01/sessions").json() == {"sessions": ["s0001"]}
        doc = client.get(f"/api/days/2013-05-01/sessions/{sid}").json()
        assert doc["state"] == "open"
        assert doc["episodes"] == []

    def test_create_for_unknown_day(self, client):
        assert client.post("/api/days/2013-05-01/sessions").status_code == 404

    def test_append_episode(self, client):
        sid = self.start_session(client)
        r = client.post(
            f"/api/days/2013-05-01/sessions/{sid}/episodes",
            json=episode(
                "2013-05-01T08:00:00Z", "2013-05-01T09:00:00Z",
                activity="breakfast", affect={"valence": 5},
            ),
        )
        assert r.status_code == 201
        body = r.json()
        assert body["episodes"][0]["episode_id"] == "e0001"
        assert body["episodes"][0]["affect"] == {"valence": 5}

    def test_chronology_violation_409(self, client):
        sid = self.start_session(client)
        url = f"/api/days/2013-05-01/sessions/{sid}/episodes"
        client.post(url, json=episode("2013-05-01T08:00:00Z", "2013-05-01T09:00:00Z"))
        r = client.post(url, json=episode("2013-05-01T07:00:00Z", "2013-05-01T07:30:00Z"))
        assert r.status_code == 409

    def test_invalid_episode_400(self, client):
        sid = self.start_session(client)
        url = f"/api/days/2013-05-01/sessions/{sid}/episodes"
        r = client.post(url, json=episode("2013-05-01T09:00:00Z", "2013-05-01T08:00:00Z"))
        assert r.status_code == 400
        r = client.post(
            url,
            json=episode("2013-05-01T08:00:00Z", "2013-05-01T09:00:00Z", affect={"valence": 9}),
        )
        assert r.status_code == 400
        r = client.post(url, json=episode("2013-05-01T08:00:00Z", "noonish"))
        assert r.status_code == 400

    def test_out_of_day_400(self, client):
        sid = self.start_session(client)
        r = client.post(
            f"/api/days/2013-05-01/sessions/{sid}/episodes",
            json=episode("2013-05-01T23:00:00Z", "2013-05-02T01:00:00Z"),
        )
        assert r.status_code == 400

    def test_amend_last(self, client):
        sid = self.start_session(client)
        url = f"/api/days/2013-05-01/sessions/{sid}"
        client.post(f"{url}/episodes", json=episode("2013-05-01T08:00:00Z", "2013-05-01T09:00:00Z"))
        r = client.put(
            f"{url}/episodes/last",
            json=episode("2013-05-01T08:00:00Z", "2013-05-01T09:30:00Z", activity="longer"),
        )
        assert r.status_code == 200
        body = r.json()
        assert body["episodes"][0]["end"] == "2013-05-01T09:30:00Z"
        assert body["episodes"][0]["episode_id"] == "e0001"

    def test_amend_empty_409(self, client):
        sid = self.start_session(client)
        r = client.put(
            f"/api/days/2013-05-01/sessions/{sid}/episodes/last",
            json=episode("2013-05-01T08:00:00Z", "2013-05-01T09:00:00Z"),
        )
        assert r.status_code == 409

    def test_finalize_and_block(self, client):
        sid = self.start_session(client)
        url = f"/api/days/2013-05-01/sessions/{sid}"
        client.post(f"{url}/episodes", json=episode("2013-05-01T08:00:00Z", "2013-05-01T09:00:00Z"))
        r = client.post(f"{url}/finalize")
        assert r.status_code == 200
        summary = r.json()
        assert summary["count"] == 2
        assert summary["total_uncovered_s"] == 82800.0
        assert client.post(f"{url}/finalize").status_code == 409
        r = client.post(f"{url}/episodes", json=episode("2013-05-01T10:00:00Z", "2013-05-01T11:00:00Z"))
        assert r.status_code == 409

    def test_mutations_survive_reload(self, client, tmp_path):
        sid = self.start_session(client)
        url = f"/api/days/2013-05-01/sessions/{sid}"
        client.post(f"{url}/episodes", json=episode("2013-05-01T08:00:00Z", "2013-05-01T09:00:00Z"))
        fresh = TestClient(create_app(tmp_path / "store"))
        doc = fresh.get(url).json()
        assert len(doc["episodes"]) == 1

    def test_unknown_session_404(self, client):
        ingest(client)
        assert client.get("/api/days/2013-05-01/sessions/s9999").status_code == 404

    def test_export_csv_and_json(self, client):
        sid = self.start_session(client)
        url = f"/api/days/2013-05-01/sessions/{sid}"
        client.post(
            f"{url}/episodes",
            json=episode(
                "2013-05-01T08:00:00Z", "2013-05-01T09:00:00Z", affect={"valence": 5}
            ),
        )
        r = client.get(f"{url}/export", params={"format": "csv"})
        assert r.status_code == 200
        assert r.headers["content-type"].startswith("text/csv")
        assert "attachment" in r.headers["content-disposition"]
        assert r.text.splitlines()[0] == "episode_id,start,end,activity,notes,valence"
        r = client.get(f"{url}/export", params={"format": "json"})
        assert r.status_code == 200
        assert r.json()["episodes"][0]["episode_id"] == "e0001"

    def test_export_unknown_format_400(self, client):
        sid = self.start_session(client)
        r = client.get(
            f"/api/days/2013-05-01/sessions/{sid}/export", params={"format": "xml"}
        )
        assert r.status_code == 400


class TestStaticUi:
    def test_mounted_when_directory_given(self, tmp_path):
        ui = tmp_path / "ui"
        ui.mkdir()
        (ui / "index.html").write_text("<!doctype html><title>review</title>")
        client = TestClient(create_app(tmp_path / "store", ui_dir=ui))
        r = client.get("/")
        assert r.status_code == 200
        assert "review" in r.text

    def test_absent_by_default(self, client):
        assert client.get("/").status_code == 404
