import json

import pytest
from fastapi.testclient import TestClient

from kbdebug.service import create_app

from .conftest import FIXTURES

KB_TEXT = (FIXTURES / "university.kb").read_text(encoding="utf-8")

RIO_DOC = {
    "kb": KB_TEXT,
    "strategy": "rio",
    "c": 0.4,
    "c_min": 0.0,
    "c_max": 0.5,
    "epsilon": 0.25,
    "stop": "singleton",
}


@pytest.fixture()
def client():
    return TestClient(create_app())


class TargetD2Oracle:
    """Answers queries the way the intended KB without ax2 would."""

    def __init__(self):
        from kbdebug.formulas import parse_kb
        from kbdebug.reasoner import Reasoner

        kb = parse_kb(KB_TEXT)
        self.reasoner = Reasoner(kb)
        self.repaired = frozenset(kb.by_id) - {"ax2"}
        self.tp = frozenset()

    def answer(self, literal_names):
        from kbdebug.reasoner import Literal

        literals = frozenset(Literal(name, True) for name in literal_names)
        if self.reasoner.entails(self.repaired, literals, self.tp):
            self.tp |= literals
            return "yes"
        return "no"


def drive_to_finish(client, snap):
    """Answer every pending query per the D2 oracle; returns (final, answers)."""
    oracle = TargetD2Oracle()
    sid = snap["id"]
    answers = []
    while snap["status"] == "awaiting-answer":
        answer = oracle.answer(snap["query"]["literals"])
        answers.append(answer)
        resp = client.post(f"/sessions/{sid}/answer",
                           json={"answer": answer, "round": snap["round"]})
        assert resp.status_code == 200, resp.text
        snap = resp.json()
    return snap, answers


def create(client, doc):
    resp = client.post("/sessions", json=doc)
    assert resp.status_code == 201, resp.text
    return resp.json()


class TestCreate:
    def test_entropy_first_query(self, client):
        snap = create(client, {"kb": KB_TEXT, "strategy": "entropy"})
        assert snap["status"] == "awaiting-answer"
        assert snap["round"] == 0
        assert snap["query"]["literals"] == ["DeptEmployee", "Student"]
        assert len(snap["diagnoses"]) == 6

    def test_consistent_kb_is_422(self, client):
        resp = client.post("/sessions", json={"kb": "axiom a : X -> Y\n"})
        assert resp.status_code == 422
        assert set(resp.json()) == {"code", "message"}

    def test_bad_strategy_is_400(self, client):
        resp = client.post("/sessions", json={"kb": KB_TEXT, "strategy": "nope"})
        assert resp.status_code == 400

    def test_malformed_body_is_400(self, client):
        resp = client.post("/sessions", content=b"{not json",
                           headers={"content-type": "application/json"})
        assert resp.status_code == 400

    def test_kb_syntax_error_is_400(self, client):
        resp = client.post("/sessions", json={"kb": "axiom broken : ->\n"})
        assert resp.status_code == 400

    def test_unknown_oracle_target_is_400(self, client):
        resp = client.post("/sessions", json={"kb": KB_TEXT, "oracle_target": ["zz"]})
        assert resp.status_code == 400


class TestAnswerFlow:
    def test_rio_trace_to_result(self, client):
        snap = create(client, RIO_DOC)
        sid = snap["id"]
        assert snap["query"]["literals"] == ["Researcher", "Student"]
        assert snap["cautiousness"]["c"] == pytest.approx(0.4)

        snap = client.post(f"/sessions/{sid}/answer",
                           json={"answer": "yes", "round": 0}).json()
        assert snap["cautiousness"]["c"] == pytest.approx(0.2333, abs=0.005)
        final, answers = drive_to_finish(client, snap)
        assert final["status"] == "finished"
        assert final["result"] == ["ax2"]
        assert len(final["history"]) == 3
        assert len(answers) == 2

    def test_duplicate_post_is_idempotent(self, client):
        sid = create(client, RIO_DOC)["id"]
        first = client.post(f"/sessions/{sid}/answer",
                            json={"answer": "yes", "round": 0})
        again = client.post(f"/sessions/{sid}/answer",
                            json={"answer": "yes", "round": 0})
        assert first.status_code == again.status_code == 200
        assert again.json()["round"] == 1

    def test_conflicting_duplicate_is_409(self, client):
        sid = create(client, RIO_DOC)["id"]
        client.post(f"/sessions/{sid}/answer", json={"answer": "yes", "round": 0})
        resp = client.post(f"/sessions/{sid}/answer", json={"answer": "no", "round": 0})
        assert resp.status_code == 409

    def test_wrong_round_is_409(self, client):
        sid = create(client, RIO_DOC)["id"]
        resp = client.post(f"/sessions/{sid}/answer", json={"answer": "yes", "round": 5})
        assert resp.status_code == 409

    def test_answer_after_finish_is_409(self, client):
        snap = create(client, RIO_DOC)
        final, _ = drive_to_finish(client, snap)
        resp = client.post(f"/sessions/{snap['id']}/answer",
                           json={"answer": "yes", "round": final["round"]})
        assert resp.status_code == 409

    def test_bad_payload_is_400(self, client):
        sid = create(client, RIO_DOC)["id"]
        assert client.post(f"/sessions/{sid}/answer",
                           json={"answer": "maybe", "round": 0}).status_code == 400
        assert client.post(f"/sessions/{sid}/answer",
                           json={"answer": "yes"}).status_code == 400

    def test_unknown_session_is_404(self, client):
        assert client.post("/sessions/nope/answer",
                           json={"answer": "yes", "round": 0}).status_code == 404


class TestGetDelete:
    def test_get_roundtrip(self, client):
        sid = create(client, RIO_DOC)["id"]
        snap = client.get(f"/sessions/{sid}").json()
        assert snap["id"] == sid
        assert snap["status"] == "awaiting-answer"

    def test_get_unknown_is_404(self, client):
        assert client.get("/sessions/nope").status_code == 404

    def test_delete_then_get_is_404(self, client):
        sid = create(client, RIO_DOC)["id"]
        assert client.delete(f"/sessions/{sid}").status_code == 200
        assert client.get(f"/sessions/{sid}").status_code == 404
        assert client.delete(f"/sessions/{sid}").status_code == 404


class TestBlindTarget:
    def test_snapshots_never_reveal_hidden_target(self, client):
        doc = dict(RIO_DOC, oracle_target=["ax2"])
        snap = create(client, doc)
        sid = snap["id"]
        snapshots = [snap, client.get(f"/sessions/{sid}").json()]
        oracle = TargetD2Oracle()
        while snap["status"] == "awaiting-answer":
            answer = oracle.answer(snap["query"]["literals"])
            snap = client.post(f"/sessions/{sid}/answer",
                               json={"answer": answer, "round": snap["round"]}).json()
            snapshots.append(snap)
        for s in snapshots:
            assert "oracle_target" not in json.dumps(s)
            assert "target" not in set(s)


class TestTranscriptWriteThrough:
    def test_finished_session_written_to_disk(self, tmp_path):
        client = TestClient(create_app(transcript_dir=str(tmp_path)))
        snap = create(client, RIO_DOC)
        sid = snap["id"]
        drive_to_finish(client, snap)
        path = tmp_path / f"{sid}.json"
        doc = json.loads(path.read_text(encoding="utf-8"))
        assert doc["result"] == ["ax2"]
        assert doc["metrics"]["queries"] == 3


def test_api_transcript_matches_direct_session(tmp_path):
    """The same answer sequence through HTTP and the library yields identical
    untimed transcripts."""
    from kbdebug.diagnosis import Dpi
    from kbdebug.formulas import parse_kb
    from kbdebug.session import Session, SessionConfig
    from kbdebug.strategy import CautiousnessParams

    client = TestClient(create_app(transcript_dir=str(tmp_path)))
    snap = create(client, RIO_DOC)
    sid = snap["id"]
    _, answers = drive_to_finish(client, snap)
    api_doc = json.loads((tmp_path / f"{sid}.json").read_text(encoding="utf-8"))
    for rnd in api_doc["rounds"]:
        rnd.pop("react_ms")
    api_doc["metrics"].pop("debug_ms")

    session = Session(SessionConfig(
        dpi=Dpi(parse_kb(KB_TEXT)), strategy="rio",
        cautiousness=CautiousnessParams(0.4, 0.0, 0.5, 0.25),
    ))
    for answer in answers:
        session.submit_answer(answer)
    assert api_doc == session.transcript(include_timing=False)
