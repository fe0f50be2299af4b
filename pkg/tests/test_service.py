import pytest
from fastapi.testclient import TestClient

from friendaudit.rules import canonical_rule_table
from friendaudit.service import create_app
from friendaudit.session import SessionConfig, replay_session

NOP = {"q1": "Frequently", "q2": "Frequently", "q3": "Disagree", "q4": "Disagree", "q5": "Disagree"}
STRANGER = {"q1": "Never", "q2": "Never", "q3": "Disagree", "q4": "DontKnow", "q5": "Disagree"}
FEED_ABUSER = {"q1": "Occasionally", "q2": "Frequently", "q3": "Disagree", "q4": "Disagree", "q5": "Agree"}
TIMINGS = [4.0] * 5


@pytest.fixture(scope="module")
def config():
    return SessionConfig(
        rule_table=canonical_rule_table(sandbox_enabled=True), sample_size=4
    )


@pytest.fixture(scope="module")
def client(small_population, config):
    snapshot, _ = small_population
    return TestClient(create_app(snapshot, config))


@pytest.fixture
def participant(small_population):
    snapshot, _ = small_population
    return sorted(snapshot.users)[0]


def start(client, participant, seed=1, **extra):
    resp = client.post(
        "/sessions",
        json={"participant_id": participant, "seed": seed, **extra},
    )
    assert resp.status_code == 200, resp.text
    return resp.json()


def answer_current(client, session_id, responses):
    step = client.get(f"/sessions/{session_id}/next").json()["next"]
    assert step["kind"] == "questionnaire"
    resp = client.post(
        f"/sessions/{session_id}/responses",
        json={"friend_id": step["friend_id"], "responses": responses, "timings": TIMINGS},
    )
    assert resp.status_code == 200, resp.text
    return resp.json()


class TestHealthAndCreate:
    def test_health(self, client):
        body = client.get("/health").json()
        assert body["status"] == "ok"

    def test_create_returns_questionnaire(self, client, participant):
        body = start(client, participant)
        assert body["status"] == "InProgress"
        assert body["queue_length"] == 4
        step = body["next"]
        assert step["kind"] == "questionnaire"
        assert [q["index"] for q in step["questions"]] == [1, 2, 3, 4, 5]
        for q in step["questions"]:
            expected = (
                ["Frequently", "Occasionally", "NotAnymore", "Never", "DontRemember"]
                if q["index"] <= 2
                else ["Agree", "Disagree", "DontKnow"]
            )
            assert q["answers"] == expected

    def test_unknown_participant(self, client):
        resp = client.post(
            "/sessions", json={"participant_id": "nobody", "seed": 1}
        )
        assert resp.status_code == 400
        assert resp.json()["code"] == "BadRequest"

    def test_unknown_session(self, client):
        resp = client.get("/sessions/no-such-session/next")
        assert resp.status_code == 404


class TestQuestionnaireFlow:
    def test_nop_advances(self, client, participant):
        body = start(client, participant, seed=21)
        session_id = body["session_id"]
        body = answer_current(client, session_id, NOP)
        assert body["suggestion"] is None
        assert body["position"] == 1

    def test_abuse_triggers_suggestion_with_reasons(self, client, participant):
        session_id = start(client, participant, seed=22)["session_id"]
        body = answer_current(client, session_id, FEED_ABUSER)
        suggestion = body["suggestion"]
        assert suggestion["action"] == "Unfollow"
        assert suggestion["matched_rule"] == 15
        assert suggestion["reasons"]
        assert "Ignore" in suggestion["compatible_decisions"]
        assert len(suggestion["ignore_reasons"]) == 4

    def test_stranger_screen_offers_both(self, client, participant):
        session_id = start(client, participant, seed=23)["session_id"]
        body = answer_current(client, session_id, STRANGER)
        suggestion = body["suggestion"]
        assert suggestion["action"] == "UnfriendOrSandbox"
        assert set(suggestion["compatible_decisions"]) == {
            "Unfriend", "Sandbox", "Ignore"
        }

    def test_decision_updates_state(self, client, participant):
        session_id = start(client, participant, seed=24)["session_id"]
        body = answer_current(client, session_id, STRANGER)
        friend_id = body["suggestion"]["friend_id"]
        resp = client.post(
            f"/sessions/{session_id}/decision",
            json={"friend_id": friend_id, "decision": "Sandbox"},
        )
        assert resp.status_code == 200
        assert resp.json()["state"] == {
            "is_friend": True,
            "user_sees_friend": False,
            "friend_sees_user": False,
        }

    def test_ignore_requires_reason(self, client, participant):
        session_id = start(client, participant, seed=25)["session_id"]
        body = answer_current(client, session_id, FEED_ABUSER)
        friend_id = body["suggestion"]["friend_id"]
        resp = client.post(
            f"/sessions/{session_id}/decision",
            json={"friend_id": friend_id, "decision": "Ignore"},
        )
        assert resp.status_code == 400
        resp = client.post(
            f"/sessions/{session_id}/decision",
            json={
                "friend_id": friend_id,
                "decision": "Ignore",
                "ignore_reason": "AgreeButLater",
            },
        )
        assert resp.status_code == 200

    def test_incompatible_decision(self, client, participant):
        session_id = start(client, participant, seed=26)["session_id"]
        body = answer_current(client, session_id, FEED_ABUSER)
        friend_id = body["suggestion"]["friend_id"]
        resp = client.post(
            f"/sessions/{session_id}/decision",
            json={"friend_id": friend_id, "decision": "Restrict"},
        )
        assert resp.status_code == 400

    def test_out_of_order_conflict(self, client, participant):
        session_id = start(client, participant, seed=27)["session_id"]
        step = client.get(f"/sessions/{session_id}/next").json()["next"]
        wrong = "definitely-not-" + step["friend_id"]
        resp = client.post(
            f"/sessions/{session_id}/responses",
            json={"friend_id": wrong, "responses": NOP, "timings": TIMINGS},
        )
        assert resp.status_code == 409
        assert resp.json()["code"] == "Conflict"

    def test_decision_without_suggestion_conflict(self, client, participant):
        session_id = start(client, participant, seed=28)["session_id"]
        resp = client.post(
            f"/sessions/{session_id}/decision",
            json={"friend_id": "anyone", "decision": "Unfollow"},
        )
        assert resp.status_code == 409

    def test_bad_answer_label(self, client, participant):
        session_id = start(client, participant, seed=29)["session_id"]
        step = client.get(f"/sessions/{session_id}/next").json()["next"]
        resp = client.post(
            f"/sessions/{session_id}/responses",
            json={
                "friend_id": step["friend_id"],
                "responses": {**NOP, "q1": "Sometimes"},
                "timings": TIMINGS,
            },
        )
        assert resp.status_code == 400


class TestCompletionAndLog:
    def run_to_completion(self, client, session_id):
        while True:
            step = client.get(f"/sessions/{session_id}/next").json()["next"]
            if step["kind"] == "complete":
                return step
            if step["kind"] == "questionnaire":
                answer_current(client, session_id, NOP)
            else:
                client.post(
                    f"/sessions/{session_id}/decision",
                    json={"friend_id": step["friend_id"], "decision": step["action"]},
                )

    def test_summary_conflict_until_complete(self, client, participant):
        session_id = start(client, participant, seed=31)["session_id"]
        assert client.get(f"/sessions/{session_id}/summary").status_code == 409
        self.run_to_completion(client, session_id)
        assert client.get(f"/sessions/{session_id}/summary").status_code == 200

    def test_complete_step_carries_summary(self, client, participant):
        session_id = start(client, participant, seed=32)["session_id"]
        step = self.run_to_completion(client, session_id)
        assert set(step["summary"]) == {"actions", "ignore_reasons"}

    def test_submissions_after_complete_conflict(self, client, participant):
        session_id = start(client, participant, seed=33)["session_id"]
        self.run_to_completion(client, session_id)
        resp = client.post(
            f"/sessions/{session_id}/responses",
            json={"friend_id": "anyone", "responses": NOP, "timings": TIMINGS},
        )
        assert resp.status_code == 409

    def test_log_replays_byte_identical(
        self, client, participant, small_population, config
    ):
        snapshot, _ = small_population
        session_id = start(client, participant, seed=34)["session_id"]
        step = client.get(f"/sessions/{session_id}/next").json()["next"]
        answer_current(client, session_id, FEED_ABUSER)
        client.post(
            f"/sessions/{session_id}/decision",
            json={"friend_id": step["friend_id"], "decision": "Unfollow"},
        )
        self.run_to_completion(client, session_id)
        log = client.get(f"/sessions/{session_id}/log").text
        assert replay_session(log, snapshot, config=config).log_text() == log
