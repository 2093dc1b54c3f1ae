"""The committed console wire fixtures must match regeneration, and the
fixture timeline must drive a real engine end to end."""

from __future__ import annotations

import json
import sys
from pathlib import Path

import pytest

from fleetbridge.messages import UiEvent, decode_json
from fleetbridge.opscore import OperatorEngine
from fleetbridge.relay import RelayCore

REPO = Path(__file__).parent.parent
FIXTURE = REPO / "frontend" / "test" / "fixtures" / "ui_event_envelopes.json"

sys.path.insert(0, str(REPO / "scripts"))
import gen_console_fixtures  # noqa: E402


@pytest.fixture(scope="module")
def fixture_doc():
    generated = gen_console_fixtures.build()
    if not FIXTURE.exists():
        FIXTURE.parent.mkdir(parents=True, exist_ok=True)
        FIXTURE.write_text(json.dumps(generated, indent=2, sort_keys=True)
                           + "\n")
    return generated


def test_committed_fixture_is_fresh(fixture_doc):
    committed = json.loads(FIXTURE.read_text())
    assert committed == fixture_doc


def test_fixture_bytes_decode_to_their_envelopes(fixture_doc):
    for entry in fixture_doc["entries"]:
        env = decode_json(entry["canonical"].encode("ascii"))
        assert env.kind == "ui_event"
        assert env.sender == fixture_doc["sender"]
        assert entry["canonical"].encode("ascii") \
            == __import__("fleetbridge.messages", fromlist=["encode_json"])\
            .encode_json(env)


def test_fixture_timeline_drives_an_engine(fixture_doc):
    """The recorded timeline is a valid operator session, not just bytes."""
    core = RelayCore()
    engine = OperatorEngine("io", core)
    for entry in fixture_doc["entries"]:
        payload = entry["envelope"]["payload"]
        engine.handle_ui(UiEvent(event=payload["event"],
                                 agent=payload["agent"],
                                 data=payload["data"]),
                         entry["envelope"]["stamp"])
    # the engine saw every event; unknown ones would have left a trace
    assert not any(c["event"] == "unknown_ui_event"
                   for c in engine.confirmations)
