#!/usr/bin/env python3
"""Generate the console's cross-language wire fixtures.

The browser console must emit byte-identical envelopes to the headless
operator path for the same event timeline.  This script produces the
reference bytes with the Python codec; the TypeScript tests replay the
same timeline through the console's encoder and compare byte-for-byte.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

from fleetbridge.messages import Envelope, UiEvent, encode_json, envelope_to_obj

OPERATOR = "io"
SENDER = f"{OPERATOR}.console"

# One entry per console-emittable interaction; stamps sit on the sim
# clock grid (multiples of 0.05) including a float-noise case.
TIMELINE = [
    (0.5, "open_label", "rover", {}),
    (0.7, "begin_teleop", "rover", {}),
    (1.0, "open_live_view", "rover", {"camera": 0}),
    (1.1, "joystick", "rover", {"dx": 0.15, "dy": 0.0, "dyaw": 0.0}),
    (1.2, "joystick", "rover", {"dx": 0.075, "dy": 0.0, "dyaw": -0.393}),
    (56 * 0.05, "joystick", "rover", {"dx": -0.15, "dy": 0.0, "dyaw": 1.571}),
    (3.0, "joystick_release", "rover", {}),
    (3.1, "close_live_view", "rover", {}),
    (3.2, "end_teleop", "rover", {}),
    (4.0, "waypoint_open", "rover", {}),
    (4.1, "waypoint_adjust", "", {"steps": 19}),
    (4.2, "waypoint_lock", "", {}),
    (4.3, "waypoint_unlock", "", {}),
    (4.4, "waypoint_add", "", {}),
    (4.5, "waypoint_adjust", "", {"steps": -1}),
    (4.6, "waypoint_add", "", {}),
    (4.7, "waypoint_send", "", {}),
    (5.0, "waypoint_open", "rover", {}),
    (5.1, "waypoint_cancel", "", {}),
    (6.0, "follow_me", "rover", {}),
    (7.5, "stop", "rover", {}),
    (8.0, "close_label", "rover", {}),
]


def build() -> dict:
    entries = []
    seq = 0
    topic = f"/{OPERATOR}/ui"
    for stamp, event, agent, data in TIMELINE:
        seq += 1
        env = Envelope(topic=topic, sender=SENDER, seq=seq, stamp=stamp,
                       kind="ui_event",
                       payload=UiEvent(event=event, agent=agent, data=data))
        entries.append({
            "name": f"{seq:02d}_{event}",
            "envelope": envelope_to_obj(env),
            "canonical": encode_json(env).decode("ascii"),
        })
    return {"operator": OPERATOR, "sender": SENDER, "topic": topic,
            "entries": entries}


def main(out_dir: str) -> None:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    doc = build()
    (out / "ui_event_envelopes.json").write_text(
        json.dumps(doc, indent=2, sort_keys=True) + "\n")
    print(f"wrote {out / 'ui_event_envelopes.json'} "
          f"({len(doc['entries'])} entries)")


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1
         else "frontend/test/fixtures")
