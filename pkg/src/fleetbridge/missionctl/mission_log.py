"""Mission log: newline-delimited JSON records with a chained tick digest.

Record kinds:
  header     config (embedded verbatim), config hash, seed, version
  op_event   one operator UI event at its tick (replay feeds these back)
  env        one routed envelope, full canonical body
  env_digest routed envelope recorded by hash only (camera/view payloads)
  deliver    recipients of a detection envelope (fan-out metrics)
  tick       chained digest over sim state + this tick's envelope stream
  end        run result summary and the final digest

The digest chain makes any tampering or divergence show up at the first
affected tick during replay.  Paths ending in .gz are gzip-compressed.
"""

from __future__ import annotations

import gzip
import hashlib
import json
from dataclasses import dataclass, field

from ..messages import Envelope, canonical_json, envelope_to_obj

LOG_VERSION = 1

# Bulky payload kinds are logged by digest; replay regenerates and re-hashes.
DIGEST_ONLY_KINDS = ("camera_frame", "view_model")


def _open(path: str, mode: str):
    if str(path).endswith(".gz"):
        return gzip.open(path, mode + "t", encoding="utf-8")
    return open(path, mode, encoding="utf-8")


def envelope_record(tick: int, env: Envelope) -> dict:
    obj = envelope_to_obj(env)
    if env.kind in DIGEST_ONLY_KINDS:
        body = canonical_json(obj)
        return {"rec": "env_digest", "tick": tick, "topic": env.topic,
                "sender": env.sender, "seq": env.seq, "kind": env.kind,
                "stamp": env.stamp,
                "sha256": hashlib.sha256(body).hexdigest()}
    return {"rec": "env", "tick": tick, "env": obj}


def record_env_sha(record: dict) -> str:
    """The envelope hash a record contributes to the tick digest."""
    if record["rec"] == "env_digest":
        return record["sha256"]
    return hashlib.sha256(canonical_json(record["env"])).hexdigest()


@dataclass
class TickTrace:
    """Everything that happened during one tick, in order."""

    tick: int
    op_events: list[dict] = field(default_factory=list)
    envelopes: list[dict] = field(default_factory=list)
    delivers: list[dict] = field(default_factory=list)
    digest: str = ""


def chain_digest(prev_hex: str, state_bytes: bytes,
                 env_shas: list[str]) -> str:
    h = hashlib.sha256()
    h.update(prev_hex.encode("ascii"))
    h.update(state_bytes)
    for sha in env_shas:
        h.update(sha.encode("ascii"))
    return h.hexdigest()


class MissionLogWriter:
    def __init__(self, path: str, config_raw: dict, config_sha256: str,
                 seed: int, scenario: str):
        self._fh = _open(path, "w")
        self.path = path
        self._write({"rec": "header", "version": LOG_VERSION,
                     "scenario": scenario, "seed": seed,
                     "config_sha256": config_sha256, "config": config_raw})

    def _write(self, obj: dict) -> None:
        self._fh.write(json.dumps(obj, sort_keys=True, separators=(",", ":")))
        self._fh.write("\n")

    def write_trace(self, trace: TickTrace) -> None:
        for rec in trace.op_events:
            self._write(rec)
        for rec in trace.envelopes:
            self._write(rec)
        for rec in trace.delivers:
            self._write(rec)
        self._write({"rec": "tick", "tick": trace.tick,
                     "digest": trace.digest})

    def finish(self, result: dict, final_digest: str) -> None:
        self._write({"rec": "end", "result": result,
                     "final_digest": final_digest})
        self._fh.close()


@dataclass
class MissionLog:
    """Parsed log: header plus per-tick traces."""

    header: dict
    traces: list[TickTrace]
    end: dict | None

    @property
    def final_digest(self) -> str:
        if self.end is not None:
            return self.end["final_digest"]
        return self.traces[-1].digest if self.traces else ""

    def iter_envelope_records(self):
        for trace in self.traces:
            for rec in trace.envelopes:
                yield trace.tick, rec

    def op_events(self) -> list[dict]:
        out = []
        for trace in self.traces:
            out.extend(trace.op_events)
        return out


class LogFormatError(Exception):
    pass


def load_log(path: str) -> MissionLog:
    header = None
    end = None
    traces: list[TickTrace] = []
    current = TickTrace(tick=0)
    with _open(path, "r") as fh:
        for line_no, line in enumerate(fh, 1):
            line = line.strip()
            if not line:
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise LogFormatError(f"line {line_no}: not JSON ({exc})")
            rec = obj.get("rec")
            if rec == "header":
                if obj.get("version") != LOG_VERSION:
                    raise LogFormatError(
                        f"log version {obj.get('version')!r} is not "
                        f"{LOG_VERSION}")
                header = obj
            elif rec == "op_event":
                current.op_events.append(obj)
            elif rec in ("env", "env_digest"):
                current.envelopes.append(obj)
            elif rec == "deliver":
                current.delivers.append(obj)
            elif rec == "tick":
                current.tick = obj["tick"]
                current.digest = obj["digest"]
                traces.append(current)
                current = TickTrace(tick=obj["tick"] + 1)
            elif rec == "end":
                end = obj
            else:
                raise LogFormatError(f"line {line_no}: unknown record {rec!r}")
    if header is None:
        raise LogFormatError("log has no header record")
    return MissionLog(header=header, traces=traces, end=end)
