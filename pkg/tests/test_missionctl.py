from __future__ import annotations

import copy
import json
from importlib.resources import files

import pytest
from click.testing import CliRunner

from fleetbridge.missionctl import (
    ConfigError,
    load_log,
    load_scenario,
    parse_scenario,
    replay_log,
    run_mission,
)
from fleetbridge.missionctl.cli import main as cli_main


def scenario_path(name: str) -> str:
    return str(files("fleetbridge.missionctl") / "scenarios" / f"{name}.yaml")


@pytest.fixture(scope="module")
def smoke_config():
    return load_scenario(scenario_path("smoke"))


@pytest.fixture(scope="module")
def smoke_run(smoke_config, tmp_path_factory):
    path = tmp_path_factory.mktemp("logs") / "smoke.ndjson"
    return run_mission(smoke_config, log_path=str(path)), str(path)


MINIMAL = {
    "version": 1,
    "name": "mini",
    "world": {"extent": [50.0, 50.0], "base": [5.0, 5.0],
              "objects": [{"label": "thing", "x": 20.0, "y": 20.0}]},
    "agents": [
        {"name": "rover", "kind": "UGV", "spawn": [5.0, 5.0, 0.0]},
        {"name": "pat", "kind": "HMD_USER", "spawn": [6.0, 5.0, 0.0]},
    ],
    "operators": [{"name": "pat", "script": []}],
    "success": {"objects_found": ["thing"], "return_radius": 5.0,
                "deadline": 10.0},
}


class TestConfig:
    def test_bundled_scenarios_parse(self):
        for name in ("smoke", "barrel_search"):
            cfg = load_scenario(scenario_path(name))
            assert cfg.name == name
            assert cfg.ugvs and cfg.operators

    def test_validation_reports_field_path(self):
        bad = copy.deepcopy(MINIMAL)
        bad["agents"][0]["kind"] = "DRONE"
        with pytest.raises(ConfigError) as err:
            parse_scenario(bad)
        assert "agents.0.kind" in str(err.value)

    def test_unknown_operator_agent(self):
        bad = copy.deepcopy(MINIMAL)
        bad["operators"][0]["name"] = "ghost"
        with pytest.raises(ConfigError) as err:
            parse_scenario(bad)
        assert "operators[0].name" in str(err.value)

    def test_success_label_must_exist(self):
        bad = copy.deepcopy(MINIMAL)
        bad["success"]["objects_found"] = ["unicorn"]
        with pytest.raises(ConfigError):
            parse_scenario(bad)

    def test_duplicate_agent_rejected(self):
        bad = copy.deepcopy(MINIMAL)
        bad["agents"].append(dict(bad["agents"][0]))
        with pytest.raises(ConfigError):
            parse_scenario(bad)

    def test_dt_must_divide_status_period(self):
        bad = copy.deepcopy(MINIMAL)
        bad["world"]["dt"] = 0.03
        with pytest.raises(ConfigError) as err:
            parse_scenario(bad)
        assert "dt" in str(err.value)

    def test_config_hash_stable(self):
        a = parse_scenario(copy.deepcopy(MINIMAL)).config_sha256()
        b = parse_scenario(copy.deepcopy(MINIMAL)).config_sha256()
        assert a == b


class TestRun:
    def test_smoke_succeeds(self, smoke_run):
        result, _ = smoke_run
        assert result.success
        assert result.metrics["detection_fanout"] == 1
        assert result.metrics["time_to_detection_s"] is not None
        assert result.metrics["all_at_base"]

    def test_idle_mission_fails_at_deadline(self):
        cfg = parse_scenario(copy.deepcopy(MINIMAL))
        result = run_mission(cfg)
        assert not result.success
        assert result.reason == "deadline"
        assert result.t_end == pytest.approx(10.0)

    def test_same_seed_identical_digests(self, smoke_config):
        a = run_mission(smoke_config)
        b = run_mission(smoke_config)
        assert a.final_digest == b.final_digest

    def test_different_seed_or_config_changes_digest(self, smoke_config):
        # noise sigma > 0 pulls the seeded RNG into the tf stream
        raw = copy.deepcopy(smoke_config.raw)
        raw["world"]["tf_noise_sigma"] = 0.01
        noisy = parse_scenario(raw)
        a = run_mission(noisy, seed=1)
        b = run_mission(noisy, seed=2)
        assert a.final_digest != b.final_digest


class TestReplay:
    def test_replay_passes_and_metrics_match(self, smoke_run):
        result, path = smoke_run
        report = replay_log(load_log(path))
        assert report.ok
        assert report.first_divergence is None
        assert report.metrics == result.metrics

    def test_tampered_envelope_fails_at_that_tick(self, smoke_run, tmp_path):
        _, path = smoke_run
        lines = open(path).read().splitlines()
        out, tampered_tick = [], None
        for line in lines:
            obj = json.loads(line)
            if tampered_tick is None and obj.get("rec") == "env" \
                    and obj["env"]["kind"] == "framed_pose" \
                    and obj["tick"] > 50:
                obj["env"]["payload"]["x"] += 0.25
                tampered_tick = obj["tick"]
            out.append(json.dumps(obj, sort_keys=True,
                                  separators=(",", ":")))
        bad = tmp_path / "tampered.ndjson"
        bad.write_text("\n".join(out) + "\n")
        report = replay_log(load_log(str(bad)))
        assert not report.ok
        assert report.first_divergence["tick"] == tampered_tick

    def test_version_mismatch_rejected(self, smoke_run, tmp_path):
        _, path = smoke_run
        lines = open(path).read().splitlines()
        header = json.loads(lines[0])
        header["version"] = 99
        bad = tmp_path / "vers.ndjson"
        bad.write_text("\n".join([json.dumps(header)] + lines[1:]) + "\n")
        from fleetbridge.missionctl.mission_log import LogFormatError
        with pytest.raises(LogFormatError):
            load_log(str(bad))

    def test_log_round_trip_matches_memory(self, smoke_run):
        result, path = smoke_run
        loaded = load_log(path)
        assert len(loaded.traces) == len(result.log.traces)
        for got, kept in zip(loaded.traces, result.log.traces):
            assert got.digest == kept.digest
            assert got.envelopes == kept.envelopes
            assert got.op_events == kept.op_events

    def test_gzip_log_round_trip(self, smoke_config, tmp_path):
        path = tmp_path / "smoke.ndjson.gz"
        result = run_mission(smoke_config, log_path=str(path))
        report = replay_log(load_log(str(path)))
        assert report.ok
        assert report.metrics == result.metrics


class TestCli:
    def test_run_and_replay_exit_codes(self, tmp_path):
        runner = CliRunner()
        log_path = str(tmp_path / "cli_smoke.ndjson")
        result = runner.invoke(cli_main, ["run", "smoke", "--log", log_path])
        assert result.exit_code == 0, result.output
        result = runner.invoke(cli_main, ["replay", log_path])
        assert result.exit_code == 0, result.output

    def test_failed_mission_exits_nonzero(self, tmp_path):
        cfg_path = tmp_path / "mini.yaml"
        import yaml
        raw = copy.deepcopy(MINIMAL)
        cfg_path.write_text(yaml.safe_dump(raw))
        runner = CliRunner()
        result = runner.invoke(cli_main, ["run", str(cfg_path)])
        assert result.exit_code == 1

    def test_export_geojson_cli(self, smoke_run, tmp_path):
        _, path = smoke_run
        out = tmp_path / "out.geojson"
        runner = CliRunner()
        result = runner.invoke(cli_main,
                               ["export-geojson", path, "-o", str(out)])
        assert result.exit_code == 0, result.output
        doc = json.loads(out.read_text())
        assert doc["type"] == "FeatureCollection"

    def test_unknown_scenario_is_a_clean_error(self):
        runner = CliRunner()
        result = runner.invoke(cli_main, ["run", "nope_not_here"])
        assert result.exit_code != 0
        assert "no scenario" in result.output
