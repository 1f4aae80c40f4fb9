from orbitnet.apps.simulate import EXIT_CONFIG_ERROR, EXIT_OK, main
from orbitnet.event_log import EventLog
import pandas as pd
import tempfile
import pytest
import json
import os


def test_unknown_scenario_is_a_config_error():
    with tempfile.TemporaryDirectory() as temp_dir:
        assert main(["snapshot", "--scenario", "jupiter", "--out", os.path.join(temp_dir, "s.csv")]) == \
            EXIT_CONFIG_ERROR


def test_snapshot_command():
    with tempfile.TemporaryDirectory() as temp_dir:
        path = os.path.join(temp_dir, "walker.csv")
        assert main(["snapshot", "--scenario", "walker", "--time", "0", "--out", path]) == EXIT_OK
        frame = pd.read_csv(path)
        assert (frame["record"] == "node").sum() == 78
        assert (frame["kind"] == "ISL").sum() == 132
        assert main(["snapshot", "--scenario", "walker", "--time", "99999", "--out", path]) == EXIT_CONFIG_ERROR


def test_run_then_summarize():
    with tempfile.TemporaryDirectory() as temp_dir:
        log_path = os.path.join(temp_dir, "walker.jsonl.gz")
        summary_path = os.path.join(temp_dir, "summary.csv")
        assert main(["run", "--scenario", "walker", "--delivery", "best-effort", "--duration", "30",
                     "--out", log_path, "--summary-out", summary_path]) == EXIT_OK
        log = EventLog.create_from_file(log_path)
        assert log.records[-1].kind == "SimulationEnd"
        assert log.records[-1].time == 30.0
        table = pd.read_csv(summary_path)
        assert list(table["Scenario"]) == ["walker"]
        assert list(table["Delivery"]) == ["best-effort"]

        saturation_path = os.path.join(temp_dir, "saturation.csv")
        assert main(["summarize", "--logs", log_path, "--saturation", "0", "1", "--bin", "10",
                     "--saturation-out", saturation_path]) == EXIT_OK
        series = pd.read_csv(saturation_path)
        assert list(series["Bin Start (s)"]) == [0.0, 10.0, 20.0]
        assert ((series["Utilization (%)"] >= 0) & (series["Utilization (%)"] <= 100)).all()


def test_run_config_errors():
    with tempfile.TemporaryDirectory() as temp_dir:
        assert main(["run", "--scenario", "walker", "--aggregate-only",
                     "--out", os.path.join(temp_dir, "log.jsonl")]) == EXIT_CONFIG_ERROR
        config_path = os.path.join(temp_dir, "config.json")
        with open(config_path, "w") as f:
            json.dump({"bogus": 1}, f)
        assert main(["run", "--scenario", "walker", "--config", config_path]) == EXIT_CONFIG_ERROR
        assert main(["run", "--scenario", "walker", "--tle-file", config_path]) == EXIT_CONFIG_ERROR
        assert main(["run", "--scenario", "walker", "--config", os.path.join(temp_dir, "missing.json")]) == \
            EXIT_CONFIG_ERROR


def test_summarize_malformed_log():
    with tempfile.TemporaryDirectory() as temp_dir:
        path = os.path.join(temp_dir, "broken.jsonl")
        with open(path, "w") as f:
            f.write("{not json\n")
        assert main(["summarize", "--logs", path]) == EXIT_CONFIG_ERROR


def test_config_file_overrides():
    with tempfile.TemporaryDirectory() as temp_dir:
        config_path = os.path.join(temp_dir, "config.json")
        with open(config_path, "w") as f:
            json.dump({"duration_s": 20.0, "delivery_mode": "best-effort"}, f)
        summary_path = os.path.join(temp_dir, "summary.csv")
        assert main(["run", "--scenario", "walker", "--config", config_path, "--aggregate-only",
                     "--summary-out", summary_path]) == EXIT_OK
        assert list(pd.read_csv(summary_path)["Delivery"]) == ["best-effort"]


@pytest.mark.slow_suit
def test_batch_command():
    with tempfile.TemporaryDirectory() as temp_dir:
        summary_path = os.path.join(temp_dir, "batch.csv")
        assert main(["batch", "--scenarios", "walker", "--modes", "best-effort", "saf", "--duration", "10",
                     "--workers", "1", "--summary-out", summary_path]) == EXIT_OK
        table = pd.read_csv(summary_path)
        assert list(table["Delivery"]) == ["best-effort", "saf"]
