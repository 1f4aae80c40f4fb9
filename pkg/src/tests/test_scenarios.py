from orbitnet.errors import InvalidWalkerParamsError, ScenarioValidationError, UnknownScenarioError
from orbitnet.actors.traffic import PointToPointFlow
from orbitnet.mobility.centers import SPEED_OF_LIGHT_KM_S
from orbitnet.scenarios import (SCENARIOS, DeliveryMode, apply_config, build_simulation, create_scenario,
                                topology_snapshot, validate_scenario)
from orbitnet.scenarios.ccsds import build_earth_observation
from orbitnet.scenarios.custom import SYNTHETIC_TLE_PATH, build_cubesat, build_walker
from dataclasses import replace
import numpy as np
import tempfile
import pytest
import os


@pytest.mark.parametrize("name", sorted(SCENARIOS))
def test_every_scenario_builds_and_validates(name):
    spec = create_scenario(name)
    validate_scenario(spec)
    assert spec.name == name
    assert spec.flows or spec.random_traffic


def test_earth_observation_nodes():
    spec = build_earth_observation()
    assert [spec.mobility.node_name(node) for node in range(spec.mobility.node_count)] == [
        "control/pcc", "control/mcc", "stations/gs1", "stations/gs2", "eo/eo-sat"]
    payload = spec.flows[0]
    assert (payload.source, payload.destination) == (spec.node_id("eo/eo-sat"), spec.node_id("control/pcc"))
    assert payload.message_size_bits == 80_000_000
    assert payload.interval_s == 11.5


@pytest.mark.parametrize("name, node_count", [("earth-observation", 5), ("lunar", 10), ("mars", 10),
                                              ("walker", 78), ("cubesat", 110)])
def test_scenario_node_counts(name, node_count):
    assert create_scenario(name).mobility.node_count == node_count


@pytest.mark.parametrize("name", ["walker", "cubesat"])
def test_custom_scenarios_send_one_block_per_second(name):
    flows = create_scenario(name).flows
    assert len(flows) == 10
    assert all(flow.interval_s == 1.0 for flow in flows)
    assert all(flow.message_size_bits == 8_000_000 for flow in flows)
    assert all(flow.interval_s == 30.0 for flow in build_walker(interval_s=30.0).flows)


def test_cubesat_scenario_reads_a_given_tle_file():
    with open(SYNTHETIC_TLE_PATH) as f:
        lines = f.read().splitlines()
    with tempfile.TemporaryDirectory() as temp_dir:
        path = os.path.join(temp_dir, "cubesats.tle")
        with open(path, "w") as f:
            f.write("\n".join(lines[:6]) + "\n")
        spec = build_cubesat(tle_path=path)
    assert spec.mobility.node_count == 2 + 12
    assert spec.mobility.node_name(0) == "cubesats/SYNTH-CUBESAT-01"
    assert len(spec.flows) == 7


def test_lunar_mars_space_segment():
    mobility = create_scenario("lunar-mars").mobility
    space_nodes = [node for node in range(mobility.node_count) if not mobility.is_ground(node)]
    assert len(space_nodes) == 142


def test_interplanetary_delays():
    lunar = create_scenario("lunar").mobility
    earth_moon = np.linalg.norm(lunar.center_position("moon", 0.0) - lunar.center_position("earth", 0.0))
    assert earth_moon / SPEED_OF_LIGHT_KM_S == pytest.approx(1.282, abs=1e-3)
    mars = create_scenario("mars").mobility
    earth_mars = np.linalg.norm(mars.center_position("mars", 0.0) - mars.center_position("earth", 0.0))
    assert 180.0 <= earth_mars / SPEED_OF_LIGHT_KM_S <= 1340.0


def test_delivery_mode_swap_keeps_the_topology():
    spec = create_scenario("walker")
    best_effort = spec.with_delivery_mode(DeliveryMode.BEST_EFFORT)
    assert best_effort.delivery_mode == DeliveryMode.BEST_EFFORT
    assert best_effort.rules is spec.rules
    assert best_effort.mobility is spec.mobility
    assert best_effort.flows == spec.flows
    assert spec.delivery_mode == DeliveryMode.STORE_AND_FORWARD


def test_apply_config():
    spec = apply_config(create_scenario("walker"), {
        "delivery_mode": "ltp", "loss": 0.1, "seed": 7, "duration_s": 120.0, "lookahead_steps": 5,
        "flows": [{"source": "walker/walker-0-0", "destination": "stations/gs-0", "interval_s": 5.0}],
    })
    assert spec.delivery_mode == DeliveryMode.LTP
    assert spec.loss.default_loss_probability == 0.1
    assert spec.loss.seed == 7
    assert spec.duration_s == 120.0
    assert spec.lookahead.num_steps == 5
    assert spec.flows == [PointToPointFlow(source=0, destination=66, interval_s=5.0)]


@pytest.mark.parametrize("config", [{"colour": "red"}, {"delivery_mode": "carrier-pigeon"},
                                    {"flows": [{"source": "walker/walker-9-9", "destination": 1}]},
                                    {"flows": [{"source": 0}]}, {"loss": "lots"}])
def test_invalid_config_raises(config):
    with pytest.raises(ScenarioValidationError):
        apply_config(create_scenario("walker"), config)


def test_uncovered_link_override_fails_validation():
    # two satellites of the same plane that are not plus-grid neighbors
    spec = apply_config(create_scenario("walker"), {"link_overrides": [{"a": 0, "b": 5, "bandwidth_bps": 1e6}]})
    with pytest.raises(ScenarioValidationError):
        validate_scenario(spec)
    covered = apply_config(create_scenario("walker"), {"link_overrides": [{"a": 0, "b": 1, "bandwidth_bps": 1e6}]})
    validate_scenario(covered)


def test_invalid_scenarios_raise():
    spec = create_scenario("walker")
    with pytest.raises(ScenarioValidationError):
        validate_scenario(replace(spec, flows=[PointToPointFlow(source=0, destination=78)]))
    with pytest.raises(ScenarioValidationError):
        validate_scenario(replace(spec, duration_s=0.0))
    with pytest.raises(UnknownScenarioError):
        create_scenario("jupiter")
    with pytest.raises(ValueError):
        DeliveryMode.from_string("carrier-pigeon")
    with pytest.raises(InvalidWalkerParamsError):
        build_walker(66, 7)


def test_walker_topology_snapshot():
    frame = topology_snapshot(create_scenario("walker"), 0.0)
    assert (frame["record"] == "node").sum() == 78
    assert (frame["kind"] == "ISL").sum() == 132
    links = frame[frame["record"] == "link"]
    assert (links["delay_s"] > 0).all()
    assert (links["endpoint_a"] < links["endpoint_b"]).all()
    with pytest.raises(ScenarioValidationError):
        topology_snapshot(create_scenario("walker"), -1.0)


def walker_run_lines(duration_s: float = 60.0):
    spec = apply_config(create_scenario("walker", delivery_mode=DeliveryMode.BEST_EFFORT),
                        {"duration_s": duration_s, "loss": 0.05, "seed": 3})
    simulation = build_simulation(spec)
    simulation.run(spec.duration_s)
    return simulation.event_log.to_lines()


def test_runs_are_deterministic():
    first = walker_run_lines()
    assert first == walker_run_lines()
    assert any('"kind":"MessageReceived"' in line for line in first)


@pytest.mark.slow_suit
def test_earth_observation_best_effort_routes_through_a_station():
    spec = apply_config(build_earth_observation(delivery_mode=DeliveryMode.BEST_EFFORT), {"duration_s": 21600.0})
    summary = build_simulation(spec, aggregate_only=True).run(spec.duration_s)
    assert summary.stats.delivered > 0
    assert summary.stats.mean_hops == pytest.approx(2.0)


@pytest.mark.slow_suit
def test_walker_ltp_recovers_every_segment():
    spec = apply_config(create_scenario("walker", delivery_mode=DeliveryMode.LTP), {"duration_s": 600.0})
    summary = build_simulation(spec, aggregate_only=True).run(spec.duration_s)
    assert summary.stats.delivered > 0
    assert summary.stats.lost == 0
