from dataclasses import dataclass, field, replace
from datetime import datetime
from enum import Enum
from typing import Any, Dict, List, Optional
import math
import pandas as pd

from orbitnet.actors.ltp import LTPActor, LTPConfig
from orbitnet.actors.message_routing import MessageRoutingActor
from orbitnet.actors.traffic import PointToPointFlow, RandomTrafficSpec, TrafficActor
from orbitnet.actors.transmission import LinkTransmissionActor, LossConfig
from orbitnet.connectivity.rules import LinkDefaults, LinkParams, LinkRule, resolve_node
from orbitnet.connectivity.topology import ConnectivityModel, LinkId
from orbitnet.errors import ScenarioValidationError, UnknownLinkError, UnknownNodeError
from orbitnet.event_log import EventLog
from orbitnet.events import link_key
from orbitnet.mobility.model import MobilityModel
from orbitnet.routing.providers import (BestEffortRoutingDataProvider, LookaheadConfig,
                                        LookaheadRoutingDataProvider)
from orbitnet.simulation import Simulation, SimulationConfig
from orbitnet.utils import get_logger


logger = get_logger(__name__)


class DeliveryMode(str, Enum):
    BEST_EFFORT = "best-effort"
    STORE_AND_FORWARD = "saf"
    LTP = "ltp"

    @staticmethod
    def from_string(name: str) -> "DeliveryMode":
        for mode in DeliveryMode:
            if mode.value == name:
                return mode
        raise ValueError(f"Unknown delivery mode: {name}")


@dataclass
class ScenarioSpec:
    """
    Everything needed to build one simulation.

    :param name: scenario name
    :param mobility: centers and constellations, node ids already allocated
    :param rules: link rules over the mobility model's constellations
    :param link_defaults: global link parameters
    :param link_overrides: per-link parameters
    :param flows: constant-rate point-to-point flows
    :param random_traffic: randomised traffic specs
    :param loss: loss model and seed
    :param delivery_mode: best-effort, store-and-forward or store-and-forward with LTP
    :param duration_s: simulated seconds
    :param epoch: calendar instant of simulation time 0, None when the scenario is not anchored to one
    :param min_time_delta: minimum seconds between model refreshes
    :param lookahead: sampling of the future topology for store-and-forward routing
    :param ltp: reliable transfer configuration, used in LTP mode
    :param traffic_update_interval: seconds of traffic created per traffic tick
    :param routing_metric: "delay" or "hops" for best-effort routing
    """
    name: str
    mobility: MobilityModel
    rules: List[LinkRule]
    link_defaults: LinkDefaults = field(default_factory=LinkDefaults)
    link_overrides: Dict[LinkId, LinkParams] = field(default_factory=dict)
    flows: List[PointToPointFlow] = field(default_factory=list)
    random_traffic: List[RandomTrafficSpec] = field(default_factory=list)
    loss: LossConfig = field(default_factory=LossConfig)
    delivery_mode: DeliveryMode = DeliveryMode.STORE_AND_FORWARD
    duration_s: float = 86400.0
    epoch: Optional[datetime] = None
    min_time_delta: float = 0.01
    lookahead: LookaheadConfig = field(default_factory=lambda: LookaheadConfig(align_to_grid=True))
    ltp: LTPConfig = field(default_factory=LTPConfig)
    traffic_update_interval: float = 300.0
    routing_metric: str = "delay"

    def with_delivery_mode(self, mode: DeliveryMode) -> "ScenarioSpec":
        return replace(self, delivery_mode=mode)

    def node_id(self, name: str) -> int:
        return self.mobility.node_id(name)


def validate_scenario(spec: ScenarioSpec):
    """
    Static checks before anything is simulated: ids resolve, parameters are in range, overrides are covered by rules.

    :raises ScenarioValidationError: describing the first problem found
    """
    if not isinstance(spec.delivery_mode, DeliveryMode):
        raise ScenarioValidationError(f"Unknown delivery mode: {spec.delivery_mode}")
    if not spec.duration_s > 0 or math.isinf(spec.duration_s):
        raise ScenarioValidationError(f"Scenario duration must be positive and finite, got {spec.duration_s}")
    if spec.min_time_delta < 0:
        raise ScenarioValidationError(f"min_time_delta must be non-negative, got {spec.min_time_delta}")
    if spec.traffic_update_interval <= 0:
        raise ScenarioValidationError(f"Traffic update interval must be positive, got {spec.traffic_update_interval}")
    if spec.routing_metric not in ("delay", "hops"):
        raise ScenarioValidationError(f"Unknown routing metric: {spec.routing_metric}")
    if spec.mobility.node_count == 0:
        raise ScenarioValidationError(f"Scenario {spec.name} has no nodes")

    node_count = spec.mobility.node_count
    for flow in spec.flows:
        for node in (flow.source, flow.destination):
            if not 0 <= node < node_count:
                raise ScenarioValidationError(f"Flow endpoint {node} is not a node of {spec.name}")
        if flow.source == flow.destination:
            raise ScenarioValidationError(f"Flow from {flow.source} to itself")
    for traffic in spec.random_traffic:
        for node in (*traffic.sources, *(traffic.destinations or ())):
            if not 0 <= node < node_count:
                raise ScenarioValidationError(f"Random traffic endpoint {node} is not a node of {spec.name}")

    try:
        ConnectivityModel(spec.mobility, spec.rules, spec.link_defaults, spec.link_overrides)
    except UnknownLinkError as error:
        raise ScenarioValidationError(f"Link override not covered by any rule: {error}") from error
    except ValueError as error:
        raise ScenarioValidationError(f"Invalid link rule in {spec.name}: {error}") from error


def build_simulation(spec: ScenarioSpec, event_log: EventLog = None, aggregate_only: bool = False) -> Simulation:
    """
    Wire a validated scenario into an initialized simulation: connectivity, routing provider,
    transmission (and LTP) actor, routing actor and traffic actor, in that order.
    """
    validate_scenario(spec)
    defaults = replace(spec.link_defaults, loss_probability=spec.loss.default_loss_probability)
    connectivity = ConnectivityModel(spec.mobility, spec.rules, defaults, spec.link_overrides)
    simulation = Simulation(SimulationConfig(min_time_delta=spec.min_time_delta, end_time=spec.duration_s,
                                             rng_seed=spec.loss.seed),
                            connectivity=connectivity, event_log=event_log, aggregate_only=aggregate_only)

    if spec.delivery_mode == DeliveryMode.BEST_EFFORT:
        routing = BestEffortRoutingDataProvider(connectivity, metric=spec.routing_metric)
    else:
        routing = LookaheadRoutingDataProvider(connectivity, spec.lookahead)
    simulation.add_data_provider(routing)

    transmission = LinkTransmissionActor(connectivity, spec.loss)
    simulation.add_actor(transmission)
    link_layer = transmission
    if spec.delivery_mode == DeliveryMode.LTP:
        link_layer = LTPActor(transmission, connectivity, spec.ltp)
        simulation.add_actor(link_layer)
    simulation.add_actor(MessageRoutingActor(routing, link_layer, connectivity))
    simulation.add_actor(TrafficActor([*spec.flows, *spec.random_traffic], spec.traffic_update_interval,
                                      end_time=spec.duration_s))

    logger.info(f"Built scenario {spec.name}: {spec.mobility.node_count} nodes, "
                f"{len(connectivity.covered_links)} candidate links, delivery mode {spec.delivery_mode.value}")
    simulation.initialize(0.0)
    return simulation


CONFIG_KEYS = ("delivery_mode", "loss", "duration_s", "seed", "min_time_delta", "lookahead_resolution",
               "lookahead_steps", "bandwidth_bps", "link_overrides", "flows")


def _node(spec: ScenarioSpec, node) -> int:
    try:
        return resolve_node(spec.mobility, node)
    except UnknownNodeError as error:
        raise ScenarioValidationError(f"Unknown node in scenario config: {node}") from error


def apply_config(spec: ScenarioSpec, config: Dict[str, Any]) -> ScenarioSpec:
    """
    Apply a scenario override mapping (e.g. loaded from a JSON file) to a scenario.

    Keys: delivery_mode, loss, duration_s, seed, min_time_delta, lookahead_resolution, lookahead_steps,
    bandwidth_bps, link_overrides (list of {a, b, bandwidth_bps, loss_probability}) and
    flows (list of {source, destination, message_size_bits, interval_s, start_s, end_s, tag}, replacing the
    scenario's flows). Nodes are given by id or "<constellation>/<node>" name.
    """
    unknown = set(config) - set(CONFIG_KEYS)
    if unknown:
        raise ScenarioValidationError(f"Unknown scenario config keys: {', '.join(sorted(unknown))}")
    try:
        if "delivery_mode" in config:
            spec = replace(spec, delivery_mode=DeliveryMode.from_string(config["delivery_mode"]))
        if "loss" in config:
            spec = replace(spec, loss=replace(spec.loss, default_loss_probability=float(config["loss"])))
        if "seed" in config:
            seed = int(config["seed"])
            spec = replace(spec, loss=replace(spec.loss, seed=seed),
                           random_traffic=[replace(traffic, seed=seed + index + 1)
                                           for index, traffic in enumerate(spec.random_traffic)])
        if "duration_s" in config:
            spec = replace(spec, duration_s=float(config["duration_s"]))
        if "min_time_delta" in config:
            spec = replace(spec, min_time_delta=float(config["min_time_delta"]))
        if "lookahead_resolution" in config:
            spec = replace(spec, lookahead=replace(spec.lookahead, resolution=float(config["lookahead_resolution"])))
        if "lookahead_steps" in config:
            spec = replace(spec, lookahead=replace(spec.lookahead, num_steps=int(config["lookahead_steps"])))
        if "bandwidth_bps" in config:
            spec = replace(spec, link_defaults=replace(spec.link_defaults,
                                                       bandwidth_bps=float(config["bandwidth_bps"])))
        if "link_overrides" in config:
            overrides = dict(spec.link_overrides)
            for entry in config["link_overrides"]:
                key = link_key(_node(spec, entry["a"]), _node(spec, entry["b"]))
                overrides[key] = LinkParams(bandwidth_bps=entry.get("bandwidth_bps"),
                                            loss_probability=entry.get("loss_probability"))
            spec = replace(spec, link_overrides=overrides)
        if "flows" in config:
            flows = [PointToPointFlow(source=_node(spec, entry["source"]),
                                      destination=_node(spec, entry["destination"]),
                                      **{key: entry[key] for key in ("message_size_bits", "interval_s", "start_s",
                                                                     "end_s", "tag") if key in entry})
                     for entry in config["flows"]]
            spec = replace(spec, flows=flows)
    except ScenarioValidationError:
        raise
    except (KeyError, TypeError, ValueError) as error:
        raise ScenarioValidationError(f"Invalid scenario config: {error}") from error
    return spec


SNAPSHOT_COLUMNS = ["record", "node", "name", "constellation", "x_km", "y_km", "z_km",
                    "endpoint_a", "endpoint_b", "kind", "bandwidth_bps", "distance_km", "delay_s"]


def topology_snapshot(spec: ScenarioSpec, time: float) -> pd.DataFrame:
    """
    Node positions (root frame, km) and active links of a scenario at one instant, one row each.

    :param time: simulation time, within [0, duration_s]
    """
    if not 0 <= time <= spec.duration_s:
        raise ScenarioValidationError(f"Snapshot time {time} is outside the scenario duration [0, {spec.duration_s}]")
    connectivity = ConnectivityModel(spec.mobility, spec.rules, spec.link_defaults, spec.link_overrides)
    snapshot = connectivity.refresh(time)
    positions = connectivity.positions
    rows = []
    for node in range(spec.mobility.node_count):
        constellation, _ = spec.mobility.node_constellation(node)
        x, y, z = positions[node]
        rows.append({"record": "node", "node": node, "name": spec.mobility.node_name(node),
                     "constellation": constellation.name, "x_km": x, "y_km": y, "z_km": z})
    for a, b in sorted(snapshot.links):
        link = connectivity.link(a, b)
        rows.append({"record": "link", "endpoint_a": link.endpoint_a, "endpoint_b": link.endpoint_b,
                     "kind": link.kind.value, "bandwidth_bps": link.bandwidth_bps,
                     "distance_km": connectivity.distance(link.endpoint_a, link.endpoint_b),
                     "delay_s": connectivity.propagation_delay(link.endpoint_a, link.endpoint_b)})
    return pd.DataFrame(rows, columns=SNAPSHOT_COLUMNS)
