from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple
import math
import numpy as np
from overrides import overrides

from orbitnet.actors.ltp import LTPActor, LTPConfig
from orbitnet.actors.message_routing import MessageRoutingActor
from orbitnet.actors.traffic import PointToPointFlow, TrafficActor
from orbitnet.actors.transmission import LinkLayer, LinkTransmissionActor, LossConfig
from orbitnet.connectivity.rules import FixedEdges, LinkDefaults, LinkParams, LinkPredicate, LinkRule, PairContext
from orbitnet.connectivity.topology import ConnectivityModel
from orbitnet.events import CustomEvent, EventKind, Message, MessageEvent
from orbitnet.mobility.centers import OrbitalCenter, SPEED_OF_LIGHT_KM_S
from orbitnet.mobility.constellations import FixedPointConstellation
from orbitnet.mobility.model import MobilityModel
from orbitnet.routing.providers import (BestEffortRoutingDataProvider, LookaheadConfig,
                                        LookaheadRoutingDataProvider, RoutingDataProvider)
from orbitnet.simulation import Simulation, SimulationConfig


# one light-second, so that every hop of a line network takes exactly 1 s to propagate
LIGHT_SECOND_KM = SPEED_OF_LIGHT_KM_S


class TimeWindows(LinkPredicate):
    """Up during any of the [start, end) windows."""
    def __init__(self, windows: Sequence[Tuple[float, float]]):
        self.windows = list(windows)

    @overrides
    def mask(self, context: PairContext) -> np.ndarray:
        up = any(start <= context.time < end for start, end in self.windows)
        return np.full(len(context.first), up, dtype=bool)


def fixed_connectivity(points_km: Sequence[Sequence[float]], edges: Sequence[Tuple[int, int]],
                       bandwidth_bps: float = 1000.0,
                       windows: Dict[Tuple[int, int], List[Tuple[float, float]]] = None,
                       link_overrides: Dict[Tuple[int, int], LinkParams] = None) -> ConnectivityModel:
    """
    Static points on a bodiless root frame, linked by fixed edges.
    Edges listed in windows are only up during their windows.
    """
    windows = windows or {}
    root = OrbitalCenter(name="root")
    mobility = MobilityModel(centers=[root], constellations=[FixedPointConstellation("net", root, points_km)])
    always = [edge for edge in edges if edge not in windows]
    rules = []
    if always:
        rules.append(LinkRule("net", predicates=[FixedEdges(always)], name="always"))
    for edge, edge_windows in windows.items():
        rules.append(LinkRule("net", predicates=[FixedEdges([edge]), TimeWindows(edge_windows)],
                              name=f"window-{edge[0]}-{edge[1]}"))
    return ConnectivityModel(mobility, rules, LinkDefaults(bandwidth_bps=bandwidth_bps, loss_probability=0.0),
                             link_overrides)


def line_connectivity(node_count: int = 3, **kwargs) -> ConnectivityModel:
    points = [[index * LIGHT_SECOND_KM, 0.0, 0.0] for index in range(node_count)]
    edges = [(index, index + 1) for index in range(node_count - 1)]
    return fixed_connectivity(points, edges, **kwargs)


@dataclass
class SimulatedNetwork:
    simulation: Simulation
    connectivity: ConnectivityModel
    transmission: LinkTransmissionActor
    link_layer: LinkLayer
    routing: Optional[RoutingDataProvider]

    def create_message(self, source: int, destination: int, size_bits: int, time: float = 0.0) -> Message:
        message = Message(uid=self.simulation.new_uid(), source=source, destination=destination,
                          size_bits=size_bits, created_at=time)
        self.simulation.schedule_at(time, EventKind.MESSAGE_CREATED, MessageEvent(message=message, node=source))
        return message

    def wake_up_at(self, *times: float):
        """Schedule no-op events so that the topology gets refreshed at these times."""
        for time in times:
            self.simulation.schedule_at(time, EventKind.SCENARIO_CUSTOM, CustomEvent("wake-up"))

    def records(self, kind: str, **fields) -> list:
        return [record for record in self.simulation.event_log.filter(kind=kind)
                if all(getattr(record, name) == value for name, value in fields.items())]


def build_test_network(connectivity: ConnectivityModel, delivery: Optional[str] = "saf",
                       loss_probability: float = 0.0, loss_overrides: Dict[Tuple[int, int], float] = None,
                       seed: int = 0, lookahead: LookaheadConfig = None, ltp: LTPConfig = None,
                       flows: List[PointToPointFlow] = None, traffic_end: float = math.inf) -> SimulatedNetwork:
    """
    Initialized simulation over a connectivity model.

    :param delivery: "saf" for lookahead routing, "best-effort" for instantaneous routing, None for no routing actor
    :param ltp: reliable transfer configuration, None to hand messages straight to the transmission actor
    """
    simulation = Simulation(SimulationConfig(min_time_delta=0.0), connectivity=connectivity)
    routing = None
    if delivery == "saf":
        routing = LookaheadRoutingDataProvider(connectivity, lookahead or LookaheadConfig(resolution=10.0, num_steps=10))
    elif delivery == "best-effort":
        routing = BestEffortRoutingDataProvider(connectivity)
    if routing is not None:
        simulation.add_data_provider(routing)
    transmission = LinkTransmissionActor(connectivity, LossConfig(seed=seed,
                                                                  default_loss_probability=loss_probability,
                                                                  overrides=dict(loss_overrides or {})))
    simulation.add_actor(transmission)
    link_layer = transmission
    if ltp is not None:
        link_layer = LTPActor(transmission, connectivity, ltp)
        simulation.add_actor(link_layer)
    if routing is not None:
        simulation.add_actor(MessageRoutingActor(routing, link_layer, connectivity))
    if flows:
        simulation.add_actor(TrafficActor(flows, update_interval=300.0, end_time=traffic_end))
    simulation.initialize(0.0)
    return SimulatedNetwork(simulation=simulation, connectivity=connectivity, transmission=transmission,
                            link_layer=link_layer, routing=routing)
