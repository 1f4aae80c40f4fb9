from abc import abstractmethod
from dataclasses import dataclass
from typing import Dict, Optional, Tuple
import math
import networkx as nx
from overrides import overrides

from orbitnet.connectivity.topology import ConnectivityModel
from orbitnet.events import link_key
from orbitnet.routing.contact_plan import ArrivalLabel, ContactPlan, ContactTable, earliest_arrival
from orbitnet.routing.graph import ConnectivityGraph, build_graph
from orbitnet.simulation import DataProvider


COST_TOLERANCE = 1e-9


@dataclass(frozen=True)
class RouteDecision:
    """
    :param next_hop: node to forward to
    :param depart_time: when to send, later than the query time means hold the message until then
    :param link: link id towards next_hop
    """
    next_hop: int
    depart_time: float
    link: Tuple[int, int]


@dataclass(frozen=True)
class LookaheadConfig:
    """
    :param resolution: seconds between sampled future topology states
    :param num_steps: number of sampled states, the first one being the query instant;
                      the last sampled state is assumed to last indefinitely
    :param align_to_grid: sample on a fixed grid shared by all queries instead of query time + k * resolution
    """
    resolution: float = 60.0
    num_steps: int = 600
    align_to_grid: bool = False

    def __post_init__(self):
        if self.resolution <= 0:
            raise ValueError(f"Lookahead resolution must be positive, got {self.resolution}")
        if self.num_steps < 1:
            raise ValueError(f"Lookahead needs at least one step, got {self.num_steps}")


class RoutingDataProvider(DataProvider):
    """
    Answers next-hop queries from the current connectivity, caches are dropped at every refresh.
    """
    def __init__(self, connectivity: ConnectivityModel):
        self._connectivity = connectivity

    @abstractmethod
    def next_hop(self, src: int, dst: int, t: float) -> Optional[RouteDecision]:
        """
        :return: routing decision, or None when the destination cannot be reached
        """
        pass


class BestEffortRoutingDataProvider(RoutingDataProvider):
    """Shortest path on the instantaneous topology."""
    def __init__(self, connectivity: ConnectivityModel, metric: str = "delay"):
        """
        :param connectivity: topology source
        :param metric: "delay" for minimum propagation delay or "hops" for minimum hop count
        """
        super().__init__(connectivity)
        if metric not in ("delay", "hops"):
            raise ValueError(f"Unknown routing metric: {metric}")
        self._metric = metric
        self._graph: Optional[ConnectivityGraph] = None
        self._distances: Dict[int, Dict[int, float]] = {}
        self._hops: Dict[int, Dict[int, int]] = {}

    @overrides
    def refresh(self, time: float):
        self._graph = None
        self._distances = {}
        self._hops = {}

    @property
    def graph(self) -> ConnectivityGraph:
        if self._graph is None:
            self._graph = build_graph(self._connectivity.snapshot, self._connectivity.positions)
            for _, _, data in self._graph.graph.edges(data=True):
                data["cost"] = data["delay"] if self._metric == "delay" else 1
        return self._graph

    def distances_to(self, dst: int) -> Dict[int, float]:
        if dst not in self._distances:
            self._distances[dst] = nx.single_source_dijkstra_path_length(self.graph.graph, dst, weight="cost")
        return self._distances[dst]

    def _on_shortest_path(self, node: int, neighbor: int, dst: int) -> bool:
        distances = self.distances_to(dst)
        cost = self.graph.graph[node][neighbor]["cost"]
        return abs(cost + distances[neighbor] - distances[node]) <= COST_TOLERANCE

    def hops_to(self, dst: int) -> Dict[int, int]:
        """
        Fewest hops from every reachable node to dst, counted only along minimum-cost paths.
        Used to break cost ties, so equal-delay routes prefer fewer hops and zero-delay links still make progress.
        """
        if dst not in self._hops:
            distances = self.distances_to(dst)
            tight = nx.DiGraph()
            tight.add_nodes_from(distances)
            for u, v in self.graph.graph.edges():
                if u not in distances or v not in distances:
                    continue
                if self._on_shortest_path(u, v, dst):
                    tight.add_edge(v, u)
                if self._on_shortest_path(v, u, dst):
                    tight.add_edge(u, v)
            self._hops[dst] = nx.single_source_shortest_path_length(tight, dst)
        return self._hops[dst]

    def best_effort_next_hop(self, src: int, dst: int, t: float) -> Optional[RouteDecision]:
        if src == dst:
            raise ValueError(f"Source and destination are the same node: {src}")
        distances = self.distances_to(dst)
        if src not in distances:
            return None
        hops = self.hops_to(dst)
        # minimum cost first, then fewest hops, then the smallest neighbor id
        next_hop = next(neighbor for neighbor in sorted(self.graph.graph[src])
                        if neighbor in distances and self._on_shortest_path(src, neighbor, dst)
                        and hops[neighbor] + 1 == hops[src])
        return RouteDecision(next_hop=next_hop, depart_time=t, link=link_key(src, next_hop))

    @overrides
    def next_hop(self, src: int, dst: int, t: float) -> Optional[RouteDecision]:
        return self.best_effort_next_hop(src, dst, t)


class LookaheadRoutingDataProvider(RoutingDataProvider):
    """Earliest-arrival routing over sampled future topology, holding messages until their link comes up."""
    def __init__(self, connectivity: ConnectivityModel, config: LookaheadConfig = None, origin: float = 0.0):
        super().__init__(connectivity)
        self._config = config if config is not None else LookaheadConfig()
        self._plan = ContactPlan(connectivity, self._config.resolution, self._config.align_to_grid, origin)
        self._table_time = None
        self._table: Optional[ContactTable] = None
        self._trees: Dict[int, Dict[int, ArrivalLabel]] = {}

    @property
    def config(self) -> LookaheadConfig:
        return self._config

    @overrides
    def refresh(self, time: float):
        self._table_time = None
        self._table = None
        self._trees = {}

    def _tree(self, src: int, t: float) -> Dict[int, ArrivalLabel]:
        if self._table_time != t:
            self._table = self._plan.table(t, self._config.num_steps)
            self._table_time = t
            self._trees = {}
        if src not in self._trees:
            self._trees[src] = earliest_arrival(self._table, src, t)
        return self._trees[src]

    def arrival_time(self, src: int, dst: int, t: float) -> float:
        label = self._tree(src, t).get(dst)
        return label.arrival if label is not None else math.inf

    def lookahead_next_hop(self, src: int, dst: int, t: float) -> Optional[RouteDecision]:
        if src == dst:
            raise ValueError(f"Source and destination are the same node: {src}")
        label = self._tree(src, t).get(dst)
        if label is None:
            return None
        next_hop = label.path[1]
        return RouteDecision(next_hop=next_hop, depart_time=label.first_depart, link=link_key(src, next_hop))

    @overrides
    def next_hop(self, src: int, dst: int, t: float) -> Optional[RouteDecision]:
        return self.lookahead_next_hop(src, dst, t)
