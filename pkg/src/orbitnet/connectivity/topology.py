from dataclasses import dataclass
from enum import Enum
from typing import Dict, FrozenSet, List, Tuple
import numpy as np

from orbitnet.connectivity.rules import LinkRule, LinkParams, LinkDefaults, LinkKind, PairContext
from orbitnet.errors import UnknownLinkError
from orbitnet.events import Event, EventKind, LinkEvent, link_key
from orbitnet.mobility.centers import SPEED_OF_LIGHT_KM_S
from orbitnet.mobility.model import MobilityModel


LinkId = Tuple[int, int]


class LinkState(str, Enum):
    UP = "Up"
    DOWN = "Down"


@dataclass(frozen=True)
class Link:
    id: LinkId
    endpoint_a: int
    endpoint_b: int
    bandwidth_bps: float
    loss_probability: float
    kind: LinkKind
    state: LinkState


@dataclass(frozen=True)
class TopologySnapshot:
    time: float
    links: FrozenSet[LinkId]

    def __contains__(self, link: LinkId) -> bool:
        return link in self.links

    def __len__(self):
        return len(self.links)


def diff_topology(prev: TopologySnapshot, next: TopologySnapshot) -> List[Event]:
    """
    LinkDown events for links that disappeared followed by LinkUp events for new ones,
    each group in ascending link order, all stamped with the new snapshot's time.
    """
    if prev.time > next.time:
        raise ValueError(f"Cannot diff topology backwards in time ({prev.time} > {next.time})")
    downs = [Event(time=next.time, kind=EventKind.LINK_DOWN, payload=LinkEvent(*link))
             for link in sorted(prev.links - next.links)]
    ups = [Event(time=next.time, kind=EventKind.LINK_UP, payload=LinkEvent(*link))
           for link in sorted(next.links - prev.links)]
    return downs + ups


class ConnectivityModel:
    """
    Active links over time, derived from link rules evaluated on node positions.
    Keeps the topology and positions of the latest refresh, which the actors use between refreshes.
    """
    def __init__(self, mobility: MobilityModel, rules: List[LinkRule],
                 defaults: LinkDefaults = None,
                 link_overrides: Dict[LinkId, LinkParams] = None):
        """
        :param mobility: node positions
        :param rules: link rules, a pair covered by several rules is up when any of them is satisfied
        :param defaults: global link parameters
        :param link_overrides: per-link parameters, taking precedence over rule parameters and defaults
        """
        self._mobility = mobility
        self._rules = list(rules)
        self._defaults = defaults if defaults is not None else LinkDefaults()
        self._rule_of: Dict[LinkId, int] = {}
        for index, rule in enumerate(self._rules):
            rule.bind(mobility)
            for a, b in rule.candidates.tolist():
                self._rule_of.setdefault((a, b), index)
        self._overrides: Dict[LinkId, LinkParams] = {}
        for (a, b), params in (link_overrides or {}).items():
            key = link_key(a, b)
            if key not in self._rule_of:
                raise UnknownLinkError(a, b)
            self._overrides[key] = params
        self._is_ground = np.array([mobility.is_ground(node) for node in range(mobility.node_count)], dtype=bool)
        self._occluders = [name for name, center in mobility.centers.items() if center.body_radius_km > 0]
        self._snapshot = TopologySnapshot(time=0.0, links=frozenset())
        self._positions = np.zeros((mobility.node_count, 3))
        self._adjacency: Dict[int, List[int]] = {}

    @property
    def mobility(self) -> MobilityModel:
        return self._mobility

    @property
    def rules(self) -> List[LinkRule]:
        return list(self._rules)

    @property
    def defaults(self) -> LinkDefaults:
        return self._defaults

    @property
    def snapshot(self) -> TopologySnapshot:
        return self._snapshot

    @property
    def positions(self) -> np.ndarray:
        return self._positions

    @property
    def covered_links(self) -> List[LinkId]:
        return list(self._rule_of)

    def compute_topology(self, t: float) -> TopologySnapshot:
        positions = self._mobility.positions(t)
        node_centers = self._mobility.node_center_positions(t)
        center_positions = {name: self._mobility.center_position(name, t) for name in self._occluders}
        active = set()
        for rule in self._rules:
            candidates = rule.candidates
            if len(candidates) == 0:
                continue
            context = PairContext(time=t, first=candidates[:, 0], second=candidates[:, 1],
                                  positions=positions, node_centers=node_centers, is_ground=self._is_ground,
                                  center_positions=center_positions, model=self._mobility)
            mask = rule.active(context)
            active.update(map(tuple, candidates[mask].tolist()))
        return TopologySnapshot(time=t, links=frozenset(active))

    def refresh(self, t: float) -> TopologySnapshot:
        self._snapshot = self.compute_topology(t)
        self._positions = np.array(self._mobility.positions(t))
        adjacency: Dict[int, List[int]] = {}
        for a, b in self._snapshot.links:
            adjacency.setdefault(a, []).append(b)
            adjacency.setdefault(b, []).append(a)
        self._adjacency = {node: sorted(neighbors) for node, neighbors in adjacency.items()}
        return self._snapshot

    def neighbors(self, node: int) -> List[int]:
        """Nodes linked to node in the current snapshot, ascending."""
        return list(self._adjacency.get(node, []))

    def is_up(self, a: int, b: int) -> bool:
        return link_key(a, b) in self._snapshot.links

    def covers(self, a: int, b: int) -> bool:
        return link_key(a, b) in self._rule_of

    def link_params(self, a: int, b: int) -> LinkParams:
        """Explicit parameters of a link (per-link override over rule parameters), without the global defaults."""
        key = link_key(a, b)
        if key not in self._rule_of:
            raise UnknownLinkError(a, b)
        rule_params = self._rules[self._rule_of[key]].params
        override = self._overrides.get(key)
        return override.merged_over(rule_params) if override is not None else rule_params

    def link(self, a: int, b: int) -> Link:
        key = link_key(a, b)
        params = self.link_params(a, b)
        return Link(id=key, endpoint_a=key[0], endpoint_b=key[1],
                    bandwidth_bps=params.bandwidth_bps if params.bandwidth_bps is not None
                    else self._defaults.bandwidth_bps,
                    loss_probability=params.loss_probability if params.loss_probability is not None
                    else self._defaults.loss_probability,
                    kind=self._rules[self._rule_of[key]].kind,
                    state=LinkState.UP if key in self._snapshot.links else LinkState.DOWN)

    def distance(self, a: int, b: int) -> float:
        """Distance between two nodes at the latest refresh, in km."""
        return float(np.linalg.norm(self._positions[a] - self._positions[b]))

    def propagation_delay(self, a: int, b: int) -> float:
        return self.distance(a, b) / SPEED_OF_LIGHT_KM_S
