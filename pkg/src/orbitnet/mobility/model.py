from typing import Dict, List, Tuple
import numpy as np

from orbitnet.errors import UnknownCenterError, UnknownNodeError
from orbitnet.mobility.centers import OrbitalCenter
from orbitnet.mobility.constellations import Constellation, TLEConstellation


class MobilityModel:
    """
    Positions of every node over time.
    Node ids are allocated contiguously in the order constellations are added.
    """
    def __init__(self, centers: List[OrbitalCenter] = None, constellations: List[Constellation] = None):
        self._centers: Dict[str, OrbitalCenter] = {}
        self._constellations: List[Constellation] = []
        self._offsets: List[int] = []
        self._node_names: List[str] = []
        self._node_ids: Dict[str, int] = {}
        self._cache_time = None
        self._cache_positions = None
        for center in centers or []:
            self.add_center(center)
        for constellation in constellations or []:
            self.add_constellation(constellation)

    def add_center(self, center: OrbitalCenter):
        if center.name in self._centers:
            raise ValueError(f"Orbital center {center.name} already exists")
        if center.parent is not None and center.parent not in self._centers:
            # parents must exist first, which also rules out cycles
            raise UnknownCenterError(center.parent)
        self._centers[center.name] = center
        self._cache_time = None

    def add_constellation(self, constellation: Constellation) -> range:
        """
        Register a constellation and allocate ids for its nodes.

        :return: range of allocated node ids
        """
        if constellation.center.name not in self._centers:
            self.add_center(constellation.center)
        if any(existing.name == constellation.name for existing in self._constellations):
            raise ValueError(f"Constellation {constellation.name} already exists")
        offset = len(self._node_names)
        for node_name in constellation.node_names:
            full_name = f"{constellation.name}/{node_name}"
            if full_name in self._node_ids:
                raise ValueError(f"Duplicate node name {full_name}")
            self._node_ids[full_name] = len(self._node_names)
            self._node_names.append(full_name)
        self._constellations.append(constellation)
        self._offsets.append(offset)
        self._cache_time = None
        return range(offset, offset + constellation.size)

    @property
    def centers(self) -> Dict[str, OrbitalCenter]:
        return dict(self._centers)

    @property
    def constellations(self) -> List[Constellation]:
        return list(self._constellations)

    @property
    def node_count(self) -> int:
        return len(self._node_names)

    def constellation(self, name: str) -> Constellation:
        for constellation in self._constellations:
            if constellation.name == name:
                return constellation
        raise ValueError(f"Unknown constellation: {name}")

    def constellation_nodes(self, name: str) -> range:
        for constellation, offset in zip(self._constellations, self._offsets):
            if constellation.name == name:
                return range(offset, offset + constellation.size)
        raise ValueError(f"Unknown constellation: {name}")

    def node_id(self, name: str) -> int:
        """
        :param name: "<constellation>/<node>"
        """
        if name not in self._node_ids:
            raise UnknownNodeError(name)
        return self._node_ids[name]

    def node_name(self, node: int) -> str:
        self._check_node(node)
        return self._node_names[node]

    def node_constellation(self, node: int) -> Tuple[Constellation, int]:
        """Constellation owning the node and the node's index inside it."""
        self._check_node(node)
        index = int(np.searchsorted(self._offsets, node, side="right")) - 1
        return self._constellations[index], node - self._offsets[index]

    def is_ground(self, node: int) -> bool:
        return self.node_constellation(node)[0].is_ground

    def _check_node(self, node):
        if not isinstance(node, (int, np.integer)) or not 0 <= node < len(self._node_names):
            raise UnknownNodeError(node)

    def center_position(self, center: str, t: float) -> np.ndarray:
        """Root-frame position of an orbital center, summing the parent chain."""
        if center not in self._centers:
            raise UnknownCenterError(center)
        position = np.zeros(3)
        name = center
        while name is not None:
            current = self._centers[name]
            if current.parent is not None:
                position = position + current.trajectory.position(t)
            name = current.parent
        return position

    def node_position(self, node: int, t: float) -> np.ndarray:
        constellation, index = self.node_constellation(node)
        if isinstance(constellation, TLEConstellation):
            relative = constellation.position_of(index, t)
        else:
            relative = constellation.relative_positions(t)[index]
        return self.center_position(constellation.center.name, t) + relative

    def positions(self, t: float) -> np.ndarray:
        """
        Root-frame positions of all nodes, shape (node_count, 3).
        The last evaluated time is cached, positions are pure functions of t.
        """
        if self._cache_time is not None and self._cache_time == t:
            return self._cache_positions
        blocks = []
        for constellation in self._constellations:
            center = self.center_position(constellation.center.name, t)
            blocks.append(constellation.relative_positions(t) + center)
        positions = np.concatenate(blocks, axis=0) if blocks else np.zeros((0, 3))
        positions.setflags(write=False)
        self._cache_time = t
        self._cache_positions = positions
        return positions

    def node_center_positions(self, t: float) -> np.ndarray:
        """Root-frame position of each node's orbital center, shape (node_count, 3)."""
        blocks = []
        for constellation in self._constellations:
            center = self.center_position(constellation.center.name, t)
            blocks.append(np.tile(center, (constellation.size, 1)))
        return np.concatenate(blocks, axis=0) if blocks else np.zeros((0, 3))
