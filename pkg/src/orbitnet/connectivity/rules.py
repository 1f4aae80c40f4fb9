from abc import ABC, abstractmethod
from dataclasses import dataclass
from enum import Enum
from typing import Dict, List, Optional, Sequence, Tuple, Union
import numpy as np
from overrides import overrides

from orbitnet.connectivity.geometry import segments_clear, elevation_angles
from orbitnet.mobility.constellations import WalkerConstellation
from orbitnet.mobility.model import MobilityModel


class LinkKind(str, Enum):
    ISL = "ISL"
    ILL = "ILL"
    GROUND_SPACE = "GroundSpace"
    TERRESTRIAL = "Terrestrial"


@dataclass(frozen=True)
class LinkParams:
    """Per-rule or per-link parameters, None fields fall back to the next level."""
    bandwidth_bps: Optional[float] = None
    loss_probability: Optional[float] = None

    def __post_init__(self):
        if self.bandwidth_bps is not None and self.bandwidth_bps <= 0:
            raise ValueError(f"Bandwidth must be positive, got {self.bandwidth_bps}")
        if self.loss_probability is not None and not 0.0 <= self.loss_probability <= 1.0:
            raise ValueError(f"Loss probability must be in [0, 1], got {self.loss_probability}")

    def merged_over(self, other: "LinkParams") -> "LinkParams":
        return LinkParams(
            bandwidth_bps=self.bandwidth_bps if self.bandwidth_bps is not None else other.bandwidth_bps,
            loss_probability=self.loss_probability if self.loss_probability is not None else other.loss_probability,
        )


@dataclass(frozen=True)
class LinkDefaults:
    bandwidth_bps: float = 25e6
    loss_probability: float = 0.05

    def __post_init__(self):
        LinkParams(self.bandwidth_bps, self.loss_probability)


@dataclass
class PairContext:
    """Everything a predicate needs to judge a batch of candidate pairs at one instant."""
    time: float
    first: np.ndarray
    second: np.ndarray
    positions: np.ndarray
    node_centers: np.ndarray
    is_ground: np.ndarray
    center_positions: Dict[str, np.ndarray]
    model: MobilityModel


NodeRef = Union[int, str]


def resolve_node(model: MobilityModel, node: NodeRef) -> int:
    if isinstance(node, str):
        return model.node_id(node)
    model.node_name(node)
    return int(node)


class LinkPredicate(ABC):
    """A condition a candidate pair must satisfy for its link to be up."""
    def candidate_pairs(self, model: MobilityModel, first: str, second: Optional[str]) -> Optional[np.ndarray]:
        """
        Structural predicates restrict which pairs are considered at all.

        :return: array of shape (k, 2) with ascending node ids per row, or None if the predicate is geometric
        """
        return None

    @abstractmethod
    def mask(self, context: PairContext) -> np.ndarray:
        pass


class FixedEdges(LinkPredicate):
    """Links that are always up, listed explicitly by node id or "<constellation>/<node>" name."""
    def __init__(self, edges: Sequence[Tuple[NodeRef, NodeRef]]):
        if not edges:
            raise ValueError("FixedEdges needs at least one edge")
        self.edges = list(edges)

    @overrides
    def candidate_pairs(self, model: MobilityModel, first: str, second: Optional[str]) -> Optional[np.ndarray]:
        pairs = set()
        for a, b in self.edges:
            a, b = resolve_node(model, a), resolve_node(model, b)
            if a == b:
                raise ValueError(f"Fixed edge with identical endpoints: {a}")
            pairs.add((min(a, b), max(a, b)))
        return np.array(sorted(pairs), dtype=np.int64).reshape(-1, 2)

    @overrides
    def mask(self, context: PairContext) -> np.ndarray:
        return np.ones(len(context.first), dtype=bool)


class PlusGrid(LinkPredicate):
    """Fore/aft neighbors in the plane plus same-slot satellites in the adjacent planes, wrapping around."""
    @overrides
    def candidate_pairs(self, model: MobilityModel, first: str, second: Optional[str]) -> Optional[np.ndarray]:
        if second is not None and second != first:
            raise ValueError("PlusGrid applies within a single constellation")
        constellation = model.constellation(first)
        if not isinstance(constellation, WalkerConstellation):
            raise ValueError(f"PlusGrid needs a Walker constellation, {first} is {type(constellation).__name__}")
        planes, per_plane = constellation.params.planes, constellation.params.sats_per_plane
        offset = model.constellation_nodes(first).start
        pairs = set()
        for plane in range(planes):
            for slot in range(per_plane):
                node = offset + plane * per_plane + slot
                neighbors = (offset + plane * per_plane + (slot + 1) % per_plane,
                             offset + ((plane + 1) % planes) * per_plane + slot)
                for neighbor in neighbors:
                    if neighbor != node:
                        pairs.add((min(node, neighbor), max(node, neighbor)))
        return np.array(sorted(pairs), dtype=np.int64).reshape(-1, 2)

    @overrides
    def mask(self, context: PairContext) -> np.ndarray:
        return np.ones(len(context.first), dtype=bool)


class MaxRange(LinkPredicate):
    def __init__(self, range_km: float):
        if range_km <= 0:
            raise ValueError(f"Range must be positive, got {range_km}")
        self.range_km = range_km

    @overrides
    def mask(self, context: PairContext) -> np.ndarray:
        distance = np.linalg.norm(context.positions[context.first] - context.positions[context.second], axis=-1)
        return distance <= self.range_km


class LineOfSight(LinkPredicate):
    def __init__(self, centers: List[str] = None, margin_km: float = 0.0):
        """
        :param centers: occluding bodies, None for every center with a non-zero radius
        :param margin_km: extra clearance above the body surface (e.g. atmosphere)
        """
        if margin_km < 0:
            raise ValueError(f"Occlusion margin must be non-negative, got {margin_km}")
        self.centers = centers
        self.margin_km = margin_km

    @overrides
    def mask(self, context: PairContext) -> np.ndarray:
        result = np.ones(len(context.first), dtype=bool)
        names = self.centers if self.centers is not None else list(context.center_positions)
        p1, p2 = context.positions[context.first], context.positions[context.second]
        for name in names:
            radius = context.model.centers[name].body_radius_km
            if radius <= 0:
                continue
            result &= segments_clear(p1, p2, context.center_positions[name], radius + self.margin_km)
        return result


class MinElevation(LinkPredicate):
    """Every endpoint that is a ground station must see the other above this elevation."""
    def __init__(self, degrees: float = 10.0):
        self.degrees = degrees

    @overrides
    def mask(self, context: PairContext) -> np.ndarray:
        result = np.ones(len(context.first), dtype=bool)
        for ground, other in ((context.first, context.second), (context.second, context.first)):
            on_ground = context.is_ground[ground]
            if not on_ground.any():
                continue
            index = np.flatnonzero(on_ground)
            elevation = elevation_angles(context.positions[ground[index]], context.positions[other[index]],
                                         context.node_centers[ground[index]])
            result[index] &= elevation >= self.degrees
        return result


class LinkRule:
    """
    A conjunction of predicates over the node pairs of one constellation (first only)
    or between two constellations (first x second).
    """
    def __init__(self, first: str, second: str = None, predicates: List[LinkPredicate] = None,
                 kind: LinkKind = None, params: LinkParams = None, name: str = None):
        if not predicates:
            raise ValueError(f"Link rule for {first}/{second} needs at least one predicate")
        self.first = first
        self.second = second if second != first else None
        self.predicates = list(predicates)
        self.kind = kind
        self.params = params if params is not None else LinkParams()
        self.name = name if name is not None else (first if self.second is None else f"{first}-{self.second}")
        self._candidates: Optional[np.ndarray] = None

    def bind(self, model: MobilityModel):
        """Resolve the candidate pairs and the link kind against a mobility model."""
        candidates = None
        for predicate in self.predicates:
            structural = predicate.candidate_pairs(model, self.first, self.second)
            if structural is None:
                continue
            if candidates is None:
                candidates = structural
            else:
                shared = set(map(tuple, candidates.tolist())) & set(map(tuple, structural.tolist()))
                candidates = np.array(sorted(shared), dtype=np.int64).reshape(-1, 2)
        if candidates is None:
            candidates = self._all_pairs(model)
        self._candidates = candidates
        if self.kind is None:
            self.kind = self._default_kind(model)

    def _all_pairs(self, model: MobilityModel) -> np.ndarray:
        first = np.asarray(model.constellation_nodes(self.first), dtype=np.int64)
        if self.second is None:
            a, b = np.triu_indices(len(first), k=1)
            return np.stack([first[a], first[b]], axis=-1)
        second = np.asarray(model.constellation_nodes(self.second), dtype=np.int64)
        a = np.repeat(first, len(second))
        b = np.tile(second, len(first))
        return np.stack([np.minimum(a, b), np.maximum(a, b)], axis=-1)

    def _default_kind(self, model: MobilityModel) -> LinkKind:
        first_ground = model.constellation(self.first).is_ground
        if self.second is None:
            return LinkKind.TERRESTRIAL if first_ground else LinkKind.ISL
        second_ground = model.constellation(self.second).is_ground
        if first_ground and second_ground:
            return LinkKind.TERRESTRIAL
        if first_ground or second_ground:
            return LinkKind.GROUND_SPACE
        return LinkKind.ILL

    @property
    def candidates(self) -> np.ndarray:
        if self._candidates is None:
            raise RuntimeError(f"Link rule {self.name} was not bound to a mobility model")
        return self._candidates

    def active(self, context: PairContext) -> np.ndarray:
        result = np.ones(len(context.first), dtype=bool)
        for predicate in self.predicates:
            if not result.any():
                break
            result &= predicate.mask(context)
        return result
