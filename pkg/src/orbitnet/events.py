from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, Optional, Tuple


class EventKind(str, Enum):
    MESSAGE_CREATED = "MessageCreated"
    MESSAGE_SENT = "MessageSent"
    MESSAGE_RECEIVED = "MessageReceived"
    MESSAGE_DROPPED = "MessageDropped"
    MESSAGE_RECEPTION_CANCELED = "MessageReceptionCanceled"
    LTP_SEGMENT_RECEIVED = "LTPSegmentReceived"
    LINK_UP = "LinkUp"
    LINK_DOWN = "LinkDown"
    ROUTING_TABLE_UPDATE = "RoutingTableUpdate"
    TIMER_EXPIRED = "TimerExpired"
    TRAFFIC_TICK = "TrafficTick"
    SCENARIO_CUSTOM = "ScenarioCustom"


class DropReason(str, Enum):
    LOSS = "loss"
    NO_ROUTE = "no-route"
    NO_ROUTE_HORIZON = "no-route-horizon"
    LTP_CANCEL = "ltp-cancel"


@dataclass(frozen=True)
class Message:
    """
    An application payload travelling through the network.

    :param uid: unique id within a run
    :param source: node id where the message was created
    :param destination: node id of the final recipient, None for a broadcast
    :param size_bits: payload size in bits
    :param created_at: creation time in simulation seconds
    :param hop_count: number of links traversed so far
    :param tag: free-form label set by the traffic generator (e.g. "telemetry")
    :param single_hop: deliver over one link only and never re-forward (broadcast copies)
    """
    uid: int
    source: int
    destination: Optional[int]
    size_bits: int
    created_at: float
    hop_count: int = 0
    tag: str = "data"
    single_hop: bool = False

    def __post_init__(self):
        if self.size_bits <= 0:
            raise ValueError(f"Message size must be positive, got {self.size_bits} bits")


@dataclass(frozen=True)
class MessageEvent:
    message: Message
    node: int
    peer: Optional[int] = None
    reason: Optional[DropReason] = None


@dataclass(frozen=True)
class SegmentEvent:
    segment: Any
    node: int
    peer: int


@dataclass(frozen=True)
class LinkEvent:
    endpoint_a: int
    endpoint_b: int

    @property
    def key(self) -> Tuple[int, int]:
        return link_key(self.endpoint_a, self.endpoint_b)


@dataclass(frozen=True)
class TimerEvent:
    owner: str
    key: Tuple = ()


@dataclass(frozen=True)
class RoutingUpdateEvent:
    links_up: int
    links_down: int


@dataclass(frozen=True)
class CustomEvent:
    name: str
    data: Dict[str, Any] = field(default_factory=dict)


@dataclass(eq=False)
class Event:
    """
    A timestamped occurrence in the simulation.
    The sequence number is assigned by the simulation when the event is scheduled and breaks ties between equal times.
    """
    time: float
    kind: EventKind
    payload: Any = None
    sequence: int = -1
    canceled: bool = False


def link_key(endpoint_a: int, endpoint_b: int) -> Tuple[int, int]:
    """Undirected link identifier: the endpoint pair in ascending order."""
    if endpoint_a == endpoint_b:
        raise ValueError(f"A link needs two distinct endpoints, got ({endpoint_a}, {endpoint_b})")
    return (endpoint_a, endpoint_b) if endpoint_a < endpoint_b else (endpoint_b, endpoint_a)
