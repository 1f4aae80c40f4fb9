from abc import ABC, abstractmethod
from collections import deque
from dataclasses import dataclass, field, replace
from typing import Any, Callable, Deque, Dict, List, Optional, Set, Tuple
import numpy as np
from overrides import overrides

from orbitnet.connectivity.topology import ConnectivityModel
from orbitnet.errors import UnknownLinkError
from orbitnet.event_log import EventLogRecord, RecordKind
from orbitnet.events import (Event, EventKind, Message, MessageEvent, SegmentEvent, TimerEvent,
                             DropReason, link_key)
from orbitnet.simulation import Actor
from orbitnet.utils import get_logger


logger = get_logger(__name__)

SentCallback = Callable[[float, bool], None]


@dataclass
class LossConfig:
    """
    :param seed: seed of the loss stream
    :param default_loss_probability: per-traversal loss probability of links without an explicit one
    :param overrides: per-link loss probabilities keyed by link id, taking precedence over everything else
    """
    seed: int = 0
    default_loss_probability: float = 0.05
    overrides: Dict[Tuple[int, int], float] = field(default_factory=dict)

    def __post_init__(self):
        for probability in [self.default_loss_probability, *self.overrides.values()]:
            if not 0.0 <= probability <= 1.0:
                raise ValueError(f"Loss probability must be in [0, 1], got {probability}")
        self.overrides = {link_key(*link): probability for link, probability in self.overrides.items()}


@dataclass
class TransmissionItem:
    """
    Something occupying a transmitter: a message or an LTP segment.

    :param payload: Message or segment object (segments expose size_bits)
    :param on_sent: called with (completion time, lost) when the transmission completes
    """
    payload: Any
    from_node: int
    to_node: int
    size_bits: int
    enqueued_at: float
    on_sent: Optional[SentCallback] = None

    @property
    def is_message(self) -> bool:
        return isinstance(self.payload, Message)


@dataclass
class InFlight:
    item: TransmissionItem
    start: float
    propagation_delay: float
    lost: bool
    timer: Event


@dataclass
class LinkQueueState:
    """Transmitter state of one direction of a link."""
    link: Tuple[int, int]
    busy_until: float = 0.0
    in_flight: Optional[InFlight] = None
    pending: Deque[TransmissionItem] = field(default_factory=deque)
    buffered: Deque[TransmissionItem] = field(default_factory=deque)


class LinkLayer(ABC):
    """What the routing actor hands messages to for a single hop."""
    @abstractmethod
    def send_message(self, message: Message, from_node: int, to_node: int, time: float):
        pass

    @abstractmethod
    def take_buffered(self, link: Tuple[int, int]) -> List[Tuple[Message, int]]:
        """
        Remove the messages waiting on a down link so they can be re-routed.

        :return: (message, node holding it) pairs in buffer order
        """
        pass


class LinkTransmissionActor(Actor, LinkLayer):
    """
    Serialises items over each link direction: transmission delay from the bandwidth, propagation delay from
    the distance at transmission start, one seeded loss trial per traversal, and buffering while the link is down.
    """
    name = "transmission"

    def __init__(self, connectivity: ConnectivityModel, loss: LossConfig = None):
        self._connectivity = connectivity
        self._loss = loss if loss is not None else LossConfig()
        self._rng = np.random.default_rng(self._loss.seed)
        self._queues: Dict[Tuple[int, int], LinkQueueState] = {}
        self._up: Set[Tuple[int, int]] = set()

    def queue(self, from_node: int, to_node: int) -> LinkQueueState:
        key = (from_node, to_node)
        if key not in self._queues:
            self._queues[key] = LinkQueueState(link=key)
        return self._queues[key]

    def is_up(self, a: int, b: int) -> bool:
        return link_key(a, b) in self._up

    def loss_probability(self, a: int, b: int) -> float:
        key = link_key(a, b)
        if key in self._loss.overrides:
            return self._loss.overrides[key]
        explicit = self._connectivity.link_params(a, b).loss_probability
        return explicit if explicit is not None else self._loss.default_loss_probability

    def send_over_link(self, payload: Any, from_node: int, to_node: int, time: float,
                       on_sent: SentCallback = None) -> TransmissionItem:
        """
        Queue an item for transmission from one node to another.

        :param payload: Message or LTP segment
        :param on_sent: optional callback for the completion of this transmission
        """
        if not self._connectivity.covers(from_node, to_node):
            raise UnknownLinkError(from_node, to_node)
        if payload.size_bits <= 0:
            raise ValueError(f"Item size must be positive, got {payload.size_bits} bits")
        item = TransmissionItem(payload=payload, from_node=from_node, to_node=to_node,
                                size_bits=payload.size_bits, enqueued_at=time, on_sent=on_sent)
        queue = self.queue(from_node, to_node)
        if not self.is_up(from_node, to_node):
            queue.buffered.append(item)
        elif queue.in_flight is None:
            self._start(queue, item, time)
        else:
            queue.pending.append(item)
        return item

    @overrides
    def send_message(self, message: Message, from_node: int, to_node: int, time: float):
        self.send_over_link(message, from_node, to_node, time)

    @overrides
    def take_buffered(self, link: Tuple[int, int]) -> List[Tuple[Message, int]]:
        taken = []
        for from_node, to_node in (link, link[::-1]):
            queue = self._queues.get((from_node, to_node))
            if queue is None:
                continue
            kept = deque()
            for item in queue.buffered:
                if item.is_message:
                    taken.append((item.payload, from_node))
                else:
                    kept.append(item)
            queue.buffered = kept
        return taken

    def _start(self, queue: LinkQueueState, item: TransmissionItem, time: float):
        link = self._connectivity.link(item.from_node, item.to_node)
        duration = item.size_bits / link.bandwidth_bps
        lost = bool(self._rng.random() < self.loss_probability(item.from_node, item.to_node))
        timer = self.simulation.schedule_at(time + duration, EventKind.TIMER_EXPIRED,
                                            TimerEvent(owner=self.name, key=("tx", queue.link)))
        queue.in_flight = InFlight(item=item, start=time,
                                   propagation_delay=self._connectivity.propagation_delay(item.from_node, item.to_node),
                                   lost=lost, timer=timer)
        queue.busy_until = time + duration

    def _complete(self, queue: LinkQueueState, time: float):
        flight = queue.in_flight
        queue.in_flight = None
        item = flight.item
        self._record_transmission(item, time, time - flight.start)
        if flight.lost:
            self._record_loss(item, time)
        else:
            self.simulation.schedule(self._arrival_event(item, time + flight.propagation_delay))
        if item.on_sent is not None:
            item.on_sent(time, flight.lost)
        if queue.pending and queue.in_flight is None:
            self._start(queue, queue.pending.popleft(), time)

    @staticmethod
    def _arrival_event(item: TransmissionItem, time: float) -> Event:
        if item.is_message:
            message = replace(item.payload, hop_count=item.payload.hop_count + 1)
            return Event(time=time, kind=EventKind.MESSAGE_RECEIVED,
                         payload=MessageEvent(message=message, node=item.to_node, peer=item.from_node))
        return Event(time=time, kind=EventKind.LTP_SEGMENT_RECEIVED,
                     payload=SegmentEvent(segment=item.payload, node=item.to_node, peer=item.from_node))

    def _record_transmission(self, item: TransmissionItem, time: float, duration: float, reason: str = None):
        self.simulation.record(EventLogRecord(time=time, kind=RecordKind.TRANSMISSION, node=item.from_node,
                                              peer=item.to_node, size_bits=item.size_bits, duration=duration,
                                              reason=reason, message_uid=self._message_uid(item)))

    def _record_loss(self, item: TransmissionItem, time: float):
        if item.is_message:
            message = item.payload
            self.simulation.record(EventLogRecord(time=time, kind=RecordKind.MESSAGE_LOST, message_uid=message.uid,
                                                  node=item.from_node, peer=item.to_node,
                                                  reason=DropReason.LOSS.value, size_bits=message.size_bits,
                                                  source=message.source, destination=message.destination,
                                                  created_at=message.created_at, hops=message.hop_count,
                                                  tag=message.tag))
        else:
            segment = item.payload
            self.simulation.record(EventLogRecord(time=time, kind=RecordKind.LTP_SEGMENT_LOST,
                                                  message_uid=getattr(segment, "message_uid", None),
                                                  node=item.from_node, peer=item.to_node,
                                                  reason=DropReason.LOSS.value, size_bits=segment.size_bits,
                                                  session=segment.session_id, segment_uid=segment.uid,
                                                  detail=segment.segment_type))

    @staticmethod
    def _message_uid(item: TransmissionItem) -> Optional[int]:
        if item.is_message:
            return item.payload.uid
        return getattr(item.payload, "message_uid", None)

    def _link_down(self, link: Tuple[int, int], time: float):
        self._up.discard(link)
        for from_node, to_node in (link, link[::-1]):
            queue = self._queues.get((from_node, to_node))
            if queue is None:
                continue
            items = list(queue.pending)
            if queue.in_flight is not None:
                flight = queue.in_flight
                self.simulation.cancel(flight.timer)
                self._record_transmission(flight.item, time, time - flight.start, reason="aborted")
                items.insert(0, flight.item)
                queue.in_flight = None
                queue.busy_until = time
                logger.debug(f"Link {from_node}->{to_node} went down at t={time}, "
                             f"aborted transmission started at t={flight.start}")
            queue.pending = deque()
            queue.buffered.extendleft(reversed(items))

    def _link_up(self, link: Tuple[int, int], time: float):
        self._up.add(link)
        for from_node, to_node in (link, link[::-1]):
            queue = self._queues.get((from_node, to_node))
            if queue is None:
                continue
            queue.pending.extend(queue.buffered)
            queue.buffered = deque()
            if queue.in_flight is None and queue.pending:
                self._start(queue, queue.pending.popleft(), time)

    @overrides
    def handle_event(self, event: Event):
        if event.kind == EventKind.TIMER_EXPIRED and event.payload.owner == self.name:
            self._complete(self._queues[event.payload.key[1]], event.time)
        elif event.kind == EventKind.LINK_DOWN:
            self._link_down(event.payload.key, event.time)
        elif event.kind == EventKind.LINK_UP:
            self._link_up(event.payload.key, event.time)

    @overrides
    def post_run(self, time: float):
        for queue in self._queues.values():
            if queue.in_flight is not None and queue.in_flight.start < time:
                self._record_transmission(queue.in_flight.item, time, time - queue.in_flight.start,
                                          reason="in-flight")

    def buffered_count(self) -> int:
        return sum(len(queue.buffered) + len(queue.pending) + (queue.in_flight is not None)
                   for queue in self._queues.values())
