from dataclasses import dataclass, field, replace
from enum import Enum
from functools import partial
from typing import Callable, Dict, FrozenSet, List, Optional, Set, Tuple
from overrides import overrides

from orbitnet.actors.transmission import LinkLayer, LinkTransmissionActor
from orbitnet.connectivity.topology import ConnectivityModel
from orbitnet.event_log import EventLogRecord, RecordKind
from orbitnet.events import Event, EventKind, Message, MessageEvent, TimerEvent, DropReason
from orbitnet.simulation import Actor
from orbitnet.utils import get_logger


logger = get_logger(__name__)


@dataclass
class LTPConfig:
    """
    :param max_segment_size_bits: largest data segment payload
    :param green_prefix_bits: leading part of each message sent unreliably, 0 sends everything red
    :param checkpoint_timeout_s: wait for a report before resending a checkpoint, None derives it from the link
    :param report_timeout_s: wait for an acknowledgement before resending a report, None derives it from the link
    :param max_retransmissions: resends allowed per checkpoint or report before the session is canceled
    :param timeout_margin_s: turn-around allowance added to derived timeouts
    :param report_header_bits: fixed size of a report segment
    :param report_uid_bits: size added to a report per listed segment uid
    :param ack_size_bits: size of a report acknowledgement
    :param cancel_size_bits: size of a cancel segment
    """
    max_segment_size_bits: int = 1_000_000
    green_prefix_bits: int = 0
    checkpoint_timeout_s: Optional[float] = None
    report_timeout_s: Optional[float] = None
    max_retransmissions: int = 10
    timeout_margin_s: float = 5.0
    report_header_bits: int = 64
    report_uid_bits: int = 32
    ack_size_bits: int = 64
    cancel_size_bits: int = 64

    def __post_init__(self):
        if self.max_segment_size_bits <= 0:
            raise ValueError(f"max_segment_size_bits must be positive, got {self.max_segment_size_bits}")
        if self.green_prefix_bits < 0:
            raise ValueError(f"green_prefix_bits must be non-negative, got {self.green_prefix_bits}")
        for timeout in (self.checkpoint_timeout_s, self.report_timeout_s):
            if timeout is not None and timeout <= 0:
                raise ValueError(f"LTP timeouts must be positive, got {timeout}")
        if self.max_retransmissions < 1:
            raise ValueError(f"max_retransmissions must be positive, got {self.max_retransmissions}")


class SegmentColor(str, Enum):
    GREEN = "green"
    RED = "red"


@dataclass(frozen=True)
class LTPDataSegment:
    """
    A piece of a message. Checkpoints list every red segment uid of the session,
    the end of an all-green block lists every green uid instead.
    """
    uid: int
    session_id: int
    message: Message
    color: SegmentColor
    payload_bits: int
    is_checkpoint: bool = False
    is_end_of_green_block: bool = False
    checkpoint_manifest: Optional[Tuple[int, ...]] = None
    green_manifest: Optional[Tuple[int, ...]] = None

    def __post_init__(self):
        if self.is_checkpoint:
            if self.color != SegmentColor.RED:
                raise ValueError("Only red segments can be checkpoints")
            if self.checkpoint_manifest is None or self.uid not in self.checkpoint_manifest:
                raise ValueError(f"Checkpoint {self.uid} must list itself in its manifest")

    @property
    def size_bits(self) -> int:
        return self.payload_bits

    @property
    def message_uid(self) -> int:
        return self.message.uid

    @property
    def segment_type(self) -> str:
        if self.is_checkpoint:
            return "checkpoint"
        return "data-green" if self.color == SegmentColor.GREEN else "data-red"


@dataclass(frozen=True)
class LTPReportSegment:
    uid: int
    session_id: int
    message_uid: int
    checkpoint_uid: int
    received_uids: Tuple[int, ...]
    size_bits: int
    segment_type = "report"


@dataclass(frozen=True)
class LTPReportAckSegment:
    uid: int
    session_id: int
    message_uid: int
    report_uid: int
    size_bits: int
    segment_type = "report-ack"


@dataclass(frozen=True)
class LTPCancelSegment:
    uid: int
    session_id: int
    message_uid: int
    size_bits: int
    segment_type = "cancel"


def _split(total_bits: int, max_bits: int) -> List[int]:
    sizes = [max_bits] * (total_bits // max_bits)
    if total_bits % max_bits:
        sizes.append(total_bits % max_bits)
    return sizes


def segment_message(message: Message, config: LTPConfig, new_uid: Callable[[], int],
                    session_id: int) -> List[LTPDataSegment]:
    """
    Break a message into green segments followed by red segments, none larger than the maximum segment size.
    The last red segment is the checkpoint, the last green one ends the green block.

    :param new_uid: uid source, called once per segment in order
    """
    green_bits = min(config.green_prefix_bits, message.size_bits)
    green_sizes = _split(green_bits, config.max_segment_size_bits)
    red_sizes = _split(message.size_bits - green_bits, config.max_segment_size_bits)
    green_uids = [new_uid() for _ in green_sizes]
    red_uids = [new_uid() for _ in red_sizes]
    all_green = not red_sizes
    segments = []
    for index, (uid, size) in enumerate(zip(green_uids, green_sizes)):
        last = index == len(green_sizes) - 1
        segments.append(LTPDataSegment(uid=uid, session_id=session_id, message=message, color=SegmentColor.GREEN,
                                       payload_bits=size, is_end_of_green_block=last,
                                       green_manifest=tuple(green_uids) if last and all_green else None))
    manifest = tuple(red_uids)
    for index, (uid, size) in enumerate(zip(red_uids, red_sizes)):
        last = index == len(red_sizes) - 1
        segments.append(LTPDataSegment(uid=uid, session_id=session_id, message=message, color=SegmentColor.RED,
                                       payload_bits=size, is_checkpoint=last,
                                       checkpoint_manifest=manifest if last else None))
    return segments


class SessionStatus(str, Enum):
    ACTIVE = "Active"
    COMPLETED = "Completed"
    CANCELED = "Canceled"


@dataclass
class RetransmissionState:
    """A checkpoint or report waiting for its answer."""
    segment: object
    retransmissions: int = 0
    timer: Optional[Event] = None


@dataclass
class SenderSession:
    session_id: int
    message: Message
    from_node: int
    to_node: int
    red_uids: Set[int] = field(default_factory=set)
    segments: Dict[int, LTPDataSegment] = field(default_factory=dict)
    checkpoints: Dict[int, RetransmissionState] = field(default_factory=dict)
    handled_reports: Set[int] = field(default_factory=set)
    last_green_uid: Optional[int] = None
    loss_reported: bool = False
    status: SessionStatus = SessionStatus.ACTIVE

    @property
    def all_green(self) -> bool:
        return not self.red_uids


@dataclass
class ReceiverSession:
    session_id: int
    message: Optional[Message]
    node: int
    peer: int
    received: Dict[int, LTPDataSegment] = field(default_factory=dict)
    manifest: Optional[FrozenSet[int]] = None
    manifest_uid: Optional[int] = None
    reports: Dict[int, RetransmissionState] = field(default_factory=dict)
    status: SessionStatus = SessionStatus.ACTIVE


class LTPActor(Actor, LinkLayer):
    """
    Reliable per-hop transfer on top of the transmission actor: each message hop is one session of
    data segments, checkpoint reports, report acknowledgements and timeout-driven retransmissions.
    """
    name = "ltp"

    def __init__(self, transmission: LinkTransmissionActor, connectivity: ConnectivityModel,
                 config: LTPConfig = None):
        self._transmission = transmission
        self._connectivity = connectivity
        self._config = config if config is not None else LTPConfig()
        self._senders: Dict[int, SenderSession] = {}
        self._receivers: Dict[int, ReceiverSession] = {}
        # data segments handed to the link and neither lost nor arrived yet, per session
        self._in_transit: Dict[int, int] = {}

    @property
    def config(self) -> LTPConfig:
        return self._config

    def sender_session(self, session_id: int) -> Optional[SenderSession]:
        return self._senders.get(session_id)

    def receiver_session(self, session_id: int) -> Optional[ReceiverSession]:
        return self._receivers.get(session_id)

    @property
    def open_sessions(self) -> int:
        """
        Number of sender and receiver sessions still tracked. A session is released once its sender finished
        and none of its data segments are left on the link, so this drops back to 0 when the network drains.
        """
        return len(self._senders) + len(self._receivers)

    @overrides
    def send_message(self, message: Message, from_node: int, to_node: int, time: float):
        session_id = self.simulation.new_uid()
        session = SenderSession(session_id=session_id, message=message, from_node=from_node, to_node=to_node)
        self._senders[session_id] = session
        segments = segment_message(message, self._config, self.simulation.new_uid, session_id)
        for segment in segments:
            if segment.color == SegmentColor.RED:
                session.red_uids.add(segment.uid)
                session.segments[segment.uid] = segment
            else:
                session.last_green_uid = segment.uid
            if segment.is_checkpoint:
                session.checkpoints[segment.uid] = RetransmissionState(segment=segment)
        for segment in segments:
            self._transmit_data(session, segment, time)

    @overrides
    def take_buffered(self, link: Tuple[int, int]) -> List[Tuple[Message, int]]:
        # sessions stay bound to their link, nothing is handed back for re-routing
        return []

    def _timeout(self, from_node: int, to_node: int, configured: Optional[float]) -> float:
        if configured is not None:
            return configured
        link = self._connectivity.link(from_node, to_node)
        transmission_time = self._config.max_segment_size_bits / link.bandwidth_bps
        propagation = self._connectivity.propagation_delay(from_node, to_node)
        return 2 * (propagation + transmission_time) + self._config.timeout_margin_s

    def _start_timer(self, state: RetransmissionState, kind: str, session_id: int, time: float, timeout: float):
        state.timer = self.simulation.schedule_at(time + timeout, EventKind.TIMER_EXPIRED,
                                                  TimerEvent(owner=self.name, key=(kind, session_id,
                                                                                   state.segment.uid)))

    @staticmethod
    def _stop_timer(simulation, state: RetransmissionState):
        if state.timer is not None:
            simulation.cancel(state.timer)
            state.timer = None

    def _transmit_data(self, session: SenderSession, segment: LTPDataSegment, time: float):
        self._in_transit[session.session_id] = self._in_transit.get(session.session_id, 0) + 1
        self._transmission.send_over_link(segment, session.from_node, session.to_node, time,
                                          on_sent=partial(self._data_sent, session.session_id, segment.uid))

    def _data_sent(self, session_id: int, uid: int, time: float, lost: bool):
        if lost:
            self._segment_landed(session_id)
        session = self._senders.get(session_id)
        if session is None or session.status != SessionStatus.ACTIVE:
            self._retire_if_idle(session_id, time)
            return
        if session.all_green:
            if lost and not session.loss_reported:
                session.loss_reported = True
                self._record_message_lost(session, time)
            if uid == session.last_green_uid:
                self._finish_sender(session, SessionStatus.COMPLETED, time)
            return
        state = session.checkpoints.get(uid)
        if state is not None:
            timeout = self._timeout(session.from_node, session.to_node, self._config.checkpoint_timeout_s)
            self._start_timer(state, "checkpoint", session_id, time, timeout)

    def _record_message_lost(self, session: SenderSession, time: float):
        message = session.message
        self.simulation.record(EventLogRecord(time=time, kind=RecordKind.MESSAGE_LOST, message_uid=message.uid,
                                              node=session.from_node, peer=session.to_node,
                                              reason=DropReason.LOSS.value, size_bits=message.size_bits,
                                              source=message.source, destination=message.destination,
                                              created_at=message.created_at, hops=message.hop_count,
                                              tag=message.tag, session=session.session_id))

    def _send_report(self, receiver: ReceiverSession, checkpoint_uid: int, received_uids: Tuple[int, ...],
                     time: float):
        report = LTPReportSegment(uid=self.simulation.new_uid(), session_id=receiver.session_id,
                                  message_uid=receiver.message.uid, checkpoint_uid=checkpoint_uid,
                                  received_uids=received_uids,
                                  size_bits=self._config.report_header_bits
                                  + self._config.report_uid_bits * len(received_uids))
        state = RetransmissionState(segment=report)
        receiver.reports[report.uid] = state
        self._transmit_report(receiver, state, time)

    def _transmit_report(self, receiver: ReceiverSession, state: RetransmissionState, time: float):
        self._transmission.send_over_link(state.segment, receiver.node, receiver.peer, time,
                                          on_sent=partial(self._report_sent, receiver.session_id,
                                                          state.segment.uid))

    def _report_sent(self, session_id: int, report_uid: int, time: float, lost: bool):
        receiver = self._receivers.get(session_id)
        if receiver is None or report_uid not in receiver.reports:
            return
        timeout = self._timeout(receiver.node, receiver.peer, self._config.report_timeout_s)
        self._start_timer(receiver.reports[report_uid], "report", session_id, time, timeout)

    def _segment_landed(self, session_id: int):
        remaining = self._in_transit.get(session_id, 0) - 1
        if remaining > 0:
            self._in_transit[session_id] = remaining
        else:
            self._in_transit.pop(session_id, None)

    def _retire_if_idle(self, session_id: int, time: float):
        """
        Releases the state of a session whose sender is gone and whose data segments have all landed.
        No further data can reach the receiver, so dropping it keeps exactly-once delivery.
        """
        if session_id in self._senders or session_id in self._in_transit:
            return
        receiver = self._receivers.get(session_id)
        if receiver is None:
            return
        if receiver.status == SessionStatus.ACTIVE:
            if receiver.reports:
                # the report timers cancel it once they run out
                return
            self._cancel_receiver(receiver, time)
        for state in receiver.reports.values():
            self._stop_timer(self.simulation, state)
        del self._receivers[session_id]

    def _receive_data(self, segment: LTPDataSegment, node: int, peer: int, time: float):
        self._segment_landed(segment.session_id)
        self._handle_data(segment, node, peer, time)
        self._retire_if_idle(segment.session_id, time)

    def _handle_data(self, segment: LTPDataSegment, node: int, peer: int, time: float):
        session_id = segment.session_id
        receiver = self._receivers.get(session_id)
        if receiver is None:
            receiver = ReceiverSession(session_id=session_id, message=segment.message, node=node, peer=peer)
            self._receivers[session_id] = receiver
        if receiver.status == SessionStatus.CANCELED:
            return
        if receiver.status == SessionStatus.COMPLETED:
            # the sender missed our last report: answer its checkpoint with the full manifest
            if segment.is_checkpoint:
                self._send_report(receiver, segment.uid, tuple(sorted(segment.checkpoint_manifest)), time)
            return
        receiver.received.setdefault(segment.uid, segment)
        if segment.is_checkpoint:
            if receiver.manifest_uid is None or segment.uid > receiver.manifest_uid:
                receiver.manifest = frozenset(segment.checkpoint_manifest)
                receiver.manifest_uid = segment.uid
            received = tuple(uid for uid in sorted(segment.checkpoint_manifest) if uid in receiver.received)
            self._send_report(receiver, segment.uid, received, time)
        if segment.green_manifest is not None:
            if all(uid in receiver.received for uid in segment.green_manifest):
                self._deliver(receiver, time)
            else:
                # the sender already logged the loss
                receiver.status = SessionStatus.COMPLETED
                receiver.received.clear()
            return
        if receiver.manifest is not None and receiver.manifest.issubset(receiver.received):
            self._deliver(receiver, time)

    def _deliver(self, receiver: ReceiverSession, time: float):
        receiver.status = SessionStatus.COMPLETED
        receiver.received.clear()
        message = replace(receiver.message, hop_count=receiver.message.hop_count + 1)
        self.simulation.schedule_at(time, EventKind.MESSAGE_RECEIVED,
                                    MessageEvent(message=message, node=receiver.node, peer=receiver.peer))

    def _receive_report(self, report: LTPReportSegment, node: int, peer: int, time: float):
        ack = LTPReportAckSegment(uid=self.simulation.new_uid(), session_id=report.session_id,
                                  message_uid=report.message_uid, report_uid=report.uid,
                                  size_bits=self._config.ack_size_bits)
        self._transmission.send_over_link(ack, node, peer, time)
        session = self._senders.get(report.session_id)
        if session is None or session.status != SessionStatus.ACTIVE or report.uid in session.handled_reports:
            return
        session.handled_reports.add(report.uid)
        for uid in [uid for uid in session.checkpoints if uid <= report.checkpoint_uid]:
            self._stop_timer(self.simulation, session.checkpoints.pop(uid))
        missing = sorted(session.red_uids.difference(report.received_uids))
        if not missing:
            self._finish_sender(session, SessionStatus.COMPLETED, time)
            return
        if session.checkpoints:
            # a later checkpoint is still outstanding and will get its own report
            return
        for uid in missing[:-1]:
            self._transmit_data(session, session.segments[uid], time)
        old = session.segments.pop(missing[-1])
        session.red_uids.discard(old.uid)
        new_uid = self.simulation.new_uid()
        session.red_uids.add(new_uid)
        checkpoint = replace(old, uid=new_uid, is_checkpoint=True,
                             checkpoint_manifest=tuple(sorted(session.red_uids)))
        session.segments[new_uid] = checkpoint
        session.checkpoints[new_uid] = RetransmissionState(segment=checkpoint)
        self._transmit_data(session, checkpoint, time)

    def _receive_ack(self, ack: LTPReportAckSegment, time: float):
        receiver = self._receivers.get(ack.session_id)
        if receiver is None:
            return
        state = receiver.reports.pop(ack.report_uid, None)
        if state is not None:
            self._stop_timer(self.simulation, state)
        self._retire_if_idle(ack.session_id, time)

    def _receive_cancel(self, cancel: LTPCancelSegment, node: int, peer: int, time: float):
        receiver = self._receivers.get(cancel.session_id)
        if receiver is None:
            if cancel.session_id in self._in_transit:
                # data still on its way must not open a fresh session
                self._receivers[cancel.session_id] = ReceiverSession(session_id=cancel.session_id, message=None,
                                                                     node=node, peer=peer,
                                                                     status=SessionStatus.CANCELED)
            return
        if receiver.status == SessionStatus.ACTIVE:
            self._cancel_receiver(receiver, time)
        self._retire_if_idle(cancel.session_id, time)

    def _finish_sender(self, session: SenderSession, status: SessionStatus, time: float):
        session.status = status
        for state in session.checkpoints.values():
            self._stop_timer(self.simulation, state)
        session.checkpoints.clear()
        session.segments.clear()
        del self._senders[session.session_id]
        self._retire_if_idle(session.session_id, time)

    def _cancel_sender(self, session: SenderSession, time: float):
        logger.info(f"LTP session {session.session_id} for message {session.message.uid} "
                    f"({session.from_node}->{session.to_node}) canceled after "
                    f"{self._config.max_retransmissions} retransmissions")
        self._finish_sender(session, SessionStatus.CANCELED, time)
        self.simulation.schedule_at(time, EventKind.MESSAGE_DROPPED,
                                    MessageEvent(message=session.message, node=session.from_node,
                                                 peer=session.to_node, reason=DropReason.LTP_CANCEL))
        cancel = LTPCancelSegment(uid=self.simulation.new_uid(), session_id=session.session_id,
                                  message_uid=session.message.uid, size_bits=self._config.cancel_size_bits)
        self._transmission.send_over_link(cancel, session.from_node, session.to_node, time)

    def _cancel_receiver(self, receiver: ReceiverSession, time: float):
        receiver.status = SessionStatus.CANCELED
        receiver.received.clear()
        for state in receiver.reports.values():
            self._stop_timer(self.simulation, state)
        receiver.reports.clear()
        self.simulation.schedule_at(time, EventKind.MESSAGE_RECEPTION_CANCELED,
                                    MessageEvent(message=receiver.message, node=receiver.node, peer=receiver.peer))

    def _checkpoint_timeout(self, session_id: int, uid: int, time: float):
        session = self._senders.get(session_id)
        if session is None or session.status != SessionStatus.ACTIVE or uid not in session.checkpoints:
            return
        state = session.checkpoints[uid]
        state.timer = None
        if state.retransmissions >= self._config.max_retransmissions:
            self._cancel_sender(session, time)
            return
        state.retransmissions += 1
        self._transmit_data(session, state.segment, time)

    def _report_timeout(self, session_id: int, uid: int, time: float):
        receiver = self._receivers.get(session_id)
        if receiver is None or uid not in receiver.reports:
            return
        state = receiver.reports[uid]
        state.timer = None
        if state.retransmissions >= self._config.max_retransmissions:
            if receiver.status == SessionStatus.ACTIVE:
                self._cancel_receiver(receiver, time)
            else:
                del receiver.reports[uid]
            self._retire_if_idle(session_id, time)
            return
        state.retransmissions += 1
        self._transmit_report(receiver, state, time)

    @overrides
    def handle_event(self, event: Event):
        if event.kind == EventKind.LTP_SEGMENT_RECEIVED:
            payload = event.payload
            segment = payload.segment
            if isinstance(segment, LTPDataSegment):
                self._receive_data(segment, payload.node, payload.peer, event.time)
            elif isinstance(segment, LTPReportSegment):
                self._receive_report(segment, payload.node, payload.peer, event.time)
            elif isinstance(segment, LTPReportAckSegment):
                self._receive_ack(segment, event.time)
            elif isinstance(segment, LTPCancelSegment):
                self._receive_cancel(segment, payload.node, payload.peer, event.time)
        elif event.kind == EventKind.TIMER_EXPIRED and event.payload.owner == self.name:
            kind, session_id, uid = event.payload.key
            if kind == "checkpoint":
                self._checkpoint_timeout(session_id, uid, event.time)
            elif kind == "report":
                self._report_timeout(session_id, uid, event.time)
