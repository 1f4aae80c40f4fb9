from dataclasses import replace
from overrides import overrides

from orbitnet.actors.transmission import LinkLayer
from orbitnet.connectivity.topology import ConnectivityModel
from orbitnet.events import Event, EventKind, Message, MessageEvent, DropReason
from orbitnet.routing.providers import RoutingDataProvider, LookaheadRoutingDataProvider
from orbitnet.simulation import Actor
from orbitnet.utils import get_logger


logger = get_logger(__name__)


class MessageRoutingActor(Actor):
    """
    Per-hop forwarding: every node holding a message asks the routing provider for the next hop
    and hands the message to the link layer at the decided departure time.
    """
    name = "routing"

    def __init__(self, routing: RoutingDataProvider, link_layer: LinkLayer, connectivity: ConnectivityModel,
                 reroute_on_link_down: bool = None):
        """
        :param routing: next-hop provider
        :param link_layer: transmission or LTP actor carrying messages over single links
        :param connectivity: current topology, used to expand broadcasts
        :param reroute_on_link_down: re-route messages stuck behind a failed link instead of keeping them buffered,
                                     defaults to True for instantaneous routing and False for lookahead routing
        """
        self._routing = routing
        self._link_layer = link_layer
        self._connectivity = connectivity
        self._lookahead = isinstance(routing, LookaheadRoutingDataProvider)
        self._reroute = (not self._lookahead) if reroute_on_link_down is None else reroute_on_link_down

    def _drop(self, message: Message, node: int, time: float, reason: DropReason):
        logger.debug(f"Dropping message {message.uid} at node {node} (t={time}): {reason.value}")
        self.simulation.schedule_at(time, EventKind.MESSAGE_DROPPED,
                                    MessageEvent(message=message, node=node, reason=reason))

    def forward(self, message: Message, node: int, time: float):
        decision = self._routing.next_hop(node, message.destination, time)
        if decision is None:
            self._drop(message, node, time, DropReason.NO_ROUTE_HORIZON if self._lookahead else DropReason.NO_ROUTE)
            return
        self.simulation.schedule_at(decision.depart_time, EventKind.MESSAGE_SENT,
                                    MessageEvent(message=message, node=node, peer=decision.next_hop))

    def _broadcast(self, message: Message, node: int, time: float):
        for neighbor in self._connectivity.neighbors(node):
            copy = replace(message, uid=self.simulation.new_uid(), destination=neighbor, single_hop=True)
            self.simulation.schedule_at(time, EventKind.MESSAGE_CREATED, MessageEvent(message=copy, node=node))

    def _handle_message(self, message: Message, node: int, time: float):
        if message.destination is None:
            self._broadcast(message, node, time)
        elif node == message.destination:
            if message.hop_count == 0:
                # created at its destination: delivered on the spot
                self.simulation.schedule_at(time, EventKind.MESSAGE_RECEIVED,
                                            MessageEvent(message=message, node=node))
        elif message.single_hop:
            self.simulation.schedule_at(time, EventKind.MESSAGE_SENT,
                                        MessageEvent(message=message, node=node, peer=message.destination))
        else:
            self.forward(message, node, time)

    @overrides
    def handle_event(self, event: Event):
        if event.kind == EventKind.MESSAGE_CREATED:
            self._handle_message(event.payload.message, event.payload.node, event.time)
        elif event.kind == EventKind.MESSAGE_RECEIVED:
            payload = event.payload
            if payload.node != payload.message.destination:
                self._handle_message(payload.message, payload.node, event.time)
        elif event.kind == EventKind.MESSAGE_SENT:
            payload = event.payload
            self._link_layer.send_message(payload.message, payload.node, payload.peer, event.time)
        elif event.kind == EventKind.LINK_DOWN and self._reroute:
            for message, node in self._link_layer.take_buffered(event.payload.key):
                if message.single_hop:
                    self._drop(message, node, event.time, DropReason.NO_ROUTE)
                else:
                    self.forward(message, node, event.time)
