from orbitnet.errors import UnknownLinkError
from orbitnet.events import Message
from orbitnet.actors.traffic import PointToPointFlow
from orbitnet.connectivity.rules import LinkParams
from network_helpers import LIGHT_SECOND_KM, build_test_network, fixed_connectivity, line_connectivity
import numpy as np
import pytest
import math


def test_store_and_forward_over_two_hops():
    network = build_test_network(line_connectivity(3), delivery="saf")
    network.create_message(0, 2, size_bits=1000)
    summary = network.simulation.run(20.0)
    received = network.records("MessageReceived", node=2)
    assert len(received) == 1
    # 1 s transmission and 1 s propagation per hop
    assert received[0].time == pytest.approx(4.0)
    assert received[0].hops == 2
    assert summary.stats.delivered == 1
    assert summary.stats.mean_latency_s == pytest.approx(4.0)


def test_best_effort_over_two_hops():
    network = build_test_network(line_connectivity(3), delivery="best-effort")
    network.create_message(0, 2, size_bits=1000)
    network.simulation.run(20.0)
    received = network.records("MessageReceived", node=2)
    assert [record.time for record in received] == [pytest.approx(4.0)]


def test_link_queue_is_fifo():
    network = build_test_network(line_connectivity(2), delivery="best-effort")
    first = network.create_message(0, 1, size_bits=1000)
    second = network.create_message(0, 1, size_bits=1000)
    network.simulation.run(20.0)
    received = network.records("MessageReceived", node=1)
    assert [record.message_uid for record in received] == [first.uid, second.uid]
    assert [record.time for record in received] == [pytest.approx(2.0), pytest.approx(3.0)]


def test_store_and_forward_holds_until_link_is_up():
    connectivity = line_connectivity(2, windows={(0, 1): [(10.0, math.inf)]})
    network = build_test_network(connectivity, delivery="saf")
    network.create_message(0, 1, size_bits=1000)
    network.simulation.run(30.0)
    received = network.records("MessageReceived", node=1)
    assert len(received) == 1
    assert received[0].time == pytest.approx(12.0)
    assert network.records("MessageDropped") == []


def aborted_transmission_run(delivery):
    connectivity = line_connectivity(2, windows={(0, 1): [(0.0, 5.0), (20.0, math.inf)]})
    network = build_test_network(connectivity, delivery=delivery)
    return network


def test_link_down_aborts_and_restarts_transmission():
    network = aborted_transmission_run(delivery=None)
    message = Message(uid=network.simulation.new_uid(), source=0, destination=1, size_bits=10_000, created_at=0.0)
    network.transmission.send_over_link(message, 0, 1, 0.0)
    network.wake_up_at(5.0, 20.0)
    network.simulation.run(40.0)

    aborted = network.records("Transmission", reason="aborted")
    assert len(aborted) == 1
    assert aborted[0].duration == pytest.approx(5.0)
    received = network.records("MessageReceived", node=1)
    # restarted from scratch at t=20: 10 s transmission plus 1 s propagation
    assert [record.time for record in received] == [pytest.approx(31.0)]
    assert network.transmission.buffered_count() == 0


def test_best_effort_drops_when_link_goes_down_without_alternative():
    network = aborted_transmission_run(delivery="best-effort")
    network.create_message(0, 1, size_bits=10_000)
    network.wake_up_at(5.0)
    summary = network.simulation.run(40.0)
    dropped = network.records("MessageDropped")
    assert len(dropped) == 1
    assert dropped[0].reason == "no-route"
    assert dropped[0].time == pytest.approx(5.0)
    assert summary.stats.dropped == 1
    assert network.records("MessageReceived", node=1) == []


def test_best_effort_reroutes_around_failed_link():
    points = [[0.0, 0.0, 0.0], [LIGHT_SECOND_KM, 0.0, 0.0], [LIGHT_SECOND_KM / 2, LIGHT_SECOND_KM, 0.0]]
    connectivity = fixed_connectivity(points, [(0, 2), (1, 2)], windows={(0, 1): [(0.0, 5.0)]})
    network = build_test_network(connectivity, delivery="best-effort")
    network.create_message(0, 1, size_bits=10_000)
    network.wake_up_at(5.0)
    network.simulation.run(100.0)

    received = network.records("MessageReceived", node=1)
    assert len(received) == 1
    assert received[0].hops == 2
    detour_delay = math.sqrt(1.25)
    assert received[0].time == pytest.approx(5.0 + 10.0 + detour_delay + 10.0 + detour_delay)


def test_unfinished_transmission_is_logged_at_end_of_run():
    network = build_test_network(line_connectivity(2), delivery="best-effort")
    network.create_message(0, 1, size_bits=10_000)
    network.simulation.run(5.0)
    in_flight = network.records("Transmission", reason="in-flight")
    assert len(in_flight) == 1
    assert in_flight[0].duration == pytest.approx(5.0)


def test_sending_over_uncovered_pair_raises():
    network = build_test_network(line_connectivity(3), delivery=None)
    message = Message(uid=1, source=0, destination=2, size_bits=100, created_at=0.0)
    with pytest.raises(UnknownLinkError):
        network.transmission.send_over_link(message, 0, 2, 0.0)


def test_loss_probability_precedence():
    connectivity = line_connectivity(4, link_overrides={(1, 2): LinkParams(loss_probability=0.2)})
    network = build_test_network(connectivity, delivery=None, loss_probability=0.05, loss_overrides={(1, 0): 0.7})
    assert network.transmission.loss_probability(0, 1) == 0.7
    assert network.transmission.loss_probability(1, 0) == 0.7
    assert network.transmission.loss_probability(2, 1) == 0.2
    assert network.transmission.loss_probability(2, 3) == 0.05


def replayed_deliveries(message_count: int, hops: int, loss_probability: float, seed: int) -> int:
    """One uniform draw per traversal in transmission order, a message stops at its first loss."""
    rng = np.random.default_rng(seed)
    delivered = 0
    for _ in range(message_count):
        survived = True
        for _ in range(hops):
            if rng.random() < loss_probability:
                survived = False
                break
        delivered += survived
    return delivered


def loss_compounding_run(message_count: int, loss_probability: float, seed: int):
    # one message every 10 s, each is done with both hops after 4 s so traversals never interleave
    flow = PointToPointFlow(source=0, destination=2, message_size_bits=1000, interval_s=10.0)
    network = build_test_network(line_connectivity(3), delivery="best-effort", loss_probability=loss_probability,
                                 seed=seed, flows=[flow], traffic_end=10.0 * message_count)
    summary = network.simulation.run(10.0 * message_count + 10.0)
    assert summary.stats.created == message_count
    assert summary.stats.delivered + summary.stats.lost == message_count
    assert summary.stats.delivered == replayed_deliveries(message_count, 2, loss_probability, seed)
    return summary.stats


def test_seeded_loss_matches_replay():
    loss_compounding_run(300, 0.1, seed=3)


@pytest.mark.slow_suit
def test_loss_compounds_over_hops():
    message_count, loss_probability = 10_000, 0.1
    stats = loss_compounding_run(message_count, loss_probability, seed=11)
    expected = (1 - loss_probability) ** 2
    sigma = math.sqrt(expected * (1 - expected) / message_count)
    assert abs(stats.delivered / message_count - expected) <= 3 * sigma
