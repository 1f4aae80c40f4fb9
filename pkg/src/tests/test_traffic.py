from orbitnet.actors.traffic import (Constant, Gaussian, Pareto, PointToPointFlow, RandomTrafficGenerator,
                                     RandomTrafficSpec, TrafficActor, Uniform, create_distribution, default_flows,
                                     generate)
from orbitnet.simulation import Simulation
from itertools import count
import numpy as np
import pytest


def test_payload_flow_creates_ten_messages_in_115_seconds():
    flow = PointToPointFlow(source=4, destination=0, message_size_bits=80_000_000, interval_s=11.5)
    messages = generate(flow, 0.0, 115.0, count(1).__next__)
    assert len(messages) == 10
    assert [message.created_at for message in messages] == pytest.approx([11.5 * k for k in range(10)])
    assert [message.uid for message in messages] == list(range(1, 11))
    assert all(message.size_bits == 80_000_000 for message in messages)


def test_flow_windows_are_half_open_and_compose():
    flow = PointToPointFlow(source=0, destination=1, interval_s=11.5)
    assert flow.creation_times(0.0, 23.0) == [0.0, 11.5]
    assert flow.creation_times(0.0, 50.0) + flow.creation_times(50.0, 115.0) == flow.creation_times(0.0, 115.0)


def test_flow_start_and_end():
    flow = PointToPointFlow(source=0, destination=1, interval_s=10.0, start_s=5.0, end_s=35.0)
    assert flow.creation_times(0.0, 100.0) == [5.0, 15.0, 25.0]
    assert flow.creation_times(16.0, 100.0) == [25.0]


def test_invalid_flows_and_windows_raise():
    with pytest.raises(ValueError):
        PointToPointFlow(source=0, destination=1, interval_s=0.0)
    with pytest.raises(ValueError):
        generate(PointToPointFlow(source=0, destination=1), 10.0, 10.0, count(1).__next__)


def test_default_flows_pair_consecutive_nodes():
    flows = default_flows(list(range(20)), count=10, message_size_bits=1000, interval_s=5.0)
    assert [(flow.source, flow.destination) for flow in flows] == [(2 * i, 2 * i + 1) for i in range(10)]
    with pytest.raises(ValueError):
        default_flows(list(range(5)), count=3)


def test_random_traffic_is_seeded():
    spec = RandomTrafficSpec(inter_arrival=Uniform(1.0, 3.0), size=Pareto(1000.0, 1.5), sources=(0, 1, 2, 3), seed=4)
    first = generate(RandomTrafficGenerator(spec), 0.0, 100.0, count(1).__next__)
    second = generate(RandomTrafficGenerator(spec), 0.0, 100.0, count(1).__next__)
    assert first == second
    assert len(first) > 0
    assert all(message.source != message.destination for message in first)
    assert all(message.size_bits >= 1000 for message in first)
    times = [message.created_at for message in first]
    assert times == sorted(times)


def test_random_traffic_windows_continue_the_same_stream():
    spec = RandomTrafficSpec(inter_arrival=Constant(2.0), size=Constant(1000.0), sources=(0, 1, 2), seed=1)
    generator = RandomTrafficGenerator(spec)
    first = list(generator.draw(0.0, 10.0))
    second = list(generator.draw(10.0, 20.0))
    assert [time for time, _, _, _ in first + second] == [2.0 * k for k in range(10)]
    assert all(source != destination for _, source, destination, _ in first + second)


def test_random_traffic_with_index_distributions():
    spec = RandomTrafficSpec(inter_arrival=Constant(1.0), size=Constant(500.0), sources=(7, 8, 9),
                             destinations=(7, 8, 9), source_distribution=Constant(0.0),
                             destination_distribution=Constant(5.0))
    drawn = list(RandomTrafficGenerator(spec).draw(0.0, 3.0))
    # index 5 is clamped to the last destination
    assert [(source, destination) for _, source, destination, _ in drawn] == [(7, 9)] * 3


def test_random_traffic_endpoint_errors():
    with pytest.raises(ValueError):
        RandomTrafficSpec(inter_arrival=Constant(1.0), size=Constant(1.0), sources=(3,))
    spec = RandomTrafficSpec(inter_arrival=Constant(1.0), size=Constant(1.0), sources=(0, 1),
                             source_distribution=Constant(0.0), destination_distribution=Constant(0.0))
    with pytest.raises(RuntimeError):
        list(RandomTrafficGenerator(spec).draw(0.0, 1.0))


def test_gaussian_redraws_non_positive_values():
    gaussian = Gaussian(mean=0.5, std=1.0)
    rng = np.random.default_rng(0)
    samples = [gaussian.sample(rng) for _ in range(1000)]
    assert min(samples) > 0
    assert gaussian.redraws > 0
    with pytest.raises(ValueError):
        Gaussian(mean=0.0, std=0.0)


def test_distributions():
    rng = np.random.default_rng(1)
    assert all(Pareto(2.0, 3.0).sample(rng) >= 2.0 for _ in range(100))
    assert all(1.0 <= Uniform(1.0, 2.0).sample(rng) <= 2.0 for _ in range(100))
    assert isinstance(create_distribution("uniform", low=1.0, high=2.0), Uniform)
    assert create_distribution("constant", value=3.0).sample(rng) == 3.0
    with pytest.raises(ValueError):
        create_distribution("zipf", a=2.0)
    with pytest.raises(ValueError):
        Uniform(2.0, 1.0)
    with pytest.raises(ValueError):
        Pareto(0.0, 1.0)


def test_traffic_actor_creates_messages_window_by_window():
    simulation = Simulation()
    actor = TrafficActor([PointToPointFlow(source=0, destination=1, message_size_bits=1000, interval_s=10.0)],
                         update_interval=15.0, end_time=30.0)
    simulation.add_actor(actor)
    simulation.initialize(0.0)
    simulation.run(100.0)
    created = simulation.event_log.filter(kind="MessageCreated")
    assert [record.time for record in created] == [0.0, 10.0, 20.0]
    assert actor.created == 3
    assert len(simulation.event_log.filter(kind="TrafficTick")) == 2
    with pytest.raises(ValueError):
        TrafficActor([], update_interval=0.0)
