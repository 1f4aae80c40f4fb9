from orbitnet.routing.contact_plan import ContactPlan, build_contact_table, earliest_arrival, prepend_sample
from orbitnet.routing.providers import BestEffortRoutingDataProvider, LookaheadConfig, LookaheadRoutingDataProvider
from network_helpers import LIGHT_SECOND_KM, fixed_connectivity, line_connectivity
from hypothesis import given, settings, strategies as st
import numpy as np
import pytest
import math


def brute_force_arrivals(samples, source, start):
    """Relax every (sample, link, direction) until nothing improves."""
    times = [time for time, _ in samples]
    ends = times[1:] + [math.inf]
    arrival = {source: start}
    changed = True
    while changed:
        changed = False
        for index, (time, links) in enumerate(samples):
            for (a, b), delay in links.items():
                for u, v in ((a, b), (b, a)):
                    if u in arrival and ends[index] > arrival[u]:
                        candidate = max(arrival[u], time) + delay
                        if candidate < arrival.get(v, math.inf):
                            arrival[v] = candidate
                            changed = True
    return arrival


def test_earliest_arrival_waits_for_contact():
    table = build_contact_table([(0.0, {(0, 1): 1.0}), (10.0, {(1, 2): 1.0})])
    labels = earliest_arrival(table, 0, 0.0)
    assert labels[1].arrival == 1.0
    assert labels[2].arrival == 11.0
    assert labels[2].path == (0, 1, 2)
    assert labels[2].first_depart == 0.0
    assert labels[0].first_depart is None


def test_earliest_arrival_ignores_past_contacts():
    table = build_contact_table([(0.0, {(0, 1): 1.0}), (10.0, {})])
    labels = earliest_arrival(table, 0, 12.0)
    assert 1 not in labels
    with pytest.raises(ValueError):
        earliest_arrival(table, 0, -1.0)


def test_equal_arrivals_take_lexicographically_smallest_path():
    table = build_contact_table([(0.0, {(0, 1): 1.0, (0, 2): 1.0, (1, 3): 1.0, (2, 3): 1.0})])
    assert earliest_arrival(table, 0, 0.0)[3].path == (0, 1, 3)


def test_contact_table_needs_increasing_samples():
    with pytest.raises(ValueError):
        build_contact_table([])
    with pytest.raises(ValueError):
        build_contact_table([(5.0, {}), (5.0, {})])


def test_prepended_sample_matches_full_table():
    samples = [(0.0, {(0, 1): 2.0}), (10.0, {(1, 2): 1.0}), (20.0, {(0, 2): 0.5})]
    full = earliest_arrival(build_contact_table(samples), 0, 0.0)
    combined = earliest_arrival(prepend_sample(samples[0], build_contact_table(samples[1:])), 0, 0.0)
    assert {node: label.arrival for node, label in full.items()} == \
        {node: label.arrival for node, label in combined.items()}


@st.composite
def sampled_topologies(draw):
    node_count = draw(st.integers(min_value=2, max_value=6))
    gaps = draw(st.lists(st.integers(min_value=1, max_value=20), max_size=11))
    times = [0.0] + [float(time) for time in np.cumsum(gaps)]
    pairs = [(a, b) for a in range(node_count) for b in range(a + 1, node_count)]
    samples = []
    for time in times:
        up = draw(st.lists(st.sampled_from(pairs), unique=True, max_size=len(pairs)))
        samples.append((time, {link: draw(st.integers(min_value=0, max_value=30)) / 2.0 for link in sorted(up)}))
    source = draw(st.integers(min_value=0, max_value=node_count - 1))
    start = draw(st.integers(min_value=0, max_value=int(times[-1]) + 10)) / 1.0
    return samples, source, start


@settings(max_examples=500, deadline=None)
@given(sampled_topologies())
def test_earliest_arrival_matches_brute_force(instance):
    samples, source, start = instance
    labels = earliest_arrival(build_contact_table(samples), source, start)
    expected = brute_force_arrivals(samples, source, start)
    assert set(labels) == set(expected)
    for node, label in labels.items():
        assert label.arrival == pytest.approx(expected[node])
        assert label.path[0] == source and label.path[-1] == node
        assert len(set(label.path)) == len(label.path)


def test_unaligned_sample_times():
    plan = ContactPlan(line_connectivity(2), resolution=10.0)
    assert plan.sample_times(3.0, 4) == [3.0, 13.0, 23.0, 33.0]


def test_aligned_sample_times():
    plan = ContactPlan(line_connectivity(2), resolution=10.0, align_to_grid=True)
    assert plan.sample_times(3.0, 4) == [3.0, 10.0, 20.0, 30.0]
    assert plan.sample_times(10.0, 4) == [10.0, 20.0, 30.0, 40.0]
    with pytest.raises(ValueError):
        plan.sample_times(3.0, 0)


def windowed_line_run(align_to_grid: bool, window_start: float = 20.0):
    connectivity = line_connectivity(3, windows={(1, 2): [(window_start, math.inf)]})
    provider = LookaheadRoutingDataProvider(connectivity, LookaheadConfig(resolution=10.0, num_steps=5,
                                                                          align_to_grid=align_to_grid))
    provider.refresh(0.0)
    return provider


@pytest.mark.parametrize("align_to_grid", [False, True])
def test_lookahead_plans_around_future_contact(align_to_grid):
    provider = windowed_line_run(align_to_grid)
    decision = provider.next_hop(0, 2, 0.0)
    assert decision.next_hop == 1
    assert decision.depart_time == 0.0
    assert decision.link == (0, 1)
    assert provider.arrival_time(0, 2, 0.0) == pytest.approx(21.0)


def test_lookahead_holds_message_until_link_comes_up():
    provider = windowed_line_run(align_to_grid=False)
    decision = provider.next_hop(1, 2, 1.0)
    # samples at 1, 11, 21, ...: the first one with the link up is at 21
    assert decision.next_hop == 2
    assert decision.depart_time == pytest.approx(21.0)


def test_lookahead_returns_none_beyond_horizon():
    provider = windowed_line_run(align_to_grid=False, window_start=1000.0)
    assert provider.next_hop(0, 2, 0.0) is None
    assert math.isinf(provider.arrival_time(0, 2, 0.0))
    with pytest.raises(ValueError):
        provider.next_hop(2, 2, 0.0)


def test_lookahead_config_validation():
    with pytest.raises(ValueError):
        LookaheadConfig(resolution=0.0)
    with pytest.raises(ValueError):
        LookaheadConfig(num_steps=0)


def diamond_run(metric="delay"):
    points = [[0.0, 0.0, 0.0], [LIGHT_SECOND_KM, 0.0, 0.0], [0.0, LIGHT_SECOND_KM, 0.0],
              [LIGHT_SECOND_KM, LIGHT_SECOND_KM, 0.0]]
    connectivity = fixed_connectivity(points, [(0, 1), (0, 2), (1, 3), (2, 3)])
    connectivity.refresh(0.0)
    provider = BestEffortRoutingDataProvider(connectivity, metric=metric)
    provider.refresh(0.0)
    return provider


@pytest.mark.parametrize("metric", ["delay", "hops"])
def test_best_effort_breaks_ties_by_smallest_neighbor(metric):
    provider = diamond_run(metric)
    decision = provider.next_hop(0, 3, 5.0)
    assert decision.next_hop == 1
    assert decision.depart_time == 5.0
    assert provider.next_hop(3, 0, 5.0).next_hop == 1


def test_best_effort_unreachable_and_invalid():
    connectivity = line_connectivity(3, windows={(1, 2): [(100.0, math.inf)]})
    connectivity.refresh(0.0)
    provider = BestEffortRoutingDataProvider(connectivity)
    provider.refresh(0.0)
    assert provider.next_hop(0, 2, 0.0) is None
    assert provider.next_hop(0, 1, 0.0).next_hop == 1
    with pytest.raises(ValueError):
        provider.next_hop(1, 1, 0.0)
    with pytest.raises(ValueError):
        BestEffortRoutingDataProvider(connectivity, metric="bandwidth")


def test_single_step_lookahead_plans_on_the_current_topology():
    connectivity = line_connectivity(3)
    provider = LookaheadRoutingDataProvider(connectivity, LookaheadConfig(resolution=10.0, num_steps=1))
    provider.refresh(0.0)
    assert provider.next_hop(0, 2, 0.0).next_hop == 1
    assert provider.next_hop(0, 2, 0.0).depart_time == 0.0
    # the only sample holds indefinitely, so the arrival is pure propagation
    assert provider.arrival_time(0, 2, 0.0) == pytest.approx(2.0)
    assert ContactPlan(connectivity, resolution=10.0).sample_times(5.0, 1) == [5.0]


def test_best_effort_prefers_fewer_hops_on_equal_delay():
    points = [[0.0, 0.0, 0.0], [LIGHT_SECOND_KM, 0.0, 0.0], [2 * LIGHT_SECOND_KM, 0.0, 0.0]]
    connectivity = fixed_connectivity(points, [(0, 1), (1, 2), (0, 2)])
    connectivity.refresh(0.0)
    provider = BestEffortRoutingDataProvider(connectivity)
    provider.refresh(0.0)
    assert provider.next_hop(0, 2, 0.0).next_hop == 2
    assert provider.hops_to(2) == {2: 0, 0: 1, 1: 1}


def test_best_effort_takes_minimum_delay_over_fewer_hops():
    # 0 -> 1 -> 4 bends off the straight line by a fraction of a microsecond, 0 -> 2 -> 3 -> 4 stays on it
    points = [[0.0, 0.0, 0.0], [500.0, 7.0, 0.0], [1000.0 / 3, 0.0, 0.0], [2000.0 / 3, 0.0, 0.0],
              [1000.0, 0.0, 0.0]]
    connectivity = fixed_connectivity(points, [(0, 1), (1, 4), (0, 2), (2, 3), (3, 4)])
    connectivity.refresh(0.0)
    provider = BestEffortRoutingDataProvider(connectivity)
    provider.refresh(0.0)
    assert provider.next_hop(0, 4, 0.0).next_hop == 2
    assert provider.next_hop(2, 4, 0.0).next_hop == 3
    hop_provider = BestEffortRoutingDataProvider(connectivity, metric="hops")
    hop_provider.refresh(0.0)
    assert hop_provider.next_hop(0, 4, 0.0).next_hop == 1
