from orbitnet.simulation import Actor, DataProvider, Simulation, SimulationConfig
from orbitnet.events import CustomEvent, Event, EventKind
from orbitnet.errors import SchedulingInPastError
from orbitnet.event_log import RecordKind
from hypothesis import given, settings, strategies as st
import pytest


class RecordingActor(Actor):
    name = "recorder"

    def __init__(self):
        self.events = []

    def handle_event(self, event: Event):
        self.events.append(event)


class CountingProvider(DataProvider):
    def __init__(self):
        self.refreshed_at = []

    def refresh(self, time: float):
        self.refreshed_at.append(time)


def custom(simulation: Simulation, time: float, name: str) -> Event:
    return simulation.schedule_at(time, EventKind.SCENARIO_CUSTOM, CustomEvent(name))


def recording_simulation_run(min_time_delta=0.0):
    simulation = Simulation(SimulationConfig(min_time_delta=min_time_delta))
    recorder = RecordingActor()
    provider = CountingProvider()
    simulation.add_actor(recorder)
    simulation.add_data_provider(provider)
    simulation.initialize(0.0)
    return simulation, recorder, provider


def test_equal_times_dispatch_in_scheduling_order():
    simulation, recorder, _ = recording_simulation_run()
    custom(simulation, 5.0, "first")
    custom(simulation, 1.0, "early")
    custom(simulation, 5.0, "second")
    custom(simulation, 5.0, "third")
    simulation.run(10.0)
    assert [event.payload.name for event in recorder.events] == ["early", "first", "second", "third"]


def test_scheduling_in_the_past_raises():
    simulation, _, _ = recording_simulation_run()
    custom(simulation, 3.0, "advance")
    simulation.step()
    assert simulation.time == 3.0
    with pytest.raises(SchedulingInPastError):
        custom(simulation, 2.0, "late")
    # scheduling at the current time is allowed
    custom(simulation, 3.0, "now")


def test_run_can_only_be_called_once():
    simulation, _, _ = recording_simulation_run()
    simulation.run(1.0)
    with pytest.raises(RuntimeError):
        simulation.run(2.0)


def test_engine_misuse_raises():
    simulation = Simulation()
    with pytest.raises(RuntimeError):
        simulation.step()
    simulation.initialize(0.0)
    with pytest.raises(RuntimeError):
        simulation.initialize(0.0)
    with pytest.raises(RuntimeError):
        simulation.add_actor(RecordingActor())


def test_run_boundary_is_inclusive():
    simulation, recorder, _ = recording_simulation_run()
    custom(simulation, 10.0, "at-end")
    custom(simulation, 10.5, "after-end")
    summary = simulation.run(10.0)
    assert [event.payload.name for event in recorder.events] == ["at-end"]
    assert summary.remaining_events == 1
    assert simulation.event_log.records[-1].kind == RecordKind.SIMULATION_END
    assert simulation.event_log.records[-1].time == 10.0


def test_empty_queue_returns_none():
    simulation, _, _ = recording_simulation_run()
    assert simulation.step() is None
    summary = simulation.run(100.0)
    assert summary.events_processed == 0


def test_canceled_events_are_skipped_and_not_logged():
    simulation, recorder, _ = recording_simulation_run()
    kept = custom(simulation, 1.0, "kept")
    canceled = custom(simulation, 2.0, "canceled")
    simulation.cancel(canceled)
    simulation.run(5.0)
    assert recorder.events == [kept]
    assert all(record.detail != "canceled" for record in simulation.event_log)


def test_refresh_is_gated_by_min_time_delta():
    simulation, _, provider = recording_simulation_run(min_time_delta=10.0)
    for time in (1.0, 2.0, 3.0, 15.0, 16.0, 30.0):
        custom(simulation, time, "tick")
    simulation.run(40.0)
    assert provider.refreshed_at == [0.0, 15.0, 30.0]
    assert simulation.refresh_count == 2


def test_zero_min_time_delta_refreshes_on_every_time_advance():
    simulation, _, provider = recording_simulation_run(min_time_delta=0.0)
    for time in (1.0, 2.0, 2.0, 3.0):
        custom(simulation, time, "tick")
    simulation.run(5.0)
    assert provider.refreshed_at == [0.0, 1.0, 2.0, 3.0]


def test_new_uid_is_unique_and_increasing():
    simulation = Simulation()
    uids = [simulation.new_uid() for _ in range(100)]
    assert uids == sorted(set(uids))


def test_negative_min_time_delta_raises():
    with pytest.raises(ValueError):
        SimulationConfig(min_time_delta=-1.0)


@settings(max_examples=200, deadline=None)
@given(st.lists(st.integers(min_value=0, max_value=20), min_size=1, max_size=50))
def test_dispatch_order_is_time_then_insertion(times):
    simulation, recorder, _ = recording_simulation_run()
    for index, time in enumerate(times):
        custom(simulation, float(time), str(index))
    simulation.run(100.0)
    dispatched = [(event.time, int(event.payload.name)) for event in recorder.events]
    assert dispatched == sorted((float(time), index) for index, time in enumerate(times))
