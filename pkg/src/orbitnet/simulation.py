from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Any, List, Optional
import heapq
from tqdm import tqdm

from orbitnet.errors import SchedulingInPastError
from orbitnet.event_log import EventLog, EventLogRecord, RecordKind
from orbitnet.events import Event, EventKind, RoutingUpdateEvent
from orbitnet.metrics import StatsAccumulator, AggregateStats
from orbitnet.connectivity.topology import ConnectivityModel, TopologySnapshot, diff_topology
from orbitnet.utils import get_logger


logger = get_logger(__name__)


class Actor(ABC):
    """
    Interface for everything that reacts to simulation events.
    Every actor is offered every event, in registration order, and decides for itself what to handle.
    """
    name = "actor"

    def attach(self, simulation: "Simulation"):
        self._simulation = simulation

    @property
    def simulation(self) -> "Simulation":
        return self._simulation

    def on_initialize(self, time: float):
        """
        Optional hook called once after the initial topology is known, e.g. to schedule the first events.
        """
        pass

    @abstractmethod
    def handle_event(self, event: Event):
        """
        React to an event, scheduling follow-up events on the simulation if needed.

        :param event: the event being dispatched
        """
        pass

    def post_run(self, time: float):
        """
        Optional hook called when run() reaches its end time, before the final log record is written.
        """
        pass


class DataProvider(ABC):
    """Model state that is recomputed at refresh ticks (e.g. routing tables)."""
    @abstractmethod
    def refresh(self, time: float):
        pass


@dataclass
class SimulationConfig:
    """
    :param min_time_delta: minimum simulated seconds between two model refreshes, 0 refreshes on every time advance
    :param end_time: default end time for run()
    :param rng_seed: seed shared by the scenario for its random streams
    """
    min_time_delta: float = 0.01
    end_time: float = 86400.0
    rng_seed: int = 0

    def __post_init__(self):
        if self.min_time_delta < 0:
            raise ValueError(f"min_time_delta must be non-negative, got {self.min_time_delta}")


@dataclass(frozen=True)
class RunSummary:
    events_processed: int
    final_time: float
    remaining_events: int
    refresh_count: int
    stats: AggregateStats


class Simulation:
    """
    Discrete-event engine: a priority queue of events ordered by (time, sequence),
    dispatched to actors, with mobility/connectivity refreshes gated by min_time_delta.
    """
    def __init__(self, config: SimulationConfig = None,
                 connectivity: ConnectivityModel = None,
                 event_log: EventLog = None,
                 aggregate_only: bool = False):
        """
        :param config: engine configuration
        :param connectivity: topology source refreshed at refresh ticks, None for a bare event loop
        :param event_log: log receiving every record, a new one is created unless aggregate_only is set
        :param aggregate_only: keep only the running statistics, no per-event records
        """
        self._config = config if config is not None else SimulationConfig()
        self._connectivity = connectivity
        if event_log is None and not aggregate_only:
            event_log = EventLog()
        self._event_log = event_log if not aggregate_only else None
        self._stats = StatsAccumulator()
        self._actors: List[Actor] = []
        self._providers: List[DataProvider] = []
        self._queue = []
        self._sequence = 0
        self._uid = 0
        self._time = 0.0
        self._last_refresh: Optional[float] = None
        self._refresh_count = 0
        self._events_processed = 0
        self._initialized = False
        self._run_called = False

    @property
    def time(self) -> float:
        return self._time

    @property
    def config(self) -> SimulationConfig:
        return self._config

    @property
    def connectivity(self) -> Optional[ConnectivityModel]:
        return self._connectivity

    @property
    def event_log(self) -> Optional[EventLog]:
        return self._event_log

    @property
    def stats(self) -> StatsAccumulator:
        return self._stats

    @property
    def refresh_count(self) -> int:
        """Number of model refreshes performed while stepping (the initial one is not counted)."""
        return self._refresh_count

    @property
    def pending_events(self) -> int:
        return sum(1 for _, _, event in self._queue if not event.canceled)

    @property
    def actors(self) -> List[Actor]:
        return list(self._actors)

    def add_actor(self, actor: Actor):
        if self._initialized:
            raise RuntimeError("Actors must be registered before the simulation is initialized")
        actor.attach(self)
        self._actors.append(actor)

    def add_data_provider(self, provider: DataProvider):
        if self._initialized:
            raise RuntimeError("Data providers must be registered before the simulation is initialized")
        self._providers.append(provider)

    def new_uid(self) -> int:
        """Run-wide unique id for messages and segments."""
        self._uid += 1
        return self._uid

    def schedule(self, event: Event) -> Event:
        if event.time < self._time:
            raise SchedulingInPastError(event.time, self._time)
        event.sequence = self._sequence
        self._sequence += 1
        heapq.heappush(self._queue, (event.time, event.sequence, event))
        return event

    def schedule_at(self, time: float, kind: EventKind, payload: Any = None) -> Event:
        return self.schedule(Event(time=time, kind=kind, payload=payload))

    def cancel(self, event: Event):
        """Cancel a scheduled event, it will be skipped without being dispatched or logged."""
        event.canceled = True

    def record(self, record: EventLogRecord):
        self._stats.add(record)
        if self._event_log is not None:
            self._event_log.append(record)

    def initialize(self, time: float = 0.0):
        """
        Set the start time, compute the initial topology and announce every initially active link.

        :param time: simulation time of the scenario epoch
        """
        if self._initialized:
            raise RuntimeError("A Simulation can only be initialized once")
        self._initialized = True
        self._time = time
        self.record(EventLogRecord(time=time, kind=RecordKind.SIMULATION_START))
        changes = []
        if self._connectivity is not None:
            snapshot = self._connectivity.refresh(time)
            changes = diff_topology(TopologySnapshot(time=time, links=frozenset()), snapshot)
        for provider in self._providers:
            provider.refresh(time)
        self._last_refresh = time
        for event in changes:
            self.schedule(event)
        for actor in self._actors:
            actor.on_initialize(time)

    def _peek(self) -> Optional[Event]:
        while self._queue and self._queue[0][2].canceled:
            heapq.heappop(self._queue)
        return self._queue[0][2] if self._queue else None

    def _should_refresh(self, time: float) -> bool:
        return time > self._last_refresh and time - self._last_refresh >= self._config.min_time_delta

    def _refresh(self, time: float):
        self._last_refresh = time
        self._refresh_count += 1
        changes = []
        if self._connectivity is not None:
            previous = self._connectivity.snapshot
            snapshot = self._connectivity.refresh(time)
            changes = diff_topology(previous, snapshot)
        for provider in self._providers:
            provider.refresh(time)
        for event in changes:
            self.schedule(event)
        if changes:
            links_up = sum(1 for event in changes if event.kind == EventKind.LINK_UP)
            self.schedule_at(time, EventKind.ROUTING_TABLE_UPDATE,
                             RoutingUpdateEvent(links_up=links_up, links_down=len(changes) - links_up))

    def step(self) -> Optional[Event]:
        """
        Dispatch the next event.

        :return: the dispatched event, or None when the queue is empty
        """
        if not self._initialized:
            raise RuntimeError("Simulation must be initialized before stepping")
        if self._peek() is None:
            return None
        time, _, event = heapq.heappop(self._queue)
        self._time = time
        if self._should_refresh(time):
            self._refresh(time)
        self.record(EventLogRecord.from_event(event))
        for actor in self._actors:
            actor.handle_event(event)
        self._events_processed += 1
        return event

    def run(self, end_time: float = None, progress: bool = False) -> RunSummary:
        """
        Step until the queue is empty or the next event lies beyond end_time (inclusive boundary).

        :param end_time: last simulated second to process, defaults to config.end_time
        :param progress: show a progress bar over simulated time
        :return: run summary
        """
        if not self._initialized:
            raise RuntimeError("Simulation must be initialized before run() is called")
        if self._run_called:
            raise RuntimeError("A Simulation run() function can only be called once and then it should be discarded.")
        self._run_called = True
        end_time = self._config.end_time if end_time is None else end_time
        start_time = self._time
        logger.info(f"Running simulation from t={start_time} to t={end_time}")

        with tqdm(total=max(0.0, end_time - start_time), desc="Simulation", unit="s",
                  disable=not progress) as progress_bar:
            shown = start_time
            while True:
                head = self._peek()
                if head is None or head.time > end_time:
                    break
                self.step()
                if progress and self._time > shown:
                    progress_bar.update(self._time - shown)
                    shown = self._time

        for actor in self._actors:
            actor.post_run(end_time)
        self.record(EventLogRecord(time=end_time, kind=RecordKind.SIMULATION_END))
        summary = RunSummary(events_processed=self._events_processed,
                             final_time=self._time,
                             remaining_events=self.pending_events,
                             refresh_count=self._refresh_count,
                             stats=self._stats.summary())
        logger.info(f"Simulation finished: {summary.events_processed} events processed, "
                    f"{summary.refresh_count} model refreshes, {summary.remaining_events} events left in queue")
        return summary
