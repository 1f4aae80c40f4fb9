from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Callable, Iterator, List, Optional, Sequence, Tuple, Union
import math
import numpy as np
from overrides import overrides

from orbitnet.events import Event, EventKind, Message, MessageEvent
from orbitnet.simulation import Actor
from orbitnet.utils import get_logger


logger = get_logger(__name__)

MAX_ENDPOINT_DRAWS = 1000


class Distribution(ABC):
    """A positive-valued random quantity (inter-arrival time, message size, endpoint index)."""
    @abstractmethod
    def sample(self, rng: np.random.Generator) -> float:
        pass


@dataclass(frozen=True)
class Constant(Distribution):
    value: float

    @overrides
    def sample(self, rng: np.random.Generator) -> float:
        return self.value


@dataclass(frozen=True)
class Uniform(Distribution):
    low: float
    high: float

    def __post_init__(self):
        if self.high < self.low:
            raise ValueError(f"Uniform bounds are reversed: [{self.low}, {self.high}]")

    @overrides
    def sample(self, rng: np.random.Generator) -> float:
        return float(rng.uniform(self.low, self.high))


class Gaussian(Distribution):
    """Normal distribution, non-positive draws are drawn again."""
    def __init__(self, mean: float, std: float):
        if std < 0:
            raise ValueError(f"Standard deviation must be non-negative, got {std}")
        if std == 0 and mean <= 0:
            raise ValueError(f"A degenerate Gaussian needs a positive mean, got {mean}")
        self.mean = mean
        self.std = std
        self.redraws = 0

    @overrides
    def sample(self, rng: np.random.Generator) -> float:
        value = float(rng.normal(self.mean, self.std))
        while value <= 0:
            self.redraws += 1
            if self.redraws == 1:
                logger.warning(f"Gaussian(mean={self.mean}, std={self.std}) produced a non-positive draw, "
                               f"drawing again")
            value = float(rng.normal(self.mean, self.std))
        return value


@dataclass(frozen=True)
class Pareto(Distribution):
    """Pareto with minimum value `scale` and tail index `shape`."""
    scale: float
    shape: float

    def __post_init__(self):
        if self.scale <= 0 or self.shape <= 0:
            raise ValueError(f"Pareto scale and shape must be positive, got {self.scale} and {self.shape}")

    @overrides
    def sample(self, rng: np.random.Generator) -> float:
        return float((rng.pareto(self.shape) + 1.0) * self.scale)


def create_distribution(name: str, **params) -> Distribution:
    """
    :param name: "constant", "uniform", "gaussian" or "pareto"
    :param params: constructor arguments of the distribution
    """
    distributions = {"constant": Constant, "uniform": Uniform, "gaussian": Gaussian, "pareto": Pareto}
    if name not in distributions:
        raise ValueError(f"Unknown distribution: {name}")
    return distributions[name](**params)


@dataclass(frozen=True)
class PointToPointFlow:
    """
    Fixed-size messages from one node to another every interval_s seconds.

    :param end_s: last creation time (exclusive), None for the whole run
    """
    source: int
    destination: int
    message_size_bits: int = 8_000_000
    interval_s: float = 1.0
    start_s: float = 0.0
    end_s: Optional[float] = None
    tag: str = "data"

    def __post_init__(self):
        if self.interval_s <= 0:
            raise ValueError(f"Flow interval must be positive, got {self.interval_s}")
        if self.message_size_bits <= 0:
            raise ValueError(f"Message size must be positive, got {self.message_size_bits}")

    def creation_times(self, t0: float, t1: float) -> List[float]:
        """Creation times start_s + k * interval_s falling in [t0, t1)."""
        end = t1 if self.end_s is None else min(t1, self.end_s)
        first = max(0, math.ceil((t0 - self.start_s) / self.interval_s))
        times = []
        k = first
        while True:
            time = self.start_s + k * self.interval_s
            if time >= end:
                break
            if time >= t0:
                times.append(time)
            k += 1
        return times


@dataclass(frozen=True)
class RandomTrafficSpec:
    """
    Messages with random inter-arrival times, sizes and endpoints.

    :param inter_arrival: seconds between consecutive messages
    :param size: message size in bits
    :param sources: candidate source nodes
    :param destinations: candidate destination nodes, defaults to the sources
    :param source_distribution: index into sources (floored and clamped), uniform over sources if None
    :param destination_distribution: index into destinations, uniform if None
    """
    inter_arrival: Distribution
    size: Distribution
    sources: Tuple[int, ...]
    destinations: Optional[Tuple[int, ...]] = None
    source_distribution: Optional[Distribution] = None
    destination_distribution: Optional[Distribution] = None
    seed: int = 0
    start_s: float = 0.0
    end_s: Optional[float] = None
    tag: str = "data"

    def __post_init__(self):
        if not self.sources:
            raise ValueError("Random traffic needs at least one source")
        destinations = self.sources if self.destinations is None else self.destinations
        if len(set(self.sources) | set(destinations)) < 2:
            raise ValueError("Random traffic needs at least two distinct endpoints")


class RandomTrafficGenerator:
    """Draws the messages of a RandomTrafficSpec in creation order, window by window."""
    def __init__(self, spec: RandomTrafficSpec):
        self._spec = spec
        self._rng = np.random.default_rng(spec.seed)
        self._destinations = spec.sources if spec.destinations is None else spec.destinations
        self._next_time = spec.start_s

    @property
    def spec(self) -> RandomTrafficSpec:
        return self._spec

    def _pick(self, nodes: Sequence[int], distribution: Optional[Distribution]) -> int:
        if distribution is None:
            return int(nodes[int(self._rng.integers(len(nodes)))])
        index = int(math.floor(distribution.sample(self._rng)))
        return int(nodes[min(max(index, 0), len(nodes) - 1)])

    def _endpoints(self) -> Tuple[int, int]:
        for _ in range(MAX_ENDPOINT_DRAWS):
            source = self._pick(self._spec.sources, self._spec.source_distribution)
            destination = self._pick(self._destinations, self._spec.destination_distribution)
            if source != destination:
                return source, destination
        raise RuntimeError(f"Could not draw distinct endpoints in {MAX_ENDPOINT_DRAWS} attempts")

    def draw(self, t0: float, t1: float) -> Iterator[Tuple[float, int, int, int]]:
        """
        :return: (creation time, source, destination, size in bits) for the messages created in [t0, t1)
        """
        end = t1 if self._spec.end_s is None else min(t1, self._spec.end_s)
        while self._next_time < end:
            time = self._next_time
            self._next_time += self._spec.inter_arrival.sample(self._rng)
            size = max(1, int(round(self._spec.size.sample(self._rng))))
            source, destination = self._endpoints()
            if time >= t0:
                yield time, source, destination, size


TrafficGenerator = Union[PointToPointFlow, RandomTrafficGenerator]


def generate(generator: TrafficGenerator, t0: float, t1: float, new_uid: Callable[[], int]) -> List[Message]:
    """
    Messages created by a flow or random generator in [t0, t1), in creation order.

    :param new_uid: uid source for the created messages
    """
    if t0 >= t1:
        raise ValueError(f"Traffic window is empty: [{t0}, {t1})")
    if isinstance(generator, PointToPointFlow):
        return [Message(uid=new_uid(), source=generator.source, destination=generator.destination,
                        size_bits=generator.message_size_bits, created_at=time, tag=generator.tag)
                for time in generator.creation_times(t0, t1)]
    return [Message(uid=new_uid(), source=source, destination=destination, size_bits=size, created_at=time,
                    tag=generator.spec.tag)
            for time, source, destination, size in generator.draw(t0, t1)]


def default_flows(nodes: Sequence[int], count: int = 10, message_size_bits: int = 8_000_000,
                  interval_s: float = 1.0) -> List[PointToPointFlow]:
    """Point-to-point flows pairing the first 2 * count nodes in order: (n0, n1), (n2, n3), ..."""
    if len(nodes) < 2 * count:
        raise ValueError(f"{count} flows need {2 * count} nodes, got {len(nodes)}")
    return [PointToPointFlow(source=nodes[2 * i], destination=nodes[2 * i + 1],
                             message_size_bits=message_size_bits, interval_s=interval_s)
            for i in range(count)]


class TrafficActor(Actor):
    """
    Creates the messages of its generators one update interval at a time, driven by TrafficTick events.
    """
    name = "traffic"

    def __init__(self, generators: List[TrafficGenerator], update_interval: float = 300.0,
                 end_time: float = math.inf):
        """
        :param generators: point-to-point flows and random generators
        :param update_interval: seconds of traffic created per tick
        :param end_time: no message is created at or after this time
        """
        if update_interval <= 0:
            raise ValueError(f"Traffic update interval must be positive, got {update_interval}")
        self._generators = [RandomTrafficGenerator(generator) if isinstance(generator, RandomTrafficSpec)
                            else generator for generator in generators]
        self._update_interval = update_interval
        self._end_time = end_time
        self._created = 0

    @property
    def created(self) -> int:
        return self._created

    @overrides
    def on_initialize(self, time: float):
        if self._generators and time < self._end_time:
            self.simulation.schedule_at(time, EventKind.TRAFFIC_TICK)

    def _tick(self, time: float):
        window_end = min(time + self._update_interval, self._end_time)
        messages = []
        for generator in self._generators:
            messages.extend(generate(generator, time, window_end, self.simulation.new_uid))
        for message in sorted(messages, key=lambda message: (message.created_at, message.uid)):
            self.simulation.schedule_at(message.created_at, EventKind.MESSAGE_CREATED,
                                        MessageEvent(message=message, node=message.source))
        self._created += len(messages)
        logger.debug(f"Traffic window [{time}, {window_end}): {len(messages)} messages")
        if window_end < self._end_time:
            self.simulation.schedule_at(window_end, EventKind.TRAFFIC_TICK)

    @overrides
    def handle_event(self, event: Event):
        if event.kind == EventKind.TRAFFIC_TICK:
            self._tick(event.time)
