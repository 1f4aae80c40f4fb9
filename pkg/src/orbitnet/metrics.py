from dataclasses import dataclass, asdict
from typing import Dict, Iterable, List, Tuple
import math
import numpy as np
import pandas as pd

from orbitnet.errors import MalformedLogError, EmptySelectionError
from orbitnet.event_log import EventLogRecord, RecordKind
from orbitnet.events import EventKind


CREATED, LOST, DROPPED, DELIVERED = 0, 1, 2, 3


@dataclass(frozen=True)
class AggregateStats:
    created: int
    delivered: int
    dropped: int
    lost: int
    residual: int
    delivered_pct: float
    dropped_pct: float
    lost_pct: float
    residual_pct: float
    mean_latency_s: float
    mean_hops: float
    mean_link_utilization_pct: float
    max_link_utilization_pct: float

    def to_dict(self) -> dict:
        return asdict(self)


class StatsAccumulator:
    """
    Running aggregate over log records.
    The simulation feeds it live, summarize() folds a stored log through the same code so both produce the same numbers.
    """
    def __init__(self):
        self._outcomes: Dict[int, int] = {}
        self._latency_sum = 0.0
        self._hops_sum = 0
        self._busy: Dict[Tuple[int, int], float] = {}
        self._start_time = None
        self._end_time = None

    @property
    def complete(self) -> bool:
        return self._end_time is not None

    def add(self, record: EventLogRecord):
        kind = record.kind
        if kind == EventKind.MESSAGE_CREATED.value:
            # broadcast originals only exist to spawn per-neighbor copies
            if record.destination is not None:
                self._outcomes[self._require(record, "message_uid")] = CREATED
        elif kind == EventKind.MESSAGE_RECEIVED.value:
            uid = self._require(record, "message_uid")
            if record.node == record.destination and self._outcomes.get(uid, DELIVERED) != DELIVERED:
                self._outcomes[uid] = DELIVERED
                self._latency_sum += record.time - self._require(record, "created_at")
                self._hops_sum += self._require(record, "hops")
        elif kind == EventKind.MESSAGE_DROPPED.value:
            self._mark(self._require(record, "message_uid"), DROPPED)
        elif kind == RecordKind.MESSAGE_LOST:
            self._mark(self._require(record, "message_uid"), LOST)
        elif kind == RecordKind.TRANSMISSION:
            link = (self._require(record, "node"), self._require(record, "peer"))
            self._busy[link] = self._busy.get(link, 0.0) + self._require(record, "duration")
        elif kind == RecordKind.SIMULATION_START:
            self._start_time = record.time
        elif kind == RecordKind.SIMULATION_END:
            self._end_time = record.time

    def _mark(self, uid: int, outcome: int):
        if uid in self._outcomes and self._outcomes[uid] < outcome:
            self._outcomes[uid] = outcome

    @staticmethod
    def _require(record: EventLogRecord, field_name: str):
        value = getattr(record, field_name)
        if value is None:
            raise MalformedLogError(f"{record.kind} record at t={record.time} is missing {field_name}")
        return value

    def link_utilization(self) -> Dict[Tuple[int, int], float]:
        """Busy-time percentage per directed link that carried at least one item."""
        start = self._start_time if self._start_time is not None else 0.0
        end = self._end_time if self._end_time is not None else start
        span = end - start
        if span <= 0:
            return {link: 0.0 for link in self._busy}
        return {link: min(100.0, 100.0 * busy / span) for link, busy in self._busy.items()}

    def summary(self) -> AggregateStats:
        counts = [0, 0, 0, 0]
        for outcome in self._outcomes.values():
            counts[outcome] += 1
        created = len(self._outcomes)
        residual, lost, dropped, delivered = counts

        def pct(count):
            return 100.0 * count / created if created else 0.0

        utilization = list(self.link_utilization().values())
        return AggregateStats(
            created=created,
            delivered=delivered,
            dropped=dropped,
            lost=lost,
            residual=residual,
            delivered_pct=pct(delivered),
            dropped_pct=pct(dropped),
            lost_pct=pct(lost),
            residual_pct=pct(residual),
            mean_latency_s=self._latency_sum / delivered if delivered else math.nan,
            mean_hops=self._hops_sum / delivered if delivered else math.nan,
            mean_link_utilization_pct=sum(utilization) / len(utilization) if utilization else 0.0,
            max_link_utilization_pct=max(utilization) if utilization else 0.0,
        )


def summarize(log: Iterable[EventLogRecord]) -> AggregateStats:
    """
    Compute the scenario-level statistics of a complete run log.

    :param log: EventLog or any iterable of records, in logged order
    :return: aggregate statistics
    """
    accumulator = StatsAccumulator()
    for record in log:
        accumulator.add(record)
    if not accumulator.complete:
        raise MalformedLogError("Log has no SimulationEnd record, the run did not complete")
    return accumulator.summary()


def _run_span(records: List[EventLogRecord]) -> Tuple[float, float]:
    start = next((r.time for r in records if r.kind == RecordKind.SIMULATION_START), 0.0)
    end = next((r.time for r in reversed(records) if r.kind == RecordKind.SIMULATION_END), None)
    if end is None:
        end = max((r.time for r in records), default=start)
    return start, end


def saturation_timeseries(log: Iterable[EventLogRecord], link: Tuple[int, int], bin_s: float,
                          start: float = None, end: float = None) -> List[Tuple[float, float]]:
    """
    Per-bin busy-time percentage of one transmitter.

    :param log: run log
    :param link: (sender, receiver) node ids, utilization is tracked per direction
    :param bin_s: bin width in seconds
    :param start: first bin start, defaults to the run start
    :param end: end of the last bin, defaults to the run end
    :return: list of (bin start time, utilization percent)
    """
    if bin_s <= 0:
        raise ValueError(f"Bin width must be positive, got {bin_s}")
    records = list(log)
    run_start, run_end = _run_span(records)
    start = run_start if start is None else start
    end = run_end if end is None else end
    n_bins = max(1, int(math.ceil((end - start) / bin_s)))
    busy = np.zeros(n_bins)
    for record in records:
        if record.kind != RecordKind.TRANSMISSION or (record.node, record.peer) != tuple(link):
            continue
        tx_start, tx_end = record.time - record.duration, record.time
        first = max(0, int((tx_start - start) // bin_s))
        last = min(n_bins - 1, int((tx_end - start) // bin_s))
        for index in range(first, last + 1):
            bin_start = start + index * bin_s
            overlap = min(tx_end, bin_start + bin_s) - max(tx_start, bin_start)
            if overlap > 0:
                busy[index] += overlap
    utilization = np.minimum(100.0, 100.0 * busy / bin_s)
    return [(start + index * bin_s, float(utilization[index])) for index in range(n_bins)]


def delivered_latencies(log: Iterable[EventLogRecord]) -> List[float]:
    latencies = []
    for record in log:
        if record.kind == EventKind.MESSAGE_RECEIVED.value and record.node == record.destination:
            latencies.append(record.time - record.created_at)
    return latencies


def latency_histogram(log: Iterable[EventLogRecord], bins=10) -> Tuple[np.ndarray, np.ndarray]:
    """
    Histogram of delivered-message latencies.

    :return: (counts, bin edges) as returned by numpy.histogram
    """
    latencies = delivered_latencies(log)
    if not latencies:
        raise EmptySelectionError("No delivered messages in the log")
    return np.histogram(np.asarray(latencies), bins=bins)


def hop_sequences(log: Iterable[EventLogRecord]) -> Dict[int, List[int]]:
    """Nodes visited by every unicast message, in order, starting at its source."""
    sequences: Dict[int, List[int]] = {}
    for record in log:
        if record.kind == EventKind.MESSAGE_CREATED.value and record.destination is not None:
            sequences[record.message_uid] = [record.node]
        elif record.kind == EventKind.MESSAGE_RECEIVED.value and record.message_uid in sequences:
            sequences[record.message_uid].append(record.node)
    return sequences


def is_simple_path(sequence: List[int]) -> bool:
    return len(sequence) == len(set(sequence))


def summary_table(rows: List[Tuple[str, str, AggregateStats]]) -> pd.DataFrame:
    """
    Build the per-scenario results table.

    :param rows: (scenario name, delivery mode, stats) triples
    """
    return pd.DataFrame([
        {
            "Scenario": scenario,
            "Delivery": mode,
            "Delivered (%)": round(stats.delivered_pct, 2),
            "Dropped (%)": round(stats.dropped_pct, 2),
            "Lost (%)": round(stats.lost_pct, 2),
            "Mean Latency (s)": round(stats.mean_latency_s, 2),
            "Mean Hops": round(stats.mean_hops, 2),
            "Mean Link Utilization (%)": round(stats.mean_link_utilization_pct, 2),
            "Max Link Utilization (%)": round(stats.max_link_utilization_pct, 2),
        }
        for scenario, mode, stats in rows
    ])
