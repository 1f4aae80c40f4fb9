from dataclasses import dataclass
from typing import Dict, List, Mapping, Sequence, Tuple
import heapq
import math
import numpy as np

from orbitnet.connectivity.topology import ConnectivityModel, LinkId
from orbitnet.mobility.centers import SPEED_OF_LIGHT_KM_S


Sample = Tuple[float, Mapping[LinkId, float]]


@dataclass(frozen=True)
class ArrivalLabel:
    """
    :param arrival: earliest arrival time at the node
    :param path: nodes from the source to this node
    :param first_depart: departure time over the first link of the path (None for the source itself)
    """
    arrival: float
    path: Tuple[int, ...]
    first_depart: float = None


@dataclass
class ContactTable:
    """Sampled topology rearranged per link: sample indices where the link is up and its delay at each."""
    times: np.ndarray
    ends: np.ndarray
    contacts: Dict[LinkId, Tuple[np.ndarray, np.ndarray]]
    adjacency: Dict[int, List[int]]


def build_contact_table(samples: Sequence[Sample]) -> ContactTable:
    """
    :param samples: (sample time, {link: propagation delay}) in ascending time order;
                    the state of sample i holds until sample i+1, the last one indefinitely
    """
    if not samples:
        raise ValueError("At least one topology sample is needed")
    times = np.array([time for time, _ in samples], dtype=float)
    if np.any(np.diff(times) <= 0):
        raise ValueError("Topology samples must have strictly increasing times")
    ends = np.append(times[1:], math.inf)
    indices: Dict[LinkId, List[int]] = {}
    delays: Dict[LinkId, List[float]] = {}
    for index, (_, links) in enumerate(samples):
        for link, delay in links.items():
            indices.setdefault(link, []).append(index)
            delays.setdefault(link, []).append(delay)
    contacts = {link: (np.array(indices[link], dtype=np.int64), np.array(delays[link], dtype=float))
                for link in indices}
    adjacency: Dict[int, List[int]] = {}
    for a, b in contacts:
        adjacency.setdefault(a, []).append(b)
        adjacency.setdefault(b, []).append(a)
    adjacency = {node: sorted(neighbors) for node, neighbors in adjacency.items()}
    return ContactTable(times=times, ends=ends, contacts=contacts, adjacency=adjacency)


def earliest_arrival(table: ContactTable, source: int, start: float) -> Dict[int, ArrivalLabel]:
    """
    Earliest-arrival labels from source over a sampled time-varying topology.

    A message may wait at any node and may cross a link during any sample interval in which the link is up,
    leaving no earlier than its arrival. Crossing takes the propagation delay of that sample.
    Equal arrivals are broken by the lexicographically smallest path.
    """
    if start < table.times[0]:
        raise ValueError(f"Start time {start} precedes the first sample at {table.times[0]}")
    labels: Dict[int, ArrivalLabel] = {}
    best: Dict[int, float] = {source: start}
    heap = [(start, (source,), -math.inf)]
    while heap:
        arrival, path, first_depart = heapq.heappop(heap)
        node = path[-1]
        if node in labels:
            continue
        labels[node] = ArrivalLabel(arrival=arrival, path=path,
                                    first_depart=None if len(path) == 1 else first_depart)
        for neighbor in table.adjacency.get(node, []):
            if neighbor in labels:
                continue
            link = (node, neighbor) if node < neighbor else (neighbor, node)
            indices, delays = table.contacts[link]
            usable = table.ends[indices] > arrival
            if not usable.any():
                continue
            departs = np.maximum(arrival, table.times[indices[usable]])
            arrivals = departs + delays[usable]
            choice = int(np.argmin(arrivals))
            candidate = float(arrivals[choice])
            if candidate > best.get(neighbor, math.inf):
                continue
            best[neighbor] = candidate
            depart = float(departs[choice]) if len(path) == 1 else first_depart
            heapq.heappush(heap, (candidate, path + (neighbor,), depart))
    return labels


class ContactPlan:
    """
    Future topology sampled at a fixed resolution and cached by sample time.
    """
    def __init__(self, connectivity: ConnectivityModel, resolution: float, align_to_grid: bool = False,
                 origin: float = 0.0):
        """
        :param connectivity: topology source
        :param resolution: seconds between samples
        :param align_to_grid: sample at origin + m * resolution (reusable across queries) instead of query time + k * resolution
        :param origin: grid origin when aligned
        """
        if resolution <= 0:
            raise ValueError(f"Lookahead resolution must be positive, got {resolution}")
        self._connectivity = connectivity
        self._resolution = resolution
        self._align_to_grid = align_to_grid
        self._origin = origin
        self._cache: Dict[float, Dict[LinkId, float]] = {}
        self._grid_key = None
        self._grid_table: ContactTable = None

    def sample_times(self, t: float, num_steps: int) -> List[float]:
        """
        Sample instants covering [t, t + (num_steps - 1) * resolution]. With grid alignment the first sample is t
        itself, followed by the grid points inside that horizon.
        The state of the last sample is assumed to hold past the horizon, so num_steps=1 plans on the
        instantaneous topology alone.
        """
        if num_steps < 1:
            raise ValueError(f"Lookahead needs at least one step, got {num_steps}")
        if not self._align_to_grid:
            return [t + step * self._resolution for step in range(num_steps)]
        horizon = t + (num_steps - 1) * self._resolution
        times = [t]
        grid_index = math.floor((t - self._origin) / self._resolution) + 1
        while True:
            time = self._origin + grid_index * self._resolution
            if time > horizon:
                break
            if time > t:
                times.append(time)
            grid_index += 1
        return times

    def links_at(self, time: float, cache: bool = True) -> Dict[LinkId, float]:
        """Active links at a time with their propagation delays."""
        if time in self._cache:
            return self._cache[time]
        snapshot = self._connectivity.compute_topology(time)
        positions = self._connectivity.mobility.positions(time)
        links = {}
        for a, b in sorted(snapshot.links):
            links[(a, b)] = float(np.linalg.norm(positions[a] - positions[b])) / SPEED_OF_LIGHT_KM_S
        if cache:
            self._cache[time] = links
        return links

    def _evict_before(self, t: float):
        for cached in [time for time in self._cache if time < t]:
            del self._cache[cached]

    def samples(self, t: float, num_steps: int) -> List[Sample]:
        self._evict_before(t)
        return [(time, self.links_at(time)) for time in self.sample_times(t, num_steps)]

    def table(self, t: float, num_steps: int) -> ContactTable:
        """Contact table for a query at t, reusing the grid part between queries when aligned."""
        if not self._align_to_grid:
            return build_contact_table(self.samples(t, num_steps))
        grid_times = self.sample_times(t, num_steps)[1:]
        head = (t, self.links_at(t, cache=False))
        if not grid_times:
            return build_contact_table([head])
        key = (grid_times[0], len(grid_times))
        if key != self._grid_key:
            self._evict_before(grid_times[0])
            self._grid_table = build_contact_table([(time, self.links_at(time)) for time in grid_times])
            self._grid_key = key
        return prepend_sample(head, self._grid_table)


def prepend_sample(head: Sample, table: ContactTable) -> ContactTable:
    """Contact table with one more sample in front of an existing one."""
    head_time, head_links = head
    if head_time >= table.times[0]:
        raise ValueError(f"Prepended sample at {head_time} must precede {table.times[0]}")
    times = np.concatenate([[head_time], table.times])
    ends = np.concatenate([[table.times[0]], table.ends])
    contacts = {}
    for link in set(head_links) | set(table.contacts):
        indices, delays = table.contacts.get(link, (np.zeros(0, dtype=np.int64), np.zeros(0)))
        if link in head_links:
            contacts[link] = (np.concatenate([[0], indices + 1]).astype(np.int64),
                              np.concatenate([[head_links[link]], delays]))
        else:
            contacts[link] = (indices + 1, delays)
    adjacency: Dict[int, List[int]] = {}
    for a, b in contacts:
        adjacency.setdefault(a, []).append(b)
        adjacency.setdefault(b, []).append(a)
    adjacency = {node: sorted(neighbors) for node, neighbors in adjacency.items()}
    return ContactTable(times=times, ends=ends, contacts=contacts, adjacency=adjacency)
