from abc import ABC, abstractmethod
from dataclasses import dataclass
from datetime import datetime
from typing import List, Sequence, Tuple
import math
import numpy as np
from overrides import overrides
from sgp4.api import SatrecArray, SGP4_ERRORS

from orbitnet.errors import InvalidWalkerParamsError, PropagationError
from orbitnet.mobility.centers import (OrbitalCenter, CircularOrbit, orbit_positions, EARTH_RADIUS_KM,
                                      EARTH_MU_KM3_S2)
from orbitnet.mobility.tle import TLERecord, datetime_to_julian
from orbitnet.utils import get_logger


logger = get_logger(__name__)


class Constellation(ABC):
    """
    A group of nodes whose positions are defined relative to one orbital center.
    """
    is_ground = False

    def __init__(self, name: str, center: OrbitalCenter, node_names: List[str]):
        self.name = name
        self.center = center
        self._node_names = list(node_names)

    @property
    def size(self) -> int:
        return len(self._node_names)

    @property
    def node_names(self) -> List[str]:
        return list(self._node_names)

    @abstractmethod
    def relative_positions(self, t: float) -> np.ndarray:
        """
        Positions of all nodes relative to the orbital center.

        :param t: simulation time in seconds
        :return: array of shape (size, 3) in km, NaN rows for nodes without a valid position
        """
        pass


class FixedPointConstellation(Constellation):
    def __init__(self, name: str, center: OrbitalCenter, points_km: Sequence[Sequence[float]],
                 node_names: List[str] = None):
        points = np.asarray(points_km, dtype=float).reshape(-1, 3)
        if node_names is None:
            node_names = [f"{name}-{index}" for index in range(len(points))]
        super().__init__(name, center, node_names)
        self._points = points

    @overrides
    def relative_positions(self, t: float) -> np.ndarray:
        return self._points.copy()


class OrbitingConstellation(Constellation):
    """Individually placed satellites, each on its own circular orbit around the center (relays, gateways)."""
    def __init__(self, name: str, center: OrbitalCenter, orbits: List[CircularOrbit], node_names: List[str]):
        if len(orbits) != len(node_names):
            raise ValueError(f"Got {len(orbits)} orbits for {len(node_names)} satellites in {name}")
        super().__init__(name, center, node_names)
        self.orbits = list(orbits)

    @staticmethod
    def around(name: str, center: OrbitalCenter, satellites: Sequence[Tuple[str, float, float, float]]
               ) -> "OrbitingConstellation":
        """
        :param satellites: (node name, altitude km, inclination deg, phase deg) per satellite
        """
        if center.mu_km3_s2 is None:
            raise ValueError(f"Orbital center {center.name} has no gravitational parameter")
        orbits = [CircularOrbit.from_gravity(center.body_radius_km + altitude, center.mu_km3_s2,
                                             inclination_deg=inclination, phase_deg=phase)
                  for _, altitude, inclination, phase in satellites]
        return OrbitingConstellation(name, center, orbits, [satellite[0] for satellite in satellites])

    @overrides
    def relative_positions(self, t: float) -> np.ndarray:
        return np.array([orbit.position(t) for orbit in self.orbits], dtype=float).reshape(-1, 3)


@dataclass(frozen=True)
class GroundStation:
    name: str
    latitude_deg: float
    longitude_deg: float
    altitude_km: float = 0.0


class GroundStationConstellation(Constellation):
    """Surface sites that rotate with their body."""
    is_ground = True

    def __init__(self, name: str, center: OrbitalCenter, stations: List[GroundStation]):
        super().__init__(name, center, [station.name for station in stations])
        latitudes = np.radians([station.latitude_deg for station in stations])
        longitudes = np.radians([station.longitude_deg for station in stations])
        radii = center.body_radius_km + np.asarray([station.altitude_km for station in stations], dtype=float)
        self._radii = radii
        self._latitudes = latitudes
        self._longitudes = longitudes

    @overrides
    def relative_positions(self, t: float) -> np.ndarray:
        longitudes = self._longitudes + self.center.rotation_rate * t
        cos_lat = np.cos(self._latitudes)
        return np.stack([self._radii * cos_lat * np.cos(longitudes),
                         self._radii * cos_lat * np.sin(longitudes),
                         self._radii * np.sin(self._latitudes)], axis=-1)


@dataclass(frozen=True)
class WalkerParams:
    """
    Walker delta pattern i:t/p/f.

    :param total_sats: number of satellites t
    :param planes: number of orbital planes p
    :param phasing: relative phasing f between adjacent planes
    :param inclination: inclination in degrees
    :param altitude: altitude above the body surface in km
    :param epoch_raan_offset: RAAN of the first plane in degrees
    """
    total_sats: int = 66
    planes: int = 6
    phasing: int = 1
    inclination: float = 86.4
    altitude: float = 781.0
    epoch_raan_offset: float = 0.0

    def __post_init__(self):
        if self.total_sats <= 0 or self.planes <= 0:
            raise InvalidWalkerParamsError(f"Walker needs positive satellite and plane counts, got "
                                           f"{self.total_sats}/{self.planes}")
        if self.total_sats % self.planes != 0:
            raise InvalidWalkerParamsError(f"Number of planes {self.planes} does not divide "
                                           f"number of satellites {self.total_sats}")
        if not 0 <= self.phasing < self.planes:
            raise InvalidWalkerParamsError(f"Phasing must be in [0, {self.planes}), got {self.phasing}")
        if self.altitude < 0:
            raise InvalidWalkerParamsError(f"Altitude must be non-negative, got {self.altitude}")

    @property
    def sats_per_plane(self) -> int:
        return self.total_sats // self.planes


def walker_positions(params: WalkerParams, t: float, body_radius_km: float = EARTH_RADIUS_KM,
                     mu_km3_s2: float = EARTH_MU_KM3_S2) -> np.ndarray:
    """
    Center-relative positions of a Walker delta constellation, ordered plane by plane.

    :return: array of shape (total_sats, 3) in km
    """
    radius = body_radius_km + params.altitude
    mean_motion = math.sqrt(mu_km3_s2 / radius ** 3)
    per_plane = params.sats_per_plane
    plane = np.repeat(np.arange(params.planes), per_plane)
    slot = np.tile(np.arange(per_plane), params.planes)
    raan = np.radians(params.epoch_raan_offset + plane * 360.0 / params.planes)
    anomaly = (np.radians(slot * 360.0 / per_plane + plane * params.phasing * 360.0 / params.total_sats)
               + mean_motion * t)
    return orbit_positions(radius, math.radians(params.inclination), raan, anomaly)


class WalkerConstellation(Constellation):
    def __init__(self, name: str, center: OrbitalCenter, params: WalkerParams):
        if center.mu_km3_s2 is None:
            raise InvalidWalkerParamsError(f"Orbital center {center.name} has no gravitational parameter")
        per_plane = params.sats_per_plane
        names = [f"{name}-{plane}-{slot}" for plane in range(params.planes) for slot in range(per_plane)]
        super().__init__(name, center, names)
        self.params = params

    @property
    def period_s(self) -> float:
        radius = self.center.body_radius_km + self.params.altitude
        return 2 * math.pi * math.sqrt(radius ** 3 / self.center.mu_km3_s2)

    def plane_slot(self, index: int) -> Tuple[int, int]:
        return divmod(index, self.params.sats_per_plane)

    @overrides
    def relative_positions(self, t: float) -> np.ndarray:
        return walker_positions(self.params, t, self.center.body_radius_km, self.center.mu_km3_s2)


class TLEConstellation(Constellation):
    """
    Satellites propagated with SGP4 from their element sets, time 0 being the given epoch.
    Satellites that fail to propagate get NaN positions and therefore never form links.
    """
    def __init__(self, name: str, center: OrbitalCenter, records: List[TLERecord], epoch: datetime):
        super().__init__(name, center, [record.name for record in records])
        self.records = list(records)
        self.epoch = epoch
        self._satellites = SatrecArray([record.to_satrec() for record in records])
        self._jd, self._fr = datetime_to_julian(epoch)
        self._reported = set()

    @overrides
    def relative_positions(self, t: float) -> np.ndarray:
        jd = np.array([self._jd])
        fr = np.array([self._fr + t / 86400.0])
        errors, positions, _ = self._satellites.sgp4(jd, fr)
        positions = np.array(positions[:, 0, :], dtype=float)
        failed = errors[:, 0] != 0
        if failed.any():
            positions[failed] = np.nan
            for index in np.flatnonzero(failed):
                if index not in self._reported:
                    self._reported.add(index)
                    logger.warning(f"SGP4 propagation failed for {self.records[index].name} at t={t}: "
                                   f"{SGP4_ERRORS.get(int(errors[index, 0]), errors[index, 0])}")
        return positions

    def position_of(self, index: int, t: float) -> np.ndarray:
        position = self.relative_positions(t)[index]
        if np.isnan(position).any():
            raise PropagationError(f"SGP4 failed for {self.records[index].name} at t={t}")
        return position
