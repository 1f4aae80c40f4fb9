from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Dict, Optional
import math
import numpy as np


SPEED_OF_LIGHT_KM_S = 299792.458

SUN_RADIUS_KM = 695700.0
EARTH_RADIUS_KM = 6371.0
EARTH_MU_KM3_S2 = 398600.4418
EARTH_ROTATION_PERIOD_S = 86164.0905
EARTH_ORBIT_RADIUS_KM = 149.598e6
EARTH_ORBIT_PERIOD_S = 31558149.8
MOON_RADIUS_KM = 1737.4
MOON_MU_KM3_S2 = 4902.8
MOON_ORBIT_RADIUS_KM = 384400.0
MOON_ORBIT_PERIOD_S = 2360591.5
MARS_RADIUS_KM = 3389.5
MARS_MU_KM3_S2 = 42828.37
MARS_ROTATION_PERIOD_S = 88642.66
MARS_ORBIT_RADIUS_KM = 227.94e6
MARS_ORBIT_PERIOD_S = 59355072.0


def orbit_positions(radius_km, inclination_rad, raan_rad, argument_rad) -> np.ndarray:
    """
    Positions on circular orbits, vectorised over any of the inputs.

    :param radius_km: orbit radius
    :param inclination_rad: inclination of the orbital plane
    :param raan_rad: right ascension of the ascending node
    :param argument_rad: angle from the ascending node along the orbit
    :return: array of shape (..., 3)
    """
    cos_raan, sin_raan = np.cos(raan_rad), np.sin(raan_rad)
    cos_arg, sin_arg = np.cos(argument_rad), np.sin(argument_rad)
    cos_inc, sin_inc = np.cos(inclination_rad), np.sin(inclination_rad)
    x = radius_km * (cos_raan * cos_arg - sin_raan * sin_arg * cos_inc)
    y = radius_km * (sin_raan * cos_arg + cos_raan * sin_arg * cos_inc)
    z = radius_km * (sin_arg * sin_inc)
    return np.stack(np.broadcast_arrays(x, y, z), axis=-1)


class Trajectory(ABC):
    """Position of an orbital center relative to its parent."""
    @abstractmethod
    def position(self, t: float) -> np.ndarray:
        pass


class StaticTrajectory(Trajectory):
    def __init__(self, offset_km=(0.0, 0.0, 0.0)):
        self._offset = np.asarray(offset_km, dtype=float)

    def position(self, t: float) -> np.ndarray:
        return self._offset.copy()


class CircularOrbit(Trajectory):
    def __init__(self, radius_km: float, period_s: float, inclination_deg: float = 0.0,
                 raan_deg: float = 0.0, phase_deg: float = 0.0):
        """
        :param radius_km: orbit radius
        :param period_s: orbital period
        :param inclination_deg: inclination of the orbital plane
        :param raan_deg: right ascension of the ascending node
        :param phase_deg: angle along the orbit at t=0
        """
        if radius_km < 0 or period_s <= 0:
            raise ValueError(f"Invalid circular orbit: radius {radius_km} km, period {period_s} s")
        self.radius_km = radius_km
        self.period_s = period_s
        self._inclination = math.radians(inclination_deg)
        self._raan = math.radians(raan_deg)
        self._phase = math.radians(phase_deg)

    @staticmethod
    def from_gravity(radius_km: float, mu_km3_s2: float, **kwargs) -> "CircularOrbit":
        period = 2 * math.pi * math.sqrt(radius_km ** 3 / mu_km3_s2)
        return CircularOrbit(radius_km, period, **kwargs)

    def position(self, t: float) -> np.ndarray:
        angle = self._phase + 2 * math.pi * t / self.period_s
        return orbit_positions(self.radius_km, self._inclination, self._raan, angle)


@dataclass
class OrbitalCenter:
    """
    A frame that constellations are attached to, such as a planet or the root frame.

    :param name: unique center name
    :param parent: name of the parent center, None for the root frame
    :param trajectory: motion relative to the parent
    :param body_radius_km: radius of the body, 0 for point centers
    :param rotation_period_s: sidereal rotation period, None for a non-rotating body
    :param mu_km3_s2: gravitational parameter used for circular orbits around the body
    """
    name: str
    parent: Optional[str] = None
    trajectory: Trajectory = None
    body_radius_km: float = 0.0
    rotation_period_s: Optional[float] = None
    mu_km3_s2: Optional[float] = None

    def __post_init__(self):
        if self.body_radius_km < 0:
            raise ValueError(f"Body radius of {self.name} must be non-negative, got {self.body_radius_km}")
        if self.trajectory is None:
            self.trajectory = StaticTrajectory()

    @property
    def rotation_rate(self) -> float:
        """Rotation rate about the body z axis in rad/s."""
        if not self.rotation_period_s:
            return 0.0
        return 2 * math.pi / self.rotation_period_s


def solar_system_centers(earth_phase_deg: float = 0.0, mars_phase_deg: float = 44.0,
                         moon_phase_deg: float = 0.0) -> Dict[str, OrbitalCenter]:
    """
    Sun-rooted hierarchy with Earth, Moon and Mars on circular orbits.
    The default phases put Mars about 1.07 AU from Earth, a one-way light time of roughly 530 s.
    """
    sun = OrbitalCenter(name="sun", body_radius_km=SUN_RADIUS_KM)
    earth = OrbitalCenter(name="earth", parent="sun",
                          trajectory=CircularOrbit(EARTH_ORBIT_RADIUS_KM, EARTH_ORBIT_PERIOD_S,
                                                   phase_deg=earth_phase_deg),
                          body_radius_km=EARTH_RADIUS_KM,
                          rotation_period_s=EARTH_ROTATION_PERIOD_S,
                          mu_km3_s2=EARTH_MU_KM3_S2)
    # tidally locked: one rotation per orbit
    moon = OrbitalCenter(name="moon", parent="earth",
                         trajectory=CircularOrbit(MOON_ORBIT_RADIUS_KM, MOON_ORBIT_PERIOD_S,
                                                  phase_deg=moon_phase_deg),
                         body_radius_km=MOON_RADIUS_KM,
                         rotation_period_s=MOON_ORBIT_PERIOD_S,
                         mu_km3_s2=MOON_MU_KM3_S2)
    mars = OrbitalCenter(name="mars", parent="sun",
                         trajectory=CircularOrbit(MARS_ORBIT_RADIUS_KM, MARS_ORBIT_PERIOD_S,
                                                  phase_deg=mars_phase_deg),
                         body_radius_km=MARS_RADIUS_KM,
                         rotation_period_s=MARS_ROTATION_PERIOD_S,
                         mu_km3_s2=MARS_MU_KM3_S2)
    return {center.name: center for center in (sun, earth, moon, mars)}


def earth_center() -> OrbitalCenter:
    """Earth as a static root frame, for scenarios that never leave Earth orbit."""
    return OrbitalCenter(name="earth", body_radius_km=EARTH_RADIUS_KM,
                         rotation_period_s=EARTH_ROTATION_PERIOD_S, mu_km3_s2=EARTH_MU_KM3_S2)
