from typing import List
import math

from orbitnet.mobility.constellations import GroundStation


# NASA Deep Space Network complexes
DSN_STATIONS = [
    GroundStation("goldstone", 35.244, -121.890),
    GroundStation("canberra", -35.221, 148.981),
    GroundStation("madrid", 40.241, -9.248),
]

# high-latitude sites seeing most passes of a sun-synchronous satellite
POLAR_STATIONS = [
    GroundStation("svalbard", 78.229, 15.407),
    GroundStation("fairbanks", 64.859, -147.844),
]

CONTROL_CENTERS = [
    GroundStation("pcc", 48.084, 11.281),
    GroundStation("mcc", 49.871, 8.622),
]

GOLDEN_ANGLE_DEG = 180.0 * (3.0 - math.sqrt(5.0))


def uniform_ground_stations(count: int = 12, prefix: str = "gs") -> List[GroundStation]:
    """
    Stations spread evenly over a sphere on a Fibonacci lattice, named <prefix>-0 ... <prefix>-(count-1).
    """
    if count <= 0:
        raise ValueError(f"Station count must be positive, got {count}")
    stations = []
    for index in range(count):
        latitude = math.degrees(math.asin(1.0 - 2.0 * (index + 0.5) / count))
        longitude = (index * GOLDEN_ANGLE_DEG) % 360.0 - 180.0
        stations.append(GroundStation(f"{prefix}-{index}", latitude, longitude))
    return stations
