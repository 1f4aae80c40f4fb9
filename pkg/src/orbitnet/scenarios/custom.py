from datetime import datetime, timezone
import os

from orbitnet.actors.traffic import PointToPointFlow, default_flows
from orbitnet.actors.transmission import LossConfig
from orbitnet.connectivity.rules import (LineOfSight, LinkDefaults, LinkParams, LinkRule, MaxRange, MinElevation,
                                         PlusGrid)
from orbitnet.mobility.centers import earth_center, solar_system_centers
from orbitnet.mobility.constellations import (GroundStationConstellation, OrbitingConstellation, TLEConstellation,
                                              WalkerConstellation, WalkerParams)
from orbitnet.mobility.tle import load_tle_file
from orbitnet.mobility.model import MobilityModel
from orbitnet.scenarios.scenario import DeliveryMode, ScenarioSpec
from orbitnet.scenarios.stations import DSN_STATIONS, uniform_ground_stations
from orbitnet.utils import ORBITNET_TLE_PATH, get_logger


logger = get_logger(__name__)

CUSTOM_LOSS_PROBABILITY = 0.005
CUSTOM_DURATION_S = 3600.0
CUSTOM_BANDWIDTH_BPS = 25e6
# 10 node pairs, each sending a 1 MB block every second
CUSTOM_FLOW_COUNT = 10
CUSTOM_MESSAGE_SIZE_BITS = 8_000_000
CUSTOM_FLOW_INTERVAL_S = 1.0
INTERPLANETARY_BANDWIDTH_BPS = 10e6
CUBESAT_RANGE_KM = 2500.0
CUBESAT_EPOCH = datetime(2025, 6, 27, tzinfo=timezone.utc)
# generated offline with CubeSat-like orbits, not a CelesTrak snapshot
SYNTHETIC_TLE_PATH = os.path.join(os.path.dirname(__file__), "assets", "synthetic_cubesats.tle")


def _custom_flows(node_count: int, interval_s: float):
    return default_flows(list(range(node_count)), count=min(CUSTOM_FLOW_COUNT, node_count // 2),
                         message_size_bits=CUSTOM_MESSAGE_SIZE_BITS, interval_s=interval_s)


def _custom_spec(name: str, mobility: MobilityModel, rules, flows, delivery_mode: DeliveryMode, seed: int,
                 **kwargs) -> ScenarioSpec:
    return ScenarioSpec(name=name, mobility=mobility, rules=rules,
                        link_defaults=LinkDefaults(bandwidth_bps=CUSTOM_BANDWIDTH_BPS,
                                                   loss_probability=CUSTOM_LOSS_PROBABILITY),
                        flows=flows, loss=LossConfig(seed=seed, default_loss_probability=CUSTOM_LOSS_PROBABILITY),
                        delivery_mode=delivery_mode, duration_s=CUSTOM_DURATION_S, **kwargs)


def build_walker(n_sats: int = 66, n_planes: int = 6, delivery_mode: DeliveryMode = DeliveryMode.STORE_AND_FORWARD,
                 seed: int = 0, interval_s: float = CUSTOM_FLOW_INTERVAL_S) -> ScenarioSpec:
    """
    Walker delta shell with plus-grid inter-satellite links and 12 evenly spread ground stations.
    The defaults match the Iridium constellation (66 satellites in 6 planes at 781 km, 86.4 degrees).

    :param interval_s: seconds between two blocks of the same flow
    :raises InvalidWalkerParamsError: if n_planes does not divide n_sats
    """
    earth = earth_center()
    params = WalkerParams(total_sats=n_sats, planes=n_planes, phasing=1 % n_planes)
    mobility = MobilityModel(centers=[earth], constellations=[
        WalkerConstellation("walker", earth, params),
        GroundStationConstellation("stations", earth, uniform_ground_stations(12)),
    ])
    rules = [
        LinkRule("walker", predicates=[PlusGrid()]),
        LinkRule("stations", "walker", [MinElevation(10.0)]),
    ]
    flows = _custom_flows(mobility.node_count, interval_s)
    return _custom_spec("walker", mobility, rules, flows, delivery_mode, seed)


def build_cubesat(tle_path: str = None, delivery_mode: DeliveryMode = DeliveryMode.STORE_AND_FORWARD,
                  seed: int = 0, interval_s: float = CUSTOM_FLOW_INTERVAL_S) -> ScenarioSpec:
    """
    CubeSats propagated with SGP4 from a TLE file, linking opportunistically within 2500 km,
    plus 12 evenly spread ground stations.
    Real CubeSat element sets come from `orbitnet-fetch-tles`. Without one, the scenario runs on 98 synthetic
    element sets with CubeSat-like orbits, so its results are not those of the real CubeSat population.

    :param tle_path: TLE file, defaults to ORBITNET_TLE_PATH and then to the bundled synthetic set
    :param interval_s: seconds between two blocks of the same flow
    """
    tle_path = tle_path or ORBITNET_TLE_PATH
    if tle_path is None:
        logger.warning("No CubeSat TLE file given, using the bundled synthetic element sets "
                       "(run orbitnet-fetch-tles and set ORBITNET_TLE_PATH for real ones)")
        tle_path = SYNTHETIC_TLE_PATH
    records = load_tle_file(tle_path)
    logger.info(f"Loaded {len(records)} element sets from {tle_path}")
    earth = earth_center()
    mobility = MobilityModel(centers=[earth], constellations=[
        TLEConstellation("cubesats", earth, records, CUBESAT_EPOCH),
        GroundStationConstellation("stations", earth, uniform_ground_stations(12)),
    ])
    rules = [
        LinkRule("cubesats", predicates=[MaxRange(CUBESAT_RANGE_KM), LineOfSight()]),
        LinkRule("stations", "cubesats", [MinElevation(10.0)]),
    ]
    flows = _custom_flows(mobility.node_count, interval_s)
    return _custom_spec("cubesat", mobility, rules, flows, delivery_mode, seed, epoch=CUBESAT_EPOCH)


def build_lunar_mars(delivery_mode: DeliveryMode = DeliveryMode.STORE_AND_FORWARD, seed: int = 0) -> ScenarioSpec:
    """
    Walker networks around Earth (66), the Moon (8) and Mars (66), each with 12 ground stations, joined by a
    lunar relay and a Mars relay that talk to the three Deep Space Network complexes on Earth.
    """
    centers = solar_system_centers()
    earth, moon, mars = centers["earth"], centers["moon"], centers["mars"]
    mobility = MobilityModel(centers=list(centers.values()), constellations=[
        WalkerConstellation("earth-walker", earth, WalkerParams()),
        GroundStationConstellation("earth-stations", earth, uniform_ground_stations(12, prefix="earth-gs")),
        GroundStationConstellation("dsn", earth, DSN_STATIONS),
        WalkerConstellation("lunar-walker", moon, WalkerParams(total_sats=8, planes=2, phasing=1,
                                                               inclination=90.0, altitude=1000.0)),
        GroundStationConstellation("lunar-stations", moon, uniform_ground_stations(12, prefix="lunar-gs")),
        WalkerConstellation("mars-walker", mars, WalkerParams()),
        GroundStationConstellation("mars-stations", mars, uniform_ground_stations(12, prefix="mars-gs")),
        OrbitingConstellation.around("lunar-relay", moon, [("lunar-relay", 8000.0, 60.0, 0.0)]),
        OrbitingConstellation.around("mars-relay", mars, [("mars-relay", 17032.0, 30.0, 0.0)]),
    ])
    interplanetary = LinkParams(bandwidth_bps=INTERPLANETARY_BANDWIDTH_BPS)
    rules = [
        LinkRule("earth-walker", predicates=[PlusGrid()]),
        LinkRule("earth-stations", "earth-walker", [MinElevation(10.0)]),
        LinkRule("dsn", "earth-walker", [MinElevation(10.0)]),
        LinkRule("lunar-walker", predicates=[PlusGrid()]),
        LinkRule("lunar-stations", "lunar-walker", [MinElevation(10.0)]),
        LinkRule("mars-walker", predicates=[PlusGrid()]),
        LinkRule("mars-stations", "mars-walker", [MinElevation(10.0)]),
        LinkRule("dsn", "lunar-relay", [MinElevation(10.0), LineOfSight(["moon"])], params=interplanetary),
        LinkRule("dsn", "mars-relay", [MinElevation(10.0), LineOfSight(["mars", "sun"])], params=interplanetary),
        LinkRule("lunar-relay", "lunar-walker", [LineOfSight(["moon"]), MaxRange(20000.0)]),
        LinkRule("mars-relay", "mars-walker", [LineOfSight(["mars"]), MaxRange(40000.0)]),
    ]
    earth_stations = mobility.constellation_nodes("earth-stations")
    lunar_stations = mobility.constellation_nodes("lunar-stations")
    mars_stations = mobility.constellation_nodes("mars-stations")
    flows = []
    for index in range(4):
        flows.append(PointToPointFlow(earth_stations[index], mars_stations[index], 8_000_000, 60.0, tag="mars"))
        flows.append(PointToPointFlow(earth_stations[index + 4], lunar_stations[index], 8_000_000, 60.0,
                                      tag="lunar"))
    for index in range(2):
        flows.append(PointToPointFlow(mars_stations[index + 4], earth_stations[index + 8], 8_000_000, 60.0,
                                      tag="mars"))
    return _custom_spec("lunar-mars", mobility, rules, flows, delivery_mode, seed)
