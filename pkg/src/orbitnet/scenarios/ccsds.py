"""
Earth observation, lunar and Mars communication scenarios after the CCSDS reference set.

Orbits, station sites, data rates and traffic rates here are illustrative defaults: they reproduce the enumerated
topologies with intermittent ground contacts, not any published contact schedule.
"""
from dataclasses import replace
from typing import List

from orbitnet.actors.traffic import PointToPointFlow
from orbitnet.actors.transmission import LossConfig
from orbitnet.connectivity.rules import (FixedEdges, LineOfSight, LinkDefaults, LinkKind, LinkParams, LinkRule,
                                         MaxRange, MinElevation)
from orbitnet.mobility.centers import earth_center, solar_system_centers
from orbitnet.mobility.constellations import GroundStation, GroundStationConstellation, OrbitingConstellation
from orbitnet.mobility.model import MobilityModel
from orbitnet.scenarios.scenario import DeliveryMode, ScenarioSpec
from orbitnet.scenarios.stations import CONTROL_CENTERS, DSN_STATIONS, POLAR_STATIONS


CCSDS_LOSS_PROBABILITY = 0.05
CCSDS_DURATION_S = 86400.0

TERRESTRIAL_BANDWIDTH_BPS = 1e9
EO_DOWNLINK_BANDWIDTH_BPS = 150e6
LUNAR_TRUNK_BANDWIDTH_BPS = 20e6
LUNAR_PROXIMITY_BANDWIDTH_BPS = 25e6
MARS_TRUNK_BANDWIDTH_BPS = 2e6
MARS_PROXIMITY_BANDWIDTH_BPS = 8e6

PAYLOAD_MESSAGE_BITS = 80_000_000  # 10 MB
PAYLOAD_INTERVAL_S = 11.5
TELEMETRY_MESSAGE_BITS = 80_000
TELECOMMAND_MESSAGE_BITS = 8_000


def _control_rule(stations: str, station_names: List[str]) -> LinkRule:
    """Fixed terrestrial links from both control centers to every listed station."""
    edges = [(f"control/{center.name}", f"{stations}/{station}")
             for center in CONTROL_CENTERS for station in station_names]
    return LinkRule("control", stations, [FixedEdges(edges)], kind=LinkKind.TERRESTRIAL,
                    params=LinkParams(bandwidth_bps=TERRESTRIAL_BANDWIDTH_BPS), name="control-terrestrial")


def build_earth_observation(delivery_mode: DeliveryMode = DeliveryMode.STORE_AND_FORWARD,
                            seed: int = 0) -> ScenarioSpec:
    """
    A payload control center and a mission control center, each wired to two ground stations,
    which see a single sun-synchronous observation satellite when it passes above their elevation mask.
    """
    earth = earth_center()
    stations = [replace(POLAR_STATIONS[0], name="gs1"), replace(POLAR_STATIONS[1], name="gs2")]
    mobility = MobilityModel(centers=[earth], constellations=[
        GroundStationConstellation("control", earth, CONTROL_CENTERS),
        GroundStationConstellation("stations", earth, stations),
        OrbitingConstellation.around("eo", earth, [("eo-sat", 700.0, 98.2, 0.0)]),
    ])
    rules = [
        _control_rule("stations", ["gs1", "gs2"]),
        LinkRule("stations", "eo", [MinElevation(10.0)],
                 params=LinkParams(bandwidth_bps=EO_DOWNLINK_BANDWIDTH_BPS), name="eo-downlink"),
    ]
    satellite = mobility.node_id("eo/eo-sat")
    pcc, mcc = mobility.node_id("control/pcc"), mobility.node_id("control/mcc")
    flows = [
        PointToPointFlow(satellite, pcc, PAYLOAD_MESSAGE_BITS, PAYLOAD_INTERVAL_S, tag="payload"),
        PointToPointFlow(satellite, mcc, TELEMETRY_MESSAGE_BITS, 10.0, tag="telemetry"),
        PointToPointFlow(mcc, satellite, TELECOMMAND_MESSAGE_BITS, 60.0, tag="telecommand"),
    ]
    return ScenarioSpec(name="earth-observation", mobility=mobility, rules=rules,
                        link_defaults=LinkDefaults(bandwidth_bps=EO_DOWNLINK_BANDWIDTH_BPS,
                                                   loss_probability=CCSDS_LOSS_PROBABILITY),
                        flows=flows, loss=LossConfig(seed=seed, default_loss_probability=CCSDS_LOSS_PROBABILITY),
                        delivery_mode=delivery_mode, duration_s=CCSDS_DURATION_S)


def build_lunar(delivery_mode: DeliveryMode = DeliveryMode.STORE_AND_FORWARD, seed: int = 0) -> ScenarioSpec:
    """
    A lunar base, a rover, two relay satellites and a lunar gateway, reaching control centers on Earth
    through the three Deep Space Network complexes.
    """
    centers = solar_system_centers()
    earth, moon = centers["earth"], centers["moon"]
    mobility = MobilityModel(centers=list(centers.values()), constellations=[
        GroundStationConstellation("control", earth, CONTROL_CENTERS),
        GroundStationConstellation("dsn", earth, DSN_STATIONS),
        GroundStationConstellation("lunar-surface", moon, [GroundStation("base", -89.5, 0.0),
                                                           GroundStation("rover", -88.8, 30.0)]),
        OrbitingConstellation.around("lunar-relays", moon, [("relay-1", 3000.0, 90.0, 0.0),
                                                            ("relay-2", 3000.0, 90.0, 180.0)]),
        OrbitingConstellation.around("gateway", moon, [("gateway", 58000.0, 90.0, 270.0)]),
    ])
    trunk = LinkParams(bandwidth_bps=LUNAR_TRUNK_BANDWIDTH_BPS)
    proximity = LinkParams(bandwidth_bps=LUNAR_PROXIMITY_BANDWIDTH_BPS)
    rules = [
        _control_rule("dsn", [station.name for station in DSN_STATIONS]),
        LinkRule("dsn", "gateway", [MinElevation(10.0), LineOfSight(["moon"])], params=trunk),
        LinkRule("dsn", "lunar-relays", [MinElevation(10.0), LineOfSight(["moon"])], params=trunk),
        LinkRule("lunar-relays", "gateway", [LineOfSight(["moon"]), MaxRange(80000.0)], params=proximity),
        LinkRule("lunar-surface", "lunar-relays", [MinElevation(10.0)], params=proximity),
        LinkRule("lunar-surface", "gateway", [MinElevation(10.0)], params=proximity),
        LinkRule("lunar-surface", predicates=[FixedEdges([("lunar-surface/base", "lunar-surface/rover")])],
                 kind=LinkKind.TERRESTRIAL, params=proximity),
    ]
    base, rover = mobility.node_id("lunar-surface/base"), mobility.node_id("lunar-surface/rover")
    pcc, mcc = mobility.node_id("control/pcc"), mobility.node_id("control/mcc")
    flows = [
        PointToPointFlow(base, pcc, 8_000_000, 60.0, tag="science"),
        PointToPointFlow(rover, mcc, TELEMETRY_MESSAGE_BITS, 30.0, tag="telemetry"),
        PointToPointFlow(mcc, rover, TELECOMMAND_MESSAGE_BITS, 120.0, tag="telecommand"),
    ]
    return ScenarioSpec(name="lunar", mobility=mobility, rules=rules,
                        link_defaults=LinkDefaults(bandwidth_bps=LUNAR_TRUNK_BANDWIDTH_BPS,
                                                   loss_probability=CCSDS_LOSS_PROBABILITY),
                        flows=flows, loss=LossConfig(seed=seed, default_loss_probability=CCSDS_LOSS_PROBABILITY),
                        delivery_mode=delivery_mode, duration_s=CCSDS_DURATION_S)


def build_mars(delivery_mode: DeliveryMode = DeliveryMode.STORE_AND_FORWARD, seed: int = 0) -> ScenarioSpec:
    """
    Two rovers on Mars and three relay satellites (low, medium and areostationary orbit), reaching
    control centers on Earth through the Deep Space Network.
    """
    centers = solar_system_centers()
    earth, mars = centers["earth"], centers["mars"]
    mobility = MobilityModel(centers=list(centers.values()), constellations=[
        GroundStationConstellation("control", earth, CONTROL_CENTERS),
        GroundStationConstellation("dsn", earth, DSN_STATIONS),
        GroundStationConstellation("mars-surface", mars, [GroundStation("rover-1", 18.44, 77.45),
                                                          GroundStation("rover-2", -4.59, 137.44)]),
        OrbitingConstellation.around("mars-relays", mars, [("relay-low", 400.0, 93.0, 0.0),
                                                           ("relay-mid", 6000.0, 45.0, 120.0),
                                                           ("relay-areo", 17032.0, 0.0, 77.0)]),
    ])
    trunk = LinkParams(bandwidth_bps=MARS_TRUNK_BANDWIDTH_BPS)
    proximity = LinkParams(bandwidth_bps=MARS_PROXIMITY_BANDWIDTH_BPS)
    rules = [
        _control_rule("dsn", [station.name for station in DSN_STATIONS]),
        LinkRule("dsn", "mars-relays", [MinElevation(10.0), LineOfSight(["mars", "sun"])], params=trunk),
        LinkRule("mars-relays", predicates=[LineOfSight(["mars"]), MaxRange(40000.0)], params=proximity),
        LinkRule("mars-surface", "mars-relays", [MinElevation(10.0)], params=proximity),
    ]
    rover_1, rover_2 = mobility.node_id("mars-surface/rover-1"), mobility.node_id("mars-surface/rover-2")
    pcc, mcc = mobility.node_id("control/pcc"), mobility.node_id("control/mcc")
    flows = [
        PointToPointFlow(rover_1, pcc, 8_000_000, 300.0, tag="science"),
        PointToPointFlow(rover_2, pcc, 8_000_000, 300.0, tag="science"),
        PointToPointFlow(rover_1, mcc, TELEMETRY_MESSAGE_BITS, 60.0, tag="telemetry"),
        PointToPointFlow(mcc, rover_1, TELECOMMAND_MESSAGE_BITS, 600.0, tag="telecommand"),
    ]
    return ScenarioSpec(name="mars", mobility=mobility, rules=rules,
                        link_defaults=LinkDefaults(bandwidth_bps=MARS_TRUNK_BANDWIDTH_BPS,
                                                   loss_probability=CCSDS_LOSS_PROBABILITY),
                        flows=flows, loss=LossConfig(seed=seed, default_loss_probability=CCSDS_LOSS_PROBABILITY),
                        delivery_mode=delivery_mode, duration_s=CCSDS_DURATION_S)
