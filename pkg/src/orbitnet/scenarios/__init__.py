from typing import Callable, Dict

from orbitnet.errors import UnknownScenarioError
from orbitnet.scenarios.ccsds import build_earth_observation, build_lunar, build_mars
from orbitnet.scenarios.custom import build_cubesat, build_lunar_mars, build_walker
from orbitnet.scenarios.scenario import (DeliveryMode, ScenarioSpec, apply_config, build_simulation,
                                         topology_snapshot, validate_scenario)


SCENARIOS: Dict[str, Callable[..., ScenarioSpec]] = {
    "earth-observation": build_earth_observation,
    "lunar": build_lunar,
    "mars": build_mars,
    "walker": build_walker,
    "cubesat": build_cubesat,
    "lunar-mars": build_lunar_mars,
}


def create_scenario(name: str, **kwargs) -> ScenarioSpec:
    """
    :param name: registered scenario name
    :param kwargs: builder arguments (delivery_mode, seed, and builder specific ones such as tle_path)
    """
    if name not in SCENARIOS:
        raise UnknownScenarioError(name, SCENARIOS)
    return SCENARIOS[name](**kwargs)
