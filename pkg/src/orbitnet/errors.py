"""
Exceptions raised by orbitnet.

Configuration and input problems subclass ValueError, failures that only show up while
a simulation is running subclass RuntimeError, so callers can catch either family.
"""


class SchedulingInPastError(ValueError):
    def __init__(self, event_time: float, current_time: float):
        super().__init__(f"Cannot schedule an event at t={event_time} when simulation time is already t={current_time}")
        self.event_time = event_time
        self.current_time = current_time


class UnknownCenterError(ValueError):
    def __init__(self, center: str):
        super().__init__(f"Unknown orbital center: {center}")
        self.center = center


class UnknownNodeError(ValueError):
    def __init__(self, node):
        super().__init__(f"Unknown node: {node}")
        self.node = node


class InvalidWalkerParamsError(ValueError):
    pass


class TLEParseError(ValueError):
    pass


class PropagationError(RuntimeError):
    pass


class UnknownLinkError(ValueError):
    def __init__(self, endpoint_a: int, endpoint_b: int):
        super().__init__(f"No link rule covers the node pair ({endpoint_a}, {endpoint_b})")
        self.endpoint_a = endpoint_a
        self.endpoint_b = endpoint_b


class MalformedLogError(ValueError):
    pass


class EmptySelectionError(ValueError):
    pass


class ScenarioValidationError(ValueError):
    pass


class UnknownScenarioError(ValueError):
    def __init__(self, name: str, known):
        super().__init__(f"Unknown scenario: {name} (known scenarios: {', '.join(sorted(known))})")
        self.name = name
