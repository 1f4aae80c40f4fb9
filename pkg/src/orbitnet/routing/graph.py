from dataclasses import dataclass
from typing import Dict, List, Tuple
import networkx as nx
import numpy as np

from orbitnet.connectivity.topology import TopologySnapshot
from orbitnet.mobility.centers import SPEED_OF_LIGHT_KM_S


@dataclass
class ConnectivityGraph:
    """
    Weighted view of one topology snapshot.
    Edge attribute "delay" holds the speed-of-light delay in seconds, "link" the link id.
    """
    time: float
    graph: nx.Graph

    @property
    def adjacency(self) -> Dict[int, List[Tuple[int, Tuple[int, int], float]]]:
        return {node: [(neighbor, data["link"], data["delay"])
                       for neighbor, data in sorted(self.graph[node].items())]
                for node in sorted(self.graph.nodes)}

    def delay(self, a: int, b: int) -> float:
        return self.graph[a][b]["delay"]


def build_graph(snapshot: TopologySnapshot, positions: np.ndarray) -> ConnectivityGraph:
    """
    :param snapshot: active links
    :param positions: node positions at the snapshot time, shape (node_count, 3)
    """
    graph = nx.Graph()
    graph.add_nodes_from(range(len(positions)))
    for a, b in sorted(snapshot.links):
        delay = float(np.linalg.norm(positions[a] - positions[b])) / SPEED_OF_LIGHT_KM_S
        graph.add_edge(a, b, delay=delay, link=(a, b))
    return ConnectivityGraph(time=snapshot.time, graph=graph)
