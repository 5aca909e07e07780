"""Shortest paths and exit assignment over the building graph.

Hand-rolled Dijkstra so tie-breaking is pinned down: equal-cost frontier
entries pop in node-id order, and equal-cost exits resolve to the lowest
exit id. Assignment never needs the full population in advance: the
coordinated variant is greedy in strict registration order.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass


class NoReachableExit(Exception):
    """The node's component contains no exit."""


@dataclass(frozen=True)
class Edge:
    a: str
    b: str
    traverse_s: float
    capacity: float  # concurrent users; math.inf when unconstrained

    @property
    def key(self) -> tuple[str, str]:
        return (self.a, self.b) if self.a <= self.b else (self.b, self.a)


class BuildingGraph:
    """Undirected graph of rooms, corridors, entry points and exits."""

    def __init__(self, nodes: dict[str, str], edges: list[Edge]) -> None:
        self.kinds = dict(nodes)  # id -> kind
        self.edges: dict[tuple[str, str], Edge] = {}
        self.adjacency: dict[str, list[tuple[str, Edge]]] = {n: [] for n in nodes}
        for edge in edges:
            self.edges[edge.key] = edge
            self.adjacency[edge.a].append((edge.b, edge))
            self.adjacency[edge.b].append((edge.a, edge))
        for neighbors in self.adjacency.values():
            neighbors.sort(key=lambda pair: pair[0])
        self._dist_cache: dict[str, tuple[dict[str, float], dict[str, str]]] = {}

    @property
    def exits(self) -> list[str]:
        return sorted(n for n, kind in self.kinds.items() if kind == "exit")

    @property
    def entries(self) -> list[str]:
        return sorted(n for n, kind in self.kinds.items() if kind == "entry")

    def shortest(self, source: str) -> tuple[dict[str, float], dict[str, str]]:
        """(distance, predecessor) maps from source; cached per source."""
        cached = self._dist_cache.get(source)
        if cached is not None:
            return cached
        dist = {source: 0.0}
        prev: dict[str, str] = {}
        heap = [(0.0, source)]
        done = set()
        while heap:
            d, node = heapq.heappop(heap)
            if node in done:
                continue
            done.add(node)
            for neighbor, edge in self.adjacency[node]:
                nd = d + edge.traverse_s
                if nd < dist.get(neighbor, math.inf):
                    dist[neighbor] = nd
                    prev[neighbor] = node
                    heapq.heappush(heap, (nd, neighbor))
        self._dist_cache[source] = (dist, prev)
        return dist, prev

    def path(self, source: str, target: str) -> list[str]:
        dist, prev = self.shortest(source)
        if target not in dist:
            raise NoReachableExit(f"no path from {source} to {target}")
        out = [target]
        while out[-1] != source:
            out.append(prev[out[-1]])
        out.reverse()
        return out

    def cost(self, source: str, target: str) -> float:
        dist, _ = self.shortest(source)
        if target not in dist:
            raise NoReachableExit(f"no path from {source} to {target}")
        return dist[target]

    def nearest(self, source: str, candidates: list[str]) -> tuple[str, float]:
        """Closest candidate by path time; ties resolve to the lowest id."""
        dist, _ = self.shortest(source)
        best: tuple[float, str] | None = None
        for cand in sorted(candidates):
            if cand in dist and (best is None or dist[cand] < best[0]):
                best = (dist[cand], cand)
        if best is None:
            raise NoReachableExit(f"none of {candidates} reachable from {source}")
        return best[1], best[0]

    def mean_traverse(self) -> float:
        if not self.edges:
            return 0.0
        return sum(e.traverse_s for e in self.edges.values()) / len(self.edges)

    def exit_inflow_capacity(self, exit_id: str) -> float:
        caps = [e.capacity for _, e in self.adjacency[exit_id]]
        finite = [c for c in caps if math.isfinite(c)]
        return sum(finite) if finite else math.inf


def default_penalty_factors(graph: BuildingGraph) -> dict[str, float]:
    """Per-exit congestion weight: mean edge traverse time / exit inflow."""
    mean = graph.mean_traverse()
    out = {}
    for exit_id in graph.exits:
        cap = graph.exit_inflow_capacity(exit_id)
        out[exit_id] = 0.0 if math.isinf(cap) else mean / cap
    return out


class CoordinatedAssigner:
    """Online greedy balancer: users are assigned strictly in registration
    order to the exit minimizing path time + current load * penalty factor.
    Future registrations are unknown and irrelevant by construction."""

    def __init__(self, graph: BuildingGraph,
                 penalty_factors: dict[str, float] | None = None) -> None:
        self.graph = graph
        self.factors = penalty_factors or default_penalty_factors(graph)
        self.loads: dict[str, int] = {e: 0 for e in graph.exits}

    def assign(self, from_node: str) -> tuple[str, float]:
        dist, _ = self.graph.shortest(from_node)
        best: tuple[float, str] | None = None
        for exit_id in self.graph.exits:  # sorted: ties go to the lowest id
            if exit_id not in dist:
                continue
            score = dist[exit_id] + self.loads[exit_id] * self.factors[exit_id]
            if best is None or score < best[0]:
                best = (score, exit_id)
        if best is None:
            raise NoReachableExit(f"no exit reachable from {from_node}")
        self.loads[best[1]] += 1
        return best[1], best[0]


def assign_exits_uncoordinated(
    user_nodes: dict[str, str], graph: BuildingGraph
) -> dict[str, str]:
    """Everyone heads for the nearest exit by path time, congestion-blind."""
    out = {}
    for user, node in user_nodes.items():
        exit_id, _ = graph.nearest(node, graph.exits)
        out[user] = exit_id
    return out


def assign_exits_coordinated(
    ordered_users: list[tuple[str, str]],
    graph: BuildingGraph,
    penalty_factors: dict[str, float] | None = None,
) -> dict[str, str]:
    """Batch convenience over CoordinatedAssigner for (user, node) sequences."""
    assigner = CoordinatedAssigner(graph, penalty_factors)
    return {user: assigner.assign(node)[0] for user, node in ordered_users}
