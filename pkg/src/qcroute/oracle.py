"""Classical ground truth: constraint checking, exhaustive QUBO minimization,
and shortest-path routing.

Two feasibility notions are distinguished.  Model feasibility means the four
degree/selection constraints hold literally on the bitstring.  Path
feasibility additionally requires the chosen segments to form one simple
source-to-terminal path with nothing left over; model-feasible assignments may
also carry disjoint cycles on internal nodes.  Metrics use the strict path
notion.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass

import numpy as np

from .instance import Cable, Instance, incident_segments
from .qubo import CableQubo, variable_map

__all__ = [
    "Violation",
    "FeasibilityReport",
    "OracleSolution",
    "check_feasibility",
    "brute_force_min",
    "shortest_path_opt",
    "route_bitstring",
    "chosen_objective",
    "length_cap_ok",
    "BRUTE_FORCE_DIM_CAP",
]

BRUTE_FORCE_DIM_CAP = 24


@dataclass(frozen=True)
class Violation:
    constraint: str  # start | terminal | flow | selection
    location: str
    value: float


@dataclass(frozen=True)
class FeasibilityReport:
    feasible_model: bool
    feasible_path: bool
    violations: tuple[Violation, ...]
    decoded_route: tuple[str, ...] | None


@dataclass(frozen=True)
class OracleSolution:
    bitstring: str
    energy: float
    objective: float | None
    route: tuple[str, ...]


def check_feasibility(instance: Instance, cable: Cable, z: str) -> FeasibilityReport:
    """Evaluate the routing constraints literally on a block bitstring.

    Checks, in order: exactly one chosen segment at the source; exactly one at
    the terminal; every internal node either unused or traversed (segment
    degree equal to twice its node bit); and no chosen segment touching an
    internal node whose bit is off.  When all hold, the route is decoded by
    walking from the source; the result is path-feasible only if that walk
    consumes every chosen segment.
    """
    vmap = variable_map(instance, cable)
    if len(z) != vmap.dim:
        raise ValueError(f"bitstring length {len(z)} != block dimension {vmap.dim}")
    d = instance.num_segments
    x = [int(ch) for ch in z[:d]]
    b = {node: int(ch) for node, ch in zip(vmap.node_vars, z[d:])}

    violations: list[Violation] = []
    source_degree = sum(x[i] for i in incident_segments(instance, cable.source))
    if source_degree != 1:
        violations.append(Violation("start", cable.source, float(source_degree)))
    terminal_degree = sum(x[i] for i in incident_segments(instance, cable.terminal))
    if terminal_degree != 1:
        violations.append(Violation("terminal", cable.terminal, float(terminal_degree)))
    for node in vmap.node_vars:
        degree = sum(x[i] for i in incident_segments(instance, node))
        if degree != 2 * b[node]:
            violations.append(Violation("flow", node, float(degree - 2 * b[node])))
    for node in vmap.node_vars:
        for i in incident_segments(instance, node):
            if x[i] == 1 and b[node] == 0:
                violations.append(
                    Violation("selection", f"{instance.segments[i].id}@{node}", 1.0)
                )

    feasible_model = not violations
    route: tuple[str, ...] | None = None
    feasible_path = False
    if feasible_model:
        route, used_all = _walk_route(instance, cable, x)
        feasible_path = used_all
        if not feasible_path:
            route = None
    return FeasibilityReport(feasible_model, feasible_path, tuple(violations), route)


def _walk_route(instance: Instance, cable: Cable, x: list[int]) -> tuple[tuple[str, ...], bool]:
    """Walk the chosen segments from the source.

    Under model feasibility all degrees are 0, 1 (endpoints) or 2, so the walk
    is forced at every step and ends at the terminal.  Returns the node route
    and whether the walk consumed every chosen segment (no disjoint leftovers).
    """
    unused = {i for i, bit in enumerate(x) if bit}
    total = len(unused)
    route = [cable.source]
    current = cable.source
    while current != cable.terminal:
        step = [i for i in incident_segments(instance, current) if i in unused]
        if len(step) != 1:
            return tuple(route), False
        seg = instance.segments[step[0]]
        unused.discard(step[0])
        current = seg.v if seg.u == current else seg.u
        route.append(current)
    return tuple(route), len(unused) == 0 and total > 0


def chosen_objective(instance: Instance, cable: Cable, z: str) -> float:
    """Plain routing cost of the chosen segments (no penalties)."""
    d = instance.num_segments
    return sum(cable.costs[s.id] for s, ch in zip(instance.segments, z[:d]) if ch == "1")


def length_cap_ok(instance: Instance, cable: Cable, z: str) -> bool | None:
    """Post-hoc length check: total chosen length within the cable's cap.

    Returns None when the cable has no cap.  Length is otherwise priced into
    the costs, so this is informational only.
    """
    if cable.max_length is None:
        return None
    d = instance.num_segments
    total = sum(s.length for s, ch in zip(instance.segments, z[:d]) if ch == "1")
    return total <= cable.max_length


def brute_force_min(q: CableQubo, instance: Instance | None = None) -> OracleSolution:
    """Exhaustive minimum of a block over all 2^dim bitstrings.

    Enumeration is in lexicographic bitstring order so ties resolve to the
    lexicographically smallest minimizer.  With ``instance`` given, the
    solution also carries the routing objective and decoded route (empty when
    the minimizer is not a single path).
    """
    if q.dim > BRUTE_FORCE_DIM_CAP:
        raise ValueError(f"dimension {q.dim} exceeds brute-force cap {BRUTE_FORCE_DIM_CAP}")
    shifts = np.arange(q.dim - 1, -1, -1, dtype=np.uint32)  # bit i of z = bit (dim-1-i) of the counter
    best_energy = np.inf
    best_index = 0
    chunk = 1 << 16
    for lo in range(0, 1 << q.dim, chunk):
        hi = min(lo + chunk, 1 << q.dim)
        counters = np.arange(lo, hi, dtype=np.uint32)
        bits = ((counters[:, None] >> shifts[None, :]) & 1).astype(np.float64)
        energies = ((bits @ q.q) * bits).sum(axis=1) + q.offset
        arg = int(np.argmin(energies))
        if energies[arg] < best_energy:
            best_energy = float(energies[arg])
            best_index = lo + arg
    bitstring = format(best_index, f"0{q.dim}b")
    objective = None
    route: tuple[str, ...] = ()
    if instance is not None:
        cable = instance.cable(q.cable_id)
        objective = chosen_objective(instance, cable, bitstring)
        report = check_feasibility(instance, cable, bitstring)
        if report.feasible_path:
            route = report.decoded_route or ()
    return OracleSolution(bitstring=bitstring, energy=best_energy, objective=objective, route=route)


def shortest_path_opt(instance: Instance, cable: Cable) -> OracleSolution:
    """Minimum-cost simple source-to-terminal path under the cable's costs.

    Label-setting search over nonnegative per-segment costs; ties steered by
    node order for determinism.  The energy equals the objective because the
    encoded path satisfies every constraint, so all penalties vanish.
    """
    order = {n.id: i for i, n in enumerate(instance.nodes)}
    adjacency: dict[str, list[tuple[str, int, float]]] = {n.id: [] for n in instance.nodes}
    for i, s in enumerate(instance.segments):
        cost = cable.costs[s.id]
        adjacency[s.u].append((s.v, i, cost))
        adjacency[s.v].append((s.u, i, cost))

    dist = {n.id: np.inf for n in instance.nodes}
    prev: dict[str, tuple[str, int]] = {}
    dist[cable.source] = 0.0
    heap: list[tuple[float, int, str]] = [(0.0, order[cable.source], cable.source)]
    done: set[str] = set()
    while heap:
        d_u, _, u = heapq.heappop(heap)
        if u in done:
            continue
        done.add(u)
        if u == cable.terminal:
            break
        for v, seg_idx, cost in adjacency[u]:
            if v in done:
                continue
            candidate = d_u + cost
            if candidate < dist[v]:
                dist[v] = candidate
                prev[v] = (u, seg_idx)
                heapq.heappush(heap, (candidate, order[v], v))

    if not np.isfinite(dist[cable.terminal]):
        raise ValueError(f"no path from {cable.source!r} to {cable.terminal!r}")

    route_rev = [cable.terminal]
    used: list[int] = []
    node = cable.terminal
    while node != cable.source:
        node, seg_idx = prev[node]
        used.append(seg_idx)
        route_rev.append(node)
    route = tuple(reversed(route_rev))
    bitstring = route_bitstring(instance, cable, route)
    objective = chosen_objective(instance, cable, bitstring)
    return OracleSolution(bitstring=bitstring, energy=objective, objective=objective, route=route)


def route_bitstring(instance: Instance, cable: Cable, route: tuple[str, ...]) -> str:
    """Encode a node route as a block bitstring (segment bits plus node bits)."""
    vmap = variable_map(instance, cable)
    seg_by_pair = {frozenset((s.u, s.v)): i for i, s in enumerate(instance.segments)}
    x = ["0"] * instance.num_segments
    for a, b in zip(route, route[1:]):
        pair = frozenset((a, b))
        if pair not in seg_by_pair:
            raise ValueError(f"route step {a!r}-{b!r} is not a segment")
        x[seg_by_pair[pair]] = "1"
    interior = set(route[1:-1])
    b_bits = ["1" if node in interior else "0" for node in vmap.node_vars]
    return "".join(x) + "".join(b_bits)
