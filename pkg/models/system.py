"""
Graphs, assembled systems, and the update maps.

Scalar maps (inflate_step, sds_step, pds_step) work on single States; the
vectorised counterparts in `successor_array` evaluate a map on all 2^n packed
states at once and back every exhaustive analysis.
"""
from dataclasses import dataclass, field
from functools import cached_property
from itertools import combinations
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple
import logging

import networkx as nx
import numpy as np

from models.config import n_cap
from models.errors import CapExceededError, DimensionMismatchError, NonMonotoneError, SchemaError
from models.lattice import State
from models.local_functions import LocalFunction, MonotonicityVerdict, is_monotone_total
from models.schedules import UpdateSchedule

logger = logging.getLogger(__name__)

SDS = "sds"
PDS = "pds"


@dataclass(frozen=True)
class Graph:
    """
    Simple undirected graph on vertices 1..n.

    Attributes:
        n: vertex count.
        edges: unordered pairs stored as (i, j) with i < j.
    """
    n: int
    edges: FrozenSet[Tuple[int, int]] = frozenset()

    def __post_init__(self):
        if self.n < 1:
            raise SchemaError(f"graph needs at least one vertex, got n={self.n}")
        for i, j in self.edges:
            if i == j:
                raise SchemaError(f"loop at vertex {i} is not allowed in a simple graph")
            if not (1 <= i <= self.n and 1 <= j <= self.n):
                raise SchemaError(f"edge ({i}, {j}) references a vertex outside 1..{self.n}")
            if i > j:
                raise SchemaError(f"edge ({i}, {j}) must be stored as (min, max); use Graph.from_edges")

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[Sequence[int]]) -> "Graph":
        seen = set()
        for edge in edges:
            if len(edge) != 2:
                raise SchemaError(f"edge {list(edge)} must have exactly two endpoints")
            i, j = int(edge[0]), int(edge[1])
            if i == j:
                raise SchemaError(f"loop at vertex {i} is not allowed in a simple graph")
            key = (min(i, j), max(i, j))
            if key in seen:
                raise SchemaError(f"duplicate edge {key}")
            seen.add(key)
        return cls(n, frozenset(seen))

    @classmethod
    def empty(cls, n: int) -> "Graph":
        return cls(n)

    @classmethod
    def complete(cls, n: int) -> "Graph":
        return cls(n, frozenset(combinations(range(1, n + 1), 2)))

    @classmethod
    def path(cls, n: int) -> "Graph":
        return cls(n, frozenset((i, i + 1) for i in range(1, n)))

    @classmethod
    def star(cls, n: int, center: int = 1) -> "Graph":
        return cls.from_edges(n, [(center, v) for v in range(1, n + 1) if v != center])

    @classmethod
    def complete_bipartite(cls, m: int, k: int) -> "Graph":
        """Parts {1..m} and {m+1..m+k}."""
        return cls(m + k, frozenset((u, v) for u in range(1, m + 1) for v in range(m + 1, m + k + 1)))

    @cached_property
    def _neighbors(self) -> Tuple[FrozenSet[int], ...]:
        adj = [set() for _ in range(self.n)]
        for i, j in self.edges:
            adj[i - 1].add(j)
            adj[j - 1].add(i)
        return tuple(frozenset(a) for a in adj)

    def neighbors(self, i: int) -> FrozenSet[int]:
        return self._neighbors[i - 1]

    def adjacent(self, i: int, j: int) -> bool:
        return j in self._neighbors[i - 1]

    def degree(self, i: int) -> int:
        return len(self._neighbors[i - 1])

    @cached_property
    def neighborhoods(self) -> Tuple[Tuple[int, ...], ...]:
        """Closed neighbourhoods N[i] sorted ascending, indexed by i-1."""
        return tuple(tuple(sorted(self._neighbors[i] | {i + 1})) for i in range(self.n))

    def closed_neighborhood(self, i: int) -> Tuple[int, ...]:
        return self.neighborhoods[i - 1]

    def to_networkx(self) -> nx.Graph:
        G = nx.Graph()
        G.add_nodes_from(range(1, self.n + 1))
        G.add_edges_from(sorted(self.edges))
        return G


@dataclass(frozen=True)
class SystemDescription:
    """
    A graph with one local function per vertex; f_i reads N[i] in ascending vertex order.

    Attributes:
        graph: the dependency graph.
        functions: f_1..f_n, arity of f_i equal to |N[i]|.
        metadata: free-form annotations carried through JSON (e.g. {"driver": "pds"}).
    """
    graph: Graph
    functions: Tuple[LocalFunction, ...]
    metadata: Dict[str, object] = field(default_factory=dict, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "functions", tuple(self.functions))
        if len(self.functions) != self.graph.n:
            raise SchemaError(f"expected {self.graph.n} local functions, got {len(self.functions)}")
        for i, f in enumerate(self.functions, start=1):
            m = len(self.graph.closed_neighborhood(i))
            if f.arity != m:
                raise SchemaError(f"vertex {i}: function arity {f.arity} does not match |N[{i}]| = {m}")

    @property
    def n(self) -> int:
        return self.graph.n

    @cached_property
    def monotonicity(self) -> Tuple[MonotonicityVerdict, ...]:
        return tuple(is_monotone_total(f) for f in self.functions)

    @property
    def monotone(self) -> bool:
        return all(v.monotone for v in self.monotonicity)

    def require_monotone(self):
        for i, verdict in enumerate(self.monotonicity, start=1):
            if not verdict.monotone:
                raise NonMonotoneError(f"local function of vertex {i} is not monotone", vertex=i, witness=verdict.witness)

    def local_value(self, i: int, bits: int) -> int:
        """f_i evaluated on the restriction of a packed state to N[i]."""
        idx = 0
        for v in self.graph.closed_neighborhood(i):
            idx = (idx << 1) | ((bits >> (v - 1)) & 1)
        return int(self.functions[i - 1].lookup[idx])

    def local_values(self, i: int, states: np.ndarray) -> np.ndarray:
        nbhd = self.graph.closed_neighborhood(i)
        m = len(nbhd)
        idx = np.zeros_like(states)
        for j, v in enumerate(nbhd):
            idx |= ((states >> (v - 1)) & 1) << (m - 1 - j)
        return self.functions[i - 1].lookup[idx].astype(np.int64)


@dataclass(frozen=True)
class Driver:
    """Which global map to iterate: the sequential map F_pi or the parallel map."""
    kind: str
    schedule: Optional[UpdateSchedule] = None

    def __post_init__(self):
        if self.kind == SDS and self.schedule is None:
            raise ValueError("sds driver requires a schedule")
        if self.kind == PDS and self.schedule is not None:
            raise ValueError("pds driver takes no schedule")
        if self.kind not in (SDS, PDS):
            raise ValueError(f"unknown driver {self.kind!r}")

    @classmethod
    def sds(cls, schedule) -> "Driver":
        if not isinstance(schedule, UpdateSchedule):
            schedule = UpdateSchedule(tuple(schedule))
        return cls(SDS, schedule)

    @classmethod
    def pds(cls) -> "Driver":
        return cls(PDS)

    def __str__(self) -> str:
        return f"sds({self.schedule})" if self.kind == SDS else "pds"


def _check_state(sys: SystemDescription, X: State):
    if X.n != sys.n:
        raise DimensionMismatchError(f"state of length {X.n} given to a system on {sys.n} vertices")


def _check_schedule(sys: SystemDescription, pi: UpdateSchedule):
    if pi.n != sys.n:
        raise DimensionMismatchError(f"schedule of length {pi.n} given to a system on {sys.n} vertices")


def inflate_step(sys: SystemDescription, i: int, X: State) -> State:
    """F_i(X): replace x_i by f_i(X restricted to N[i])."""
    _check_state(sys, X)
    if not 1 <= i <= sys.n:
        raise IndexError(f"vertex {i} out of range 1..{sys.n}")
    return X.with_value(i, sys.local_value(i, X.bits))


def _sds_bits(sys: SystemDescription, order: Sequence[int], bits: int) -> int:
    for i in order:
        mask = 1 << (i - 1)
        bits = (bits | mask) if sys.local_value(i, bits) else (bits & ~mask)
    return bits


def _pds_bits(sys: SystemDescription, bits: int) -> int:
    out = 0
    for i in range(1, sys.n + 1):
        if sys.local_value(i, bits):
            out |= 1 << (i - 1)
    return out


def sds_step(sys: SystemDescription, pi: UpdateSchedule, X: State) -> State:
    """F_pi(X) = F_{pi_n} o ... o F_{pi_1}(X)."""
    _check_state(sys, X)
    _check_schedule(sys, pi)
    return State(sys.n, _sds_bits(sys, pi.perm, X.bits))


def pds_step(sys: SystemDescription, X: State) -> State:
    """Every coordinate reads the original state."""
    _check_state(sys, X)
    return State(sys.n, _pds_bits(sys, X.bits))


def step(sys: SystemDescription, driver: Driver, X: State) -> State:
    if driver.kind == SDS:
        return sds_step(sys, driver.schedule, X)
    return pds_step(sys, X)


def _check_cap(n: int, cap: Optional[int]):
    limit = n_cap(cap)
    if n > limit:
        raise CapExceededError(f"n={n} exceeds the configured cap {limit}; 2^n tabulation refused")


def all_codes(n: int) -> np.ndarray:
    return np.arange(1 << n, dtype=np.int64)


def apply_vertices(sys: SystemDescription, vertices: Sequence[int], states: np.ndarray) -> np.ndarray:
    """F_{v_last} o ... o F_{v_first} applied elementwise to packed states."""
    states = states.copy()
    for i in vertices:
        mask = np.int64(1 << (i - 1))
        states = (states & ~mask) | (sys.local_values(i, states) << (i - 1))
    return states


def parallel_values(sys: SystemDescription, states: np.ndarray) -> np.ndarray:
    out = np.zeros_like(states)
    for i in range(1, sys.n + 1):
        out |= sys.local_values(i, states) << (i - 1)
    return out


def successor_array(sys: SystemDescription, driver: Driver, cap: int = None) -> np.ndarray:
    """successor[x] = packed image of packed state x, for all 2^n states."""
    _check_cap(sys.n, cap)
    states = all_codes(sys.n)
    if driver.kind == SDS:
        _check_schedule(sys, driver.schedule)
        return apply_vertices(sys, driver.schedule.perm, states)
    return parallel_values(sys, states)


def fixed_points_direct(sys: SystemDescription, cap: int = None) -> List[State]:
    """States with f_i(X|N[i]) = x_i for every i; independent of the update schedule."""
    _check_cap(sys.n, cap)
    states = all_codes(sys.n)
    fixed = np.ones(states.size, dtype=bool)
    for i in range(1, sys.n + 1):
        fixed &= sys.local_values(i, states) == ((states >> (i - 1)) & 1)
    return [State(sys.n, int(b)) for b in np.flatnonzero(fixed)]


@dataclass(frozen=True)
class Trajectory:
    """
    Orbit of one state split into a transient prefix and its limit cycle.

    The cycle is rotated to start at its smallest packed state. When the step
    budget runs out before a repeat, `truncated` is True, `transient` holds the
    states visited so far and `cycle` is empty.
    """
    transient: List[State]
    cycle: List[State]
    truncated: bool = False


def rotate_cycle(cycle: List[int]) -> List[int]:
    start = cycle.index(min(cycle))
    return cycle[start:] + cycle[:start]


def trajectory(sys: SystemDescription, driver: Driver, X: State, max_steps: Optional[int] = None) -> Trajectory:
    _check_state(sys, X)
    budget = (1 << sys.n) if max_steps is None else max_steps
    if driver.kind == SDS:
        _check_schedule(sys, driver.schedule)
        order = driver.schedule.perm
        advance = lambda b: _sds_bits(sys, order, b)
    else:
        advance = lambda b: _pds_bits(sys, b)

    seen = {X.bits: 0}
    path = [X.bits]
    for _ in range(budget):
        nxt = advance(path[-1])
        if nxt in seen:
            start = seen[nxt]
            cycle = rotate_cycle(path[start:])
            return Trajectory(
                transient=[State(sys.n, b) for b in path[:start]],
                cycle=[State(sys.n, b) for b in cycle],
            )
        seen[nxt] = len(path)
        path.append(nxt)
    logger.debug("trajectory truncated after %d steps from %s", budget, X)
    return Trajectory(transient=[State(sys.n, b) for b in path], cycle=[], truncated=True)
