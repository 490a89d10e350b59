"""
Conversions between sequential and parallel systems.

parallelize tabulates F_pi coordinatewise into a parallel system;
derive_sequentialization goes the other way, collecting the values each
local function is forced to take on the intermediate states it would read
and extending them monotonically when that is possible. goles_map builds the
monotone parallel map whose limit cycle is the whole middle layer.
"""
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple
import logging

import numpy as np

from models.config import n_cap
from models.errors import CapExceededError, SchemaError, TheoremViolation
from models.lattice import State
from models.local_functions import (
    LocalFunction,
    PartialFunction,
    dependent_positions,
    is_monotone_partial,
    monotone_extend,
    reversal_permutation,
)
from models.schedules import UpdateSchedule
from models.system import PDS, Driver, Graph, SystemDescription, all_codes, successor_array

logger = logging.getLogger(__name__)

OK = "OK"
CONFLICT = "CONFLICT"
NON_MONOTONE = "NON_MONOTONE"


def table_on(values: np.ndarray, neighborhood: Sequence[int]) -> LocalFunction:
    """
    Truth table over `neighborhood` of a function given on all packed states.

    Coordinates outside the neighbourhood are read as 0, so `values` must not
    depend on them.
    """
    m = len(neighborhood)
    idx = np.arange(1 << m, dtype=np.int64)
    packed = np.zeros_like(idx)
    for j, v in enumerate(neighborhood):
        packed |= ((idx >> (m - 1 - j)) & 1) << (v - 1)
    return LocalFunction.from_lookup(values[packed])


def _coordinates(successor: np.ndarray, n: int) -> List[np.ndarray]:
    return [((successor >> (i - 1)) & 1).astype(np.uint8) for i in range(1, n + 1)]


def _system_from_coordinates(coords: List[np.ndarray], n: int, metadata: Dict[str, object]) -> SystemDescription:
    """Smallest graph on which every coordinate function only reads its closed neighbourhood."""
    edges = set()
    for i, values in enumerate(coords, start=1):
        for p in dependent_positions(values, n):
            j = p + 1
            if j != i:
                edges.add((min(i, j), max(i, j)))
    graph = Graph(n, frozenset(edges))
    functions = tuple(table_on(values, graph.closed_neighborhood(i)) for i, values in enumerate(coords, start=1))
    return SystemDescription(graph, functions, metadata=metadata)


def parallelize(sys: SystemDescription, pi: UpdateSchedule, cap: int = None) -> SystemDescription:
    """Parallel system whose map equals F_pi; f'_i is coordinate i of F_pi."""
    successor = successor_array(sys, Driver.sds(pi), cap)
    out = _system_from_coordinates(_coordinates(successor, sys.n), sys.n,
                                   metadata={"driver": PDS, "parallelized_from": str(pi)})
    logger.debug("parallelize %s: %d -> %d edges", pi, len(sys.graph.edges), len(out.graph.edges))
    return out


@dataclass
class SequentializationResult:
    """
    Outcome of searching for a monotone sequential system with schedule pi.

    Attributes:
        status: OK, CONFLICT or NON_MONOTONE.
        schedule: the schedule that was tried.
        derived_functions: local functions of the derived system (OK only).
        system: the derived sequential system (OK only).
        vertex: the vertex whose constraints failed.
        conflict_witness: two original states that reach the same intermediate
            state but require different values at `vertex`.
        monotonicity_witness: (X, Y) in the constrained domain with X <= Y,
            required value 1 at X and 0 at Y.
        domains: vertex -> intermediate states its function is evaluated on.
    """
    status: str
    schedule: UpdateSchedule
    derived_functions: Optional[Tuple[LocalFunction, ...]] = None
    system: Optional[SystemDescription] = None
    vertex: Optional[int] = None
    conflict_witness: Optional[Tuple[State, State]] = None
    monotonicity_witness: Optional[Tuple[State, State]] = None
    domains: Dict[int, List[State]] = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return self.status == OK

    def to_dict(self) -> Dict[str, object]:
        def pair(p):
            return None if p is None else [str(p[0]), str(p[1])]
        return {
            "status": self.status,
            "schedule": str(self.schedule),
            "vertex": self.vertex,
            "conflict_witness": pair(self.conflict_witness),
            "monotonicity_witness": pair(self.monotonicity_witness),
            "domains": {str(v): [str(W) for W in states] for v, states in self.domains.items()},
        }


def derive_sequentialization(pds: SystemDescription, pi: UpdateSchedule, cap: int = None) -> SequentializationResult:
    """
    Try to realise the parallel map of `pds` as a monotone sequential map with schedule pi.

    Vertices are processed in schedule order. Before vertex v updates, the
    state read is W_v(X): X with the coordinates already updated replaced by
    their final values; the sequential f_v must map W_v(X) to coordinate v of
    the parallel image. Clashing requirements give CONFLICT, requirements that
    no monotone function meets give NON_MONOTONE.
    """
    pds.require_monotone()
    n = pds.n
    target = successor_array(pds, Driver.pds(), cap)
    states = all_codes(n)
    size = 1 << n
    current = states.copy()
    partials: Dict[int, PartialFunction] = {}
    domains: Dict[int, List[State]] = {}

    for v in pi.perm:
        want = (target >> (v - 1)) & 1
        ones_at = np.zeros(size, dtype=bool)
        zeros_at = np.zeros(size, dtype=bool)
        ones_at[current[want == 1]] = True
        zeros_at[current[want == 0]] = True
        domains[v] = [State(n, int(w)) for w in np.flatnonzero(ones_at | zeros_at)]

        clash = np.flatnonzero(ones_at & zeros_at)
        if clash.size:
            w = int(clash[0])
            x_zero = int(states[(current == w) & (want == 0)][0])
            x_one = int(states[(current == w) & (want == 1)][0])
            logger.debug("sequentialize %s: vertex %d conflict at %s", pi, v, State(n, w))
            return SequentializationResult(status=CONFLICT, schedule=pi, vertex=v,
                                           conflict_witness=(State(n, x_zero), State(n, x_one)),
                                           domains=domains)

        values = np.full(size, -1, dtype=np.int8)
        values[zeros_at] = 0
        values[ones_at] = 1
        partials[v] = PartialFunction.from_array(values, n)
        mask = np.int64(1 << (v - 1))
        current = (current & ~mask) | (want << (v - 1))

    for v in pi.perm:
        verdict = is_monotone_partial(partials[v], cap)
        if not verdict.monotone:
            logger.debug("sequentialize %s: vertex %d not monotone on its domain", pi, v)
            return SequentializationResult(status=NON_MONOTONE, schedule=pi, vertex=v,
                                           monotonicity_witness=verdict.witness, domains=domains)

    to_table = reversal_permutation(n)
    coords = []
    for v in range(1, n + 1):
        extended = monotone_extend(partials[v], cap)
        coords.append(extended.lookup[to_table])
    derived = _system_from_coordinates(coords, n, metadata={"driver": "sds", "schedule": str(pi)})

    if not np.array_equal(successor_array(derived, Driver.sds(pi), cap), target):
        raise TheoremViolation(f"derived sequential system under {pi} does not reproduce the parallel map")
    return SequentializationResult(status=OK, schedule=pi, derived_functions=derived.functions,
                                   system=derived, domains=domains)


def goles_map(n: int, cap: int = None) -> np.ndarray:
    """
    Successor array of the monotone map that cycles through the middle layer.

    Middle-layer states (floor(n/2) ones) advance to the next one in increasing
    packed order, wrapping around; heavier states go to all-ones and lighter
    states to all-zeros.
    """
    if n < 2:
        raise SchemaError(f"the middle-layer cycle needs n >= 2, got {n}")
    limit = n_cap(cap)
    if n > limit:
        raise CapExceededError(f"n={n} exceeds the configured cap {limit}")
    codes = all_codes(n)
    weight = np.zeros_like(codes)
    for p in range(n):
        weight += (codes >> p) & 1
    mid = n // 2
    successor = np.where(weight > mid, (1 << n) - 1, 0).astype(np.int64)
    layer = codes[weight == mid]
    successor[layer] = np.roll(layer, -1)
    return successor


def goles_pds(n: int, cap: int = None) -> SystemDescription:
    """Complete-graph parallel system whose global map is goles_map(n)."""
    successor = goles_map(n, cap)
    graph = Graph.complete(n)
    functions = tuple(table_on(values, graph.closed_neighborhood(i))
                      for i, values in enumerate(_coordinates(successor, n), start=1))
    return SystemDescription(graph, functions, metadata={"driver": PDS, "construction": "middle-layer cycle"})
