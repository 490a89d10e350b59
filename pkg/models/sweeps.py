"""Generators of small systems for exhaustive and randomized sweeps."""
from itertools import combinations, product
from typing import Iterator, Tuple
import logging

import numpy as np

from models.errors import SchemaError
from models.local_functions import LocalFunction, random_monotone_table
from models.system import PDS, Graph, SystemDescription, all_codes
from models.transforms import goles_pds, table_on

logger = logging.getLogger(__name__)

# Thresholds run from 0 (constant 1) to deg+2 (constant 0, one past the arity).
EXTRA_THRESHOLDS = 2
# Largest n of the deterministic cycling families.
CYCLING_MAX_N = 4


def all_graphs(n: int) -> Iterator[Graph]:
    """Every labeled simple graph on vertices 1..n (2^(n choose 2) of them)."""
    pairs = list(combinations(range(1, n + 1), 2))
    for mask in range(1 << len(pairs)):
        yield Graph(n, frozenset(p for b, p in enumerate(pairs) if (mask >> b) & 1))


def threshold_systems(graph: Graph) -> Iterator[SystemDescription]:
    """All systems on `graph` with a simple threshold k in 0..deg(i)+2 at every vertex i."""
    choices = [range(graph.degree(i) + 1 + EXTRA_THRESHOLDS) for i in range(1, graph.n + 1)]
    for ks in product(*choices):
        functions = tuple(LocalFunction.threshold(len(graph.closed_neighborhood(i)), k)
                          for i, k in enumerate(ks, start=1))
        yield SystemDescription(graph, functions, metadata={"thresholds": list(ks)})


def threshold_sweep(max_n: int, min_n: int = 2) -> Iterator[Tuple[int, SystemDescription]]:
    for n in range(min_n, max_n + 1):
        count = 0
        for graph in all_graphs(n):
            for sys in threshold_systems(graph):
                count += 1
                yield n, sys
        logger.debug("threshold sweep n=%d: %d systems", n, count)


def random_graph(n: int, rng: np.random.Generator, edge_probability: float = 0.5) -> Graph:
    pairs = combinations(range(1, n + 1), 2)
    return Graph(n, frozenset(p for p in pairs if rng.random() < edge_probability))


def random_monotone_systems(n: int, rng: np.random.Generator, count: int) -> Iterator[SystemDescription]:
    """`count` monotone truth-table systems on random graphs."""
    for _ in range(count):
        graph = random_graph(n, rng)
        functions = tuple(random_monotone_table(len(graph.closed_neighborhood(i)), rng)
                          for i in range(1, n + 1))
        yield SystemDescription(graph, functions)


def rotation_pds(n: int) -> SystemDescription:
    """Parallel system on the n-cycle where every vertex copies its predecessor; x_i' = x_{i-1}, indices mod n."""
    if n < 2:
        raise SchemaError(f"the rotation system needs n >= 2, got {n}")
    graph = Graph.from_edges(n, [(i, i + 1) for i in range(1, n)] + ([(1, n)] if n > 2 else []))
    codes = all_codes(n)
    functions = []
    for i in range(1, n + 1):
        predecessor = n if i == 1 else i - 1
        values = ((codes >> (predecessor - 1)) & 1).astype(np.uint8)
        functions.append(table_on(values, graph.closed_neighborhood(i)))
    return SystemDescription(graph, tuple(functions), metadata={"driver": PDS, "construction": "rotation"})


def cycling_parallel_systems(max_n: int = CYCLING_MAX_N) -> Iterator[SystemDescription]:
    """Monotone parallel systems with limit cycles longer than one state: rotations and middle-layer cycles."""
    for n in range(2, max_n + 1):
        yield rotation_pds(n)
        yield goles_pds(n)
