import numpy as np
import pytest

from models.errors import SchemaError
from models.lattice import State
from models.phase_space import build
from models.sweeps import (
    all_graphs,
    cycling_parallel_systems,
    random_monotone_systems,
    rotation_pds,
    threshold_sweep,
    threshold_systems,
)
from models.system import Driver, Graph, pds_step


def test_graph_counts():
    assert [sum(1 for _ in all_graphs(n)) for n in (1, 2, 3, 4)] == [1, 2, 8, 64]


def test_threshold_systems_range():
    systems = list(threshold_systems(Graph.path(2)))
    # k in 0..3 at both vertices
    assert len(systems) == 16
    assert systems[0].metadata["thresholds"] == [0, 0]
    assert systems[-1].metadata["thresholds"] == [3, 3]
    assert all(sys.monotone for sys in systems)


def test_threshold_sweep_sizes():
    counts = {}
    for n, _ in threshold_sweep(3):
        counts[n] = counts.get(n, 0) + 1
    assert counts == {2: 25, 3: 536}


def test_random_monotone_systems_are_reproducible():
    first = list(random_monotone_systems(4, np.random.default_rng(5), 10))
    second = list(random_monotone_systems(4, np.random.default_rng(5), 10))
    assert first == second
    assert all(sys.monotone and sys.n == 4 for sys in first)


def test_rotation_pds():
    assert [f.bits for f in rotation_pds(2).functions] == ["0101", "0011"]
    rotation = rotation_pds(3)
    assert rotation.monotone
    assert pds_step(rotation, State.parse("100")) == State.parse("010")
    assert max(len(c) for c in build(rotation, Driver.pds()).cycles) == 3
    with pytest.raises(SchemaError):
        rotation_pds(1)


def test_cycling_parallel_systems_all_cycle():
    systems = list(cycling_parallel_systems())
    assert len(systems) == 6
    for sys in systems:
        assert sys.monotone
        assert max(len(c) for c in build(sys, Driver.pds()).cycles) > 1
