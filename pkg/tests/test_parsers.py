import json
import os

import pytest

from models.errors import SchemaError
from models.lattice import State
from models.local_functions import THRESHOLD
from models.sweeps import threshold_sweep
from models.transforms import goles_pds
from parsers.partial_function import parse_partial_function, partial_function_to_dict
from parsers.system import driver_hint, emit_system, parse_system, system_from_dict, system_to_dict

DATA_DIR = os.path.join(os.path.dirname(__file__), "..", "data", "systems")


def data_file(name):
    return os.path.join(DATA_DIR, name)


def write_json(tmp_path, payload, name="system.json"):
    path = tmp_path / name
    path.write_text(json.dumps(payload) if not isinstance(payload, str) else payload)
    return str(path)


def test_parse_edge_or():
    sys = parse_system(data_file("edge_or.json"))
    assert sys.n == 2
    assert sys.graph.edges == frozenset({(1, 2)})
    assert all(f.kind == THRESHOLD and f.k == 1 for f in sys.functions)
    assert sys.monotone
    assert driver_hint(sys) is None


def test_parse_copy_neighbor_keeps_driver_hint():
    sys = parse_system(data_file("copy_neighbor.json"))
    assert driver_hint(sys) == "pds"
    assert [f.bits for f in sys.functions] == ["0101", "0011"]


def test_parse_k22_majority():
    sys = parse_system(data_file("k22_majority.json"))
    assert sys.n == 4
    assert sys.graph.closed_neighborhood(1) == (1, 3, 4)
    assert [f.arity for f in sys.functions] == [3, 3, 3, 3]


def test_parse_partial_function():
    g = parse_partial_function(data_file("partial_and.json"))
    assert g.n == 2
    assert g.entries == {State.parse("00"): 0, State.parse("11"): 1}
    assert partial_function_to_dict(g) == {"n": 2, "entries": {"00": 0, "11": 1}}


def test_missing_file():
    with pytest.raises(FileNotFoundError):
        parse_system(data_file("no_such_system.json"))


def test_invalid_json(tmp_path):
    with pytest.raises(SchemaError, match="invalid JSON"):
        parse_system(write_json(tmp_path, "{not json"))


def test_table_length_error_names_vertex(tmp_path):
    payload = {"n": 2, "edges": [[1, 2]],
               "functions": [{"type": "table", "bits": "0001"}, {"type": "table", "bits": "011"}]}
    with pytest.raises(SchemaError, match="vertex 2: table length"):
        parse_system(write_json(tmp_path, payload))


def test_duplicate_edge(tmp_path):
    payload = {"n": 2, "edges": [[1, 2], [2, 1]],
               "functions": [{"type": "threshold", "k": 1}] * 2}
    with pytest.raises(SchemaError, match="duplicate edge"):
        parse_system(write_json(tmp_path, payload))


@pytest.mark.parametrize("payload, message", [
    ({"edges": [], "functions": []}, "missing field 'n'"),
    ({"n": 2, "edges": [], "functions": [{"type": "threshold", "k": 1}]}, "has 1 entries, expected 2"),
    ({"n": 1, "edges": [], "functions": [{"type": "majority"}]}, "vertex 1: unknown function type"),
    ({"n": 1, "edges": [], "functions": [{"type": "threshold"}]}, "vertex 1: missing field 'k'"),
    ({"n": 1, "edges": [], "functions": [{"type": "threshold", "k": True}]}, "wrong type"),
    ({"n": 2, "edges": [[1, "2"]], "functions": []}, "edges"),
    ({"n": 1, "edges": [], "functions": [{"type": "threshold", "k": 1}], "metadata": "x"},
     "field 'metadata' must be an object"),
])
def test_schema_errors(payload, message):
    with pytest.raises(SchemaError, match=message):
        system_from_dict(payload)


def test_emit_then_parse_preserves_systems(tmp_path):
    systems = [sys for _, sys in threshold_sweep(2)] + [goles_pds(3)]
    for sys in systems:
        path = str(tmp_path / "round.json")
        emit_system(sys, path)
        parsed = parse_system(path)
        assert parsed == sys
        assert parsed.metadata == sys.metadata


def test_system_to_dict_lifts_driver():
    payload = system_to_dict(goles_pds(2))
    assert payload["driver"] == "pds"
    assert payload["metadata"] == {"construction": "middle-layer cycle"}
    assert payload["edges"] == [[1, 2]]
