import json
import logging
from fractions import Fraction

import numpy as np
import pytest

from models import phase_space
from models.errors import NonMonotoneError
from models.lattice import S0, State, all_states, is_antichain, leq
from models.local_functions import LocalFunction
from models.phase_space import (
    FIXED_POINT,
    GOE_OR_FIXED,
    REACHES_FIXED_POINT,
    bipartite_lower_bound,
    build,
    classify_state,
    cycle_equivalence_check,
    fixed_points,
    goe_or_fixed_fraction,
    goe_states,
    lattice_extrema,
    limit_cycles,
    max_cycle_audit,
    probability_lower_bound,
    schedule_fraction,
    schedule_lower_bound,
    shift_homomorphism_check,
    state_fraction,
)
from models.schedules import UpdateSchedule, all_schedules, pattern_orbit
from models.sweeps import cycling_parallel_systems, random_monotone_systems, threshold_systems
from models.system import Driver, Graph, SystemDescription, fixed_points_direct
from models.transforms import goles_pds


def S(text):
    return State.parse(text)


def P(text):
    return UpdateSchedule.parse(text)


def states(*texts):
    return [S(t) for t in texts]


def threshold_system(graph, ks):
    return SystemDescription(graph, tuple(
        LocalFunction.threshold(len(graph.closed_neighborhood(i)), k) for i, k in enumerate(ks, start=1)))


OR_EDGE = threshold_system(Graph.path(2), (1, 1))
AND_EDGE = threshold_system(Graph.path(2), (2, 2))
STAR_OR = threshold_system(Graph.star(3), (1, 1, 1))
K22_MAJORITY = threshold_system(Graph.complete_bipartite(2, 2), (2, 2, 2, 2))
SDS_12 = Driver.sds(P("12"))


def test_or_edge_phase_space():
    ps = build(OR_EDGE, SDS_12)
    assert fixed_points(ps) == states("00", "11")
    assert goe_states(ps) == states("10", "01")
    assert limit_cycles(ps) == [states("00"), states("11")]
    assert int(ps.in_degree.sum()) == 4
    assert ps.verdict(S("01").bits) == REACHES_FIXED_POINT


def test_and_edge_phase_space():
    ps = build(AND_EDGE, SDS_12)
    assert fixed_points(ps) == states("00", "11")
    assert set(goe_states(ps)) == set(states("01", "10"))


def test_middle_layer_cycle_n2():
    ps = build(goles_pds(2), Driver.pds())
    assert [[str(X) for X in c] for c in limit_cycles(ps)] == [["00"], ["10", "01"], ["11"]]
    assert fixed_points(ps) == states("00", "11")
    assert goe_states(ps) == []


def test_constant_and_identity_maps():
    const = threshold_system(Graph.empty(3), (0, 0, 0))
    ps = build(const, Driver.pds())
    assert fixed_points(ps) == [S("111")]
    assert len(goe_states(ps)) == 7

    identity = threshold_system(Graph.empty(3), (1, 1, 1))
    ps = build(identity, Driver.sds(P("123")))
    assert len(fixed_points(ps)) == 8
    assert goe_states(ps) == []


def test_phase_space_invariants_over_sweep():
    for sys in threshold_systems(Graph.path(3)):
        for driver in [Driver.pds()] + [Driver.sds(pi) for pi in all_schedules(3)]:
            ps = build(sys, driver)
            assert int(ps.in_degree.sum()) == ps.size
            periodic = [b for c in ps.cycles for b in c]
            assert len(periodic) == len(set(periodic))
            for cycle in limit_cycles(ps):
                assert is_antichain(cycle)
            assert set(fixed_points(ps)) == set(fixed_points_direct(sys))


def test_exports():
    ps = build(OR_EDGE, SDS_12)
    payload = json.loads(ps.to_json())
    assert payload["successor"]["01"] == "11"
    assert payload["goe"] == ["10", "01"]
    assert payload["cycles"] == [["00"], ["11"]]
    assert payload["driver"] == "sds(1,2)"

    df = ps.to_dataframe()
    assert list(df.columns) == ["state", "successor", "in_degree", "goe", "periodic", "cycle", "verdict"]
    assert len(df) == 4
    assert df.loc[df.state == "11", "in_degree"].item() == 3

    G = ps.to_networkx()
    assert G.number_of_nodes() == 4 and G.number_of_edges() == 4
    assert G.nodes["01"]["goe"] and G.nodes["11"]["periodic"]

    dot = ps.to_dot()
    assert "digraph" in dot
    assert dot.count("->") == 4


def test_lattice_extrema():
    extrema = lattice_extrema(OR_EDGE, P("12"))
    assert (extrema.min_fp, extrema.max_fp) == (S("00"), S("11"))
    const = threshold_system(Graph.empty(3), (0, 0, 0))
    assert lattice_extrema(const, None).min_fp == S("111")
    extrema = lattice_extrema(K22_MAJORITY, P("1234"))
    assert (extrema.min_fp, extrema.max_fp) == (S("0000"), S("1111"))
    with pytest.raises(NonMonotoneError):
        lattice_extrema(SystemDescription(Graph.path(2), (LocalFunction.table("0110"),) * 2), P("12"))


def test_fixed_points_lie_between_extrema():
    for sys in threshold_systems(Graph.star(3)):
        for pi in all_schedules(3):
            extrema = lattice_extrema(sys, pi)
            for X in fixed_points_direct(sys):
                assert leq(extrema.min_fp, X) and leq(X, extrema.max_fp)


def test_classify_state_with_pattern_certificate():
    result = classify_state(STAR_OR, P("123"), S("010"))
    assert result.in_pattern_orbit is True
    assert result.certificate.kind == S0
    assert result.certificate.k == 2
    assert result.certificate.sigma == P("132")
    assert result.verdict == REACHES_FIXED_POINT
    assert result.reached_fixed_point == S("111")
    assert result.is_goe is None
    assert result.shortcut == "monotone chain"
    assert result.to_dict()["certificate"] == {"kind": "S0", "k": 2, "sigma": "1,3,2"}


def test_classify_state_shortcut_skips_the_state_table(monkeypatch):
    def no_table(*args, **kwargs):
        raise AssertionError("successor table built")

    monkeypatch.setattr(phase_space, "successor_array", no_table)
    result = classify_state(STAR_OR, P("123"), S("010"))
    assert result.verdict == REACHES_FIXED_POINT
    assert result.is_goe is None
    assert result.to_dict()["is_goe"] is None


def test_classify_state_scan_goe_on_request():
    result = classify_state(STAR_OR, P("123"), S("010"), scan_goe=True)
    assert result.is_goe is True
    assert result.verdict == REACHES_FIXED_POINT


def test_classify_state_fixed_point():
    result = classify_state(STAR_OR, P("123"), S("000"))
    assert result.in_pattern_orbit
    assert result.verdict == FIXED_POINT
    assert result.reached_fixed_point == S("000")
    assert result.is_goe is False


def test_classify_state_alpha_overflow_falls_back(caplog):
    identity = threshold_system(Graph.empty(3), (1, 1, 1))
    with caplog.at_level(logging.WARNING):
        result = classify_state(identity, P("123"), S("010"), alpha_cap=2)
    assert result.in_pattern_orbit is None
    assert result.verdict == FIXED_POINT
    assert "falling back" in caplog.text


def test_classify_state_requires_monotone():
    xor = SystemDescription(Graph.path(2), (LocalFunction.table("0110"),) * 2)
    with pytest.raises(NonMonotoneError):
        classify_state(xor, P("12"), S("01"))


def test_classify_state_never_contradicts_phase_space():
    # classify_state raises TheoremViolation on any disagreement
    for sys in threshold_systems(Graph.star(3)):
        for pi in all_schedules(3):
            ps = build(sys, Driver.sds(pi))
            for X in all_states(3):
                result = classify_state(sys, pi, X, scan_goe=True)
                assert result.is_goe == (ps.in_degree[X.bits] == 0)
                assert result.verdict == ps.verdict(X.bits)


def test_pattern_orbit_states_are_goe_or_fixed():
    rng = np.random.default_rng(3)
    for sys in random_monotone_systems(4, rng, 40):
        pi = UpdateSchedule(tuple(int(v) for v in rng.permutation(4) + 1))
        ps = build(sys, Driver.sds(pi))
        mask = ps.goe_or_fixed_mask()
        for X in pattern_orbit(sys.graph, pi):
            assert mask[X.bits]
            assert ps.verdict(X.bits) in GOE_OR_FIXED


def test_shift_homomorphism():
    for sys in threshold_systems(Graph.path(3)):
        for pi in all_schedules(3):
            for k in range(4):
                assert shift_homomorphism_check(sys, pi, k)
                assert cycle_equivalence_check(sys, pi, k)


def test_shift_homomorphism_holds_without_monotonicity():
    xor = SystemDescription(Graph.path(2), (LocalFunction.table("0110"),) * 2)
    assert shift_homomorphism_check(xor, P("12"), 1)
    assert cycle_equivalence_check(xor, P("21"), 1)


def test_max_cycle_audit():
    audit = max_cycle_audit(OR_EDGE, P("12"))
    assert (audit.max_len, audit.bound, audit.strict) == (1, 2, True)
    audit = max_cycle_audit(goles_pds(4), None)
    assert (audit.max_len, audit.bound, audit.strict) == (6, 6, False)
    single = threshold_system(Graph.empty(1), (1,))
    assert max_cycle_audit(single, P("1")).strict


def test_sequential_cycles_stay_below_the_bound():
    for sys in threshold_systems(Graph.complete(3)):
        for pi in all_schedules(3):
            assert max_cycle_audit(sys, pi).strict


def test_probability_bounds():
    assert probability_lower_bound(2) == 1
    assert probability_lower_bound(3) == Fraction(3, 4)
    assert goe_or_fixed_fraction(OR_EDGE) == 1
    for sys in threshold_systems(Graph.path(3)):
        assert goe_or_fixed_fraction(sys) >= probability_lower_bound(3)


def test_schedule_fraction_bound():
    assert schedule_lower_bound(S("000")) == 1
    assert schedule_lower_bound(S("0011")) == Fraction(1, 3)
    for sys in threshold_systems(Graph.star(3)):
        for X in all_states(3):
            assert schedule_fraction(sys, X) >= schedule_lower_bound(X)


def test_bipartite_bound():
    assert bipartite_lower_bound(2, 2) == Fraction(3, 4)
    assert state_fraction(K22_MAJORITY, P("1234")) >= bipartite_lower_bound(2, 2)


def test_parallel_cycles_respect_the_fixed_point_lattice():
    longest = 0
    for sys in cycling_parallel_systems():
        ps = build(sys, Driver.pds())
        extrema = lattice_extrema(sys, None)
        cycles = limit_cycles(ps)
        longest = max(longest, max(len(c) for c in cycles))
        for cycle in cycles:
            assert is_antichain(cycle)
            for X in cycle:
                assert leq(extrema.min_fp, X) and leq(X, extrema.max_fp)
        if max(len(c) for c in cycles) > 1:
            assert len(fixed_points(ps)) >= 2
    assert longest > 1
