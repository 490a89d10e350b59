from itertools import product

import numpy as np
import pytest

from models.errors import AlphaClassOverflowError, CapExceededError, InvalidScheduleError, InvalidStateError
from models.lattice import S0, S1, State, all_states, enumerate_antichains, s_state
from models.local_functions import LocalFunction
from models.schedules import (
    ONE,
    ZERO,
    UpdateSchedule,
    act_schedule,
    act_state,
    all_schedules,
    alpha_class,
    in_theta,
    orbit_S,
    pattern_orbit,
    tau,
    tau_shift,
    theta,
    theta_disjointness_check,
    theta_schedules,
    theta_union_size,
)
from models.sweeps import random_monotone_systems
from models.system import Driver, Graph, SystemDescription, successor_array


def P(text):
    return UpdateSchedule.parse(text)


def S(text):
    return State.parse(text)


def test_parse_schedule():
    assert P("2,4,1,3").perm == (2, 4, 1, 3)
    assert P("2413") == P("2,4,1,3")
    assert str(P("2413")) == "2,4,1,3"
    with pytest.raises(InvalidScheduleError):
        P("1,1,2")
    with pytest.raises(InvalidScheduleError):
        P("1,x")


def test_inverse_and_composition():
    g = P("2413")
    assert g * g.inverse() == UpdateSchedule.identity(4)
    assert g.inverse() * g == UpdateSchedule.identity(4)


def test_act_state_examples():
    assert act_state(UpdateSchedule.identity(3), S("011")) == S("011")
    g = P("132")
    assert act_state(g, S("011")) == S("011")
    assert act_state(g, S("001")) == S("010")


def test_act_state_is_a_left_action():
    for n in range(1, 5):
        group = list(all_schedules(n))
        for g, h in product(group, repeat=2):
            gh = g * h
            for X in all_states(n):
                assert act_state(g, act_state(h, X)) == act_state(gh, X)


def test_act_schedule_is_a_left_action():
    for n in range(1, 4):
        group = list(all_schedules(n))
        for g, h, pi in product(group, repeat=3):
            assert act_schedule(g, act_schedule(h, pi)) == act_schedule(g * h, pi)
    pi = P("2413")
    g = P("3142")
    assert act_schedule(g, act_schedule(g.inverse(), pi)) == pi
    assert act_schedule(UpdateSchedule.identity(4), pi) == pi


def test_inverse_schedule_sends_theta_members_to_patterns():
    # pi in theta_0(X) iff pi^-1 . X is the S0 pattern of matching length
    for n in range(1, 5):
        for X in all_states(n):
            for pi in all_schedules(n):
                expected = act_state(pi.inverse(), X) == s_state(S0, X.zero_count, n)
                assert in_theta(X, ZERO, pi) == expected


def test_tau_shift():
    pi = P("241635")
    assert tau_shift(pi, 1) == P("416352")
    assert tau_shift(pi, 0) == pi
    assert tau_shift(pi, 6) == pi
    assert tau_shift(tau_shift(pi, 2), 3) == tau_shift(pi, 5)
    assert act_schedule(tau(6), pi) == tau_shift(pi, 1)


def test_alpha_class_examples():
    assert alpha_class(Graph.complete(4), P("2413")).members == (P("2413"),)
    star = alpha_class(Graph.star(3), P("123"))
    assert set(star.members) == {P("123"), P("132")}
    assert P("132") in star
    assert len(alpha_class(Graph.empty(3), P("123"))) == 6


def test_alpha_class_overflow():
    with pytest.raises(AlphaClassOverflowError):
        alpha_class(Graph.empty(5), P("12345"), cap=10)
    with pytest.raises(CapExceededError):
        alpha_class(Graph.empty(5), P("12345"), cap=10)


def test_alpha_equivalent_schedules_give_the_same_map():
    rng = np.random.default_rng(7)
    systems = list(random_monotone_systems(4, rng, 30))
    systems.append(SystemDescription(Graph.path(3), (
        LocalFunction.table("0110"), LocalFunction.table("01101001"), LocalFunction.table("1001"))))
    for sys in systems:
        pi = UpdateSchedule(tuple(int(v) for v in rng.permutation(sys.n) + 1))
        expected = successor_array(sys, Driver.sds(pi))
        for sigma in alpha_class(sys.graph, pi).members:
            assert np.array_equal(successor_array(sys, Driver.sds(sigma)), expected)


def test_orbit_S_examples():
    star = Graph.star(3)
    assert orbit_S(star, P("123"), S0, 2) == {S("001"), S("010")}
    assert orbit_S(star, P("123"), S0, 3) == {S("000")}
    # the first scheduled vertex carries the single 1
    assert orbit_S(Graph.complete(3), P("231"), S1, 1) == {S("010")}


def test_pattern_orbit_contains_both_constant_states():
    orbit = pattern_orbit(Graph.complete(3), P("123"))
    assert S("000") in orbit and S("111") in orbit
    # complete graph: S0 and S1 patterns for k=0..3, with 000 and 111 each counted twice
    assert len(orbit) == 6


def test_theta_examples():
    assert theta(S("00111")).size == 12
    assert theta(S("000")).size == 6
    assert theta(S("00111"), ONE).size == 12
    members = theta(S("011"), ZERO, materialize=True).members
    assert members == (P("123"), P("132"))
    with pytest.raises(CapExceededError):
        theta(S("000000"), materialize=True, cap=100)
    with pytest.raises(InvalidStateError):
        theta(S("01"), "two")


def test_theta_size_matches_brute_force():
    for n in range(1, 7):
        group = list(all_schedules(n))
        for X in all_states(n):
            for kind in (ZERO, ONE):
                assert theta(X, kind).size == sum(in_theta(X, kind, pi) for pi in group)


def test_theta_disjointness():
    assert theta_disjointness_check(S("011"), S("101"))
    assert theta_disjointness_check(S("0011"), S("1100"))
    with pytest.raises(InvalidStateError):
        theta_disjointness_check(S("001"), S("011"))


def test_theta_union_of_antichain_fits_in_the_group():
    for n in range(1, 5):
        for A in enumerate_antichains(n):
            assert theta_union_size(A) <= len(list(all_schedules(n)))


def test_theta_schedules_union():
    assert theta_schedules(S("011")) == [P("123"), P("132"), P("231"), P("321")]
    assert len(theta_schedules(S("000"))) == 6
