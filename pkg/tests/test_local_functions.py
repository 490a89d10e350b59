from itertools import product

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from models.errors import DimensionMismatchError, NonMonotoneError, SchemaError
from models.lattice import State, all_states, leq
from models.local_functions import (
    LocalFunction,
    PartialFunction,
    evaluate,
    index_assignment,
    is_monotone_partial,
    is_monotone_total,
    monotone_extend,
    random_monotone_table,
    support,
    tabulate,
)


def partial(n, entries):
    return PartialFunction(n, {State.parse(k): v for k, v in entries.items()})


def brute_force_monotone(f: LocalFunction) -> bool:
    pts = list(all_states(f.arity))
    return all(evaluate(f, X) <= evaluate(f, Y) for X in pts for Y in pts if leq(X, Y))


def test_evaluate_threshold():
    OR = LocalFunction.threshold(2, 1)
    assert evaluate(OR, State.parse("00")) == 0
    assert evaluate(OR, State.parse("01")) == 1
    const = LocalFunction.threshold(3, 0)
    assert all(evaluate(const, X) == 1 for X in all_states(3))
    # k above the arity is constant 0
    never = LocalFunction.threshold(2, 3)
    assert all(evaluate(never, X) == 0 for X in all_states(2))


def test_evaluate_table_uses_smallest_vertex_as_msb():
    f = LocalFunction.table("0111")
    # a = 10 -> index 2 -> third character
    assert evaluate(f, State.parse("10")) == 1
    g = LocalFunction.table("0010")
    assert evaluate(g, State.parse("10")) == 1
    assert evaluate(g, State.parse("01")) == 0
    assert f(State.parse("00")) == 0


def test_evaluate_arity_mismatch():
    with pytest.raises(DimensionMismatchError):
        evaluate(LocalFunction.threshold(2, 1), State.parse("011"))


def test_table_validation():
    with pytest.raises(SchemaError, match="table length"):
        LocalFunction(arity=2, kind="table", bits="011")
    with pytest.raises(SchemaError, match="table length"):
        LocalFunction.table("011")
    with pytest.raises(SchemaError):
        LocalFunction.table("01x1")
    with pytest.raises(SchemaError):
        LocalFunction.threshold(2, -1)


def test_threshold_matches_its_table():
    for m in range(1, 7):
        for k in range(m + 2):
            f = LocalFunction.threshold(m, k)
            table = tabulate(f)
            assert table.kind == "table"
            for X in all_states(m):
                assert evaluate(f, X) == evaluate(table, X)


def test_support():
    assert support(LocalFunction.threshold(2, 1)) == [0, 1]
    assert support(LocalFunction.table("0011")) == [0]
    assert support(LocalFunction.table("0101")) == [1]
    assert support(LocalFunction.threshold(3, 0)) == []


def test_is_monotone_total_examples():
    assert is_monotone_total(LocalFunction.table("0001")).monotone
    verdict = is_monotone_total(LocalFunction.table("0110"))
    assert not verdict.monotone
    assert verdict.witness == (State.parse("01"), State.parse("11"))
    for m in range(1, 5):
        for k in range(m + 2):
            assert is_monotone_total(LocalFunction.threshold(m, k)).monotone


def test_covering_pairs_agree_with_all_pairs_exhaustively():
    for m in (1, 2):
        for bits in product("01", repeat=1 << m):
            f = LocalFunction.table("".join(bits))
            verdict = is_monotone_total(f)
            assert verdict.monotone == brute_force_monotone(f)
            if not verdict.monotone:
                X, Y = verdict.witness
                assert leq(X, Y) and evaluate(f, X) == 1 and evaluate(f, Y) == 0


@settings(derandomize=True, max_examples=300)
@given(st.integers(min_value=3, max_value=4).flatmap(
    lambda m: st.text(alphabet="01", min_size=1 << m, max_size=1 << m)))
def test_covering_pairs_agree_with_all_pairs_random(bits):
    f = LocalFunction.table(bits)
    assert is_monotone_total(f).monotone == brute_force_monotone(f)


def test_is_monotone_partial_examples():
    assert is_monotone_partial(partial(2, {"00": 0, "11": 1})).monotone
    verdict = is_monotone_partial(partial(2, {"01": 1, "11": 0}))
    assert not verdict.monotone
    assert verdict.witness == (State.parse("01"), State.parse("11"))
    assert is_monotone_partial(partial(2, {"01": 1, "10": 0})).monotone


def test_monotone_extend_examples():
    assert monotone_extend(partial(2, {"00": 0, "11": 1})).bits == "0001"
    f = monotone_extend(partial(2, {"01": 1}))
    assert evaluate(f, State.parse("00")) == 0
    assert evaluate(f, State.parse("10")) == 0
    assert evaluate(f, State.parse("11")) == 1
    assert evaluate(f, State.parse("01")) == 1


def test_monotone_extend_of_total_function_is_identity():
    f = LocalFunction.threshold(3, 2)
    g = PartialFunction(3, {X: evaluate(f, X) for X in all_states(3)})
    assert monotone_extend(g) == tabulate(f)


def test_monotone_extend_rejects_non_monotone_input():
    with pytest.raises(NonMonotoneError) as exc:
        monotone_extend(partial(2, {"01": 1, "11": 0}))
    assert exc.value.witness == (State.parse("01"), State.parse("11"))


def test_monotone_extend_exhaustive_small_domains():
    for n in (1, 2):
        pts = list(all_states(n))
        for choice in product((None, 0, 1), repeat=len(pts)):
            g = PartialFunction(n, {X: v for X, v in zip(pts, choice) if v is not None})
            if not is_monotone_partial(g).monotone:
                continue
            f = monotone_extend(g)
            assert is_monotone_total(f).monotone
            assert all(evaluate(f, X) == v for X, v in g.entries.items())


@settings(derandomize=True, max_examples=100)
@given(st.integers(min_value=4, max_value=5), st.integers(min_value=0, max_value=2 ** 32 - 1))
def test_monotone_extend_random_domains(n, seed):
    rng = np.random.default_rng(seed)
    total = random_monotone_table(n, rng)
    keep = rng.random(1 << n) < 0.4
    g = PartialFunction(n, {index_assignment(i, n): int(total.lookup[i]) for i in np.flatnonzero(keep)})
    f = monotone_extend(g)
    assert is_monotone_total(f).monotone
    assert all(evaluate(f, X) == v for X, v in g.entries.items())


@settings(derandomize=True, max_examples=50)
@given(st.integers(min_value=1, max_value=5), st.integers(min_value=0, max_value=2 ** 32 - 1))
def test_random_monotone_table_is_monotone(m, seed):
    f = random_monotone_table(m, np.random.default_rng(seed))
    assert f.arity == m
    assert is_monotone_total(f).monotone
