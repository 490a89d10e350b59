"""
States of F_2^n, the coordinatewise partial order, antichains, and the LYM/Sperner layer.

A state is bit-packed into a single integer: vertex j (1-based) lives at bit j-1.
The text form is an n-character '0'/'1' string whose j-th character is x_j.
"""
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Iterable, Iterator, List, FrozenSet, Optional
import logging

from scipy.special import comb

from models.config import n_cap
from models.errors import CapExceededError, DimensionMismatchError, InvalidStateError

logger = logging.getLogger(__name__)

S0 = "S0"
S1 = "S1"

# Antichain enumeration grows like the Dedekind numbers; n=6 already has ~7.8M.
MAX_ANTICHAIN_N = 5


@dataclass(frozen=True)
class State:
    """
    A configuration of n Boolean vertex states.

    Attributes:
        n: number of vertices.
        bits: packed integer; bit j-1 holds x_j.
    """
    n: int
    bits: int

    def __post_init__(self):
        if self.n < 1:
            raise InvalidStateError(f"state length must be positive, got {self.n}")
        if self.bits < 0 or self.bits >> self.n:
            raise InvalidStateError(f"bits {self.bits} do not fit in {self.n} coordinates")

    @classmethod
    def parse(cls, text: str) -> "State":
        text = text.strip()
        if not text or any(c not in "01" for c in text):
            raise InvalidStateError(f"state text must be a non-empty 0/1 string, got {text!r}")
        bits = 0
        for j, c in enumerate(text):
            if c == "1":
                bits |= 1 << j
        return cls(len(text), bits)

    @classmethod
    def zeros(cls, n: int) -> "State":
        return cls(n, 0)

    @classmethod
    def ones(cls, n: int) -> "State":
        return cls(n, (1 << n) - 1)

    @classmethod
    def from_values(cls, values: Iterable[int]) -> "State":
        values = list(values)
        bits = 0
        for j, v in enumerate(values):
            if v:
                bits |= 1 << j
        return cls(len(values), bits)

    def __str__(self) -> str:
        return "".join("1" if (self.bits >> j) & 1 else "0" for j in range(self.n))

    def __repr__(self) -> str:
        return f"State('{self}')"

    def __getitem__(self, vertex: int) -> int:
        """Value x_vertex for a 1-based vertex."""
        if not 1 <= vertex <= self.n:
            raise IndexError(f"vertex {vertex} out of range 1..{self.n}")
        return (self.bits >> (vertex - 1)) & 1

    def values(self) -> List[int]:
        return [(self.bits >> j) & 1 for j in range(self.n)]

    def with_value(self, vertex: int, value: int) -> "State":
        mask = 1 << (vertex - 1)
        return State(self.n, (self.bits | mask) if value else (self.bits & ~mask))

    @property
    def weight(self) -> int:
        """Number of coordinates equal to 1."""
        return bin(self.bits).count("1")

    @property
    def zero_count(self) -> int:
        return self.n - self.weight

    def leq(self, other: "State") -> bool:
        return leq(self, other)


def _check_same_n(X: State, Y: State):
    if X.n != Y.n:
        raise DimensionMismatchError(f"states have different lengths: {X.n} vs {Y.n}")


def leq(X: State, Y: State) -> bool:
    """Coordinatewise order: every x_i <= y_i."""
    _check_same_n(X, Y)
    return X.bits & ~Y.bits == 0


def comparable(X: State, Y: State) -> bool:
    return leq(X, Y) or leq(Y, X)


def s_state(kind: str, k: int, n: int) -> State:
    """S_{0,k}: zeros on vertices 1..k then ones; S_{1,k}: the complementary pattern."""
    if not 0 <= k <= n:
        raise InvalidStateError(f"k must lie in 0..{n}, got {k}")
    if kind not in (S0, S1):
        raise InvalidStateError(f"kind must be {S0} or {S1}, got {kind!r}")
    prefix = (1 << k) - 1
    full = (1 << n) - 1
    return State(n, full ^ prefix if kind == S0 else prefix)


def binom(n: int, k: int) -> int:
    return int(comb(n, k, exact=True))


def sperner_bound(n: int, cap: int = None) -> int:
    """Largest antichain size in F_2^n, C(n, floor(n/2))."""
    if n < 1:
        raise InvalidStateError(f"n must be positive, got {n}")
    limit = n_cap(cap)
    if n > limit:
        raise CapExceededError(f"n={n} exceeds the configured cap {limit}")
    return binom(n, n // 2)


def _common_n(A: Iterable[State]) -> int:
    ns = {X.n for X in A}
    if len(ns) > 1:
        raise DimensionMismatchError(f"states of different lengths in one set: {sorted(ns)}")
    return ns.pop() if ns else 0


def is_antichain(A: Iterable[State]) -> bool:
    members = sorted(set(A), key=lambda X: X.bits)
    _common_n(members)
    for i, X in enumerate(members):
        for Y in members[i + 1:]:
            if comparable(X, Y):
                return False
    return True


@dataclass(frozen=True)
class LymReport:
    """
    Per-level counts of a state set and its exact LYM sum.

    Attributes:
        n: state length (positive).
        counts: k -> a_k, the number of members with exactly k zero coordinates.
        lym_sum: exact sum of a_k / C(n, k).
        is_antichain: whether the input set is an antichain.
    """
    n: int
    counts: Dict[int, int] = field(default_factory=dict)
    lym_sum: Fraction = Fraction(0)
    is_antichain: bool = True

    @property
    def size(self) -> int:
        return sum(self.counts.values())


def lym_report(A: Iterable[State], n: Optional[int] = None) -> LymReport:
    """`n` is required for the empty set and must match the member lengths otherwise."""
    members = set(A)
    found = _common_n(members)
    if n is None:
        if not members:
            raise DimensionMismatchError("the state length of an empty set is unknown; pass n")
        n = found
    elif n < 1:
        raise DimensionMismatchError(f"n must be positive, got {n}")
    elif members and found != n:
        raise DimensionMismatchError(f"states have length {found}, expected {n}")
    counts: Dict[int, int] = {}
    for X in members:
        counts[X.zero_count] = counts.get(X.zero_count, 0) + 1
    total = sum((Fraction(a, binom(n, k)) for k, a in counts.items()), Fraction(0))
    return LymReport(n=n, counts=dict(sorted(counts.items())), lym_sum=total, is_antichain=is_antichain(members))


def layer(n: int, ones: int) -> List[State]:
    """All states with exactly `ones` coordinates equal to 1, by increasing packed index."""
    return [State(n, b) for b in range(1 << n) if bin(b).count("1") == ones]


def all_states(n: int) -> Iterator[State]:
    for b in range(1 << n):
        yield State(n, b)


def enumerate_antichains(n: int) -> Iterator[FrozenSet[State]]:
    """Yield every antichain of F_2^n, the empty one included."""
    if not 1 <= n <= MAX_ANTICHAIN_N:
        raise CapExceededError(f"antichain enumeration supports 1 <= n <= {MAX_ANTICHAIN_N}, got {n}")
    size = 1 << n
    chosen: List[int] = []

    def incomparable_with_chosen(b: int) -> bool:
        return all(b & ~c and c & ~b for c in chosen)

    def backtrack(start: int):
        yield frozenset(State(n, c) for c in chosen)
        for b in range(start, size):
            if incomparable_with_chosen(b):
                chosen.append(b)
                yield from backtrack(b + 1)
                chosen.pop()

    yield from backtrack(0)
