"""
Per-vertex Boolean local functions.

Truth-table convention: a function of arity m reads its closed neighbourhood
v_0 < v_1 < ... < v_{m-1}; the table index of an assignment a is
sum_j a_j * 2^(m-1-j), so the smallest vertex is the most significant bit.
Assignments are passed around as States of length m (a_j is coordinate j+1).
"""
from dataclasses import dataclass, field
from functools import cached_property
from typing import Dict, List, Optional, Tuple
import logging

import numpy as np

from models.config import n_cap
from models.errors import CapExceededError, DimensionMismatchError, NonMonotoneError, SchemaError
from models.lattice import State

logger = logging.getLogger(__name__)

THRESHOLD = "threshold"
TABLE = "table"


def reversal_permutation(m: int) -> np.ndarray:
    """r[packed_bits] = table index of the same assignment (bit order reversed over m bits)."""
    codes = np.arange(1 << m, dtype=np.int64)
    rev = np.zeros_like(codes)
    for j in range(m):
        rev |= ((codes >> j) & 1) << (m - 1 - j)
    return rev


def assignment_index(a: State) -> int:
    idx = 0
    for j in range(a.n):
        idx = (idx << 1) | ((a.bits >> j) & 1)
    return idx


def index_assignment(idx: int, m: int) -> State:
    return State.from_values((idx >> (m - 1 - j)) & 1 for j in range(m))


def upward_closure(mask: np.ndarray, m: int) -> np.ndarray:
    """closure[y] is True iff mask[x] holds for some x that is a submask of y."""
    closure = mask.astype(bool).copy()
    codes = np.arange(1 << m, dtype=np.int64)
    for p in range(m):
        low = codes[(codes >> p) & 1 == 0]
        closure[low | (1 << p)] |= closure[low]
    return closure


def dependent_positions(values: np.ndarray, m: int) -> List[int]:
    """Bit positions p such that flipping bit p changes `values` somewhere."""
    codes = np.arange(1 << m, dtype=np.int64)
    positions = []
    for p in range(m):
        low = codes[(codes >> p) & 1 == 0]
        if np.any(values[low] != values[low | (1 << p)]):
            positions.append(p)
    return positions


@dataclass(frozen=True)
class LocalFunction:
    """
    A Boolean function of `arity` inputs, either a simple threshold or an explicit truth table.

    Attributes:
        arity: number of inputs m (size of the closed neighbourhood it reads).
        kind: 'threshold' or 'table'.
        k: threshold value; output is 1 iff at least k inputs are 1.
        bits: truth table as a string of 2^m characters '0'/'1'.
    """
    arity: int
    kind: str
    k: Optional[int] = None
    bits: Optional[str] = None

    def __post_init__(self):
        if self.arity < 1:
            raise SchemaError(f"arity must be positive, got {self.arity}")
        if self.kind == THRESHOLD:
            if self.k is None or self.k < 0:
                raise SchemaError(f"threshold k must be a non-negative integer, got {self.k}")
        elif self.kind == TABLE:
            if self.bits is None or len(self.bits) != 1 << self.arity:
                got = None if self.bits is None else len(self.bits)
                raise SchemaError(f"table length must be {1 << self.arity} for arity {self.arity}, got {got}")
            if any(c not in "01" for c in self.bits):
                raise SchemaError("table bits must be '0'/'1' characters")
        else:
            raise SchemaError(f"unknown function type {self.kind!r}")

    @classmethod
    def threshold(cls, arity: int, k: int) -> "LocalFunction":
        return cls(arity=arity, kind=THRESHOLD, k=k)

    @classmethod
    def table(cls, bits: str) -> "LocalFunction":
        size = len(bits)
        arity = size.bit_length() - 1
        if size < 2 or 1 << arity != size:
            raise SchemaError(f"table length must be a power of two >= 2, got {size}")
        return cls(arity=arity, kind=TABLE, bits=bits)

    @classmethod
    def from_lookup(cls, lookup: np.ndarray) -> "LocalFunction":
        return cls.table("".join("1" if v else "0" for v in lookup.tolist()))

    @cached_property
    def lookup(self) -> np.ndarray:
        """uint8 array of length 2^m indexed by table index."""
        if self.kind == TABLE:
            return np.frombuffer(self.bits.encode("ascii"), dtype=np.uint8) - ord("0")
        codes = np.arange(1 << self.arity, dtype=np.int64)
        popcount = np.zeros_like(codes)
        for p in range(self.arity):
            popcount += (codes >> p) & 1
        return (popcount >= self.k).astype(np.uint8)

    def __call__(self, a: State) -> int:
        return evaluate(self, a)


def evaluate(f: LocalFunction, a: State) -> int:
    """Value of f on the assignment a (length m, a_j = state of the j-th smallest neighbourhood vertex)."""
    if a.n != f.arity:
        raise DimensionMismatchError(f"function of arity {f.arity} applied to {a.n} inputs")
    if f.kind == THRESHOLD:
        return int(a.weight >= f.k)
    return int(f.bits[assignment_index(a)])


def tabulate(f: LocalFunction) -> LocalFunction:
    """Truth-table form of f (a table function is returned unchanged)."""
    if f.kind == TABLE:
        return f
    return LocalFunction.from_lookup(f.lookup)


def support(f: LocalFunction) -> List[int]:
    """0-based argument positions f actually depends on."""
    return sorted(f.arity - 1 - p for p in dependent_positions(f.lookup, f.arity))


@dataclass(frozen=True)
class MonotonicityVerdict:
    monotone: bool
    witness: Optional[Tuple[State, State]] = None


def is_monotone_total(f: LocalFunction) -> MonotonicityVerdict:
    """
    Check monotonicity on covering pairs.

    The witness is the first violating pair when assignments are scanned by
    increasing table index and, per assignment, bit positions are flipped in
    ascending order.
    """
    if f.kind == THRESHOLD:
        return MonotonicityVerdict(monotone=True)
    m = f.arity
    values = f.lookup
    codes = np.arange(1 << m, dtype=np.int64)
    best: Optional[Tuple[int, int]] = None
    for p in range(m):
        low = codes[(codes >> p) & 1 == 0]
        bad = low[(values[low] == 1) & (values[low | (1 << p)] == 0)]
        if bad.size and (best is None or (int(bad[0]), p) < best):
            best = (int(bad[0]), p)
    if best is None:
        return MonotonicityVerdict(monotone=True)
    idx, p = best
    return MonotonicityVerdict(monotone=False, witness=(index_assignment(idx, m), index_assignment(idx | (1 << p), m)))


@dataclass
class PartialFunction:
    """
    A Boolean function defined on a subset A of F_2^n.

    Attributes:
        n: arity.
        entries: assignment -> value (0/1); the key set is the domain A.
    """
    n: int
    entries: Dict[State, int] = field(default_factory=dict)

    def __post_init__(self):
        for X, v in self.entries.items():
            if X.n != self.n:
                raise DimensionMismatchError(f"domain state {X} has length {X.n}, expected {self.n}")
            if v not in (0, 1):
                raise SchemaError(f"value for {X} must be 0 or 1, got {v!r}")

    @classmethod
    def from_array(cls, values: np.ndarray, n: int) -> "PartialFunction":
        """Inverse of values_by_bits: entries -1 are outside the domain."""
        return cls(n, {State(n, int(b)): int(values[b]) for b in np.flatnonzero(values >= 0)})

    @property
    def domain(self) -> List[State]:
        return sorted(self.entries, key=lambda X: X.bits)

    def values_by_bits(self) -> np.ndarray:
        """int8 array over packed states: recorded value, or -1 outside the domain."""
        values = np.full(1 << self.n, -1, dtype=np.int8)
        for X, v in self.entries.items():
            values[X.bits] = v
        return values


def _partial_witness(values: np.ndarray, n: int) -> Optional[Tuple[State, State]]:
    above_one = upward_closure(values == 1, n)
    bad = np.flatnonzero((values == 0) & above_one)
    if not bad.size:
        return None
    y = int(bad[0])
    ones = np.flatnonzero(values == 1)
    below = ones[(ones & ~y) == 0]
    return State(n, int(below[0])), State(n, y)


def is_monotone_partial(g: PartialFunction, cap: int = None) -> MonotonicityVerdict:
    """Monotonicity restricted to comparable pairs inside the domain."""
    limit = n_cap(cap)
    if g.n > limit:
        raise CapExceededError(f"n={g.n} exceeds the configured cap {limit}")
    witness = _partial_witness(g.values_by_bits(), g.n)
    if witness is None:
        return MonotonicityVerdict(monotone=True)
    return MonotonicityVerdict(monotone=False, witness=witness)


def monotone_extend(g: PartialFunction, cap: int = None) -> LocalFunction:
    """
    Extend a monotone partial function to a monotone total function.

    States outside the domain are visited by increasing weight, ties by packed
    index; each receives the largest value already assigned strictly below it
    (0 when nothing lies below).
    """
    verdict = is_monotone_partial(g, cap)
    if not verdict.monotone:
        raise NonMonotoneError("partial function is not monotone on its domain", witness=verdict.witness)
    n = g.n
    values = g.values_by_bits()
    codes = np.arange(1 << n, dtype=np.int64)
    weight = np.zeros_like(codes)
    for p in range(n):
        weight += (codes >> p) & 1
    for w in range(n + 1):
        todo = codes[(weight == w) & (values == -1)]
        if not todo.size:
            continue
        best = np.zeros(todo.size, dtype=np.int8)
        for p in range(n):
            has = (todo >> p) & 1 == 1
            below = values[todo[has] & ~(1 << p)]
            best[has] = np.maximum(best[has], below)
        values[todo] = best
    logger.debug("monotone_extend: n=%d domain=%d filled=%d", n, len(g.entries), (1 << n) - len(g.entries))
    table = np.empty(1 << n, dtype=np.uint8)
    table[reversal_permutation(n)] = values
    return LocalFunction.from_lookup(table)


def random_monotone_table(m: int, rng: np.random.Generator, max_generators: int = 3) -> LocalFunction:
    """Monotone table whose 1-set is the up-set generated by a few random assignments."""
    generators = rng.integers(0, 1 << m, size=int(rng.integers(0, max_generators + 1)))
    mask = np.zeros(1 << m, dtype=bool)
    mask[generators] = True
    return LocalFunction.from_lookup(upward_closure(mask, m).astype(np.uint8))
