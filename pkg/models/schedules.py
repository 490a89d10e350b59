"""
Permutation algebra on update schedules.

A schedule and a permutation are the same object in one-line form:
perm[i-1] = g(i). The group S_n acts on states by (g.X)_i = x_{g^-1(i)} and on
schedules by (g.pi)_i = pi_{g^-1(i)}; both are left actions.
"""
from collections import deque
from dataclasses import dataclass
from itertools import permutations, product
from typing import TYPE_CHECKING, Iterable, Iterator, List, Optional, Set, Tuple
import logging

from scipy.special import factorial

from models.config import alpha_cap
from models.errors import (
    AlphaClassOverflowError,
    CapExceededError,
    DimensionMismatchError,
    InvalidScheduleError,
    InvalidStateError,
)
from models.lattice import S0, S1, State, comparable, s_state

if TYPE_CHECKING:
    from models.system import Graph

logger = logging.getLogger(__name__)

ZERO = "zero"
ONE = "one"


@dataclass(frozen=True)
class UpdateSchedule:
    """An update order pi_1 pi_2 ... pi_n, a permutation of the vertices 1..n."""
    perm: Tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "perm", tuple(int(v) for v in self.perm))
        if sorted(self.perm) != list(range(1, len(self.perm) + 1)):
            raise InvalidScheduleError(f"{list(self.perm)} is not a permutation of 1..{len(self.perm)}")

    @classmethod
    def parse(cls, text: str) -> "UpdateSchedule":
        """Comma-separated vertex ids ("2,4,1,3"); a bare digit string ("2413") is read one vertex per digit."""
        text = text.strip()
        try:
            if "," in text:
                return cls(tuple(int(p) for p in text.split(",") if p.strip()))
            return cls(tuple(int(c) for c in text))
        except ValueError:
            raise InvalidScheduleError(f"cannot parse schedule {text!r}")

    @classmethod
    def identity(cls, n: int) -> "UpdateSchedule":
        return cls(tuple(range(1, n + 1)))

    @property
    def n(self) -> int:
        return len(self.perm)

    def __call__(self, i: int) -> int:
        return self.perm[i - 1]

    def __str__(self) -> str:
        return ",".join(str(v) for v in self.perm)

    def inverse(self) -> "UpdateSchedule":
        inv = [0] * self.n
        for i, v in enumerate(self.perm, start=1):
            inv[v - 1] = i
        return UpdateSchedule(tuple(inv))

    def __mul__(self, other: "UpdateSchedule") -> "UpdateSchedule":
        """Composition (g*h)(i) = g(h(i))."""
        _check_sizes(self.n, other.n)
        return UpdateSchedule(tuple(self.perm[h - 1] for h in other.perm))


def _check_sizes(a: int, b: int):
    if a != b:
        raise DimensionMismatchError(f"size mismatch: {a} vs {b}")


def all_schedules(n: int) -> Iterator[UpdateSchedule]:
    """All n! schedules in lexicographic order."""
    for perm in permutations(range(1, n + 1)):
        yield UpdateSchedule(perm)


def act_state(g: UpdateSchedule, X: State) -> State:
    _check_sizes(g.n, X.n)
    bits = 0
    for j, target in enumerate(g.perm):
        if (X.bits >> j) & 1:
            bits |= 1 << (target - 1)
    return State(X.n, bits)


def act_schedule(g: UpdateSchedule, pi: UpdateSchedule) -> UpdateSchedule:
    _check_sizes(g.n, pi.n)
    out = [0] * pi.n
    for j, target in enumerate(g.perm):
        out[target - 1] = pi.perm[j]
    return UpdateSchedule(tuple(out))


def tau(n: int) -> UpdateSchedule:
    """The cycle (n n-1 ... 1): 1 -> n and j -> j-1."""
    return UpdateSchedule((n,) + tuple(range(1, n)))


def tau_shift(pi: UpdateSchedule, k: int) -> UpdateSchedule:
    """pi_{k+1} ... pi_n pi_1 ... pi_k, k taken mod n."""
    k %= pi.n
    return UpdateSchedule(pi.perm[k:] + pi.perm[:k])


@dataclass(frozen=True)
class AlphaClass:
    representative: UpdateSchedule
    members: Tuple[UpdateSchedule, ...]

    def __len__(self) -> int:
        return len(self.members)

    def __contains__(self, pi: UpdateSchedule) -> bool:
        return pi in set(self.members)


def alpha_class(G: "Graph", pi: UpdateSchedule, cap: int = None) -> AlphaClass:
    """
    Closure of pi under swapping neighbouring entries that are not adjacent in G.

    All schedules in the class induce the same sequential map.
    """
    _check_sizes(G.n, pi.n)
    limit = alpha_cap(cap)
    seen: Set[Tuple[int, ...]] = {pi.perm}
    queue = deque([pi.perm])
    while queue:
        perm = queue.popleft()
        for k in range(len(perm) - 1):
            a, b = perm[k], perm[k + 1]
            if G.adjacent(a, b):
                continue
            swapped = perm[:k] + (b, a) + perm[k + 2:]
            if swapped in seen:
                continue
            seen.add(swapped)
            if len(seen) > limit:
                raise AlphaClassOverflowError(f"alpha class of {pi} exceeds the cap of {limit} schedules")
            queue.append(swapped)
    logger.debug("alpha class of %s has %d members", pi, len(seen))
    return AlphaClass(representative=pi, members=tuple(UpdateSchedule(p) for p in sorted(seen)))


def orbit_S(G: "Graph", pi: UpdateSchedule, kind: str, k: int, cap: int = None) -> Set[State]:
    """[S_{kind,k}]_pi: images of S_{kind,k} under every schedule of the alpha class of pi."""
    base = s_state(kind, k, pi.n)
    return {act_state(sigma, base) for sigma in alpha_class(G, pi, cap).members}


def pattern_orbit(G: "Graph", pi: UpdateSchedule, cap: int = None) -> Set[State]:
    """Union of [S_{0,k}]_pi and [S_{1,k}]_pi over every k in 0..n."""
    members = alpha_class(G, pi, cap).members
    out: Set[State] = set()
    for kind in (S0, S1):
        for k in range(pi.n + 1):
            base = s_state(kind, k, pi.n)
            out.update(act_state(sigma, base) for sigma in members)
    return out


def pattern_length(X: State, kind: str) -> int:
    """k such that schedules in theta_kind(X) send X to S_{kind,k}."""
    return X.zero_count if kind == ZERO else X.weight


def in_theta(X: State, kind: str, pi: UpdateSchedule) -> bool:
    """True iff the first k scheduled vertices carry the pattern value (0 for kind zero, 1 for kind one)."""
    _check_sizes(X.n, pi.n)
    value = 0 if kind == ZERO else 1
    k = pattern_length(X, kind)
    return all(X[v] == value for v in pi.perm[:k])


@dataclass(frozen=True)
class ThetaSet:
    """
    Schedules whose inverse sends X to an S-pattern of the given kind.

    `members` is None unless materialisation was requested.
    """
    X: State
    kind: str
    size: int
    members: Optional[Tuple[UpdateSchedule, ...]] = None


def theta(X: State, kind: str = ZERO, materialize: bool = False, cap: int = None) -> ThetaSet:
    if kind not in (ZERO, ONE):
        raise InvalidStateError(f"theta kind must be {ZERO!r} or {ONE!r}, got {kind!r}")
    k = pattern_length(X, kind)
    size = int(factorial(k, exact=True)) * int(factorial(X.n - k, exact=True))
    if not materialize:
        return ThetaSet(X=X, kind=kind, size=size)
    limit = alpha_cap(cap)
    if size > limit:
        raise CapExceededError(f"theta set of {X} has {size} schedules, above the cap of {limit}")
    value = 0 if kind == ZERO else 1
    head = [v for v in range(1, X.n + 1) if X[v] == value]
    tail = [v for v in range(1, X.n + 1) if X[v] != value]
    members = tuple(UpdateSchedule(a + b) for a, b in product(permutations(head), permutations(tail)))
    return ThetaSet(X=X, kind=kind, size=size, members=members)


def theta_disjointness_check(X: State, Y: State, cap: int = None) -> bool:
    """True iff theta_0(X) and theta_0(Y) share no schedule; X and Y must be incomparable."""
    if comparable(X, Y):
        raise InvalidStateError(f"{X} and {Y} are comparable")
    left = set(theta(X, ZERO, materialize=True, cap=cap).members)
    right = set(theta(Y, ZERO, materialize=True, cap=cap).members)
    return not (left & right)


def theta_union_size(A: Iterable[State], kind: str = ZERO) -> int:
    """Sum of |theta_kind(X)| over A; at most n! whenever A is an antichain."""
    return sum(theta(X, kind).size for X in A)


def theta_schedules(X: State) -> List[UpdateSchedule]:
    """theta_0(X) united with theta_1(X), lexicographic."""
    zero = theta(X, ZERO, materialize=True).members
    one = theta(X, ONE, materialize=True).members
    return sorted(set(zero) | set(one), key=lambda s: s.perm)
