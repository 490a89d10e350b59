"""
Exhaustive phase spaces and the global analyses built on them.

A PhaseSpace stores the successor of every packed state, the in-degree
array and the limit cycles. Cycles are rotated to start at their smallest
packed state and listed by that first state, so exports are reproducible.
"""
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Tuple, Union
import json
import logging

import networkx as nx
import numpy as np
import pandas as pd

from models.errors import AlphaClassOverflowError, TheoremViolation
from models.lattice import S0, S1, State, binom, comparable, leq, sperner_bound
from models.schedules import (
    ONE,
    ZERO,
    UpdateSchedule,
    all_schedules,
    alpha_class,
    in_theta,
    pattern_length,
    tau_shift,
)
from models.system import (
    Driver,
    SystemDescription,
    all_codes,
    apply_vertices,
    rotate_cycle,
    sds_step,
    successor_array,
    trajectory,
)

logger = logging.getLogger(__name__)

GOE = "GOE"
REACHES_FIXED_POINT = "REACHES_FIXED_POINT"
FIXED_POINT = "FIXED_POINT"
NONTRIVIAL_PERIODIC = "NONTRIVIAL_PERIODIC"
TRANSIENT_TO_CYCLE = "TRANSIENT_TO_CYCLE"

# Verdicts a monotone system must give for states in an S-pattern orbit.
GOE_OR_FIXED = frozenset({GOE, REACHES_FIXED_POINT, FIXED_POINT})


@dataclass
class PhaseSpace:
    """
    Functional graph of one update map over all 2^n states.

    Attributes:
        n: number of vertices.
        driver: the map that was tabulated.
        successor: successor[x] is the packed image of packed state x.
        in_degree: number of preimages per packed state.
        cycles: limit cycles as packed states, canonically rotated.
        component_of: index into `cycles` of the cycle each state ends in.
    """
    n: int
    driver: Driver
    successor: np.ndarray
    in_degree: np.ndarray
    cycles: List[List[int]] = field(default_factory=list)
    component_of: np.ndarray = None

    @property
    def size(self) -> int:
        return 1 << self.n

    def state(self, bits: int) -> State:
        return State(self.n, int(bits))

    def image(self, X: State) -> State:
        return self.state(self.successor[X.bits])

    def cycle_lengths(self) -> List[int]:
        return [len(c) for c in self.cycles]

    def periodic_mask(self) -> np.ndarray:
        mask = np.zeros(self.size, dtype=bool)
        for cycle in self.cycles:
            mask[cycle] = True
        return mask

    def goe_or_fixed_mask(self) -> np.ndarray:
        """True where a state is GoE or its orbit ends in a fixed point."""
        settles = np.array([len(c) == 1 for c in self.cycles], dtype=bool)
        return (self.in_degree == 0) | settles[self.component_of]

    def verdict(self, bits: int) -> str:
        cycle = self.cycles[self.component_of[bits]]
        if self.successor[bits] == bits:
            return FIXED_POINT
        if bits in cycle:
            return NONTRIVIAL_PERIODIC
        if len(cycle) == 1:
            return REACHES_FIXED_POINT
        if self.in_degree[bits] == 0:
            return GOE
        return TRANSIENT_TO_CYCLE

    def to_dataframe(self) -> pd.DataFrame:
        periodic = self.periodic_mask()
        rows = []
        for b in range(self.size):
            rows.append({
                "state": str(self.state(b)),
                "successor": str(self.state(self.successor[b])),
                "in_degree": int(self.in_degree[b]),
                "goe": bool(self.in_degree[b] == 0),
                "periodic": bool(periodic[b]),
                "cycle": int(self.component_of[b]),
                "verdict": self.verdict(b),
            })
        return pd.DataFrame(rows)

    def to_networkx(self) -> nx.DiGraph:
        """One node per state string; cycle nodes and edges carry `periodic=True`."""
        periodic = self.periodic_mask()
        G = nx.DiGraph(driver=str(self.driver))
        for b in range(self.size):
            G.add_node(str(self.state(b)), goe=bool(self.in_degree[b] == 0),
                       periodic=bool(periodic[b]), cycle=int(self.component_of[b]))
        for b in range(self.size):
            G.add_edge(str(self.state(b)), str(self.state(self.successor[b])), periodic=bool(periodic[b]))
        return G

    def to_dict(self) -> Dict[str, object]:
        return {
            "n": self.n,
            "driver": str(self.driver),
            "successor": {str(self.state(b)): str(self.state(self.successor[b])) for b in range(self.size)},
            "goe": [str(X) for X in goe_states(self)],
            "fixed_points": [str(X) for X in fixed_points(self)],
            "cycles": [[str(X) for X in cycle] for cycle in limit_cycles(self)],
        }

    def to_json(self, indent: Optional[int] = 2) -> str:
        return json.dumps(self.to_dict(), indent=indent)

    def to_dot(self) -> str:
        G = self.to_networkx()
        for _, data in G.nodes(data=True):
            if data["periodic"]:
                data["color"] = "red"
                data["style"] = "bold"
            elif data["goe"]:
                data["shape"] = "box"
        for _, _, data in G.edges(data=True):
            if data["periodic"]:
                data["color"] = "red"
                data["style"] = "bold"
        return nx.nx_pydot.to_pydot(G).to_string()


def _find_cycles(successor: np.ndarray) -> Tuple[List[List[int]], np.ndarray]:
    succ = successor.tolist()
    size = len(succ)
    component = [-1] * size
    visiting = [-1] * size
    cycles: List[List[int]] = []
    for start in range(size):
        if component[start] != -1:
            continue
        path = []
        x = start
        while component[x] == -1 and visiting[x] != start:
            visiting[x] = start
            path.append(x)
            x = succ[x]
        if component[x] == -1:
            comp = len(cycles)
            cycles.append(path[path.index(x):])
        else:
            comp = component[x]
        for y in path:
            component[y] = comp

    canonical = sorted(range(len(cycles)), key=lambda c: min(cycles[c]))
    remap = np.empty(len(cycles), dtype=np.int64)
    remap[canonical] = np.arange(len(cycles))
    ordered = [rotate_cycle(cycles[c]) for c in canonical]
    return ordered, remap[np.asarray(component, dtype=np.int64)]


def build(sys: SystemDescription, driver: Driver, cap: int = None) -> PhaseSpace:
    """Tabulate the update map on all 2^n states and extract its limit cycles."""
    successor = successor_array(sys, driver, cap)
    in_degree = np.bincount(successor, minlength=1 << sys.n)
    cycles, component_of = _find_cycles(successor)
    logger.debug("phase space %s n=%d: %d cycles, %d GoE states",
                 driver, sys.n, len(cycles), int(np.count_nonzero(in_degree == 0)))
    return PhaseSpace(n=sys.n, driver=driver, successor=successor, in_degree=in_degree,
                      cycles=cycles, component_of=component_of)


def goe_states(ps: PhaseSpace) -> List[State]:
    return [ps.state(b) for b in np.flatnonzero(ps.in_degree == 0)]


def fixed_points(ps: PhaseSpace) -> List[State]:
    return [ps.state(c[0]) for c in ps.cycles if len(c) == 1]


def limit_cycles(ps: PhaseSpace) -> List[List[State]]:
    return [[ps.state(b) for b in c] for c in ps.cycles]


@dataclass(frozen=True)
class LatticeExtrema:
    min_fp: State
    max_fp: State


def _driver_for(pi: Optional[Union[UpdateSchedule, Driver]]) -> Driver:
    if isinstance(pi, Driver):
        return pi
    return Driver.pds() if pi is None else Driver.sds(pi)


def lattice_extrema(sys: SystemDescription, pi: Optional[Union[UpdateSchedule, Driver]]) -> LatticeExtrema:
    """
    Least and greatest fixed points, reached by iterating from all-zeros and all-ones.

    Passing pi=None uses the parallel map instead of F_pi.
    """
    sys.require_monotone()
    driver = _driver_for(pi)
    ends = []
    for start in (State.zeros(sys.n), State.ones(sys.n)):
        traj = trajectory(sys, driver, start)
        if len(traj.cycle) != 1:
            raise TheoremViolation(f"{start} does not settle on a fixed point under {driver}")
        ends.append(traj.cycle[0])
    return LatticeExtrema(min_fp=ends[0], max_fp=ends[1])


@dataclass(frozen=True)
class Certificate:
    """sigma in the alpha class of pi with sigma^-1 . X = S_{kind,k}."""
    kind: str
    k: int
    sigma: UpdateSchedule


@dataclass(frozen=True)
class Classification:
    """
    Verdict for one state under F_pi.

    Attributes:
        state: the classified state.
        verdict: one of the verdict constants of this module.
        in_pattern_orbit: whether X lies in some [S_{0,k}]_pi or [S_{1,k}]_pi;
            None when the alpha class was too large to enumerate.
        certificate: the membership witness, when one was found.
        is_goe: whether X has no preimage; None when the verdict was settled
            without scanning for one.
        reached_fixed_point: the fixed point X ends in, if any.
        shortcut: which comparability argument settled `is_goe` or the
            fixed-point outcome without a phase-space scan.
    """
    state: State
    verdict: str
    in_pattern_orbit: Optional[bool]
    certificate: Optional[Certificate] = None
    is_goe: Optional[bool] = False
    reached_fixed_point: Optional[State] = None
    shortcut: Optional[str] = None

    def to_dict(self) -> Dict[str, object]:
        cert = None
        if self.certificate is not None:
            cert = {"kind": self.certificate.kind, "k": self.certificate.k, "sigma": str(self.certificate.sigma)}
        return {
            "state": str(self.state),
            "verdict": self.verdict,
            "in_pattern_orbit": self.in_pattern_orbit,
            "certificate": cert,
            "is_goe": self.is_goe,
            "reached_fixed_point": None if self.reached_fixed_point is None else str(self.reached_fixed_point),
            "shortcut": self.shortcut,
        }


def pattern_certificates(sys: SystemDescription, pi: UpdateSchedule, X: State,
                         alpha_cap: int = None) -> Dict[str, Certificate]:
    """Per kind (S0/S1), the first alpha-class member that sends X onto an S-pattern."""
    members = alpha_class(sys.graph, pi, alpha_cap).members
    found: Dict[str, Certificate] = {}
    for kind, pattern in ((S0, ZERO), (S1, ONE)):
        for sigma in members:
            if in_theta(X, pattern, sigma):
                found[kind] = Certificate(kind=kind, k=pattern_length(X, pattern), sigma=sigma)
                break
    return found


def _comparability_shortcut(certs: Dict[str, Certificate], X: State, image: State) -> Tuple[Optional[str], Optional[str]]:
    """(shortcut name, implied outcome) where the outcome is 'goe' or 'fixed'."""
    if not certs or image == X:
        return None, None
    if not comparable(X, image):
        return "incomparable image", "goe"
    if S0 in certs and leq(image, X):
        return "image below S0-pattern state", "goe"
    if S1 in certs and leq(X, image):
        return "image above S1-pattern state", "goe"
    return "monotone chain", "fixed"


def classify_state(sys: SystemDescription, pi: UpdateSchedule, X: State,
                   cap: int = None, alpha_cap: int = None, scan_goe: bool = False) -> Classification:
    """
    Classify X under F_pi and check the orbit guarantee.

    States in an S-pattern orbit of a monotone system must be GoE, fixed, or
    reach a fixed point; anything else raises TheoremViolation. When the alpha
    class overflows, `in_pattern_orbit` is None and no guarantee is checked.

    The 2^n successor table is only built when the verdict depends on whether
    X has a preimage, or when `scan_goe` asks for it; otherwise a transient X
    that reaches a fixed point gets `is_goe=None`.
    """
    sys.require_monotone()
    try:
        certs = pattern_certificates(sys, pi, X, alpha_cap)
        in_orbit: Optional[bool] = bool(certs)
    except AlphaClassOverflowError as exc:
        logger.warning("classify %s: %s; falling back to the phase-space verdict", X, exc)
        certs, in_orbit = {}, None
    certificate = certs.get(S0) or certs.get(S1)

    image = sds_step(sys, pi, X)
    shortcut, outcome = _comparability_shortcut(certs, X, image)

    traj = trajectory(sys, Driver.sds(pi), X)
    reached = traj.cycle[0] if len(traj.cycle) == 1 else None
    if not traj.transient:
        verdict = FIXED_POINT if reached is not None else NONTRIVIAL_PERIODIC
        is_goe: Optional[bool] = False
    else:
        is_goe = True if outcome == "goe" else None
        if is_goe is None and (reached is None or scan_goe):
            successor = successor_array(sys, Driver.sds(pi), cap)
            is_goe = not bool(np.any(successor == X.bits))
        if reached is not None:
            verdict = REACHES_FIXED_POINT
        else:
            verdict = GOE if is_goe else TRANSIENT_TO_CYCLE

    if outcome == "goe" and not traj.transient:
        raise TheoremViolation(f"{X} is periodic under {pi} but its image certifies it as GoE")
    if outcome == "fixed" and reached is None:
        raise TheoremViolation(f"{X} lies below/above its image under {pi} but does not reach a fixed point")
    if in_orbit and verdict not in GOE_OR_FIXED:
        raise TheoremViolation(f"{X} is in an S-pattern orbit under {pi} but classified {verdict}")
    return Classification(state=X, verdict=verdict, in_pattern_orbit=in_orbit, certificate=certificate,
                          is_goe=is_goe, reached_fixed_point=reached, shortcut=shortcut)


def shift_homomorphism_check(sys: SystemDescription, pi: UpdateSchedule, k: int) -> bool:
    """h = F_{pi_k} o ... o F_{pi_1} satisfies h(F_pi(X)) = F_{tau^k pi}(h(X)) for all X."""
    states = all_codes(sys.n)
    succ = apply_vertices(sys, pi.perm, states)
    h = apply_vertices(sys, pi.perm[:k], states)
    shifted = apply_vertices(sys, tau_shift(pi, k).perm, states)
    return bool(np.array_equal(h[succ], shifted[h]))


def cycle_equivalence_check(sys: SystemDescription, pi: UpdateSchedule, k: int, cap: int = None) -> bool:
    """Cycle-length multisets agree and h maps the periodic states of F_pi bijectively onto those of the shift."""
    ps = build(sys, Driver.sds(pi), cap)
    shifted = build(sys, Driver.sds(tau_shift(pi, k)), cap)
    if sorted(ps.cycle_lengths()) != sorted(shifted.cycle_lengths()):
        return False
    source = np.flatnonzero(ps.periodic_mask())
    target = np.flatnonzero(shifted.periodic_mask())
    h = apply_vertices(sys, pi.perm[:k], source)
    return len(set(h.tolist())) == source.size and set(h.tolist()) == set(target.tolist())


@dataclass(frozen=True)
class CycleAudit:
    max_len: int
    bound: int
    strict: bool


def max_cycle_audit(sys: SystemDescription, pi: Optional[Union[UpdateSchedule, Driver]], cap: int = None) -> CycleAudit:
    """
    Longest limit cycle against C(n, floor(n/2)).

    `strict` is reported, not enforced; parallel maps may reach the bound.
    For n = 1 the bound is 1 and strictness is reported as True.
    """
    sys.require_monotone()
    ps = build(sys, _driver_for(pi), cap)
    max_len = max(ps.cycle_lengths())
    bound = sperner_bound(sys.n)
    strict = max_len < bound if sys.n > 1 else True
    return CycleAudit(max_len=max_len, bound=bound, strict=strict)


def goe_or_fixed_fraction(sys: SystemDescription, cap: int = None) -> Fraction:
    """Share of (X, pi) pairs where X is GoE or reaches a fixed point under F_pi."""
    hits = 0
    total = 0
    for pi in all_schedules(sys.n):
        ps = build(sys, Driver.sds(pi), cap)
        hits += int(np.count_nonzero(ps.goe_or_fixed_mask()))
        total += ps.size
    return Fraction(hits, total)


def probability_lower_bound(n: int) -> Fraction:
    return Fraction(n, 2 ** (n - 1))


def schedule_fraction(sys: SystemDescription, X: State, cap: int = None) -> Fraction:
    """Share of schedules under which X is GoE or reaches a fixed point."""
    hits = 0
    total = 0
    for pi in all_schedules(sys.n):
        ps = build(sys, Driver.sds(pi), cap)
        hits += int(ps.goe_or_fixed_mask()[X.bits])
        total += 1
    return Fraction(hits, total)


def schedule_lower_bound(X: State) -> Fraction:
    """2 / C(n, #zeros) for states with both values present, 1 for all-zeros and all-ones."""
    k = X.zero_count
    if k in (0, X.n):
        return Fraction(1)
    return Fraction(2, binom(X.n, k))


def state_fraction(sys: SystemDescription, pi: UpdateSchedule, cap: int = None) -> Fraction:
    """Share of states that are GoE or reach a fixed point under F_pi."""
    ps = build(sys, Driver.sds(pi), cap)
    return Fraction(int(np.count_nonzero(ps.goe_or_fixed_mask())), ps.size)


def bipartite_lower_bound(m: int, n: int) -> Fraction:
    return Fraction(2 ** (m + 1) + 2 ** (n + 1) - 4, 2 ** (m + n))
