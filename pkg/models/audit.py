from dataclasses import dataclass, field
from itertools import chain, product
from typing import Callable, Dict, Iterator, List, Optional, Tuple
import logging
import time

import numpy as np
import pandas as pd
from scipy.special import factorial

from models.config import DEFAULT_MAX_N_AUDIT
from models.lattice import State, all_states, enumerate_antichains, is_antichain, leq, lym_report, sperner_bound
from models.local_functions import (
    PartialFunction,
    assignment_index,
    is_monotone_partial,
    is_monotone_total,
    monotone_extend,
    random_monotone_table,
    reversal_permutation,
)
from models.phase_space import (
    bipartite_lower_bound,
    build,
    cycle_equivalence_check,
    fixed_points,
    goe_or_fixed_fraction,
    lattice_extrema,
    limit_cycles,
    max_cycle_audit,
    probability_lower_bound,
    shift_homomorphism_check,
    state_fraction,
)
from models.schedules import (
    ONE,
    ZERO,
    UpdateSchedule,
    all_schedules,
    in_theta,
    pattern_orbit,
    theta,
    theta_schedules,
    theta_union_size,
)
from models.sweeps import cycling_parallel_systems, random_monotone_systems, threshold_systems, threshold_sweep
from models.system import Driver, Graph, SystemDescription, fixed_points_direct, successor_array
from models.transforms import derive_sequentialization, goles_map, goles_pds, parallelize

CHECKS = (
    "garden_of_eden_or_fixed_point",
    "antichain_cycles",
    "cycle_length_bound",
    "nonsequentializable_witness",
    "lym_sperner",
    "fixed_point_lattice",
    "probability_bound",
    "bipartite_bound",
    "shift_homomorphism",
    "round_trips",
    "periodic_schedule_exclusion",
)

# Examples kept per check; the violation count is always exact.
MAX_EXAMPLES = 5
# Antichains are enumerated up to this n; the theta-size check goes up to THETA_MAX_N.
ANTICHAIN_MAX_N = 4
THETA_MAX_N = 6
# Exhaustive partial functions number 3^(2^n).
PARTIAL_MAX_N = 3


@dataclass
class _Tally:
    checked: int = 0
    violations: int = 0
    examples: List[str] = field(default_factory=list)

    def record(self, ok: bool, example: Callable[[], str]):
        self.checked += 1
        if not ok:
            self.violations += 1
            if len(self.examples) < MAX_EXAMPLES:
                self.examples.append(example())


class TheoremAudit:
    """
    Exhaustive and randomized sweeps that verify the structural theorems on small systems.

    Every check walks a family of systems, counts the instances it examined and
    the ones that broke the property, and keeps a few readable examples. `run`
    executes the selected checks in order and reports an overall status.
    """

    def __init__(self, max_n: int = DEFAULT_MAX_N_AUDIT, samples: int = 1000, seed: int = 0,
                 random_n: int = 4, checks: Optional[List[str]] = None, logger: Optional[logging.Logger] = None):
        """
        Args:
            max_n: largest vertex count of the exhaustive threshold sweep
            samples: number of random monotone systems (and random partial functions) to draw
            seed: seed of the numpy Generator behind every randomized check
            random_n: vertex count of the random monotone systems
            checks: subset of CHECKS to run, in the given order (default: all)
            logger: optional logger instance
        """
        unknown = [c for c in (checks or []) if c not in CHECKS]
        if unknown:
            raise ValueError(f"unknown audit checks: {unknown}")
        if max_n < 2:
            raise ValueError(f"max_n must be at least 2, got {max_n}")
        self.max_n = max_n
        self.samples = samples
        self.seed = seed
        self.random_n = random_n
        self.checks = list(checks) if checks else list(CHECKS)
        self._stop = False

        self.logger = logger or logging.getLogger(__name__)
        if not self.logger.handlers:
            handler = logging.StreamHandler()
            formatter = logging.Formatter("%(asctime)s %(levelname)s %(name)s: %(message)s")
            handler.setFormatter(formatter)
            self.logger.addHandler(handler)
        self.logger.setLevel(logging.INFO)

        self.history: List[Dict] = []
        # Callbacks invoked after each check with signature cb(entry_dict)
        self.check_callbacks: List = []

    def add_check_callback(self, cb):
        self.check_callbacks.append(cb)

    def stop(self):
        """Skip the remaining checks once the current one finishes."""
        self._stop = True

    def run(self) -> Dict[str, object]:
        start_time = time.time()
        self.history.clear()
        for name in self.checks:
            if self._stop:
                self.logger.info("TheoremAudit: stop requested, skipping %s and later checks", name)
                return {"status": "stopped", "checks": self.history, "time": time.time() - start_time}
            self.run_check(name)
        passed = all(entry["passed"] for entry in self.history)
        return {
            "status": "passed" if passed else "failed",
            "checks": self.history,
            "time": time.time() - start_time,
        }

    def run_check(self, name: str) -> Dict[str, object]:
        if name not in CHECKS:
            raise ValueError(f"unknown audit check {name!r}")
        started = time.time()
        tally = _Tally()
        getattr(self, f"_check_{name}")(tally)
        entry = {
            "name": name,
            "passed": tally.violations == 0 and tally.checked > 0,
            "checked": tally.checked,
            "violations": tally.violations,
            "examples": tally.examples,
            "time": time.time() - started,
        }
        self.history.append(entry)
        self.logger.info("%s: %s checked=%d violations=%d (%.2fs)", name,
                         "passed" if entry["passed"] else "FAILED", tally.checked, tally.violations, entry["time"])
        for cb in self.check_callbacks:
            try:
                cb(entry)
            except Exception:
                self.logger.exception("Check callback failed")
        return entry

    def to_dataframe(self) -> pd.DataFrame:
        columns = ["name", "passed", "checked", "violations", "time"]
        return pd.DataFrame([{c: entry[c] for c in columns} for entry in self.history], columns=columns)

    def _sweep(self) -> Iterator[Tuple[SystemDescription, UpdateSchedule]]:
        for n, sys in threshold_sweep(self.max_n):
            for pi in all_schedules(n):
                yield sys, pi

    def _rng(self) -> np.random.Generator:
        return np.random.default_rng(self.seed)

    def _parallel_systems(self) -> Iterator[SystemDescription]:
        """Parallel systems known to cycle, then `samples` random monotone ones on `random_n` vertices."""
        yield from cycling_parallel_systems()
        yield from random_monotone_systems(self.random_n, self._rng(), self.samples)

    def _check_garden_of_eden_or_fixed_point(self, tally: _Tally):
        orbits: Dict[Tuple[Graph, UpdateSchedule], List[int]] = {}
        for sys, pi in self._sweep():
            key = (sys.graph, pi)
            if key not in orbits:
                orbits[key] = sorted(X.bits for X in pattern_orbit(sys.graph, pi))
            ok_mask = build(sys, Driver.sds(pi)).goe_or_fixed_mask()
            for b in orbits[key]:
                tally.record(bool(ok_mask[b]), lambda: f"{_describe(sys)} pi={pi} X={State(sys.n, b)}")

    def _check_antichain_cycles(self, tally: _Tally):
        longest = 0
        for n, sys in threshold_sweep(self.max_n):
            for driver in [Driver.sds(pi) for pi in all_schedules(n)] + [Driver.pds()]:
                longest = max(longest, _record_antichain_cycles(tally, sys, driver))
        for sys in self._parallel_systems():
            longest = max(longest, _record_antichain_cycles(tally, sys, Driver.pds()))
        _record_nontrivial_cycle_seen(tally, longest)

    def _check_cycle_length_bound(self, tally: _Tally):
        for sys, pi in self._sweep():
            audit = max_cycle_audit(sys, pi)
            tally.record(audit.strict, lambda: f"{_describe(sys)} pi={pi} max_len={audit.max_len} bound={audit.bound}")
        rng = self._rng()
        for sys in random_monotone_systems(self.random_n, rng, self.samples):
            pi = UpdateSchedule(tuple(int(v) for v in rng.permutation(self.random_n) + 1))
            audit = max_cycle_audit(sys, pi)
            tally.record(audit.strict, lambda: f"random {_describe(sys)} pi={pi} max_len={audit.max_len}")

    def _check_nonsequentializable_witness(self, tally: _Tally):
        n = 4
        pds = goles_pds(n)
        ps = build(pds, Driver.pds())
        longest = max(ps.cycle_lengths())
        tally.record(longest == sperner_bound(n), lambda: f"parallel cycle length {longest}, expected {sperner_bound(n)}")
        tally.record(pds.monotone, lambda: f"non-monotone tables: {[i for i, v in enumerate(pds.monotonicity, 1) if not v.monotone]}")
        tally.record(np.array_equal(ps.successor, goles_map(n)), lambda: "tabulated system differs from its global map")
        for pi in all_schedules(n):
            result = derive_sequentialization(pds, pi)
            tally.record(not result.ok, lambda: f"pi={pi} sequentialized")

    def _check_lym_sperner(self, tally: _Tally):
        for n in range(1, ANTICHAIN_MAX_N + 1):
            bound = sperner_bound(n)
            middle = {frozenset(X for X in all_states(n) if X.weight == w) for w in (n // 2, n - n // 2)}
            for A in enumerate_antichains(n):
                report = lym_report(A, n)
                tally.record(report.lym_sum <= 1 and len(A) <= bound,
                             lambda: f"n={n} A={_states(A)} lym={report.lym_sum}")
                if len(A) == bound:
                    tally.record(A in middle, lambda: f"n={n} maximum antichain {_states(A)} is not a middle layer")
                tally.record(theta_union_size(A) <= factorial(n, exact=True), lambda: f"n={n} A={_states(A)} theta sum too large")
        for n in range(1, THETA_MAX_N + 1):
            schedules = list(all_schedules(n))
            for X in all_states(n):
                for kind in (ZERO, ONE):
                    brute = sum(1 for pi in schedules if in_theta(X, kind, pi))
                    size = theta(X, kind).size
                    tally.record(brute == size, lambda: f"theta_{kind}({X}) size {size} but {brute} schedules")

    def _check_fixed_point_lattice(self, tally: _Tally):
        for sys, pi in self._sweep():
            _record_fixed_point_lattice(tally, sys, Driver.sds(pi))
        longest = 0
        for sys in self._parallel_systems():
            longest = max(longest, _record_fixed_point_lattice(tally, sys, Driver.pds()))
        _record_nontrivial_cycle_seen(tally, longest)

    def _check_probability_bound(self, tally: _Tally):
        for n, sys in threshold_sweep(self.max_n):
            fraction = goe_or_fixed_fraction(sys)
            bound = probability_lower_bound(n)
            tally.record(fraction >= bound, lambda: f"{_describe(sys)} fraction {fraction} < {bound}")

    def _check_bipartite_bound(self, tally: _Tally):
        graph = Graph.complete_bipartite(2, 2)
        pi = UpdateSchedule.identity(4)
        bound = bipartite_lower_bound(2, 2)
        for sys in threshold_systems(graph):
            if any(k > 3 for k in sys.metadata["thresholds"]):
                continue
            fraction = state_fraction(sys, pi)
            tally.record(fraction >= bound, lambda: f"{_describe(sys)} fraction {fraction} < {bound}")

    def _check_shift_homomorphism(self, tally: _Tally):
        for sys, pi in self._sweep():
            for k in range(sys.n + 1):
                tally.record(shift_homomorphism_check(sys, pi, k),
                             lambda: f"{_describe(sys)} pi={pi} k={k} homomorphism fails")
                tally.record(cycle_equivalence_check(sys, pi, k),
                             lambda: f"{_describe(sys)} pi={pi} k={k} cycle structures differ")

    def _check_round_trips(self, tally: _Tally):
        for sys, pi in self._sweep():
            pds = parallelize(sys, pi)
            expected = successor_array(sys, Driver.sds(pi))
            tally.record(np.array_equal(successor_array(pds, Driver.pds()), expected) and pds.monotone,
                         lambda: f"{_describe(sys)} pi={pi} parallelization differs or is not monotone")
            result = derive_sequentialization(pds, pi)
            tally.record(result.ok and np.array_equal(successor_array(result.system, Driver.sds(pi)), expected),
                         lambda: f"{_describe(sys)} pi={pi} sequentialization returned {result.status}")
        for n in range(1, min(self.max_n, PARTIAL_MAX_N) + 1):
            for g in _all_partial_functions(n):
                if is_monotone_partial(g).monotone:
                    _record_extension(tally, g)
        rng = self._rng()
        for _ in range(self.samples):
            g = _random_monotone_partial(int(rng.integers(4, 6)), rng)
            _record_extension(tally, g)

    def _check_periodic_schedule_exclusion(self, tally: _Tally):
        for n, sys in threshold_sweep(self.max_n):
            for pi in all_schedules(n):
                for b in _nontrivial_periodic(build(sys, Driver.sds(pi))):
                    X = State(n, b)
                    tally.record(not (in_theta(X, ZERO, pi) or in_theta(X, ONE, pi)),
                                 lambda: f"{_describe(sys)} pi={pi} periodic {X} with pi in its theta set")
        longest = 0
        thresholds = (sys for _, sys in threshold_sweep(self.max_n))
        for sys in chain(thresholds, self._parallel_systems()):
            ps = build(sys, Driver.pds())
            longest = max(longest, max(ps.cycle_lengths()))
            for b in _nontrivial_periodic(ps):
                X = State(sys.n, b)
                for pi in theta_schedules(X):
                    result = derive_sequentialization(sys, pi)
                    tally.record(not result.ok,
                                 lambda: f"{_describe(sys)} parallel cycle through {X} sequentialized by {pi}")
        _record_nontrivial_cycle_seen(tally, longest)


def _nontrivial_periodic(ps) -> List[int]:
    """Packed states on limit cycles longer than one state."""
    return [b for cycle in ps.cycles if len(cycle) > 1 for b in cycle]


def _record_nontrivial_cycle_seen(tally: _Tally, longest: int):
    tally.record(longest > 1, lambda: "no limit cycle longer than one state was examined")


def _record_antichain_cycles(tally: _Tally, sys: SystemDescription, driver: Driver) -> int:
    """Records one entry per limit cycle; returns the longest cycle length."""
    cycles = limit_cycles(build(sys, driver))
    for cycle in cycles:
        tally.record(is_antichain(cycle), lambda: f"{_describe(sys)} {driver} cycle={_states(cycle)}")
    return max(len(cycle) for cycle in cycles)


def _record_fixed_point_lattice(tally: _Tally, sys: SystemDescription, driver: Driver) -> int:
    ps = build(sys, driver)
    ext = lattice_extrema(sys, driver)
    fixed = fixed_points(ps)
    tally.record(ext.min_fp in fixed and ext.max_fp in fixed and leq(ext.min_fp, ext.max_fp),
                 lambda: f"{_describe(sys)} {driver} extrema {ext.min_fp}/{ext.max_fp} not fixed")
    for X in (State(sys.n, int(b)) for b in np.flatnonzero(ps.periodic_mask())):
        tally.record(leq(ext.min_fp, X) and leq(X, ext.max_fp),
                     lambda: f"{_describe(sys)} {driver} periodic {X} outside [{ext.min_fp}, {ext.max_fp}]")
    longest = max(ps.cycle_lengths())
    if longest > 1:
        tally.record(len(fixed) >= 2, lambda: f"{_describe(sys)} {driver} cycle with {len(fixed)} fixed point(s)")
    tally.record(fixed == fixed_points_direct(sys),
                 lambda: f"{_describe(sys)} {driver} fixed points differ from the local-function fixed points")
    return longest


def _describe(sys: SystemDescription) -> str:
    edges = sorted(sys.graph.edges)
    thresholds = sys.metadata.get("thresholds")
    if thresholds is not None:
        return f"n={sys.n} edges={edges} k={thresholds}"
    return f"n={sys.n} edges={edges}"


def _states(states) -> str:
    return "{" + ", ".join(sorted(str(X) for X in states)) + "}"


def _all_partial_functions(n: int) -> Iterator[PartialFunction]:
    """Every partial function on F_2^n: each state is undefined, 0 or 1."""
    size = 1 << n
    for choice in product((-1, 0, 1), repeat=size):
        yield PartialFunction.from_array(np.array(choice, dtype=np.int8), n)


def _random_monotone_partial(n: int, rng: np.random.Generator) -> PartialFunction:
    """Restriction of a random monotone table to a random domain."""
    total = random_monotone_table(n, rng)
    keep = rng.random(1 << n) < 0.5
    values = np.where(keep, total.lookup[reversal_permutation(n)], -1).astype(np.int8)
    return PartialFunction.from_array(values, n)


def _record_extension(tally: _Tally, g: PartialFunction):
    extended = monotone_extend(g)
    agrees = all(extended.lookup[assignment_index(X)] == v for X, v in g.entries.items())
    tally.record(agrees and is_monotone_total(extended).monotone,
                 lambda: f"extension of {g.n}-ary partial function with domain {_states(g.entries)} fails")
