"""
Command-line front end.

    python -m app.cli phase-space --system data/systems/edge_or.json --schedule 1,2
    python -m app.cli goles --n 4 --output goles4.json
    python -m app.cli audit --max-n 3

Exit codes: 0 success, 1 usage error, 2 analysis error, 3 audit failure.
"""
import argparse
import json
import logging
import sys
from typing import Dict, List, Optional

from app.components.exporters import render_json, render_phase_space_html, render_phase_space_text, write_output
from app.config import FORMATS, RunConfig, UsageError, parse_state
from models.audit import CHECKS, TheoremAudit
from models.errors import CapExceededError, SdsError, TheoremViolation
from models.lattice import S0, S1
from models.local_functions import monotone_extend
from models.phase_space import build, classify_state, lattice_extrema, max_cycle_audit
from models.schedules import ONE, ZERO, alpha_class, orbit_S, theta
from models.system import PDS, SDS, SystemDescription, trajectory
from models.transforms import derive_sequentialization, goles_pds, parallelize
from parsers.partial_function import parse_partial_function
from parsers.system import driver_hint, parse_system, system_to_dict

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_ANALYSIS = 2
EXIT_AUDIT = 3

LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"


class _Parser(argparse.ArgumentParser):
    """argparse reports usage errors by exiting with 2; route them through UsageError instead."""

    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--n-cap", type=int, default=None, help="cap on n for 2^n tabulations")
    common.add_argument("--alpha-cap", type=int, default=None, help="cap on alpha-class / theta sizes")
    common.add_argument("--format", default="json", choices=FORMATS)
    common.add_argument("--output", default=None, help="write output to this file")
    common.add_argument("--json-errors", action="store_true", help="report errors as JSON on stdout")
    common.add_argument("-v", "--verbose", action="store_true")

    system = argparse.ArgumentParser(add_help=False)
    system.add_argument("--system", required=True, help="system JSON file")

    schedule = argparse.ArgumentParser(add_help=False)
    schedule.add_argument("--schedule", default=None, help="update schedule, e.g. 2,4,1,3")

    driven = argparse.ArgumentParser(add_help=False)
    driven.add_argument("--driver", default=None, choices=(SDS, PDS))

    p = _Parser(prog="sds-lab", description="Sequential and parallel monotone dynamical systems on graphs")
    sub = p.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True

    s = sub.add_parser("simulate", parents=[common, system, schedule, driven], help="trajectory of one state")
    s.add_argument("--state", required=True)
    s.add_argument("--max-steps", type=int, default=None)

    sub.add_parser("phase-space", parents=[common, system, schedule, driven], help="full phase-space export")

    s = sub.add_parser("classify", parents=[common, system, schedule], help="classify one state under F_pi")
    s.add_argument("--state", required=True)
    s.add_argument("--scan-goe", action="store_true", help="always decide is_goe, even when the verdict does not need it")

    sub.add_parser("alpha-class", parents=[common, system, schedule], help="schedules equivalent to --schedule")

    s = sub.add_parser("orbit", parents=[common, system, schedule], help="[S_{kind,k}]_pi")
    s.add_argument("--kind", required=True, choices=(S0, S1))
    s.add_argument("--k", type=int, required=True)

    s = sub.add_parser("theta", parents=[common], help="schedules sending a state to an S-pattern")
    s.add_argument("--state", required=True)
    s.add_argument("--kind", default=ZERO, choices=(ZERO, ONE))
    s.add_argument("--list", action="store_true", help="enumerate the members")

    sub.add_parser("extrema", parents=[common, system, schedule, driven], help="least and greatest fixed points")
    sub.add_parser("cycle-bound", parents=[common, system, schedule, driven], help="longest cycle vs C(n, n/2)")
    sub.add_parser("check-monotone", parents=[common, system], help="per-vertex monotonicity verdicts")

    s = sub.add_parser("extend-monotone", parents=[common], help="monotone extension of a partial function")
    s.add_argument("--partial", required=True, help="partial-function JSON file")

    sub.add_parser("parallelize", parents=[common, system, schedule], help="parallel system with the map F_pi")
    sub.add_parser("sequentialize", parents=[common, system, schedule], help="monotone sequentialization of a parallel system")

    s = sub.add_parser("goles", parents=[common], help="monotone parallel system with a middle-layer cycle")
    s.add_argument("--n", type=int, required=True)

    s = sub.add_parser("audit", parents=[common], help="run the theorem sweeps")
    s.add_argument("--max-n", type=int, default=3)
    s.add_argument("--samples", type=int, default=1000)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--check", action="append", choices=CHECKS, dest="checks", help="run only this check (repeatable)")
    return p


def _configure_logging(verbose: bool):
    root = logging.getLogger()
    if not root.handlers:
        handler = logging.StreamHandler(sys.stderr)
        handler.setFormatter(logging.Formatter(LOG_FORMAT))
        root.addHandler(handler)
    root.setLevel(logging.DEBUG if verbose else logging.WARNING)


def _load(cfg: RunConfig) -> SystemDescription:
    sys_ = parse_system(cfg.system_path)
    if sys_.n > cfg.n_cap:
        raise CapExceededError(f"n={sys_.n} exceeds the configured cap {cfg.n_cap}")
    return sys_


def _witness(pair) -> Optional[List[str]]:
    return None if pair is None else [str(pair[0]), str(pair[1])]


def _as_text(payload) -> str:
    if isinstance(payload, dict):
        lines = []
        for key, value in payload.items():
            if isinstance(value, (dict, list)):
                value = json.dumps(value)
            lines.append(f"{key}: {value}")
        return "\n".join(lines)
    return str(payload)


def _render(cfg: RunConfig, payload) -> str:
    if cfg.output_format == "json":
        return render_json(payload)
    if cfg.output_format == "text":
        return _as_text(payload)
    raise UsageError(f"--format {cfg.output_format} is only available for phase-space")


def cmd_simulate(cfg: RunConfig, args) -> Dict:
    sys_ = _load(cfg)
    driver = cfg.resolve_driver(driver_hint(sys_))
    traj = trajectory(sys_, driver, parse_state(args.state), max_steps=args.max_steps)
    return {
        "driver": str(driver),
        "transient": [str(X) for X in traj.transient],
        "cycle": [str(X) for X in traj.cycle],
        "truncated": traj.truncated,
    }


def cmd_phase_space(cfg: RunConfig, args) -> str:
    sys_ = _load(cfg)
    ps = build(sys_, cfg.resolve_driver(driver_hint(sys_)), cap=cfg.n_cap)
    if cfg.output_format == "dot":
        return ps.to_dot()
    if cfg.output_format == "html":
        return render_phase_space_html(ps)
    if cfg.output_format == "text":
        return render_phase_space_text(ps)
    return ps.to_json()


def cmd_classify(cfg: RunConfig, args) -> Dict:
    sys_ = _load(cfg)
    result = classify_state(sys_, cfg.require_schedule(), parse_state(args.state),
                            cap=cfg.n_cap, alpha_cap=cfg.alpha_cap, scan_goe=args.scan_goe)
    return result.to_dict()


def cmd_alpha_class(cfg: RunConfig, args) -> Dict:
    sys_ = _load(cfg)
    cls = alpha_class(sys_.graph, cfg.require_schedule(), cap=cfg.alpha_cap)
    return {"representative": str(cls.representative), "size": len(cls), "members": [str(s) for s in cls.members]}


def cmd_orbit(cfg: RunConfig, args) -> Dict:
    sys_ = _load(cfg)
    states = orbit_S(sys_.graph, cfg.require_schedule(), args.kind, args.k, cap=cfg.alpha_cap)
    return {"kind": args.kind, "k": args.k, "states": sorted(str(X) for X in states)}


def cmd_theta(cfg: RunConfig, args) -> Dict:
    X = parse_state(args.state)
    result = theta(X, args.kind, materialize=args.list, cap=cfg.alpha_cap)
    out = {"state": str(X), "kind": args.kind, "size": result.size}
    if result.members is not None:
        out["members"] = [str(s) for s in result.members]
    return out


def cmd_extrema(cfg: RunConfig, args) -> Dict:
    sys_ = _load(cfg)
    driver = cfg.resolve_driver(driver_hint(sys_))
    ext = lattice_extrema(sys_, driver)
    return {"driver": str(driver), "min": str(ext.min_fp), "max": str(ext.max_fp)}


def cmd_cycle_bound(cfg: RunConfig, args) -> Dict:
    sys_ = _load(cfg)
    driver = cfg.resolve_driver(driver_hint(sys_))
    audit = max_cycle_audit(sys_, driver, cap=cfg.n_cap)
    return {"driver": str(driver), "max_len": audit.max_len, "bound": audit.bound, "strict": audit.strict}


def cmd_check_monotone(cfg: RunConfig, args) -> Dict:
    sys_ = _load(cfg)
    vertices = [{"vertex": i, "monotone": v.monotone, "witness": _witness(v.witness)}
                for i, v in enumerate(sys_.monotonicity, start=1)]
    return {"monotone": sys_.monotone, "vertices": vertices}


def cmd_extend_monotone(cfg: RunConfig, args) -> Dict:
    g = parse_partial_function(args.partial)
    extended = monotone_extend(g, cap=cfg.n_cap)
    return {"n": g.n, "function": {"type": "table", "bits": extended.bits}}


def cmd_parallelize(cfg: RunConfig, args) -> Dict:
    return system_to_dict(parallelize(_load(cfg), cfg.require_schedule(), cap=cfg.n_cap))


def cmd_sequentialize(cfg: RunConfig, args) -> Dict:
    result = derive_sequentialization(_load(cfg), cfg.require_schedule(), cap=cfg.n_cap)
    out = result.to_dict()
    if result.ok:
        out["system"] = system_to_dict(result.system)
    return out


def cmd_goles(cfg: RunConfig, args) -> Dict:
    return system_to_dict(goles_pds(args.n, cap=cfg.n_cap))


COMMANDS = {
    "simulate": cmd_simulate,
    "phase-space": cmd_phase_space,
    "classify": cmd_classify,
    "alpha-class": cmd_alpha_class,
    "orbit": cmd_orbit,
    "theta": cmd_theta,
    "extrema": cmd_extrema,
    "cycle-bound": cmd_cycle_bound,
    "check-monotone": cmd_check_monotone,
    "extend-monotone": cmd_extend_monotone,
    "parallelize": cmd_parallelize,
    "sequentialize": cmd_sequentialize,
    "goles": cmd_goles,
}


def _run_audit(cfg: RunConfig, args, stdout) -> int:
    try:
        audit = TheoremAudit(max_n=cfg.max_n, samples=cfg.samples, seed=cfg.seed or 0, checks=args.checks)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    result = audit.run()
    if cfg.output_format == "text":
        text = audit.to_dataframe().to_string(index=False) + f"\nstatus: {result['status']}"
    else:
        text = _render(cfg, result)
    write_output(text, cfg.output_path, stdout)
    return EXIT_OK if result["status"] == "passed" else EXIT_AUDIT


def _report_error(exc: Exception, code: int, json_errors: bool, stdout):
    if json_errors:
        stdout.write(json.dumps({"error": type(exc).__name__, "message": str(exc), "exit_code": code}) + "\n")
    else:
        sys.stderr.write(f"error: {exc}\n")


def main(argv: Optional[List[str]] = None, stdout=None) -> int:
    stdout = stdout or sys.stdout
    argv = list(sys.argv[1:] if argv is None else argv)
    json_errors = "--json-errors" in argv
    try:
        args = build_parser().parse_args(argv)
        cfg = RunConfig.from_args(args)
        _configure_logging(cfg.verbose)
        logger.debug("running %s with %s", cfg.command, cfg)
        if cfg.command == "audit":
            return _run_audit(cfg, args, stdout)
        result = COMMANDS[cfg.command](cfg, args)
        text = result if isinstance(result, str) else _render(cfg, result)
        write_output(text, cfg.output_path, stdout)
        return EXIT_OK
    except UsageError as exc:
        _report_error(exc, EXIT_USAGE, json_errors, stdout)
        return EXIT_USAGE
    except (SdsError, OSError) as exc:
        _report_error(exc, EXIT_ANALYSIS, json_errors, stdout)
        return EXIT_ANALYSIS
    except TheoremViolation as exc:
        _report_error(exc, EXIT_AUDIT, json_errors, stdout)
        return EXIT_AUDIT


if __name__ == "__main__":
    sys.exit(main())
