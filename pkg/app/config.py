from dataclasses import dataclass
from typing import Optional

from models.config import DEFAULT_MAX_N_AUDIT, alpha_cap, n_cap
from models.errors import ConfigError
from models.lattice import State
from models.schedules import UpdateSchedule
from models.system import PDS, SDS, Driver

FORMATS = ("json", "dot", "text", "html")
DRIVERS = (SDS, PDS)


class UsageError(ValueError):
    """Bad command-line input; reported with exit code 1."""


@dataclass
class RunConfig:
    """
    Settings shared by every subcommand.

    Attributes:
        command: subcommand name.
        system_path: system JSON file, for commands that read one.
        schedule: update schedule, for sds-driven commands.
        driver: 'sds', 'pds', or None to infer (schedule given -> sds, else the file's own hint).
        n_cap: cap on n for 2^n tabulations.
        alpha_cap: cap on alpha-class and theta-set sizes.
        output_format: one of FORMATS.
        output_path: write output here instead of stdout.
        seed: seed for randomized sweeps.
        max_n: largest n of the exhaustive audit sweep.
        samples: random systems drawn by the audit.
        json_errors: print errors as JSON on stdout.
        verbose: DEBUG logging.
    """
    command: str
    system_path: Optional[str] = None
    schedule: Optional[UpdateSchedule] = None
    driver: Optional[str] = None
    n_cap: int = None
    alpha_cap: int = None
    output_format: str = "json"
    output_path: Optional[str] = None
    seed: Optional[int] = None
    max_n: int = DEFAULT_MAX_N_AUDIT
    samples: int = 1000
    json_errors: bool = False
    verbose: bool = False

    def __post_init__(self):
        try:
            if self.n_cap is None:
                self.n_cap = n_cap()
            if self.alpha_cap is None:
                self.alpha_cap = alpha_cap()
        except ConfigError as exc:
            raise UsageError(str(exc)) from exc
        if self.output_format not in FORMATS:
            raise UsageError(f"unknown output format {self.output_format!r}")
        if self.driver is not None and self.driver not in DRIVERS:
            raise UsageError(f"unknown driver {self.driver!r}")
        if self.driver == SDS and self.schedule is None:
            raise UsageError("the sds driver requires --schedule")
        if self.driver == PDS and self.schedule is not None:
            raise UsageError("the pds driver does not take a schedule")
        if self.n_cap < 1 or self.alpha_cap < 1:
            raise UsageError("caps must be positive")

    @classmethod
    def from_args(cls, args) -> "RunConfig":
        schedule = None
        if getattr(args, "schedule", None):
            try:
                schedule = UpdateSchedule.parse(args.schedule)
            except ValueError as exc:
                raise UsageError(str(exc)) from exc
        return cls(
            command=args.command,
            system_path=getattr(args, "system", None),
            schedule=schedule,
            driver=getattr(args, "driver", None),
            n_cap=args.n_cap,
            alpha_cap=args.alpha_cap,
            output_format=args.format,
            output_path=args.output,
            seed=getattr(args, "seed", None),
            max_n=getattr(args, "max_n", DEFAULT_MAX_N_AUDIT),
            samples=getattr(args, "samples", 1000),
            json_errors=args.json_errors,
            verbose=args.verbose,
        )

    def resolve_driver(self, hint: Optional[str] = None) -> Driver:
        """Driver for this run; `hint` is the driver named in the system file, if any."""
        kind = self.driver
        if kind is None:
            kind = SDS if self.schedule is not None else hint
        if kind == SDS:
            if self.schedule is None:
                raise UsageError("the sds driver requires --schedule")
            return Driver.sds(self.schedule)
        if kind == PDS:
            if self.schedule is not None:
                raise UsageError("the pds driver does not take a schedule")
            return Driver.pds()
        raise UsageError("give --schedule for the sequential map or --driver pds for the parallel one")

    def require_schedule(self) -> UpdateSchedule:
        if self.schedule is None:
            raise UsageError(f"{self.command} requires --schedule")
        return self.schedule


def parse_state(text: str) -> State:
    try:
        return State.parse(text)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
