"""Run configuration shared by the command line front end."""

from __future__ import annotations

from dataclasses import asdict, dataclass

from .grid import thread_count

OUTPUT_FORMATS = ("csv", "json")


@dataclass(frozen=True)
class RunConfig:
    tolerance: float = 1e-8
    work_budget: int = 10**8
    s1_zero_mode_mult: int = 2
    output_format: str = "csv"
    threads: int = 1

    def __post_init__(self):
        if not self.tolerance > 0:
            raise ValueError(f"tolerance must be positive, got {self.tolerance}")
        if self.work_budget < 1:
            raise ValueError(f"work budget must be positive, got {self.work_budget}")
        if self.s1_zero_mode_mult not in (1, 2):
            raise ValueError("s1 zero-mode multiplicity must be 1 or 2")
        if self.output_format not in OUTPUT_FORMATS:
            raise ValueError(f"output format must be csv or json, got {self.output_format!r}")

    @classmethod
    def from_args(cls, args) -> "RunConfig":
        return cls(
            tolerance=args.tol,
            work_budget=args.budget,
            s1_zero_mode_mult=args.s1_zero_mode_mult,
            output_format=args.format,
            threads=thread_count(None),
        )

    def as_dict(self) -> dict:
        return asdict(self)
