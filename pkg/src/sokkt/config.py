"""Central tolerance and sizing constants.

Every numeric threshold used by the checkers lives here so a report can echo
the exact configuration that produced it.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, replace

MAX_POLY_DEGREE = 4
MAX_CONE_DIM = 8
MAX_ACTIVE_KINKS = 16
GRID_SIZE_GUARD = 10**7
DEFAULT_SEED = 42
DEFAULT_SAMPLES = 64


@dataclass(frozen=True)
class Tolerances:
    activity: float = 1e-9
    symmetry: float = 1e-12
    sandwich_rel: float = 1e-8
    strict: float = 1e-8
    # margins in (strict * inconclusive_ratio, strict] are neither accepted nor rejected
    inconclusive_ratio: float = 1e-3
    pivot: float = 1e-10
    residual: float = 1e-9
    stationarity: float = 1e-8
    box_radius: float = 1.0

    def with_(self, **changes) -> "Tolerances":
        return replace(self, **changes)

    def as_dict(self) -> dict:
        return asdict(self)


DEFAULT_TOL = Tolerances()
