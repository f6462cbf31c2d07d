from dataclasses import dataclass, field, replace
from typing import Optional

from .grid import Profile1D


@dataclass(frozen=True)
class StepStats:
    accepted: int = 0
    rejected: int = 0
    newton_iterations: int = 0
    jacobian_evaluations: int = 0
    rhs_evaluations: int = 0


@dataclass(frozen=True, eq=False)
class SimState:
    t: float
    u_S: Profile1D
    stats: StepStats = field(default_factory=StepStats)


@dataclass(frozen=True)
class EnergyReport:
    t: float
    E0: float
    E1: float
    E_total: float
    dissipation_rhs: float
    dissipation_lhs: Optional[float] = None


@dataclass(frozen=True)
class Record:
    t: float
    position: Optional[float]
    energy: EnergyReport
    # sign changes of u - b/4; more than one means position is ambiguous
    crossings: int = 0


@dataclass
class TimeSeries:
    records: list[Record] = field(default_factory=list)

    def append(self, record: Record) -> None:
        if self.records and not record.t > self.records[-1].t:
            raise ValueError(
                f"time series must be strictly increasing: {record.t} after {self.records[-1].t}"
            )
        self.records.append(record)

    def __len__(self) -> int:
        return len(self.records)

    def __iter__(self):
        return iter(self.records)

    @property
    def times(self) -> list[float]:
        return [r.t for r in self.records]

    @property
    def positions(self) -> list[Optional[float]]:
        return [r.position for r in self.records]

    def fill_dissipation_lhs(self) -> None:
        """Centered difference of E_total at every sample with two neighbours."""
        recs = self.records
        for k in range(1, len(recs) - 1):
            prev, cur, nxt = recs[k - 1], recs[k], recs[k + 1]
            slope = (nxt.energy.E_total - prev.energy.E_total) / (nxt.t - prev.t)
            recs[k] = replace(cur, energy=replace(cur.energy, dissipation_lhs=slope))
