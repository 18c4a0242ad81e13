"""Benchmark configurations reproduced by ``kofn-standby reproduce``.

Each table is a list of rows (active parameter, standby parameter, n, k)
over four (n, k) shapes and two standby settings. Figures are 2-out-of-4
systems whose MRL curves are sampled at t = 0..30.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

from .distributions import DiscreteLifetime, DiscreteWeibull, Geometric, NegBinomial
from .orderstats import SystemSpec

SHAPES = [(3, 2), (5, 2), (5, 3), (10, 3)]
TABLE_D = 1e-4
FIGURE_D = 1e-3
FIGURE_TS = range(0, 31)


@dataclass(frozen=True)
class TableLayout:
    columns: tuple[str, str]
    active: Callable[[float], DiscreteLifetime]
    standby: Callable[[float], DiscreteLifetime]
    active_param: float
    standby_params: tuple[float, float]

    def rows(self) -> list[tuple[float, float, int, int]]:
        return [(self.active_param, g, n, k) for g in self.standby_params for n, k in SHAPES]

    def system(self, row: tuple[float, float, int, int]) -> SystemSpec:
        a, g, n, k = row
        return SystemSpec.iid(n, k, self.active(a), self.standby(g))


TABLES: dict[int, TableLayout] = {
    # geometric actives, geometric standby
    1: TableLayout(("p", "g"), Geometric, Geometric, 0.25, (0.25, 0.10)),
    # NB(2, .) actives and standby
    2: TableLayout(("p", "g"), lambda p: NegBinomial(2, p), lambda g: NegBinomial(2, g), 0.25, (0.25, 0.10)),
    # discrete Weibull (q, 2) actives and standby
    3: TableLayout(("q", "q_z"), lambda q: DiscreteWeibull(q, 2.0), lambda q: DiscreteWeibull(q, 2.0),
                   0.75, (0.75, 0.90)),
    # discrete Weibull (q, 2) actives, geometric standby
    4: TableLayout(("q", "g"), lambda q: DiscreteWeibull(q, 2.0), Geometric, 0.75, (0.25, 0.10)),
}


def figure_system(number: int) -> SystemSpec:
    if number == 1:
        return SystemSpec(4, 2, [Geometric(1 / m) for m in (2, 3, 4, 5)], Geometric(0.1))
    if number == 2:
        return SystemSpec(4, 2, [NegBinomial(2, 1 / m) for m in (2, 3, 4, 5)], NegBinomial(2, 0.1))
    if number == 3:
        unit = DiscreteWeibull(math.exp(-1 / 100), 2.0)
        return SystemSpec.iid(4, 2, unit, unit)
    if number == 4:
        unit = DiscreteWeibull(math.exp(-2), 0.5)
        return SystemSpec.iid(4, 2, unit, unit)
    raise ValueError(f"no figure {number}")
