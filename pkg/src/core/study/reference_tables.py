"""Published convergence tables for the two BVP examples, stored as printed.

ModFC columns use the Hermite family, GenFC columns the regularized-Beta
family with its default parameters; b = 2, d = 5 throughout.
"""

from dataclasses import dataclass
from typing import Dict, Optional, Tuple

TABLE_N = tuple(2 ** p for p in range(6, 13))


@dataclass(frozen=True)
class ReferenceTable:
    label: str
    family: str
    problem: str
    params: Tuple[Tuple[str, float], ...]
    rows: Tuple[Tuple[int, float, Optional[float]], ...]
    citation: str

    def row(self, n: int) -> Tuple[int, float, Optional[float]]:
        for entry in self.rows:
            if entry[0] == n:
                return entry
        raise KeyError(n)

    @property
    def param_dict(self) -> Dict[str, float]:
        return dict(self.params)


def _table(label, family, problem, params, errors, orders, citation) -> ReferenceTable:
    rows = tuple(zip(TABLE_N, errors, (None,) + tuple(orders)))
    return ReferenceTable(label, family, problem, tuple(params.items()), rows, citation)


_MODFC_COSKX = "ModFC convergence table for -lam u'' + u = cos(kx), lam = 0.1"
_GENFC_COSKX = "GenFC convergence table for -lam u'' + u = cos(kx), lam = 0.1"
_MODFC_EULER = "ModFC convergence table for the near-singular Euler BVP"
_GENFC_EULER = "GenFC convergence table for the near-singular Euler BVP"

TABLES: Dict[str, ReferenceTable] = {t.label: t for t in (
    _table("modfc-coskx-k100", "hermite", "coskx", {"lam": 0.1, "k": 100.0},
           (4.27e-2, 1.18e-4, 2.82e-6, 2.69e-8, 3.00e-10, 3.28e-10, 3.92e-10),
           (8.50, 5.39, 6.71, 6.49, -0.13, -0.26), _MODFC_COSKX),
    _table("modfc-coskx-k200", "hermite", "coskx", {"lam": 0.1, "k": 200.0},
           (1.01e0, 3.01e-2, 2.38e-4, 2.24e-6, 2.57e-8, 3.26e-8, 4.07e-8),
           (5.07, 6.98, 6.73, 6.44, -0.34, -0.32), _MODFC_COSKX),
    _table("modfc-coskx-k300", "hermite", "coskx", {"lam": 0.1, "k": 300.0},
           (7.50e0, 2.56e-1, 4.47e-3, 3.63e-5, 3.24e-7, 2.93e-7, 3.23e-7),
           (4.87, 5.84, 6.94, 6.81, 0.14, -0.14), _MODFC_COSKX),
    _table("genfc-coskx-k100", "beta", "coskx", {"lam": 0.1, "k": 100.0},
           (4.48e-2, 1.19e-4, 2.82e-6, 2.66e-8, 2.19e-10, 2.81e-12, 1.94e-12),
           (8.55, 5.41, 6.72, 6.93, 6.28, 0.54), _GENFC_COSKX),
    _table("genfc-coskx-k200", "beta", "coskx", {"lam": 0.1, "k": 200.0},
           (1.05e0, 3.01e-2, 2.38e-4, 2.24e-6, 2.11e-8, 1.77e-10, 4.39e-11),
           (5.13, 6.98, 6.73, 6.73, 6.90, 2.01), _GENFC_COSKX),
    _table("genfc-coskx-k300", "beta", "coskx", {"lam": 0.1, "k": 300.0},
           (7.50e0, 2.57e-1, 4.47e-3, 3.62e-5, 3.10e-7, 2.93e-9, 5.84e-10),
           (4.87, 5.84, 6.95, 6.87, 6.73, 2.33), _GENFC_COSKX),
    _table("modfc-euler-eps10", "hermite", "euler-log", {"eps": 1 / 10},
           (5.82e-7, 1.08e-8, 1.38e-10, 1.40e-12, 2.26e-14, 1.24e-14, 2.23e-14),
           (5.75, 6.29, 6.62, 5.95, 0.87, -0.84), _MODFC_EULER),
    _table("modfc-euler-eps50", "hermite", "euler-log", {"eps": 1 / 50},
           (6.31e-4, 4.19e-5, 1.37e-6, 2.59e-8, 3.34e-10, 2.90e-10, 3.49e-10),
           (3.92, 4.93, 5.73, 6.28, 0.20, -0.27), _MODFC_EULER),
    _table("modfc-euler-eps100", "hermite", "euler-log", {"eps": 1 / 100},
           (2.08e-3, 1.43e-4, 2.23e-6, 1.53e-7, 6.54e-9, 9.18e-9, 7.76e-9),
           (3.86, 6.00, 3.86, 4.55, -0.49, 0.24), _MODFC_EULER),
    _table("genfc-euler-eps10", "beta", "euler-log", {"eps": 1 / 10},
           (5.18e-7, 1.13e-8, 1.44e-10, 1.46e-12, 1.31e-14, 9.99e-16, 7.77e-16),
           (5.52, 6.29, 6.62, 6.80, 3.71, 0.36), _GENFC_EULER),
    _table("genfc-euler-eps50", "beta", "euler-log", {"eps": 1 / 50},
           (7.38e-4, 4.23e-5, 1.36e-6, 2.59e-8, 3.34e-10, 3.42e-12, 6.33e-13),
           (4.13, 4.96, 5.72, 6.28, 6.61, 2.44), _GENFC_EULER),
    _table("genfc-euler-eps100", "beta", "euler-log", {"eps": 1 / 100},
           (2.79e-3, 1.43e-4, 1.92e-6, 1.56e-7, 6.48e-9, 1.17e-10, 8.35e-12),
           (4.29, 6.22, 3.62, 4.59, 5.80, 3.80), _GENFC_EULER),
)}


def get_table(label: str) -> ReferenceTable:
    try:
        return TABLES[label]
    except KeyError as e:
        raise KeyError(f"Unknown table '{label}'. Available: {', '.join(sorted(TABLES))}") from e
