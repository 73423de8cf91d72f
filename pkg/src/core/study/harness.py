"""Convergence sweeps, comparison against published tables and CSV emission."""

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from enum import Enum
from fractions import Fraction
from io import StringIO
from math import factorial, log10, perm
from pathlib import Path
from typing import Callable, Dict, Iterable, List, Mapping, Optional, Sequence, TextIO, Tuple, Union

import numpy as np
import pandas as pd

from src.common.errors import FcGramError, NonDyadicSequence, RowMismatch, SweepFailed
from src.core.fc.bvp_solver import solve_bvp
from src.core.fc.continuation import continuation_sup_norm, extend_function
from src.core.fc.gram_basis import build_gram_basis
from src.core.fc.grid_core import parse_period, validate_config
from src.core.fc.shape_functions import ShapeFamily, Side, build_blend_table, hermite_unit_coeffs, sample_profiles
from src.core.fc.trig_interp import ConvergenceRow, approx_error, dft_coeffs, dft_from_samples, eval_interpolant, noc
from src.core.study.reference_tables import TABLES, ReferenceTable
from src.core.study.registry import function_registry, problem_registry

logger = logging.getLogger(__name__)

DEFAULT_N_RANGE = tuple(2 ** p for p in range(6, 13))
STAGNATION_BAND = 0.5
STAGNATION_FACTOR = 3.0
TABLE_NOC_TOLERANCE = 1.0
TABLE_NOC_MINIMUM = 1.0


class StudyKind(str, Enum):
    APPROX = "approx"
    BVP = "bvp"
    SHAPE_DUMP = "shape"


def parse_n_range(text: str) -> Tuple[int, ...]:
    """'2^6:2^12' (or '64:4096') into the doubling sequence 64, 128, ..., 4096."""
    def parse_one(token: str) -> int:
        token = token.strip()
        if "^" in token:
            base, exponent = token.split("^", 1)
            return int(base) ** int(exponent)
        return int(token)

    start_text, sep, stop_text = text.partition(":")
    try:
        start = parse_one(start_text)
        stop = parse_one(stop_text) if sep else start
    except ValueError as e:
        raise NonDyadicSequence(f"Cannot read n range {text!r}") from e
    if start < 1 or stop < start:
        raise NonDyadicSequence(f"n range {text!r} is empty")

    values = [start]
    while values[-1] < stop:
        values.append(values[-1] * 2)
    if values[-1] != stop:
        raise NonDyadicSequence(f"{stop} is not reached from {start} by doubling")
    return tuple(values)


@dataclass(frozen=True)
class StudySpec:
    kind: StudyKind
    target: str
    family: ShapeFamily
    params: Mapping[str, object] = field(default_factory=dict)
    d: int = 5
    b: Fraction = Fraction(2)
    n_range: Tuple[int, ...] = DEFAULT_N_RANGE
    ref_grid: int = 2 ** 17
    ell: int = 0
    samples: int = 1000
    shape_config: Optional[str] = None
    workers: int = 1

    def __post_init__(self):
        object.__setattr__(self, "kind", StudyKind(self.kind))
        object.__setattr__(self, "b", parse_period(self.b))
        object.__setattr__(self, "n_range", tuple(int(n) for n in self.n_range))
        self.family.check_compatible(self.d)
        if self.kind is StudyKind.SHAPE_DUMP:
            return
        if not self.n_range:
            raise NonDyadicSequence("n range is empty")
        for previous, current in zip(self.n_range, self.n_range[1:]):
            if current != 2 * previous:
                raise NonDyadicSequence(f"n={current} does not follow n={previous} by doubling")
        for n in self.n_range:
            validate_config(n, self.b, self.d)

    def header(self) -> Dict[str, str]:
        """Key/value lines that reconstruct this spec."""
        info = {"kind": self.kind.value}
        info["problem" if self.kind is StudyKind.BVP else "function"] = self.target
        for key, value in sorted(self.params.items()):
            info[f"param.{key}"] = str(value)
        info.update(d=str(self.d), b=str(self.b))
        info.update({f"shape.{k}": v for k, v in self.family.describe(self.d).items()})
        if self.shape_config:
            info["shape.config"] = self.shape_config
        if self.kind is StudyKind.SHAPE_DUMP:
            info.update(ell=str(self.ell), samples=str(self.samples), n=str(self.n_range[0]))
        else:
            info.update(n_range=",".join(str(n) for n in self.n_range), ref_grid=str(self.ref_grid))
        return info


def _approx_error_at(spec: StudySpec, func: Callable) -> Callable[[int], float]:
    def run(n: int) -> float:
        cfg = validate_config(n, spec.b, spec.d)
        data = extend_function(func, cfg, spec.family)
        return approx_error(func, dft_coeffs(data), spec.ref_grid)
    return run


def _bvp_error_at(spec: StudySpec) -> Callable[[int], float]:
    problem = problem_registry(spec.target, spec.params).problem

    def run(n: int) -> float:
        cfg = validate_config(n, spec.b, spec.d)
        return solve_bvp(problem, cfg, spec.family, spec.ref_grid).error
    return run


def run_convergence(spec: StudySpec) -> List[ConvergenceRow]:
    """e_n for every n of the sweep, then noc_n; rows come back in n order."""
    if spec.kind is StudyKind.APPROX:
        error_at = _approx_error_at(spec, function_registry(spec.target, spec.params).func)
    elif spec.kind is StudyKind.BVP:
        error_at = _bvp_error_at(spec)
    else:
        raise ValueError(f"run_convergence does not handle {spec.kind.value} studies")

    def guarded(n: int) -> ConvergenceRow:
        try:
            e_n = error_at(n)
        except FcGramError as e:
            raise SweepFailed(n, e) from e
        logger.info(f"{spec.kind.value} {spec.target} [{spec.family.tag.value}] n={n}: e_n={e_n:.3e}")
        return ConvergenceRow(n=n, e_n=e_n)

    logger.info(f"Starting {spec.kind.value} sweep for {spec.target}, n in {list(spec.n_range)}")
    with ThreadPoolExecutor(max_workers=max(1, spec.workers)) as pool:
        rows = list(pool.map(guarded, spec.n_range))
    logger.info(f"Finished {spec.kind.value} sweep for {spec.target}")
    return noc(rows)


def run_family_comparison(spec: StudySpec, families: Sequence[ShapeFamily]) -> Dict[str, List[ConvergenceRow]]:
    """Same sweep once per shape family, keyed by family name."""
    results = {}
    for family in families:
        results[family.tag.value] = run_convergence(
            StudySpec(kind=spec.kind, target=spec.target, family=family, params=spec.params, d=spec.d,
                      b=spec.b, n_range=spec.n_range, ref_grid=spec.ref_grid, workers=spec.workers)
        )
    return results


@dataclass(frozen=True)
class RowComparison:
    n: int
    e_n: float
    e_published: float
    decades: float
    error_ok: bool
    noc_n: Optional[float] = None
    noc_published: Optional[float] = None
    noc_ok: Optional[bool] = None

    @property
    def passed(self) -> bool:
        return self.error_ok and self.noc_ok is not False


@dataclass(frozen=True)
class TableReport:
    label: str
    tolerance_decades: float
    rows: Tuple[RowComparison, ...]

    @property
    def passed(self) -> bool:
        return all(row.passed for row in self.rows)

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame([asdict(row) for row in self.rows])


def compare_to_table(rows: Sequence[ConvergenceRow], table: ReferenceTable, tolerance_decades: float) -> TableReport:
    """Per-row check |log10 e_n - log10 e_published| <= tolerance_decades.

    noc is compared within 1.0 only where the published noc is at least
    1.0, i.e. before stagnation.
    """
    published = {n: (e, order) for n, e, order in table.rows}
    compared = []
    for row in rows:
        if row.n not in published:
            raise RowMismatch(f"n={row.n} does not appear in table {table.label}")
        e_published, noc_published = published[row.n]
        with np.errstate(divide="ignore"):
            decades = abs(float(np.log10(row.e_n)) - log10(e_published))
        error_ok = decades <= tolerance_decades

        noc_ok = None
        if noc_published is not None and noc_published >= TABLE_NOC_MINIMUM and row.noc_n is not None:
            noc_ok = abs(row.noc_n - noc_published) <= TABLE_NOC_TOLERANCE
        compared.append(RowComparison(
            n=row.n, e_n=row.e_n, e_published=e_published, decades=decades, error_ok=error_ok,
            noc_n=row.noc_n, noc_published=noc_published, noc_ok=noc_ok,
        ))
    return TableReport(label=table.label, tolerance_decades=tolerance_decades, rows=tuple(compared))


@dataclass(frozen=True)
class Stagnation:
    start_n: int
    level: float


def detect_stagnation(rows: Sequence[ConvergenceRow]) -> Optional[Stagnation]:
    """First run of three consecutive noc in [-0.5, 0.5] whose errors stay within 3x of the level.

    The level is e_n of the row just before the run.
    """
    rows = list(rows)
    for start in range(1, len(rows) - 2):
        window = rows[start:start + 3]
        if any(r.noc_n is None or not -STAGNATION_BAND <= r.noc_n <= STAGNATION_BAND for r in window):
            continue
        level = rows[start - 1].e_n
        errors = [r.e_n for r in rows[start - 1:start + 3]]
        if all(level / STAGNATION_FACTOR <= e <= level * STAGNATION_FACTOR for e in errors):
            return Stagnation(start_n=rows[start - 1].n, level=level)
    return None


# ---------------------------------------------------------------- CSV output

def _write_with_header(frame: pd.DataFrame, header: Mapping[str, str], out: Union[str, Path, TextIO, None],
                       float_format: str = "%.6e") -> str:
    buffer = StringIO()
    for key, value in header.items():
        buffer.write(f"# {key}={value}\n")
    frame.to_csv(buffer, index=False, na_rep="", float_format=float_format, lineterminator="\n")
    text = buffer.getvalue()
    if isinstance(out, (str, Path)):
        Path(out).write_text(text)
        logger.info(f"Wrote {len(frame)} rows to {out}")
    elif out is not None:
        out.write(text)
    return text


def rows_to_frame(rows: Sequence[ConvergenceRow]) -> pd.DataFrame:
    return pd.DataFrame({
        "n": [r.n for r in rows],
        "e_n": [r.e_n for r in rows],
        "noc_n": [np.nan if r.noc_n is None else r.noc_n for r in rows],
    })


def write_csv(rows: Sequence[ConvergenceRow], header: Mapping[str, str],
              out: Union[str, Path, TextIO, None] = None) -> str:
    """'# key=value' header lines, then n,e_n,noc_n rows. Returns the text written."""
    return _write_with_header(rows_to_frame(rows), header, out)


def write_comparison_csv(results: Mapping[str, Sequence[ConvergenceRow]], header: Mapping[str, str],
                         out: Union[str, Path, TextIO, None] = None) -> str:
    frame = None
    for name, rows in results.items():
        columns = rows_to_frame(rows).rename(columns={"e_n": f"e_n_{name}", "noc_n": f"noc_n_{name}"})
        frame = columns if frame is None else frame.merge(columns, on="n", how="outer")
    return _write_with_header(frame if frame is not None else pd.DataFrame(), header, out)


def run_shape_dump(spec: StudySpec) -> pd.DataFrame:
    cfg = validate_config(spec.n_range[0], spec.b, spec.d)
    basis = build_gram_basis(spec.d)
    return pd.DataFrame(sample_profiles(spec.family, basis, cfg, spec.ell, spec.samples))


def write_shape_csv(frame: pd.DataFrame, header: Mapping[str, str],
                    out: Union[str, Path, TextIO, None] = None) -> str:
    """Full-precision sample columns x, eta_right, eta_left, blend_right, blend_left."""
    return _write_with_header(frame, header, out, float_format="%.17g")


# ---------------------------------------------------------------- verify suites

@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str


def verify_published_tables(max_n: int, tolerance_decades: float = 1.0, ref_grid: int = 2 ** 17,
                            labels: Optional[Iterable[str]] = None, workers: int = 1) -> List[CheckResult]:
    """Re-run the published BVP columns up to max_n and compare row by row."""
    results = []
    for label in labels or sorted(TABLES):
        table = TABLES[label]
        n_range = tuple(n for n, _, _ in table.rows if n <= max_n)
        spec = StudySpec(
            kind=StudyKind.BVP, target=table.problem, params=table.param_dict,
            family=ShapeFamily.hermite() if table.family == "hermite" else ShapeFamily.reg_beta(5),
            d=5, b=Fraction(2), n_range=n_range, ref_grid=ref_grid, workers=workers,
        )
        report = compare_to_table(run_convergence(spec), table, tolerance_decades)
        failing = [row.n for row in report.rows if not row.passed]
        detail = "all rows within tolerance" if not failing else f"rows outside tolerance at n={failing}"
        results.append(CheckResult(name=f"table {label}", passed=report.passed, detail=detail))
    return results


def _check(name: str, condition: bool, detail: str) -> CheckResult:
    return CheckResult(name=name, passed=bool(condition), detail=detail)


def verify_invariants(sup_samples: int = 1001) -> List[CheckResult]:
    """Fast structural checks of the continuation machinery."""
    checks = []

    residual = max(build_gram_basis(d).orthonormality_residual() for d in range(2, 8))
    checks.append(_check("gram orthonormality d=2..7", residual <= 1e-10, f"max residual {residual:.2e}"))

    exact = True
    for d in range(2, 8):
        for m in range(d):
            coeffs = hermite_unit_coeffs(d, m)
            for k in range(d):
                at_start = coeffs[k] * factorial(k)
                at_end = sum(c * perm(j, k) for j, c in enumerate(coeffs))
                exact &= at_start == (1 if k == m else 0) and at_end == 0
    checks.append(_check("hermite endpoint conditions (exact)", exact, "rational coefficient arithmetic"))

    cfg = validate_config(32, 2, 5)
    basis = build_gram_basis(5)
    endpoint_ok = True
    for family in (ShapeFamily.hermite(), ShapeFamily.bump(), ShapeFamily.double_exp(), ShapeFamily.reg_beta(5)):
        profile = sample_profiles(family, basis, cfg, 0, 3)
        endpoint_ok &= profile["eta_right"][0] == 1.0 and profile["eta_right"][-1] == 0.0
        endpoint_ok &= profile["eta_left"][0] == 0.0 and profile["eta_left"][-1] == 1.0
    checks.append(_check("shape endpoint values", endpoint_ok, "eta(1) = 1 and eta(b) = 0 for all families"))

    hermite = continuation_sup_norm(build_blend_table(ShapeFamily.hermite(), basis, cfg), 4, Side.RIGHT, sup_samples)
    beta = continuation_sup_norm(build_blend_table(ShapeFamily.reg_beta(5), basis, cfg), 4, Side.RIGHT, sup_samples)
    checks.append(_check("hermite sup-norm of p_4^{R,e} near 2627", abs(hermite - 2627) <= 0.05 * 2627,
                         f"{hermite:.1f} at n=32, d=5, b=2"))
    checks.append(_check("beta sup-norm reduction >= 20x", beta * 20 <= hermite, f"{beta:.2f} vs {hermite:.1f}"))

    rng = np.random.default_rng(0)
    modes = np.arange(1, 16)
    amplitudes = rng.standard_normal(15) + 1j * rng.standard_normal(15)

    def trig_poly(x):
        return 2.0 * (np.exp(1j * np.pi * np.outer(x, modes)) @ amplitudes).real

    interpolant = dft_from_samples(trig_poly(np.arange(32) / 16), 2)
    x = rng.uniform(0.0, 2.0, 17)
    expected = trig_poly(x)
    error = np.max(np.abs(eval_interpolant(interpolant, x) - expected)) / np.max(np.abs(expected))
    checks.append(_check("trigonometric reproduction", error <= 1e-12, f"relative error {error:.2e}"))
    return checks
