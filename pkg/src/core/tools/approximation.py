import logging
import time
from dataclasses import asdict, dataclass, field
from datetime import datetime
from typing import Any, Dict, List, Optional

from src.common.errors import FcGramError
from src.common.settings import Settings
from src.core.fc.bvp_solver import solve_bvp
from src.core.fc.gram_basis import build_gram_basis
from src.core.fc.grid_core import validate_config
from src.core.fc.shape_functions import FamilyTag, ShapeFamily, family_from_name, sample_profiles
from src.core.study.harness import StudyKind, StudySpec, detect_stagnation, parse_n_range, run_convergence
from src.core.study.registry import FUNCTIONS, PROBLEMS, function_registry, problem_registry

logger = logging.getLogger(__name__)


@dataclass
class ConvergenceResult:
    """Data class to hold a convergence sweep for one or more shape families"""
    target: str
    kind: str
    settings: Dict[str, Any]
    rows: Dict[str, List[Dict[str, Any]]]
    timestamp: str
    processing_time: float
    success: bool
    stagnation: Dict[str, Optional[Dict[str, float]]] = field(default_factory=dict)
    predicted_rate: Optional[float] = None
    error_message: str = ""


@dataclass
class BvpResult:
    """Data class to hold a single boundary value problem solve"""
    problem: str
    n: int
    family: str
    xi1: float
    xi2: float
    residual_norm: float
    condition_number: float
    boundary_residual: float
    error: Optional[float]
    timestamp: str
    processing_time: float
    success: bool
    error_message: str = ""


@dataclass
class ShapeSampleResult:
    family: str
    ell: int
    samples: Dict[str, List[float]]
    timestamp: str
    success: bool
    error_message: str = ""


class FourierContinuationTool:
    """MCP tool for Fourier-continuation approximation studies and BVP solves"""

    def __init__(self, settings: Optional[Settings] = None):
        self.settings = settings or Settings.from_env()

    def _family(self, name: str, d: int) -> ShapeFamily:
        return family_from_name(name, d)

    def _get_timestamp(self) -> str:
        return datetime.now().isoformat()

    def approximate_function(self, function_id: str, params: Optional[Dict[str, Any]] = None, d: int = 5,
                             b: str = "2", family: str = "beta", n_range: str = "2^6:2^10",
                             ref_grid: Optional[int] = None) -> ConvergenceResult:
        """
        Run a function-approximation convergence sweep

        Args:
            function_id: Registry id (e.g. "smooth-osc", "abspow")
            params: Function parameters (e.g. {"p": 3.5})
            d: Number of Gram polynomials
            b: Extension period as a rational string ("2", "3/2")
            family: Shape family name
            n_range: Doubling range, e.g. "2^6:2^10"
            ref_grid: Reference grid size N (defaults to FCGRAM_REF_GRID)

        Returns:
            ConvergenceResult with one row set under the family name
        """
        return self.compare_shape_families(function_id, params, d, b, [family], n_range, ref_grid)

    def compare_shape_families(self, function_id: str, params: Optional[Dict[str, Any]] = None, d: int = 5,
                               b: str = "2", families: Optional[List[str]] = None, n_range: str = "2^6:2^10",
                               ref_grid: Optional[int] = None) -> ConvergenceResult:
        start_time = time.time()
        families = families or [FamilyTag.REG_BETA.value, FamilyTag.HERMITE.value]
        ref_grid = ref_grid or self.settings.ref_grid
        try:
            entry = function_registry(function_id, params)
            rows, stagnation = {}, {}
            for name in families:
                spec = StudySpec(kind=StudyKind.APPROX, target=function_id, family=self._family(name, d),
                                 params=dict(params or {}), d=d, b=b, n_range=parse_n_range(n_range),
                                 ref_grid=ref_grid, workers=self.settings.workers)
                sweep = run_convergence(spec)
                rows[name] = [asdict(row) for row in sweep]
                stalled = detect_stagnation(sweep)
                stagnation[name] = None if stalled is None else {"start_n": stalled.start_n, "level": stalled.level}

            return ConvergenceResult(
                target=function_id,
                kind=StudyKind.APPROX.value,
                settings={"d": d, "b": str(b), "n_range": n_range, "ref_grid": ref_grid},
                rows=rows,
                timestamp=self._get_timestamp(),
                processing_time=time.time() - start_time,
                success=True,
                stagnation=stagnation,
                predicted_rate=entry.predicted_rate(d),
            )
        except (FcGramError, ValueError) as e:
            logger.error(f"Approximation sweep for {function_id} failed: {e}")
            return ConvergenceResult(
                target=function_id,
                kind=StudyKind.APPROX.value,
                settings={"d": d, "b": str(b), "n_range": n_range, "ref_grid": ref_grid},
                rows={},
                timestamp=self._get_timestamp(),
                processing_time=time.time() - start_time,
                success=False,
                error_message=str(e),
            )

    def solve_boundary_value_problem(self, problem_id: str, params: Optional[Dict[str, Any]] = None,
                                     n: int = 256, family: str = "beta", d: int = 5) -> BvpResult:
        start_time = time.time()
        try:
            if n > self.settings.bvp_max_n:
                raise ValueError(f"n={n} exceeds FCGRAM_BVP_MAX_N={self.settings.bvp_max_n}")
            entry = problem_registry(problem_id, params)
            cfg = validate_config(n, 2, d)
            solution = solve_bvp(entry.problem, cfg, self._family(family, d), self.settings.ref_grid)
            return BvpResult(
                problem=problem_id,
                n=n,
                family=family,
                xi1=solution.xi1,
                xi2=solution.xi2,
                residual_norm=solution.residual_norm,
                condition_number=solution.condition_number,
                boundary_residual=solution.boundary_residual(),
                error=solution.error,
                timestamp=self._get_timestamp(),
                processing_time=time.time() - start_time,
                success=True,
            )
        except (FcGramError, ValueError) as e:
            logger.error(f"BVP {problem_id} at n={n} failed: {e}")
            return BvpResult(
                problem=problem_id, n=n, family=family, xi1=float("nan"), xi2=float("nan"),
                residual_norm=float("nan"), condition_number=float("nan"), boundary_residual=float("nan"),
                error=None, timestamp=self._get_timestamp(), processing_time=time.time() - start_time,
                success=False, error_message=str(e),
            )

    def sample_shape_function(self, family: str = "beta", d: int = 5, b: str = "2", n: int = 32,
                              ell: int = 0, samples: int = 101) -> ShapeSampleResult:
        try:
            cfg = validate_config(n, b, d)
            profiles = sample_profiles(self._family(family, d), build_gram_basis(d), cfg, ell, samples)
            return ShapeSampleResult(
                family=family,
                ell=ell,
                samples={key: values.tolist() for key, values in profiles.items()},
                timestamp=self._get_timestamp(),
                success=True,
            )
        except (FcGramError, ValueError) as e:
            return ShapeSampleResult(family=family, ell=ell, samples={}, timestamp=self._get_timestamp(),
                                     success=False, error_message=str(e))

    def list_registries(self) -> Dict[str, Any]:
        functions = {}
        for function_id in sorted(FUNCTIONS):
            entry = function_registry(function_id)
            functions[function_id] = {"description": entry.description, "defaults": dict(entry.params),
                                      "notes": entry.notes}
        problems = {}
        for problem_id in sorted(PROBLEMS):
            entry = problem_registry(problem_id)
            problems[problem_id] = {"textbook_form": entry.textbook_form, "conversion": entry.conversion,
                                    "defaults": dict(entry.params)}
        return {
            "functions": functions,
            "problems": problems,
            "families": [tag.value for tag in FamilyTag],
        }
