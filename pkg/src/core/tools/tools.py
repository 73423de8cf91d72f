from dataclasses import asdict
from typing import Any, Dict, List, Optional

from fastmcp import FastMCP

from src.core.tools.approximation import FourierContinuationTool

continuation_mcp = FastMCP("Fourier Continuation Bot")


@continuation_mcp.tool
def approximate_function(function_id: str, params: Optional[Dict[str, Any]] = None, d: int = 5, b: str = "2",
                         family: str = "beta", n_range: str = "2^6:2^10") -> Dict[str, Any]:
    """
    Run an FC-Gram convergence study for a registered test function

    Args:
        function_id: Function id, e.g. "smooth-osc", "abspow", "exp-neg-cos" (see list_registries)
        params: Function parameters, e.g. {"p": 3.5} for abspow
        d: Number of Gram polynomials (2-12)
        b: Extension period as a rational string, e.g. "2", "3/2", "5/4"
        family: Shape family - 'hermite', 'bump', 'doubleexp' or 'beta'
        n_range: Doubling sequence of grid sizes, e.g. "2^6:2^10"

    Returns:
        Dictionary with e_n / noc_n rows and the predicted convergence rate
    """
    try:
        result = FourierContinuationTool().approximate_function(function_id, params, d, b, family, n_range)
        if not result.success:
            return {"success": False, "error": result.error_message}
        return {
            "success": True,
            "data": {
                "function": result.target,
                "settings": result.settings,
                "rows": result.rows[family],
                "stagnation": result.stagnation[family],
                "predicted_rate": result.predicted_rate,
                "processing_time": result.processing_time,
                "timestamp": result.timestamp,
            }
        }
    except Exception as e:
        return {
            "success": False,
            "error": str(e)
        }


@continuation_mcp.tool
def compare_shape_families(function_id: str, params: Optional[Dict[str, Any]] = None, d: int = 5, b: str = "2",
                           families: Optional[List[str]] = None, n_range: str = "2^6:2^10") -> Dict[str, Any]:
    """
    Run the same convergence study with several shape families (default: beta vs hermite)

    Args:
        function_id: Function id (see list_registries)
        params: Function parameters
        d: Number of Gram polynomials
        b: Extension period as a rational string
        families: Shape family names to compare
        n_range: Doubling sequence of grid sizes

    Returns:
        Dictionary with one row set per family
    """
    try:
        result = FourierContinuationTool().compare_shape_families(function_id, params, d, b, families, n_range)
        if not result.success:
            return {"success": False, "error": result.error_message}
        return {
            "success": True,
            "data": {
                "function": result.target,
                "settings": result.settings,
                "rows": result.rows,
                "stagnation": result.stagnation,
                "predicted_rate": result.predicted_rate,
                "processing_time": result.processing_time,
            }
        }
    except Exception as e:
        return {
            "success": False,
            "error": str(e)
        }


@continuation_mcp.tool
def solve_boundary_value_problem(problem_id: str, params: Optional[Dict[str, Any]] = None, n: int = 256,
                                 family: str = "beta") -> Dict[str, Any]:
    """
    Solve a registered two-point BVP with the Fourier-continuation solver (b = 2, d = 5)

    Args:
        problem_id: 'coskx' (params lam, k) or 'euler-log' (param eps)
        params: Problem parameters
        n: Grid size (power of two, at most FCGRAM_BVP_MAX_N)
        family: Shape family used to continue the coefficient functions

    Returns:
        Dictionary with boundary correction, residuals and relative error
    """
    try:
        result = FourierContinuationTool().solve_boundary_value_problem(problem_id, params, n, family)
        if not result.success:
            return {"success": False, "error": result.error_message}
        data = asdict(result)
        data.pop("success")
        data.pop("error_message")
        return {"success": True, "data": data}
    except Exception as e:
        return {
            "success": False,
            "error": str(e)
        }


@continuation_mcp.tool
def sample_shape_function(family: str = "beta", d: int = 5, b: str = "2", n: int = 32, ell: int = 0,
                          samples: int = 101) -> Dict[str, Any]:
    """
    Sample a shape function and its blending-to-zero continuation on [1, b]

    Args:
        family: Shape family name
        d: Number of Gram polynomials
        b: Extension period
        n: Grid size (sets the matching width (d-1)/n)
        ell: Gram polynomial index
        samples: Number of equispaced samples

    Returns:
        Dictionary with x, eta_right, eta_left, blend_right, blend_left
    """
    try:
        result = FourierContinuationTool().sample_shape_function(family, d, b, n, ell, samples)
        if not result.success:
            return {"success": False, "error": result.error_message}
        return {"success": True, "data": result.samples}
    except Exception as e:
        return {
            "success": False,
            "error": str(e)
        }


@continuation_mcp.tool
def list_registries() -> Dict[str, Any]:
    """
    List the available test functions, boundary value problems and shape families

    Returns:
        Dictionary of registry entries with their default parameters
    """
    try:
        return {"success": True, "data": FourierContinuationTool().list_registries()}
    except Exception as e:
        return {
            "success": False,
            "error": str(e)
        }
