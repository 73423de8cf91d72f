#!/usr/bin/env python3
"""
Example usage of the Fourier Continuation tool

This script demonstrates approximation sweeps, family comparisons, BVP solves
and shape-function sampling through the same facade the MCP server uses.
"""

import os
import sys

# Add the project root to Python path so we can import from src
sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

from src.core.tools.approximation import FourierContinuationTool


def print_rows(rows):
    for row in rows:
        noc_text = "-" if row["noc_n"] is None else f"{row['noc_n']:.2f}"
        print(f"  n={row['n']:>5}  e_n={row['e_n']:.3e}  noc={noc_text}")


def main():
    """Example usage of the FourierContinuationTool class"""

    try:
        tool = FourierContinuationTool()
        print("✅ Fourier continuation tool initialized successfully")

        # Example 1: Registered functions and problems
        print("\n📚 Registries:")
        registries = tool.list_registries()
        for function_id, info in registries["functions"].items():
            print(f"  function {function_id}: {info['description']} {info['defaults']}")
        for problem_id, info in registries["problems"].items():
            print(f"  problem {problem_id}: {info['textbook_form']}")
        print(f"  families: {', '.join(registries['families'])}")

        # Example 2: Limited-regularity function, rate min(r + beta, d)
        print("\n📈 Convergence sweep for |x - 1/2|^3.5 (d=5, b=2, beta family):")
        result = tool.approximate_function("abspow", {"p": 3.5}, d=5, n_range="2^6:2^10", ref_grid=2 ** 14)
        if result.success:
            print_rows(result.rows["beta"])
            print(f"  predicted rate: {result.predicted_rate}")
            print(f"  took {result.processing_time:.2f}s")
        else:
            print(f"  Error: {result.error_message}")

        # Example 3: Beta vs Hermite shape functions on a sharp function
        print("\n⚖️  Shape family comparison for 1/(x + 0.01):")
        result = tool.compare_shape_families("inv-shift", {"eps": 0.01}, families=["beta", "hermite"],
                                             n_range="2^6:2^10", ref_grid=2 ** 14)
        if result.success:
            for family, rows in result.rows.items():
                print(f" {family}:")
                print_rows(rows)
                if result.stagnation[family]:
                    print(f"  stagnates from n={result.stagnation[family]['start_n']}")
        else:
            print(f"  Error: {result.error_message}")

        # Example 4: Boundary value problem
        print("\n🧮 BVP -0.1 u'' + u = cos(20 x), u(0) = u(1) = 0:")
        for n in (64, 128, 256):
            solved = tool.solve_boundary_value_problem("coskx", {"lam": 0.1, "k": 20}, n=n)
            if solved.success:
                print(f"  n={n}: e_n={solved.error:.3e}  boundary residual={solved.boundary_residual:.1e}")
            else:
                print(f"  n={n}: Error: {solved.error_message}")

        # Example 5: Shape function samples on [1, b]
        print("\n🔍 Beta shape function, ell=0:")
        shape = tool.sample_shape_function("beta", d=5, n=32, ell=0, samples=6)
        if shape.success:
            for x, eta in zip(shape.samples["x"], shape.samples["eta_right"]):
                print(f"  eta({x:.2f}) = {eta:.6f}")

        # Example 6: Error handling examples
        print("\n⚠️  Error Handling Examples:")
        failures = [
            tool.approximate_function("sinc"),
            tool.approximate_function("abspow", d=13),
            tool.approximate_function("smooth-osc", b="3/2", n_range="3:6"),
            tool.solve_boundary_value_problem("coskx", n=1 << 20),
        ]
        for failed in failures:
            print(f"  Error: {failed.error_message}")

    except Exception as e:
        print(f"❌ Error: {str(e)}")


if __name__ == "__main__":
    main()
