"""Named test functions and boundary value problems used by sweeps, the CLI and the tool server.

Functions are vectorized callables on [0, 1]. Each entry records the
regularity split r + beta that fixes the predicted convergence rate
min(r + beta, d); smooth functions carry r = inf.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Callable, Dict, Mapping, Optional, Tuple

import numpy as np

from src.common.errors import DomainError, UnknownFunction, UnknownProblem
from src.core.fc.bvp_solver import BvpProblem

logger = logging.getLogger(__name__)


def predicted_rate(r: float, beta: float, d: int) -> float:
    """Theoretical order min(r + beta, d)."""
    return min(r + beta, d)


@dataclass(frozen=True)
class FunctionEntry:
    id: str
    func: Callable
    params: Dict[str, object]
    description: str
    r: float = math.inf
    beta: float = 0.0
    notes: str = ""

    def predicted_rate(self, d: int) -> float:
        return predicted_rate(self.r, self.beta, d)


@dataclass(frozen=True)
class ProblemEntry:
    id: str
    problem: BvpProblem
    params: Dict[str, float]
    textbook_form: str
    conversion: str
    notes: str = field(default="")


def _float_params(params: Mapping[str, object], defaults: Dict[str, float], kind: str, name: str) -> Dict[str, float]:
    unknown = set(params) - set(defaults)
    if unknown:
        raise DomainError(f"Unknown parameters for {kind} '{name}': {', '.join(sorted(unknown))}")
    resolved = dict(defaults)
    for key, value in params.items():
        try:
            resolved[key] = float(value)
        except (TypeError, ValueError) as e:
            raise DomainError(f"Parameter {key} of {kind} '{name}' must be a number, got {value!r}") from e
    return resolved


def _smooth_osc(params):
    def f(x):
        x = np.asarray(x, dtype=np.float64)
        return np.exp(np.sin(65.5 * np.pi * x - 27 * np.pi) - np.cos(20.6 * np.pi * x))
    return FunctionEntry("smooth-osc", f, {}, "exp(sin(65.5 pi x - 27 pi) - cos(20.6 pi x))")


def _abspow(params):
    p = _float_params(params, {"p": 3.5, "center": 0.5}, "function", "abspow")
    power, center = p["p"], p["center"]

    def f(x):
        return np.abs(np.asarray(x, dtype=np.float64) - center) ** power

    r = math.floor(power)
    return FunctionEntry("abspow", f, p, f"|x - {center}|^{power}", r=r, beta=power - r)


def _osc_singular(params):
    p = _float_params(params, {"alpha1": 1.7, "alpha2": 1.0}, "function", "osc-singular")
    alpha1, alpha2 = p["alpha1"], p["alpha2"]
    if alpha2 <= 0 or alpha1 <= alpha2:
        raise DomainError(f"osc-singular needs alpha1 > alpha2 > 0, got {alpha1}, {alpha2}")

    def f(x):
        x = np.asarray(x, dtype=np.float64)
        positive = x > 0
        safe = np.where(positive, x, 1.0)
        return np.where(positive, safe ** alpha1 * np.sin(safe ** -alpha2), 0.0)

    return FunctionEntry(
        "osc-singular", f, p, f"x^{alpha1} sin(x^-{alpha2})",
        r=0.0, beta=(alpha1 - alpha2) / alpha2, notes="f(0) := 0 (removable singularity)",
    )


def _one_sided_pow(params):
    p = _float_params(params, {"beta": 0.4}, "function", "one-sided-pow")
    beta = p["beta"]
    if not 0 < beta < 1:
        raise DomainError(f"one-sided-pow needs beta in (0, 1), got {beta}")

    def f(x):
        return (1.0 - np.asarray(x, dtype=np.float64)) ** (3.0 + beta)

    return FunctionEntry("one-sided-pow", f, p, f"(1 - x)^(3 + {beta})", r=3.0, beta=beta)


def _exp_neg_cos(params):
    p = _float_params(params, {"k": 100.0}, "function", "exp-neg-cos")
    k = p["k"]

    def f(x):
        return np.exp(-np.cos(k * np.asarray(x, dtype=np.float64)))

    return FunctionEntry("exp-neg-cos", f, p, f"exp(-cos({k} x))")


def _inv_shift(params):
    p = _float_params(params, {"eps": 0.01}, "function", "inv-shift")
    eps = p["eps"]
    if eps <= 0:
        raise DomainError(f"inv-shift needs eps > 0, got {eps}")

    def f(x):
        return 1.0 / (np.asarray(x, dtype=np.float64) + eps)

    return FunctionEntry("inv-shift", f, p, f"1 / (x + {eps})")


def _const(params):
    p = _float_params(params, {"value": 1.0}, "function", "const")
    value = p["value"]

    def f(x):
        return np.full(np.shape(x), value, dtype=np.float64)

    return FunctionEntry("const", f, p, f"{value}")


def _poly(params):
    raw = params.get("coefficients", (0.0, 1.0))
    if set(params) - {"coefficients"}:
        raise DomainError("poly takes only 'coefficients'")
    if isinstance(raw, str):
        raw = raw.replace(";", ",").split(",")
    try:
        coefficients = tuple(float(c) for c in raw)
    except (TypeError, ValueError) as e:
        raise DomainError(f"poly coefficients must be numbers, got {raw!r}") from e

    def f(x):
        return np.polynomial.polynomial.polyval(np.asarray(x, dtype=np.float64), coefficients)

    return FunctionEntry("poly", f, {"coefficients": coefficients}, f"polynomial {coefficients}")


FUNCTIONS: Dict[str, Callable[[Mapping[str, object]], FunctionEntry]] = {
    "smooth-osc": _smooth_osc,
    "abspow": _abspow,
    "osc-singular": _osc_singular,
    "one-sided-pow": _one_sided_pow,
    "exp-neg-cos": _exp_neg_cos,
    "inv-shift": _inv_shift,
    "const": _const,
    "poly": _poly,
}


def function_registry(function_id: str, params: Optional[Mapping[str, object]] = None) -> FunctionEntry:
    try:
        factory = FUNCTIONS[function_id]
    except KeyError as e:
        raise UnknownFunction(
            f"Unknown function '{function_id}'. Available: {', '.join(sorted(FUNCTIONS))}"
        ) from e
    if function_id == "smooth-osc" and params:
        raise DomainError("smooth-osc takes no parameters")
    return factory(dict(params or {}))


def _coskx(params) -> ProblemEntry:
    p = _float_params(params, {"lam": 0.1, "k": 100.0}, "problem", "coskx")
    lam, k = p["lam"], p["k"]
    if lam <= 0:
        raise DomainError(f"coskx needs lam > 0, got {lam}")
    rate = 1.0 / math.sqrt(lam)
    amplitude = 1.0 / (1.0 + lam * k * k)

    # u(0) = u(1) = 0 fixes A e^{x/sqrt(lam)} + B e^{-x/sqrt(lam)}
    system = np.array([[1.0, 1.0], [math.exp(rate), math.exp(-rate)]])
    A, B = np.linalg.solve(system, [-amplitude, -amplitude * math.cos(k)])

    def exact(x):
        x = np.asarray(x, dtype=np.float64)
        return amplitude * np.cos(k * x) + A * np.exp(rate * x) + B * np.exp(-rate * x)

    problem = BvpProblem(
        P=lambda x: np.zeros_like(np.asarray(x, dtype=np.float64)),
        Q=lambda x: np.full(np.shape(x), -1.0 / lam),
        R=lambda x: np.cos(k * np.asarray(x, dtype=np.float64)) / lam,
        a0=1.0, b0=0.0, c0=0.0,
        a1=1.0, b1=0.0, c1=0.0,
        h1=lambda x: np.exp(rate * np.asarray(x, dtype=np.float64)),
        dh1=lambda x: rate * np.exp(rate * np.asarray(x, dtype=np.float64)),
        h2=lambda x: np.exp(-rate * np.asarray(x, dtype=np.float64)),
        dh2=lambda x: -rate * np.exp(-rate * np.asarray(x, dtype=np.float64)),
        exact_solution=exact,
    )
    return ProblemEntry(
        "coskx", problem, p,
        textbook_form=f"-{lam} u'' + u = cos({k} x), u(0) = u(1) = 0",
        conversion=f"divide by -{lam}: P = 0, Q = -1/{lam}, R = cos({k} x)/{lam}",
    )


def _euler_log(params) -> ProblemEntry:
    p = _float_params(params, {"eps": 0.01}, "problem", "euler-log")
    eps = p["eps"]
    if eps <= 0:
        raise DomainError(f"euler-log needs eps > 0, got {eps}")

    def shifted(x):
        return np.asarray(x, dtype=np.float64) + eps

    def particular(t):
        return -(3.0 * np.sin(np.log(t)) + np.cos(np.log(t))) / 10.0

    # u = u_p + C1 t + C2 t^-2 with u(0) = 1, u(1) = 2
    t0, t1 = eps, 1.0 + eps
    system = np.array([[t0, t0 ** -2], [t1, t1 ** -2]])
    C1, C2 = np.linalg.solve(system, [1.0 - particular(t0), 2.0 - particular(t1)])

    def exact(x):
        t = shifted(x)
        return particular(t) + C1 * t + C2 * t ** -2

    problem = BvpProblem(
        P=lambda x: 2.0 / shifted(x),
        Q=lambda x: -2.0 / shifted(x) ** 2,
        R=lambda x: -np.sin(np.log(shifted(x))) / shifted(x) ** 2,
        a0=1.0, b0=0.0, c0=1.0,
        a1=1.0, b1=0.0, c1=2.0,
        h1=shifted,
        dh1=lambda x: np.ones_like(shifted(x)),
        h2=lambda x: shifted(x) ** -2,
        dh2=lambda x: -2.0 * shifted(x) ** -3,
        exact_solution=exact,
    )
    return ProblemEntry(
        "euler-log", problem, p,
        textbook_form=f"(x+{eps})^2 u'' + 2(x+{eps}) u' - 2u = sin(log(x+{eps})), u(0) = 1, u(1) = 2",
        conversion=f"divide by (x+{eps})^2: P = 2/(x+{eps}), Q = -2/(x+{eps})^2, R = -sin(log(x+{eps}))/(x+{eps})^2",
    )


PROBLEMS: Dict[str, Callable[[Mapping[str, object]], ProblemEntry]] = {
    "coskx": _coskx,
    "euler-log": _euler_log,
}


def problem_registry(problem_id: str, params: Optional[Mapping[str, object]] = None) -> ProblemEntry:
    try:
        factory = PROBLEMS[problem_id]
    except KeyError as e:
        raise UnknownProblem(
            f"Unknown problem '{problem_id}'. Available: {', '.join(sorted(PROBLEMS))}"
        ) from e
    return factory(dict(params or {}))


def parse_params(pairs: Optional[Tuple[str, ...]]) -> Dict[str, str]:
    """'k=v' strings from the command line into a dict (values stay strings)."""
    params = {}
    for pair in pairs or ():
        key, sep, value = pair.partition("=")
        if not sep or not key.strip():
            raise DomainError(f"Expected key=value, got {pair!r}")
        params[key.strip()] = value.strip()
    return params
