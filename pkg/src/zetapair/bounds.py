"""Zero-proportion lower bounds from the ratio C_b(j).

    C_b(j) = (j(0) + 2 int_0^1 a j(a) / cosh(b a) da) / (2 int_0^1 j(a) / cosh(b a) da)

For zeros confined to a box of width ``b / log T`` around the critical line,
the simple zeros and the critical zeros each make up at least ``2 - C_b``
of all zeros, and the simple critical zeros at least ``3 - 2 C_b``.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import Iterable

import numpy as np

from .kernels import KernelId, kernel
from .quadrature import ConvergenceError, QuadratureConfig, find_root, integrate

__all__ = [
    "BoundRow",
    "REFERENCE_TABLE_FEJER",
    "REFERENCE_TABLE_MT",
    "REFERENCE_TABLE_MT_SIMPLE_CRITICAL",
    "c_b",
    "c_b_parts",
    "failure_threshold",
    "proportions",
    "table",
]

# Printed five-decimal values: b -> 2 - C_b (simple or critical zeros).
REFERENCE_TABLE_MT = {
    0.001: 0.67250, 0.2: 0.67019, 0.4: 0.66333, 0.6: 0.65208, 0.8: 0.63670,
    1.0: 0.61748, 1.2: 0.59475, 1.4: 0.56884, 1.6: 0.54003, 1.8: 0.50862,
    2.0: 0.47485, 2.2: 0.43894, 2.4: 0.40109, 2.6: 0.36149, 2.8: 0.32027,
    3.0: 0.27760, 3.2: 0.23357, 3.4: 0.18832, 3.6: 0.14194, 3.8: 0.09451,
    4.0: 0.04612, 4.187: 0.00007,
}
# b -> 3 - 2 C_b (simple critical zeros); only printed while positive.
REFERENCE_TABLE_MT_SIMPLE_CRITICAL = {
    0.001: 0.34500, 0.2: 0.34038, 0.4: 0.32666, 0.6: 0.30416, 0.8: 0.27339,
    1.0: 0.23496, 1.2: 0.18951, 1.4: 0.13768, 1.6: 0.08007, 1.8: 0.01724,
}
# b -> 2 - C_b for the Fejer kernel, negative values shown as 0.
REFERENCE_TABLE_FEJER = {
    0.001: 0.66666, 0.2: 0.66422, 0.4: 0.65697, 0.6: 0.64509, 0.8: 0.62886,
    1.0: 0.60861, 1.2: 0.58468, 1.4: 0.55743, 1.6: 0.52719, 1.8: 0.49424,
    2.0: 0.45887, 2.2: 0.42130, 2.4: 0.38176, 2.6: 0.34043, 2.8: 0.29747,
    3.0: 0.25304, 3.2: 0.20727, 3.4: 0.16026, 3.6: 0.11214, 3.8: 0.06298,
    4.0: 0.01288, 4.0508: 0.00022, 4.187: 0.0,
}
REFERENCE_TABLE_MT_EXTRA = {4.0508: 0.03368}

_DEFAULT_CFG = QuadratureConfig(abs_tol=1e-14, rel_tol=1e-14)


@dataclass(frozen=True)
class BoundRow:
    b: float
    c_b: float
    simple_coeff: float
    critical_coeff: float
    simple_critical_coeff: float
    kernel: KernelId

    @classmethod
    def from_c_b(cls, kid: KernelId, b: float, value: float) -> "BoundRow":
        simple = 2.0 - value
        return cls(b, value, simple, simple, 2.0 * simple - 1.0, kid)

    def as_dict(self, clamp: bool = False) -> dict:
        d = asdict(self)
        d["kernel"] = self.kernel.value
        if clamp:
            for key in ("simple_coeff", "critical_coeff", "simple_critical_coeff"):
                d[key] = max(d[key], 0.0)
        return d


def _integral(f, cfg: QuadratureConfig) -> float:
    res = integrate(f, 0.0, 1.0, cfg)
    if not res.converged:
        raise ConvergenceError(f"bound integral did not converge (error {res.error_estimate:.3g})")
    return float(res.value)


def c_b_parts(kid: KernelId | str, b: float, cfg: QuadratureConfig | None = None) -> tuple[float, float]:
    """Numerator ``j(0) + 2 int a J`` and denominator ``2 int J`` of C_b."""
    kid = KernelId.parse(kid)
    if not (math.isfinite(b) and b >= 0):
        raise ValueError(f"b must be finite and >= 0, got {b!r}")
    cfg = cfg or _DEFAULT_CFG

    def J(a):
        return kernel(kid, a) / np.cosh(b * a)

    first = _integral(lambda a: a * J(a), cfg)
    zeroth = _integral(J, cfg)
    return float(kernel(kid, 0.0)) + 2.0 * first, 2.0 * zeroth


def c_b(kid: KernelId | str, b: float, cfg: QuadratureConfig | None = None) -> float:
    """The ratio C_b(j); at least 1 for both kernels."""
    num, den = c_b_parts(kid, b, cfg)
    return num / den


def proportions(kid: KernelId | str, b: float, cfg: QuadratureConfig | None = None) -> BoundRow:
    """Lower-bound coefficients for simple, critical and simple critical zeros.

    Negative coefficients are returned unchanged.
    """
    kid = KernelId.parse(kid)
    return BoundRow.from_c_b(kid, float(b), c_b(kid, b, cfg))


def table(kid: KernelId | str, b_values: Iterable[float], cfg: QuadratureConfig | None = None) -> list[BoundRow]:
    b_values = [float(b) for b in b_values]
    bad = [b for b in b_values if not (math.isfinite(b) and b >= 0)]
    if bad:
        raise ValueError(f"b must be finite and >= 0, got {bad[0]!r}")
    return [proportions(kid, b, cfg) for b in b_values]


def failure_threshold(
    kid: KernelId | str,
    which: str = "simple",
    cfg: QuadratureConfig | None = None,
    tol: float = 1e-4,
    b_limit: float = 16.0,
) -> float:
    """Smallest box width ``b`` at which a bound coefficient reaches zero.

    ``which`` is ``"simple"`` (``2 - C_b``) or ``"simple_critical"``
    (``3 - 2 C_b``).  The bracket ``[0, hi]`` is doubled from ``hi = 1``
    until the coefficient changes sign.
    """
    kid = KernelId.parse(kid)
    if which == "simple":
        def g(b):
            return 2.0 - c_b(kid, b, cfg)
    elif which == "simple_critical":
        def g(b):
            return 3.0 - 2.0 * c_b(kid, b, cfg)
    else:
        raise ValueError(f"which must be 'simple' or 'simple_critical', got {which!r}")

    lo, hi = 0.0, 1.0
    g_lo = g(lo)
    if g_lo <= 0:
        raise ValueError("bound is not positive at b = 0")
    while g(hi) > 0:
        lo, hi = hi, 2.0 * hi
        if hi > b_limit:
            raise ValueError(f"no root found in (0, {b_limit:g})")
    return find_root(g, lo, hi, tol)
