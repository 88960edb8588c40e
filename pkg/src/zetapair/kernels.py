"""Fourier-positive kernels and the Tsang kernel.

Two compactly supported kernels on ``[-1, 1]`` are available: the Fejer
triangle ``j_F`` and the Montgomery-Taylor kernel ``j_M``.  Both have
nonnegative Fourier transforms (``e(u) = exp(2 pi i u)`` convention).

The Tsang kernel is

    K_b(z) = (1/pi) * int_0^1 j(a) / cosh(b a) * cos(z a) da,

an even entire function whose real part is positive in the strip
``|Im z| < b``.  Every function here accepts numpy arrays.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .quadrature import ConvergenceError, QuadratureConfig, integrate

__all__ = [
    "KernelId",
    "TsangParams",
    "cosh_ratio",
    "cosh_ratio_hat",
    "fejer",
    "fejer_hat",
    "kernel",
    "kernel_hat",
    "mt",
    "mt_hat",
    "tsang_K",
    "tsang_K_many",
    "tsang_K_re_positive",
]

SQRT2 = math.sqrt(2.0)
_MT_NORM = 1.0 / (1.0 - math.cos(SQRT2))
_SINC_CUTOFF = 1e-8
_MT_CUTOFF = 1e-4


class KernelId(enum.Enum):
    FEJER = "fejer"
    MONTGOMERY_TAYLOR = "mt"

    @classmethod
    def parse(cls, name: "str | KernelId") -> "KernelId":
        if isinstance(name, cls):
            return name
        key = str(name).strip().lower().replace("-", "_")
        aliases = {
            "fejer": cls.FEJER,
            "f": cls.FEJER,
            "j_f": cls.FEJER,
            "mt": cls.MONTGOMERY_TAYLOR,
            "m": cls.MONTGOMERY_TAYLOR,
            "j_m": cls.MONTGOMERY_TAYLOR,
            "montgomery_taylor": cls.MONTGOMERY_TAYLOR,
            "montgomerytaylor": cls.MONTGOMERY_TAYLOR,
        }
        try:
            return aliases[key]
        except KeyError:
            raise ValueError(f"unknown kernel {name!r}; expected 'fejer' or 'mt'") from None


@dataclass(frozen=True)
class TsangParams:
    b: float
    kernel: KernelId = KernelId.MONTGOMERY_TAYLOR

    def __post_init__(self):
        if not (math.isfinite(self.b) and self.b >= 0):
            raise ValueError(f"b must be finite and >= 0, got {self.b!r}")
        object.__setattr__(self, "kernel", KernelId.parse(self.kernel))


def _scalar_or_array(x):
    return float(x) if np.ndim(x) == 0 else x


def fejer(alpha):
    """Fejer triangle ``max(1 - |alpha|, 0)``."""
    alpha = np.asarray(alpha, dtype=float)
    return _scalar_or_array(np.maximum(1.0 - np.abs(alpha), 0.0))


def fejer_hat(t):
    """Fourier transform of the Fejer triangle, ``(sin(pi t) / (pi t))**2``."""
    t = np.asarray(t, dtype=float)
    small = np.abs(t) < _SINC_CUTOFF
    u = np.pi * np.where(small, 1.0, t)
    out = np.where(small, 1.0, (np.sin(u) / u) ** 2)
    return _scalar_or_array(out)


def mt(alpha):
    """Montgomery-Taylor kernel (note ``mt(0) != 1``)."""
    alpha = np.asarray(alpha, dtype=float)
    jf = np.maximum(1.0 - np.abs(alpha), 0.0)
    out = _MT_NORM * (np.sin(SQRT2 * jf) / (2.0 * SQRT2) + 0.5 * jf * np.cos(SQRT2 * alpha))
    return _scalar_or_array(out)


def _half_sine_ratio(u):
    # sin(u/2)/u, with its Taylor series near the removable singularity
    small = np.abs(u) < _MT_CUTOFF
    safe = np.where(small, 1.0, u)
    u2 = u * u
    series = 0.5 - u2 / 48.0 + u2 * u2 / 3840.0
    return np.where(small, series, np.sin(0.5 * safe) / safe)


def mt_hat(w):
    """Fourier transform of :func:`mt`; a square, hence nonnegative."""
    w = np.asarray(w, dtype=float)
    s = _half_sine_ratio(SQRT2 - 2.0 * np.pi * w) + _half_sine_ratio(SQRT2 + 2.0 * np.pi * w)
    return _scalar_or_array(_MT_NORM * s * s)


def kernel(kid: KernelId | str, alpha):
    """Evaluate ``j(alpha)`` for the chosen kernel."""
    kid = KernelId.parse(kid)
    return fejer(alpha) if kid is KernelId.FEJER else mt(alpha)


def kernel_hat(kid: KernelId | str, t):
    """Evaluate the Fourier transform of the chosen kernel."""
    kid = KernelId.parse(kid)
    return fejer_hat(t) if kid is KernelId.FEJER else mt_hat(t)


def _check_strip(y, b):
    if not b > 0:
        raise ValueError(f"transform pair needs b > 0, got b={b!r}")
    if np.any(np.abs(y) >= b):
        raise ValueError(f"transform pair needs |y| < b, got y={y!r}, b={b!r}")


def cosh_ratio(y: float, b: float, t):
    """``cosh(2 pi y t) / cosh(2 pi b t)`` for ``|y| < b``."""
    _check_strip(y, b)
    t = np.abs(np.asarray(t, dtype=float))
    # cosh(p)/cosh(q) = exp(p - q) (1 + exp(-2p)) / (1 + exp(-2q)), overflow free
    p = 2.0 * np.pi * abs(y) * t
    q = 2.0 * np.pi * b * t
    out = np.exp(p - q) * (1.0 + np.exp(-2.0 * p)) / (1.0 + np.exp(-2.0 * q))
    return _scalar_or_array(out)


def cosh_ratio_hat(y: float, b: float, x):
    """Closed-form Fourier transform of :func:`cosh_ratio`; strictly positive."""
    _check_strip(y, b)
    x = np.abs(np.asarray(x, dtype=float))
    c1 = math.cos(math.pi * y / (2.0 * b))
    c2 = math.cos(math.pi * y / b)
    s = np.pi * x / (2.0 * b)
    # cosh(s) / (c2 + cosh(2s)), divided through by exp(2s)/2 for large s
    e1 = np.exp(-s)
    e2 = np.exp(-2.0 * s)
    e4 = e2 * e2
    out = c1 * e1 * (1.0 + e2) / (2.0 * c2 * e2 + 1.0 + e4) / b
    return _scalar_or_array(out)


def _weight(params: TsangParams):
    kid = params.kernel
    b = params.b

    def J(alpha):
        return kernel(kid, alpha) / np.cosh(b * alpha)

    return J


def _panels_for(zmax: float) -> int:
    # at least one panel per half period of cos(z a) on [0, 1]
    return max(1, math.ceil(zmax / math.pi))


def tsang_K_many(params: TsangParams, z, quad: QuadratureConfig | None = None) -> np.ndarray:
    """Evaluate ``K_b`` at every entry of ``z`` with one shared quadrature."""
    quad = quad or QuadratureConfig()
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    J = _weight(params)
    real_axis = bool(np.all(z.imag == 0.0))
    zz = z.real if real_axis else z

    def integrand(alpha):
        return J(alpha)[:, None] * np.cos(np.multiply.outer(alpha, zz)) / np.pi

    panels = _panels_for(float(np.max(np.abs(z))) if z.size else 0.0)
    res = integrate(integrand, 0.0, 1.0, quad, min_panels=panels)
    if not res.converged:
        raise ConvergenceError(
            f"K_b quadrature did not converge (error {res.error_estimate:.3g}, "
            f"{res.panels_used} panels)"
        )
    return np.asarray(res.value, dtype=complex)


def tsang_K(params: TsangParams, z: complex, quad: QuadratureConfig | None = None) -> complex:
    """Tsang kernel ``K_b(z)`` by quadrature of its cosine representation."""
    z = complex(z)
    if not (math.isfinite(z.real) and math.isfinite(z.imag)):
        raise ValueError(f"z must be finite, got {z!r}")
    return complex(tsang_K_many(params, [z], quad)[0])


def tsang_K_re_positive(
    params: TsangParams, x: float, y: float, quad: QuadratureConfig | None = None
) -> float:
    """``Re K_b(x + iy)`` for ``|y| < b``, where it is strictly positive.

    Uses ``Re cos((x+iy)a) = cos(xa) cosh(ya)`` so the integrand is real.
    """
    if abs(y) >= params.b:
        raise ValueError(f"need |y| < b, got y={y!r}, b={params.b!r}")
    quad = quad or QuadratureConfig()
    J = _weight(params)

    def integrand(alpha):
        return J(alpha) * np.cosh(y * alpha) * np.cos(x * alpha) / np.pi

    res = integrate(integrand, 0.0, 1.0, quad, min_panels=_panels_for(abs(x)))
    if not res.converged:
        raise ConvergenceError(f"Re K_b quadrature did not converge at x={x!r}, y={y!r}")
    return float(res.value)
