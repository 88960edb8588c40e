"""Numerics for the pair correlation of Riemann zeta zeros.

Subpackages of interest: :mod:`~zetapair.kernels` (Fourier-positive
kernels and the Tsang kernel), :mod:`~zetapair.bounds` (zero-proportion
lower bounds), :mod:`~zetapair.zeta_zeros` (zeros on the critical line),
:mod:`~zetapair.paircorr` (pair sums and their integral forms) and
:mod:`~zetapair.quadrature`.
"""

__version__ = "0.1.0"

from .bounds import BoundRow, c_b, failure_threshold, proportions, table  # noqa: E402
from .kernels import KernelId, TsangParams, tsang_K  # noqa: E402
from .quadrature import ConvergenceError, QuadratureConfig, integrate  # noqa: E402
from .zeta_zeros import Zero, ZeroDataset, compute_zeros, hardy_Z, n_of_T  # noqa: E402

__all__ = [
    "BoundRow",
    "ConvergenceError",
    "KernelId",
    "QuadratureConfig",
    "TsangParams",
    "Zero",
    "ZeroDataset",
    "__version__",
    "c_b",
    "compute_zeros",
    "failure_threshold",
    "hardy_Z",
    "integrate",
    "n_of_T",
    "proportions",
    "table",
    "tsang_K",
]
