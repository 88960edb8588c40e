"""Pair-correlation sums over zeros and their integral representations.

Two pair sums are supported over zeros with ordinates in a window:

* ``F(x)  = sum x^{i(g - g')} w(g - g')``,      ``w(u) = 4 / (4 + u^2)``
* ``calF(x) = sum x^{rho - rho'} W(rho - rho')``, ``W(u) = 4 / (4 - u^2)``

A zero of multiplicity ``m`` behaves as ``m`` coincident zeros, so each
pair is weighted by ``m m'``.  Sums are accumulated block by block in
increasing ordinate order and the block totals are combined with Kahan
compensation, which keeps results bit-reproducible.
"""

from __future__ import annotations

import math
import time
from dataclasses import asdict, dataclass, field
from typing import Iterator, NamedTuple, Sequence

import numpy as np
from scipy.special import polygamma

from .bounds import c_b_parts
from .kernels import TsangParams, kernel, tsang_K_many
from .quadrature import (
    ConvergenceError,
    QuadratureConfig,
    compensated_sum,
    integrate,
    integrate_line_algebraic,
)
from .zeta_zeros import ZeroDataset

__all__ = [
    "BoundReport",
    "DiagonalDecomposition",
    "FormFactorPoint",
    "PairSumResult",
    "PairSumSpec",
    "F_integral_oracle",
    "F_pair_sum",
    "calF_integral_oracle",
    "calF_pair_sum",
    "calF_values",
    "diagonal_decomposition",
    "empirical_bound_pipeline",
    "form_factor_curve",
    "kernel_weighted_integral",
    "kernel_weighted_sum",
    "w_weight",
    "W_weight",
]

_BLOCK = 256
_ORACLE_MAX_ZEROS = 200


def w_weight(u):
    """Montgomery weight ``4 / (4 + u^2)``."""
    u = np.asarray(u)
    return 4.0 / (4.0 + u * u)


def W_weight(u):
    """Complex weight ``4 / (4 - u^2)``; ``W(iu) = w(u)``."""
    u = np.asarray(u, dtype=complex)
    return 4.0 / (4.0 - u * u)


@dataclass(frozen=True)
class PairSumSpec:
    x: float
    t_lo: float
    t_hi: float
    weight: str = "w"
    truncation_gap: float | None = None

    def __post_init__(self):
        if not (math.isfinite(self.x) and self.x > 0):
            raise ValueError(f"x must be positive, got {self.x!r}")
        if not self.t_lo < self.t_hi:
            raise ValueError(f"need t_lo < t_hi, got ({self.t_lo!r}, {self.t_hi!r}]")
        if self.weight not in ("w", "W"):
            raise ValueError(f"weight must be 'w' or 'W', got {self.weight!r}")
        if self.truncation_gap is not None and not self.truncation_gap >= 10:
            raise ValueError("truncation_gap must be >= 10 when set")

    @classmethod
    def from_alpha(cls, alpha: float, T: float, **kwargs) -> "PairSumSpec":
        """Spec with ``x = T**alpha`` over the window ``(T, 2T]`` by default."""
        kwargs.setdefault("t_lo", T)
        kwargs.setdefault("t_hi", 2.0 * T)
        return cls(x=T**alpha, **kwargs)


@dataclass(frozen=True)
class PairSumResult:
    value: complex
    n_zeros: int
    n_pairs_evaluated: int
    truncation_error_bound: float
    x: float = float("nan")
    T: float = float("nan")
    elapsed: float = field(default=0.0, compare=False)  # seconds; kept out of as_dict

    def as_dict(self) -> dict:
        return {
            "x": self.x,
            "T": self.T,
            "value_re": self.value.real,
            "value_im": self.value.imag,
            "n_zeros": self.n_zeros,
            "n_pairs": self.n_pairs_evaluated,
            "trunc_bound": self.truncation_error_bound,
        }


def _window(ds: ZeroDataset, t_lo: float, t_hi: float) -> ZeroDataset:
    sub = ds.window(t_lo, t_hi)
    if len(sub) == 0:
        raise ValueError(f"no zeros in the window ({t_lo}, {t_hi}]")
    return sub


def _row_blocks(n: int, block: int = _BLOCK) -> Iterator[slice]:
    for start in range(0, n, block):
        yield slice(start, min(start + block, n))


def _column_range(g: np.ndarray, rows: slice, gap: float | None) -> slice:
    if gap is None:
        return slice(0, g.size)
    lo = int(np.searchsorted(g, g[rows.start] - gap, side="left"))
    hi = int(np.searchsorted(g, g[rows.stop - 1] + gap, side="right"))
    return slice(lo, hi)


def _pair_sum(sub: ZeroDataset, x: float, full_weight: bool, gap: float | None):
    g, b, m = sub.gammas, sub.betas, sub.multiplicities.astype(float)
    log_x = math.log(x)
    blocks = []
    n_pairs = 0
    for rows in _row_blocks(g.size):
        cols = _column_range(g, rows, gap)
        dg = g[rows, None] - g[None, cols]
        mm = m[rows, None] * m[None, cols]
        keep = np.ones(dg.shape, dtype=bool) if gap is None else np.abs(dg) <= gap
        if full_weight:
            db = b[rows, None] - b[None, cols]
            u = db + 1j * dg
            terms = mm * np.exp(log_x * u) * (4.0 / (4.0 - u * u))
        else:
            terms = mm * np.exp(1j * log_x * dg) * (4.0 / (4.0 + dg * dg))
        terms = np.where(keep, terms, 0.0)
        blocks.append(terms.sum())
        n_pairs += int(keep.sum())
    value = complex(compensated_sum(np.array(blocks, dtype=complex)))
    return value, n_pairs


def _truncation_bound(sub: ZeroDataset, x: float, full_weight: bool, gap: float | None, t_hi: float) -> float:
    if gap is None:
        return 0.0
    n = sub.n_with_multiplicity
    density = max(math.log(max(t_hi, 2.0 * math.pi * math.e) / (2.0 * math.pi)) / (2.0 * math.pi), 1e-3)
    # sum_{k>=1} 4 / (gap + k/d)^2 = 4 d^2 * polygamma(1, gap d + 1)
    tail = 4.0 * density * density * float(polygamma(1, gap * density + 1.0))
    bound = 2.0 * n * tail
    if full_weight:
        spread = float(sub.betas.max() - sub.betas.min())
        # |W(u)| <= 4 / (|u|^2 - 4) <= (gap^2 / (gap^2 - 4)) * 4 / |Im u|^2
        bound *= max(x, 1.0 / x) ** spread * gap * gap / (gap * gap - 4.0)
    return bound


def F_pair_sum(ds: ZeroDataset, spec: PairSumSpec) -> PairSumResult:
    """Montgomery's pair sum over the ordinates in ``(t_lo, t_hi]``.

    The real parts of the zeros are ignored.  With ``truncation_gap`` set,
    pairs further apart than the gap are skipped and an overcount of their
    total size is returned as ``truncation_error_bound``.
    """
    if spec.weight != "w":
        raise ValueError("F_pair_sum uses the weight w")
    start = time.perf_counter()
    sub = _window(ds, spec.t_lo, spec.t_hi)
    value, n_pairs = _pair_sum(sub, spec.x, False, spec.truncation_gap)
    bound = _truncation_bound(sub, spec.x, False, spec.truncation_gap, spec.t_hi)
    return PairSumResult(value, len(sub), n_pairs, bound, x=spec.x, T=spec.t_lo,
                         elapsed=time.perf_counter() - start)


def calF_pair_sum(ds: ZeroDataset, spec: PairSumSpec, T: float | None = None) -> PairSumResult:
    """RH-free pair sum ``sum x^{rho - rho'} W(rho - rho')``.

    ``T`` defaults to ``spec.t_lo``; the window is taken from ``spec``.
    """
    if spec.weight != "W":
        raise ValueError("calF_pair_sum uses the weight W")
    start = time.perf_counter()
    sub = _window(ds, spec.t_lo, spec.t_hi)
    if np.ptp(sub.betas) >= 1.0:
        raise ValueError("W has a pole: real parts differ by 1 or more")
    value, n_pairs = _pair_sum(sub, spec.x, True, spec.truncation_gap)
    bound = _truncation_bound(sub, spec.x, True, spec.truncation_gap, spec.t_hi)
    return PairSumResult(value, len(sub), n_pairs, bound, x=spec.x, T=spec.t_lo if T is None else T,
                         elapsed=time.perf_counter() - start)


def _pair_arrays(sub: ZeroDataset):
    g, b, m = sub.gammas, sub.betas, sub.multiplicities.astype(float)
    u = (b[:, None] - b[None, :]) + 1j * (g[:, None] - g[None, :])
    mm = m[:, None] * m[None, :]
    return u.ravel(), mm.ravel()


def calF_values(ds: ZeroDataset, alphas, T: float, t_lo: float | None = None, t_hi: float | None = None) -> np.ndarray:
    """``calF(T**alpha)`` over ``(t_lo, t_hi]`` (default ``(T, 2T]``) for many alphas."""
    t_lo = T if t_lo is None else t_lo
    t_hi = 2.0 * T if t_hi is None else t_hi
    sub = _window(ds, t_lo, t_hi)
    u, mm = _pair_arrays(sub)
    weights = mm * W_weight(u)
    log_t = math.log(T)
    alphas = np.atleast_1d(np.asarray(alphas, dtype=float))
    out = np.empty(alphas.shape, dtype=complex)
    chunk = max(1, 2_000_000 // max(u.size, 1))
    for i in range(0, alphas.size, chunk):
        a = alphas[i : i + chunk]
        out[i : i + chunk] = np.exp(np.multiply.outer(a * log_t, u)) @ weights
    return out


def _core_limits(g: np.ndarray) -> tuple[float, float]:
    return float(g.min()) - 20.0, float(g.max()) + 20.0


def F_integral_oracle(ds: ZeroDataset, x: float, cfg: QuadratureConfig | None = None) -> float:
    """``(2/pi) * int |sum_g x^{ig} / (1 + (t - g)^2)|^2 dt`` over the real line.

    Independent check of :func:`F_pair_sum` over the whole dataset.
    """
    cfg = cfg or QuadratureConfig(abs_tol=1e-10, rel_tol=1e-11, max_panels=20000)
    if len(ds) == 0:
        return 0.0
    if len(ds) > _ORACLE_MAX_ZEROS:
        raise ValueError(f"oracle limited to {_ORACLE_MAX_ZEROS} zeros")
    g = ds.gammas
    coef = ds.multiplicities * np.exp(1j * math.log(x) * g)

    def integrand(t):
        d = t[:, None] - g[None, :]
        s = (coef[None, :] / (1.0 + d * d)).sum(axis=1)
        return (s * s.conj()).real

    lo, hi = _core_limits(g)
    res = integrate_line_algebraic(integrand, lo, hi, cfg, min_panels=math.ceil(hi - lo))
    if not res.converged:
        raise ConvergenceError("F integral oracle did not converge")
    return 2.0 / math.pi * float(res.value)


def calF_integral_oracle(ds: ZeroDataset, x: float, cfg: QuadratureConfig | None = None) -> float:
    """``(2/pi) * int |sum_rho x^{rho-1/2} / (1 - (rho - 1/2 - it)^2)|^2 dt``.

    Matches :func:`calF_pair_sum` for datasets closed under
    ``rho -> 1 - conj(rho)``, which is how zeros of zeta occur.
    """
    cfg = cfg or QuadratureConfig(abs_tol=1e-10, rel_tol=1e-11, max_panels=20000)
    if len(ds) == 0:
        return 0.0
    if len(ds) > _ORACLE_MAX_ZEROS:
        raise ValueError(f"oracle limited to {_ORACLE_MAX_ZEROS} zeros")
    g, b = ds.gammas, ds.betas
    shifted = (b - 0.5) + 1j * g
    coef = ds.multiplicities * np.exp(math.log(x) * shifted)

    def integrand(t):
        u = shifted[None, :] - 1j * t[:, None]
        s = (coef[None, :] / (1.0 - u * u)).sum(axis=1)
        return (s * s.conj()).real

    lo, hi = _core_limits(g)
    res = integrate_line_algebraic(integrand, lo, hi, cfg, min_panels=math.ceil(hi - lo))
    if not res.converged:
        raise ConvergenceError("calF integral oracle did not converge")
    return 2.0 / math.pi * float(res.value)


def _kernel_arguments(sub: ZeroDataset, T: float):
    u, mm = _pair_arrays(sub)
    return -1j * u * math.log(T), u, mm


def kernel_weighted_sum(
    ds: ZeroDataset,
    params: TsangParams,
    T: float,
    cfg: QuadratureConfig | None = None,
    *,
    with_weight: bool = True,
) -> complex:
    """``sum K_b(-i (rho - rho') log T) W(rho - rho')`` over ``(T, 2T]``.

    ``with_weight=False`` drops ``W``, giving the positive-term sum used to
    bound the diagonal.
    """
    cfg = cfg or QuadratureConfig()
    sub = _window(ds, T, 2.0 * T)
    z, u, mm = _kernel_arguments(sub, T)
    blocks = []
    step = 4096
    for i in range(0, z.size, step):
        k = tsang_K_many(params, z[i : i + step], cfg)
        w = W_weight(u[i : i + step]) if with_weight else 1.0
        blocks.append(np.sum(mm[i : i + step] * k * w))
    return complex(compensated_sum(np.array(blocks, dtype=complex)))


def kernel_weighted_integral(
    ds: ZeroDataset, params: TsangParams, T: float, cfg: QuadratureConfig | None = None
) -> complex:
    """``(1/2pi) * int_{-1}^{1} j(a)/cosh(b a) * calF(T^a) da`` with empirical calF.

    The pair sum is evaluated at each quadrature node, so the integral
    resolves the oscillation of ``calF`` in ``a`` exactly as sampled.
    """
    cfg = cfg or QuadratureConfig(abs_tol=1e-10, rel_tol=1e-10, max_panels=200000)
    sub = _window(ds, T, 2.0 * T)
    spread = float(np.ptp(sub.gammas)) * math.log(T)
    panels = max(1, math.ceil(spread / math.pi))

    def integrand(alpha):
        weight = kernel(params.kernel, alpha) / np.cosh(params.b * alpha)
        return weight * calF_values(sub, alpha, T)

    parts = [integrate(integrand, lo, hi, cfg, min_panels=panels) for lo, hi in ((-1.0, 0.0), (0.0, 1.0))]
    if not all(p.converged for p in parts):
        raise ConvergenceError("kernel-weighted integral did not converge")
    return (parts[0].value + parts[1].value) / (2.0 * math.pi)


@dataclass(frozen=True)
class DiagonalDecomposition:
    diagonal: float
    symmetric_diagonal: float
    off_diagonal: complex
    total: complex


def diagonal_decomposition(
    ds: ZeroDataset, params: TsangParams, T: float, cfg: QuadratureConfig | None = None
) -> DiagonalDecomposition:
    """Split ``sum K_b(-i (rho - rho') log T)`` over ``(T, 2T]`` into parts.

    The diagonal ``rho = rho'`` contributes ``m^2 K_b(0)`` per distinct zero
    (``m`` occurrences in the list, each weighted by ``m``).  The symmetric
    diagonal pairs each off-line zero with ``1 - conj(rho)``.
    """
    cfg = cfg or QuadratureConfig()
    sub = _window(ds, T, 2.0 * T)
    log_t = math.log(T)
    m = sub.multiplicities.astype(float)
    k0 = float(tsang_K_many(params, [0.0], cfg)[0].real)
    diagonal = math.fsum(m * m) * k0

    sym_terms = []
    partner = sub.partner_indices()
    for i, (b, mult) in enumerate(zip(sub.betas, m)):
        if b == 0.5 or partner[i] < 0:
            continue
        z = -1j * (2.0 * b - 1.0) * log_t
        sym_terms.append(mult * m[partner[i]] * float(tsang_K_many(params, [z], cfg)[0].real))
    symmetric = math.fsum(sym_terms)

    total = kernel_weighted_sum(sub, params, T, cfg, with_weight=False)
    return DiagonalDecomposition(diagonal, symmetric, total - diagonal - symmetric, total)


class FormFactorPoint(NamedTuple):
    alpha: float
    empirical: float
    theory: float


def form_factor_curve(
    ds: ZeroDataset,
    T: float,
    alpha_grid: Sequence[float],
    *,
    min_zeros: int = 500,
    allow_beyond: bool = False,
) -> list[FormFactorPoint]:
    """Normalized ``calF(T^alpha, T) / ((T / 2pi) log T)`` next to ``T^{-2 alpha} log T + alpha``.

    With ``allow_beyond`` the grid may run past ``alpha = 1``; those points
    carry ``theory = nan`` because no asymptotic is asserted there.
    """
    sub = ds.window(T, 2.0 * T)
    if len(sub) < min_zeros:
        raise ValueError(f"need at least {min_zeros} zeros in (T, 2T], found {len(sub)}")
    alphas = np.asarray(alpha_grid, dtype=float)
    if np.any(~np.isfinite(alphas)) or np.any(alphas <= 0) or (not allow_beyond and np.any(alphas > 1)):
        raise ValueError("alpha must lie in (0, 1]")
    log_t = math.log(T)
    norm = T / (2.0 * math.pi) * log_t
    points = []
    for a in alphas:
        spec = PairSumSpec(x=T**a, t_lo=T, t_hi=2.0 * T, weight="W")
        value = calF_pair_sum(sub, spec, T).value.real
        theory = T ** (-2.0 * a) * log_t + float(a) if a <= 1 else math.nan
        points.append(FormFactorPoint(float(a), float(value / norm), float(theory)))
    return points


@dataclass(frozen=True)
class BoundReport:
    kernel: str
    b: float
    T: float
    n_zeros: int
    sum_multiplicity: float
    k_b_zero: float
    rhs_coefficient: float
    rhs_asymptotic: float
    kernel_sum: float
    diagonal: float
    symmetric_diagonal: float
    off_diagonal: float
    multiplicity_sum_bound: float
    implied_simple_count: float
    implied_simple_proportion: float
    asymptotic_simple_proportion: float

    def as_dict(self) -> dict:
        return asdict(self)


def empirical_bound_pipeline(
    ds: ZeroDataset, params: TsangParams, T: float, cfg: QuadratureConfig | None = None
) -> BoundReport:
    """Run the diagonal argument on a concrete set of zeros in ``(T, 2T]``.

    Reports the asymptotic right-hand side ``(j(0) + 2 int a J) / 2pi *
    (T / 2pi) log T``, the empirical positive-term sum, its diagonal parts,
    the multiplicity bound ``sum m^2 <= kernel_sum / K_b(0)`` and the simple
    zero count ``sum (2 - m)`` it implies.
    """
    cfg = cfg or QuadratureConfig()
    sub = _window(ds, T, 2.0 * T)
    numerator, denominator = c_b_parts(params.kernel, params.b, cfg)
    rhs_coefficient = numerator / (2.0 * math.pi)
    rhs_asymptotic = rhs_coefficient * T / (2.0 * math.pi) * math.log(T)
    decomposition = diagonal_decomposition(sub, params, T, cfg)
    k0 = denominator / (2.0 * math.pi)

    m = sub.multiplicities.astype(float)
    n = float(m.sum())
    # listed with multiplicity, sum_rho m_rho = sum over distinct zeros of m^2
    sum_mult = math.fsum(m * m)
    simple_count = 2.0 * n - sum_mult
    mult_bound = decomposition.total.real / k0
    return BoundReport(
        kernel=params.kernel.value,
        b=params.b,
        T=T,
        n_zeros=int(n),
        sum_multiplicity=sum_mult,
        k_b_zero=k0,
        rhs_coefficient=rhs_coefficient,
        rhs_asymptotic=rhs_asymptotic,
        kernel_sum=decomposition.total.real,
        diagonal=decomposition.diagonal,
        symmetric_diagonal=decomposition.symmetric_diagonal,
        off_diagonal=decomposition.off_diagonal.real,
        multiplicity_sum_bound=mult_bound,
        implied_simple_count=simple_count,
        implied_simple_proportion=simple_count / n,
        asymptotic_simple_proportion=2.0 - numerator / denominator,
    )
