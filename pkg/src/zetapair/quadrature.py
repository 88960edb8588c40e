"""Deterministic adaptive Gauss-Legendre quadrature and root bracketing.

Integrands are *vectorized*: ``f`` receives a 1-D ``numpy`` array of nodes
and returns an array of the same length (real or complex), or an array of
shape ``(len(nodes), m)`` for ``m`` simultaneous integrands.  Scalar-only
callables can be wrapped with :func:`numpy.vectorize`.

Panels are refined in rounds.  Every panel is evaluated with the full rule
and with the half-order rule; their difference is the panel error.  Panel
contributions are reduced left to right with Kahan compensation, so results
are bit-identical for identical inputs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Sequence

import numpy as np

__all__ = [
    "ConvergenceError",
    "QuadratureConfig",
    "QuadratureResult",
    "compensated_sum",
    "find_root",
    "integrate",
    "integrate_line_algebraic",
    "integrate_line_decaying",
]


class ConvergenceError(ArithmeticError):
    """Raised by callers that require a converged quadrature."""


@dataclass(frozen=True)
class QuadratureConfig:
    abs_tol: float = 1e-12
    rel_tol: float = 1e-12
    max_panels: int = 4096
    rule_order: int = 16

    def __post_init__(self):
        if not 0.0 < self.abs_tol < 1.0:
            raise ValueError(f"abs_tol must lie in (0, 1), got {self.abs_tol!r}")
        if not 0.0 < self.rel_tol < 1.0:
            raise ValueError(f"rel_tol must lie in (0, 1), got {self.rel_tol!r}")
        if self.max_panels < 1:
            raise ValueError("max_panels must be >= 1")
        if self.rule_order < 2:
            raise ValueError("rule_order must be >= 2")

    def tightened(self, factor: float) -> "QuadratureConfig":
        """Copy with both tolerances multiplied by ``factor``."""
        return QuadratureConfig(
            abs_tol=self.abs_tol * factor,
            rel_tol=self.rel_tol * factor,
            max_panels=self.max_panels,
            rule_order=self.rule_order,
        )


@dataclass(frozen=True)
class QuadratureResult:
    value: float | complex | np.ndarray
    error_estimate: float
    panels_used: int
    converged: bool


@lru_cache(maxsize=None)
def _rule(order: int) -> tuple[np.ndarray, np.ndarray]:
    x, w = np.polynomial.legendre.leggauss(order)
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


def compensated_sum(terms: Sequence[np.ndarray] | np.ndarray):
    """Kahan-compensated sum along the first axis, in index order."""
    terms = np.asarray(terms)
    if terms.shape[0] == 0:
        return np.zeros(terms.shape[1:], dtype=terms.dtype)
    total = np.zeros(terms.shape[1:], dtype=terms.dtype)
    comp = np.zeros_like(total)
    for term in terms:
        y = term - comp
        t = total + y
        comp = (t - total) - y
        total = t
    return total


def _unwrap(value: np.ndarray):
    if value.ndim == 0:
        v = value.item()
        return complex(v) if isinstance(v, complex) else float(v)
    return value


def _evaluate_panels(f, lo: np.ndarray, hi: np.ndarray, order: int):
    """Return (high-order value, half-order value) per panel."""
    xh, wh = _rule(order)
    xl, wl = _rule(max(order // 2, 1))
    mid = 0.5 * (lo + hi)
    half = 0.5 * (hi - lo)
    nodes_h = (mid[:, None] + half[:, None] * xh[None, :]).ravel()
    nodes_l = (mid[:, None] + half[:, None] * xl[None, :]).ravel()
    fh = np.asarray(f(nodes_h))
    fl = np.asarray(f(nodes_l))
    p = lo.size
    fh = fh.reshape((p, xh.size) + fh.shape[1:])
    fl = fl.reshape((p, xl.size) + fl.shape[1:])
    scale = half.reshape((p,) + (1,) * (fh.ndim - 2))
    gh = np.tensordot(fh, wh, axes=([1], [0])) if fh.ndim == 2 else np.einsum("pn...,n->p...", fh, wh)
    gl = np.tensordot(fl, wl, axes=([1], [0])) if fl.ndim == 2 else np.einsum("pn...,n->p...", fl, wl)
    return gh * scale, gl * scale


def integrate(
    f: Callable[[np.ndarray], np.ndarray],
    a: float,
    b: float,
    cfg: QuadratureConfig | None = None,
    *,
    min_panels: int = 1,
) -> QuadratureResult:
    """Integrate ``f`` over ``[a, b]`` by adaptive panel bisection.

    Parameters
    ----------
    f : callable
        Vectorized integrand.
    a, b : float
        Finite limits with ``a <= b``.
    cfg : QuadratureConfig, optional
        Tolerances, panel budget and rule order.
    min_panels : int
        Number of equal panels to start from.  Oscillatory integrands should
        pass at least one panel per half period.

    Returns
    -------
    QuadratureResult
        ``converged`` is False when the panel budget ran out; the value is
        still the best available estimate.
    """
    cfg = cfg or QuadratureConfig()
    a = float(a)
    b = float(b)
    if not (math.isfinite(a) and math.isfinite(b)):
        raise ValueError("integration limits must be finite")
    if a > b:
        raise ValueError(f"need a <= b, got a={a!r}, b={b!r}")
    if a == b:
        probe = np.asarray(f(np.array([a])))
        zero = np.zeros(probe.shape[1:], dtype=probe.dtype)
        return QuadratureResult(_unwrap(zero), 0.0, 0, True)

    n0 = max(1, min(int(min_panels), cfg.max_panels))
    edges = np.linspace(a, b, n0 + 1)
    lo, hi = edges[:-1], edges[1:]
    gh, gl = _evaluate_panels(f, lo, hi, cfg.rule_order)
    length = b - a

    while True:
        err = np.abs(gh - gl)
        total = compensated_sum(gh)
        err_total = compensated_sum(err)
        tol = np.maximum(cfg.abs_tol, cfg.rel_tol * np.abs(total))
        if np.all(err_total <= tol):
            converged = True
            break
        panel_err = err if err.ndim == 1 else err.reshape(err.shape[0], -1).max(axis=1)
        local_tol = float(np.min(tol)) * (hi - lo) / length
        bad = panel_err > local_tol
        n_bad = int(bad.sum())
        if n_bad == 0 or lo.size + n_bad > cfg.max_panels:
            converged = False
            break
        mids = 0.5 * (lo[bad] + hi[bad])
        new_lo = np.concatenate([lo[bad], mids])
        new_hi = np.concatenate([mids, hi[bad]])
        if np.any(new_hi <= new_lo):
            converged = False
            break
        nh, nl = _evaluate_panels(f, new_lo, new_hi, cfg.rule_order)
        lo = np.concatenate([lo[~bad], new_lo])
        hi = np.concatenate([hi[~bad], new_hi])
        gh = np.concatenate([gh[~bad], nh])
        gl = np.concatenate([gl[~bad], nl])
        order = np.argsort(lo, kind="stable")
        lo, hi, gh, gl = lo[order], hi[order], gh[order], gl[order]

    err_est = float(np.max(err_total))
    return QuadratureResult(_unwrap(total), err_est, int(lo.size), converged)


def integrate_line_decaying(
    f: Callable[[np.ndarray], np.ndarray],
    decay_rate: float,
    cfg: QuadratureConfig | None = None,
    *,
    bound: float = 1.0,
    center: float = 0.0,
    min_panels: int = 1,
) -> QuadratureResult:
    """Integrate over the real line an integrand with exponential tails.

    The caller promises ``|f(t)| <= bound * exp(-decay_rate * |t - center|)``
    for large ``|t - center|``.  The line is cut at ``center +- L`` with the
    two-sided tail ``2 * bound * exp(-decay_rate * L) / decay_rate`` below
    ``abs_tol / 10``.
    """
    cfg = cfg or QuadratureConfig()
    if not decay_rate > 0:
        raise ValueError(f"decay_rate must be positive, got {decay_rate!r}")
    target = cfg.abs_tol / 10.0
    half_width = max(math.log(2.0 * bound / (decay_rate * target)) / decay_rate, 1.0 / decay_rate)
    panels = max(min_panels, 2 * math.ceil(decay_rate * half_width / 4.0))
    return integrate(f, center - half_width, center + half_width, cfg, min_panels=panels)


def integrate_line_algebraic(
    f: Callable[[np.ndarray], np.ndarray],
    lo: float,
    hi: float,
    cfg: QuadratureConfig | None = None,
    *,
    min_panels: int = 1,
) -> QuadratureResult:
    """Integrate over the real line an integrand with algebraic tails.

    ``[lo, hi]`` is integrated directly; the tails are mapped onto ``(0, 1]``
    by ``t = hi + (1 - u) / u`` (and its mirror), which makes any integrand
    decaying faster than ``1/t^2`` smooth at ``u = 0``.
    """
    cfg = cfg or QuadratureConfig()
    if lo >= hi:
        raise ValueError("need lo < hi")

    def right(u):
        return f(hi + (1.0 - u) / u) / (u * u)

    def left(u):
        return f(lo - (1.0 - u) / u) / (u * u)

    sub = cfg.tightened(1.0 / 3.0)
    parts = [
        integrate(left, 0.0, 1.0, sub, min_panels=4),
        integrate(f, lo, hi, sub, min_panels=min_panels),
        integrate(right, 0.0, 1.0, sub, min_panels=4),
    ]
    value = compensated_sum(np.array([np.asarray(p.value) for p in parts]))
    return QuadratureResult(
        _unwrap(np.asarray(value)),
        float(sum(p.error_estimate for p in parts)),
        sum(p.panels_used for p in parts),
        all(p.converged for p in parts),
    )


def find_root(
    g: Callable[[float], float],
    lo: float,
    hi: float,
    tol: float = 1e-12,
    max_iter: int = 200,
) -> float:
    """Find a sign change of ``g`` in ``[lo, hi]``.

    Illinois regula falsi, with a bisection step whenever an interpolation
    step fails to halve the bracket.  Returns the midpoint of a bracket no
    wider than ``tol`` (or an exact zero).
    """
    lo, hi = float(lo), float(hi)
    if lo > hi:
        lo, hi = hi, lo
    glo, ghi = g(lo), g(hi)
    if glo == 0.0:
        return lo
    if ghi == 0.0:
        return hi
    if math.copysign(1.0, glo) == math.copysign(1.0, ghi):
        raise ValueError(f"no sign change on [{lo!r}, {hi!r}]: g={glo!r}, {ghi!r}")
    side = 0
    for _ in range(max_iter):
        width = hi - lo
        if width <= tol:
            break
        x = (lo * ghi - hi * glo) / (ghi - glo)
        if not lo < x < hi:
            x = 0.5 * (lo + hi)
        gx = g(x)
        if gx == 0.0:
            return x
        if math.copysign(1.0, gx) == math.copysign(1.0, glo):
            lo, glo = x, gx
            if side == -1:
                ghi *= 0.5
            side = -1
        else:
            hi, ghi = x, gx
            if side == 1:
                glo *= 0.5
            side = 1
        if hi - lo > 0.5 * width:
            mid = 0.5 * (lo + hi)
            gm = g(mid)
            if gm == 0.0:
                return mid
            if math.copysign(1.0, gm) == math.copysign(1.0, glo):
                lo, glo = mid, gm
            else:
                hi, ghi = mid, gm
            side = 0
    return 0.5 * (lo + hi)
