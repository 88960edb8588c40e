"""Invariant suite behind ``zetapair verify``.

Each property is a function ``check(tol) -> (passed, detail)`` where
``tol`` is either ``None`` (use the property's own tolerance) or an
override supplied on the command line.  Properties are grouped so a
subset can be selected with ``--only``.
"""

from __future__ import annotations

import math
import sys
import time
from dataclasses import dataclass
from typing import Callable, TextIO

import numpy as np

from .bounds import (
    REFERENCE_TABLE_FEJER,
    REFERENCE_TABLE_MT,
    REFERENCE_TABLE_MT_EXTRA,
    REFERENCE_TABLE_MT_SIMPLE_CRITICAL,
    c_b,
    failure_threshold,
)
from .kernels import (
    KernelId,
    TsangParams,
    cosh_ratio,
    cosh_ratio_hat,
    fejer_hat,
    mt_hat,
    tsang_K_many,
    tsang_K_re_positive,
)
from .paircorr import (
    F_integral_oracle,
    F_pair_sum,
    PairSumSpec,
    calF_integral_oracle,
    calF_pair_sum,
    kernel_weighted_integral,
    kernel_weighted_sum,
)
from .quadrature import QuadratureConfig, integrate, integrate_line_decaying
from .zeta_zeros import Zero, ZeroDataset, compute_zeros, hardy_Z, n_of_T

CheckResult = tuple[bool, str]


@dataclass(frozen=True)
class Property:
    group: str
    name: str
    check: Callable[[float | None], CheckResult]


def _tol(override: float | None, default: float) -> float:
    return default if override is None else override


def _compare(label: str, worst: float, tol: float) -> CheckResult:
    return worst <= tol, f"{label} max error {worst:.3g} (tol {tol:.3g})"


# ----------------------------------------------------------------- kernels


def _fourier_nonnegativity(tol):
    grid = np.round(np.arange(-5000, 5001) * 1e-3, 12)
    lo = min(float(np.min(fejer_hat(grid))), float(np.min(mt_hat(grid))))
    return lo >= 0.0, f"min transform value {lo:.3g} on [-5, 5]"


def _lemma2_pair(tol):
    tol = _tol(tol, 1e-8)
    cfg = QuadratureConfig(abs_tol=1e-12, rel_tol=1e-12)
    xs = np.linspace(-4.0, 4.0, 50)
    worst, lowest = 0.0, math.inf
    for y, b in ((0.0, 1.0), (0.3, 1.0), (0.49, 0.5)):
        res = integrate_line_decaying(
            lambda t: cosh_ratio(y, b, t)[:, None] * np.cos(2 * np.pi * np.multiply.outer(t, xs)),
            2 * np.pi * (b - abs(y)),
            cfg,
            bound=2.0,
        )
        exact = cosh_ratio_hat(y, b, xs)
        worst = max(worst, float(np.max(np.abs(res.value - exact))))
        lowest = min(lowest, float(np.min(exact)))
    ok, detail = _compare("transform pair", worst, tol)
    return ok and lowest > 0, f"{detail}; min closed form {lowest:.3g}"


def _self_transform(tol):
    tol = _tol(tol, 1e-8)
    cfg = QuadratureConfig(abs_tol=1e-12, rel_tol=1e-12)
    zs = np.linspace(-6.0, 6.0, 25)
    worst = 0.0
    for b in (0.5, 1.0, 2.0):
        res = integrate_line_decaying(
            lambda t: np.cos(2 * np.pi * np.multiply.outer(t, zs)) / np.cosh(2 * np.pi * b * t)[:, None],
            2 * np.pi * b,
            cfg,
            bound=2.0,
        )
        exact = 1.0 / (2.0 * b * np.cosh(np.pi * zs / (2.0 * b)))
        worst = max(worst, float(np.max(np.abs(res.value - exact))))
    return _compare("self transform", worst, tol)


def _tsang_evenness(tol):
    tol = _tol(tol, 1e-12)
    rng = np.random.default_rng(7)
    r = 20.0 * np.sqrt(rng.random(100))
    z = r * np.exp(2j * np.pi * rng.random(100))
    worst = 0.0
    for kid in KernelId:
        p = TsangParams(1.0, kid)
        worst = max(worst, float(np.max(np.abs(tsang_K_many(p, z) - tsang_K_many(p, -z)))))
    return _compare("K(z) - K(-z)", worst, tol)


def _tsang_positivity(tol):
    xs = np.arange(-200, 201) * 0.5
    lowest = math.inf
    for kid in KernelId:
        for b in (0.25, 1.0, 4.0):
            for y in b * np.linspace(-0.9, 0.9, 9):
                p = TsangParams(b, kid)
                vals = tsang_K_many(p, xs + 1j * y).real
                lowest = min(lowest, float(np.min(vals)))
    return lowest > 0, f"min Re K_b {lowest:.3g}"


def _tsang_decay(tol):
    xs = np.linspace(1.0, 500.0, 2000)
    worst = 0.0
    for kid in KernelId:
        k = tsang_K_many(TsangParams(1.0, kid), xs).real
        worst = max(worst, float(np.max(np.abs(k) * (1 + xs * xs))))
    bound = _tol(tol, 10.0)
    return worst <= bound, f"max |K(x)|(1+x^2) = {worst:.3g} (bound {bound:.3g})"


# -------------------------------------------------------------- quadrature


def _polynomial_exactness(tol):
    tol = _tol(tol, 1e-13)
    worst = 0.0
    for k in range(0, 32):
        res = integrate(lambda t, k=k: t**k, 0.0, 1.0, QuadratureConfig(max_panels=1))
        worst = max(worst, abs(res.value - 1.0 / (k + 1)))
    return _compare("monomials t^0..t^31", worst, tol)


def _determinism(tol):
    def f(t):
        return np.cos(37.0 * t) * np.exp(-t)

    a = integrate(f, 0.0, 3.0)
    b = integrate(f, 0.0, 3.0)
    return a.value == b.value and a.error_estimate == b.error_estimate, f"value {a.value!r}"


def _tolerance_halving(tol):
    def f(t):
        return np.sin(25.0 * t) / (1.0 + t * t)

    cfg = QuadratureConfig(abs_tol=1e-8, rel_tol=1e-8)
    first = integrate(f, 0.0, 4.0, cfg)
    second = integrate(f, 0.0, 4.0, cfg.tightened(0.5))
    change = abs(second.value - first.value)
    limit = _tol(tol, max(first.error_estimate, 1e-300))
    return change <= limit, f"change {change:.3g} vs error estimate {first.error_estimate:.3g}"


# ------------------------------------------------------------------ bounds


def _headline_constants(tol):
    tol = _tol(tol, 1e-7)
    errs = [
        abs(2 - c_b("mt", 0.001) - 0.67250064),
        abs(2 - c_b("mt", 0.3185) - 0.66666908),
        abs(3 - 2 * c_b("mt", 0.001) - 0.34500129),
    ]
    return _compare("constants", max(errs), tol)


def _table_error(kid, reference, transform):
    worst, where = 0.0, None
    for b, printed in reference.items():
        value = max(transform(c_b(kid, b)), 0.0)
        if abs(value - printed) > worst:
            worst, where = abs(value - printed), b
    return worst, where


def _mt_table(tol):
    tol = _tol(tol, 2e-5)
    ref = dict(REFERENCE_TABLE_MT)
    w1, b1 = _table_error("mt", ref, lambda c: 2 - c)
    w2, b2 = _table_error("mt", REFERENCE_TABLE_MT_SIMPLE_CRITICAL, lambda c: 3 - 2 * c)
    worst, where = max((w1, b1), (w2, b2))
    ok, detail = _compare("mt reference table", worst, tol)
    return ok, f"{detail} at b={where}"


def _comparison_fejer(tol):
    tol = _tol(tol, 2e-5)
    worst, where = _table_error("fejer", REFERENCE_TABLE_FEJER, lambda c: 2 - c)
    ok, detail = _compare("fejer comparison column", worst, tol)
    return ok, f"{detail} at b={where}"


def _comparison_mt(tol):
    tol = _tol(tol, 2e-5)
    ref = {**REFERENCE_TABLE_MT, **REFERENCE_TABLE_MT_EXTRA}
    worst, where = _table_error("mt", ref, lambda c: 2 - c)
    ok, detail = _compare("mt comparison column", worst, tol)
    return ok, f"{detail} at b={where}"


def _analytic_limit(tol):
    return _compare("C_0(j_F) - 4/3", abs(c_b("fejer", 0.0) - 4.0 / 3.0), _tol(tol, 1e-12))


def _failure_thresholds(tol):
    roots = {
        "mt simple": (failure_threshold("mt", "simple"), 4.187, 4.20),
        "mt simple critical": (failure_threshold("mt", "simple_critical"), 1.8, 2.0),
        "fejer simple": (failure_threshold("fejer", "simple"), 4.0508, 4.187),
    }
    ok = all(lo < r < hi for r, lo, hi in roots.values())
    return ok, ", ".join(f"{k} {r:.5f}" for k, (r, _, _) in roots.items())


def _monotone_dominance(tol):
    grid = np.round(np.arange(0, 46) * 0.1, 10)
    mt_vals = np.array([2 - c_b("mt", b) for b in grid])
    fj_vals = np.array([2 - c_b("fejer", b) for b in grid])
    monotone = bool(np.all(np.diff(mt_vals) < 0) and np.all(np.diff(fj_vals) < 0))
    dom_grid = [b for b in grid if 0.001 <= b <= 4.05] + [0.001, 4.05]
    dominant = all(c_b("fejer", b) > c_b("mt", b) for b in dom_grid)
    return monotone and dominant, f"monotone={monotone}, mt dominates fejer={dominant}"


# ---------------------------------------------------------------- paircorr


def _random_sets(n_sets: int, seed: int = 11) -> list[ZeroDataset]:
    rng = np.random.default_rng(seed)
    out = []
    for k in range(n_sets):
        n = int(rng.integers(2, 26))
        g = np.sort(rng.uniform(20.0, 80.0, n))
        g = g[np.concatenate(([True], np.diff(g) > 1e-6))]
        if k % 2 == 0:
            out.append(ZeroDataset.on_line_ordinates(g))
            continue
        zeros = []
        for gamma in g:
            shift = rng.uniform(0.01, 0.3) if rng.random() < 0.5 else 0.0
            zeros.append(Zero(float(gamma), 0.5 - shift))
            if shift:
                zeros.append(Zero(float(gamma), 0.5 + shift))
        out.append(ZeroDataset.from_zeros(zeros))
    return out


def _lemma1(tol):
    tol = _tol(tol, 1e-6)
    worst = 0.0
    for ds in _random_sets(20):
        lo, hi = ds.t_min - 1.0, ds.t_max
        for x in (1.0, 2.0, 10.0):
            spec = PairSumSpec(x, lo, hi, weight="W")
            direct = calF_pair_sum(ds, spec).value
            worst = max(worst, abs(direct - calF_integral_oracle(ds, x)))
            if ds.on_line:
                f = F_pair_sum(ds, PairSumSpec(x, lo, hi)).value
                worst = max(worst, abs(f - F_integral_oracle(ds, x)))
    return _compare("pair sum vs integral", worst, tol)


def _reduction_symmetry(tol):
    tol = _tol(tol, 1e-10)
    worst = 0.0
    for ds in _random_sets(10, seed=5):
        lo, hi = ds.t_min - 1.0, ds.t_max
        for x in (1.5, 3.0, 17.0):
            c = calF_pair_sum(ds, PairSumSpec(x, lo, hi, weight="W")).value
            c_inv = calF_pair_sum(ds, PairSumSpec(1 / x, lo, hi, weight="W")).value
            worst = max(worst, abs(c - c_inv))
            if ds.on_line:
                f = F_pair_sum(ds, PairSumSpec(x, lo, hi)).value
                f_inv = F_pair_sum(ds, PairSumSpec(1 / x, lo, hi)).value
                worst = max(worst, abs(f - c), abs(f - f_inv))
    return _compare("reduction and x -> 1/x symmetry", worst, tol)


def _ksum(tol):
    tol = _tol(tol, 1e-8)
    rng = np.random.default_rng(3)
    T = 100.0
    g = np.sort(rng.uniform(T + 0.5, 2 * T, 25))
    shift = 0.1 / math.log(T)
    gammas = np.repeat(g, 2)
    betas = np.tile([0.5 - shift, 0.5 + shift], g.size)
    ds = ZeroDataset(gammas, betas, None, T, 2 * T, source="synthetic", on_line=False)
    worst = 0.0
    for b, kid in ((0.5, KernelId.FEJER), (1.0, KernelId.MONTGOMERY_TAYLOR)):
        p = TsangParams(b, kid)
        lhs = kernel_weighted_sum(ds, p, T, QuadratureConfig(abs_tol=1e-13, rel_tol=1e-13))
        rhs = kernel_weighted_integral(ds, p, T)
        worst = max(worst, abs(lhs - rhs) / max(1.0, abs(lhs)))
    return _compare("K-sum sides", worst, tol)


def _re_k_positive_pairs(tol):
    T = 1000.0
    b = 1.0
    L = math.log(T)
    rng = np.random.default_rng(19)
    lowest = math.inf
    for _ in range(200):
        dbeta = rng.uniform(-0.99, 0.99) * b / L
        dgamma = rng.uniform(-30.0, 30.0)
        # -i (rho - rho') log T = (dgamma - i dbeta) log T
        for kid in KernelId:
            val = tsang_K_re_positive(TsangParams(b, kid), dgamma * L, -dbeta * L)
            lowest = min(lowest, val)
    return lowest > 0, f"min Re K_b over in-box pairs {lowest:.3g}"


# ------------------------------------------------------------------- zeros


def _zeros_low(tol):
    tol = _tol(tol, 1e-5)
    ds = compute_zeros(10.0, 100.0)
    first_err = abs(ds.gammas[0] - 14.134725141734693)
    resid = float(np.max(np.abs(hardy_Z(ds.gammas))))
    ok = len(ds) == 29 and first_err <= tol and resid < 1e-6
    return ok, f"{len(ds)} zeros, first error {first_err:.3g}, max |Z| {resid:.3g}"


def _zero_count(tol):
    worst_excess = -math.inf
    detail = []
    ds = compute_zeros(10.0, 3000.0)
    for T in (100.0, 500.0, 1000.0, 2000.0, 3000.0):
        n = int(np.sum(ds.gammas <= T))
        diff = abs(n - (n_of_T(T) - n_of_T(10.0)))
        allowed = 2 + math.log(T) if tol is None else tol
        worst_excess = max(worst_excess, diff - allowed)
        detail.append(f"T={T:g}:{n}")
    return worst_excess <= 0, " ".join(detail)


PROPERTIES: list[Property] = [
    Property("kernels", "fourier_nonnegativity", _fourier_nonnegativity),
    Property("kernels", "cosh_transform_pair", _lemma2_pair),
    Property("kernels", "self_transform", _self_transform),
    Property("kernels", "tsang_evenness", _tsang_evenness),
    Property("kernels", "tsang_positivity_sweep", _tsang_positivity),
    Property("kernels", "tsang_decay", _tsang_decay),
    Property("quadrature", "polynomial_exactness", _polynomial_exactness),
    Property("quadrature", "determinism", _determinism),
    Property("quadrature", "tolerance_halving", _tolerance_halving),
    Property("bounds", "headline_constants", _headline_constants),
    Property("bounds", "mt_reference_table", _mt_table),
    Property("bounds", "comparison_table_mt", _comparison_mt),
    Property("bounds", "comparison_table_fejer", _comparison_fejer),
    Property("bounds", "analytic_limit", _analytic_limit),
    Property("bounds", "failure_thresholds", _failure_thresholds),
    Property("bounds", "monotonicity_dominance", _monotone_dominance),
    Property("paircorr", "integral_representation", _lemma1),
    Property("paircorr", "reduction_symmetry", _reduction_symmetry),
    Property("paircorr", "ksum_identity", _ksum),
    Property("paircorr", "in_box_positivity", _re_k_positive_pairs),
    Property("zeros", "zeros_below_100", _zeros_low),
    Property("zeros", "count_vs_N", _zero_count),
]

GROUPS = tuple(dict.fromkeys(p.group for p in PROPERTIES))


def select(only: list[str] | None) -> list[Property]:
    if not only:
        return list(PROPERTIES)
    names = {p.name for p in PROPERTIES} | {f"{p.group}.{p.name}" for p in PROPERTIES}
    unknown = [o for o in only if o not in GROUPS and o not in names]
    if unknown:
        raise KeyError(f"unknown group or property {unknown[0]!r}; groups: {', '.join(GROUPS)}")
    return [p for p in PROPERTIES if {p.group, p.name, f"{p.group}.{p.name}"} & set(only)]


def run_suite(only: list[str] | None = None, tolerance: float | None = None, out: TextIO = sys.stdout) -> int:
    """Run the selected properties, print one line each, return the exit code."""
    failed = []
    for prop in select(only):
        start = time.perf_counter()
        try:
            ok, detail = prop.check(tolerance)
        except Exception as exc:  # a crash is a failure of that property
            ok, detail = False, f"{type(exc).__name__}: {exc}"
        elapsed = time.perf_counter() - start
        print(f"{'PASS' if ok else 'FAIL'}  {prop.group}.{prop.name}  ({elapsed:.2f}s)  {detail}", file=out)
        if not ok:
            failed.append(f"{prop.group}.{prop.name}")
    if failed:
        print(f"{len(failed)} failed: {', '.join(failed)}", file=out)
        return 1
    return 0
