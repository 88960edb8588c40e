"""Zeros of zeta on the critical line via the Riemann-Siegel Z-function.

For ``t >= RS_CUTOFF`` Z(t) is evaluated with the Riemann-Siegel main sum
plus the correction terms C_0 .. C_4.  The C_k are polynomials in
``p - 1/2`` built from the Taylor series of
``Psi(p) = cos(2 pi (p^2 - p - 1/16)) / cos(2 pi p)``, which is entire; the
series is generated once in extended precision.

Below the cutoff the asymptotic series cannot reach 1e-9, so
``zeta(1/2 + it)`` is summed by Euler-Maclaurin in complex double precision
and rotated by ``exp(i theta(t))``.
"""

from __future__ import annotations

import logging
import math
import warnings
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Sequence

import mpmath
import numpy as np
from scipy.optimize import minimize_scalar

__all__ = [
    "CountMismatchWarning",
    "Zero",
    "ZeroDataset",
    "compute_zeros",
    "density_check",
    "hardy_Z",
    "n_of_T",
    "rs_theta",
]

log = logging.getLogger(__name__)

TWO_PI = 2.0 * math.pi
T_MIN_DOMAIN = 10.0
T_MAX_DOMAIN = 1e6
_PSI_DEGREE = 80
RS_CUTOFF = 400.0
_EM_TERMS = 14


class CountMismatchWarning(UserWarning):
    """The number of located zeros disagrees with the N(T) main term."""


@dataclass(frozen=True, order=True)
class Zero:
    gamma: float
    beta: float = 0.5
    multiplicity: int = 1

    def __post_init__(self):
        if not 0.0 < self.beta < 1.0:
            raise ValueError(f"beta must lie in (0, 1), got {self.beta!r}")
        if not self.gamma > 0.0:
            raise ValueError(f"gamma must be positive, got {self.gamma!r}")
        if int(self.multiplicity) != self.multiplicity or self.multiplicity < 1:
            raise ValueError(f"multiplicity must be a positive integer, got {self.multiplicity!r}")

    @property
    def rho(self) -> complex:
        return complex(self.beta, self.gamma)


def _frozen(a, dtype):
    a = np.array(a, dtype=dtype)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class ZeroDataset:
    """Immutable, height-ordered collection of zeros.

    Stored column-wise (``gammas``, ``betas``, ``multiplicities``) so the
    pair-sum engine can work on arrays directly.
    """

    gammas: np.ndarray
    betas: np.ndarray
    multiplicities: np.ndarray
    t_min: float
    t_max: float
    source: str = "synthetic"
    on_line: bool = True
    count_warning: str | None = field(default=None, compare=False)

    def __post_init__(self):
        g = _frozen(self.gammas, float)
        n = g.size
        b = _frozen(np.full(n, 0.5) if self.betas is None else self.betas, float)
        m = _frozen(np.ones(n, dtype=np.int64) if self.multiplicities is None else self.multiplicities, np.int64)
        object.__setattr__(self, "gammas", g)
        object.__setattr__(self, "betas", b)
        object.__setattr__(self, "multiplicities", m)
        if g.ndim != 1 or b.shape != g.shape or m.shape != g.shape:
            raise ValueError("gammas, betas and multiplicities must be 1-D and equally long")
        if self.source not in ("computed", "file", "synthetic"):
            raise ValueError(f"unknown source {self.source!r}")
        if self.t_min > self.t_max:
            raise ValueError("t_min must not exceed t_max")
        if n == 0:
            return
        if not np.all(np.isfinite(g)) or np.any(g <= 0):
            raise ValueError("ordinates must be finite and positive")
        if np.any(b <= 0) or np.any(b >= 1):
            raise ValueError("every beta must lie in (0, 1)")
        if np.any(m < 1):
            raise ValueError("multiplicities must be >= 1")
        if g[0] < self.t_min or g[-1] > self.t_max:
            raise ValueError("ordinates must lie inside [t_min, t_max]")
        dg = np.diff(g)
        if np.any(dg < 0) or np.any((dg == 0) & (np.diff(b) <= 0)):
            raise ValueError("zeros must be sorted by (gamma, beta) without duplicates")
        if self.on_line and np.any(b != 0.5):
            raise ValueError("on_line dataset has a zero off the critical line")
        if self.source == "synthetic" and not self.is_symmetric():
            raise ValueError("off-line synthetic zeros must come in pairs (beta, gamma), (1 - beta, gamma)")

    @classmethod
    def from_zeros(
        cls,
        zeros: Iterable[Zero],
        t_min: float | None = None,
        t_max: float | None = None,
        source: str = "synthetic",
    ) -> "ZeroDataset":
        zs = sorted(zeros)
        g = [z.gamma for z in zs]
        b = [z.beta for z in zs]
        m = [z.multiplicity for z in zs]
        lo = t_min if t_min is not None else (g[0] if g else 0.0)
        hi = t_max if t_max is not None else (g[-1] if g else 0.0)
        return cls(g, b, m, lo, hi, source=source, on_line=all(x == 0.5 for x in b))

    @classmethod
    def on_line_ordinates(
        cls,
        gammas: Sequence[float],
        t_min: float | None = None,
        t_max: float | None = None,
        source: str = "synthetic",
    ) -> "ZeroDataset":
        g = np.sort(np.asarray(gammas, dtype=float))
        lo = t_min if t_min is not None else (float(g[0]) if g.size else 0.0)
        hi = t_max if t_max is not None else (float(g[-1]) if g.size else 0.0)
        return cls(g, None, None, lo, hi, source=source, on_line=True)

    def __len__(self) -> int:
        return int(self.gammas.size)

    @property
    def zeros(self) -> tuple[Zero, ...]:
        return tuple(
            Zero(float(g), float(b), int(m))
            for g, b, m in zip(self.gammas, self.betas, self.multiplicities)
        )

    @property
    def n_with_multiplicity(self) -> int:
        return int(self.multiplicities.sum())

    def partner_indices(self, tol: float = 1e-12) -> np.ndarray:
        """Index of the zero ``1 - conj(rho)`` for each entry, or -1.

        On-line zeros are their own partner.
        """
        out = np.full(len(self), -1, dtype=np.int64)
        g, b = self.gammas, self.betas
        for i in range(len(self)):
            if b[i] == 0.5:
                out[i] = i
                continue
            lo = int(np.searchsorted(g, g[i] - tol, side="left"))
            hi = int(np.searchsorted(g, g[i] + tol, side="right"))
            for j in range(lo, hi):
                if j != i and abs(b[j] - (1.0 - b[i])) <= tol:
                    out[i] = j
                    break
        return out

    def is_symmetric(self) -> bool:
        """True if every off-line zero has its partner ``1 - conj(rho)``
        with the same multiplicity."""
        if np.all(self.betas == 0.5):
            return True
        partner = self.partner_indices()
        if np.any(partner < 0):
            return False
        return bool(np.all(self.multiplicities[partner] == self.multiplicities))

    def window(self, t_lo: float, t_hi: float) -> "ZeroDataset":
        """Zeros with ``t_lo < gamma <= t_hi``."""
        sel = (self.gammas > t_lo) & (self.gammas <= t_hi)
        lo = max(t_lo, self.t_min)
        hi = min(t_hi, self.t_max)
        return ZeroDataset(
            self.gammas[sel],
            self.betas[sel],
            self.multiplicities[sel],
            min(lo, hi),
            hi,
            source=self.source,
            on_line=self.on_line,
            count_warning=self.count_warning,
        )


def _check_domain(t):
    if np.any(np.asarray(t) < T_MIN_DOMAIN):
        raise ValueError(f"t must be >= {T_MIN_DOMAIN:g}")


def rs_theta(t):
    """Riemann-Siegel theta function from its asymptotic series."""
    _check_domain(t)
    t = np.asarray(t, dtype=float)
    it = 1.0 / t
    it2 = it * it
    corr = it * (1 / 48 + it2 * (7 / 5760 + it2 * (31 / 80640 + it2 * (127 / 430080))))
    out = 0.5 * t * np.log(t / TWO_PI) - 0.5 * t - math.pi / 8 + corr
    return float(out) if out.ndim == 0 else out


@lru_cache(maxsize=1)
def _rs_correction_polys() -> np.ndarray:
    """Coefficient matrix: row i = power q**i, column k = C_k, q = p - 1/2."""
    n = _PSI_DEGREE
    with mpmath.workdps(130):
        pi = mpmath.pi
        shift = 5 * pi / 8
        # -cos(2 pi q^2 - shift) = -sum_k (2 pi q^2)^k / k! * (cos or sin)(shift) * sign
        num = [mpmath.mpf(0)] * (n + 1)
        for k in range(n // 2 + 1):
            if k % 2 == 0:
                c = (-1) ** (k // 2) * mpmath.cos(shift)
            else:
                c = (-1) ** ((k - 1) // 2) * mpmath.sin(shift)
            num[2 * k] = -c * (2 * pi) ** k / mpmath.factorial(k)
        den = [mpmath.mpf(0)] * (n + 1)
        for k in range(0, n + 1, 2):
            den[k] = (-1) ** (k // 2) * (2 * pi) ** k / mpmath.factorial(k)
        psi: list = []
        for k in range(n + 1):
            s = num[k] - mpmath.fsum(den[i] * psi[k - i] for i in range(1, k + 1))
            psi.append(s / den[0])

        def deriv(m):
            return [psi[k] * mpmath.factorial(k) / mpmath.factorial(k - m) for k in range(m, n + 1)]

        def combo(*terms):
            length = max(len(deriv(m)) for m, _ in terms)
            out = [mpmath.mpf(0)] * length
            for m, w in terms:
                for i, c in enumerate(deriv(m)):
                    out[i] += w * c
            return np.array([float(c) for c in out])

        p2, p4, p6, p8 = pi**2, pi**4, pi**6, pi**8
        polys = (
            combo((0, 1)),
            combo((3, -1 / (96 * p2))),
            combo((2, 1 / (64 * p2)), (6, 1 / (18432 * p4))),
            combo((1, -1 / (64 * p2)), (5, -1 / (3840 * p4)), (9, -1 / (5308416 * p6))),
            combo(
                (0, 1 / (128 * p2)),
                (4, mpmath.mpf(19) / (24576 * p4)),
                (8, mpmath.mpf(11) / (5898240 * p6)),
                (12, 1 / (2038431744 * p8)),
            ),
        )
    width = max(p.size for p in polys)
    table = np.zeros((width, len(polys)))
    for k, p in enumerate(polys):
        table[: p.size, k] = p
    table.setflags(write=False)
    return table


@lru_cache(maxsize=1)
def _em_coefficients() -> np.ndarray:
    # B_2k / (2k)!
    return np.array(
        [float(mpmath.bernoulli(2 * k) / mpmath.factorial(2 * k)) for k in range(1, _EM_TERMS + 1)]
    )


def _z_euler_maclaurin(t: np.ndarray) -> np.ndarray:
    s = 0.5 + 1j * t
    n_cut = max(10, math.ceil(float(t.max()) / 2.0))
    logs = np.log(np.arange(1, n_cut, dtype=float))
    head = np.zeros(t.shape, dtype=complex)
    for ln in logs:
        head += np.exp(-s * ln)
    log_n = math.log(n_cut)
    n_pow = np.exp(-s * log_n)
    total = head + n_cut * n_pow / (s - 1.0) + 0.5 * n_pow
    rising = s.copy()
    power = n_pow / n_cut
    for k, coef in enumerate(_em_coefficients(), start=1):
        total += coef * rising * power
        rising = rising * (s + 2 * k - 1) * (s + 2 * k)
        power = power / (n_cut * n_cut)
    return (np.exp(1j * rs_theta(t)) * total).real


def _z_riemann_siegel(t: np.ndarray) -> np.ndarray:
    t = np.asarray(t, dtype=float)
    a = np.sqrt(t / TWO_PI)
    nmax = np.floor(a).astype(np.int64)
    theta = rs_theta(t)
    main = np.zeros_like(t)
    for n in range(1, int(nmax.max()) + 1):
        active = nmax >= n
        term = np.cos(theta - t * math.log(n)) / math.sqrt(n)
        main += np.where(active, term, 0.0)
    main *= 2.0
    q = a - nmax - 0.5
    table = _rs_correction_polys()
    c = np.power.outer(q, np.arange(table.shape[0])) @ table
    inv_a = 1.0 / a
    corr = np.zeros_like(t)
    for k in reversed(range(table.shape[1])):
        corr = corr * inv_a + c[:, k]
    sign = np.where(nmax % 2 == 1, 1.0, -1.0)
    return main + sign * corr / np.sqrt(a)


def hardy_Z(t):
    """Hardy's Z-function; real, with ``|Z(t)| = |zeta(1/2 + it)|``."""
    _check_domain(t)
    t = np.asarray(t, dtype=float)
    scalar = t.ndim == 0
    t = np.atleast_1d(t)
    out = np.empty_like(t)
    low = t < RS_CUTOFF
    if low.any():
        out[low] = _z_euler_maclaurin(t[low])
    if (~low).any():
        out[~low] = _z_riemann_siegel(t[~low])
    return float(out[0]) if scalar else out


def n_of_T(T: float) -> float:
    """Main term of the zero-counting function, including the constant 7/8."""
    if T < 2:
        raise ValueError(f"T must be >= 2, got {T!r}")
    u = T / TWO_PI
    return u * math.log(u) - u + 0.875


def _grid(t_min: float, t_max: float, points_per_gap: float) -> np.ndarray:
    mean_gap = TWO_PI / math.log(max(t_max, 2.0 * TWO_PI) / TWO_PI)
    step = mean_gap / points_per_gap
    n = max(2, math.ceil((t_max - t_min) / step) + 1)
    return np.linspace(t_min, t_max, n)


def _scan(t_min: float, t_max: float, points_per_gap: float, chunk: int = 50_000):
    """Return brackets (lo, hi) around sign changes of Z, plus exact hits."""
    grid = _grid(t_min, t_max, points_per_gap)
    values = np.concatenate([hardy_Z(grid[i : i + chunk]) for i in range(0, grid.size, chunk)])
    brackets: list[tuple[float, float]] = []
    exact: list[float] = []

    hits = np.flatnonzero(values == 0.0)
    exact.extend(float(grid[i]) for i in hits)
    s = np.sign(values)
    change = np.flatnonzero(s[:-1] * s[1:] < 0)
    brackets.extend((float(grid[i]), float(grid[i + 1])) for i in change)

    # A pair of close zeros between two grid points shows up as a dip of |Z|
    # that does not cross zero; look for the dip's bottom.
    mag = np.abs(values)
    inner = np.arange(1, values.size - 1)
    dips = inner[
        (mag[inner] < mag[inner - 1])
        & (mag[inner] < mag[inner + 1])
        & (s[inner - 1] == s[inner])
        & (s[inner] == s[inner + 1])
        & (s[inner] != 0)
    ]
    for i in dips:
        sgn = s[i]
        lo, hi = float(grid[i - 1]), float(grid[i + 1])
        res = minimize_scalar(lambda x: sgn * hardy_Z(x), bounds=(lo, hi), method="bounded",
                              options={"xatol": 1e-12})
        if res.fun < 0:
            tm = float(res.x)
            brackets.append((lo, tm))
            brackets.append((tm, hi))
            log.debug("split a close pair near t=%.6f", tm)
    brackets.sort()
    return brackets, exact


def _refine(lo: np.ndarray, hi: np.ndarray, tol: float) -> np.ndarray:
    """Bisect every bracket simultaneously until it is narrower than ``tol``."""
    lo = lo.copy()
    hi = hi.copy()
    if lo.size == 0:
        return lo
    zlo = hardy_Z(lo)
    while True:
        wide = (hi - lo) > tol
        if not wide.any():
            break
        mid = 0.5 * (lo + hi)
        zm = hardy_Z(np.where(wide, mid, lo))
        same = np.sign(zm) == np.sign(zlo)
        exact = zm == 0.0
        move_lo = wide & same & ~exact
        move_hi = wide & ~same & ~exact
        lo = np.where(move_lo, mid, lo)
        zlo = np.where(move_lo, zm, zlo)
        hi = np.where(move_hi, mid, hi)
        hit = wide & exact
        lo = np.where(hit, mid, lo)
        hi = np.where(hit, mid, hi)
    return 0.5 * (lo + hi)


def compute_zeros(
    t_min: float,
    t_max: float,
    cfg=None,
    *,
    points_per_gap: float = 6.0,
    max_retries: int = 3,
    root_tol: float = 1e-9,
) -> ZeroDataset:
    """Locate the zeros of ``Z`` in ``[t_min, t_max]``.

    A count that disagrees with ``n_of_T(t_max) - n_of_T(t_min)`` by more
    than ``2 + log(t_max)`` triggers a denser rescan (grid doubled, at most
    ``max_retries`` times); a persisting mismatch is reported through
    ``count_warning`` and a :class:`CountMismatchWarning`.

    ``cfg`` is accepted for interface symmetry and is not used.
    """
    if not (T_MIN_DOMAIN <= t_min <= t_max <= T_MAX_DOMAIN):
        raise ValueError(f"need {T_MIN_DOMAIN:g} <= t_min <= t_max <= {T_MAX_DOMAIN:g}")
    if t_min == t_max:
        return ZeroDataset([], None, None, t_min, t_max, source="computed", on_line=True)

    expected = n_of_T(t_max) - n_of_T(t_min)
    allowed = 2.0 + math.log(t_max)
    density = points_per_gap
    for attempt in range(max_retries + 1):
        brackets, exact = _scan(t_min, t_max, density)
        br = np.array(brackets, dtype=float).reshape(-1, 2)
        roots = _refine(br[:, 0], br[:, 1], root_tol)
        gammas = np.unique(np.concatenate([roots, np.array(exact, dtype=float)]))
        mismatch = abs(gammas.size - expected)
        if mismatch <= allowed:
            break
        log.info("zero count %d vs N(T) %.2f; rescanning at %.0f points per gap",
                 gammas.size, expected, 2 * density)
        density *= 2.0

    warning = None
    if mismatch > allowed:
        warning = (f"found {gammas.size} zeros in [{t_min}, {t_max}] but N(T) predicts "
                   f"{expected:.2f} (tolerance {allowed:.2f})")
        warnings.warn(warning, CountMismatchWarning, stacklevel=2)
    return ZeroDataset(gammas, None, None, t_min, t_max, source="computed", on_line=True,
                       count_warning=warning)


def density_check(dataset: ZeroDataset, t: float) -> float:
    """``sum over zeros of 1 / (1 + (t - gamma)^2)``, counted with multiplicity."""
    if len(dataset) == 0:
        return 0.0
    d = t - dataset.gammas
    return math.fsum(dataset.multiplicities / (1.0 + d * d))
