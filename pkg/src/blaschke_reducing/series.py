"""Truncated complex power series and polynomials.

A :class:`PowerSeries` is the first ``N+1`` Taylor coefficients of a
function holomorphic on a disc larger than the unit disc, together with a
geometric decay rate and a bound on the absolute sum of the dropped
coefficients. Bounds are propagated by the arithmetic so downstream code
can report how much truncation may have cost.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import DomainError

TOL_CLUSTER = 1e-7
TOL_ROOT = 1e-10
N_MAX = 16384
DEFAULT_TAIL_TOL = 1e-12


def _as_coeffs(c) -> np.ndarray:
    a = np.atleast_1d(np.asarray(c, dtype=np.complex128)).copy()
    if not np.all(np.isfinite(a)):
        raise DomainError("coefficients must be finite")
    a.setflags(write=False)
    return a


def auto_truncation(rate: float, tol: float = DEFAULT_TAIL_TOL,
                    n_max: int = N_MAX) -> int:
    """Smallest N with ``rate**(N+1) / (1 - rate) < tol`` (capped)."""
    if not 0.0 <= rate < 1.0:
        raise DomainError(f"decay rate {rate} outside [0, 1)")
    if rate == 0.0:
        return 0
    n = int(np.ceil(np.log(tol * (1.0 - rate)) / np.log(rate))) - 1
    return int(min(max(n, 0), n_max))


# ---------------------------------------------------------------------------
# polynomials
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Polynomial:
    """Polynomial with ascending coefficients, trailing zeros trimmed."""

    coeffs: np.ndarray

    def __post_init__(self):
        c = np.atleast_1d(np.asarray(self.coeffs, dtype=np.complex128))
        nz = np.flatnonzero(c)
        c = c[: nz[-1] + 1] if nz.size else c[:1] * 0
        object.__setattr__(self, "coeffs", _as_coeffs(c))

    @property
    def degree(self) -> int:
        if self.coeffs.size == 1 and self.coeffs[0] == 0:
            return -1
        return self.coeffs.size - 1

    def __call__(self, z):
        z = np.asarray(z, dtype=np.complex128)
        return kernels.horner(self.coeffs, z)

    def __add__(self, other: "Polynomial") -> "Polynomial":
        n = max(self.coeffs.size, other.coeffs.size)
        a = np.zeros(n, complex)
        a[: self.coeffs.size] += self.coeffs
        a[: other.coeffs.size] += other.coeffs
        return Polynomial(a)

    def __sub__(self, other: "Polynomial") -> "Polynomial":
        return self + other.scale(-1.0)

    def __mul__(self, other: "Polynomial") -> "Polynomial":
        return Polynomial(np.convolve(self.coeffs, other.coeffs))

    def scale(self, c: complex) -> "Polynomial":
        return Polynomial(self.coeffs * c)

    def derivative(self) -> "Polynomial":
        if self.coeffs.size == 1:
            return Polynomial([0.0])
        return Polynomial(self.coeffs[1:] * np.arange(1, self.coeffs.size))

    def norm(self) -> float:
        return float(np.linalg.norm(self.coeffs))

    @classmethod
    def from_roots(cls, roots, lead: complex = 1.0) -> "Polynomial":
        p = cls([lead])
        for r in roots:
            p = p * cls([-r, 1.0])
        return p


def poly_roots(p: Polynomial, tol_cluster: float = TOL_CLUSTER,
               tol_root: float = TOL_ROOT) -> list[tuple[complex, int]]:
    """All complex roots of ``p`` with multiplicities.

    Companion-matrix eigenvalues, one Newton step per isolated root, then
    agglomerative clustering: candidates closer than ``tol_cluster`` (relative
    to the largest root modulus) always merge; farther pairs merge only if
    the cluster mean is itself a root to ``tol_root * ||p||``. The second
    rule recovers multiple roots whose companion eigenvalues split by
    ``eps**(1/m)``, which exceeds ``tol_cluster`` for ``m >= 3``.
    """
    if p.degree < 1:
        raise DomainError("poly_roots needs degree >= 1")
    c = np.array(p.coeffs)
    pnorm = p.norm()
    # leading coefficients that cancelled to roundoff send roots to infinity
    while c.size > 2 and abs(c[-1]) < 1e-14 * pnorm:
        c = c[:-1]
    p = Polynomial(c)
    # zeros at the origin are exact
    nz0 = int(np.flatnonzero(c)[0])
    core = c[nz0:]
    cand = [complex(r) for r in np.roots(core[::-1])] if core.size > 1 else []
    dp = p.derivative()

    def resid(z):
        s = max(1.0, abs(z)) ** p.degree
        return abs(complex(p(np.array([z]))[0])) / (pnorm * s)

    # clusters as lists of candidate roots; distances scale with modulus
    clusters = [[r] for r in cand]
    while len(clusters) > 1:
        centers = [complex(np.mean(cl)) for cl in clusters]
        best = None
        for i in range(len(clusters)):
            for j in range(i + 1, len(clusters)):
                loc = max(1.0, abs(centers[i]), abs(centers[j]))
                d = abs(centers[i] - centers[j]) / loc
                if best is None or d < best[0]:
                    best = (d, i, j)
        d, i, j = best
        if d > 1e-2:
            break
        merged = clusters[i] + clusters[j]
        if d > tol_cluster and resid(np.mean(merged)) > tol_root:
            break
        clusters = [cl for k, cl in enumerate(clusters) if k not in (i, j)]
        clusters.append(merged)

    out = []
    for cl in clusters:
        z = complex(np.mean(cl))
        if len(cl) == 1:
            dz = complex(dp(np.array([z]))[0])
            if dz != 0:
                step = complex(p(np.array([z]))[0]) / dz
                if abs(step) < 1e-3 * max(1.0, abs(z)):
                    z = z - step
        out.append((z, len(cl)))
    if nz0:
        out.append((0j, nz0))
    # merge an exact-zero block with a numerical cluster at the origin
    out = _merge_close(out, tol_cluster)
    out.sort(key=lambda t: (abs(t[0]), np.angle(t[0])))
    return out


def _merge_close(roots, tol):
    res: list[list] = []
    for z, m in roots:
        for item in res:
            if abs(item[0] - z) <= tol:
                tot = item[1] + m
                item[0] = (item[0] * item[1] + z * m) / tot
                item[1] = tot
                break
        else:
            res.append([z, m])
    return [(complex(z), int(m)) for z, m in res]


def cluster_points(points, tol: float) -> list[tuple[complex, int]]:
    """Group points within ``tol`` of a running cluster mean."""
    return _merge_close([(complex(p), 1) for p in points], tol)


# ---------------------------------------------------------------------------
# power series
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PowerSeries:
    """Truncated power series ``sum_{k<=N} c_k z^k`` with a tail bound.

    ``decay_rate`` is the geometric base r with ``|c_k| <= C r^k``;
    ``C`` is recorded at construction as ``max_k |c_k| / r^k`` over the
    stored coefficients. ``tail_bound`` bounds ``sum_{k>N} |c_k|`` and is
    never smaller than the geometric estimate ``C r^(N+1)/(1-r)``.
    A rate of 0 means the series is a polynomial held exactly.
    """

    coeffs: np.ndarray
    decay_rate: float = 0.0
    tail_bound: float = 0.0

    def __post_init__(self):
        c = _as_coeffs(self.coeffs)
        r = float(self.decay_rate)
        if not 0.0 <= r < 1.0:
            raise DomainError(f"decay rate {r} outside [0, 1)")
        t = float(self.tail_bound)
        if not np.isfinite(t) or t < 0:
            raise DomainError("tail bound must be finite and >= 0")
        object.__setattr__(self, "coeffs", c)
        object.__setattr__(self, "decay_rate", r)
        if r > 0.0:
            t = max(t, self.C * r ** c.size / (1.0 - r))
        object.__setattr__(self, "tail_bound", t)

    @property
    def N(self) -> int:
        return self.coeffs.size - 1

    @property
    def C(self) -> float:
        r = self.decay_rate
        if r == 0.0:
            return float(np.max(np.abs(self.coeffs)))
        k = np.arange(self.coeffs.size)
        with np.errstate(over="ignore", divide="ignore", invalid="ignore"):
            ratio = np.abs(self.coeffs) * np.exp(-k * np.log(r))
        ratio = ratio[np.isfinite(ratio)]
        return float(ratio.max()) if ratio.size else 0.0

    def l1(self) -> float:
        return float(np.abs(self.coeffs).sum())

    def __call__(self, z):
        return kernels.horner(self.coeffs, np.asarray(z, dtype=np.complex128))

    def extend(self, n: int) -> "PowerSeries":
        """Pad with zeros to truncation ``n`` (only when exact or growing)."""
        if n <= self.N:
            return self.truncate(n)
        c = np.zeros(n + 1, complex)
        c[: self.coeffs.size] = self.coeffs
        return PowerSeries(c, self.decay_rate, self.tail_bound)

    def truncate(self, n: int) -> "PowerSeries":
        if n >= self.N:
            return self
        dropped = float(np.abs(self.coeffs[n + 1:]).sum())
        return PowerSeries(self.coeffs[: n + 1], self.decay_rate,
                           self.tail_bound + dropped)

    def scale(self, a: complex) -> "PowerSeries":
        return PowerSeries(self.coeffs * a, self.decay_rate,
                           self.tail_bound * abs(a))

    def __add__(self, other: "PowerSeries") -> "PowerSeries":
        n = max(self.N, other.N)
        a, b = self.extend(n), other.extend(n)
        return PowerSeries(a.coeffs + b.coeffs,
                           max(a.decay_rate, b.decay_rate),
                           a.tail_bound + b.tail_bound)

    def __sub__(self, other: "PowerSeries") -> "PowerSeries":
        return self + other.scale(-1.0)

    @classmethod
    def from_polynomial(cls, p, n: int | None = None) -> "PowerSeries":
        c = p.coeffs if isinstance(p, Polynomial) else np.asarray(p, complex)
        if n is None:
            n = c.size - 1
        if c.size - 1 > n:
            return cls(c, 0.0, 0.0).truncate(n)
        out = np.zeros(n + 1, complex)
        out[: c.size] = c
        return cls(out, 0.0, 0.0)

    @classmethod
    def one(cls, n: int) -> "PowerSeries":
        return cls.from_polynomial([1.0], n)

    @classmethod
    def monomial(cls, k: int, n: int) -> "PowerSeries":
        c = np.zeros(n + 1, complex)
        if k <= n:
            c[k] = 1.0
        return cls(c, 0.0, 0.0 if k <= n else 1.0)


def series_mul(f: PowerSeries, g: PowerSeries) -> PowerSeries:
    """Cauchy product truncated at ``max(f.N, g.N)``."""
    n = max(f.N, g.N)
    f, g = f.extend(n), g.extend(n)
    full = kernels.cauchy_trunc(f.coeffs, g.coeffs, 2 * n + 1)
    c = full[: n + 1]
    # dropped part of the exact product of the truncations
    dropped = float(np.abs(full[n + 1:]).sum())
    tail = (f.l1() * g.tail_bound + g.l1() * f.tail_bound
            + f.tail_bound * g.tail_bound + dropped)
    return PowerSeries(c, max(f.decay_rate, g.decay_rate), tail)


def series_div_linear(f: PowerSeries, lam: complex) -> PowerSeries:
    """``g`` with ``g * (1 - conj(lam) z) = f`` on the stored coefficients."""
    lam = complex(lam)
    if not abs(lam) < 1.0:
        raise DomainError(f"|lambda| = {abs(lam)} is not inside the disc")
    r = abs(lam)
    g = kernels.div_linear(f.coeffs, np.conj(lam))
    if r == 0.0:
        return PowerSeries(g, f.decay_rate, f.tail_bound)
    # g = f * geometric; geometric has l1 = 1/(1-r), tail r^(N+1)/(1-r)
    geo_tail = r ** (f.N + 1) / (1.0 - r)
    tail = (f.l1() * geo_tail + f.tail_bound / (1.0 - r)
            + f.tail_bound * geo_tail)
    return PowerSeries(g, max(f.decay_rate, r), tail)


def series_derivative(f: PowerSeries) -> PowerSeries:
    """Term-wise derivative; truncation drops to ``N-1`` (at least 0)."""
    n = f.N
    if n == 0:
        return PowerSeries([0.0], f.decay_rate, 0.0)
    c = f.coeffs[1:] * np.arange(1, n + 1)
    r = f.decay_rate
    if r == 0.0:
        tail = 0.0 if f.tail_bound == 0.0 else f.tail_bound * (n + 1)
    else:
        # sum_{k>N} k |c_k| with |c_k| <= C r^k, plus the stored-tail term
        C = f.C
        geo = C * r ** (n + 1) * ((n + 1) - n * r) / (1.0 - r) ** 2
        tail = max(geo, f.tail_bound * (n + 1))
    return PowerSeries(c, r, tail)


def shift_down(f: PowerSeries, tol: float = 1e-12) -> PowerSeries:
    """Exact division by ``z``; the constant term must already vanish."""
    if abs(f.coeffs[0]) > tol:
        raise DomainError(
            f"constant coefficient {abs(f.coeffs[0]):.3g} is not zero; "
            "cannot divide by z")
    c = f.coeffs[1:] if f.N >= 1 else np.zeros(1, complex)
    return PowerSeries(c, f.decay_rate, f.tail_bound)


def shift_up(f: PowerSeries) -> PowerSeries:
    """Multiplication by ``z`` keeping the truncation."""
    c = np.zeros(f.N + 1, complex)
    c[1:] = f.coeffs[:-1]
    return PowerSeries(c, f.decay_rate, f.tail_bound + abs(f.coeffs[-1]))
