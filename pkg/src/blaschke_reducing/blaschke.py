"""Finite Blaschke products.

``BlaschkeProduct(phase, zeros)`` is ``exp(i*phase) * prod phi_l(z)`` with
``phi_l(z) = (l - z) / (1 - conj(l) z)``. Zeros form a multiset (repeats
allowed); all must lie strictly inside the unit disc.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .errors import DomainError, NumericalFailure
from .series import (
    N_MAX, DEFAULT_TAIL_TOL, Polynomial, PowerSeries, poly_roots,
    series_div_linear, shift_up, TOL_CLUSTER,
)

DELTA = 1e-3
EVAL_SLACK = 1e-12
PREIMAGE_RESIDUAL = 1e-8


def circle_points(m: int = 64, offset: float = 0.1234) -> np.ndarray:
    """``m`` equispaced points on the unit circle, rotated off the axes."""
    return np.exp(1j * (2 * np.pi * np.arange(m) / m + offset))


@dataclass(frozen=True)
class Moebius:
    """The involutive disc automorphism ``z -> (lam - z)/(1 - conj(lam) z)``."""

    lam: complex

    def __post_init__(self):
        lam = complex(self.lam)
        if not (np.isfinite(lam.real) and np.isfinite(lam.imag)):
            raise DomainError("lambda must be finite")
        if not abs(lam) < 1.0:
            raise DomainError(f"|lambda| = {abs(lam)} is not < 1")
        object.__setattr__(self, "lam", lam)

    def __call__(self, z):
        z = np.asarray(z, dtype=np.complex128)
        return (self.lam - z) / (1.0 - np.conj(self.lam) * z)

    def as_blaschke(self) -> "BlaschkeProduct":
        return BlaschkeProduct(0.0, (self.lam,))


@dataclass(frozen=True)
class BlaschkeProduct:
    phase: float = 0.0
    zeros: tuple = field(default_factory=tuple)

    def __post_init__(self):
        zs = tuple(complex(z) for z in np.atleast_1d(
            np.asarray(self.zeros, dtype=np.complex128)))
        for z in zs:
            if not (np.isfinite(z.real) and np.isfinite(z.imag)):
                raise DomainError("zeros must be finite")
            if not abs(z) < 1.0:
                raise DomainError(f"zero {z} is not inside the unit disc")
        ph = float(self.phase)
        if not np.isfinite(ph):
            raise DomainError("phase must be finite")
        object.__setattr__(self, "zeros", zs)
        object.__setattr__(self, "phase", float(np.mod(ph, 2 * np.pi)))

    # -- construction helpers -------------------------------------------
    @classmethod
    def monomial(cls, n: int, phase: float = 0.0) -> "BlaschkeProduct":
        """``exp(i*phase) * z**n`` (note ``phi_0 = -z``, hence the shift)."""
        return cls(phase + n * np.pi, (0j,) * n)

    @classmethod
    def from_unit(cls, a: complex, zeros) -> "BlaschkeProduct":
        return cls(float(np.angle(a)), tuple(zeros))

    @property
    def order(self) -> int:
        return len(self.zeros)

    @property
    def unit(self) -> complex:
        return complex(np.exp(1j * self.phase))

    @property
    def max_modulus(self) -> float:
        """Largest zero modulus; the geometric decay base of the Taylor
        coefficients."""
        return max((abs(z) for z in self.zeros), default=0.0)

    def validate(self, delta: float = DELTA) -> "BlaschkeProduct":
        if self.order < 1:
            raise DomainError("a Blaschke product needs at least one zero")
        if self.max_modulus > 1.0 - delta:
            raise DomainError(
                f"zero modulus {self.max_modulus:.6g} exceeds 1 - delta "
                f"= {1.0 - delta:.6g}")
        return self

    def power(self, k: int) -> "BlaschkeProduct":
        return BlaschkeProduct(self.phase * k, self.zeros * k)

    def times(self, other: "BlaschkeProduct") -> "BlaschkeProduct":
        return BlaschkeProduct(self.phase + other.phase,
                               self.zeros + other.zeros)

    def rotate(self, angle: float) -> "BlaschkeProduct":
        return BlaschkeProduct(self.phase + angle, self.zeros)

    # -- polynomial data -------------------------------------------------
    def numerator(self) -> Polynomial:
        """``exp(i*phase) * prod (l - z)``."""
        return Polynomial.from_roots(self.zeros, lead=(-1) ** self.order
                                     ).scale(self.unit)

    def denominator(self) -> Polynomial:
        """``prod (1 - conj(l) z)``."""
        p = Polynomial([1.0])
        for lam in self.zeros:
            p = p * Polynomial([1.0, -np.conj(lam)])
        return p

    def __call__(self, z):
        return evaluate(self, z)

    def __repr__(self):
        zs = ", ".join(f"{z:.6g}" for z in self.zeros)
        return f"BlaschkeProduct(phase={self.phase:.6g}, zeros=({zs}))"


# ---------------------------------------------------------------------------

def evaluate(B: BlaschkeProduct, z):
    """Pointwise value on the closed disc (array in, array out)."""
    z = np.asarray(z, dtype=np.complex128)
    if np.any(np.abs(z) > 1.0 + EVAL_SLACK):
        raise DomainError("evaluation point outside the closed unit disc")
    out = kernels.blaschke_eval(np.asarray(B.zeros, complex), z) * B.unit
    return out if out.ndim else complex(out)


def cauchy_tail_bound(B: BlaschkeProduct, n: int, power: int = 1) -> float:
    """Rigorous bound on ``sum_{k>n} |coeff_k(B**power)|``.

    Cauchy's estimate on a circle of radius ``R`` in ``(1, 1/max|l|)``,
    where each factor is bounded by ``(|l| + R) / (1 - |l| R)``; ``R`` is
    optimized over a log-spaced grid.
    """
    rho = B.max_modulus
    if rho == 0.0:
        return 0.0
    t = np.linspace(0.02, 0.98, 97)
    a = np.abs(np.asarray(B.zeros))
    with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
        R = rho ** (-t)
        logM = power * np.sum(
            np.log(a[:, None] + R) - np.log1p(-a[:, None] * R), axis=0)
        logb = logM - (n + 1) * np.log(R) - np.log1p(-1.0 / R)
    logb = logb[np.isfinite(logb)]
    return float(np.exp(logb.min())) if logb.size else np.inf


def auto_truncation_for(B: BlaschkeProduct, power: int = 1,
                        tol: float = DEFAULT_TAIL_TOL,
                        n_max: int = N_MAX) -> int:
    """Smallest ``N`` whose Cauchy tail bound for ``B**power`` is below
    ``tol`` (capped at ``n_max``)."""
    if B.max_modulus == 0.0:
        return B.order * power
    lo, hi = 0, 64
    while cauchy_tail_bound(B, hi, power) >= tol:
        if hi >= n_max:
            return n_max
        lo, hi = hi, min(2 * hi, n_max)
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if cauchy_tail_bound(B, mid, power) < tol:
            hi = mid
        else:
            lo = mid
    return hi


def taylor(B: BlaschkeProduct, N: int | None = None) -> PowerSeries:
    """First ``N+1`` Taylor coefficients of ``B``.

    Factors are absorbed one at a time: multiply by the numerator
    ``l - z``, then divide by ``1 - conj(l) z``. Every partial product is
    itself a Blaschke product, so intermediate coefficients stay bounded;
    multiplying out the whole numerator first loses many digits for
    repeated zeros. ``decay_rate`` is ``max|l|``; ``tail_bound`` is the
    smaller of the propagated bound and the Cauchy estimate.
    """
    if N is None:
        N = auto_truncation_for(B)
    if N < 0:
        raise DomainError("truncation must be >= 0")
    s = PowerSeries.monomial(0, N).scale(B.unit)
    for lam in B.zeros:
        s = s.scale(lam) - shift_up(s)
        if lam != 0:
            s = series_div_linear(s, lam)
    rho = B.max_modulus
    if rho == 0.0:
        return s
    tail = min(s.tail_bound, cauchy_tail_bound(B, N))
    return PowerSeries(s.coeffs, rho, tail)


def derivative_numerator(B: BlaschkeProduct) -> Polynomial:
    """``p`` with ``B' = p / prod (1 - conj(l) z)**2``; degree <= 2n-2."""
    if B.order < 1:
        raise DomainError("derivative_numerator needs order >= 1")
    num, den = B.numerator(), B.denominator()
    p = num.derivative() * den - num * den.derivative()
    c = np.zeros(max(2 * B.order - 1, 1), complex)
    m = min(c.size, p.coeffs.size)
    c[:m] = p.coeffs[:m]  # the degree 2n-1 terms cancel identically
    return Polynomial(c)


def derivative(B: BlaschkeProduct, z):
    z = np.asarray(z, dtype=np.complex128)
    p = derivative_numerator(B)
    return p(z) / B.denominator()(z) ** 2


@dataclass(frozen=True)
class CriticalSet:
    """Critical points inside the disc, with multiplicity."""

    points: tuple

    @property
    def total(self) -> int:
        return sum(m for _, m in self.points)

    def distinct(self) -> list[complex]:
        return [c for c, _ in self.points]


def critical_points(B: BlaschkeProduct) -> CriticalSet:
    """Zeros of ``B'`` in the disc; there must be exactly ``order - 1``."""
    if B.order < 2:
        raise DomainError("critical_points needs order >= 2")
    roots = poly_roots(derivative_numerator(B))
    inside = tuple((c, m) for c, m in roots if abs(c) < 1.0)
    cs = CriticalSet(inside)
    if cs.total != B.order - 1:
        raise NumericalFailure(
            f"found {cs.total} critical points in the disc, expected "
            f"{B.order - 1} (clustering tolerance broke down)")
    return cs


def preimages(B: BlaschkeProduct, w: complex) -> list[tuple[complex, int]]:
    """Solutions of ``B(z) = w`` in the disc, with multiplicity."""
    w = complex(w)
    if not abs(w) < 1.0:
        raise DomainError("preimages need |w| < 1")
    if B.order == 0:
        raise DomainError("constant Blaschke product has no fibres")
    q = B.numerator() - B.denominator().scale(w)
    roots = poly_roots(q)
    inside = [(z, m) for z, m in roots if abs(z) < 1.0]
    if sum(m for _, m in inside) != B.order or len(inside) != len(roots):
        raise NumericalFailure(
            f"fibre over {w:.6g} has {sum(m for _, m in inside)} points in "
            f"the disc, expected {B.order}")
    vals = evaluate(B, np.array([z for z, _ in inside]))
    bad = np.max(np.abs(vals - w))
    if bad > PREIMAGE_RESIDUAL:
        raise NumericalFailure(f"preimage residual {bad:.3g} too large")
    return inside


def _expand(pairs) -> tuple:
    out = []
    for z, m in pairs:
        out.extend([z] * m)
    return tuple(out)


_REFS = np.array([0.0, 0.5, -0.5, 0.5j, -0.5j, 0.3 + 0.3j], complex)


def _with_phase(zeros, target) -> BlaschkeProduct:
    """Blaschke product with ``zeros`` whose unit constant matches the
    callable ``target`` at a reference point where both are far from 0."""
    bare = BlaschkeProduct(0.0, zeros)
    vals = evaluate(bare, _REFS)
    i = int(np.argmax(np.abs(vals)))
    a = complex(target(_REFS[i:i + 1])[0]) / vals[i]
    if abs(abs(a) - 1.0) > 1e-8:
        raise NumericalFailure(f"phase normalization |a| = {abs(a):.12g}")
    return BlaschkeProduct(float(np.angle(a)), zeros)


def compose(outer: BlaschkeProduct, inner: BlaschkeProduct) -> BlaschkeProduct:
    """``outer(inner(z))`` as a Blaschke product of order ``n1*n2``."""
    zeros = []
    for alpha in outer.zeros:
        zeros.extend(_expand(preimages(inner, alpha)))
    def target(z):
        return evaluate(outer, evaluate(inner, z))
    if outer.order == 0:
        return BlaschkeProduct(outer.phase, ())
    return _with_phase(tuple(zeros), target)


def moebius_post_compose(mu: Moebius, B: BlaschkeProduct) -> BlaschkeProduct:
    """``phi_mu o B``; its zeros are the fibre of ``B`` over ``mu``."""
    return compose(mu.as_blaschke(), B)


def max_pointwise_gap(f, g, m: int = 64) -> float:
    """``max |f - g|`` over ``m`` unit-circle samples."""
    z = circle_points(m)
    return float(np.max(np.abs(np.asarray(f(z)) - np.asarray(g(z)))))


def zero_multiset(B: BlaschkeProduct, tol: float = TOL_CLUSTER):
    """Zeros grouped into (value, multiplicity)."""
    out: list[list] = []
    for z in B.zeros:
        for item in out:
            if abs(item[0] - z) <= tol:
                item[1] += 1
                break
        else:
            out.append([z, 1])
    return [(complex(z), int(m)) for z, m in out]
