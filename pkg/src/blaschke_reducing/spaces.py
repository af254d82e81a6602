"""Hardy, Bergman and Dirichlet spaces as weighted coefficient spaces.

With ``f = sum c_k z^k`` the squared norms are ``sum w_k |c_k|^2`` with
weights ``1`` (Hardy), ``1/(k+1)`` (Bergman) and ``k+1`` (Dirichlet). The
monomials scaled by ``nu_k = sqrt(w_k)`` form an orthonormal basis, and
linear algebra elsewhere in the package works in those coordinates.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .blaschke import BlaschkeProduct, Moebius, taylor
from .errors import DomainError, UsageError
from .series import PowerSeries, series_derivative, series_mul, shift_down, shift_up

CIRCLE_SLACK = 1e-12


class SpaceKind(enum.Enum):
    HARDY = "hardy"
    BERGMAN = "bergman"
    DIRICHLET = "dirichlet"

    def weights(self, n: int) -> np.ndarray:
        """``w_0 .. w_{n-1}``."""
        k = np.arange(n, dtype=float)
        if self is SpaceKind.HARDY:
            return np.ones(n)
        if self is SpaceKind.BERGMAN:
            return 1.0 / (k + 1.0)
        return k + 1.0

    def nu(self, n: int) -> np.ndarray:
        return np.sqrt(self.weights(n))

    @classmethod
    def parse(cls, s) -> "SpaceKind":
        if isinstance(s, cls):
            return s
        try:
            return cls(str(s).lower())
        except ValueError:
            raise UsageError(f"unknown space {s!r}") from None


HARDY, BERGMAN, DIRICHLET = SpaceKind.HARDY, SpaceKind.BERGMAN, SpaceKind.DIRICHLET


@dataclass(frozen=True)
class CoeffVector:
    """An element of one of the three spaces, held as a truncated series."""

    series: PowerSeries
    space: SpaceKind

    @property
    def coeffs(self) -> np.ndarray:
        return self.series.coeffs

    @property
    def N(self) -> int:
        return self.series.N

    @classmethod
    def from_coeffs(cls, c, space=DIRICHLET, decay_rate=0.0, tail_bound=0.0):
        return cls(PowerSeries(c, decay_rate, tail_bound), SpaceKind.parse(space))

    @classmethod
    def from_orthonormal(cls, x, space) -> "CoeffVector":
        space = SpaceKind.parse(space)
        x = np.asarray(x, complex)
        return cls(PowerSeries(x / space.nu(x.size)), space)

    def orthonormal(self, n: int | None = None) -> np.ndarray:
        """Coordinates ``nu_k c_k`` (padded/truncated to length ``n``)."""
        s = self.series if n is None else self.series.extend(n - 1)
        return s.coeffs * self.space.nu(s.coeffs.size)

    def norm(self) -> float:
        return float(np.sqrt(inner(self, self).real))

    def extend(self, n: int) -> "CoeffVector":
        return CoeffVector(self.series.extend(n), self.space)

    def retag(self, space) -> "CoeffVector":
        return CoeffVector(self.series, SpaceKind.parse(space))

    def scale(self, a: complex) -> "CoeffVector":
        return CoeffVector(self.series.scale(a), self.space)

    def __add__(self, other: "CoeffVector") -> "CoeffVector":
        _same_space(self, other)
        return CoeffVector(self.series + other.series, self.space)

    def __sub__(self, other: "CoeffVector") -> "CoeffVector":
        _same_space(self, other)
        return CoeffVector(self.series - other.series, self.space)

    def times(self, s: PowerSeries) -> "CoeffVector":
        """Multiply by an analytic function given as a series."""
        return CoeffVector(series_mul(self.series, s), self.space)

    def div_z(self, tol: float = 1e-12) -> "CoeffVector":
        return CoeffVector(shift_down(self.series, tol), self.space)

    def mul_z(self) -> "CoeffVector":
        return CoeffVector(shift_up(self.series), self.space)

    def derivative(self) -> "CoeffVector":
        return CoeffVector(series_derivative(self.series), self.space)

    def __call__(self, z):
        return self.series(z)


def _same_space(f: CoeffVector, g: CoeffVector):
    if f.space is not g.space:
        raise UsageError(f"space mismatch: {f.space.value} vs {g.space.value}")


def _tail_sup(f: CoeffVector, n: int) -> float:
    """Bound on ``sup_{k>n} w_k |c_k|``."""
    s = f.series
    if s.tail_bound == 0.0:
        return 0.0
    r = s.decay_rate
    if r == 0.0:
        return np.inf if f.space is DIRICHLET else s.tail_bound
    if f.space is DIRICHLET:
        # (k+1) r^k is decreasing for k >= 1/(-ln r) - 1
        k0 = max(n + 1, int(np.ceil(-1.0 / np.log(r))))
        ks = np.arange(n + 1, k0 + 2)
        return float(s.C * np.max((ks + 1) * r ** ks))
    return float(s.C * r ** (n + 1))


def inner(f: CoeffVector, g: CoeffVector, with_bound: bool = False):
    """``<f, g> = sum w_k f_k conj(g_k)``; optionally with a tail bound."""
    _same_space(f, g)
    n = max(f.N, g.N)
    a, b = f.series.extend(n), g.series.extend(n)
    w = f.space.weights(n + 1)
    val = complex(np.sum(w * a.coeffs * np.conj(b.coeffs)))
    if not with_bound:
        return val
    err = min(_tail_sup(f, n) * b.tail_bound, _tail_sup(g, n) * a.tail_bound)
    return val, float(err)


def dirichlet_energy(f: CoeffVector) -> float:
    """``D(f) = sum k |c_k|^2`` (the area integral of ``|f'|^2``)."""
    if f.space is not DIRICHLET:
        raise UsageError("dirichlet_energy needs a Dirichlet-space vector")
    k = np.arange(f.N + 1)
    return float(np.sum(k * np.abs(f.coeffs) ** 2))


def kernel_vector(lam: complex, space, N: int) -> CoeffVector:
    """Reproducing kernel at ``lam`` truncated at ``N``.

    Coefficients ``conj(lam)**k / w_k``: ``1/(1 - conj(lam) z)`` (Hardy),
    ``1/(1 - conj(lam) z)**2`` (Bergman) and
    ``log(1/(1 - conj(lam) z)) / (conj(lam) z)`` (Dirichlet).
    """
    lam = complex(lam)
    space = SpaceKind.parse(space)
    if not abs(lam) < 1.0:
        raise DomainError(f"|lambda| = {abs(lam)} is not < 1")
    k = np.arange(N + 1)
    c = np.conj(lam) ** k / space.weights(N + 1)
    if lam == 0:
        c[1:] = 0.0
        return CoeffVector(PowerSeries(c), space)
    return CoeffVector(PowerSeries(c, abs(lam)), space)


def kernel_derivative_vector(lam: complex, m: int, space, N: int) -> CoeffVector:
    """Vector reproducing ``f^(m)(lam)``: coefficients
    ``k!/(k-m)! conj(lam)^(k-m) / w_k``."""
    lam = complex(lam)
    space = SpaceKind.parse(space)
    k = np.arange(N + 1)
    ff = np.ones(N + 1)
    for i in range(m):
        ff = ff * np.clip(k - i, 0, None)
    with np.errstate(divide="ignore", invalid="ignore"):
        pw = np.where(k >= m, np.conj(lam) ** np.clip(k - m, 0, None), 0.0)
    if lam == 0:
        pw = (k == m).astype(complex)
    c = ff * pw / space.weights(N + 1)
    return CoeffVector(PowerSeries(c, abs(lam)), space)


def poisson_eval(lam: complex, zeta):
    """``(1 - |lam|^2) / |zeta - lam|^2`` for ``zeta`` on the circle."""
    lam = complex(lam)
    if not abs(lam) < 1.0:
        raise DomainError(f"|lambda| = {abs(lam)} is not < 1")
    zeta = np.asarray(zeta, dtype=np.complex128)
    if np.any(np.abs(np.abs(zeta) - 1.0) > CIRCLE_SLACK):
        raise DomainError("Poisson kernel evaluated off the unit circle")
    out = (1.0 - abs(lam) ** 2) / np.abs(zeta - lam) ** 2
    return out if out.ndim else float(out)


def poisson_sum(zeros, zeta):
    """``sum_i P_{l_i}(zeta)`` over a zero multiset."""
    zeta = np.asarray(zeta, dtype=np.complex128)
    out = np.zeros(zeta.shape)
    for lam in zeros:
        out = out + poisson_eval(lam, zeta)
    return out


def effective_length(c, tol: float = 1e-14) -> int:
    """Index past which all coefficients are below ``tol`` times the max."""
    a = np.abs(np.asarray(c))
    if not a.size or a.max() == 0:
        return 0
    big = np.flatnonzero(a > tol * a.max())
    return int(big[-1]) if big.size else 0


def default_quadrature(*items) -> int:
    n = 0
    for it in items:
        if isinstance(it, CoeffVector):
            n = max(n, effective_length(it.coeffs))
        elif isinstance(it, PowerSeries):
            n = max(n, effective_length(it.coeffs))
    return max(256, 8 * n)


def _samples(f, zeta):
    if callable(f):
        return np.asarray(f(zeta), dtype=np.complex128)
    f = np.asarray(f, dtype=np.complex128)
    if f.shape != zeta.shape:
        raise UsageError("sampled integrand has the wrong number of nodes")
    return f


def circle_pair_integral(f, g, M: int | None = None, with_error: bool = False):
    """Trapezoidal rule for ``(1/2pi) int_T f conj(g) |dzeta|``.

    ``f`` and ``g`` are :class:`CoeffVector`, :class:`PowerSeries`,
    callables of ``zeta``, or arrays of ``M`` samples at
    ``exp(2 pi i j / M)``. For analytic integrands the rule converges
    geometrically; ``with_error`` also returns the difference from the
    rule on every other node as an accuracy estimate.
    """
    if M is None:
        M = default_quadrature(f, g)
    zeta = np.exp(2j * np.pi * np.arange(M) / M)
    fv, gv = _samples(f, zeta), _samples(g, zeta)
    prod = fv * np.conj(gv)
    val = complex(prod.mean())
    if not with_error:
        return val
    half = complex(prod[::2].mean()) if M % 2 == 0 else val
    return val, float(abs(val - half))


def U_map(f: CoeffVector) -> CoeffVector:
    """``f -> (z f)'``, unitary from Dirichlet onto Bergman."""
    if f.space is not DIRICHLET:
        raise UsageError("U_map acts on Dirichlet-space vectors")
    k = np.arange(f.N + 1) + 1.0
    s = f.series
    r, n = s.decay_rate, f.N
    if r == 0.0:
        tail = s.tail_bound * (n + 2)
    else:
        tail = s.C * r ** (n + 1) * ((n + 2) - (n + 1) * r) / (1.0 - r) ** 2
    return CoeffVector(PowerSeries(s.coeffs * k, s.decay_rate, tail), BERGMAN)


def U_inverse(f: CoeffVector) -> CoeffVector:
    """Inverse of :func:`U_map`: ``c_k -> c_k / (k+1)``."""
    if f.space is not BERGMAN:
        raise UsageError("U_inverse acts on Bergman-space vectors")
    k = np.arange(f.N + 1) + 1.0
    s = f.series
    return CoeffVector(PowerSeries(s.coeffs / k, s.decay_rate, s.tail_bound),
                       DIRICHLET)


def bergman_moebius_unitary(alpha: complex, f: CoeffVector,
                            M: int | None = None) -> CoeffVector:
    """``U_alpha f = (f o phi_alpha) * q_alpha`` with
    ``q_alpha = (1 - |alpha|^2) / (1 - conj(alpha) z)^2``.

    Computed by sampling on the unit circle and taking an FFT; the output
    keeps the input truncation.
    """
    if f.space is not BERGMAN:
        raise UsageError("U_alpha acts on Bergman-space vectors")
    mob = Moebius(alpha)
    a = abs(mob.lam)
    r = f.series.decay_rate
    rate = (r + a) / (1.0 + r * a)
    n_out = f.N + 1
    if M is None:
        # enough nodes that aliasing from beyond index n_out is negligible
        extra = int(np.ceil(np.log(1e-17) / np.log(rate))) if rate > 0 else 0
        M = 1 << int(np.ceil(np.log2(max(4 * n_out, n_out + extra, 256))))
    zeta = np.exp(2j * np.pi * np.arange(M) / M)
    w = mob(zeta)
    q = (1.0 - a ** 2) / (1.0 - np.conj(mob.lam) * zeta) ** 2
    vals = f.series(w) * q
    c = np.fft.fft(vals) / M
    return CoeffVector(PowerSeries(c[:n_out], min(rate, 0.999999)), BERGMAN)


# -- convenience constructors ------------------------------------------------

def blaschke_vector(B: BlaschkeProduct, space, N: int) -> CoeffVector:
    return CoeffVector(taylor(B, N), SpaceKind.parse(space))


def monomial_vector(k: int, space, N: int) -> CoeffVector:
    return CoeffVector(PowerSeries.monomial(k, N), SpaceKind.parse(space))
