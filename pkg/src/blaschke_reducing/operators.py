"""Truncated multiplication operators and subspace tests.

Vectors are handled in the orthonormal monomial coordinates of their space
(``x_k = nu_k c_k``), so projections, Gram matrices and operator norms are
plain Euclidean linear algebra.

Two facts keep the truncation honest:

* ``P_N M_phi P_N = P_N M_phi``: multiplication only raises degree, so the
  compressed matrix applied to a truncated vector gives the exact low
  coefficients of the product.
* ``M_phi^*`` maps polynomials of degree ``<= N`` to polynomials of degree
  ``<= N``; the conjugate transpose of the compression is therefore the
  exact adjoint on truncated data. :func:`adjoint_apply` evaluates the same
  thing from the inner-product formula directly.

Closed subspaces are represented by finite orbit sections
``span{phi^j g : j <= J}``. Residual tests feed the lower ``core`` levels
through ``T`` and ``T^*`` and measure what leaves the full section.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from . import kernels
from .blaschke import BlaschkeProduct, auto_truncation_for, taylor, zero_multiset
from .errors import NumericalFailure, UsageError
from .series import PowerSeries
from .spaces import (
    BERGMAN, DIRICHLET, CoeffVector, SpaceKind, U_map,
    kernel_derivative_vector,
)

TOL_RED = 1e-7
TOL_GRAM = 1e-10
RANK_TOL = 1e-9


@dataclass(frozen=True)
class TruncatedOperator:
    """Matrix of ``M_phi`` in the orthonormal monomial basis, ``(N+1)^2``."""

    matrix: np.ndarray
    space: SpaceKind
    symbol: BlaschkeProduct
    trunc_error: float

    @property
    def N(self) -> int:
        return self.matrix.shape[0] - 1

    @property
    def H(self) -> np.ndarray:
        return self.matrix.conj().T


def mult_matrix(phi: BlaschkeProduct, space, N: int) -> TruncatedOperator:
    """``T[j, k] = phi_hat(j - k) nu_j / nu_k`` for ``j >= k``.

    ``trunc_error`` is the largest norm, over basis vectors ``e_k``, of the
    part of ``M_phi e_k`` that falls beyond index ``N``.
    """
    space = SpaceKind.parse(space)
    if N < phi.order:
        raise UsageError(f"truncation {N} below the order {phi.order}")
    s = taylor(phi, 2 * N + 1)
    nu = space.nu(N + 1)
    T = kernels.lower_toeplitz(s.coeffs[: N + 1], nu)
    # mass of M_phi e_k beyond N, column k
    w_ext = space.weights(2 * N + 2)
    c = s.coeffs
    lost = 0.0
    for k in range(N + 1):
        j = np.arange(N + 1, 2 * N + 2)
        vals = np.abs(c[j - k]) ** 2 * w_ext[j] / w_ext[k]
        lost = max(lost, float(vals.sum()))
    err = float(np.sqrt(lost)) + s.tail_bound * float(np.sqrt(w_ext[-1]))
    return TruncatedOperator(T, space, phi, err)


def adjoint_apply(phi: BlaschkeProduct, f: CoeffVector, space=None) -> CoeffVector:
    """``M_phi^* f`` from ``c_k = <f, phi z^k> / w_k``.

    Exact on the stored coefficients of ``f`` (only ``phi_hat(0..N)``
    enters), so no matrix truncation artifact appears.
    """
    space = f.space if space is None else SpaceKind.parse(space)
    if space is not f.space:
        raise UsageError("vector and requested space differ")
    n = f.N
    s = taylor(phi, n)
    w = space.weights(n + 1)
    out = kernels.adjoint_corr(w, f.coeffs, s.coeffs)
    r = max(f.series.decay_rate, phi.max_modulus)
    r = r if f.series.decay_rate > 0 else 0.0
    return CoeffVector(PowerSeries(out, r, f.series.tail_bound * s.l1()), space)


def apply_mult(phi: BlaschkeProduct, f: CoeffVector) -> CoeffVector:
    """``phi * f`` at the truncation of ``f``."""
    return f.times(taylor(phi, f.N))


# ---------------------------------------------------------------------------
# subspaces
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SubspaceBasis:
    """Orthonormal columns ``Q`` (orthonormal-monomial coordinates).

    The first ``core`` columns span the part of the subspace that residual
    tests push through ``T`` and ``T^*``; the remaining columns absorb the
    images. ``generators`` keeps the raw spanning vectors for reports.
    """

    Q: np.ndarray
    space: SpaceKind
    label: str = ""
    core: int | None = None
    generators: tuple = field(default_factory=tuple)
    minimal: bool = True

    def __post_init__(self):
        Q = np.asarray(self.Q, dtype=np.complex128)
        if Q.ndim != 2:
            raise UsageError("basis matrix must be 2-d")
        object.__setattr__(self, "Q", Q)
        if self.core is None:
            object.__setattr__(self, "core", Q.shape[1])

    @property
    def N(self) -> int:
        return self.Q.shape[0] - 1

    @property
    def dim(self) -> int:
        return self.Q.shape[1]

    def vectors(self) -> list[CoeffVector]:
        return [CoeffVector.from_orthonormal(self.Q[:, i], self.space)
                for i in range(self.dim)]

    def gram_defect(self) -> float:
        G = self.Q.conj().T @ self.Q
        return float(np.max(np.abs(G - np.eye(self.dim)))) if self.dim else 0.0

    def project(self, X: np.ndarray) -> np.ndarray:
        return self.Q @ (self.Q.conj().T @ X)

    def with_label(self, label: str) -> "SubspaceBasis":
        return SubspaceBasis(self.Q, self.space, label, self.core,
                             self.generators, self.minimal)


def orthonormalize(X: np.ndarray, rank_tol: float = RANK_TOL,
                   counts=None):
    """Column-by-column Gram-Schmidt with reorthogonalization.

    Columns whose residual falls below ``rank_tol`` times their norm are
    dropped (rank collapse). Returns ``(Q, kept_per_group)`` where groups
    are consecutive runs of ``counts`` columns.
    """
    n, m = X.shape
    Q = np.zeros((n, m), dtype=np.complex128)
    r = 0
    kept = []
    group_sizes = list(counts) if counts is not None else [m]
    col = 0
    for size in group_sizes:
        start = r
        for _ in range(size):
            v = np.array(X[:, col], dtype=np.complex128)
            col += 1
            nv = np.linalg.norm(v)
            if nv == 0:
                continue
            for _ in range(2):
                if r:
                    v -= Q[:, :r] @ (Q[:, :r].conj().T @ v)
            nr = np.linalg.norm(v)
            if nr <= rank_tol * nv:
                continue
            Q[:, r] = v / nr
            r += 1
        kept.append(r - start)
    return Q[:, :r], kept


def _orbit_columns(generators, phi: BlaschkeProduct, J: int, N: int):
    """Columns ``phi^j g`` for ``j = 0..J`` in level order."""
    s = taylor(phi, N).coeffs
    space = generators[0].space
    nu = space.nu(N + 1)
    cols = []
    level = [g.series.extend(N).coeffs for g in generators]
    for j in range(J + 1):
        for c in level:
            cols.append(c * nu)
        if j < J:
            level = [kernels.cauchy_trunc(c, s, N + 1) for c in level]
    return np.array(cols).T


def orbit_subspace(generators, phi: BlaschkeProduct, J: int | None = None,
                   N: int | None = None, core_levels: int | None = None,
                   label: str = "", rank_tol: float = RANK_TOL,
                   tol: float = 1e-10) -> SubspaceBasis:
    """Orthonormal basis of ``span{phi^j g : j <= J}``.

    With ``J=None`` levels are added until the projector onto the
    low-degree window (indices ``<= N // 4``) moves by less than ``tol``
    between successive levels, capped at ``4N/order``. The core is the
    first ``core_levels`` levels (default: half of them).
    """
    generators = list(generators)
    if not generators:
        raise UsageError("no generators")
    space = generators[0].space
    if any(g.space is not space for g in generators):
        raise UsageError("generators live in different spaces")
    if N is None:
        N = max(g.N for g in generators)
    cap = max(2, (4 * N) // max(phi.order, 1))
    if J is None:
        J = _choose_levels(generators, phi, N, cap, tol, rank_tol)
    J = min(J, cap)
    X = _orbit_columns(generators, phi, J, N)
    Q, kept = orthonormalize(X, rank_tol, [len(generators)] * (J + 1))
    if core_levels is None:
        core_levels = max(1, (J + 1) // 2)
    core = int(sum(kept[:core_levels]))
    gens = tuple(g.extend(N) for g in generators)
    return SubspaceBasis(Q, space, label, core, gens)


def _choose_levels(generators, phi, N, cap, tol, rank_tol) -> int:
    win = max(phi.order, N // 4)
    prev = None
    J = 2
    while J < cap:
        X = _orbit_columns(generators, phi, J, N)
        Q, _ = orthonormalize(X, rank_tol)
        P = Q[: win + 1] @ Q[: win + 1].conj().T
        if prev is not None and np.linalg.norm(P - prev, 2) < tol:
            return J
        prev = P
        J = min(cap, J + max(2, J // 2))
    return cap


def span_subspace(vectors, label: str = "", core: int | None = None,
                  rank_tol: float = RANK_TOL) -> SubspaceBasis:
    """Orthonormal basis of the span of explicit vectors (common space)."""
    vectors = list(vectors)
    space = vectors[0].space
    N = max(v.N for v in vectors)
    X = np.array([v.orthonormal(N + 1) for v in vectors]).T
    Q, _ = orthonormalize(X, rank_tol)
    return SubspaceBasis(Q, space, label, core, tuple(vectors))


def monomial_class_subspace(residues, q: int, space, N: int,
                            label: str = "", margin: int = 0) -> SubspaceBasis:
    """``span{z^k : k mod q in residues, k <= N}``; exact, no orbit needed."""
    space = SpaceKind.parse(space)
    residues = sorted(set(int(r) % q for r in residues))
    idx = [k for k in range(N + 1) if k % q in residues]
    Q = np.zeros((N + 1, len(idx)), dtype=np.complex128)
    for col, k in enumerate(idx):
        Q[k, col] = 1.0
    core = sum(1 for k in idx if k <= N - margin)
    gens = tuple(CoeffVector(PowerSeries.monomial(r, N), space)
                 for r in residues)
    return SubspaceBasis(Q, space, label or f"z^k, k = {residues} mod {q}",
                         core, gens)


# ---------------------------------------------------------------------------
# residuals
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ResidualReport:
    invariance_residual: float
    adjoint_invariance_residual: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return max(self.invariance_residual,
                   self.adjoint_invariance_residual) <= self.tolerance

    @property
    def worst(self) -> float:
        return max(self.invariance_residual, self.adjoint_invariance_residual)


def reducing_residual(S: SubspaceBasis, phi: BlaschkeProduct,
                      tol: float = TOL_RED,
                      T: TruncatedOperator | None = None) -> ResidualReport:
    """``||(I - P_S) T P_core||_2`` and ``||(I - P_S) T^* P_core||_2``."""
    if T is None:
        T = mult_matrix(phi, S.space, S.N)
    Qc = S.Q[:, : S.core]
    if Qc.shape[1] == 0:
        return ResidualReport(0.0, 0.0, tol)
    out = []
    for A in (T.matrix, T.H):
        Y = A @ Qc
        Y = Y - S.project(Y)
        out.append(float(np.linalg.norm(Y, 2)))
    return ResidualReport(out[0], out[1], tol)


def adjoint_kernel_basis(phi: BlaschkeProduct, space, N: int) -> np.ndarray:
    """Orthonormal basis of ``ker M_phi^*``: reproducing kernels (and their
    derivatives, for repeated zeros) at the zeros of ``phi``."""
    space = SpaceKind.parse(space)
    vecs = []
    for lam, m in zero_multiset(phi):
        for d in range(m):
            vecs.append(kernel_derivative_vector(lam, d, space, N)
                        .orthonormal(N + 1))
    X = np.array(vecs).T
    Q, _ = np.linalg.qr(X)
    return Q


def wandering_dim(S: SubspaceBasis, phi: BlaschkeProduct,
                  band=(0.1, 0.9), K: np.ndarray | None = None) -> int:
    """``dim(S ⊖ phi S)`` for a reducing ``S``.

    For reducing ``S`` the wandering space ``S ⊖ phi S`` equals
    ``S ∩ ker M_phi^*``, and the principal cosines between ``S`` and the
    ``n``-dimensional kernel are exactly 0 or 1. Cosines are counted above
    1/2; any inside ``band`` means the truncation is too coarse. ``K`` may
    pass a precomputed :func:`adjoint_kernel_basis`.
    """
    if K is None:
        K = adjoint_kernel_basis(phi, S.space, S.N)
    sv = np.linalg.svd(S.Q.conj().T @ K, compute_uv=False)
    bad = sv[(sv > band[0]) & (sv < band[1])]
    if bad.size:
        raise NumericalFailure(
            f"ambiguous principal cosines {np.round(bad, 4)}; "
            "truncation too coarse")
    return int(np.sum(sv > 0.5))


def wandering_vectors(S: SubspaceBasis, phi: BlaschkeProduct,
                      inside: bool = True) -> list[CoeffVector]:
    """Orthonormal basis of ``S ∩ ker M_phi^*`` (or, with ``inside=False``,
    of ``ker M_phi^* ⊖ (S ∩ ker M_phi^*)``) for a reducing ``S``."""
    K = adjoint_kernel_basis(phi, S.space, S.N)
    U, sv, _ = np.linalg.svd(K.conj().T @ S.Q, full_matrices=True)
    r = int(np.sum(sv > 0.5))
    W = K @ (U[:, :r] if inside else U[:, r:])
    return [CoeffVector.from_orthonormal(W[:, i], S.space)
            for i in range(W.shape[1])]


def complement_subspace(S: SubspaceBasis, phi: BlaschkeProduct,
                        J: int | None = None, label: str = "",
                        core_levels: int | None = None) -> SubspaceBasis:
    """Orthogonal complement of a reducing ``S``, rebuilt as the
    ``phi``-orbit of ``ker M_phi^* ⊖ (S ∩ ker M_phi^*)``."""
    gens = wandering_vectors(S, phi, inside=False)
    if not gens:
        return SubspaceBasis(np.zeros((S.N + 1, 0)), S.space, label, 0)
    return orbit_subspace(gens, phi, J=J, N=S.N, label=label,
                          core_levels=core_levels)


def cross_gram_norm(A: SubspaceBasis, B: SubspaceBasis) -> float:
    n = max(A.N, B.N)
    QA = np.zeros((n + 1, A.dim), complex)
    QB = np.zeros((n + 1, B.dim), complex)
    QA[: A.N + 1] = A.Q
    QB[: B.N + 1] = B.Q
    if not A.dim or not B.dim:
        return 0.0
    return float(np.linalg.norm(QA.conj().T @ QB, 2))


def u_pushforward(S: SubspaceBasis) -> SubspaceBasis:
    """Image under ``U f = (z f)'``.

    ``U`` maps the Dirichlet orthonormal monomial ``z^k/sqrt(k+1)`` to the
    Bergman orthonormal monomial ``sqrt(k+1) z^k``, so in orthonormal
    coordinates it is the identity; only the space tag and the generators
    change.
    """
    if S.space is not DIRICHLET:
        raise UsageError("u_pushforward needs a Dirichlet subspace")
    Q, _ = orthonormalize(S.Q)
    gens = tuple(U_map(g) for g in S.generators)
    return SubspaceBasis(Q, BERGMAN, f"U[{S.label}]", S.core, gens, S.minimal)


# ---------------------------------------------------------------------------
# commutant probe
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CommutantProbeResult:
    singular_values: np.ndarray
    estimated_dimension: int
    gap_ratio: float
    epsilon: float

    @property
    def inconclusive(self) -> bool:
        return not self.gap_ratio >= 10.0


def orbit_section_basis(phi: BlaschkeProduct, space, size: int,
                        N_amb: int | None = None) -> tuple[np.ndarray, int]:
    """Orthonormal basis of ``span{phi^j k : k in ker M_phi^*, j <= J}``.

    ``J`` is chosen so the section has dimension ``order * (J+1)`` closest
    to ``size`` from below. Columns live in orthonormal coordinates of
    the ambient degree-``N_amb`` truncation.
    """
    n = phi.order
    J = max(size // n - 1, 0)
    if N_amb is None:
        N_amb = max(4 * size, auto_truncation_for(phi, power=J + 1, tol=1e-16))
    K = adjoint_kernel_basis(phi, space, N_amb)
    gens = [CoeffVector.from_orthonormal(K[:, i], space) for i in range(K.shape[1])]
    Q, _ = orthonormalize(_orbit_columns(gens, phi, J, N_amb))
    return Q, N_amb


def commutant_probe(phi: BlaschkeProduct, space=DIRICHLET, N: int = 24,
                    eps: float = 1e-6, n_values: int = 12,
                    section: str = "orbit") -> CommutantProbeResult:
    """Dimension of ``{T, T^*}'`` for a finite compression ``T`` of ``M_phi``.

    ``section="orbit"`` compresses onto the span of ``phi^j ker M_phi^*``
    (about ``N+1`` dimensions). Every reducing subspace splits that span
    orthogonally, so its projection survives the compression exactly.
    ``section="monomial"`` uses the plain degree-``N`` truncation, which
    only sees reducing subspaces spanned by monomials.

    Builds ``A -> (AT - TA, AT^* - T^*A)`` on row-major ``vec(A)`` and
    takes its smallest singular values. ``estimated_dimension`` counts
    those below ``eps`` (at least 1, the identity always commutes);
    ``gap_ratio`` is first-rejected / last-accepted.
    """
    if section == "orbit":
        Q, N_amb = orbit_section_basis(phi, space, N + 1)
        T = Q.conj().T @ mult_matrix(phi, space, N_amb).matrix @ Q
    elif section == "monomial":
        T = mult_matrix(phi, space, N).matrix
    else:
        raise UsageError(f"unknown section {section!r}")
    n = T.shape[0]
    I = np.eye(n)
    # row-major vec: vec(A X) = (I kron X^T) vec(A), vec(X A) = (X kron I) vec(A)
    Th = T.conj().T
    L = np.vstack([np.kron(I, T.T) - np.kron(T, I),
                   np.kron(I, Th.T) - np.kron(Th, I)])
    sv = scipy.linalg.svdvals(L)[::-1]
    sv = sv[:n_values] if n_values else sv
    d = max(int(np.sum(sv < eps)), 1)
    if d >= sv.size:
        gap = np.inf
    else:
        gap = float(sv[d] / max(sv[d - 1], np.finfo(float).tiny))
    return CommutantProbeResult(np.asarray(sv), d, gap, eps)
