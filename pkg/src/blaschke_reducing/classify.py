"""Structural decision procedures and the reducing-subspace classifier.

Verdicts come from finite algebraic tests on zeros, critical points and
fibres; the operator numerics (residuals, wandering dimensions,
orthogonality) then certify whatever subspaces a verdict implies. A
disagreement between the two is raised, never dropped.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from itertools import combinations

import numpy as np

from .blaschke import (
    BlaschkeProduct, Moebius, auto_truncation_for, circle_points,
    critical_points, derivative, evaluate, preimages,
)
from .errors import DomainError, InternalConsistencyError, NumericalFailure
from .operators import (
    TOL_RED, ResidualReport, SubspaceBasis, adjoint_kernel_basis,
    complement_subspace, cross_gram_norm, monomial_class_subspace,
    mult_matrix, orbit_subspace, reducing_residual, wandering_dim,
)
from .series import TOL_CLUSTER, cluster_points
from .spaces import DIRICHLET, SpaceKind, blaschke_vector

WITNESS_TOL = 1e-9      # pointwise check of every returned witness
INVOLUTION_TOL = 1e-10  # rho o rho = id, psi2 o rho = psi2
DECIDE_TOL = 1e-6       # structural yes/no threshold on pointwise gaps
ORTHO_TOL = 1e-8
MATRIX_CAP = 2048       # largest truncation used for dense operator work
ORBIT_LEVELS = 9
# levels certified by the residual; the slack above them absorbs the
# spill of U(phi f) = phi U f + z phi' f past the finite window
CORE_LEVELS = 3

VERDICTS = ("case_i", "case_ii", "case_iii", "case_iv", "case_v",
            "reducible_zn", "irreducible", "reducible_partial",
            "undetermined")


@dataclass(frozen=True)
class EquivalenceWitness:
    """``phi = a * phi_lam(target(z))`` with ``a = exp(i*phase)``.

    ``target`` is ``z**n`` when ``alpha == 0`` and ``phi_alpha(z)**n``
    otherwise.
    """

    lam: complex
    phase: float
    n: int
    alpha: complex = 0j
    residual: float = 0.0

    def target(self, z):
        z = np.asarray(z, complex)
        base = z if self.alpha == 0 else Moebius(self.alpha)(z)
        return base ** self.n

    def __call__(self, z):
        return np.exp(1j * self.phase) * Moebius(self.lam)(self.target(z))


@dataclass(frozen=True)
class Decomposition:
    """``phi = outer o inner`` with ``inner = phi_c ** 2``."""

    outer: BlaschkeProduct
    inner: BlaschkeProduct
    critical_point: complex
    involution_residual: float
    residual: float = 0.0

    def rho(self, z):
        m = Moebius(self.critical_point)
        return m(-m(z))


@dataclass(frozen=True)
class EmittedSubspace:
    basis: SubspaceBasis
    report: ResidualReport
    wandering_dim: int
    minimal: bool = True
    symbol: BlaschkeProduct | None = None   # product the residuals refer to

    @property
    def label(self) -> str:
        return self.basis.label


@dataclass(frozen=True)
class ClassificationResult:
    order: int
    verdict: str
    witness: EquivalenceWitness | None = None
    decompositions: tuple = ()
    gamma_mu: tuple | None = None
    subspaces: tuple = ()
    tests: dict = field(default_factory=dict)
    orthogonality: float = 0.0
    note: str = ""

    @property
    def reducible(self) -> bool:
        return self.verdict not in ("case_iv", "case_v", "irreducible",
                                    "undetermined")

    @property
    def minimal_subspaces(self) -> list[EmittedSubspace]:
        return [s for s in self.subspaces if s.minimal]

    @property
    def expected_commutant_dim(self) -> int | None:
        """Number of minimal reducing subspaces (1 when irreducible);
        ``None`` when the classification does not fix it."""
        if self.verdict in ("reducible_partial", "undetermined"):
            return None
        return max(len(self.minimal_subspaces), 1)


# ---------------------------------------------------------------------------
# structural tests
# ---------------------------------------------------------------------------

def _match_multisets(a, b, tol) -> bool:
    """Greedy matching of two equal-size point lists within ``tol``."""
    b = list(b)
    for z in a:
        d = [abs(z - w) for w in b]
        if not d:
            return False
        i = int(np.argmin(d))
        if d[i] > tol:
            return False
        b.pop(i)
    return not b


def rotation_invariant(phi: BlaschkeProduct, q: int,
                       tol: float = TOL_CLUSTER) -> bool:
    """Is the zero multiset invariant under ``z -> exp(2 pi i/q) z``?

    For ``q | n`` this is equivalent to ``phi(w z) = phi(z)``.
    """
    w = np.exp(2j * np.pi / q)
    zs = np.asarray(phi.zeros, complex)
    return _match_multisets(zs * w, zs, tol)


def _fit_unit(f, model) -> tuple[float, float]:
    """Phase ``a`` with ``f = a * model`` on the circle and the pointwise gap."""
    z = circle_points(64)
    pv, mv = np.asarray(f(z)), np.asarray(model(z))
    a = np.vdot(mv, pv) / np.vdot(mv, mv)
    a = a / abs(a)
    return float(np.angle(a)), float(np.max(np.abs(pv - a * mv)))


def is_equivalent_to_zn(phi: BlaschkeProduct,
                        tol: float = TOL_CLUSTER) -> EquivalenceWitness | None:
    """Witness ``phi = a phi_lam(z**n)`` or ``None``.

    The zero multiset must be invariant under rotation by ``exp(2 pi i/n)``;
    then ``lam = alpha**n`` for any zero ``alpha``.
    """
    n = phi.order
    if n < 2:
        raise DomainError("equivalence to z^n needs order >= 2")
    if not rotation_invariant(phi, n, tol):
        return None
    # no snapping: lam = alpha**n is tiny yet nonzero for small distinct zeros
    lam = complex(np.mean(np.asarray(phi.zeros) ** n))
    base = EquivalenceWitness(lam, 0.0, n)
    phase, gap = _fit_unit(phi, base)
    if gap > WITNESS_TOL:
        raise NumericalFailure(
            f"zero orbit matched but phi - a phi_lam(z^{n}) = {gap:.3g}")
    return EquivalenceWitness(lam, phase, n, 0j, gap)


def is_equivalent_to_moebius_power(
        phi: BlaschkeProduct) -> EquivalenceWitness | None:
    """Witness ``phi = a phi_lam(phi_alpha(z)**n)`` or ``None``.

    That happens exactly when ``phi'`` has a single critical point ``c`` of
    multiplicity ``n - 1``. Then ``phi_{phi(c)} o phi = b phi_c**n`` (its
    only zero is ``c``), so ``alpha = c`` and ``lam = phi(c) conj(b)``.
    """
    n = phi.order
    if n < 2:
        raise DomainError("needs order >= 2")
    cs = critical_points(phi)
    if len(cs.points) != 1:
        return None
    c = complex(cs.points[0][0])
    w = Moebius(complex(evaluate(phi, c)))
    b, _ = _fit_unit(lambda t: w(evaluate(phi, t)),
                     EquivalenceWitness(0j, np.pi, n, c))
    lam = w.lam * np.exp(-1j * b)
    phase, gap = _fit_unit(phi, EquivalenceWitness(lam, 0.0, n, c))
    if gap > WITNESS_TOL:
        raise NumericalFailure(
            f"single critical point but equivalence gap {gap:.3g}")
    return EquivalenceWitness(lam, phase, n, c, gap)


def _involution(c: complex):
    m = Moebius(c)
    return lambda z: m(-m(z))


def decompose_order4(phi: BlaschkeProduct) -> list[Decomposition]:
    """All decompositions ``phi = psi1 o phi_c**2`` over critical points."""
    if phi.order != 4:
        raise DomainError("decompose_order4 needs order 4")
    z = circle_points(64)
    fz = evaluate(phi, z)
    out = []
    for c in critical_points(phi).distinct():
        rho = _involution(c)
        gap = float(np.max(np.abs(evaluate(phi, rho(z)) - fz)))
        if gap > DECIDE_TOL:
            continue
        if gap > WITNESS_TOL:
            raise NumericalFailure(
                f"fibre involution at c = {c:.6g} is ambiguous (gap {gap:.3g})")
        inner = BlaschkeProduct(0.0, (c, c))
        vals = evaluate(inner, np.asarray(phi.zeros, complex))
        groups = cluster_points(vals, 1e-6)
        if any(m % 2 for _, m in groups):
            raise NumericalFailure(
                "inner-factor values at the zeros do not pair up")
        zs = tuple(w for w, m in groups for _ in range(m // 2))
        bare = BlaschkeProduct(0.0, zs)
        ph, res = _fit_unit(phi, lambda t: evaluate(bare, evaluate(inner, t)))
        outer = BlaschkeProduct(ph, zs)
        if res > WITNESS_TOL:
            raise NumericalFailure(f"recovered outer factor misses by {res:.3g}")
        inv = max(float(np.max(np.abs(rho(rho(z)) - z))),
                  float(np.max(np.abs(evaluate(inner, rho(z))
                                      - evaluate(inner, z)))))
        if inv > INVOLUTION_TOL:
            raise NumericalFailure(f"involution residual {inv:.3g}")
        out.append(Decomposition(outer, inner, complex(c), inv, res))
    return out


def is_equiv_z_phi_gamma_sq(phi: BlaschkeProduct,
                            tol: float = 1e-8) -> tuple[complex, complex] | None:
    """``(gamma, mu)`` with ``phi_mu o phi = b (z phi_gamma)**2``, or ``None``."""
    if phi.order != 4:
        raise DomainError("needs order 4")
    if abs(complex(derivative(phi, 0.0))) > tol:
        return None
    mu = complex(evaluate(phi, np.array([0j]))[0])
    fib = preimages(phi, mu)
    if sorted(m for _, m in fib) != [2, 2]:
        return None
    small = [p for p, _ in fib if abs(p) <= 1e-6]
    big = [p for p, _ in fib if abs(p) > 1e-6]
    if len(small) != 1 or len(big) != 1:
        return None
    gamma = complex(big[0])
    psi2 = BlaschkeProduct(0.0, (0j, gamma)).power(2)
    mphi = Moebius(mu)
    _, gap = _fit_unit(lambda t: mphi(evaluate(phi, t)), psi2)
    if gap > WITNESS_TOL:
        raise NumericalFailure(f"(z phi_gamma)^2 pattern matched, gap {gap:.3g}")
    return gamma, mu


# ---------------------------------------------------------------------------
# subspace emission
# ---------------------------------------------------------------------------

def default_truncation(phi: BlaschkeProduct, levels: int = ORBIT_LEVELS,
                       cap: int = MATRIX_CAP) -> int:
    """Truncation carrying ``phi**(levels+1)`` to a 1e-13 tail, clamped."""
    N = auto_truncation_for(phi, power=levels + 1, tol=1e-13, n_max=cap)
    return int(min(max(N, 8 * phi.order, 64), cap))


def _emit(S: SubspaceBasis, phi, T, K, tol, minimal=True) -> EmittedSubspace:
    rep = reducing_residual(S, phi, tol, T=T)
    if not rep.passed:
        raise InternalConsistencyError(
            f"subspace {S.label!r} fails the reducing test "
            f"(residuals {rep.invariance_residual:.3g}, "
            f"{rep.adjoint_invariance_residual:.3g})")
    return EmittedSubspace(S, rep, wandering_dim(S, phi, K=K), minimal, phi)


def _monomial_family(phi, q, space, N, T, K, tol, minimal=True):
    return [_emit(monomial_class_subspace([r], q, space, N,
                                          label=f"z^k, k = {r} mod {q}"),
                  phi, T, K, tol, minimal)
            for r in range(q)]


def _psi_squared_family(phi, gamma, mu, space, N, T, K, tol):
    """``span{psi^(2j+1)/z}`` and its complement, ``psi = z phi_gamma``.

    When ``phi = phi_mu o (b psi^2)`` with ``mu != 0`` the residuals are
    certified against ``psi^2`` itself: the two products share reducing
    subspaces, and a finite ``psi^2``-orbit section is only approximately
    ``phi``-stable (leakage decays like ``|mu|`` per level).
    """
    psi = BlaschkeProduct(0.0, (0j, gamma))
    sym = psi.power(2)
    if abs(mu) > TOL_CLUSTER:
        T, K = mult_matrix(sym, space, N), adjoint_kernel_basis(sym, space, N)
    else:
        sym = phi
    g = blaschke_vector(psi, space, N).div_z()
    M = orbit_subspace([g], psi.power(2), J=ORBIT_LEVELS, N=N,
                       core_levels=CORE_LEVELS, label="span psi^(2j+1)/z")
    C = complement_subspace(M, sym, J=ORBIT_LEVELS, core_levels=CORE_LEVELS,
                            label="complement of span psi^(2j+1)/z")
    return [_emit(M, sym, T, K, tol), _emit(C, sym, T, K, tol)]


def enumerate_zn_lattice(n: int, N: int | None = None,
                         space=DIRICHLET) -> list[SubspaceBasis]:
    """All ``2**n - 2`` proper reducing subspaces of ``M_{z^n}``."""
    if not 2 <= n <= 8:
        raise DomainError("lattice enumeration supports 2 <= n <= 8")
    N = 16 * n if N is None else N
    out = []
    for size in range(1, n):
        for sub in combinations(range(n), size):
            lab = "z^k, k mod %d in {%s}" % (n, ",".join(map(str, sub)))
            S = monomial_class_subspace(sub, n, space, N, label=lab)
            out.append(replace(S, minimal=size == 1))
    return out


def _check_orthogonal(subs) -> float:
    worst = 0.0
    mins = [s for s in subs if s.minimal]
    for a, b in combinations(mins, 2):
        worst = max(worst, cross_gram_norm(a.basis, b.basis))
    if worst > ORTHO_TOL:
        raise InternalConsistencyError(
            f"minimal reducing subspaces overlap, cross-Gram {worst:.3g}")
    return worst


def classify(phi: BlaschkeProduct, N: int | None = None,
             tol: float = TOL_RED, space=DIRICHLET) -> ClassificationResult:
    """Reducing-subspace verdict for ``M_phi`` with certified subspaces."""
    n = phi.order
    if n < 2:
        raise DomainError("classification needs order >= 2")
    space = SpaceKind.parse(space)
    # monomial classes only need phi itself resolved; orbit sections
    # need ORBIT_LEVELS+1 powers
    N_orbit = default_truncation(phi) if N is None else int(N)
    N = default_truncation(phi, levels=0) if N is None else int(N)
    lazy = {}

    def ops(M=N):
        if M not in lazy:
            lazy[M] = (mult_matrix(phi, space, M),
                       adjoint_kernel_basis(phi, space, M))
        return lazy[M]

    zn = is_equivalent_to_zn(phi)
    tests = {"equiv_zn": zn is not None}
    witness, decs, gm, subs, note = zn, (), None, [], ""

    if n in (2, 3):
        verdict = "reducible_zn" if zn else "irreducible"
        if zn:
            subs = _monomial_family(phi, n, space, N, *ops(), tol)
    elif n == 4:
        decs = tuple(decompose_order4(phi))
        even = any(abs(d.critical_point) <= 1e-7 for d in decs)
        gm = is_equiv_z_phi_gamma_sq(phi)
        fired = {"i": zn is not None, "ii": even and zn is None,
                 "iii": gm is not None}
        tests.update(decomposable=bool(decs), even=even,
                     psi_squared=gm is not None)
        if sum(fired.values()) > 1:
            raise InternalConsistencyError(
                f"order-4 cases overlap: {sorted(k for k, v in fired.items() if v)}")
        if fired["i"]:
            verdict = "case_i"
            subs = _monomial_family(phi, 4, space, N, *ops(), tol)
        elif fired["ii"]:
            verdict = "case_ii"
            subs = _monomial_family(phi, 2, space, N, *ops(), tol)
        elif fired["iii"]:
            verdict = "case_iii"
            subs = _psi_squared_family(phi, *gm, space, N_orbit,
                                           *ops(N_orbit), tol)
        elif decs:
            verdict = "case_iv"
        else:
            verdict = "case_v"
    else:
        if zn:
            verdict = "reducible_zn"
            T, K = ops()
            subs = [_emit(S, phi, T, K, tol, S.minimal)
                    for S in enumerate_zn_lattice(n, N, space)]
        else:
            q = max((d for d in range(2, n) if n % d == 0
                     and rotation_invariant(phi, d)), default=0)
            mp = is_equivalent_to_moebius_power(phi) if not q else None
            tests.update(rotation_q=q, moebius_power=mp is not None)
            if q:
                verdict = "reducible_partial"
                subs = _monomial_family(phi, q, space, N, *ops(), tol,
                                        minimal=False)
                note = "reducing, minimality not established"
            elif mp is not None:
                verdict, witness = "irreducible", mp
            else:
                verdict = "undetermined"
                note = "no structural test applies at this order"
    ortho = _check_orthogonal(subs)
    return ClassificationResult(n, verdict, witness, decs, gm, tuple(subs),
                                tests, ortho, note)


# ---------------------------------------------------------------------------
# the z^n-equivalence obstruction
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class InfeasibilityReport:
    n: int
    min_residual: float
    argmin: float
    lower_bound: float
    note: str


def eq41_sums(n: int, x) -> tuple[np.ndarray, np.ndarray]:
    """``A(x) = sum_{k>=0} x^k/(nk+2)`` and ``B(x) = A(x) - 1/2``.

    Summed directly until the geometric tail is below 1e-17.
    """
    x = np.atleast_1d(np.asarray(x, float))
    xm = float(np.max(x)) if x.size else 0.0
    if xm >= 1.0:
        raise DomainError("x must lie in [0, 1)")
    K = 8 if xm == 0 else int(np.ceil(np.log(1e-17 * (1 - xm)) / np.log(xm))) + 2
    k = np.arange(K)
    terms = x[:, None] ** k[None, :] / (n * k + 2.0)
    A = terms.sum(axis=1)
    return A, A - 0.5


def check_eq41_infeasible(n: int, grid=None) -> InfeasibilityReport:
    """Minimum over ``grid`` of ``max(|A(x) - 1|, |B(x) - x/2|)``.

    Both equations together force ``1/2 = x/2``, i.e. ``x = 1``. Since
    ``B - x/2 = (A - 1) + (1 - x)/2`` the joint residual is at least
    ``(1 - x)/4``, which is the reported analytic lower bound.
    """
    if n < 2:
        raise DomainError("n must be >= 2")
    grid = np.arange(0.0, 0.99 + 5e-4, 1e-3) if grid is None else np.asarray(grid, float)
    A, B = eq41_sums(n, grid)
    r = np.maximum(np.abs(A - 1.0), np.abs(B - grid / 2))
    i = int(np.argmin(r))
    # refine around the grid minimum
    lo = grid[max(i - 1, 0)]
    hi = grid[min(i + 1, grid.size - 1)]
    fine = np.linspace(lo, hi, 201)
    Af, Bf = eq41_sums(n, fine)
    rf = np.maximum(np.abs(Af - 1.0), np.abs(Bf - fine / 2))
    j = int(np.argmin(rf))
    best, arg = (float(rf[j]), float(fine[j])) if rf[j] < r[i] else (float(r[i]), float(grid[i]))
    bound = float((1.0 - np.max(grid)) / 4.0)
    return InfeasibilityReport(
        n, best, arg, bound,
        "A(x) = 1 with the k = 0 term 1/2 gives B(x) = 1/2; B(x) = x/2 then "
        "forces x = 1, outside [0, 1)")
