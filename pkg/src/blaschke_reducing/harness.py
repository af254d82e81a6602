"""Instance I/O, the identity-verification suite, classification reports,
instance generators and batch execution.

Reports are plain dicts ready for ``json.dumps``; complex numbers are
always ``[re, im]`` pairs. Timings are kept out of the serialized report
so that reruns are byte-identical.
"""
from __future__ import annotations

import json
import os
import tempfile
import time
from concurrent.futures import ProcessPoolExecutor
from functools import lru_cache
from dataclasses import asdict, dataclass, field

import numpy as np

from .blaschke import (
    DELTA, BlaschkeProduct, Moebius, auto_truncation_for, compose, derivative,
    evaluate, moebius_post_compose, taylor,
)
from .classify import (
    ClassificationResult, _fit_unit, check_eq41_infeasible, classify,
    decompose_order4, is_equiv_z_phi_gamma_sq, is_equivalent_to_zn,
)
from .errors import (
    BlaschkeError, DomainError, InternalConsistencyError, NumericalFailure,
    UsageError,
)
from .operators import (
    TOL_RED, adjoint_apply, commutant_probe, orbit_subspace, reducing_residual,
    u_pushforward,
)
from .series import PowerSeries, series_derivative, series_div_linear
from .spaces import (
    BERGMAN, DIRICHLET, CoeffVector, blaschke_vector, circle_pair_integral,
    inner, kernel_vector, poisson_sum, U_map,
)

PROBE_CAP = 32
FAMILIES = ("generic", "equiv_zn", "even_composite", "psi_squared",
            "moebius_power", "case_iv")

# check id -> anchor; the anchor names the identity being exercised
ANCHORS = {
    "dirichlet_bergman_identity": "<p,q>_D = <(zp)', (zq)'>_{L2a}",
    "poisson_boundary_identity": "z phi' conj(phi) = sum P_{l_i} on the circle",
    "powers_inner_phi_one": "<phi, 1>_D = phi(0)",
    "powers_orthogonal": "powers of phi orthogonal in D iff phi(0) = 0",
    "powers_orthogonal_iff": "powers of phi orthogonal in D iff phi(0) = 0",
    "distortion_formula": "D(phi^k f, phi^k g) - D(f, g) = k int sum P_{l_i} f conj(g)",
    "distinguished_norms": "||phi' phi^j||^2_{L2a} = n/(j+1)",
    "distinguished_adjoint_kernel": "M_phi^* phi' = 0 in L2a",
    "distinguished_adjoint_recurrence": "M_phi^* (phi^{j+1})' = (phi^j)' in L2a",
    "distinguished_reducing": "span{phi' phi^j} reduces M_phi on L2a",
    "distinguished_complement": "span{phi^j/(1 - conj(l_i) z)} orthogonal to span{phi' phi^j}",
    "wandering_formula": "M_phi^*(phi/z) = sum conj(l_i) K_{l_i} when phi(0) = 0",
    "reducing_subspace": "emitted subspace reduces M_phi on D",
    "u_pushforward": "(zM)' reduces M_phi on L2a when M reduces it on D",
    "minimal_orthogonality": "distinct minimal reducing subspaces are orthogonal",
    "decomposition_adjoint": "M_phi^* (psi2 - psi2(0))/z for phi = psi1 o psi2",
    "parity_pair": "odd and even spans are the two minimal reducing subspaces",
    "psi_squared_recurrence": "M_phi^* psi^{2j+1}/z = (2j+1)/(2j-1) psi^{2j-1}/z",
    "zn_obstruction": "sum x^k/(nk+2) = 1 and sum_{k>=1} x^k/(nk+2) = x/2 infeasible on [0,1)",
    "commutant_corroboration": "commutant dimension equals the count of minimal reducing subspaces",
}


# ---------------------------------------------------------------------------
# data
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class InstanceSpec:
    phase: float
    zeros: tuple
    label: str | None = None
    expected: str | None = None

    def blaschke(self) -> BlaschkeProduct:
        return BlaschkeProduct(self.phase, self.zeros)

    def to_json(self) -> dict:
        d = {"label": self.label, "phase": float(self.phase),
             "zeros": [[float(z.real), float(z.imag)] for z in self.zeros]}
        if self.expected is not None:
            d["expected"] = self.expected
        return d

    @classmethod
    def from_blaschke(cls, B: BlaschkeProduct, label=None, expected=None):
        return cls(B.phase, tuple(complex(z) for z in B.zeros), label, expected)


@dataclass(frozen=True)
class Config:
    truncation: int | None = None      # None: automatic
    tol: float = TOL_RED
    probe_size: int = 24
    quadrature: int | None = None      # None: max(256, 8 N_eff)
    seed: int = 0
    delta: float = DELTA
    probe: bool = False

    def to_json(self) -> dict:
        d = asdict(self)
        d["truncation"] = "auto" if self.truncation is None else self.truncation
        d["quadrature"] = "auto" if self.quadrature is None else self.quadrature
        return d


@dataclass
class CheckRecord:
    check_id: str
    residual: float
    tolerance: float
    runtime_ms: float = 0.0
    detail: dict = field(default_factory=dict)

    @property
    def paper_anchor(self) -> str:
        return ANCHORS[self.check_id]

    @property
    def passed(self) -> bool:
        return bool(self.residual <= self.tolerance)

    def to_json(self) -> dict:
        d = {"check_id": self.check_id, "paper_anchor": self.paper_anchor,
             "residual": _num(self.residual), "tolerance": self.tolerance,
             "passed": self.passed}
        if self.detail:
            d["detail"] = self.detail
        return d


@dataclass
class Report:
    instance: InstanceSpec
    classification: ClassificationResult | None
    checks: list
    config: Config
    probe: dict | None = None
    error: str | None = None

    @property
    def passed(self) -> bool:
        return self.error is None and all(c.passed for c in self.checks)

    def to_json(self) -> dict:
        c = self.classification
        return {
            "instance": self.instance.to_json(),
            "order": len(self.instance.zeros),
            "verdict": c.verdict if c else None,
            "witnesses": _witnesses(c) if c else {},
            "subspaces": [_subspace_json(s) for s in c.subspaces] if c else [],
            "checks": [r.to_json() for r in self.checks],
            "probe": self.probe,
            "error": self.error,
            "config": self.config.to_json(),
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=False)


def _num(x) -> float | None:
    x = float(x)
    return x if np.isfinite(x) else None


def _cx(z) -> list:
    z = complex(z)
    return [float(z.real), float(z.imag)]


def _witnesses(c: ClassificationResult) -> dict:
    out = {}
    if c.witness is not None:
        w = c.witness
        out["equivalence"] = {"lambda": _cx(w.lam), "phase": w.phase,
                              "n": w.n, "alpha": _cx(w.alpha),
                              "residual": w.residual}
    if c.decompositions:
        out["decompositions"] = [
            {"critical_point": _cx(d.critical_point),
             "outer": {"phase": d.outer.phase,
                       "zeros": [_cx(z) for z in d.outer.zeros]},
             "inner": {"phase": d.inner.phase,
                       "zeros": [_cx(z) for z in d.inner.zeros]},
             "involution_residual": d.involution_residual,
             "residual": d.residual}
            for d in c.decompositions]
    if c.gamma_mu is not None:
        out["psi_squared"] = {"gamma": _cx(c.gamma_mu[0]),
                              "mu": _cx(c.gamma_mu[1])}
    if c.tests:
        out["tests"] = {k: (bool(v) if isinstance(v, (bool, np.bool_)) else v)
                        for k, v in c.tests.items()}
    if c.note:
        out["note"] = c.note
    return out


def _subspace_json(s) -> dict:
    gens = [[_cx(x) for x in g.coeffs[:16]] for g in s.basis.generators]
    return {"label": s.label, "generators": gens,
            "invariance_residual": s.report.invariance_residual,
            "adjoint_residual": s.report.adjoint_invariance_residual,
            "wandering_dim": s.wandering_dim, "minimal": s.minimal,
            "dim": s.basis.dim}


# ---------------------------------------------------------------------------
# parsing
# ---------------------------------------------------------------------------

def parse_instance(obj, delta: float = DELTA, where: str = "") -> InstanceSpec:
    """Validate one instance object; errors carry ``where`` (e.g. a line)."""
    pre = f"{where}: " if where else ""
    if not isinstance(obj, dict):
        raise UsageError(f"{pre}instance must be a JSON object")
    if "zeros" not in obj:
        raise UsageError(f"{pre}missing 'zeros'")
    phase = obj.get("phase", 0.0)
    if isinstance(phase, bool) or not isinstance(phase, (int, float)):
        raise UsageError(f"{pre}'phase' must be a number")
    zs = obj["zeros"]
    if not isinstance(zs, list) or not zs:
        raise UsageError(f"{pre}'zeros' must be a non-empty list of [re, im]")
    zeros = []
    for i, p in enumerate(zs):
        if (not isinstance(p, list) or len(p) != 2
                or any(isinstance(v, bool) or not isinstance(v, (int, float))
                       for v in p)):
            raise UsageError(f"{pre}zero {i} must be a pair [re, im]")
        z = complex(p[0], p[1])
        if not np.isfinite(z.real) or not np.isfinite(z.imag):
            raise UsageError(f"{pre}zero {i} is not finite")
        if abs(z) > 1.0 - delta:
            raise DomainError(
                f"{pre}zero {i} has modulus {abs(z):.6g} > 1 - delta "
                f"= {1.0 - delta:.6g}")
        zeros.append(z)
    label = obj.get("label")
    if label is not None and not isinstance(label, str):
        raise UsageError(f"{pre}'label' must be a string")
    exp = obj.get("expected")
    return InstanceSpec(float(phase), tuple(zeros), label,
                        exp if isinstance(exp, str) else None)


def load_instances(path: str, delta: float = DELTA) -> list[InstanceSpec]:
    """Read a JSON object, a JSON array, or line-delimited JSON objects."""
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    stripped = text.strip()
    if not stripped:
        raise UsageError(f"{path}: empty instance file")
    if stripped.startswith("["):
        try:
            arr = json.loads(stripped)
        except json.JSONDecodeError as e:
            raise UsageError(f"{path}:{e.lineno}: {e.msg}") from None
        return [parse_instance(o, delta, f"{path}[{i}]") for i, o in enumerate(arr)]
    try:
        return [parse_instance(json.loads(stripped), delta, path)]
    except json.JSONDecodeError:
        pass
    out = []
    for ln, line in enumerate(text.splitlines(), 1):
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as e:
            raise UsageError(f"{path}:{ln}: {e.msg}") from None
        out.append(parse_instance(obj, delta, f"{path}:{ln}"))
    return out


# ---------------------------------------------------------------------------
# checks
# ---------------------------------------------------------------------------

class _Recorder:
    def __init__(self):
        self.checks: list[CheckRecord] = []

    def run(self, check_id, fn, tol):
        t0 = time.perf_counter()
        out = fn()
        res, detail = out if isinstance(out, tuple) else (out, {})
        ms = 1e3 * (time.perf_counter() - t0)
        self.checks.append(CheckRecord(check_id, float(res), tol, ms, detail))


def _rand_poly(rng, deg, space=DIRICHLET):
    c = rng.normal(size=deg + 1) + 1j * rng.normal(size=deg + 1)
    return CoeffVector.from_coeffs(c, space)


def _N(phi, cfg, power=2, tol=1e-14, cap=4096):
    if cfg.truncation is not None:
        return int(cfg.truncation)
    return int(min(max(auto_truncation_for(phi, power, tol, cap), 32), cap))


def _check_weighted_identity(phi, cfg, rng):
    worst = 0.0
    for _ in range(5):
        p, q = _rand_poly(rng, 8), _rand_poly(rng, 8)
        a = inner(p, q)
        b = inner(U_map(p), U_map(q))
        worst = max(worst, abs(a - b) / max(abs(a), 1e-300))
    return worst


def _check_poisson(phi, cfg):
    z = np.exp(2j * np.pi * np.arange(256) / 256)
    lhs = z * derivative(phi, z) * np.conj(evaluate(phi, z))
    return float(np.max(np.abs(lhs - poisson_sum(phi.zeros, z))))


def _power_vectors(phi, N, kmax=8):
    out = [CoeffVector(PowerSeries.one(N), DIRICHLET)]
    for k in range(1, kmax + 1):
        out.append(CoeffVector(taylor(phi.power(k), N), DIRICHLET))
    return out


def _check_powers(phi, cfg):
    N = _N(phi, cfg, power=8)
    vs = _power_vectors(phi, N)
    G = np.array([[inner(a, b) for b in vs] for a in vs])
    off = float(np.max(np.abs(G - np.diag(np.diag(G)))))
    return off, {"max_offdiag": off, "order_of_zero_at_0":
                 int(sum(1 for z in phi.zeros if abs(z) <= 1e-12))}


def _check_inner_phi_one(phi, cfg):
    N = _N(phi, cfg)
    f = CoeffVector(taylor(phi, N), DIRICHLET)
    one = CoeffVector(PowerSeries.one(N), DIRICHLET)
    v = inner(f, one)
    p0 = complex(evaluate(phi, 0.0))
    return abs(v - p0), {"inner_phi_one": _cx(v), "phi0": _cx(p0)}


def _check_distortion(phi, cfg, rng):
    kmax = 5 if phi.order <= 4 else 3
    N = _N(phi, cfg, power=kmax) + 16
    worst = 0.0
    for _ in range(2):
        f, g = _rand_poly(rng, 5).extend(N), _rand_poly(rng, 5).extend(N)
        kk = np.arange(N + 1)

        def dform(a, b):
            return np.sum(kk * a.coeffs[: N + 1] * np.conj(b.coeffs[: N + 1]))

        base = dform(f, g)
        for k in range(1, kmax + 1):
            pk = taylor(phi.power(k), N)
            lhs = dform(f.times(pk).extend(N), g.times(pk).extend(N)) - base
            rhs = k * circle_pair_integral(
                lambda z: poisson_sum(phi.zeros, z) * f(z), g, M=cfg.quadrature)
            worst = max(worst, abs(lhs - rhs) / max(1.0, abs(lhs)))
    return worst


def _distinguished(phi, N):
    """``phi'`` as a Bergman vector of length ``N + 1``."""
    return CoeffVector(series_derivative(taylor(phi, N + 1)), BERGMAN)


def _check_distinguished(phi, cfg, rec):
    n = phi.order
    N = _N(phi, cfg, power=12) + 2
    pw = [CoeffVector(taylor(phi.power(j), N + 1), BERGMAN) if j else
          CoeffVector(PowerSeries.one(N + 1), BERGMAN) for j in range(12)]
    d = _distinguished(phi, N)

    def norms():
        worst = 0.0
        for j in range(11):
            v = d.times(pw[j].series.truncate(N)).extend(N)
            worst = max(worst, abs(inner(v, v).real * (j + 1) / n - 1.0))
        return worst

    rec.run("distinguished_norms", norms, 1e-8)
    rec.run("distinguished_adjoint_kernel",
            lambda: adjoint_apply(phi, d).norm(), 1e-9)

    def recurrence():
        worst = 0.0
        for j in range(1, 7):
            a = CoeffVector(series_derivative(pw[j + 1].series), BERGMAN)
            b = CoeffVector(series_derivative(pw[j].series), BERGMAN)
            worst = max(worst, (adjoint_apply(phi, a) - b).norm())
        return worst

    rec.run("distinguished_adjoint_recurrence", recurrence, 1e-8)

    def reducing():
        S = orbit_subspace([d], phi, J=8, N=N, label="M0")
        return reducing_residual(S, phi).worst

    rec.run("distinguished_reducing", reducing, 1e-7)


def _check_distinguished_complement(phi, cfg):
    N = _N(phi, cfg, power=6)
    d = _distinguished(phi, N)
    lams = [z for z in phi.zeros if abs(z) > 1e-12]
    worst = 0.0
    for j in range(5):
        pj = taylor(phi.power(j), N) if j else PowerSeries.one(N)
        for lam in lams:
            v = CoeffVector(series_div_linear(pj, lam), BERGMAN)
            for k in range(5):
                w = d.times(taylor(phi.power(k), N)).extend(N) if k else d
                worst = max(worst, abs(inner(v, w)) / (v.norm() * w.norm()))
    return worst


def _check_wandering_formula(phi, cfg):
    N = _N(phi, cfg, power=2)
    f = blaschke_vector(phi, DIRICHLET, N).div_z()
    lhs = adjoint_apply(phi, f)
    rest = list(phi.zeros)
    rest.remove(min(rest, key=abs))
    rhs = CoeffVector.from_coeffs(np.zeros(N + 1), DIRICHLET)
    for lam in rest:
        rhs = rhs + kernel_vector(lam, DIRICHLET, N).scale(np.conj(lam))
    return (lhs - rhs).norm()


def _check_decomposition_adjoint(phi, dec, cfg):
    N = _N(phi, cfg, power=2)
    h = blaschke_vector(dec.inner, DIRICHLET, N)
    hz = CoeffVector.from_coeffs(np.r_[h.coeffs[1:], 0.0], DIRICHLET)
    rhs = hz.scale(np.conj(complex(evaluate(dec.outer, 0.0))))
    d1 = np.conj(complex(derivative(dec.outer, 0.0)))
    for a in dec.inner.zeros:
        rhs = rhs + kernel_vector(a, DIRICHLET, N).scale(d1 * np.conj(a))
    return (adjoint_apply(phi, hz) - rhs).norm()


def _check_psi_recurrence(phi, gamma, cfg):
    psi = BlaschkeProduct(0.0, (0j, gamma))
    b, _ = _fit_unit(lambda z: evaluate(phi, z), psi.power(2))
    N = _N(phi, cfg, power=7)
    worst = 0.0
    for j in range(1, 6):
        hi = blaschke_vector(psi.power(2 * j + 1), DIRICHLET, N + 1).div_z()
        lo = blaschke_vector(psi.power(2 * j - 1), DIRICHLET, N + 1).div_z()
        want = lo.scale(np.exp(-1j * b) * (2 * j + 1) / (2 * j - 1))
        worst = max(worst, (adjoint_apply(phi, hi) - want).norm())
    return worst


@lru_cache(maxsize=None)
def _check_zn_obstruction(n):
    rep = check_eq41_infeasible(n)
    return max(0.0, 1e-3 - rep.min_residual), {
        "min_joint_residual": rep.min_residual, "argmin_x": rep.argmin,
        "analytic_lower_bound": rep.lower_bound}


def _classification_checks(c: ClassificationResult, rec: _Recorder,
                           cfg: Config):
    for s in c.subspaces:
        rec.run("reducing_subspace",
                lambda s=s: (s.report.worst, {"label": s.label}), cfg.tol)
    for s in c.subspaces:
        if s.basis.space is not DIRICHLET:
            continue

        def push(s=s):
            B = u_pushforward(s.basis)
            return reducing_residual(B, s.symbol).worst, {"label": s.label}

        rec.run("u_pushforward", push, cfg.tol)
    if len(c.minimal_subspaces) > 1:
        rec.run("minimal_orthogonality", lambda: c.orthogonality, 1e-8)


def _probe_json(r) -> dict:
    return {"estimated_dimension": r.estimated_dimension,
            "gap_ratio": _num(r.gap_ratio),
            "inconclusive": r.inconclusive,
            "singular_values": [float(x) for x in r.singular_values],
            "epsilon": r.epsilon}


def _probe(phi, c, cfg, rec) -> dict:
    if cfg.probe_size > PROBE_CAP:
        raise UsageError(f"probe size {cfg.probe_size} exceeds the cap {PROBE_CAP}")
    r = commutant_probe(phi, DIRICHLET, cfg.probe_size)
    out = _probe_json(r)
    want = c.expected_commutant_dim if c is not None else None
    out["expected_dimension"] = want
    if want is not None and not r.inconclusive:
        rec.run("commutant_corroboration",
                lambda: (abs(r.estimated_dimension - want),
                         {"estimated": r.estimated_dimension, "expected": want}),
                0.0)
    return out


def _classify(phi, cfg) -> ClassificationResult:
    return classify(phi, N=cfg.truncation, tol=cfg.tol)


def run_classify(spec: InstanceSpec, config: Config = Config()) -> Report:
    """Classification report; ``config.probe`` adds commutant corroboration."""
    phi = spec.blaschke()
    if phi.order < 2:
        raise UsageError("classification needs order >= 2")
    rec = _Recorder()
    c = _classify(phi, config)
    _classification_checks(c, rec, config)
    probe = _probe(phi, c, config, rec) if config.probe else None
    return Report(spec, c, rec.checks, config, probe)


def run_verify_suite(spec: InstanceSpec, config: Config = Config()) -> Report:
    """Every applicable identity check plus the classification checks."""
    phi = spec.blaschke()
    rng = np.random.default_rng(config.seed)
    rec = _Recorder()
    n = phi.order
    zero_at_0 = any(abs(z) <= 1e-12 for z in phi.zeros)

    rec.run("dirichlet_bergman_identity",
            lambda: _check_weighted_identity(phi, config, rng), 1e-12)
    rec.run("poisson_boundary_identity", lambda: _check_poisson(phi, config), 1e-10)
    rec.run("powers_inner_phi_one", lambda: _check_inner_phi_one(phi, config), 1e-10)
    gram = _check_powers(phi, config)
    if zero_at_0:
        rec.run("powers_orthogonal", lambda: gram, 1e-8)

    def iff():
        orth = gram[0] <= 1e-8
        p0 = abs(complex(evaluate(phi, 0.0))) <= 1e-10
        return float(orth != p0), {"orthogonal": bool(orth), "phi0_vanishes": bool(p0),
                                   "max_offdiag": gram[0]}

    rec.run("powers_orthogonal_iff", iff, 0.0)
    rec.run("distortion_formula", lambda: _check_distortion(phi, config, rng), 1e-8)
    _check_distinguished(phi, config, rec)
    rest = [z for z in phi.zeros if abs(z) > 1e-12]
    distinct = all(abs(a - b) > 1e-7 for i, a in enumerate(rest) for b in rest[i + 1:])
    if zero_at_0 and len(rest) == n - 1 and distinct and rest:
        rec.run("distinguished_complement",
                lambda: _check_distinguished_complement(phi, config), 1e-8)
    if zero_at_0:
        rec.run("wandering_formula", lambda: _check_wandering_formula(phi, config), 1e-8)
    if n >= 2:
        rec.run("zn_obstruction", lambda: _check_zn_obstruction(n), 0.0)

    c = None
    if n >= 2:
        c = _classify(phi, config)
        _classification_checks(c, rec, config)
        if n == 4:
            for dec in c.decompositions:
                rec.run("decomposition_adjoint",
                        lambda dec=dec: _check_decomposition_adjoint(phi, dec, config),
                        1e-8)
            if c.verdict == "case_ii":
                dims = [s.wandering_dim for s in c.subspaces]
                rec.run("parity_pair", lambda: (
                    float(max(abs(d - 2) for d in dims) + abs(len(dims) - 2)),
                    {"wandering_dims": dims}), 0.0)
            if c.gamma_mu is not None and abs(c.gamma_mu[1]) <= 1e-7:
                rec.run("psi_squared_recurrence",
                        lambda: _check_psi_recurrence(phi, c.gamma_mu[0], config),
                        1e-8)
    probe = _probe(phi, c, config, rec) if config.probe and n >= 2 else None
    return Report(spec, c, rec.checks, config, probe)


def run_probe(spec: InstanceSpec, config: Config = Config()) -> dict:
    phi = spec.blaschke()
    if config.probe_size > PROBE_CAP:
        raise UsageError(f"probe size {config.probe_size} exceeds the cap {PROBE_CAP}")
    r = commutant_probe(phi, DIRICHLET, config.probe_size)
    return {"instance": spec.to_json(), "probe": _probe_json(r),
            "config": config.to_json()}


# ---------------------------------------------------------------------------
# generators
# ---------------------------------------------------------------------------

def _rand_disc(rng, rmin=0.0, rmax=0.8) -> complex:
    r = rng.uniform(rmin, rmax)
    return complex(r * np.exp(2j * np.pi * rng.uniform()))


def _label_for(order: int, case4: str, low: str, high: str) -> str:
    return case4 if order == 4 else (low if order < 4 else high)


def _gen_one(family, rng, order):
    """One ``(BlaschkeProduct, expected verdict)`` of the family."""
    phase = float(rng.uniform(0, 2 * np.pi))
    if family == "generic":
        n = order or 4
        while True:
            B = BlaschkeProduct(phase, tuple(_rand_disc(rng) for _ in range(n)))
            if is_equivalent_to_zn(B) is not None:
                continue
            if n == 4 and (decompose_order4(B) or is_equiv_z_phi_gamma_sq(B)):
                continue
            if n > 4:
                c = classify(B, N=64)
                if c.verdict != "undetermined":
                    continue
            return B, _label_for(n, "case_v", "irreducible", "undetermined")
    if family == "equiv_zn":
        n = order or 4
        lam = _rand_disc(rng, 0.0, 0.6)
        B = moebius_post_compose(Moebius(lam), BlaschkeProduct.monomial(n))
        return B.rotate(phase), _label_for(n, "case_i", "reducible_zn", "reducible_zn")
    if family == "even_composite":
        while True:
            a, b = _rand_disc(rng, 0.1, 0.8), _rand_disc(rng, 0.1, 0.8)
            if abs(a + b) > 0.05:   # a = -b would make phi equivalent to z^4
                break
        psi1 = BlaschkeProduct(phase, (a, b))
        B = compose(psi1, BlaschkeProduct.monomial(2))
        mu = _rand_disc(rng, 0.0, 0.3)
        return moebius_post_compose(Moebius(mu), B), "case_ii"
    if family == "psi_squared":
        g = _rand_disc(rng, 0.1, 0.8)
        return BlaschkeProduct(0.0, (0j, g)).power(2).rotate(phase), "case_iii"
    if family == "moebius_power":
        n = order or 4
        a = _rand_disc(rng, 0.1, 0.8)
        B = BlaschkeProduct(phase, (a,) * n)
        return B, _label_for(n, "case_iv", "irreducible", "irreducible")
    if family == "case_iv":
        g = _rand_disc(rng, 0.1, 0.7)
        lam = _rand_disc(rng, 0.1, 0.7)
        outer = BlaschkeProduct(phase, (lam, lam))
        return compose(outer, BlaschkeProduct(0.0, (0j, g))), "case_iv"
    raise UsageError(f"unknown family {family!r}; choose from {', '.join(FAMILIES)}")


def gen_instances(family: str, count: int, seed: int,
                  order: int | None = None) -> list[InstanceSpec]:
    """Deterministic instances with known ground-truth verdicts."""
    if family not in FAMILIES:
        raise UsageError(f"unknown family {family!r}; choose from {', '.join(FAMILIES)}")
    if count < 0:
        raise UsageError("count must be >= 0")
    rng = np.random.default_rng([seed, FAMILIES.index(family)])
    out = []
    for i in range(count):
        B, label = _gen_one(family, rng, order)
        out.append(InstanceSpec.from_blaschke(B, f"{family}-{i:03d}", label))
    return out


# ---------------------------------------------------------------------------
# batch
# ---------------------------------------------------------------------------

def exit_code_for(exc: BaseException | None, passed: bool = True) -> int:
    if exc is None:
        return 0 if passed else 1
    if isinstance(exc, (NumericalFailure, InternalConsistencyError)):
        return 3
    if isinstance(exc, (UsageError, DomainError, BlaschkeError, OSError)):
        return 2
    raise exc


def atomic_write(path: str, text: str):
    d = os.path.dirname(os.path.abspath(path))
    os.makedirs(d, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".tmp-", suffix=".json")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _batch_worker(args):
    spec, cfg = args
    try:
        rep = run_verify_suite(spec, cfg)
        return rep.to_json(), 0 if rep.passed else 1
    except (BlaschkeError, ArithmeticError, AssertionError) as e:
        code = exit_code_for(e)
        d = {"instance": spec.to_json(), "order": len(spec.zeros),
             "verdict": None, "witnesses": {}, "subspaces": [], "checks": [],
             "probe": None, "error": f"{type(e).__name__}: {e}",
             "config": cfg.to_json()}
        return d, code


def summarize(reports: list[dict]) -> dict:
    counts: dict = {}
    worst: dict = {}
    failures = 0
    mismatches = []
    for r in reports:
        v = r["verdict"] or "error"
        counts[v] = counts.get(v, 0) + 1
        exp = r["instance"].get("expected")
        if exp is not None and exp != r["verdict"]:
            mismatches.append(r["instance"]["label"])
        for c in r["checks"]:
            res = c["residual"] if c["residual"] is not None else float("inf")
            worst[c["check_id"]] = max(worst.get(c["check_id"], 0.0), res)
            failures += not c["passed"]
    return {"instances": len(reports), "verdict_counts": dict(sorted(counts.items())),
            "max_residual": dict(sorted(worst.items())),
            "failed_checks": failures, "label_mismatches": mismatches}


def run_batch(specs: list[InstanceSpec], out_dir: str, config: Config,
              jobs: int | None = None) -> tuple[dict, int]:
    """Verify every instance, one report file each plus ``summary.json``."""
    jobs = jobs or os.cpu_count() or 1
    work = [(s, config) for s in specs]
    if jobs == 1 or len(work) <= 1:
        results = [_batch_worker(w) for w in work]
    else:
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            results = list(ex.map(_batch_worker, work))
    reports = []
    code = 0
    for i, (d, c) in enumerate(results):
        name = d["instance"].get("label") or f"instance-{i:04d}"
        safe = "".join(ch if ch.isalnum() or ch in "-_." else "_" for ch in name)
        atomic_write(os.path.join(out_dir, f"{i:04d}-{safe}.json"),
                     json.dumps(d, indent=1) + "\n")
        reports.append(d)
        code = max(code, c)
    summary = summarize(reports)
    if summary["label_mismatches"]:
        code = max(code, 1)
    atomic_write(os.path.join(out_dir, "summary.json"),
                 json.dumps(summary, indent=1) + "\n")
    return summary, code
