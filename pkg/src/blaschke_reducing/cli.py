"""Command-line front end.

Exit codes: 0 all checks pass, 1 some check failed, 2 bad input,
3 numerical breakdown.
"""
from __future__ import annotations

import argparse
import glob
import json
import os
import sys

from .blaschke import DELTA
from .classify import enumerate_zn_lattice
from .errors import BlaschkeError
from .harness import (
    FAMILIES, Config, atomic_write, exit_code_for, gen_instances,
    load_instances, run_batch, run_classify, run_probe, run_verify_suite,
)
from .operators import TOL_RED, mult_matrix, reducing_residual
from .blaschke import BlaschkeProduct


def _config(a) -> Config:
    trunc = None if a.truncation in (None, "auto") else int(a.truncation)
    quad = None if a.quadrature in (None, "auto") else int(a.quadrature)
    return Config(truncation=trunc, tol=a.tol, probe_size=a.probe_size,
                  quadrature=quad, seed=a.seed, delta=a.delta,
                  probe=getattr(a, "probe", False))


def _emit(lines: list[str], out: str | None):
    text = "\n".join(lines) + "\n"
    if out:
        atomic_write(out, text)
    else:
        sys.stdout.write(text)


def _per_instance(a, fn) -> int:
    cfg = _config(a)
    specs = load_instances(a.file, cfg.delta)
    lines, code = [], 0
    for s in specs:
        rep = fn(s, cfg)
        lines.append(rep.dumps())
        code = max(code, 0 if rep.passed else 1)
    _emit(lines, a.output)
    return code


def cmd_analyze(a) -> int:
    return _per_instance(a, run_classify)


def cmd_verify(a) -> int:
    return _per_instance(a, run_verify_suite)


def cmd_probe(a) -> int:
    cfg = _config(a)
    specs = load_instances(a.file, cfg.delta)
    _emit([json.dumps(run_probe(s, cfg)) for s in specs], a.output)
    return 0


def cmd_lattice(a) -> int:
    n = a.n
    N = 16 * n if a.truncation in (None, "auto") else int(a.truncation)
    phi = BlaschkeProduct.monomial(n)
    T = mult_matrix(phi, "dirichlet", N)
    subs = enumerate_zn_lattice(n, N)
    rows, ok = [], True
    for S in subs:
        r = reducing_residual(S, phi, a.tol, T=T)
        ok &= r.passed
        rows.append({"label": S.label, "minimal": S.minimal,
                     "invariance_residual": r.invariance_residual,
                     "adjoint_residual": r.adjoint_invariance_residual,
                     "passed": r.passed})
    _emit([json.dumps({"n": n, "count": len(subs), "expected_count": 2 ** n - 2,
                       "subspaces": rows})], a.output)
    return 0 if ok and len(subs) == 2 ** n - 2 else 1


def cmd_gen(a) -> int:
    specs = gen_instances(a.family, a.count, a.seed, a.order)
    _emit([json.dumps(s.to_json()) for s in specs], a.output)
    return 0


def cmd_batch(a) -> int:
    cfg = _config(a)
    files = sorted(glob.glob(os.path.join(a.dir, "*.json"))
                   + glob.glob(os.path.join(a.dir, "*.jsonl")))
    if not files:
        raise FileNotFoundError(f"no *.json or *.jsonl instance files in {a.dir}")
    specs = [s for f in files for s in load_instances(f, cfg.delta)]
    out = a.output or os.path.join(a.dir, "reports")
    summary, code = run_batch(specs, out, cfg, a.jobs)
    sys.stdout.write(json.dumps(summary) + "\n")
    return code


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--truncation", default="auto",
                        help="coefficient truncation N, or 'auto'")
    common.add_argument("--tol", type=float, default=TOL_RED,
                        help="reducing-residual tolerance")
    common.add_argument("--probe-size", type=int, default=24,
                        help="commutant probe size (cap 32)")
    common.add_argument("--quadrature", default="auto",
                        help="circle quadrature nodes, or 'auto'")
    common.add_argument("--output", default=None, help="output path")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--delta", type=float, default=DELTA,
                        help="zeros must satisfy |z| <= 1 - delta")

    p = argparse.ArgumentParser(
        prog="blaschke-reducing",
        description="Reducing subspaces of multiplication by finite Blaschke "
                    "products on the Dirichlet space.")
    sub = p.add_subparsers(dest="cmd", required=True)

    s = sub.add_parser("analyze", parents=[common], help="classify instances")
    s.add_argument("file")
    s.add_argument("--probe", action="store_true",
                   help="corroborate with the commutant probe")
    s.set_defaults(fn=cmd_analyze)

    s = sub.add_parser("verify", parents=[common], help="run the identity suite")
    s.add_argument("file")
    s.add_argument("--probe", action="store_true")
    s.set_defaults(fn=cmd_verify)

    s = sub.add_parser("probe", parents=[common], help="commutant dimension probe")
    s.add_argument("file")
    s.set_defaults(fn=cmd_probe)

    s = sub.add_parser("lattice", parents=[common],
                       help="reducing-subspace lattice of z^n")
    s.add_argument("--n", type=int, required=True)
    s.set_defaults(fn=cmd_lattice)

    s = sub.add_parser("gen", parents=[common], help="generate instances")
    s.add_argument("--family", required=True, choices=FAMILIES)
    s.add_argument("--count", type=int, required=True)
    s.add_argument("--order", type=int, default=None)
    s.set_defaults(fn=cmd_gen)

    s = sub.add_parser("batch", parents=[common],
                       help="verify every instance file in a directory")
    s.add_argument("dir")
    s.add_argument("--jobs", type=int, default=None)
    s.set_defaults(fn=cmd_batch)
    return p


def main(argv=None) -> int:
    p = build_parser()
    a = p.parse_args(argv)
    try:
        return a.fn(a)
    except (BlaschkeError, ArithmeticError, AssertionError, OSError,
            ValueError) as e:
        sys.stderr.write(f"error: {e}\n")
        try:
            return exit_code_for(e)
        except Exception:
            return 2


if __name__ == "__main__":
    sys.exit(main())
