"""Time the numba kernels against the pure-numpy fallback.

    python3 benchmarks/bench_kernels.py [--sizes 256 1024 4096] [--repeat 5]

Each kernel is called once per backend before timing so numba's compile
(or cache load) is excluded. The last section times whole operations in
a fresh interpreter per backend, selected through the environment flag.
"""
import argparse
import os
import subprocess
import sys
import timeit

import numpy as np

from blaschke_reducing import kernels


def _cases(n, rng):
    f = rng.normal(size=n) + 1j * rng.normal(size=n)
    g = rng.normal(size=n) + 1j * rng.normal(size=n)
    w = np.arange(1, n + 1, dtype=float)
    nu = np.sqrt(w)
    zeros = 0.8 * np.exp(2j * np.pi * rng.uniform(size=8))
    z = np.exp(2j * np.pi * np.arange(4 * n) / (4 * n))
    m = min(n, 1024)  # the Toeplitz matrix is quadratic in memory
    return {
        "div_linear": lambda b: kernels.div_linear(f, 0.3 - 0.5j, impl=b),
        "cauchy_trunc": lambda b: kernels.cauchy_trunc(f, g, n, impl=b),
        "adjoint_corr": lambda b: kernels.adjoint_corr(w, f, g, impl=b),
        f"lower_toeplitz[{m}]": lambda b: kernels.lower_toeplitz(f[:m], nu[:m], impl=b),
        "blaschke_eval": lambda b: kernels.blaschke_eval(zeros, z, impl=b),
        "horner": lambda b: kernels.horner(f, z, impl=b),
    }


def bench_kernels(sizes, repeat):
    backends = [("numpy", kernels.numpy_backend)]
    if kernels.numba_backend is not None:
        backends.append(("numba", kernels.numba_backend))
    rng = np.random.default_rng(0)
    print(f"{'kernel':<22}{'n':>7}" + "".join(f"{name:>12}" for name, _ in backends)
          + ("    speedup" if len(backends) == 2 else ""))
    for n in sizes:
        for name, fn in _cases(n, rng).items():
            ref = fn(backends[0][1])
            ts = []
            for _, b in backends:
                out = fn(b)
                assert np.allclose(out, ref, atol=1e-9 * (1 + np.abs(ref).max()))
                ts.append(min(timeit.repeat(lambda: fn(b), number=3, repeat=repeat)) / 3)
            row = f"{name:<22}{n:>7}" + "".join(f"{1e3 * t:>10.3f}ms" for t in ts)
            if len(ts) == 2:
                row += f"{ts[0] / ts[1]:>10.1f}x"
            print(row)


_END_TO_END = r"""
import time
from blaschke_reducing import BlaschkeProduct, classify, kernels, taylor
from blaschke_reducing.harness import gen_instances
phi = BlaschkeProduct(0.3, (0.9, -0.85j, 0.2 + 0.7j))
taylor(phi, 64); classify(BlaschkeProduct.monomial(2))   # warm up
t = time.perf_counter(); taylor(phi.power(6), 8000); a = time.perf_counter() - t
specs = gen_instances("psi_squared", 10, 1) + gen_instances("even_composite", 5, 1)
t = time.perf_counter()
for s in specs:
    classify(s.blaschke())
b = time.perf_counter() - t
print(f"{kernels.backend.__name__.rsplit('.', 1)[-1].lstrip('_'):<8}"
      f"taylor(order 18, N=8000) {1e3 * a:8.1f}ms   classify x15 {b:6.2f}s")
"""


def bench_end_to_end():
    for flag in ("1", ""):
        env = {**os.environ, "BLASCHKE_REDUCING_PURE_NUMPY": flag}
        subprocess.run([sys.executable, "-c", _END_TO_END], env=env, check=True)


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--sizes", type=int, nargs="+", default=[256, 1024, 4096])
    p.add_argument("--repeat", type=int, default=5)
    p.add_argument("--skip-end-to-end", action="store_true")
    a = p.parse_args(argv)
    bench_kernels(a.sizes, a.repeat)
    if not a.skip_end_to_end:
        print()
        sys.stdout.flush()
        bench_end_to_end()


if __name__ == "__main__":
    main()
