"""Hot numeric kernels with a numba path and a pure-numpy fallback.

The numba path is used when numba imports cleanly, unless the environment
variable ``BLASCHKE_REDUCING_PURE_NUMPY`` is set to a truthy value before
the first import. Both backends stay importable as :data:`numpy_backend`
and :data:`numba_backend` (``None`` when numba is missing) so tests and
benchmarks can compare them.

All kernels take contiguous ``complex128``/``float64`` arrays; the thin
wrappers below do the coercion so callers can pass lists.
"""
import os

import numpy as np

from . import _numpy as numpy_backend

try:
    from . import _numba as numba_backend
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba_backend = None

_FLAG = os.environ.get("BLASCHKE_REDUCING_PURE_NUMPY", "").strip().lower()
PURE_NUMPY = _FLAG not in ("", "0", "false", "no") or numba_backend is None

backend = numpy_backend if PURE_NUMPY else numba_backend

__all__ = [
    "PURE_NUMPY", "backend", "numpy_backend", "numba_backend",
    "div_linear", "cauchy_trunc", "adjoint_corr", "lower_toeplitz",
    "blaschke_eval", "horner",
]


def _c(a):
    return np.ascontiguousarray(a, dtype=np.complex128)


def _r(a):
    return np.ascontiguousarray(a, dtype=np.float64)


def div_linear(f, cbar, impl=None):
    """Coefficients of ``f / (1 - cbar*z)`` truncated to ``len(f)``."""
    return (impl or backend).div_linear(_c(f), complex(cbar))


def cauchy_trunc(f, g, n, impl=None):
    """First ``n`` coefficients of the Cauchy product of ``f`` and ``g``."""
    return (impl or backend).cauchy_trunc(_c(f), _c(g), int(n))


def adjoint_corr(w, f, phi, impl=None):
    """``out[k] = sum_{m>=k} w[m] f[m] conj(phi[m-k]) / w[k]``."""
    return (impl or backend).adjoint_corr(_r(w), _c(f), _c(phi))


def lower_toeplitz(phi, nu, impl=None):
    """Lower-triangular ``T[j, k] = phi[j-k] * nu[j] / nu[k]``."""
    return (impl or backend).lower_toeplitz(_c(phi), _r(nu))


def blaschke_eval(zeros, z, impl=None):
    """``prod_i (l_i - z)/(1 - conj(l_i) z)`` on a flat array of points."""
    shape = np.shape(z)
    z = _c(z)
    out = (impl or backend).blaschke_eval(_c(zeros), z.ravel())
    return out.reshape(shape)


def horner(c, z, impl=None):
    """Evaluate ``sum c[k] z**k`` at a flat array of points."""
    shape = np.shape(z)
    z = _c(z)
    return (impl or backend).horner(_c(c), z.ravel()).reshape(shape)
