"""numba-compiled kernels. Same contracts as :mod:`._numpy`."""
import numpy as np
from numba import njit


@njit(cache=True)
def div_linear(f, cbar):
    n = f.shape[0]
    g = np.empty(n, dtype=np.complex128)
    acc = 0j
    for k in range(n):
        acc = f[k] + cbar * acc
        g[k] = acc
    return g


@njit(cache=True)
def cauchy_trunc(f, g, n):
    out = np.zeros(n, dtype=np.complex128)
    nf = f.shape[0]
    ng = g.shape[0]
    for i in range(min(nf, n)):
        fi = f[i]
        if fi == 0:
            continue
        for j in range(min(ng, n - i)):
            out[i + j] += fi * g[j]
    return out


@njit(cache=True)
def adjoint_corr(w, f, phi):
    n = f.shape[0]
    m = min(n, phi.shape[0])
    out = np.empty(n, dtype=np.complex128)
    for k in range(n):
        acc = 0j
        for d in range(min(m, n - k)):
            acc += w[k + d] * f[k + d] * np.conj(phi[d])
        out[k] = acc / w[k]
    return out


@njit(cache=True)
def lower_toeplitz(phi, nu):
    n = nu.shape[0]
    m = min(n, phi.shape[0])
    t = np.zeros((n, n), dtype=np.complex128)
    for k in range(n):
        for d in range(min(m, n - k)):
            t[k + d, k] = phi[d] * nu[k + d] / nu[k]
    return t


@njit(cache=True)
def blaschke_eval(zeros, z):
    out = np.ones(z.shape[0], dtype=np.complex128)
    for i in range(z.shape[0]):
        zi = z[i]
        acc = 1.0 + 0j
        for lam in zeros:
            acc *= (lam - zi) / (1.0 - np.conj(lam) * zi)
        out[i] = acc
    return out


@njit(cache=True)
def horner(c, z):
    # coefficient-outer order keeps the inner loop contiguous over points
    out = np.zeros(z.shape[0], dtype=np.complex128)
    for k in range(c.shape[0] - 1, -1, -1):
        ck = c[k]
        for i in range(z.shape[0]):
            out[i] = out[i] * z[i] + ck
    return out
