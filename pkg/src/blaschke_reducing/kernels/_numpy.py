"""Pure-numpy implementations of the hot kernels.

Semantics are identical to :mod:`._numba`; the test-suite runs both.
"""
import numpy as np


def div_linear(f, cbar):
    # g_k = f_k + cbar*g_{k-1}  <=>  g = f * (1, cbar, cbar^2, ...)
    n = f.shape[0]
    geo = cbar ** np.arange(n)
    if cbar == 0:
        geo[1:] = 0.0
    return np.convolve(f, geo)[:n]


def cauchy_trunc(f, g, n):
    out = np.zeros(n, dtype=np.complex128)
    full = np.convolve(f, g)
    m = min(n, full.shape[0])
    out[:m] = full[:m]
    return out


def adjoint_corr(w, f, phi):
    # out_k = sum_{m >= k} w_m f_m conj(phi_{m-k}) / w_k
    n = f.shape[0]
    wf = w * f
    p = np.zeros(n, dtype=np.complex128)
    m = min(n, phi.shape[0])
    p[:m] = phi[:m]
    # np.correlate(a, v)[k] = sum_m a[m+k] conj(v[m]) in 'full' mode offset
    full = np.correlate(wf, p, mode="full")
    return full[n - 1:] / w


def lower_toeplitz(phi, nu):
    n = nu.shape[0]
    j, k = np.indices((n, n))
    d = j - k
    p = np.zeros(n, dtype=np.complex128)
    m = min(n, phi.shape[0])
    p[:m] = phi[:m]
    t = np.where(d >= 0, p[np.clip(d, 0, n - 1)], 0.0)
    return t * (nu[:, None] / nu[None, :])


def blaschke_eval(zeros, z):
    out = np.ones(z.shape, dtype=np.complex128)
    for lam in zeros:
        out *= (lam - z) / (1.0 - np.conj(lam) * z)
    return out


def horner(c, z):
    out = np.zeros(z.shape, dtype=np.complex128)
    for ck in c[::-1]:
        out = out * z + ck
    return out
