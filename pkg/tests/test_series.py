import numpy as np
import pytest
from hypothesis import given, strategies as st

from blaschke_reducing import DomainError, Polynomial, PowerSeries, poly_roots
from blaschke_reducing.series import (
    auto_truncation, series_derivative, series_div_linear, series_mul,
)

from conftest import disc_points

CIRCLE = np.exp(2j * np.pi * (np.arange(64) + 0.25) / 64)


def geometric(r, N):
    return PowerSeries(r ** np.arange(N + 1), r)


def test_mul_identity_cases():
    p = series_mul(PowerSeries.from_polynomial([1, 1], 2),
                   PowerSeries.from_polynomial([1, -1], 2))
    assert np.allclose(p.coeffs, [1, 0, -1])
    f = geometric(0.5, 10)
    assert np.allclose(series_mul(f, PowerSeries.one(10)).coeffs, f.coeffs)


def test_mul_geometric_telescopes():
    f = geometric(0.5, 30)
    p = series_mul(f, PowerSeries.from_polynomial([1, -0.5], 30))
    resid = np.abs(p.coeffs - np.eye(31)[0]).sum()
    assert resid <= p.tail_bound
    assert p.tail_bound < 1e-8


def test_div_linear_examples():
    g = series_div_linear(PowerSeries.one(5), 0.5)
    assert np.allclose(g.coeffs, 0.5 ** np.arange(6))
    g = series_div_linear(PowerSeries.from_polynomial([1, -0.5], 5), 0.5)
    assert np.allclose(g.coeffs, np.eye(6)[0])


def test_div_linear_moebius_oracle():
    g = series_div_linear(PowerSeries.from_polynomial([0.5, -1], 60), 0.5)
    assert np.allclose(g.coeffs[:4], [0.5, -0.75, -0.375, -0.1875])
    exact = (0.5 - CIRCLE) / (1 - 0.5 * CIRCLE)
    assert np.max(np.abs(g(CIRCLE) - exact)) <= g.tail_bound + 1e-14


def test_div_linear_rejects_boundary():
    with pytest.raises(DomainError):
        series_div_linear(PowerSeries.one(3), 1.0)


def test_derivative_examples():
    assert np.allclose(series_derivative(PowerSeries.monomial(3, 5)).coeffs,
                       [0, 0, 3, 0, 0])
    assert np.allclose(series_derivative(PowerSeries([2.0])).coeffs, [0])
    f = geometric(0.5, 80)
    d = series_derivative(f)
    h = 1e-6
    fd = (f(0.2 + h) - f(0.2 - h)) / (2 * h)
    assert abs(d(0.2) - fd) <= 1e-6


def test_poly_roots_examples():
    r = sorted(poly_roots(Polynomial([-0.25, 0, 1])), key=lambda t: t[0].real)
    assert [m for _, m in r] == [1, 1]
    assert np.allclose([z for z, _ in r], [-0.5, 0.5])
    r = poly_roots(Polynomial.from_roots([0.3, 0.3]))
    assert len(r) == 1 and r[0][1] == 2 and abs(r[0][0] - 0.3) < 1e-7
    with pytest.raises(DomainError):
        poly_roots(Polynomial([2.0]))


def test_poly_roots_derivative_of_z_phi():
    # (z (0.4 - z)/(1 - 0.4 z))' has numerator 0.4 - 2z + 0.4 z^2
    roots = poly_roots(Polynomial([0.4, -2.0, 0.4]))
    inside = [z for z, _ in roots if abs(z) < 1]
    assert len(inside) == 1
    assert abs(inside[0] - (1 - np.sqrt(1 - 0.16)) / 0.4) < 1e-12


def test_auto_truncation():
    N = auto_truncation(0.5, 1e-12)
    assert 0.5 ** (N + 1) / 0.5 < 1e-12 <= 0.5 ** N / 0.5


def test_tail_bound_floor():
    f = PowerSeries(0.9 ** np.arange(10), 0.9, 0.0)
    assert f.tail_bound >= f.C * 0.9 ** 10 / 0.1 * (1 - 1e-12)


@given(disc_points(0.95), st.integers(0, 40), st.integers(0, 2 ** 31))
def test_div_then_multiply_is_identity(lam, N, seed):
    rng = np.random.default_rng(seed)
    f = PowerSeries(rng.normal(size=N + 1) + 1j * rng.normal(size=N + 1))
    g = series_div_linear(f, lam)
    back = g.coeffs.copy()
    back[1:] -= np.conj(lam) * g.coeffs[:-1]
    assert np.allclose(back, f.coeffs, rtol=0, atol=1e-12 * (1 + f.l1()))


@given(st.lists(disc_points(2.0), min_size=1, max_size=6))
def test_roots_reconstruct(roots):
    p = Polynomial.from_roots(roots)
    rs = poly_roots(p)
    assert sum(m for _, m in rs) == p.degree
    q = Polynomial.from_roots([z for z, m in rs for _ in range(m)])
    assert np.max(np.abs(q.coeffs - p.coeffs)) <= 1e-6 * p.norm()
    for z, _ in rs:
        assert abs(p(np.array([z]))[0]) <= 1e-6 * p.norm() * max(1, abs(z)) ** p.degree


@given(st.floats(0.05, 0.9), st.integers(0, 2 ** 31))
def test_derivative_matches_central_differences(r, seed):
    rng = np.random.default_rng(seed)
    N = auto_truncation(r, 1e-15)
    c = (r ** np.arange(N + 1)) * np.exp(2j * np.pi * rng.uniform(size=N + 1))
    f = PowerSeries(c, r)
    d = series_derivative(f)
    h = 1e-5
    z = 0.5 * rng.uniform(size=10) * np.exp(2j * np.pi * rng.uniform(size=10))
    fd = (f(z + h) - f(z - h)) / (2 * h)
    assert np.max(np.abs(d(z) - fd)) <= 1e-6 * max(1.0, np.abs(d(z)).max())
