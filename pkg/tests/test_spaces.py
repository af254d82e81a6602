import numpy as np
import pytest
from hypothesis import given, strategies as st

from blaschke_reducing import (
    BERGMAN, DIRICHLET, HARDY, BlaschkeProduct, CoeffVector, DomainError,
    SpaceKind, UsageError, evaluate, inner, taylor,
)
from blaschke_reducing.blaschke import derivative
from blaschke_reducing.spaces import (
    U_inverse, U_map, bergman_moebius_unitary, blaschke_vector,
    circle_pair_integral, dirichlet_energy, kernel_vector, monomial_vector,
    poisson_eval, poisson_sum,
)

from conftest import blaschke_products, disc_points

ALL = [HARDY, BERGMAN, DIRICHLET]
CIRCLE = np.exp(2j * np.pi * np.arange(256) / 256)


def z_phi(g):
    return BlaschkeProduct(np.pi, (0j, g))


def poly(c, space=DIRICHLET):
    return CoeffVector.from_coeffs(c, space)


def rand_poly(rng, deg, space=DIRICHLET):
    return poly(rng.normal(size=deg + 1) + 1j * rng.normal(size=deg + 1), space)


@pytest.mark.parametrize("space", ALL)
def test_monomial_norms_are_weights(space):
    for k in range(6):
        z = monomial_vector(k, space, 8)
        assert inner(z, z).real == pytest.approx(space.weights(k + 1)[k])


def test_inner_examples():
    z = monomial_vector(1, DIRICHLET, 3)
    assert inner(z, z) == pytest.approx(2)
    zb = monomial_vector(1, BERGMAN, 3)
    assert inner(zb, zb) == pytest.approx(0.5)
    f = poly([1, 1])
    assert inner(f, kernel_vector(0.5, DIRICHLET, 60)) == pytest.approx(1.5)
    with pytest.raises(UsageError):
        inner(f, poly([1], HARDY))


def test_space_parse():
    assert SpaceKind.parse("dirichlet") is DIRICHLET
    assert SpaceKind.parse(BERGMAN) is BERGMAN


def test_dirichlet_energy_examples():
    assert dirichlet_energy(poly([0, 1])) == pytest.approx(1)
    assert dirichlet_energy(poly([3.0])) == 0
    with pytest.raises(UsageError):
        dirichlet_energy(poly([0, 1], HARDY))


def test_dirichlet_energy_area_quadrature():
    f = blaschke_vector(BlaschkeProduct(0, (0.5,)), DIRICHLET, 80)
    x, w = np.polynomial.legendre.leggauss(64)
    r, wr = (x + 1) / 2, w / 2
    th = 2 * np.pi * np.arange(64) / 64
    Z = r[:, None] * np.exp(1j * th)[None, :]
    dphi = derivative(BlaschkeProduct(0, (0.5,)), Z)
    # normalized area measure r dr dtheta / pi
    area = np.sum(wr[:, None] * r[:, None] * np.abs(dphi) ** 2) * (2 * np.pi / 64) / np.pi
    assert abs(dirichlet_energy(f) - area) <= 1e-6


def test_kernel_vector_examples():
    assert np.allclose(kernel_vector(0, DIRICHLET, 4).coeffs, [1, 0, 0, 0, 0])
    assert np.allclose(kernel_vector(0.5, BERGMAN, 3).coeffs,
                       [1, 2 * 0.5, 3 * 0.25, 4 * 0.125])
    f = blaschke_vector(z_phi(0.3), DIRICHLET, 80)
    lam = 0.2 + 0.1j
    got = inner(f, kernel_vector(lam, DIRICHLET, 80))
    assert abs(got - evaluate(z_phi(0.3), lam)) <= 1e-10
    with pytest.raises(DomainError):
        kernel_vector(1.0, DIRICHLET, 4)


def test_dirichlet_kernel_closed_form():
    lam, z = 0.6 - 0.2j, 0.3 + 0.4j
    K = kernel_vector(lam, DIRICHLET, 200)
    w = np.conj(lam) * z
    assert abs(K(z) - np.log(1 / (1 - w)) / w) < 1e-12


def test_poisson_examples():
    assert np.allclose(poisson_eval(0, CIRCLE), 1)
    assert abs(np.mean(poisson_eval(0.4, CIRCLE)) - 1) <= 1e-10
    phi = z_phi(0.5)
    lhs = CIRCLE * derivative(phi, CIRCLE) * np.conj(evaluate(phi, CIRCLE))
    assert np.max(np.abs(lhs - poisson_sum(phi.zeros, CIRCLE))) <= 1e-10
    with pytest.raises(DomainError):
        poisson_eval(0.2, 0.5)


def test_circle_pair_integral_examples():
    one = poly([1.0])
    assert circle_pair_integral(one, one) == pytest.approx(1)
    assert abs(circle_pair_integral(monomial_vector(3, HARDY, 5),
                                    monomial_vector(1, HARDY, 5))) <= 1e-14
    phi = z_phi(0.5)
    val = circle_pair_integral(lambda z: poisson_sum(phi.zeros, z),
                               lambda z: evaluate(phi, z))
    assert abs(val) <= 1e-10


def test_U_examples():
    for k in range(5):
        u = U_map(monomial_vector(k, DIRICHLET, 6))
        assert u.space is BERGMAN and u.coeffs[k] == k + 1
    a = 0.4 + 0.3j
    uk = U_map(kernel_vector(a, DIRICHLET, 100))
    assert np.allclose(uk.coeffs, np.conj(a) ** np.arange(101))
    with pytest.raises(UsageError):
        U_map(poly([1.0], BERGMAN))


def test_bergman_moebius_unitary_examples():
    rng = np.random.default_rng(5)
    f = rand_poly(rng, 6, BERGMAN).extend(200)
    flip = bergman_moebius_unitary(0, f)
    assert np.allclose(flip.coeffs[:7], f.coeffs[:7] * (-1.0) ** np.arange(7))
    a = 0.3 - 0.2j
    g = bergman_moebius_unitary(a, f)
    assert abs(g.norm() - f.norm()) / f.norm() <= 1e-9
    back = bergman_moebius_unitary(a, g)
    assert np.max(np.abs(back.coeffs - f.coeffs)) <= 1e-9


# -- properties ---------------------------------------------------------------

@given(st.integers(0, 2 ** 31), st.integers(0, 12), st.integers(0, 12))
def test_weighted_boundary_identity(seed, dp, dq):
    rng = np.random.default_rng(seed)
    p, q = rand_poly(rng, dp), rand_poly(rng, dq)
    a, b = inner(p, q), inner(U_map(p), U_map(q))
    assert abs(a - b) <= 1e-12 * max(abs(a), p.norm() * q.norm())


@given(blaschke_products(1, 4, 0.8), st.integers(1, 5), st.integers(0, 2 ** 31))
def test_distortion_formula(phi, k, seed):
    rng = np.random.default_rng(seed)
    N = 400
    f, g = rand_poly(rng, 4).extend(N), rand_poly(rng, 4).extend(N)
    kk = np.arange(N + 1)

    def D(a, b):
        return np.sum(kk * a.coeffs[: N + 1] * np.conj(b.coeffs[: N + 1]))

    pk = taylor(phi.power(k), N)
    lhs = D(f.times(pk).extend(N), g.times(pk).extend(N)) - D(f, g)
    rhs = k * circle_pair_integral(
        lambda z: poisson_sum(phi.zeros, z) * f(z), g, M=2048)
    assert abs(lhs - rhs) <= 1e-8 * max(1.0, abs(lhs))


@pytest.mark.parametrize("space", ALL)
def test_kernel_reproducing_random_points(space):
    rng = np.random.default_rng(11)
    f = blaschke_vector(BlaschkeProduct(0.7, (0.3, -0.5j, 0.1)), space, 150)
    for _ in range(20):
        lam = 0.8 * np.sqrt(rng.uniform()) * np.exp(2j * np.pi * rng.uniform())
        got, err = inner(f, kernel_vector(lam, space, 150), with_bound=True)
        assert abs(got - f(lam)) <= 1e-10 + err


@given(st.integers(0, 2 ** 31), st.integers(0, 20))
def test_U_isometric_and_onto(seed, deg):
    rng = np.random.default_rng(seed)
    f = rand_poly(rng, deg)
    assert abs(U_map(f).norm() - f.norm()) <= 1e-12 * f.norm()
    h = rand_poly(rng, deg, BERGMAN)
    assert np.allclose(U_map(U_inverse(h)).coeffs, h.coeffs, atol=1e-14)


@given(disc_points(0.7), st.integers(0, 2 ** 31))
def test_moebius_unitary_involutive(a, seed):
    rng = np.random.default_rng(seed)
    f = rand_poly(rng, 5, BERGMAN).extend(300)
    g = bergman_moebius_unitary(a, bergman_moebius_unitary(a, f))
    assert np.max(np.abs(g.coeffs - f.coeffs)) <= 1e-9
