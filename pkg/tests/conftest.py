import numpy as np
import pytest
from hypothesis import HealthCheck, settings, strategies as st

from blaschke_reducing import BlaschkeProduct, kernels

settings.register_profile(
    "default", max_examples=25, deadline=None,
    suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

BACKENDS = [kernels.numpy_backend]
if kernels.numba_backend is not None:
    BACKENDS.append(kernels.numba_backend)


@pytest.fixture(params=BACKENDS, ids=lambda m: m.__name__.rsplit(".", 1)[-1])
def impl(request):
    return request.param


def disc_points(rmax=0.8, rmin=0.0):
    r = st.floats(rmin, rmax)
    t = st.floats(0.0, 2 * np.pi)
    return st.builds(lambda a, b: complex(a * np.cos(b), a * np.sin(b)), r, t)


def blaschke_products(min_order=1, max_order=4, rmax=0.8, zero_at_origin=False):
    @st.composite
    def build(draw):
        n = draw(st.integers(min_order, max_order))
        zs = draw(st.lists(disc_points(rmax), min_size=n, max_size=n))
        if zero_at_origin:
            zs[0] = 0j
        phase = draw(st.floats(0.0, 2 * np.pi - 1e-9))
        return BlaschkeProduct(phase, tuple(zs))
    return build()


def random_blaschke(rng, n, rmax=0.8, zero_at_origin=False):
    r = rmax * np.sqrt(rng.uniform(size=n))
    zs = r * np.exp(2j * np.pi * rng.uniform(size=n))
    if zero_at_origin:
        zs[0] = 0
    return BlaschkeProduct(float(rng.uniform(0, 2 * np.pi)), tuple(zs))


def pytest_terminal_summary(terminalreporter):
    mod = __import__("sys").modules.get("test_acceptance")
    lines = getattr(mod, "RESULTS", None)
    if not lines:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(lines):
        terminalreporter.write_line(lines[n])
