import numpy as np
import pytest

from robustfoil.aero import model_catalog
from robustfoil.geometry import DesignVector, GeometryContext
from robustfoil.uncertainty import UncertainInput


@pytest.fixture(scope="session")
def ctx():
    return GeometryContext()


@pytest.fixture(scope="session")
def catalog():
    return model_catalog()


def central_difference(fun, x, step=1e-6):
    """Central finite-difference gradient of a scalar function of a vector."""
    x = np.asarray(x, dtype=float)
    grad = np.empty_like(x)
    for i in range(x.size):
        e = np.zeros_like(x)
        e[i] = step
        grad[i] = (fun(x + e) - fun(x - e)) / (2 * step)
    return grad


def assert_gradient_close(analytic, numeric, rtol, atol):
    analytic, numeric = np.asarray(analytic), np.asarray(numeric)
    err = np.abs(analytic - numeric)
    bound = np.maximum(rtol * np.abs(numeric), atol)
    worst = int(np.argmax(err / bound))
    assert np.all(err <= bound), (
        f"component {worst}: analytic {analytic[worst]:.12e} vs numeric {numeric[worst]:.12e}"
    )


def random_designs(ctx, count, seed=7, dy=0.03):
    rng = np.random.default_rng(seed)
    designs = []
    while len(designs) < count:
        d = DesignVector(rng.uniform(-dy, dy, ctx.n_free), rng.uniform(-5, 10))
        try:
            ctx.deform(d)
        except ValueError:
            continue
        designs.append(d)
    return designs


def random_inputs(count, seed=11):
    rng = np.random.default_rng(seed)
    return [
        UncertainInput(float(rng.uniform(1e6, 1e7)), int(rng.integers(1, 6)))
        for _ in range(count)
    ]
