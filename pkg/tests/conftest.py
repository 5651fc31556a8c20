"""Shared fixtures and the finite-difference oracle used across the suite."""

from __future__ import annotations

import numpy as np
import pytest

from pklab.catalog import FAMILIES, default_triple, preset_triple

# Central finite differences, used as the derivative oracle independent of
# the jet engine.  Steps are order-adapted: float64 cannot resolve third
# derivatives at step 1e-5 (noise eps/h^3 is O(0.1)), so higher orders use
# wider 4th-order-accurate stencils.
FD_STEPS = {1: 1e-5, 2: 1e-3, 3: 8e-3}


def fd_of(g, x, axis, h):
    """5-point 4th-order central difference of a scalar callable along one axis."""
    e = np.zeros(len(x))
    e[axis] = 1.0
    x = np.asarray(x, dtype=float)
    return (
        -g(x + 2 * h * e) + 8 * g(x + h * e) - 8 * g(x - h * e) + g(x - 2 * h * e)
    ) / (12 * h)


def fd_partial(f, x, index):
    """Partial derivative by central differences; f takes d ring arguments.

    First derivatives come straight from function values at the step the
    project standardizes on.  Higher orders are differenced from jet
    partials one order below (a ladder: each rung is itself validated
    against direct differences), because float64 cannot resolve third
    derivatives from raw values at useful steps.
    """
    from pklab.jets import seed_point

    index = tuple(index)
    total = sum(index)
    if total == 0:
        return f(*np.asarray(x, dtype=float))
    axis = next(i for i, k in enumerate(index) if k > 0)
    rest = list(index)
    rest[axis] -= 1
    if total == 1:
        return fd_of(lambda y: f(*y), x, axis, FD_STEPS[1])

    def lower(y):
        return f(*seed_point(y, total - 1)).partial(rest)

    return fd_of(lower, x, axis, 1e-4)


def fd_tensor_partials(field, point, h=1e-6):
    """d_k of every component of a tensor field by 4th-order differences."""
    point = np.asarray(point, dtype=float)
    base = field.values(point)
    out = np.empty(base.shape + (4,))
    for k in range(4):
        e = np.zeros(4)
        e[k] = 1.0
        out[..., k] = (
            -field.values(point + 2 * h * e)
            + 8 * field.values(point + h * e)
            - 8 * field.values(point - h * e)
            + field.values(point - 2 * h * e)
        ) / (12 * h)
    return out


@pytest.fixture(scope="session")
def triples():
    """All eight catalog families with default parameters, built once."""
    return {name: default_triple(name) for name in FAMILIES}


@pytest.fixture(scope="session")
def einstein_preset():
    return preset_triple("einstein-lambda1")


@pytest.fixture(scope="session")
def companion_einstein_preset():
    return preset_triple("companion-einstein")


@pytest.fixture(scope="session")
def dimd2_1_einstein_preset():
    return preset_triple("dim-d2-1-einstein")


@pytest.fixture(scope="session")
def dimd1_flat_preset():
    return preset_triple("dim-d1-flat")
