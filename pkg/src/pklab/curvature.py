"""Levi-Civita connection, curvature tensors and Einstein residuals.

Connection coefficients are computed through jet arithmetic so that
their own first partials (needed for the curvature tensor) stay exact to
rounding; nothing here is finite-differenced.  Sign conventions:

    R^k_{l ij} = d_i G^k_{lj} - d_j G^k_{li} + G^k_{ir} G^r_{lj} - G^k_{jr} G^r_{li}
    Ric_{lj}   = R^k_{l kj}

with G the Christoffel symbols of the metric.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np

from .fields import (
    DIM,
    ScalarField,
    TensorField,
    metric_inverse_jets,
    ring_gradient,
    ring_value,
    tensor_values_and_partials,
)
from .jets import DualBatch, Jet, seed_point

__all__ = [
    "christoffel_jets",
    "christoffel",
    "christoffel_batch",
    "metricity_residual",
    "riemann",
    "lower_riemann",
    "ricci",
    "einstein_residual",
    "estimate_einstein_constant",
    "covariant_derivative_endo",
    "covariant_derivative_oneform",
    "covariant_derivative_vector",
    "scalar_hessian",
]


def christoffel_jets(g: TensorField, coords) -> np.ndarray:
    """Christoffel symbols as jets, shape (k, i, j).

    One jet order is consumed by the metric partials, so with coordinate
    jets of order K the result is trustworthy through order K-2 when the
    metric components themselves embed profile derivatives.
    """
    gj = g.components(coords)
    ginv = metric_inverse_jets(gj)
    dg = np.empty((DIM, DIM, DIM), dtype=object)  # dg[i, j, l] = d_l g_ij
    for i in range(DIM):
        for j in range(DIM):
            gij = gj[i, j]
            for l in range(DIM):
                dg[i, j, l] = (
                    gij.derivative(l) if isinstance(gij, (Jet, DualBatch)) else 0.0
                )
    gamma = np.empty((DIM, DIM, DIM), dtype=object)
    for k in range(DIM):
        for i in range(DIM):
            for j in range(i, DIM):
                acc = None
                for l in range(DIM):
                    term = ginv[k, l] * (dg[j, l, i] + dg[i, l, j] - dg[i, j, l])
                    acc = term if acc is None else acc + term
                gamma[k, i, j] = acc * 0.5
                gamma[k, j, i] = gamma[k, i, j]
    return gamma


def christoffel(g: TensorField, point: Sequence[float], order: int = 2) -> np.ndarray:
    """Pointwise Christoffel symbols Gamma^k_{ij} as floats."""
    gamma = christoffel_jets(g, seed_point(point, order))
    out = np.empty((DIM, DIM, DIM))
    for idx in np.ndindex(out.shape):
        out[idx] = ring_value(gamma[idx])
    return out


def christoffel_batch(g: TensorField, points: np.ndarray) -> np.ndarray:
    """Christoffel symbols over an (n, 4) batch, shape (n, k, i, j).

    Works through second-order dual batches, fast enough to sit inside
    the geodesic integrator loop.
    """
    pts = np.asarray(points, dtype=float)
    gv, gp = g.batch_duals(pts, with_hessian=True)
    ginv = np.linalg.inv(gv)
    # gp[n, i, j, l] = d_l g_ij; c[n, i, j, l] = d_i g_jl + d_j g_il - d_l g_ij
    c = np.einsum("njli->nijl", gp) + np.einsum("nilj->nijl", gp) - gp
    return 0.5 * np.einsum("nkl,nijl->nkij", ginv, c)


def metricity_residual(g: TensorField, point: Sequence[float]) -> float:
    """max |nabla_k g_ij| at the point; a correctness oracle for the symbols."""
    gv, gp = tensor_values_and_partials(g, point)
    gamma = christoffel(g, point)
    nabla = np.transpose(gp, (2, 0, 1)).copy()
    nabla -= np.einsum("lki,lj->kij", gamma, gv)
    nabla -= np.einsum("lkj,il->kij", gamma, gv)
    return float(np.max(np.abs(nabla)))


def _christoffel_values_and_partials(
    g: TensorField, point: Sequence[float], order: int
) -> tuple[np.ndarray, np.ndarray]:
    gamma_jets = christoffel_jets(g, seed_point(point, order))
    gv = np.empty((DIM, DIM, DIM))
    gd = np.empty((DIM, DIM, DIM, DIM))  # gd[k, i, j, m] = d_m G^k_{ij}
    for idx in np.ndindex((DIM, DIM, DIM)):
        x = gamma_jets[idx]
        gv[idx] = ring_value(x)
        gd[idx] = ring_gradient(x)
    return gv, gd


def riemann(g: TensorField, point: Sequence[float], order: int = 3) -> np.ndarray:
    """Curvature tensor R^k_{l ij} at a point."""
    gv, gd = _christoffel_values_and_partials(g, point, order)
    r = gd.transpose(0, 1, 3, 2) - gd  # d_i G^k_{lj} - d_j G^k_{li}
    r += np.einsum("kir,rlj->klij", gv, gv)
    r -= np.einsum("kjr,rli->klij", gv, gv)
    return r


def lower_riemann(g: TensorField, point: Sequence[float]) -> np.ndarray:
    """R_{klij} = g_{km} R^m_{lij}."""
    return np.einsum("km,mlij->klij", g.values(point), riemann(g, point))


def ricci(g: TensorField, point: Sequence[float]) -> np.ndarray:
    """Ric_{lj} = R^k_{l kj}."""
    return np.einsum("klkj->lj", riemann(g, point))


def einstein_residual(
    g: TensorField, lam: float, point: Sequence[float]
) -> np.ndarray:
    """Ric(g) - lam * g at the point."""
    return ricci(g, point) - lam * g.values(point)


def estimate_einstein_constant(g: TensorField, point: Sequence[float]) -> float:
    """Diagnostic ratio Ric_ab / g_ab at the largest metric entry.

    Only for reporting; verification always takes the constant as input.
    """
    gv = g.values(point)
    ric = ricci(g, point)
    a, b = np.unravel_index(np.argmax(np.abs(gv)), gv.shape)
    return float(ric[a, b] / gv[a, b])


def covariant_derivative_endo(
    g: TensorField, a: TensorField, point: Sequence[float]
) -> np.ndarray:
    """(nabla_k A)^i_j, shape (k, i, j)."""
    av, ap = tensor_values_and_partials(a, point)
    gamma = christoffel(g, point)
    out = np.transpose(ap, (2, 0, 1)).copy()
    out += np.einsum("ikm,mj->kij", gamma, av)
    out -= np.einsum("mkj,im->kij", gamma, av)
    return out


def covariant_derivative_oneform(
    g: TensorField, psi_values: np.ndarray, psi_partials: np.ndarray, gamma: np.ndarray
) -> np.ndarray:
    """(nabla_k psi)_j = d_k psi_j - G^m_{kj} psi_m, shape (k, j).

    Takes precomputed values/partials so callers can source psi from a
    potential's jet exactly.
    """
    out = psi_partials.T.copy()  # psi_partials[j, k] = d_k psi_j
    out -= np.einsum("mkj,m->kj", gamma, psi_values)
    return out


def covariant_derivative_vector(
    g: TensorField, v: TensorField, point: Sequence[float]
) -> np.ndarray:
    """(nabla_k V)^i = d_k V^i + G^i_{km} V^m, shape (k, i)."""
    vv, vp = tensor_values_and_partials(v, point)
    gamma = christoffel(g, point)
    return vp.T + np.einsum("ikm,m->ki", gamma, vv)


def scalar_hessian(
    f: ScalarField, point: Sequence[float], order: int = 3
) -> tuple[float, np.ndarray, np.ndarray]:
    """(value, gradient covector, coordinate Hessian) of a scalar field."""
    jet = f.jet(point, order=order)
    grad = jet.gradient()
    hess = np.empty((DIM, DIM))
    for i in range(DIM):
        for j in range(DIM):
            alpha = [0] * DIM
            alpha[i] += 1
            alpha[j] += 1
            hess[i, j] = jet.partial(alpha)
    return jet.value, grad, hess
