"""Charts, scalar/tensor fields and first-layer tensor calculus.

A field is an evaluation rule: a callable receiving the four coordinate
ring elements (jets, dual batches or plain arrays) and returning its
components built from them with ordinary arithmetic.  Everything
downstream (curvature, projective machinery, verification suites) talks
to fields through the helpers here.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from . import linalg
from .jets import DualBatch, Jet, dual_point, seed_point

DIM = 4
DEFAULT_ORDER = 3

_HALTON_PRIMES = (2, 3, 5, 7, 11, 13)


class DegenerateMetricError(ValueError):
    """Metric determinant vanished (or nearly so) at an evaluation point."""


class MalformedFormError(ValueError):
    """A 2-form input failed its antisymmetry validation."""


def _halton(n: int, base: int, start: int = 1) -> np.ndarray:
    out = np.empty(n)
    for k in range(n):
        i, f, x = k + start, 1.0, 0.0
        while i > 0:
            f /= base
            x += f * (i % base)
            i //= base
        out[k] = x
    return out


@dataclass(frozen=True)
class Chart:
    """A single coordinate box declared safe for a family of fields.

    The box must exclude eigenvalue collisions, zeros of profile
    functions and metric degeneracies; constructors enforce that with a
    sampling certificate before handing the chart out.
    """

    box: tuple[tuple[float, float], ...]
    label: str = ""

    def __post_init__(self):
        for lo, hi in self.box:
            if not (np.isfinite(lo) and np.isfinite(hi) and lo < hi):
                raise ValueError(f"empty or infinite box interval ({lo}, {hi})")

    @property
    def dim(self) -> int:
        return len(self.box)

    def contains(self, point: Sequence[float]) -> bool:
        return all(lo <= x <= hi for x, (lo, hi) in zip(point, self.box))

    def center(self) -> np.ndarray:
        return np.array([(lo + hi) / 2.0 for lo, hi in self.box])

    def sample_points(self, n: int, seed: int = 0, margin: float = 0.02) -> np.ndarray:
        """Deterministic low-discrepancy points in the (slightly shrunk) box.

        Halton sequence with a seeded Cranley-Patterson rotation; identical
        (n, seed) always yields identical points.
        """
        d = self.dim
        shift = np.random.default_rng(seed).uniform(size=d)
        u = np.empty((n, d))
        for i in range(d):
            u[:, i] = (_halton(n, _HALTON_PRIMES[i]) + shift[i]) % 1.0
        lo = np.array([b[0] for b in self.box])
        hi = np.array([b[1] for b in self.box])
        width = hi - lo
        return lo + width * (margin + (1.0 - 2.0 * margin) * u)


ComponentsFn = Callable[..., np.ndarray]


def objarray(nested) -> np.ndarray:
    """Object ndarray from nested lists without numpy auto-coercion."""
    if isinstance(nested, np.ndarray):
        return nested if nested.dtype == object else nested.astype(object)
    probe = nested
    shape = []
    while isinstance(probe, (list, tuple)):
        shape.append(len(probe))
        probe = probe[0]
    out = np.empty(tuple(shape), dtype=object)
    for idx in np.ndindex(out.shape):
        x = nested
        for k in idx:
            x = x[k]
        out[idx] = x
    return out


def ring_value(x) -> float:
    if isinstance(x, Jet):
        return x.value
    if isinstance(x, DualBatch):
        raise TypeError("batch element has no single value")
    return float(x)


def ring_gradient(x, dim: int = DIM) -> np.ndarray:
    if isinstance(x, Jet):
        return x.gradient()
    return np.zeros(dim)


@dataclass(frozen=True)
class ScalarField:
    """Map from coordinate ring elements to one ring element."""

    fn: Callable
    name: str = ""

    def __call__(self, *coords):
        return self.fn(*coords)

    def jet(self, point: Sequence[float], order: int = DEFAULT_ORDER) -> Jet:
        out = self.fn(*seed_point(point, order))
        if not isinstance(out, Jet):
            out = Jet.constant(float(out), len(point), order)
        return out

    def value(self, point: Sequence[float]) -> float:
        return self.jet(point, order=1).value

    def gradient_covector(self, point: Sequence[float]) -> np.ndarray:
        """Coordinate partials (df)_i, no metric involved."""
        return self.jet(point, order=2).gradient()


@dataclass(frozen=True)
class TensorField:
    """Components of fixed valence produced by one evaluation rule.

    ``valence`` is (contravariant, covariant); the component array has
    shape (4,)**(r+s) with contravariant indices first.  ``batch_fn``,
    when set, is an equivalent vectorized evaluator (points -> values
    and first partials) used by the fast paths; correctness tests pin it
    against the generic rule.
    """

    valence: tuple[int, int]
    fn: ComponentsFn
    name: str = ""
    batch_fn: Callable | None = None

    @property
    def rank(self) -> int:
        return self.valence[0] + self.valence[1]

    def components(self, coords) -> np.ndarray:
        arr = self.fn(*coords)
        if isinstance(arr, np.ndarray) and arr.dtype == object:
            return arr
        return objarray(arr) if not isinstance(arr, np.ndarray) else arr.astype(object)

    def jets(self, point: Sequence[float], order: int = DEFAULT_ORDER) -> np.ndarray:
        return self.components(seed_point(point, order))

    def values(self, point: Sequence[float]) -> np.ndarray:
        arr = self.jets(point, order=1)
        out = np.empty(arr.shape)
        for idx in np.ndindex(arr.shape):
            out[idx] = ring_value(arr[idx])
        return out

    def batch_values(self, points: np.ndarray) -> np.ndarray:
        """Component values at an (n, 4) array of points, shape (n, ...)."""
        vals, _ = self.batch_duals(points, with_hessian=True)
        return vals

    def batch_duals(
        self, points: np.ndarray, with_hessian: bool = True
    ) -> tuple[np.ndarray, np.ndarray | None]:
        """Values and first partials over a batch, shapes (n, ...) / (n, ..., 4)."""
        pts = np.asarray(points, dtype=float)
        if self.batch_fn is not None:
            return self.batch_fn(pts)
        coords = dual_point(pts, with_hessian=with_hessian)
        arr = self.components(coords)
        n = pts.shape[0]
        vals = np.empty((n,) + arr.shape)
        grads = np.zeros((n,) + arr.shape + (DIM,)) if with_hessian else None
        for idx in np.ndindex(arr.shape):
            x = arr[idx]
            if isinstance(x, DualBatch):
                vals[(slice(None),) + idx] = x.val
                if with_hessian:
                    grads[(slice(None),) + idx + (slice(None),)] = x.grad
            else:
                vals[(slice(None),) + idx] = float(x)
        return vals, grads


def VectorField(fn: ComponentsFn, name: str = "") -> TensorField:
    return TensorField((1, 0), fn, name)


def tensor_values_and_partials(
    field: TensorField, point: Sequence[float], order: int = 2
) -> tuple[np.ndarray, np.ndarray]:
    """(values, partials) with partials[..., k] = d_k of each component."""
    arr = field.jets(point, order=order)
    vals = np.empty(arr.shape)
    parts = np.empty(arr.shape + (DIM,))
    for idx in np.ndindex(arr.shape):
        vals[idx] = ring_value(arr[idx])
        parts[idx] = ring_gradient(arr[idx])
    return vals, parts


# -- metric algebra ----------------------------------------------------


def metric_inverse(g: TensorField, point: Sequence[float], tol: float = 1e-12) -> np.ndarray:
    """Pointwise inverse metric g^{ij} with a determinant guard."""
    gm = g.values(point)
    det = float(np.linalg.det(gm))
    if abs(det) < tol * max(1.0, float(np.max(np.abs(gm))) ** DIM):
        raise DegenerateMetricError(f"metric determinant {det:.3e} at {list(point)}")
    return np.linalg.inv(gm)


def metric_inverse_jets(gjets: np.ndarray) -> np.ndarray:
    try:
        return linalg.minv(gjets)
    except ZeroDivisionError as e:
        raise DegenerateMetricError(str(e)) from e


def lower_index(g_vals: np.ndarray, v: np.ndarray) -> np.ndarray:
    return g_vals @ v


def raise_index(ginv_vals: np.ndarray, covec: np.ndarray) -> np.ndarray:
    return ginv_vals @ covec


def gradient(g: TensorField, f: ScalarField, point: Sequence[float]) -> np.ndarray:
    """(grad f)^i = g^{ij} d_j f at a point."""
    ginv = metric_inverse(g, point)
    return ginv @ f.gradient_covector(point)


def gradient_field(g: TensorField, f: ScalarField, name: str = "") -> TensorField:
    """grad f as a vector field, evaluable on jets (one order is consumed)."""

    def comps(*coords):
        gj = g.components(coords)
        ginv = metric_inverse_jets(gj)
        fj = f(*coords)
        if isinstance(fj, (Jet, DualBatch)):
            df = [fj.derivative(i) for i in range(DIM)]
        else:
            df = [0.0] * DIM
        out = np.empty(DIM, dtype=object)
        for i in range(DIM):
            acc = ginv[i, 0] * df[0]
            for j in range(1, DIM):
                acc = acc + ginv[i, j] * df[j]
            out[i] = acc
        return out

    return TensorField((1, 0), comps, name=name or f"grad({f.name})")


def apply_endo_field(t: TensorField, v: TensorField, name: str = "") -> TensorField:
    """Pointwise T(v) for an endomorphism field T and vector field v."""

    def comps(*coords):
        tj = t.components(coords)
        vj = v.components(coords)
        out = np.empty(DIM, dtype=object)
        for i in range(DIM):
            acc = tj[i, 0] * vj[0]
            for j in range(1, DIM):
                acc = acc + tj[i, j] * vj[j]
            out[i] = acc
        return out

    return TensorField((1, 0), comps, name=name)


# -- derivative operations --------------------------------------------


def lie_derivative_metric(
    g: TensorField, x: TensorField, point: Sequence[float]
) -> np.ndarray:
    """(L_X g)_{ij} = X^k d_k g_{ij} + g_{kj} d_i X^k + g_{ik} d_j X^k."""
    gv, gp = tensor_values_and_partials(g, point)
    xv, xp = tensor_values_and_partials(x, point)
    out = np.einsum("k,ijk->ij", xv, gp)
    out += np.einsum("kj,ki->ij", gv, xp)
    out += np.einsum("ik,kj->ij", gv, xp)
    return out


def lie_derivative_endo(
    t: TensorField, x: TensorField, point: Sequence[float]
) -> np.ndarray:
    """(L_X T)^i_j = X^k d_k T^i_j - T^k_j d_k X^i + T^i_k d_j X^k."""
    tv, tp = tensor_values_and_partials(t, point)
    xv, xp = tensor_values_and_partials(x, point)
    out = np.einsum("k,ijk->ij", xv, tp)
    out -= np.einsum("kj,ik->ij", tv, xp)
    out += np.einsum("ik,kj->ij", tv, xp)
    return out


def lie_bracket(x: TensorField, y: TensorField, point: Sequence[float]) -> np.ndarray:
    """[X, Y]^i = X^k d_k Y^i - Y^k d_k X^i."""
    xv, xp = tensor_values_and_partials(x, point)
    yv, yp = tensor_values_and_partials(y, point)
    return np.einsum("k,ik->i", xv, yp) - np.einsum("k,ik->i", yv, xp)


def exterior_derivative_2form(
    omega: TensorField, point: Sequence[float], asym_tol: float = 1e-12
) -> np.ndarray:
    """(d omega)_{ijk} as the cyclic sum of coordinate partials.

    Rejects inputs whose antisymmetry fails beyond ``asym_tol`` (scaled);
    validation rather than silent antisymmetrization.
    """
    wv, wp = tensor_values_and_partials(omega, point)
    scale = max(1.0, float(np.max(np.abs(wv))))
    if np.max(np.abs(wv + wv.T)) > asym_tol * scale:
        raise MalformedFormError("2-form input is not antisymmetric at the point")
    # (d omega)_{ijk} = d_i w_{jk} + d_j w_{ki} + d_k w_{ij}
    dw = (
        np.einsum("jki->ijk", wp)
        + np.einsum("kij->ijk", wp)
        + np.einsum("ijk->ijk", wp)
    )
    return dw


def nijenhuis(t: TensorField, point: Sequence[float]) -> np.ndarray:
    """N^i_{jk} of an endomorphism field from jet partials.

    N(X,Y) = [TX,TY] - T[TX,Y] - T[X,TY] + T^2 [X,Y] on coordinate fields.
    """
    tv, tp = tensor_values_and_partials(t, point)
    n = np.einsum("mj,ikm->ijk", tv, tp)
    n -= np.einsum("mk,ijm->ijk", tv, tp)
    n += np.einsum("im,mjk->ijk", tv, tp)
    n -= np.einsum("im,mkj->ijk", tv, tp)
    return n
