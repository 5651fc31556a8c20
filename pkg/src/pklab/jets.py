"""Truncated multivariate Taylor arithmetic (forward-mode jets).

A :class:`Jet` stores the Taylor coefficients of a smooth function at a
point, up to a fixed total degree, and overloads arithmetic so that any
composition of rational operations and the supported elementary functions
propagates all partial derivatives exactly (to rounding).  Jets are the
derivative carrier for every field evaluation in this package: metric
components are evaluated on coordinate jets, and Christoffel symbols,
curvature tensors, gradients and Lie derivatives are read off from the
resulting coefficients.

The module also provides :class:`DualBatch`, a vectorized first-order
variant used where only values and first partials are needed at many
points at once (constructor feasibility scans, geodesic integration).
"""

from __future__ import annotations

import math
from functools import lru_cache
from itertools import product
from typing import Sequence

import numpy as np

__all__ = [
    "Jet",
    "JetDomainError",
    "JetSpace",
    "DualBatch",
    "dual_point",
    "seed_variable",
    "seed_point",
    "constant_jet",
    "jet_apply",
    "extract_partial",
    "jexp",
    "jlog",
    "jsqrt",
    "jsin",
    "jcos",
    "jpow",
    "jreciprocal",
]


class JetDomainError(ValueError):
    """Elementary function evaluated outside its domain at the base point."""


@lru_cache(maxsize=None)
def _space(dim: int, order: int) -> "JetSpace":
    return JetSpace(dim, order)


class JetSpace:
    """Multi-index bookkeeping shared by all jets of a given (dim, order).

    Coefficients are stored densely, indexed by all multi-indices of total
    degree <= order in graded lexicographic order.  The multiplication
    table lists every coefficient pair whose product survives truncation.
    """

    def __init__(self, dim: int, order: int):
        if dim < 1 or order < 0:
            raise ValueError(f"invalid jet space ({dim=}, {order=})")
        self.dim = dim
        self.order = order
        idxs = [
            alpha
            for deg in range(order + 1)
            for alpha in sorted(
                a for a in product(range(deg + 1), repeat=dim) if sum(a) == deg
            )
        ]
        self.multi_indices: tuple[tuple[int, ...], ...] = tuple(idxs)
        self.size = len(idxs)
        self.position = {alpha: k for k, alpha in enumerate(idxs)}
        self.degrees = np.array([sum(a) for a in idxs], dtype=np.intp)
        self.factorials = np.array(
            [math.prod(math.factorial(ai) for ai in a) for a in idxs], dtype=float
        )

        left, right, target = [], [], []
        for i, a in enumerate(idxs):
            for j, b in enumerate(idxs):
                if sum(a) + sum(b) <= order:
                    left.append(i)
                    right.append(j)
                    target.append(self.position[tuple(x + y for x, y in zip(a, b))])
        self._mul_left = np.array(left, dtype=np.intp)
        self._mul_right = np.array(right, dtype=np.intp)
        self._mul_target = np.array(target, dtype=np.intp)

        # shift tables for d/dx_i: coefficient at beta picks up (beta_i+1) * c[beta+e_i]
        self._shift_src = []
        self._shift_dst = []
        self._shift_fac = []
        for i in range(dim):
            src, dst, fac = [], [], []
            for k, a in enumerate(idxs):
                if sum(a) + 1 <= order:
                    up = list(a)
                    up[i] += 1
                    src.append(self.position[tuple(up)])
                    dst.append(k)
                    fac.append(up[i])
            self._shift_src.append(np.array(src, dtype=np.intp))
            self._shift_dst.append(np.array(dst, dtype=np.intp))
            self._shift_fac.append(np.array(fac, dtype=float))

    def __repr__(self) -> str:  # pragma: no cover
        return f"JetSpace(dim={self.dim}, order={self.order}, size={self.size})"


class Jet:
    """One truncated Taylor expansion; immutable after construction.

    ``coeffs[k]`` is the Taylor coefficient of the monomial with multi-index
    ``space.multi_indices[k]``, i.e. the corresponding partial derivative
    divided by the multi-index factorial.
    """

    __slots__ = ("space", "coeffs")

    def __init__(self, space: JetSpace, coeffs: np.ndarray):
        self.space = space
        self.coeffs = coeffs

    # -- constructors ------------------------------------------------

    @staticmethod
    def constant(value: float, dim: int, order: int) -> "Jet":
        sp = _space(dim, order)
        c = np.zeros(sp.size)
        c[0] = float(value)
        return Jet(sp, c)

    @staticmethod
    def variable(i: int, value: float, dim: int, order: int) -> "Jet":
        sp = _space(dim, order)
        if not 0 <= i < dim:
            raise IndexError(f"variable index {i} out of range for dim {dim}")
        c = np.zeros(sp.size)
        c[0] = float(value)
        if order >= 1:
            e = tuple(1 if k == i else 0 for k in range(dim))
            c[sp.position[e]] = 1.0
        return Jet(sp, c)

    # -- basic queries -----------------------------------------------

    @property
    def value(self) -> float:
        return float(self.coeffs[0])

    def partial(self, multi_index: Sequence[int]) -> float:
        """Partial derivative for the given multi-index (with factorials)."""
        alpha = tuple(int(a) for a in multi_index)
        if len(alpha) != self.space.dim or any(a < 0 for a in alpha):
            raise ValueError(f"bad multi-index {alpha} for dim {self.space.dim}")
        if sum(alpha) > self.space.order:
            raise ValueError(
                f"multi-index {alpha} exceeds truncation order {self.space.order}"
            )
        k = self.space.position[alpha]
        return float(self.coeffs[k] * self.space.factorials[k])

    def gradient(self) -> np.ndarray:
        """All first partials as a vector."""
        sp = self.space
        if sp.order < 1:
            raise ValueError("order-0 jet carries no first derivatives")
        out = np.empty(sp.dim)
        for i in range(sp.dim):
            e = tuple(1 if k == i else 0 for k in range(sp.dim))
            out[i] = self.coeffs[sp.position[e]]
        return out

    def derivative(self, i: int) -> "Jet":
        """Jet of the partial derivative d/dx_i.

        The result lives in the same space but is only trustworthy through
        order ``order - 1``; its top-degree coefficients are set to zero.
        """
        sp = self.space
        if not 0 <= i < sp.dim:
            raise IndexError(f"variable index {i} out of range for dim {sp.dim}")
        c = np.zeros(sp.size)
        c[sp._shift_dst[i]] = sp._shift_fac[i] * self.coeffs[sp._shift_src[i]]
        return Jet(sp, c)

    # -- ring arithmetic ----------------------------------------------

    def _coerce(self, other) -> "Jet | None":
        if isinstance(other, Jet):
            if other.space is not self.space:
                raise ValueError("jets from different spaces")
            return other
        if isinstance(other, (int, float, np.floating, np.integer)):
            return Jet.constant(float(other), self.space.dim, self.space.order)
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return Jet(self.space, self.coeffs + o.coeffs)

    __radd__ = __add__

    def __neg__(self):
        return Jet(self.space, -self.coeffs)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return Jet(self.space, self.coeffs - o.coeffs)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return Jet(self.space, o.coeffs - self.coeffs)

    def __mul__(self, other):
        if isinstance(other, (int, float, np.floating, np.integer)):
            return Jet(self.space, self.coeffs * float(other))
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        sp = self.space
        out = np.zeros(sp.size)
        np.add.at(
            out, sp._mul_target, self.coeffs[sp._mul_left] * o.coeffs[sp._mul_right]
        )
        return Jet(sp, out)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (int, float, np.floating, np.integer)):
            return Jet(self.space, self.coeffs / float(other))
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self * o.reciprocal()

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o * self.reciprocal()

    def __pow__(self, expo):
        if isinstance(expo, (int, np.integer)):
            n = int(expo)
            if n < 0:
                return self.reciprocal() ** (-n)
            result = Jet.constant(1.0, self.space.dim, self.space.order)
            base = self
            while n:
                if n & 1:
                    result = result * base
                base = base * base
                n >>= 1
            return result
        return self.pow(float(expo))

    def __repr__(self) -> str:  # pragma: no cover
        return f"Jet(value={self.value:.6g}, dim={self.space.dim}, order={self.space.order})"

    # -- analytic functions -------------------------------------------

    def _compose(self, series: np.ndarray) -> "Jet":
        """Horner evaluation of sum series[k] * (self - const)^k."""
        sp = self.space
        p = Jet(sp, self.coeffs.copy())
        p.coeffs[0] = 0.0
        acc = Jet.constant(series[sp.order], sp.dim, sp.order)
        for k in range(sp.order - 1, -1, -1):
            acc = acc * p + series[k]
        return acc

    def _series_from_derivs(self, derivs: list[float]) -> "Jet":
        coeffs = np.array(
            [d / math.factorial(k) for k, d in enumerate(derivs)], dtype=float
        )
        return self._compose(coeffs)

    def exp(self) -> "Jet":
        e = math.exp(self.value)
        return self._series_from_derivs([e] * (self.space.order + 1))

    def log(self) -> "Jet":
        a = self.value
        if a <= 0.0:
            raise JetDomainError(f"log of jet with non-positive value {a}")
        derivs = [math.log(a)]
        for k in range(1, self.space.order + 1):
            derivs.append((-1.0) ** (k + 1) * math.factorial(k - 1) / a**k)
        return self._series_from_derivs(derivs)

    def sqrt(self) -> "Jet":
        a = self.value
        if a <= 0.0:
            raise JetDomainError(f"sqrt of jet with non-positive value {a}")
        return self.pow(0.5)

    def pow(self, r: float) -> "Jet":
        a = self.value
        if a <= 0.0:
            raise JetDomainError(f"pow({r}) of jet with non-positive value {a}")
        derivs, fac = [], 1.0
        for k in range(self.space.order + 1):
            derivs.append(fac * a ** (r - k))
            fac *= r - k
        return self._series_from_derivs(derivs)

    def reciprocal(self) -> "Jet":
        a = self.value
        if a == 0.0:
            raise JetDomainError("reciprocal of jet with zero value")
        derivs = [
            (-1.0) ** k * math.factorial(k) / a ** (k + 1)
            for k in range(self.space.order + 1)
        ]
        return self._series_from_derivs(derivs)

    def sin(self) -> "Jet":
        a = self.value
        cycle = [math.sin(a), math.cos(a), -math.sin(a), -math.cos(a)]
        return self._series_from_derivs(
            [cycle[k % 4] for k in range(self.space.order + 1)]
        )

    def cos(self) -> "Jet":
        a = self.value
        cycle = [math.cos(a), -math.sin(a), -math.cos(a), math.sin(a)]
        return self._series_from_derivs(
            [cycle[k % 4] for k in range(self.space.order + 1)]
        )


# -- spec-facing functional interface ---------------------------------


def seed_variable(i: int, value: float, dim: int, order: int) -> Jet:
    """Jet of the i-th coordinate function at a point."""
    return Jet.variable(i, value, dim, order)


def constant_jet(value: float, dim: int, order: int) -> Jet:
    return Jet.constant(value, dim, order)


def seed_point(point: Sequence[float], order: int) -> list[Jet]:
    """Coordinate jets of a full point, one seeded variable per axis."""
    p = list(point)
    return [Jet.variable(i, p[i], len(p), order) for i in range(len(p))]


_APPLY = {
    "exp": lambda x: x.exp(),
    "log": lambda x: x.log(),
    "sqrt": lambda x: x.sqrt(),
    "sin": lambda x: x.sin(),
    "cos": lambda x: x.cos(),
    "reciprocal": lambda x: x.reciprocal(),
}


def jet_apply(name: str, x: Jet, r: float | None = None) -> Jet:
    """Apply an elementary function by tag; ``pow`` takes the exponent r."""
    if name == "pow":
        if r is None:
            raise ValueError("pow requires an exponent")
        return x.pow(r)
    try:
        fn = _APPLY[name]
    except KeyError:
        raise ValueError(f"unknown elementary function {name!r}") from None
    return fn(x)


def extract_partial(x: Jet, multi_index: Sequence[int]) -> float:
    return x.partial(multi_index)


# -- duck-typed math usable on floats, arrays, jets and dual batches ---


def _dispatch(x, method: str, float_fn):
    if isinstance(x, (Jet, DualBatch)):
        return getattr(x, method)()
    return float_fn(x)


def jexp(x):
    return _dispatch(x, "exp", np.exp)


def jlog(x):
    return _dispatch(x, "log", np.log)


def jsqrt(x):
    return _dispatch(x, "sqrt", np.sqrt)


def jsin(x):
    return _dispatch(x, "sin", np.sin)


def jcos(x):
    return _dispatch(x, "cos", np.cos)


def jpow(x, r: float):
    if isinstance(x, (Jet, DualBatch)):
        return x.pow(r)
    return np.power(x, r)


def jreciprocal(x):
    if isinstance(x, (Jet, DualBatch)):
        return x.reciprocal()
    return 1.0 / x


class DualBatch:
    """Vectorized low-order dual numbers over a batch of points.

    ``val`` has shape (n,), ``grad`` shape (n, dim) and, optionally,
    ``hess`` shape (n, dim, dim).  When the Hessian is carried,
    :meth:`derivative` yields the first partial as a new first-order
    batch, which is what lets field component formulas (which embed
    profile derivatives) be evaluated in one vectorized pass.  This type
    backs the fast paths (feasibility scans, geodesic right-hand sides);
    everything above second order goes through :class:`Jet`.
    """

    __slots__ = ("val", "grad", "hess")

    def __init__(self, val, grad, hess=None):
        self.val = np.asarray(val, dtype=float)
        self.grad = np.asarray(grad, dtype=float)
        self.hess = None if hess is None else np.asarray(hess, dtype=float)

    @staticmethod
    def variable(
        i: int, values: np.ndarray, dim: int, with_hessian: bool = False
    ) -> "DualBatch":
        v = np.asarray(values, dtype=float)
        g = np.zeros(v.shape + (dim,))
        g[..., i] = 1.0
        h = np.zeros(v.shape + (dim, dim)) if with_hessian else None
        return DualBatch(v, g, h)

    @property
    def dim(self) -> int:
        return self.grad.shape[-1]

    def derivative(self, i: int) -> "DualBatch":
        """First partial d/dx_i as a first-order batch (needs the Hessian)."""
        if self.hess is None:
            raise ValueError("derivative() requires a second-order DualBatch")
        return DualBatch(self.grad[..., i], self.hess[..., i, :])

    def _lift(self, other):
        if isinstance(other, DualBatch):
            return other
        if isinstance(other, (int, float, np.floating, np.integer, np.ndarray)):
            v = np.broadcast_to(np.asarray(other, dtype=float), self.val.shape)
            h = None if self.hess is None else np.zeros_like(self.hess)
            return DualBatch(v, np.zeros_like(self.grad), h)
        return None

    @staticmethod
    def _join_hess(a: "DualBatch", b: "DualBatch"):
        # hess propagates only when both operands carry it
        return a.hess is not None and b.hess is not None

    def __add__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        h = self.hess + o.hess if self._join_hess(self, o) else None
        return DualBatch(self.val + o.val, self.grad + o.grad, h)

    __radd__ = __add__

    def __neg__(self):
        return DualBatch(-self.val, -self.grad, None if self.hess is None else -self.hess)

    def __sub__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        h = self.hess - o.hess if self._join_hess(self, o) else None
        return DualBatch(self.val - o.val, self.grad - o.grad, h)

    def __rsub__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return o - self

    def __mul__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        val = self.val * o.val
        grad = self.grad * o.val[..., None] + o.grad * self.val[..., None]
        h = None
        if self._join_hess(self, o):
            cross = self.grad[..., :, None] * o.grad[..., None, :]
            h = (
                self.hess * o.val[..., None, None]
                + o.hess * self.val[..., None, None]
                + cross
                + np.swapaxes(cross, -1, -2)
            )
        return DualBatch(val, grad, h)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return self * o.reciprocal()

    def __rtruediv__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return o * self.reciprocal()

    def __pow__(self, expo):
        if isinstance(expo, (int, np.integer)):
            n = int(expo)
            return self._chain(
                self.val**n,
                n * self.val ** (n - 1),
                float(n * (n - 1)) * self.val ** (n - 2) if n >= 2 else np.zeros_like(self.val),
            )
        return self.pow(float(expo))

    def _chain(self, v, dv, d2v=None):
        grad = dv[..., None] * self.grad
        h = None
        if self.hess is not None and d2v is not None:
            outer = self.grad[..., :, None] * self.grad[..., None, :]
            h = dv[..., None, None] * self.hess + d2v[..., None, None] * outer
        return DualBatch(v, grad, h)

    def exp(self):
        e = np.exp(self.val)
        return self._chain(e, e, e)

    def log(self):
        if np.any(self.val <= 0.0):
            raise JetDomainError("log of batch with non-positive value")
        inv = 1.0 / self.val
        return self._chain(np.log(self.val), inv, -inv * inv)

    def sqrt(self):
        if np.any(self.val <= 0.0):
            raise JetDomainError("sqrt of batch with non-positive value")
        s = np.sqrt(self.val)
        return self._chain(s, 0.5 / s, -0.25 / (s * self.val))

    def pow(self, r: float):
        if np.any(self.val <= 0.0):
            raise JetDomainError(f"pow({r}) of batch with non-positive value")
        return self._chain(
            self.val**r,
            r * self.val ** (r - 1.0),
            r * (r - 1.0) * self.val ** (r - 2.0),
        )

    def reciprocal(self):
        if np.any(self.val == 0.0):
            raise JetDomainError("reciprocal of batch with zero value")
        inv = 1.0 / self.val
        return self._chain(inv, -inv * inv, 2.0 * inv * inv * inv)

    def sin(self):
        s, c = np.sin(self.val), np.cos(self.val)
        return self._chain(s, c, -s)

    def cos(self):
        s, c = np.sin(self.val), np.cos(self.val)
        return self._chain(c, -s, -c)


def dual_point(points: np.ndarray, with_hessian: bool = False) -> list[DualBatch]:
    """Coordinate dual batches for an (n, dim) array of points."""
    pts = np.asarray(points, dtype=float)
    dim = pts.shape[1]
    return [
        DualBatch.variable(i, pts[:, i], dim, with_hessian=with_hessian)
        for i in range(dim)
    ]
