"""Para-complex projective machinery: Benenti tensors and their identities.

Central objects: a para-Kahler triple (g, T) together with an
endomorphism field A that is g-symmetric, commutes with T and satisfies

    nabla_X A = g(X,.) Lam + g(Lam,.) X - g(TX,.) TLam - g(TLam,.) TX,
    Lam = (1/4) grad tr A.

Nondegenerate solutions ("Benenti tensors") encode a second metric with
the same T-planar curves through

    ghat = (det A)^(-1/2) g A^(-1),

and the whole two-parameter family alpha*g-side + beta*ghat-side.  This
module evaluates every residual of that story: the defining equation,
its symplectic (Hamiltonian 2-form) reformulation, connection and Ricci
differences, the weighted-tensor mobility equation, eigenvalue
invariants with their canonical Killing fields, and the rank
classification of the canonical distribution.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .curvature import (
    christoffel,
    covariant_derivative_endo,
    covariant_derivative_vector,
    ricci,
)
from .fields import (
    DIM,
    DegenerateMetricError,
    ScalarField,
    TensorField,
    apply_endo_field,
    gradient_field,
    lie_bracket,
    lie_derivative_endo,
    lie_derivative_metric,
    metric_inverse,
    tensor_values_and_partials,
)
from .jets import Jet
from .linalg import mdet, minv, mmul, mtrace
from .parakahler import ParaKahlerTriple, fundamental_form

__all__ = [
    "N_COMPLEX",
    "identity_endo",
    "endo_combination",
    "trace_field",
    "mu_invariant_fields",
    "mu_polynomial",
    "lambda_field",
    "lambda_vector",
    "benenti_residual",
    "hamiltonian_form_residual",
    "a_from_pair",
    "a_from_pair_field",
    "companion_metric",
    "family_metric",
    "psi_field",
    "psi_potential",
    "connection_difference_residual",
    "weighted_sigma_field",
    "weighted_endo_sigma_field",
    "scale_weighted_field",
    "weighted_covariant_derivative",
    "sigma_parallel_residual",
    "sigma_para_hermitian_residual",
    "mobility_residual",
    "SpectralData",
    "eigen_decompose",
    "eigenvalue_fields",
    "eigen_gradient_residual",
    "canonical_killing_fields",
    "killing_residual",
    "hamiltonian_pairing_residual",
    "para_holomorphy_residual",
    "commutation_residual",
    "leaf_geodesic_residual",
    "GradClass",
    "classify_gradient",
    "distribution_d_rank",
    "ricci_difference_residual",
    "einstein_family_constant",
    "EinsteinPreconditionError",
]

# para-complex dimension of a 4-manifold; the constant 2(n+1) recurs in
# the trace normalizations of the projective identities
N_COMPLEX = 2
_K = 2.0 * (N_COMPLEX + 1)


class EinsteinPreconditionError(ValueError):
    """An operation required Einstein inputs and the residual said no."""


# -- endomorphism plumbing ---------------------------------------------


def identity_endo() -> TensorField:
    eye = np.eye(DIM)

    def comps(*coords):
        out = np.empty((DIM, DIM), dtype=object)
        for i in range(DIM):
            for j in range(DIM):
                out[i, j] = eye[i, j]
        return out

    return TensorField((1, 1), comps, name="Id")


def endo_combination(a: TensorField, alpha: float, beta: float) -> TensorField:
    """alpha * Id + beta * A as an endomorphism field."""

    def comps(*coords):
        aj = a.components(coords)
        out = np.empty((DIM, DIM), dtype=object)
        for i in range(DIM):
            for j in range(DIM):
                out[i, j] = beta * aj[i, j] + (alpha if i == j else 0.0)
        return out

    return TensorField((1, 1), comps, name=f"{alpha}*Id+{beta}*A")


def trace_field(a: TensorField) -> ScalarField:
    return ScalarField(lambda *c: mtrace(a.components(c)), name="trA")


def mu_invariant_fields(a: TensorField) -> tuple[ScalarField, ScalarField]:
    """Smooth invariants mu1, mu2 with sqrt(det(A - t Id)) = t^2 - mu1 t + mu2.

    mu1 = tr A / 2 and mu2 = (tr A)^2/8 - tr(A^2)/4; both polynomial in
    the components, so the signed square root of det A stays smooth
    across sign changes of the half-block determinant.
    """

    def mu1(*coords):
        return mtrace(a.components(coords)) * 0.5

    def mu2(*coords):
        aj = a.components(coords)
        tr = mtrace(aj)
        tr2 = mtrace(mmul(aj, aj))
        return tr * tr * 0.125 - tr2 * 0.25

    return ScalarField(mu1, name="mu1"), ScalarField(mu2, name="mu2")


def mu_polynomial(a: TensorField, point: Sequence[float], t: float) -> float:
    """sqrt(det(A - t Id)) evaluated as the quadratic t^2 - mu1 t + mu2."""
    mu1, mu2 = mu_invariant_fields(a)
    return t * t - mu1.value(point) * t + mu2.value(point)


# -- the defining equation ---------------------------------------------


def lambda_field(g: TensorField, a: TensorField) -> TensorField:
    """Lam = (1/4) grad tr A as a vector field."""
    quarter_tr = ScalarField(lambda *c: mtrace(a.components(c)) * 0.25, name="trA/4")
    return gradient_field(g, quarter_tr, name="Lambda")


def lambda_vector(
    g: TensorField, a: TensorField, point: Sequence[float]
) -> np.ndarray:
    tr = ScalarField(lambda *c: mtrace(a.components(c)))
    dtr = tr.gradient_covector(point)
    return 0.25 * metric_inverse(g, point) @ dtr


def benenti_residual(
    triple: ParaKahlerTriple, a: TensorField, point: Sequence[float]
) -> float:
    """Deviation of nabla A from the canonical right-hand side built from Lam.

    Maximum over coordinate directions X of the matrix mismatch, scaled
    by the magnitude of the quantities compared.
    """
    g, t = triple.g, triple.t
    gm = g.values(point)
    tm = t.values(point)
    lam = lambda_vector(g, a, point)
    tlam = tm @ lam
    nabla = covariant_derivative_endo(g, a, point)  # [k, i, j]
    worst, scale = 0.0, 1.0
    for k in range(DIM):
        x = np.zeros(DIM)
        x[k] = 1.0
        tx = tm @ x
        rhs = (
            np.outer(lam, gm @ x)
            + np.outer(x, gm @ lam)
            - np.outer(tlam, gm @ tx)
            - np.outer(tx, gm @ tlam)
        )
        worst = max(worst, float(np.max(np.abs(nabla[k] - rhs))))
        scale = max(scale, float(np.max(np.abs(rhs))), float(np.max(np.abs(nabla[k]))))
    return worst / scale


def hamiltonian_form_residual(
    triple: ParaKahlerTriple, a: TensorField, point: Sequence[float]
) -> float:
    """Residual of the Hamiltonian-2-form shape of the defining equation.

    With phi = g(AT., .) and kappa = tr_omega phi the equation reads

        2 nabla_X phi = d kappa ^ (TX)^flat - (T d kappa) ^ X^flat .

    Normalization is pinned so this is equivalent to the Lam form:
    tr_omega phi = (1/2) tr A, and T acts on 1-forms through the metric
    duality, (T alpha)(Y) = -alpha(TY).
    """
    g, t = triple.g, triple.t

    def phifn(*coords):
        aj = a.components(coords)
        tj = t.components(coords)
        gj = g.components(coords)
        at = mmul(aj, tj)
        out = np.empty((DIM, DIM), dtype=object)
        for i in range(DIM):
            for j in range(DIM):
                acc = at[0, i] * gj[0, j]
                for k in range(1, DIM):
                    acc = acc + at[k, i] * gj[k, j]
                out[i, j] = acc
        return out

    phi = TensorField((0, 2), phifn, name="phi")
    phv, php = tensor_values_and_partials(phi, point)
    gamma = christoffel(g, point)
    nphi = np.transpose(php, (2, 0, 1)).copy()
    nphi -= np.einsum("mki,mj->kij", gamma, phv)
    nphi -= np.einsum("mkj,im->kij", gamma, phv)

    gm = g.values(point)
    tm = t.values(point)
    half_tr = ScalarField(lambda *c: mtrace(a.components(c)) * 0.5)
    dk = half_tr.gradient_covector(point)
    tdk = -(tm.T @ dk)  # (T dkappa)_i = -dkappa_p T^p_i

    worst, scale = 0.0, 1.0
    for k in range(DIM):
        x = np.zeros(DIM)
        x[k] = 1.0
        txf = gm @ (tm @ x)
        xf = gm @ x
        rhs = (
            np.outer(dk, txf)
            - np.outer(txf, dk)
            - np.outer(tdk, xf)
            + np.outer(xf, tdk)
        )
        worst = max(worst, float(np.max(np.abs(2.0 * nphi[k] - rhs))))
        scale = max(scale, float(np.max(np.abs(rhs))), float(np.max(np.abs(2 * nphi[k]))))
    return worst / scale


# -- pair <-> Benenti tensor -------------------------------------------


def a_from_pair(
    g: TensorField, ghat: TensorField, point: Sequence[float]
) -> np.ndarray:
    """A = (det ghat / det g)^(1/6) ghat^{-1} g at a point."""
    gm = g.values(point)
    hm = ghat.values(point)
    ratio = np.linalg.det(hm) / np.linalg.det(gm)
    if ratio <= 0.0:
        raise DegenerateMetricError(
            f"determinant ratio {ratio:.3e} is not positive at {list(point)}"
        )
    return ratio ** (1.0 / 6.0) * np.linalg.inv(hm) @ gm


def a_from_pair_field(g: TensorField, ghat: TensorField) -> TensorField:
    def comps(*coords):
        gj = g.components(coords)
        hj = ghat.components(coords)
        ratio = mdet(hj) / mdet(gj)
        scale = ratio.pow(1.0 / 6.0)
        hinv = minv(hj)
        out = mmul(hinv, gj)
        for i in range(DIM):
            for j in range(DIM):
                out[i, j] = out[i, j] * scale
        return out

    return TensorField((1, 1), comps, name="A(g,ghat)")


def companion_metric(g: TensorField, a: TensorField) -> TensorField:
    """ghat = (det A)^(-1/2) g A^(-1), positive square root.

    det A must be positive on the region of use; evaluation raises a
    domain error otherwise.  Carries an analytic vectorized evaluator
    (matrix calculus for the inverse and determinant derivatives) so it
    can sit inside the geodesic integrator loop.
    """

    def comps(*coords):
        gj = g.components(coords)
        aj = a.components(coords)
        det = mdet(aj)
        if isinstance(det, Jet):
            if det.value <= 0.0:
                raise DegenerateMetricError(
                    f"det A = {det.value:.3e} <= 0 in companion metric"
                )
            scale = det.pow(-0.5)
        else:
            scale = det ** (-0.5)
        ainv = minv(aj)
        out = mmul(gj, ainv)
        for i in range(DIM):
            for j in range(DIM):
                out[i, j] = out[i, j] * scale
        return out

    def batch(points):
        gv, gd = g.batch_duals(points)
        av, ad = a.batch_duals(points)
        det = np.linalg.det(av)
        if np.any(det <= 0.0):
            raise DegenerateMetricError("det A <= 0 in companion metric batch")
        ainv = np.linalg.inv(av)
        s = det ** (-0.5)
        # d s = -1/2 s tr(A^{-1} dA);  d(G A^{-1}) = dG A^{-1} - G A^{-1} dA A^{-1}
        ds = -0.5 * s[:, None] * np.einsum("nij,njik->nk", ainv, ad)
        ga = np.einsum("nim,nmj->nij", gv, ainv)
        dga = np.einsum("nimk,nmj->nijk", gd, ainv)
        dga -= np.einsum("nim,nmpk,npj->nijk", ga, ad, ainv)
        vals = s[:, None, None] * ga
        grads = s[:, None, None, None] * dga + np.einsum("nk,nij->nijk", ds, ga)
        return vals, grads

    return TensorField((0, 2), comps, name="companion", batch_fn=batch)


def family_metric(
    g: TensorField,
    a: TensorField,
    alpha: float,
    beta: float,
    ghat: TensorField | None = None,
) -> TensorField:
    """Member of the projective family weighting g by alpha and ghat by beta.

    Equals the companion construction applied to alpha*Id + beta*A, with
    the smooth signed square root alpha^2 + alpha*beta*mu1 + beta^2*mu2
    in place of the positive root, which keeps the family polynomial in
    (alpha, beta).  (alpha, beta) = (1, 0) returns g itself; (0, 1)
    returns the companion up to the sign of that root.

    If ``a`` is None the Benenti tensor is derived from the pair (g, ghat).
    """
    if a is None:
        if ghat is None:
            raise ValueError("need either a Benenti field or the companion metric")
        a = a_from_pair_field(g, ghat)
    mu1, mu2 = mu_invariant_fields(a)

    def comps(*coords):
        gj = g.components(coords)
        at = endo_combination(a, alpha, beta).components(coords)
        s = alpha * alpha + alpha * beta * mu1(*coords) + beta * beta * mu2(*coords)
        sval = s.value if isinstance(s, Jet) else float(s)
        if abs(sval) < 1e-13:
            raise DegenerateMetricError(
                f"family combination ({alpha}, {beta}) degenerate: sqrt det = {sval:.3e}"
            )
        atinv = minv(at)
        out = mmul(gj, atinv)
        for i in range(DIM):
            for j in range(DIM):
                out[i, j] = out[i, j] / s
        return out

    return TensorField((0, 2), comps, name=f"family[{alpha},{beta}]")


# -- potential and connection difference --------------------------------


def psi_field(a: TensorField) -> ScalarField:
    """psi = -(1/4) log det A; its differential drives the connection shift."""

    def fn(*coords):
        det = mdet(a.components(coords))
        if isinstance(det, Jet):
            if det.value <= 0.0:
                raise DegenerateMetricError(f"det A = {det.value:.3e} <= 0 in psi")
            return det.log() * (-0.25)
        return -0.25 * np.log(det)

    return ScalarField(fn, name="psi")


def psi_potential(
    a: TensorField, point: Sequence[float]
) -> tuple[float, np.ndarray]:
    """(psi, Psi) with Psi = d psi as a coordinate covector."""
    f = psi_field(a)
    jet = f.jet(point, order=2)
    return jet.value, jet.gradient()


def connection_difference_residual(
    g: TensorField,
    ghat: TensorField,
    t: TensorField,
    point: Sequence[float],
    a: TensorField | None = None,
) -> float:
    """Mismatch of Gammahat - Gamma against the projective-shift formula.

    The shift is Psi_i d^k_j + Psi_j d^k_i + Psi_p T^p_i T^k_j
    + Psi_p T^p_j T^k_i with Psi = d psi, psi from det A of the pair.
    """
    if a is None:
        a = a_from_pair_field(g, ghat)
    _, psi = psi_potential(a, point)
    gm_hat = christoffel(ghat, point)
    gm = christoffel(g, point)
    tm = t.values(point)
    psit = tm.T @ psi
    eye = np.eye(DIM)
    rhs = (
        np.einsum("i,kj->kij", psi, eye)
        + np.einsum("j,ki->kij", psi, eye)
        + np.einsum("i,kj->kij", psit, tm)
        + np.einsum("j,ki->kij", psit, tm)
    )
    diff = gm_hat - gm
    scale = max(1.0, float(np.max(np.abs(diff))), float(np.max(np.abs(rhs))))
    return float(np.max(np.abs(diff - rhs))) / scale


# -- weighted (2,0) tensors and the mobility equation -------------------


def weighted_sigma_field(g: TensorField) -> TensorField:
    """sigma^{ij} = |det g|^(1/6) g^{ij}, the weighted tensor of the metric."""

    def comps(*coords):
        gj = g.components(coords)
        det = mdet(gj)
        if isinstance(det, Jet):
            if det.value < 0.0:
                det = -det
            w = det.pow(1.0 / 6.0)
        else:
            w = abs(det) ** (1.0 / 6.0)
        ginv = minv(gj)
        out = np.empty((DIM, DIM), dtype=object)
        for i in range(DIM):
            for j in range(DIM):
                out[i, j] = ginv[i, j] * w
        return out

    return TensorField((2, 0), comps, name="sigma(g)")


def weighted_endo_sigma_field(a: TensorField, sigma: TensorField) -> TensorField:
    """(A sigma)^{jk} = A^j_p sigma^{pk}; stays symmetric and para-Hermitian."""

    def comps(*coords):
        return mmul(a.components(coords), sigma.components(coords))

    return TensorField((2, 0), comps, name="A.sigma")


def scale_weighted_field(f: ScalarField, sigma: TensorField) -> TensorField:
    """f * sigma for a scalar field f (a non-solution probe for invariance)."""

    def comps(*coords):
        s = sigma.components(coords)
        fv = f(*coords)
        out = np.empty((DIM, DIM), dtype=object)
        for i in range(DIM):
            for j in range(DIM):
                out[i, j] = s[i, j] * fv
        return out

    return TensorField((2, 0), comps, name=f"{f.name}.sigma")


def weighted_covariant_derivative(
    g_conn: TensorField, sig: TensorField, point: Sequence[float]
) -> np.ndarray:
    """nabla_i sigma^{jk} for a (2,0) tensor of volume weight 1/(n+1).

    nabla_i s^{jk} = d_i s^{jk} + G^j_{im} s^{mk} + G^k_{im} s^{mj}
                     - (1/(n+1)) G^p_{ip} s^{jk}
    """
    sv, sp = tensor_values_and_partials(sig, point)
    gamma = christoffel(g_conn, point)
    out = np.transpose(sp, (2, 0, 1)).copy()
    out += np.einsum("jim,mk->ijk", gamma, sv)
    out += np.einsum("kim,mj->ijk", gamma, sv)
    out -= np.einsum("pip,jk->ijk", gamma, sv) / (N_COMPLEX + 1.0)
    return out


def sigma_parallel_residual(g: TensorField, point: Sequence[float]) -> float:
    sig = weighted_sigma_field(g)
    nabla = weighted_covariant_derivative(g, sig, point)
    return float(np.max(np.abs(nabla))) / max(
        1.0, float(np.max(np.abs(sig.values(point))))
    )


def sigma_para_hermitian_residual(
    t: TensorField, sig: TensorField, point: Sequence[float]
) -> float:
    """T^j_p sigma^{pk} + sigma^{jp} T^k_p should vanish."""
    tm = t.values(point)
    sv = sig.values(point)
    res = tm @ sv + sv @ tm.T
    return float(np.max(np.abs(res))) / max(1.0, float(np.max(np.abs(sv))))


def mobility_residual(
    g_conn: TensorField,
    t: TensorField,
    sig_hat: TensorField,
    point: Sequence[float],
) -> float:
    """Residual of the projectively invariant first-order system.

    nabla_i s^{jk} - (1/(2n)) (d^j_i D^k + d^k_i D^j
        - T^j_i T^k_p D^p - T^k_i T^j_p D^p),  D^k = nabla_l s^{lk}.

    The expression does not depend on which metric of the projective
    class supplies the connection; solutions make it vanish.
    """
    nabla = weighted_covariant_derivative(g_conn, sig_hat, point)
    d = np.einsum("llk->k", nabla)
    tm = t.values(point)
    td = tm @ d
    eye = np.eye(DIM)
    corr = (
        np.einsum("ij,k->ijk", eye, d)
        + np.einsum("ik,j->ijk", eye, d)
        - np.einsum("ji,kp,p->ijk", tm, tm, d)
        - np.einsum("ki,jp,p->ijk", tm, tm, d)
    ) / (2.0 * N_COMPLEX)
    res = nabla - corr
    scale = max(1.0, float(np.max(np.abs(nabla))), float(np.max(np.abs(corr))))
    return float(np.max(np.abs(res))) / scale


def mobility_expression(
    g_conn: TensorField,
    t: TensorField,
    sig_hat: TensorField,
    point: Sequence[float],
) -> np.ndarray:
    """The full invariant expression (not just its norm), for invariance tests."""
    nabla = weighted_covariant_derivative(g_conn, sig_hat, point)
    d = np.einsum("llk->k", nabla)
    tm = t.values(point)
    eye = np.eye(DIM)
    corr = (
        np.einsum("ij,k->ijk", eye, d)
        + np.einsum("ik,j->ijk", eye, d)
        - np.einsum("ji,kp,p->ijk", tm, tm, d)
        - np.einsum("ki,jp,p->ijk", tm, tm, d)
    ) / (2.0 * N_COMPLEX)
    return nabla - corr


# -- eigenvalues, Killing fields, rank classification --------------------


@dataclass(frozen=True)
class SpectralData:
    kind: str  # "real", "complex", "degenerate"
    mu1: float
    mu2: float
    discriminant: float
    rho: complex
    sigma: complex

    @property
    def is_real(self) -> bool:
        return self.kind == "real"


def eigen_decompose(
    a: TensorField, point: Sequence[float], degenerate_tol: float = 1e-10
) -> SpectralData:
    """Spectral type and double eigenvalues of a T-commuting endomorphism.

    Roots of t^2 - mu1 t + mu2; rho is the larger real root, or the root
    with positive imaginary part in the complex case.
    """
    mu1f, mu2f = mu_invariant_fields(a)
    m1 = mu1f.value(point)
    m2 = mu2f.value(point)
    disc = m1 * m1 - 4.0 * m2
    scale = max(1.0, m1 * m1, abs(m2))
    if abs(disc) < degenerate_tol * scale:
        kind = "degenerate"
        rho = sigma = complex(m1 / 2.0, 0.0)
    elif disc > 0:
        kind = "real"
        root = np.sqrt(disc)
        rho = complex((m1 + root) / 2.0, 0.0)
        sigma = complex((m1 - root) / 2.0, 0.0)
    else:
        kind = "complex"
        root = np.sqrt(-disc)
        rho = complex(m1 / 2.0, root / 2.0)
        sigma = rho.conjugate()
    return SpectralData(kind, m1, m2, disc, rho, sigma)


def eigenvalue_fields(
    a: TensorField, kind: str
) -> tuple[ScalarField, ScalarField]:
    """Smooth eigenvalue fields on a box of fixed spectral type.

    kind "real": (rho, sigma) with rho the larger root;
    kind "complex": (Re rho, Im rho) with Im rho > 0.
    """
    mu1f, mu2f = mu_invariant_fields(a)
    from .jets import jsqrt

    if kind == "real":

        def rho(*c):
            m1 = mu1f(*c)
            m2 = mu2f(*c)
            return (m1 + jsqrt(m1 * m1 - 4.0 * m2)) * 0.5

        def sig(*c):
            m1 = mu1f(*c)
            m2 = mu2f(*c)
            return (m1 - jsqrt(m1 * m1 - 4.0 * m2)) * 0.5

        return ScalarField(rho, "rho"), ScalarField(sig, "sigma")
    if kind == "complex":

        def re(*c):
            return mu1f(*c) * 0.5

        def im(*c):
            m1 = mu1f(*c)
            m2 = mu2f(*c)
            return jsqrt(4.0 * m2 - m1 * m1) * 0.5

        return ScalarField(re, "Re rho"), ScalarField(im, "Im rho")
    raise ValueError(f"no smooth eigenvalue fields for spectral kind {kind!r}")


def eigen_gradient_residual(
    triple: ParaKahlerTriple, a: TensorField, point: Sequence[float]
) -> float:
    """How far grad(rho), grad(sigma) are from being eigenvectors of A.

    In the complex case the eigenvector relation is taken for the
    complexified gradient grad(Re rho) + i grad(Im rho).
    """
    g = triple.g
    spec = eigen_decompose(a, point)
    am = a.values(point)
    ginv = metric_inverse(g, point)
    if spec.kind == "degenerate":
        raise ValueError("spectral type degenerate at the point")
    f1, f2 = eigenvalue_fields(a, spec.kind)
    v1 = ginv @ f1.gradient_covector(point)
    v2 = ginv @ f2.gradient_covector(point)
    scale = max(1.0, float(np.max(np.abs(am))) * max(np.max(np.abs(v1)), np.max(np.abs(v2))))
    if spec.kind == "real":
        r1 = am @ v1 - spec.rho.real * v1
        r2 = am @ v2 - spec.sigma.real * v2
    else:
        re, im = spec.rho.real, spec.rho.imag
        r1 = am @ v1 - (re * v1 - im * v2)
        r2 = am @ v2 - (re * v2 + im * v1)
    return float(max(np.max(np.abs(r1)), np.max(np.abs(r2)))) / scale


def canonical_killing_fields(
    triple: ParaKahlerTriple, a: TensorField
) -> tuple[list[TensorField], list[TensorField]]:
    """([V1, V2], [TV1, TV2]) with V_i = grad mu_i.

    The T-rotated fields are Killing for g and Hamiltonian for the
    fundamental form with Hamiltonians mu_i.
    """
    mu1f, mu2f = mu_invariant_fields(a)
    v1 = gradient_field(triple.g, mu1f, name="V1")
    v2 = gradient_field(triple.g, mu2f, name="V2")
    tv1 = apply_endo_field(triple.t, v1, name="TV1")
    tv2 = apply_endo_field(triple.t, v2, name="TV2")
    return [v1, v2], [tv1, tv2]


def killing_residual(
    g: TensorField, x: TensorField, point: Sequence[float]
) -> float:
    lie = lie_derivative_metric(g, x, point)
    return float(np.max(np.abs(lie))) / max(1.0, float(np.max(np.abs(g.values(point)))))


def hamiltonian_pairing_residual(
    triple: ParaKahlerTriple,
    mu: ScalarField,
    t_v: TensorField,
    point: Sequence[float],
) -> float:
    """|omega(TV, .) - d mu| at the point."""
    om = fundamental_form(triple, point)
    tv = t_v.values(point)
    dmu = mu.gradient_covector(point)
    res = tv @ om - dmu
    return float(np.max(np.abs(res))) / max(1.0, float(np.max(np.abs(dmu))))


def para_holomorphy_residual(
    triple: ParaKahlerTriple, x: TensorField, point: Sequence[float]
) -> float:
    return float(np.max(np.abs(lie_derivative_endo(triple.t, x, point))))


def commutation_residual(
    fields_list: Sequence[TensorField], point: Sequence[float]
) -> float:
    worst = 0.0
    for i in range(len(fields_list)):
        for j in range(i + 1, len(fields_list)):
            br = lie_bracket(fields_list[i], fields_list[j], point)
            worst = max(worst, float(np.max(np.abs(br))))
    return worst


def leaf_geodesic_residual(
    triple: ParaKahlerTriple, a: TensorField, point: Sequence[float]
) -> float:
    """g(nabla_{V_i} V_j, T V_h): zero means the V-leaves are totally geodesic."""
    g = triple.g
    (v1, v2), (tv1, tv2) = canonical_killing_fields(triple, a)
    gm = g.values(point)
    worst = 0.0
    tvs = [tv1.values(point), tv2.values(point)]
    for vi in (v1, v2):
        viv = vi.values(point)
        for vj in (v1, v2):
            nv = covariant_derivative_vector(g, vj, point)  # [k, i]
            acc = viv @ nv  # (nabla_{V_i} V_j)^i
            for tv in tvs:
                worst = max(worst, abs(float(acc @ gm @ tv)))
    scale = max(1.0, float(np.max(np.abs(gm))))
    return worst / scale


GradClass = str  # "zero", "null-plus", "null-minus", "non-isotropic", ...

_CLASS_ORDER = {
    "non-isotropic-complex": 0,
    "conjugate": 1,
    "non-isotropic": 2,
    "null-plus": 3,
    "null-minus": 4,
    "zero": 5,
    "indeterminate": 6,
}


def classify_gradient(
    gm: np.ndarray,
    tm: np.ndarray,
    v: np.ndarray,
    scale: float,
    threshold: float = 1e-8,
) -> tuple[GradClass, list[str]]:
    """Classify one eigenvalue gradient: zero / null in T+ or T- / non-isotropic.

    Values within a factor 10 of the decision threshold are flagged
    indeterminate instead of being forced into a class.
    """
    flags: list[str] = []
    vnorm = float(np.max(np.abs(v)))
    if vnorm < threshold * scale:
        if vnorm > 0.1 * threshold * scale:
            flags.append("near-zero-gradient")
        return "zero", flags
    norm2 = abs(float(v @ gm @ v))
    iso_scale = float(np.max(np.abs(gm))) * vnorm * vnorm
    isotropic = norm2 < threshold * iso_scale
    if threshold * iso_scale * 0.1 < norm2 < threshold * iso_scale * 10.0:
        flags.append("borderline-isotropy")
        return "indeterminate", flags
    if not isotropic:
        return "non-isotropic", flags
    plus = float(np.max(np.abs(tm @ v - v)))
    minus = float(np.max(np.abs(tm @ v + v)))
    if plus < threshold * vnorm:
        return "null-plus", flags
    if minus < threshold * vnorm:
        return "null-minus", flags
    flags.append("isotropic-but-not-eigendirection")
    return "indeterminate", flags


def distribution_d_rank(
    triple: ParaKahlerTriple,
    a: TensorField,
    point: Sequence[float],
    threshold: float = 1e-8,
) -> tuple[int, tuple[GradClass, GradClass], list[str]]:
    """Rank of span{grad mu1, grad mu2, T grad mu1, T grad mu2} + configuration.

    The configuration is the canonically ordered pair of gradient
    classes of the two eigenvalue functions (order-free, since the
    eigenvalue labels are only defined up to exchange).
    """
    g, t = triple.g, triple.t
    gm = g.values(point)
    tm = t.values(point)
    ginv = np.linalg.inv(gm)
    mu1f, mu2f = mu_invariant_fields(a)
    v1 = ginv @ mu1f.gradient_covector(point)
    v2 = ginv @ mu2f.gradient_covector(point)
    gens = np.stack([v1, v2, tm @ v1, tm @ v2])
    svals = np.linalg.svd(gens, compute_uv=False)
    smax = max(float(svals[0]), 1e-30)
    rank = int(np.sum(svals > threshold * smax))
    flags = []
    close = np.sum(
        (svals > 0.1 * threshold * smax) & (svals < 10.0 * threshold * smax)
    )
    if close:
        flags.append("borderline-rank")

    spec = eigen_decompose(a, point)
    if spec.kind == "complex":
        f1, f2 = eigenvalue_fields(a, "complex")
        gr = ginv @ f1.gradient_covector(point)
        gi = ginv @ f2.gradient_covector(point)
        # complex bilinear norm of grad rho = grad R + i grad I
        re_part = float(gr @ gm @ gr - gi @ gm @ gi)
        im_part = float(2.0 * gr @ gm @ gi)
        vnorm = max(float(np.max(np.abs(gr))), float(np.max(np.abs(gi))))
        iso_scale = float(np.max(np.abs(gm))) * vnorm * vnorm
        if abs(complex(re_part, im_part)) < threshold * iso_scale:
            config = ("indeterminate", "conjugate")
            flags.append("complex-gradient-isotropic")
        else:
            config = ("non-isotropic-complex", "conjugate")
        return rank, config, flags

    if spec.kind == "degenerate":
        return rank, ("indeterminate", "indeterminate"), flags + ["degenerate-spectrum"]

    f1, f2 = eigenvalue_fields(a, "real")
    scale_v = max(
        float(np.max(np.abs(v1))), float(np.max(np.abs(v2))), 1.0
    )
    gr = ginv @ f1.gradient_covector(point)
    gs = ginv @ f2.gradient_covector(point)
    c1, fl1 = classify_gradient(gm, tm, gr, scale_v, threshold)
    c2, fl2 = classify_gradient(gm, tm, gs, scale_v, threshold)
    flags += fl1 + fl2
    pair = sorted([c1, c2], key=lambda c: _CLASS_ORDER[c])
    return rank, (pair[0], pair[1]), flags


# -- curvature comparison ------------------------------------------------


def ricci_difference_residual(
    g: TensorField,
    ghat: TensorField,
    t: TensorField,
    a: TensorField,
    point: Sequence[float],
) -> tuple[float, float]:
    """(primary, cross-check) residuals of the Ricci comparison identity.

    Primary form:  Ric(ghat) - Ric(g)
        = -2(n+1) (nabla Psi - Psi x Psi - (Psi o T) x (Psi o T)).

    Cross-check (Lam form):  (Ric(ghat) - Ric(g)) / (2(n+1))
        = g(A^{-1} Y, nabla_X Lam) - g(A^{-1} Lam, Lam) g(Y, A^{-1} X).
    """
    gm = g.values(point)
    tm = t.values(point)
    ric_g = ricci(g, point)
    ric_h = ricci(ghat, point)
    lhs = ric_h - ric_g
    scale = max(1.0, float(np.max(np.abs(lhs))), float(np.max(np.abs(ric_g))))

    psi_jet = psi_field(a).jet(point, order=3)
    psi = psi_jet.gradient()
    hess = np.empty((DIM, DIM))
    for i in range(DIM):
        for j in range(DIM):
            alpha = [0] * DIM
            alpha[i] += 1
            alpha[j] += 1
            hess[i, j] = psi_jet.partial(alpha)
    gamma = christoffel(g, point)
    npsi = hess - np.einsum("mkj,m->kj", gamma, psi)
    psit = tm.T @ psi
    m = npsi - np.outer(psi, psi) - np.outer(psit, psit)
    primary = float(np.max(np.abs(lhs + _K * m))) / scale

    lam_f = lambda_field(g, a)
    nlam = covariant_derivative_vector(g, lam_f, point)  # [x, i]
    lam = lam_f.values(point)
    ainv = np.linalg.inv(a.values(point))
    const = float((ainv @ lam) @ gm @ lam)
    gainv = gm @ ainv  # symmetric since A is g-symmetric
    rhs = np.einsum("ym,xm->xy", gainv, nlam) - const * gainv
    cross = float(np.max(np.abs(lhs / _K - rhs))) / max(1.0, float(np.max(np.abs(rhs))))
    return primary, cross


def einstein_family_constant(
    g: TensorField,
    a: TensorField,
    lam: float,
    lam_hat: float,
    alpha: float,
    beta: float,
    points: np.ndarray,
    tol_einstein: float = 1e-6,
    check_inputs: bool = True,
    verify_ricci: bool = True,
    degenerate_margin: float = 1e-3,
) -> dict:
    """Einstein constant of the (alpha, beta) family member.

    Evaluates the closed-form constant

        lt = 2(n+1) s * ( lam_hat*beta/(2(n+1)) * (det A)^(-1/2)
             + beta g(A^{-1}Lam, Lam) - beta^2 g(At^{-1}Lam, Lam)
             + lam*alpha/(2(n+1)) ),
        At = alpha Id + beta A,   s = signed sqrt det At,

    at each sample point, reports its spread, and (optionally) verifies
    Ric = lt * gtilde for the family member.  Sample points where the
    combination degenerates are skipped and flagged.
    """
    pts = np.asarray(points, dtype=float)
    if check_inputs:
        p0 = pts[0]
        gm = g.values(p0)
        scale = max(1.0, float(np.max(np.abs(gm))))
        if np.max(np.abs(ricci(g, p0) - lam * gm)) / scale > tol_einstein:
            raise EinsteinPreconditionError("g is not Einstein with the given constant")
        ghat = companion_metric(g, a)
        hm = ghat.values(p0)
        scale_h = max(1.0, float(np.max(np.abs(hm))))
        if np.max(np.abs(ricci(ghat, p0) - lam_hat * hm)) / scale_h > tol_einstein:
            raise EinsteinPreconditionError(
                "companion is not Einstein with the given constant"
            )

    mu1f, mu2f = mu_invariant_fields(a)
    values, flags, used = [], [], 0
    for p in pts:
        m1 = mu1f.value(p)
        m2 = mu2f.value(p)
        s = alpha * alpha + alpha * beta * m1 + beta * beta * m2
        if abs(s) < degenerate_margin * max(1.0, alpha * alpha + beta * beta * abs(m2)):
            flags.append("degenerate-point-skipped")
            continue
        am = a.values(p)
        gm = g.values(p)
        at = alpha * np.eye(DIM) + beta * am
        lamv = lambda_vector(g, a, p)
        det_a = float(np.linalg.det(am))
        g_ainv = float((np.linalg.inv(am) @ lamv) @ gm @ lamv)
        g_atinv = float((np.linalg.inv(at) @ lamv) @ gm @ lamv)
        lt = _K * s * (
            lam_hat * beta / _K / np.sqrt(det_a)
            + beta * g_ainv
            - beta * beta * g_atinv
            + lam * alpha / _K
        )
        values.append(lt)
        used += 1
    if not values:
        return {"constant": np.nan, "spread": np.inf, "ricci_residual": np.inf,
                "points": 0, "flags": sorted(set(flags)) + ["no-valid-points"]}
    values = np.array(values)
    const = float(np.mean(values))
    spread = float(np.max(np.abs(values - const))) / max(1.0, abs(const))

    ric_res = 0.0
    if verify_ricci:
        member = family_metric(g, a, alpha, beta)
        for p in pts:
            m1 = mu1f.value(p)
            m2 = mu2f.value(p)
            s = alpha * alpha + alpha * beta * m1 + beta * beta * m2
            if abs(s) < degenerate_margin * max(1.0, alpha * alpha + beta * beta * abs(m2)):
                continue
            gtv = member.values(p)
            res = ricci(member, p) - const * gtv
            ric_res = max(
                ric_res,
                float(np.max(np.abs(res))) / max(1.0, float(np.max(np.abs(gtv)))),
            )
    return {
        "constant": const,
        "spread": spread,
        "ricci_residual": ric_res,
        "points": used,
        "flags": sorted(set(flags)),
    }
