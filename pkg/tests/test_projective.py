import numpy as np
import pytest

from conftest import fd_of
from pklab import projective as pj
from pklab.curvature import christoffel, ricci
from pklab.fields import (
    DegenerateMetricError,
    ScalarField,
    TensorField,
    metric_inverse,
    objarray,
)
from pklab.parakahler import ParaKahlerTriple

FLAT = [
    [0.0, 0.0, 1.0, 0.0],
    [0.0, 0.0, 0.0, 1.0],
    [1.0, 0.0, 0.0, 0.0],
    [0.0, 1.0, 0.0, 0.0],
]


def const_field(rows, valence=(1, 1)):
    return TensorField(valence, lambda *c: objarray(rows))


def scaled_identity(c):
    return const_field((c * np.eye(4)).tolist())


class TestLambdaField:
    def test_constant_multiple_of_identity_gives_zero(self, triples):
        tr = triples["real-liouville"]
        p = tr.sample_points(1)[0]
        lam = pj.lambda_vector(tr.g, scaled_identity(3.0), p)
        assert np.allclose(lam, 0.0)

    def test_real_liouville_half_gradient_of_sum(self, triples):
        # tr A = 2(rho + sigma), so Lam = (1/2) grad(rho + sigma)
        tr = triples["real-liouville"]
        f = ScalarField(lambda x1, x2, x3, x4: x1 + x2)  # default profiles
        for p in tr.sample_points(3):
            expected = 0.5 * metric_inverse(tr.g, p) @ f.gradient_covector(p)
            assert np.allclose(pj.lambda_vector(tr.g, tr.a, p), expected, atol=1e-12)

    def test_duality_with_trace_differential(self, triples):
        # X(tr A) = 4 g(Lam, X), trace differenced independently
        tr = triples["dim-d2-1"]
        trace = pj.trace_field(tr.a)

        def tr_val(*args):
            return trace(*args)

        for p in tr.sample_points(3):
            lam = pj.lambda_vector(tr.g, tr.a, p)
            gm = tr.g.values(p)
            for axis in range(4):
                fd = fd_of(lambda y: trace.jet(y, order=1).value, p, axis, 1e-5)
                assert 4 * (gm @ lam)[axis] == pytest.approx(fd, rel=1e-6, abs=1e-6)


class TestBenentiResidual:
    def test_identity_endomorphism(self, triples):
        tr = triples["real-liouville"]
        p = tr.sample_points(1)[0]
        assert pj.benenti_residual(tr, scaled_identity(1.0), p) < 1e-14

    def test_catalog_families(self, triples):
        for name, tr in triples.items():
            worst = max(pj.benenti_residual(tr, tr.a, p) for p in tr.sample_points(6))
            assert worst < 1e-9, name

    def test_linearity_shift(self, triples):
        tr = triples["complex-liouville"]
        shifted = pj.endo_combination(tr.a, -0.7, 1.0)
        worst = max(pj.benenti_residual(tr, shifted, p) for p in tr.sample_points(3))
        assert worst < 1e-9

    def test_perturbation_detected(self, triples):
        tr = triples["real-liouville"]

        def bad(*coords):
            arr = tr.a.components(coords).copy()
            arr[2, 2] = arr[2, 2] + 0.1 * coords[0]
            return arr

        a_bad = TensorField((1, 1), bad)
        p = tr.sample_points(1)[0]
        assert pj.benenti_residual(tr, a_bad, p) > 1e-3
        assert pj.hamiltonian_form_residual(tr, a_bad, p) > 1e-4


class TestHamiltonianForm:
    def test_identity_trivial(self, triples):
        tr = triples["real-liouville"]
        p = tr.sample_points(1)[0]
        assert pj.hamiltonian_form_residual(tr, scaled_identity(2.0), p) < 1e-12

    def test_covanishes_with_defining_equation(self, triples):
        for name, tr in triples.items():
            for p in tr.sample_points(4):
                assert pj.hamiltonian_form_residual(tr, tr.a, p) < 1e-9, name


class TestPairAlgebra:
    def test_a_from_scaled_pair(self):
        # ghat = c^{-3} g gives A = c Id
        c = 1.7
        g = const_field(FLAT, valence=(0, 2))
        ghat = const_field((np.array(FLAT) * c**-3).tolist(), valence=(0, 2))
        a = pj.a_from_pair(g, ghat, [0, 0, 0, 0])
        assert np.allclose(a, c * np.eye(4), rtol=1e-12)

    def test_a_from_equal_pair_is_identity(self):
        g = const_field(FLAT, valence=(0, 2))
        assert np.allclose(pj.a_from_pair(g, g, [0, 0, 0, 0]), np.eye(4))

    def test_negative_determinant_ratio_rejected(self):
        g = const_field(FLAT, valence=(0, 2))
        lorentz = const_field(np.diag([1.0, -1.0, -1.0, -1.0]).tolist(), valence=(0, 2))
        with pytest.raises(DegenerateMetricError):
            pj.a_from_pair(g, lorentz, [0, 0, 0, 0])

    def test_companion_of_scaled_identity(self):
        g = const_field(FLAT, valence=(0, 2))
        c = 2.0
        ghat = pj.companion_metric(g, scaled_identity(c))
        assert np.allclose(ghat.values([0, 0, 0, 0]), np.array(FLAT) * c**-3)

    def test_roundtrip_on_catalog(self, triples):
        for name, tr in triples.items():
            ghat = pj.companion_metric(tr.g, tr.a)
            for p in tr.sample_points(3):
                rec = pj.a_from_pair(tr.g, ghat, p)
                assert np.max(np.abs(rec - tr.a.values(p))) < 1e-10, name

    def test_companion_batch_path_matches_jets(self, triples):
        tr = triples["real-liouville"]
        ghat = pj.companion_metric(tr.g, tr.a)
        pts = tr.sample_points(4)
        vals, grads = ghat.batch_duals(pts)
        for i, p in enumerate(pts):
            arr = ghat.jets(p, order=2)
            for idx in np.ndindex((4, 4)):
                assert vals[(i,) + idx] == pytest.approx(arr[idx].value, rel=1e-12)
                assert np.allclose(grads[(i,) + idx], arr[idx].gradient(), rtol=1e-9, atol=1e-12)


class TestPotential:
    def test_scaled_identity(self):
        c = 2.0
        psi, big_psi = pj.psi_potential(scaled_identity(c), [0, 0, 0, 0])
        assert psi == pytest.approx(-np.log(c))
        assert np.allclose(big_psi, 0.0)

    def test_duality_with_lambda(self, triples):
        for name, tr in triples.items():
            for p in tr.sample_points(3):
                _, big_psi = pj.psi_potential(tr.a, p)
                lam = pj.lambda_vector(tr.g, tr.a, p)
                gm = tr.g.values(p)
                ainv = np.linalg.inv(tr.a.values(p))
                assert np.max(np.abs(big_psi + gm @ ainv @ lam)) < 1e-9, name

    def test_block_determinant_exponential_identity(self, triples):
        # det of the half block equals exp(-2 psi) in adapted charts
        for name in ("dim-d2-2", "dim-d1"):
            tr = triples[name]
            mu1, mu2 = pj.mu_invariant_fields(tr.a)
            for p in tr.sample_points(4):
                psi, _ = pj.psi_potential(tr.a, p)
                m2 = mu2.value(p)
                assert m2 > 0
                assert abs(m2 - np.exp(-2 * psi)) / m2 < 1e-10, name


class TestConnectionDifference:
    def test_equal_metrics(self, triples):
        tr = triples["real-liouville"]
        p = tr.sample_points(1)[0]
        assert pj.connection_difference_residual(
            tr.g, tr.g, tr.t, p, a=pj.identity_endo()
        ) < 1e-12

    def test_catalog_pairs(self, triples):
        for name, tr in triples.items():
            ghat = pj.companion_metric(tr.g, tr.a)
            worst = max(
                pj.connection_difference_residual(tr.g, ghat, tr.t, p, a=tr.a)
                for p in tr.sample_points(4)
            )
            assert worst < 1e-9, name

    def test_unrelated_metric_fails(self, triples):
        tr = triples["real-liouville"]
        flat = const_field(FLAT, valence=(0, 2))
        p = tr.sample_points(1)[0]
        assert pj.connection_difference_residual(tr.g, flat, tr.t, p) > 1e-2

    def test_parallel_a_means_equal_connections(self, triples):
        # A = c Id is parallel, the companion is a constant rescaling,
        # and constant rescalings share their Levi-Civita connection
        tr = triples["real-liouville"]
        ghat = pj.companion_metric(tr.g, scaled_identity(2.0))
        p = tr.sample_points(1)[0]
        assert np.allclose(christoffel(ghat, p), christoffel(tr.g, p), atol=1e-11)
        ghat_np = pj.companion_metric(tr.g, tr.a)  # non-parallel catalog tensor
        assert np.max(np.abs(christoffel(ghat_np, p) - christoffel(tr.g, p))) > 1e-3


class TestWeightedTensors:
    def test_flat_sigma_constant_and_parallel(self):
        g = const_field(FLAT, valence=(0, 2))
        sig = pj.weighted_sigma_field(g)
        p = [0.3, 0.1, 0.9, 0.4]
        assert np.allclose(sig.values(p), np.array(FLAT))  # |det| = 1
        assert pj.sigma_parallel_residual(g, p) == 0.0

    def test_catalog_sigma_parallel_and_para_hermitian(self, triples):
        for name, tr in triples.items():
            sig = pj.weighted_sigma_field(tr.g)
            for p in tr.sample_points(3):
                assert pj.sigma_parallel_residual(tr.g, p) < 1e-9, name
                assert pj.sigma_para_hermitian_residual(tr.t, sig, p) < 1e-10, name

    def test_mobility_solution_and_trivial_case(self, triples):
        for name, tr in triples.items():
            sig = pj.weighted_sigma_field(tr.g)
            sighat = pj.weighted_endo_sigma_field(tr.a, sig)
            for p in tr.sample_points(3):
                assert pj.mobility_residual(tr.g, tr.t, sig, p) < 1e-12, name
                assert pj.mobility_residual(tr.g, tr.t, sighat, p) < 1e-9, name

    def test_mobility_connection_invariance(self, triples):
        tr = triples["complex-liouville"]
        ghat = pj.companion_metric(tr.g, tr.a)
        sig = pj.weighted_sigma_field(tr.g)
        probe = pj.scale_weighted_field(ScalarField(lambda x1, *r: x1, "x1"), sig)
        for p in tr.sample_points(3):
            e1 = pj.mobility_expression(tr.g, tr.t, probe, p)
            e2 = pj.mobility_expression(ghat, tr.t, probe, p)
            scale = max(1.0, np.max(np.abs(e1)))
            assert np.max(np.abs(e1 - e2)) / scale < 1e-9
            assert np.max(np.abs(e1)) > 1e-3  # the probe is not a solution


class TestFamilyMetric:
    def test_endpoints(self, triples):
        tr = triples["real-liouville"]
        fam10 = pj.family_metric(tr.g, tr.a, 1.0, 0.0)
        fam01 = pj.family_metric(tr.g, tr.a, 0.0, 1.0)
        ghat = pj.companion_metric(tr.g, tr.a)
        mu2 = pj.mu_invariant_fields(tr.a)[1]
        for p in tr.sample_points(3):
            assert np.allclose(fam10.values(p), tr.g.values(p), atol=1e-12)
            assert mu2.value(p) > 0  # positive and signed roots coincide here
            assert np.allclose(fam01.values(p), ghat.values(p), atol=1e-11)

    def test_closed_form_two_parameter_family(self, einstein_preset):
        # frozen closed form of the Einstein two-parameter family
        tr = einstein_preset
        lam = 1.0
        for al, be in ((1.5, 0.25), (1.0, 1.0), (0.5, 0.75)):
            fam = pj.family_metric(tr.g, tr.a, al, be)
            for p in tr.sample_points(3):
                u, v = p[0] ** 2, p[1] ** 2
                bb = (al * lam * u - 6 * be) * (al * lam * v + 6 * be)
                expected = np.zeros((4, 4))
                expected[0, 0] = -6 * lam**2 / bb * (u + v) * u / (al * lam * u - 6 * be)
                expected[1, 1] = -6 * lam**2 / bb * (u + v) * v / (al * lam * v + 6 * be)
                expected[2, 2] = (
                    24 * lam**2 / bb**2
                    * (al * lam * u**2 - al * lam * u * v + al * lam * v**2
                       - 6 * be * u + 6 * be * v)
                )
                expected[2, 3] = expected[3, 2] = (
                    -144 * lam / bb**2 * (al * lam * u - al * lam * v - 6 * be)
                )
                expected[3, 3] = 864 * lam / bb**2 * al
                assert np.max(np.abs(fam.values(p) - expected)) < 1e-8

    def test_degenerate_combination_raises(self, triples):
        tr = triples["real-liouville"]  # rho = x1 in (2,3), sigma = x2 in (0.5,1.5)
        fam = pj.family_metric(tr.g, tr.a, -2.5, 1.0)  # alpha + beta*rho crosses 0
        with pytest.raises(DegenerateMetricError):
            fam.values([2.5, 1.0, 0.5, 0.5])


class TestSpectral:
    def test_block_eigenvalues(self):
        rows = np.zeros((4, 4))
        rows[0, 0], rows[1, 1] = 3.0, 5.0
        rows[2, 2], rows[2, 3], rows[3, 2] = 8.0, 15.0, -1.0
        a = const_field(rows.tolist())
        spec = pj.eigen_decompose(a, [0, 0, 0, 0])
        assert spec.kind == "real"
        assert spec.mu1 == pytest.approx(8.0)
        assert spec.mu2 == pytest.approx(15.0)
        assert spec.rho.real == pytest.approx(5.0)
        assert spec.sigma.real == pytest.approx(3.0)

    def test_scaled_identity_degenerate(self):
        spec = pj.eigen_decompose(scaled_identity(2.0), [0, 0, 0, 0])
        assert spec.kind == "degenerate"
        assert spec.rho == spec.sigma == pytest.approx(2.0)

    def test_complex_pair(self, triples):
        tr = triples["complex-liouville"]
        p = tr.sample_points(1)[0]
        spec = pj.eigen_decompose(tr.a, p)
        assert spec.kind == "complex"
        assert spec.rho.imag > 0
        assert spec.sigma == spec.rho.conjugate()

    def test_mu_polynomial(self, triples):
        rows = np.zeros((4, 4))
        rows[0, 0], rows[1, 1] = 3.0, 5.0
        rows[2, 2], rows[2, 3], rows[3, 2] = 8.0, 15.0, -1.0
        a = const_field(rows.tolist())
        assert pj.mu_polynomial(a, [0, 0, 0, 0], 0.0) == pytest.approx(15.0)
        assert pj.mu_polynomial(a, [0, 0, 0, 0], 3.0) == pytest.approx(0.0)
        tr = triples["real-liouville"]
        p = tr.sample_points(1)[0]
        spec = pj.eigen_decompose(tr.a, p)
        assert spec.mu1 == pytest.approx(spec.rho.real + spec.sigma.real, abs=1e-10)
        assert spec.mu2 == pytest.approx(spec.rho.real * spec.sigma.real, abs=1e-10)


class TestEigenGradients:
    def test_catalog(self, triples):
        for name, tr in triples.items():
            worst = max(
                pj.eigen_gradient_residual(tr, tr.a, p) for p in tr.sample_points(4)
            )
            assert worst < 1e-9, name

    def test_gradients_g_orthogonal_in_real_type(self, triples):
        for name in ("real-liouville", "dim-d2-2", "dim-d2-4"):
            tr = triples[name]
            f1, f2 = pj.eigenvalue_fields(tr.a, "real")
            for p in tr.sample_points(3):
                gm = tr.g.values(p)
                ginv = np.linalg.inv(gm)
                v1 = ginv @ f1.gradient_covector(p)
                v2 = ginv @ f2.gradient_covector(p)
                assert abs(v1 @ gm @ v2) < 1e-9, name

    def test_perturbation_detected(self, triples):
        tr = triples["real-liouville"]

        def bad(*coords):
            arr = tr.a.components(coords).copy()
            arr[0, 0] = arr[0, 0] + 0.2 * coords[1]  # breaks rho = rho(x1)
            return arr

        p = tr.sample_points(1)[0]
        assert pj.eigen_gradient_residual(tr, TensorField((1, 1), bad), p) > 1e-4


class TestKillingMachinery:
    def test_fields_vanish_for_constant_a(self, triples):
        tr = triples["real-liouville"]
        (v1, v2), (tv1, tv2) = pj.canonical_killing_fields(
            ParaKahlerTriple(tr.chart, tr.g, tr.t, a=scaled_identity(2.0)),
            scaled_identity(2.0),
        )
        p = tr.sample_points(1)[0]
        for x in (v1, v2, tv1, tv2):
            assert np.allclose(x.values(p), 0.0, atol=1e-13)

    def test_rotated_gradients_are_killing(self, triples):
        for name in ("real-liouville", "complex-liouville", "dim-d2-1", "dim-d1"):
            tr = triples[name]
            _, (tv1, tv2) = pj.canonical_killing_fields(tr, tr.a)
            for p in tr.sample_points(3):
                assert pj.killing_residual(tr.g, tv1, p) < 1e-9, name
                assert pj.killing_residual(tr.g, tv2, p) < 1e-9, name

    def test_hamiltonian_pairing(self, triples):
        tr = triples["real-liouville"]
        mu1, mu2 = pj.mu_invariant_fields(tr.a)
        _, (tv1, tv2) = pj.canonical_killing_fields(tr, tr.a)
        for p in tr.sample_points(3):
            assert pj.hamiltonian_pairing_residual(tr, mu1, tv1, p) < 1e-9
            assert pj.hamiltonian_pairing_residual(tr, mu2, tv2, p) < 1e-9

    def test_para_holomorphy_and_commutation(self, triples):
        tr = triples["complex-liouville"]
        (v1, v2), (tv1, tv2) = pj.canonical_killing_fields(tr, tr.a)
        for p in tr.sample_points(2):
            for x in (v1, v2, tv1, tv2):
                assert pj.para_holomorphy_residual(tr, x, p) < 1e-9
            assert pj.commutation_residual([v1, v2, tv1, tv2], p) < 1e-8

    def test_gradient_and_rotated_gradient_orthogonal(self, triples):
        tr = triples["real-liouville"]
        (v1, v2), (tv1, tv2) = pj.canonical_killing_fields(tr, tr.a)
        for p in tr.sample_points(3):
            gm = tr.g.values(p)
            for vi in (v1, v2):
                for tvj in (tv1, tv2):
                    assert abs(vi.values(p) @ gm @ tvj.values(p)) < 1e-9

    def test_leaf_restriction_rank4(self, triples):
        for name in ("real-liouville", "complex-liouville"):
            tr = triples[name]
            for p in tr.sample_points(3):
                assert pj.leaf_geodesic_residual(tr, tr.a, p) < 1e-8


class TestClassification:
    def test_classify_gradient_hand_vectors(self):
        gm = np.array(FLAT)
        tm = np.diag([1.0, 1.0, -1.0, -1.0])
        cls, _ = pj.classify_gradient(gm, tm, np.zeros(4), 1.0)
        assert cls == "zero"
        cls, _ = pj.classify_gradient(gm, tm, np.array([1.0, 0, 0, 0]), 1.0)
        assert cls == "null-plus"
        cls, _ = pj.classify_gradient(gm, tm, np.array([0, 0, 1.0, 0]), 1.0)
        assert cls == "null-minus"
        cls, _ = pj.classify_gradient(gm, tm, np.array([1.0, 0, 1.0, 0]), 1.0)
        assert cls == "non-isotropic"
        # isotropic g(v,v) = 0 but not a T eigenvector
        cls, flags = pj.classify_gradient(gm, tm, np.array([1.0, 1.0, 1.0, -1.0]), 1.0)
        assert cls == "indeterminate" and flags

    def test_rank_and_configuration_per_family(self, triples):
        for name, tr in triples.items():
            for p in tr.sample_points(4):
                rank, config, _ = pj.distribution_d_rank(tr, tr.a, p)
                assert rank == tr.meta["expected_rank"], name
                assert tuple(config) == tr.meta["expected_config"], name


class TestRicciDifference:
    def test_catalog_pairs(self, triples):
        for name, tr in triples.items():
            ghat = pj.companion_metric(tr.g, tr.a)
            for p in tr.sample_points(3):
                primary, cross = pj.ricci_difference_residual(tr.g, ghat, tr.t, tr.a, p)
                assert primary < 1e-8, name
                assert cross < 1e-8, name

    def test_holds_off_einstein_locus(self, triples):
        # the comparison identity is unconditional, not an Einstein statement
        tr = triples["dim-d2-1"]
        ghat = pj.companion_metric(tr.g, tr.a)
        p = tr.sample_points(1)[0]
        assert np.max(np.abs(ricci(tr.g, p))) > 1e-3  # generic instance, not Einstein
        primary, cross = pj.ricci_difference_residual(tr.g, ghat, tr.t, tr.a, p)
        assert primary < 1e-8 and cross < 1e-8


class TestFamilyConstant:
    def test_endpoints(self, companion_einstein_preset):
        tr = companion_einstein_preset
        lam, lam_hat = tr.meta["einstein"], tr.meta["companion_einstein"]
        pts = tr.sample_points(5)
        out = pj.einstein_family_constant(tr.g, tr.a, lam, lam_hat, 1.0, 0.0, pts)
        assert out["constant"] == pytest.approx(lam, abs=1e-10)
        out = pj.einstein_family_constant(tr.g, tr.a, lam, lam_hat, 0.0, 1.0, pts)
        assert out["constant"] == pytest.approx(lam_hat, abs=1e-8)
        assert out["spread"] < 1e-8
        assert out["ricci_residual"] < 1e-8

    def test_alpha_cubed_rule(self, einstein_preset):
        tr = einstein_preset
        pts = tr.sample_points(6)
        for al, be in ((2.0, 1.0), (1.5, 0.25), (0.5, 0.5)):
            out = pj.einstein_family_constant(tr.g, tr.a, 1.0, 0.0, al, be, pts)
            assert out["constant"] == pytest.approx(al**3, rel=1e-9)
            assert out["spread"] < 1e-8
            assert out["ricci_residual"] < 1e-8

    def test_einstein_precondition_enforced(self, triples):
        tr = triples["real-liouville"]  # generic, not Einstein
        with pytest.raises(pj.EinsteinPreconditionError):
            pj.einstein_family_constant(
                tr.g, tr.a, 1.0, 0.0, 1.0, 0.5, tr.sample_points(2)
            )
