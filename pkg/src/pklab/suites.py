"""Named verification suites bridging the geometry to the CLI and tests.

Each suite takes a constructed triple and produces CheckResult entries;
``run_suite`` dispatches on the check names exposed by the command-line
runner.  All residuals are evaluated on the chart's deterministic sample
set, so a (config, seed) pair fully determines the report.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Sequence

import numpy as np

from . import projective as pj
from .curvature import covariant_derivative_endo, einstein_residual, riemann
from .curves import (
    integrate_geodesic_bundle,
    kinetic_energy,
    t_planarity_residual,
)
from .fields import ScalarField, TensorField, objarray
from .parakahler import ParaKahlerTriple, null_coordinate_check, validate
from .report import CheckResult, VerificationReport

__all__ = ["CHECK_NAMES", "run_suite", "demo_einstein"]

CHECK_NAMES = (
    "parakahler",
    "benenti",
    "killing",
    "rank",
    "companion",
    "ricci-diff",
    "einstein",
    "family-einstein",
    "flatness",
    "geodesic",
)

_DEFAULT_TOL = {
    "benenti/equation": 1e-9,
    "benenti/hamiltonian-form": 1e-9,
    "benenti/eigen-gradient": 1e-9,
    "benenti/g-symmetric": 1e-10,
    "benenti/commutes-with-t": 1e-10,
    "benenti/det-positive": 0.5,
    "benenti/adapted-block": 1e-10,
    "benenti/non-parallel": 0.5,
    "killing/rotated-gradients": 1e-9,
    "killing/hamiltonian-pairing": 1e-9,
    "killing/para-holomorphic": 1e-9,
    "killing/brackets": 1e-8,
    "killing/leaf-geodesic": 1e-8,
    "rank/dimension": 0.5,
    "rank/configuration": 0.5,
    "companion/connection-difference": 1e-9,
    "companion/potential-duality": 1e-9,
    "companion/potential-exponential": 1e-10,
    "companion/pair-roundtrip": 1e-10,
    "companion/symmetric": 1e-10,
    "companion/para-hermitian": 1e-10,
    "companion/mobility-solution": 1e-9,
    "companion/mobility-invariance": 1e-9,
    "companion/sigma-parallel": 1e-9,
    "ricci-diff/identity": 1e-8,
    "ricci-diff/gradient-form": 1e-8,
    "einstein/metric": 1e-8,
    "einstein/companion": 1e-8,
    "family-einstein/spread": 1e-8,
    "family-einstein/ricci": 1e-8,
    "family-einstein/prediction": 1e-8,
    "flatness/riemann": 1e-9,
    "geodesic/energy-drift": 1e-8,
    "geodesic/planarity": 1e-6,
    "geodesic/negative-control": 0.5,
}


def _flat_metric() -> TensorField:
    rows = [
        [0.0, 0.0, 1.0, 0.0],
        [0.0, 0.0, 0.0, 1.0],
        [1.0, 0.0, 0.0, 0.0],
        [0.0, 1.0, 0.0, 0.0],
    ]
    return TensorField((0, 2), lambda *c: objarray(rows), name="flat")


def _tol(overrides: dict, name: str) -> float:
    return float(overrides.get(name, _DEFAULT_TOL[name]))


def _suite_parakahler(triple, pts, tol):
    rep = validate(triple, n_points=len(pts), seed=0, tolerances=None)
    out = []
    for c in rep.checks:
        name = f"parakahler/{c.name}"
        out.append(
            CheckResult(
                name=name,
                residual=c.residual,
                tolerance=float(tol.get(name, c.tolerance)),
                points=c.points,
                identity=c.identity,
                flags=c.flags,
            )
        )
    return out


def _suite_benenti(triple, pts, tol):
    a = triple.a
    g, t = triple.g, triple.t
    ben = max(pj.benenti_residual(triple, a, p) for p in pts)
    ham = max(pj.hamiltonian_form_residual(triple, a, p) for p in pts)
    eig = max(pj.eigen_gradient_residual(triple, a, p) for p in pts)
    gsym = det_bad = comm = 0.0
    nonpar = 0.0
    for p in pts:
        gm = g.values(p)
        am = a.values(p)
        tm = t.values(p)
        ga = gm @ am
        gsym = max(gsym, float(np.max(np.abs(ga - ga.T))) / max(1.0, np.max(np.abs(ga))))
        comm = max(comm, float(np.max(np.abs(am @ tm - tm @ am))) / max(1.0, np.max(np.abs(am))))
        if np.linalg.det(am) <= 0:
            det_bad = 1.0
        nonpar = max(nonpar, float(np.max(np.abs(covariant_derivative_endo(g, a, p)))))
    out = [
        CheckResult("benenti/equation", ben, _tol(tol, "benenti/equation"), len(pts),
                    "nabla_X A = g(X,.)Lam + g(Lam,.)X - g(TX,.)TLam - g(TLam,.)TX"),
        CheckResult("benenti/hamiltonian-form", ham, _tol(tol, "benenti/hamiltonian-form"), len(pts),
                    "2 nabla_X phi = d(tr_w phi) ^ (TX)b - T d(tr_w phi) ^ Xb, phi = g(AT.,.)"),
        CheckResult("benenti/eigen-gradient", eig, _tol(tol, "benenti/eigen-gradient"), len(pts),
                    "A grad(eigenvalue) = eigenvalue * grad(eigenvalue)"),
        CheckResult("benenti/g-symmetric", gsym, _tol(tol, "benenti/g-symmetric"), len(pts),
                    "g(A.,.) = g(.,A.)"),
        CheckResult("benenti/commutes-with-t", comm, _tol(tol, "benenti/commutes-with-t"), len(pts),
                    "[A, T] = 0"),
        CheckResult("benenti/det-positive", det_bad, _tol(tol, "benenti/det-positive"), len(pts),
                    "det A > 0"),
        CheckResult("benenti/non-parallel", 0.0 if nonpar > 1e-3 else 1.0,
                    _tol(tol, "benenti/non-parallel"), len(pts),
                    "nabla A does not vanish identically"),
    ]
    if triple.meta.get("adapted") and null_coordinate_check(triple, len(pts)):
        block = 0.0
        for p in pts:
            am = a.values(p)
            off = max(float(np.max(np.abs(am[:2, 2:]))), float(np.max(np.abs(am[2:, :2]))))
            tr_mismatch = abs(np.trace(am[:2, :2]) - np.trace(am[2:, 2:]))
            det_mismatch = abs(np.linalg.det(am[:2, :2]) - np.linalg.det(am[2:, 2:]))
            block = max(block, (off + tr_mismatch + det_mismatch) / max(1.0, np.max(np.abs(am))))
        out.append(
            CheckResult("benenti/adapted-block", block, _tol(tol, "benenti/adapted-block"),
                        len(pts), "block-diagonal in adapted coordinates, equal block trace/determinant")
        )
    return out


def _suite_killing(triple, pts, tol):
    a = triple.a
    (v1, v2), (tv1, tv2) = pj.canonical_killing_fields(triple, a)
    mu1, mu2 = pj.mu_invariant_fields(a)
    kill = pair = holo = brack = 0.0
    for p in pts:
        kill = max(kill, pj.killing_residual(triple.g, tv1, p))
        kill = max(kill, pj.killing_residual(triple.g, tv2, p))
        pair = max(pair, pj.hamiltonian_pairing_residual(triple, mu1, tv1, p))
        pair = max(pair, pj.hamiltonian_pairing_residual(triple, mu2, tv2, p))
        for x in (v1, v2, tv1, tv2):
            holo = max(holo, pj.para_holomorphy_residual(triple, x, p))
        brack = max(brack, pj.commutation_residual([v1, v2, tv1, tv2], p))
    out = [
        CheckResult("killing/rotated-gradients", kill, _tol(tol, "killing/rotated-gradients"),
                    len(pts), "L_{T grad mu_i} g = 0"),
        CheckResult("killing/hamiltonian-pairing", pair, _tol(tol, "killing/hamiltonian-pairing"),
                    len(pts), "omega(T grad mu_i, .) = d mu_i"),
        CheckResult("killing/para-holomorphic", holo, _tol(tol, "killing/para-holomorphic"),
                    len(pts), "L_X T = 0 for X in {V_i, T V_i}"),
        CheckResult("killing/brackets", brack, _tol(tol, "killing/brackets"), len(pts),
                    "pairwise Lie brackets of {V1, V2, TV1, TV2} vanish"),
    ]
    if triple.meta.get("expected_rank") == 4:
        leaf = max(pj.leaf_geodesic_residual(triple, a, p) for p in pts)
        out.append(
            CheckResult("killing/leaf-geodesic", leaf, _tol(tol, "killing/leaf-geodesic"),
                        len(pts), "g(nabla_{V_i} V_j, T V_h) = 0 (totally geodesic leaves)")
        )
    return out


def _suite_rank(triple, pts, tol):
    expected_rank = triple.meta.get("expected_rank")
    expected_config = tuple(triple.meta.get("expected_config", ()))
    rank_bad = config_bad = 0.0
    flags: set[str] = set()
    for p in pts:
        rank, config, fl = pj.distribution_d_rank(triple, triple.a, p)
        flags.update(fl)
        if expected_rank is not None and rank != expected_rank:
            rank_bad = 1.0
        if expected_config and tuple(config) != expected_config:
            config_bad = 1.0
    return [
        CheckResult("rank/dimension", rank_bad, _tol(tol, "rank/dimension"), len(pts),
                    f"rank of the invariant-gradient distribution = {expected_rank}",
                    flags=sorted(flags)),
        CheckResult("rank/configuration", config_bad, _tol(tol, "rank/configuration"),
                    len(pts), f"gradient configuration = {expected_config}"),
    ]


def _suite_companion(triple, pts, tol):
    g, t, a = triple.g, triple.t, triple.a
    ghat = pj.companion_metric(g, a)
    conn = dual = 0.0
    rt = sym = pherm = 0.0
    exp_res = 0.0
    has_adapted = bool(triple.meta.get("adapted"))
    sig = pj.weighted_sigma_field(g)
    sighat = pj.weighted_endo_sigma_field(a, sig)
    probe = pj.scale_weighted_field(ScalarField(lambda x1, x2, x3, x4: x1, "x1"), sig)
    mob = par = inv = 0.0
    mu1f, mu2f = pj.mu_invariant_fields(a)
    for p in pts:
        conn = max(conn, pj.connection_difference_residual(g, ghat, t, p, a=a))
        psi_val, psi = pj.psi_potential(a, p)
        lam = pj.lambda_vector(g, a, p)
        gm = g.values(p)
        ainv = np.linalg.inv(a.values(p))
        # Psi(e_k) = -g(Lam, A^{-1} e_k) = -(g A^{-1} Lam)_k since g A^{-1} is symmetric
        dual = max(
            dual,
            float(np.max(np.abs(psi + gm @ ainv @ lam))) / max(1.0, float(np.max(np.abs(psi)))),
        )
        if has_adapted:
            mu2 = mu2f.value(p)
            if mu2 > 0:
                exp_res = max(exp_res, abs(mu2 - np.exp(-2.0 * psi_val)) / max(1.0, mu2))
        rt = max(rt, float(np.max(np.abs(pj.a_from_pair(g, ghat, p) - a.values(p))))
                 / max(1.0, float(np.max(np.abs(a.values(p))))))
        hm = ghat.values(p)
        sym = max(sym, float(np.max(np.abs(hm - hm.T))) / max(1.0, np.max(np.abs(hm))))
        tm = t.values(p)
        pherm = max(pherm, float(np.max(np.abs(tm.T @ hm @ tm + hm))) / max(1.0, np.max(np.abs(hm))))
        mob = max(mob, pj.mobility_residual(g, t, sighat, p))
        par = max(par, pj.sigma_parallel_residual(g, p))
        e1 = pj.mobility_expression(g, t, probe, p)
        e2 = pj.mobility_expression(ghat, t, probe, p)
        inv = max(inv, float(np.max(np.abs(e1 - e2))) / max(1.0, float(np.max(np.abs(e1)))))
    out = [
        CheckResult("companion/connection-difference", conn,
                    _tol(tol, "companion/connection-difference"), len(pts),
                    "Gammahat - Gamma = Psi-shift with Psi = d(-1/4 log det A)"),
        CheckResult("companion/potential-duality", dual,
                    _tol(tol, "companion/potential-duality"), len(pts),
                    "Psi(X) = -g(Lam, A^{-1} X)"),
        CheckResult("companion/pair-roundtrip", rt, _tol(tol, "companion/pair-roundtrip"),
                    len(pts), "A recovered from the pair (g, companion)"),
        CheckResult("companion/symmetric", sym, _tol(tol, "companion/symmetric"), len(pts),
                    "companion metric is symmetric"),
        CheckResult("companion/para-hermitian", pherm, _tol(tol, "companion/para-hermitian"),
                    len(pts), "companion metric is para-Hermitian for T"),
        CheckResult("companion/mobility-solution", mob,
                    _tol(tol, "companion/mobility-solution"), len(pts),
                    "A.sigma solves the projectively invariant first-order system"),
        CheckResult("companion/sigma-parallel", par, _tol(tol, "companion/sigma-parallel"),
                    len(pts), "weighted sigma(g) is parallel"),
        CheckResult("companion/mobility-invariance", inv,
                    _tol(tol, "companion/mobility-invariance"), len(pts),
                    "invariant system agrees under both Levi-Civita connections"),
    ]
    if has_adapted:
        out.append(
            CheckResult("companion/potential-exponential", exp_res,
                        _tol(tol, "companion/potential-exponential"), len(pts),
                        "half-block determinant equals exp(-2 psi) in adapted coordinates")
        )
    return out


def _suite_ricci_diff(triple, pts, tol):
    ghat = pj.companion_metric(triple.g, triple.a)
    prim = cross = 0.0
    for p in pts:
        a, b = pj.ricci_difference_residual(triple.g, ghat, triple.t, triple.a, p)
        prim, cross = max(prim, a), max(cross, b)
    return [
        CheckResult("ricci-diff/identity", prim, _tol(tol, "ricci-diff/identity"), len(pts),
                    "Ric(ghat) - Ric(g) = -2(n+1)(nabla Psi - Psi x Psi - (Psi o T) x (Psi o T))"),
        CheckResult("ricci-diff/gradient-form", cross, _tol(tol, "ricci-diff/gradient-form"),
                    len(pts), "same difference expressed through nabla Lam and A^{-1}"),
    ]


def _suite_einstein(triple, pts, tol):
    lam = triple.meta.get("einstein")
    if lam is None:
        return [CheckResult("einstein/metric", 0.0, _tol(tol, "einstein/metric"), 0,
                            "Ric(g) = lam g (not checked: no Einstein constant declared)",
                            flags=["no-einstein-constant-declared"])]
    res = 0.0
    for p in pts:
        gm = triple.g.values(p)
        res = max(res, float(np.max(np.abs(einstein_residual(triple.g, lam, p))))
                  / max(1.0, float(np.max(np.abs(gm)))))
    out = [CheckResult("einstein/metric", res, _tol(tol, "einstein/metric"), len(pts),
                       f"Ric(g) = {lam} g")]
    lam_hat = triple.meta.get("companion_einstein")
    if lam_hat is not None:
        ghat = pj.companion_metric(triple.g, triple.a)
        res_h = 0.0
        for p in pts:
            hm = ghat.values(p)
            res_h = max(res_h, float(np.max(np.abs(einstein_residual(ghat, lam_hat, p))))
                        / max(1.0, float(np.max(np.abs(hm)))))
        out.append(CheckResult("einstein/companion", res_h, _tol(tol, "einstein/companion"),
                               len(pts), f"Ric(companion) = {lam_hat} companion"))
    return out


def _suite_family_einstein(triple, pts, tol):
    lam = triple.meta.get("einstein")
    lam_hat = triple.meta.get("companion_einstein")
    if lam is None or lam_hat is None:
        return [CheckResult("family-einstein/spread", 0.0,
                            _tol(tol, "family-einstein/spread"), 0,
                            "family Einstein constants (not checked: constants not declared)",
                            flags=["no-einstein-constants-declared"])]
    rule = triple.meta.get("family_constant_rule")
    grid_a = (0.0, 0.5, 1.0, 1.5, 2.0)
    grid_b = (0.0, 0.25, 0.5, 0.75, 1.0)
    spread = ric = pred = 0.0
    flags: set[str] = set()
    for al in grid_a:
        for be in grid_b:
            if al == 0.0 and be == 0.0:
                flags.add("skipped-origin")
                continue
            out = pj.einstein_family_constant(
                triple.g, triple.a, lam, lam_hat, al, be, pts, check_inputs=False
            )
            if not out["points"]:
                flags.add(f"grid-point-({al},{be})-degenerate")
                continue
            flags.update(out["flags"])
            spread = max(spread, out["spread"])
            ric = max(ric, out["ricci_residual"])
            if rule == "lam*alpha^3":
                target = lam * al**3
                pred = max(pred, abs(out["constant"] - target) / max(1.0, abs(target)))
    results = [
        CheckResult("family-einstein/spread", spread, _tol(tol, "family-einstein/spread"),
                    len(pts), "family Einstein constant is point-independent",
                    flags=sorted(flags)),
        CheckResult("family-einstein/ricci", ric, _tol(tol, "family-einstein/ricci"),
                    len(pts), "each family member satisfies Ric = constant * metric"),
    ]
    if rule == "lam*alpha^3":
        results.append(
            CheckResult("family-einstein/prediction", pred,
                        _tol(tol, "family-einstein/prediction"), len(pts),
                        "family constant equals lam * alpha^3 for this instance")
        )
    return results


def _suite_flatness(triple, pts, tol):
    if not triple.meta.get("flat"):
        return [CheckResult("flatness/riemann", 0.0, _tol(tol, "flatness/riemann"), 0,
                            "curvature tensor vanishes (not checked: instance not declared flat)",
                            flags=["not-declared-flat"])]
    res = max(float(np.max(np.abs(riemann(triple.g, p)))) for p in pts)
    return [CheckResult("flatness/riemann", res, _tol(tol, "flatness/riemann"), len(pts),
                        "curvature tensor vanishes")]


def _suite_geodesic(triple, pts, tol, seed: int = 0, n_steps: int = 400):
    g, t = triple.g, triple.t
    ghat = pj.companion_metric(g, triple.a)
    rng = np.random.default_rng(seed + 11)
    m = 3
    lo = np.array([b[0] for b in triple.chart.box])
    hi = np.array([b[1] for b in triple.chart.box])
    p0 = lo + (hi - lo) * (0.4 + 0.2 * rng.uniform(size=(m, 4)))
    v0 = rng.normal(size=(m, 4))
    v0 = 0.25 * v0 / np.linalg.norm(v0, axis=1, keepdims=True)
    h = 1e-3
    paths = integrate_geodesic_bundle(ghat, p0, v0, h, n_steps, triple.chart)
    drift = 0.0
    plan = 0.0
    for path in paths:
        en = kinetic_energy(ghat, path)
        drift = max(drift, float(np.max(np.abs(en - en[0]))) / max(1.0, abs(en[0])))
        plan = max(plan, t_planarity_residual(g, t, path).max_residual)
    flat_paths = integrate_geodesic_bundle(_flat_metric(), p0, v0, h, n_steps, triple.chart)
    neg = min(t_planarity_residual(g, t, fp).max_residual for fp in flat_paths)
    return [
        CheckResult("geodesic/energy-drift", drift, _tol(tol, "geodesic/energy-drift"),
                    len(paths), "g(velocity, velocity) conserved along geodesics"),
        CheckResult("geodesic/planarity", plan, _tol(tol, "geodesic/planarity"), len(paths),
                    "companion geodesics are T-planar for (g, T)"),
        CheckResult("geodesic/negative-control", 0.0 if neg > 1e-3 else 1.0,
                    _tol(tol, "geodesic/negative-control"), len(flat_paths),
                    "straight lines of an unrelated flat metric are not T-planar"),
    ]


_SUITES: dict[str, Callable] = {
    "parakahler": _suite_parakahler,
    "benenti": _suite_benenti,
    "killing": _suite_killing,
    "rank": _suite_rank,
    "companion": _suite_companion,
    "ricci-diff": _suite_ricci_diff,
    "einstein": _suite_einstein,
    "family-einstein": _suite_family_einstein,
    "flatness": _suite_flatness,
    "geodesic": _suite_geodesic,
}


def run_suite(
    triple: ParaKahlerTriple,
    checks: Sequence[str],
    n_points: int = 20,
    seed: int = 0,
    tolerances: dict[str, float] | None = None,
) -> VerificationReport:
    """Execute the named checks on a triple and assemble a report.

    Unknown check names raise ValueError; PKLAB_THREADS > 1 runs the
    checks in a thread pool (the report is order-deterministic either way).
    """
    tolerances = dict(tolerances or {})
    for name in checks:
        if name not in _SUITES:
            raise ValueError(f"unknown check {name!r}; known: {', '.join(CHECK_NAMES)}")
    for name, val in tolerances.items():
        if val <= 0:
            raise ValueError(f"tolerance override {name}={val} must be positive")
    pts = triple.sample_points(n_points, seed=seed)

    def run_one(name: str):
        if name == "geodesic":
            return _SUITES[name](triple, pts, tolerances, seed=seed)
        return _SUITES[name](triple, pts, tolerances)

    n_threads = int(os.environ.get("PKLAB_THREADS", "1") or "1")
    results: list[CheckResult] = []
    if n_threads > 1:
        with ThreadPoolExecutor(max_workers=n_threads) as pool:
            for chunk in pool.map(run_one, checks):
                results.extend(chunk)
    else:
        for name in checks:
            results.extend(run_one(name))
    report = VerificationReport(label=triple.meta.get("family", ""))
    report.checks = sorted(results, key=lambda c: c.name)
    return report


def demo_einstein(n_points: int = 20, seed: int = 0) -> VerificationReport:
    """Sweep the two-parameter Einstein family of the separable preset.

    Builds the unit-constant separable instance (Ricci-flat companion),
    sweeps a 5 x 5 grid of family weights and compares the measured
    Einstein constant against lam * alpha^3; degenerate grid points are
    skipped with a flag.
    """
    from .catalog import preset_triple

    triple = preset_triple("einstein-lambda1")
    pts = triple.sample_points(n_points, seed=seed)
    lam = triple.meta["einstein"]
    lam_hat = triple.meta["companion_einstein"]
    report = VerificationReport(label="einstein-family-demo")
    grid_a = (0.0, 0.5, 1.0, 1.5, 2.0)
    grid_b = (0.0, 0.25, 0.5, 0.75, 1.0)
    for al in grid_a:
        for be in grid_b:
            name = f"family-einstein/alpha={al}-beta={be}"
            if al == 0.0 and be == 0.0:
                report.add(CheckResult(name, 0.0, 1.0, 0, "origin is degenerate",
                                       flags=["skipped-origin"]))
                continue
            out = pj.einstein_family_constant(
                triple.g, triple.a, lam, lam_hat, al, be, pts, check_inputs=False
            )
            if not out["points"]:
                report.add(CheckResult(name, 0.0, 1.0, 0, "degenerate on the whole box",
                                       flags=sorted(set(out["flags"]) | {"skipped"})))
                continue
            target = lam * al**3
            resid = max(
                abs(out["constant"] - target) / max(1.0, abs(target)),
                out["spread"],
                out["ricci_residual"],
            )
            report.add(
                CheckResult(name, resid, 1e-8, out["points"],
                            f"Einstein constant {out['constant']:.12g} vs lam*alpha^3 = {target}",
                            flags=sorted(out["flags"])),
            )
    return report
