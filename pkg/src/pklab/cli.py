"""pk-lab: build catalog triples and run verification suites.

Examples:

    pk-lab run --family real-liouville --preset einstein-lambda1 --checks all --json out.json
    pk-lab run --family dim-d2-2 --checks flatness
    pk-lab run --family real-liouville --param "rho=x1^2" --param "sigma=2*x2" --checks parakahler,benenti
    pk-lab demo-einstein --json demo.json

Exit codes: 0 all checks passed, 1 at least one check failed,
2 configuration error, 3 constructor (feasibility) failure.
"""

from __future__ import annotations

import argparse
import sys
import time

import numpy as np

from . import catalog
from .catalog import FeasibilityError
from .curves import export_curve_csv, integrate_geodesic, t_planarity_residual
from .exprs import ExprError, compile_profile
from .fields import DegenerateMetricError
from .suites import CHECK_NAMES, demo_einstein, run_suite
from . import projective as pj

_EXPR_PARAMS: dict[str, dict[str, tuple[str, ...]]] = {
    "real-liouville": {"rho": ("x1",), "sigma": ("x2",)},
    "complex-liouville": {"re": ("x1", "x2"), "im": ("x1", "x2")},
    "dim-d2-1": {"rho": ("x2",), "mu": ("x2",), "nu": ("x3", "x4")},
    "dim-d2-2": {"rho": ("x3",), "sigma": ("x4",)},
    "dim-d2-2neg": {"rho": ("x3",), "sigma": ("x4",)},
    "dim-d2-4": {"rho": ("x3",), "sigma": ("x4",)},
    "dim-d1": {"rho": ("x3",), "f": ("x2", "phi"), "phi": ("x3", "x4")},
    "dim-d1neg": {"rho": ("x3",), "f": ("x2", "phi"), "phi": ("x3", "x4")},
}

_FLOAT_PARAMS: dict[str, tuple[str, ...]] = {
    "real-liouville": ("eps",),
    "complex-liouville": (),
    "dim-d2-1": ("c",),
    "dim-d2-2": (),
    "dim-d2-2neg": (),
    "dim-d2-4": ("k",),
    "dim-d1": ("c",),
    "dim-d1neg": ("c",),
}


class ConfigError(ValueError):
    pass


def _parse_box(text: str) -> tuple[tuple[float, float], ...]:
    parts = text.split(",")
    if len(parts) != 4:
        raise ConfigError(f"box needs 4 intervals 'lo:hi,...', got {text!r}")
    box = []
    for part in parts:
        try:
            lo, hi = (float(x) for x in part.split(":"))
        except ValueError:
            raise ConfigError(f"bad interval {part!r}") from None
        box.append((lo, hi))
    return tuple(box)


def _parse_kv(pairs: list[str], what: str) -> dict[str, str]:
    out = {}
    for item in pairs:
        if "=" not in item:
            raise ConfigError(f"{what} {item!r} is not NAME=VALUE")
        name, value = item.split("=", 1)
        out[name.strip()] = value.strip()
    return out


def _build_triple(args) -> tuple:
    """Returns (triple, config echo dict)."""
    family = args.family
    if family not in catalog.FAMILIES:
        raise ConfigError(
            f"unknown family {family!r}; known: {', '.join(sorted(catalog.FAMILIES))}"
        )
    config = {
        "family": family,
        "preset": args.preset or "",
        "params": {},
        "box": "",
        "checks": list(args.check_list),
        "points": args.points,
        "seed": args.seed,
        "tolerances": {k: float(v) for k, v in args.tol_map.items()},
    }
    if args.preset:
        if args.param or args.box:
            raise ConfigError("--preset cannot be combined with --param/--box")
        if args.preset not in catalog.PRESETS:
            raise ConfigError(
                f"unknown preset {args.preset!r}; known: {', '.join(sorted(catalog.PRESETS))}"
            )
        pfam, _ = catalog.PRESETS[args.preset]
        if pfam != family:
            raise ConfigError(f"preset {args.preset!r} belongs to family {pfam!r}")
        return catalog.preset_triple(args.preset), config

    params = _parse_kv(args.param, "--param")
    config["params"] = dict(sorted(params.items()))
    kwargs = {}
    expr_spec = _EXPR_PARAMS[family]
    float_spec = _FLOAT_PARAMS[family]
    for name, value in params.items():
        if name in expr_spec:
            try:
                kwargs[name] = compile_profile(value, expr_spec[name])
            except ExprError as e:
                raise ConfigError(f"param {name}: {e}") from None
        elif name in float_spec:
            try:
                kwargs[name] = float(value)
            except ValueError:
                raise ConfigError(f"param {name} must be a number") from None
        else:
            raise ConfigError(
                f"family {family!r} has no parameter {name!r} "
                f"(expressions: {', '.join(expr_spec)}; constants: {', '.join(float_spec) or 'none'})"
            )
    if "re" in kwargs:
        kwargs["re_part"] = kwargs.pop("re")
    if "im" in kwargs:
        kwargs["im_part"] = kwargs.pop("im")
    if "f" in kwargs:
        kwargs["f_profile"] = kwargs.pop("f")
    if "eps" in kwargs:
        kwargs["eps"] = int(kwargs["eps"])
    if args.box:
        kwargs["box"] = _parse_box(args.box)
        config["box"] = args.box
    return catalog.default_triple(family, **kwargs), config


def _cmd_run(args) -> int:
    if args.checks.strip() == "all":
        names = list(CHECK_NAMES)
    else:
        names = [c.strip() for c in args.checks.split(",") if c.strip()]
    args.check_list = names
    args.tol_map = _parse_kv(args.tol, "--tol")
    for name, val in args.tol_map.items():
        try:
            ok = float(val) > 0
        except ValueError:
            ok = False
        if not ok:
            raise ConfigError(f"tolerance override {name}={val} must be a positive number")

    triple, config = _build_triple(args)
    t0 = time.time()
    try:
        report = run_suite(
            triple,
            names,
            n_points=args.points,
            seed=args.seed,
            tolerances={k: float(v) for k, v in args.tol_map.items()},
        )
    except ValueError as e:
        raise ConfigError(str(e)) from None
    report.label = config["family"] + (f":{config['preset']}" if config["preset"] else "")
    report.config = config
    runtime = time.time() - t0

    if args.csv:
        _export_geodesic_csv(triple, args.csv, args.seed)
    print(report.format_human(runtime=runtime))
    if args.json:
        with open(args.json, "w") as fh:
            fh.write(report.to_json())
    return 0 if report.all_passed else 1


def _export_geodesic_csv(triple, path, seed: int) -> None:
    ghat = pj.companion_metric(triple.g, triple.a)
    rng = np.random.default_rng(seed + 11)
    lo = np.array([b[0] for b in triple.chart.box])
    hi = np.array([b[1] for b in triple.chart.box])
    p0 = lo + (hi - lo) * (0.4 + 0.2 * rng.uniform(size=4))
    v0 = rng.normal(size=4)
    v0 = 0.25 * v0 / np.linalg.norm(v0)
    curve = integrate_geodesic(ghat, p0, v0, 1e-3, 400, triple.chart)
    res = t_planarity_residual(triple.g, triple.t, curve)
    export_curve_csv(curve, path, residuals=res.residuals)


def _cmd_demo(args) -> int:
    t0 = time.time()
    report = demo_einstein(n_points=args.points, seed=args.seed)
    report.config = {"demo": "einstein-family", "points": args.points, "seed": args.seed}
    runtime = time.time() - t0
    print(report.format_human(runtime=runtime))
    if args.json:
        with open(args.json, "w") as fh:
            fh.write(report.to_json())
    return 0 if report.all_passed else 1


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="pk-lab",
        description="Numerical verification lab for para-Kahler surface triples "
        "and their projective equivalence identities.",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="build a catalog triple and run checks")
    run.add_argument("--family", required=True, help="normal-form family name")
    run.add_argument("--preset", default="", help="named parameter preset")
    run.add_argument("--param", action="append", default=[], metavar="NAME=EXPR",
                     help="profile expression or constant (repeatable)")
    run.add_argument("--box", default="", metavar="LO:HI,LO:HI,LO:HI,LO:HI",
                     help="coordinate box")
    run.add_argument("--checks", default="all",
                     help=f"comma list or 'all' ({', '.join(CHECK_NAMES)})")
    run.add_argument("--points", type=int, default=20, help="sample points per check")
    run.add_argument("--seed", type=int, default=0, help="sampling seed")
    run.add_argument("--tol", action="append", default=[], metavar="NAME=VAL",
                     help="tolerance override for a result name (repeatable)")
    run.add_argument("--json", default="", help="write the JSON report here")
    run.add_argument("--csv", default="", help="write one companion geodesic as CSV")
    run.set_defaults(fn=_cmd_run)

    demo = sub.add_parser("demo-einstein",
                          help="sweep the two-parameter Einstein family of the separable preset")
    demo.add_argument("--points", type=int, default=20)
    demo.add_argument("--seed", type=int, default=0)
    demo.add_argument("--json", default="")
    demo.set_defaults(fn=_cmd_demo)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        return args.fn(args)
    except ConfigError as e:
        print(f"config error: {e}", file=sys.stderr)
        return 2
    except FeasibilityError as e:
        print(f"constructor rejected: {e}", file=sys.stderr)
        return 3
    except DegenerateMetricError as e:
        print(f"degenerate metric: {e}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
