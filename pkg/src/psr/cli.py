"""Command line front end.

Subcommands: check, standard-form, domain, curvature, geodesic, deform,
homog, bounds, fixtures.  Structured results go to stdout, diagnostics to
stderr.  Exit codes: `check` reports the trichotomy (0 Interior, 1 Boundary,
2 Outside); 64 usage error, 65 malformed input, 3 computational error.
The default seed is 0, overridable by the PSR_SEED environment variable and
by --seed.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from . import __version__
from ._fmt import dumps, fmt_float
from .ambient import AmbientCubic, StandardCubic
from .curvature import curvature_report, geodesic
from .domain import ray_roots
from .errors import MalformedInput, PsrError
from .membership import classify
from .moduli import (
    curvature_bounds_estimate,
    deform,
    homogeneity_test,
    surface_fixture,
)
from .standard_form import standard_form_at

EXIT_USAGE = 64
EXIT_BAD_INPUT = 65
EXIT_COMPUTE = 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _default_seed() -> int:
    env = os.environ.get("PSR_SEED")
    if env is not None:
        try:
            return int(env)
        except ValueError:
            print(f"psr: ignoring non-integer PSR_SEED={env!r}", file=sys.stderr)
    return 0


def _read_doc(path: str | None, use_stdin: bool):
    if use_stdin or path in (None, "-"):
        text = sys.stdin.read()
    else:
        try:
            with open(path, "r", encoding="utf-8") as fh:
                text = fh.read()
        except OSError as exc:
            raise MalformedInput(f"cannot read {path}: {exc}") from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise MalformedInput(f"invalid JSON: {exc}") from exc


def _load_standard(doc) -> StandardCubic:
    """Accept either a P-coefficient document ("n") or an ambient cubic in
    standard form ("m")."""
    if isinstance(doc, dict) and "m" in doc:
        return StandardCubic.from_ambient(AmbientCubic.from_json_dict(doc))
    return StandardCubic.from_json_dict(doc)


def _parse_vector(text: str, n: int, name: str) -> np.ndarray:
    if os.path.exists(text):
        with open(text, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
        vec = np.asarray(doc, dtype=float).reshape(-1)
    else:
        try:
            vec = np.array([float(t) for t in text.replace(",", " ").split()])
        except ValueError as exc:
            raise MalformedInput(f"cannot parse {name} from {text!r}") from exc
    if vec.size != n:
        raise MalformedInput(f"{name} has dimension {vec.size}, expected {n}")
    return vec


def _add_input(sub, name="--input"):
    sub.add_argument(name, help="input JSON file ('-' for stdin)")
    sub.add_argument("--stdin", action="store_true", help="read the input from stdin")


def build_parser() -> _Parser:
    parser = _Parser(prog="psr", description=__doc__)
    parser.add_argument("--version", action="version", version=f"psr {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", help="closedness / boundary trichotomy")
    _add_input(p)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--starts", type=int, default=None)
    fmt = p.add_mutually_exclusive_group()
    fmt.add_argument("--json", action="store_true", default=True)
    fmt.add_argument("--csv", action="store_true")

    p = sub.add_parser("standard-form", help="reduce a hyperbolic cubic at a point")
    _add_input(p)
    p.add_argument("--point", required=True, help="base point (file or comma list)")

    p = sub.add_parser("domain", help="ray roots of the hyperplane section")
    _add_input(p)
    p.add_argument("--directions", type=int, default=64)
    p.add_argument("--seed", type=int, default=None)

    p = sub.add_parser("curvature", help="base-point curvature report")
    _add_input(p)
    p.add_argument("--at", default=None, help="section point (file or comma list)")
    p.add_argument("--plane", nargs=2, default=None, metavar=("V", "W"))
    p.add_argument("--tau", type=int, default=3)

    p = sub.add_parser("geodesic", help="integrate a geodesic of the section metric")
    _add_input(p)
    p.add_argument("--z0", required=True)
    p.add_argument("--v0", required=True)
    p.add_argument("--tmax", type=float, required=True)
    p.add_argument("--dt", type=float, default=1e-3)

    p = sub.add_parser("deform", help="segment between two closed instances")
    p.add_argument("--a", required=True, help="first endpoint JSON ('-' for stdin)")
    p.add_argument("--b", required=True, help="second endpoint JSON ('-' for stdin)")
    p.add_argument("--samples", type=int, default=101)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--csv", action="store_true")

    p = sub.add_parser("homog", help="homogeneity decision")
    _add_input(p)

    p = sub.add_parser("bounds", help="scalar curvature range estimate")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--budget", type=int, default=1000)
    p.add_argument("--seed", type=int, default=None)

    p = sub.add_parser("fixtures", help="classical surface fixtures")
    p.add_argument("--kind", required=True, choices=list("abcdef"))
    p.add_argument("--b", type=float, default=None, help="parameter for kind f")
    p.add_argument(
        "--full",
        action="store_true",
        help="emit ambient cubic and reducing matrix too (default: the P part)",
    )
    return parser


def _cmd_check(args) -> int:
    doc = _read_doc(args.input, args.stdin)
    std = _load_standard(doc)
    seed = args.seed if args.seed is not None else _default_seed()
    report = classify(std.p3, seed=seed, starts=args.starts)
    if args.csv:
        d = report.to_json_dict()
        print(
            "sphere_max,kkt_residual,is_closed_ccpsr,singular_at_infinity,"
            "regular_boundary,generating_set_position"
        )
        print(
            f"{fmt_float(d['sphere_max'])},{fmt_float(d['kkt_residual'])},"
            f"{int(d['is_closed_ccpsr'])},{int(d['singular_at_infinity'])},"
            f"{int(d['regular_boundary'])},{d['generating_set_position']}"
        )
    else:
        print(dumps(report.to_json_dict()))
    return {"Interior": 0, "Boundary": 1, "Outside": 2}[
        report.generating_set_position.value
    ]


def _cmd_standard_form(args) -> int:
    doc = _read_doc(args.input, args.stdin)
    h = AmbientCubic.from_json_dict(doc)
    p = _parse_vector(args.point, h.m, "point")
    result = standard_form_at(h, p)
    print(dumps(result.to_json_dict()))
    return 0


def _cmd_domain(args) -> int:
    doc = _read_doc(args.input, args.stdin)
    std = _load_standard(doc)
    seed = args.seed if args.seed is not None else _default_seed()
    rng = np.random.default_rng(seed)
    print("direction,c,t_pos,t_neg,alpha_at_boundary")
    for _ in range(args.directions):
        d = rng.standard_normal(std.n)
        norm = np.linalg.norm(d)
        if norm == 0.0:
            continue
        d /= norm
        roots = ray_roots(std.p3, d)
        boundary = roots.t_pos * d
        alpha_b = 3.0 - float(boundary @ boundary)
        dir_txt = ";".join(fmt_float(v) for v in d)
        print(
            f"{dir_txt},{fmt_float(roots.c)},{fmt_float(roots.t_pos)},"
            f"{fmt_float(roots.t_neg)},{fmt_float(alpha_b)}"
        )
    return 0


def _cmd_curvature(args) -> int:
    doc = _read_doc(args.input, args.stdin)
    std = _load_standard(doc)
    if args.at is not None:
        z = _parse_vector(args.at, std.n, "--at")
        from .standard_form import move_point

        std = move_point(std, z).standard
    report = curvature_report(std.p3, tau=args.tau)
    out = report.to_json_dict()
    if args.plane is not None:
        v = _parse_vector(args.plane[0], std.n, "plane v")
        w = _parse_vector(args.plane[1], std.n, "plane w")
        out["sectional"] = float(report.sectional(v, w))
    print(dumps(out))
    return 0


def _cmd_geodesic(args) -> int:
    doc = _read_doc(args.input, args.stdin)
    std = _load_standard(doc)
    z0 = _parse_vector(args.z0, std.n, "--z0")
    v0 = _parse_vector(args.v0, std.n, "--v0")
    path = geodesic(std, z0, v0, t_max=args.tmax, dt=args.dt)
    cols = ["t"]
    cols += [f"z{i+1}" for i in range(std.n)]
    cols += [f"v{i+1}" for i in range(std.n)]
    print(",".join(cols))
    for t, z, v in path.samples:
        row = [fmt_float(t)] + [fmt_float(x) for x in z] + [fmt_float(x) for x in v]
        print(",".join(row))
    print(
        f"# arc_length={fmt_float(path.arc_length)} exited={int(path.exited)} "
        f"min_beta={fmt_float(path.min_beta)} speed_drift={fmt_float(path.speed_drift)}",
        file=sys.stderr,
    )
    return 0


def _cmd_deform(args) -> int:
    a = _load_standard(_read_doc(args.a, False))
    b = _load_standard(_read_doc(args.b, False))
    seed = args.seed if args.seed is not None else _default_seed()
    curve = deform(a, b, args.samples, seed=seed)
    if args.csv:
        print("t,sphere_max,position")
        for t, _, report in curve.samples:
            print(
                f"{fmt_float(t)},{fmt_float(report.sphere_max.max_value)},"
                f"{report.generating_set_position.value}"
            )
    else:
        print(dumps(curve.to_json_dict()))
    return 0


def _cmd_homog(args) -> int:
    doc = _read_doc(args.input, args.stdin)
    std = _load_standard(doc)
    print(dumps(homogeneity_test(std.p3).to_json_dict()))
    return 0


def _cmd_bounds(args) -> int:
    seed = args.seed if args.seed is not None else _default_seed()
    est = curvature_bounds_estimate(args.n, args.budget, seed=seed)
    print(dumps(est.to_json_dict()))
    return 0


def _cmd_fixtures(args) -> int:
    fixture = surface_fixture(args.kind, args.b)
    if args.full:
        print(dumps(fixture.to_json_dict()))
    else:
        print(dumps(fixture.standard.to_json_dict()))
    return 0


_COMMANDS = {
    "check": _cmd_check,
    "standard-form": _cmd_standard_form,
    "domain": _cmd_domain,
    "curvature": _cmd_curvature,
    "geodesic": _cmd_geodesic,
    "deform": _cmd_deform,
    "homog": _cmd_homog,
    "bounds": _cmd_bounds,
    "fixtures": _cmd_fixtures,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    try:
        return _COMMANDS[args.command](args)
    except MalformedInput as exc:
        print(f"psr: bad input: {exc}", file=sys.stderr)
        return EXIT_BAD_INPUT
    except PsrError as exc:
        print(f"psr: {exc}", file=sys.stderr)
        return EXIT_COMPUTE
    except BrokenPipeError:
        return 0


if __name__ == "__main__":
    sys.exit(main())
