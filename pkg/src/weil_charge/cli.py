"""Command-line interface.

Subcommands: generate, census, check, build-bundle, plot.  Reports are
canonical JSON written to -o (or stdout); human-readable summaries go to
stderr so stdout stays machine-parseable.

Exit codes: 0 success/pass, 1 identity failure or bundle obstruction,
2 usage or parameter error, 3 malformed or inconsistent input data.
"""

import argparse
import math
import sys

from . import documents
from .bundle import Obstruction, propagate_transition, verify_cocycle_relation
from .census import run_census
from .documents import DocumentError
from .errors import UnsupportedParameter, WeilChargeError
from .generators import KINDS, GeneratorSpec, generate
from .integrality import check_bordered, check_closed, check_corner_form
from .plotting import save_svg

EXIT_PASS = 0
EXIT_FAIL = 1
EXIT_USAGE = 2
EXIT_DATA = 3

_KIND_NAMES = {kind.replace("_", "-"): kind for kind in KINDS}


def _emit(doc, out_path):
    if out_path:
        documents.write_document(out_path, doc)
    else:
        sys.stdout.write(documents.canonical_dumps(doc))


def _note(msg):
    print(msg, file=sys.stderr)


def _load(path):
    try:
        return documents.load_instance(path)
    except (OSError, ValueError) as exc:
        raise DocumentError(str(exc)) from exc


def cmd_generate(args):
    try:
        spec = GeneratorSpec(
            kind=_KIND_NAMES[args.kind], n=args.n, k=args.k, scale=args.scale
        )
        instance = generate(spec)
    except UnsupportedParameter as exc:
        _note(f"{type(exc).__name__}: {exc}")
        return EXIT_USAGE
    documents.save_instance(args.output, instance)
    _note(f"wrote {args.kind} instance ({instance.mesh.num_faces} faces) to {args.output}")
    return EXIT_PASS


def cmd_census(args):
    instance = _load(args.input)
    if instance.section is None:
        raise DocumentError("instance has no section field")
    census = run_census(instance.mesh, instance.section, threads=args.threads)
    _emit(census.to_dict(), args.output)
    _note(f"total charge g = {census.total_charge} "
          f"({len(census.vortices)} vortices)")
    return EXIT_PASS


def _pick_identity(args, instance):
    if args.identity != "auto":
        return args.identity
    if instance.mesh.is_closed():
        return "closed"
    if instance.mesh.corner_vertices:
        return "corner"
    return "bordered"


def cmd_check(args):
    instance = _load(args.input)
    if instance.section is None or instance.twoform is None:
        raise DocumentError("check needs both a section and a two-form")
    identity = _pick_identity(args, instance)
    mesh, section, twoform = instance.mesh, instance.section, instance.twoform
    if identity == "closed":
        report = check_closed(mesh, twoform, section,
                              **({"tol": args.tol} if args.tol else {}))
    elif identity == "bordered":
        if mesh.is_closed():
            report = check_closed(mesh, twoform, section,
                                  **({"tol": args.tol} if args.tol else {}))
        else:
            if instance.connection is None:
                raise DocumentError("bordered check needs a connection field")
            report = check_bordered(mesh, twoform, section, instance.connection,
                                    **({"tol": args.tol} if args.tol else {}))
    else:
        report = check_corner_form(mesh, twoform, section, tol=args.tol)
    _emit(report.to_dict(), args.output)
    _note(f"flux/h = {report.total_flux / math.tau:.12g}")
    _note(f"{report.identity} identity: residual = {report.residual:.6g} "
          f"(tol {report.tolerance:.3g}) -> {'pass' if report.passed else 'FAIL'}")
    return EXIT_PASS if report.passed else EXIT_FAIL


def cmd_build_bundle(args):
    instance = _load(args.input)
    if instance.atlas is None:
        raise DocumentError("instance has no chart atlas")
    atlas = instance.atlas
    atlas.validate(instance.twoform)
    result = propagate_transition(atlas)
    if isinstance(result, Obstruction):
        _emit(result.to_dict(), args.output)
        _note(f"obstruction: loop defect / 2*pi = "
              f"{result.defect / math.tau:.12g} "
              f"(fractional part {result.fractional_part:.6g})")
        return EXIT_FAIL
    doc = result.to_dict()
    doc["cocycle_residual"] = verify_cocycle_relation(result, atlas)
    _emit(doc, args.output)
    _note(f"transition function winding = {result.winding}, "
          f"cocycle residual = {doc['cocycle_residual']:.3g}")
    return EXIT_PASS


def cmd_plot(args):
    instance = _load(args.input)
    report = None
    if args.report:
        report = documents.read_document(args.report)
        if not isinstance(report, dict):
            raise DocumentError("report document is not a JSON object")
        if "census" not in report and "vortices" in report:
            report = {"census": report, "boundary": []}
    save_svg(args.output, instance.mesh, report, size=args.size)
    _note(f"wrote {args.output}")
    return EXIT_PASS


def build_parser():
    parser = argparse.ArgumentParser(
        prog="weil-charge",
        description="Vortex census and quantization-identity checks on "
                    "triangulated surfaces.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="build a canonical test instance")
    p.add_argument("kind", choices=sorted(_KIND_NAMES))
    p.add_argument("--n", type=int, default=16, help="mesh resolution")
    p.add_argument("--k", type=int, default=1,
                   help="charge/winding (side count for polygon-tangent)")
    p.add_argument("--scale", type=float, default=1.0,
                   help="two-form scale factor (non-1 breaks integrality)")
    p.add_argument("-o", "--output", required=True, help="instance JSON path")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("census", help="count section vortices")
    p.add_argument("input", help="instance JSON path")
    p.add_argument("-o", "--output", help="report JSON path (default stdout)")
    p.add_argument("--threads", type=int, default=None,
                   help="census worker threads (default WEIL_CHARGE_THREADS)")
    p.set_defaults(func=cmd_census)

    p = sub.add_parser("check", help="evaluate a quantization identity")
    p.add_argument("input", help="instance JSON path")
    p.add_argument("--identity", default="auto",
                   choices=("auto", "closed", "bordered", "corner"))
    p.add_argument("--tol", type=float, default=None,
                   help="identity tolerance override")
    p.add_argument("-o", "--output", help="report JSON path (default stdout)")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("build-bundle",
                       help="construct the transition function of a two-chart atlas")
    p.add_argument("input", help="instance JSON path (must contain an atlas)")
    p.add_argument("-o", "--output", help="document path (default stdout)")
    p.set_defaults(func=cmd_build_bundle)

    p = sub.add_parser("plot", help="render a static SVG overlay")
    p.add_argument("input", help="instance JSON path")
    p.add_argument("--report", help="census/check report JSON to overlay")
    p.add_argument("--size", type=int, default=640, help="SVG size in pixels")
    p.add_argument("-o", "--output", required=True, help="SVG path")
    p.set_defaults(func=cmd_plot)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UnsupportedParameter as exc:
        _note(f"{type(exc).__name__}: {exc}")
        return EXIT_USAGE
    except (DocumentError, WeilChargeError) as exc:
        _note(f"{type(exc).__name__}: {exc}")
        return EXIT_DATA
    except FileNotFoundError as exc:
        _note(f"file not found: {exc.filename}")
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
