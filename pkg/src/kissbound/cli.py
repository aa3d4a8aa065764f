"""Command-line surface for reproducible bound computations.

Commands:
    highdim   area-argument bound a(d), or 2/f_d(rho) at a given ratio
    optimize  sweep the inflation ratio, maximizing the cap density per rho
    certify   rigorous grid certification of the dimension-3 bound
    graph     contact-graph statistics and coverage audit of a packing file

Exit codes: 0 success or certified, 1 certification failed, 2 usage,
3 I/O or packing input error, 4 numeric-domain error.

Every artifact is accompanied by a JSON metadata sidecar (command line,
configuration echo, version, wall time, output checksum); metadata never
enters the artifact itself, so artifacts are byte-identical across runs.
The only environment variable consulted is KISSBOUND_THREADS for the
default worker count.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import sys
import time

from . import __version__
from .certifier import certify, emit_certificate
from .density import SearchConfig, default_workers, sweep_rho, sweep_to_csv
from .errors import DomainError, KissboundError, PackingError
from .highdim import a_of_d, k_bound_highdim
from .packings import audit_to_csv, contact_graph, coverage_audit, load_packing

EXIT_OK = 0
EXIT_CERT_FAILED = 1
EXIT_USAGE = 2
EXIT_IO = 3
EXIT_DOMAIN = 4


def _dimension_arg(text: str) -> int:
    try:
        value = int(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"dimension must be an integer, got {text!r}") from exc
    if not (3 <= value <= 64):
        raise argparse.ArgumentTypeError(f"dimension must lie in [3, 64], got {value}")
    return value


class _UsageError(Exception):
    pass

DEFAULTS = {
    "delta": 0.0005,
    "fp_slack": 1e-9,
    "grid_step": 0.05,
    "search_tol": 1e-10,
    "tolerance": 1e-9,
}


def _metadata(args: argparse.Namespace, started: float, outputs: dict[str, str]) -> dict:
    return {
        "command_line": sys.argv,
        "configuration": {
            key: value for key, value in sorted(vars(args).items()) if key != "func"
        },
        "version": __version__,
        "wall_time_s": round(time.time() - started, 3),
        "outputs": outputs,
    }


def _sha256(text: str) -> str:
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


def _write_sidecar(path: str, metadata: dict) -> None:
    with open(path + ".meta.json", "w", encoding="utf-8") as fh:
        json.dump(metadata, fh, indent=2)
        fh.write("\n")


def _round_up(value: float, decimals: int) -> float:
    factor = 10.0**decimals
    return math.ceil(value * factor) / factor


def cmd_highdim(args: argparse.Namespace) -> int:
    started = time.time()
    if args.rho is None:
        result = k_bound_highdim(args.d, math.sqrt(3.0))
        bound = a_of_d(args.d)
    else:
        result = k_bound_highdim(args.d, args.rho)
        bound = result.bound
    display = _round_up(bound, 3)
    if args.format == "csv":
        print("d,rho,f_d,bound")
        print(f"{result.d},{result.rho:.12g},{result.f_d:.12g},{bound:.12g}")
    else:
        label = f"a({args.d})" if args.rho is None else f"2/f_{args.d}({args.rho:g})"
        print(f"{label} = {bound:.9f}  (k_{args.d} < {display})")
    print(
        json.dumps(_metadata(args, started, {"stdout": _sha256(f"{bound:.17g}")})),
        file=sys.stderr,
    )
    return EXIT_OK


def cmd_optimize(args: argparse.Namespace) -> int:
    started = time.time()
    if not (1.0 < args.rho_lo <= args.rho_hi < 3.0):
        raise _UsageError(
            f"sweep interval must satisfy 1 < lo <= hi < 3, "
            f"got [{args.rho_lo:g}, {args.rho_hi:g}]"
        )
    if args.step <= 0.0:
        raise _UsageError(f"step must be positive, got {args.step:g}")
    cfg = SearchConfig(grid_step=args.grid_step, tol=args.tol)
    results = sweep_rho(
        args.rho_lo,
        args.rho_hi,
        args.step,
        cfg=cfg,
        prune_threshold=args.prune,
        workers=args.workers,
    )
    csv_text = sweep_to_csv(results, include_pruned=args.prune is not None)
    searched = [r for r in results if not r.pruned]
    best = min(searched, key=lambda r: (r.objective, r.rho)) if searched else None
    if args.format == "csv":
        sys.stdout.write(csv_text)
    else:
        sys.stdout.write(csv_text)
        if best is not None:
            print(
                f"# minimum objective {best.objective:.9f} at rho={best.rho:.6g} "
                f"(argmax caps: {best.argmax[0]:.9g} {best.argmax[1]:.9g} "
                f"{best.argmax[2]:.9g})"
            )
    print(
        json.dumps(_metadata(args, started, {"stdout": _sha256(csv_text)})),
        file=sys.stderr,
    )
    return EXIT_OK


def cmd_certify(args: argparse.Namespace) -> int:
    started = time.time()
    last = [0.0]

    def progress(done: int, total: int) -> None:
        now = time.time()
        if now - last[0] >= 10.0:
            last[0] = now
            print(
                f"# scanned {done}/{total} boxes ({100.0 * done / total:.1f}%)",
                file=sys.stderr,
            )

    cert = certify(
        rho=args.rho,
        delta=args.delta,
        target=args.target,
        fp_slack=args.fp_slack,
        workers=args.workers,
        checkpoint_path=args.checkpoint,
        on_progress=progress if args.progress else None,
    )
    text = emit_certificate(cert)
    with open(args.output, "w", encoding="utf-8") as fh:
        fh.write(text)
    _write_sidecar(args.output, _metadata(args, started, {args.output: _sha256(text)}))
    if args.format == "csv":
        print("passed,certified_bound,rho,delta,boxes_checked")
        print(
            f"{'true' if cert.passed else 'false'},{cert.certified_bound:.17g},"
            f"{cert.rho:.12g},{cert.delta:.12g},{cert.boxes_checked}"
        )
    elif cert.passed:
        print(
            f"CERTIFIED k3 < {cert.certified_bound:.17g} "
            f"(rho={cert.rho:g}, delta={cert.delta:g}, boxes={cert.boxes_checked})"
        )
    else:
        print(
            f"FAILED certified bound {cert.certified_bound:.17g} >= target "
            f"{cert.target:g} (rho={cert.rho:g}, delta={cert.delta:g}, "
            f"boxes={cert.boxes_checked})"
        )
    return EXIT_OK if cert.passed else EXIT_CERT_FAILED


def cmd_graph(args: argparse.Namespace) -> int:
    started = time.time()
    try:
        with open(args.input, encoding="utf-8") as fh:
            document = fh.read()
    except OSError as exc:
        print(f"error: cannot read {args.input}: {exc}", file=sys.stderr)
        return EXIT_IO
    packing = load_packing(document, tolerance=args.tolerance)
    graph = contact_graph(packing)
    outputs = {}
    if args.rho is not None:
        audit = coverage_audit(packing, args.rho)
        csv_text = audit_to_csv(audit)
        if args.format == "csv":
            sys.stdout.write(csv_text)
        else:
            print(f"balls: {graph.vertex_count}")
            print(f"edges: {len(graph.edges)}")
            print(f"average_degree: {graph.average_degree:.12g}")
            print(f"edge_sum: {audit.edge_sum:.12g}")
            print(f"edge_sum_floor: {audit.edge_sum_floor:.12g}")
            print(f"edge_sum_ok: {'true' if audit.edge_sum_ok else 'false'}")
            sys.stdout.write(csv_text)
        outputs["stdout"] = _sha256(csv_text)
    else:
        if args.format == "csv":
            text = "vertices,edges,average_degree\n" + (
                f"{graph.vertex_count},{len(graph.edges)},{graph.average_degree:.12g}\n"
            )
            sys.stdout.write(text)
        else:
            print(f"balls: {graph.vertex_count}")
            print(f"edges: {len(graph.edges)}")
            print(f"average_degree: {graph.average_degree:.12g}")
        outputs["stdout"] = _sha256(f"{graph.average_degree:.17g}")
    print(json.dumps(_metadata(args, started, outputs)), file=sys.stderr)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="kissbound",
        description="Certified upper bounds on average kissing numbers",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("highdim", help="area-argument bound a(d) or 2/f_d(rho)")
    p.add_argument("--d", type=_dimension_arg, required=True, help="dimension in [3, 64]")
    p.add_argument("--rho", type=float, default=None, help="inflation ratio in (1,3)")
    p.add_argument("--format", choices=("text", "csv"), default="text")
    p.set_defaults(func=cmd_highdim)

    p = sub.add_parser("optimize", help="sweep rho, maximizing cap density per rho")
    p.add_argument("--rho-lo", type=float, required=True)
    p.add_argument("--rho-hi", type=float, required=True)
    p.add_argument("--step", type=float, required=True)
    p.add_argument(
        "--grid-step",
        type=float,
        default=DEFAULTS["grid_step"],
        help="start-grid spacing of the multistart search",
    )
    p.add_argument("--tol", type=float, default=DEFAULTS["search_tol"])
    p.add_argument(
        "--prune",
        type=float,
        default=None,
        help="skip ratios whose equilateral lower bound reaches this value",
    )
    p.add_argument("--workers", type=int, default=default_workers())
    p.add_argument("--format", choices=("text", "csv"), default="text")
    p.set_defaults(func=cmd_optimize)

    p = sub.add_parser("certify", help="grid certification of the k3 bound")
    p.add_argument("--rho", type=float, required=True)
    p.add_argument("--delta", type=float, default=DEFAULTS["delta"])
    p.add_argument("--target", type=float, required=True)
    p.add_argument("--fp-slack", type=float, default=DEFAULTS["fp_slack"])
    p.add_argument("--workers", type=int, default=default_workers())
    p.add_argument("--checkpoint", default=None, help="checkpoint file for resuming")
    p.add_argument("--output", default="certificate.txt")
    p.add_argument("--progress", action="store_true")
    p.add_argument("--format", choices=("text", "csv"), default="text")
    p.set_defaults(func=cmd_certify)

    p = sub.add_parser("graph", help="contact graph statistics of a packing file")
    p.add_argument("input", help="packing document (JSON)")
    p.add_argument("--rho", type=float, default=None, help="run the coverage audit")
    p.add_argument("--tolerance", type=float, default=DEFAULTS["tolerance"])
    p.add_argument("--format", choices=("text", "csv"), default="text")
    p.set_defaults(func=cmd_graph)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except _UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except PackingError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except DomainError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except KissboundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN


if __name__ == "__main__":
    sys.exit(main())
