"""Command line interface.

Exit codes: 0 success/certified, 1 hypotheses not met, 2 degenerate or
ill-conditioned input, 3 I/O or format error.
"""
from __future__ import annotations

import argparse
import json
import sys

from .ballpoly import build, dual, is_standard, reduce_centers
from .errors import (
    BallRigidError,
    CodecompositionError,
    ConsistencyError,
    DegenerateConfigurationError,
    DegenerateSpanError,
    DualityError,
    EmptyInteriorError,
    HypothesesNotMetError,
    LatticeMismatchError,
    NotReducedError,
    TruncationError,
)
from .pipeline import (
    centers_from_dict,
    centers_to_dict,
    certify,
    compare,
    export_mesh,
    perturbation_probe,
    round15,
)

EXIT_OK = 0
EXIT_HYPOTHESES = 1
EXIT_DEGENERATE = 2
EXIT_IO = 3


class _Parser(argparse.ArgumentParser):
    """argparse exits with code 2 on bad usage; we reserve 2 for geometry."""

    def error(self, message):
        raise ValueError(message)


def _load_centers(path: str):
    with open(path, "r", encoding="utf-8") as fh:
        data = json.load(fh)
    return centers_from_dict(data)


def _write_text(path: str | None, text: str) -> None:
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)


def _verdict_exit(verdict: str) -> int:
    if verdict == "locally rigid certified":
        return EXIT_OK
    if verdict.startswith("degenerate") or verdict.startswith("ill-conditioned"):
        return EXIT_DEGENERATE
    return EXIT_HYPOTHESES


def _cmd_certify(args) -> int:
    cert = certify(_load_centers(args.input))
    _write_text(args.output, cert.to_json())
    if args.output is not None:
        print(cert.verdict)
    return _verdict_exit(cert.verdict)


def _cmd_compare(args) -> int:
    report = compare(_load_centers(args.a), _load_centers(args.b))
    print(json.dumps(report.to_dict(), sort_keys=True, indent=2))
    return EXIT_OK


def _cmd_angles(args) -> int:
    cs = reduce_centers(_load_centers(args.input))
    poly = build(cs)
    from .angles import inner_dihedral

    for e_id, e in enumerate(poly.edges):
        i, j = e.pair
        angle = round15(inner_dihedral(poly, e_id))
        print(f"{cs.labels[i]} {cs.labels[j]} {angle:.15g}")
    return EXIT_OK


def _cmd_dual(args) -> int:
    cs = reduce_centers(_load_centers(args.input))
    poly = build(cs)
    if not is_standard(poly):
        raise HypothesesNotMetError("dual requires a standard ball-polyhedron")
    d = dual(poly)
    _write_text(
        args.output,
        json.dumps(centers_to_dict(d.centers), sort_keys=True, indent=2) + "\n",
    )
    return EXIT_OK


def _cmd_export(args) -> int:
    text = export_mesh(_load_centers(args.input), what=args.what, depth=args.depth)
    _write_text(args.output, text)
    return EXIT_OK


def _cmd_probe(args) -> int:
    report = perturbation_probe(
        _load_centers(args.input),
        trials=args.trials,
        magnitude=args.magnitude,
        seed=args.seed,
    )
    print(json.dumps(report.to_dict(), sort_keys=True, indent=2))
    return EXIT_OK if report.all_congruent else EXIT_HYPOTHESES


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="ballrigid", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("certify", help="produce a local-rigidity certificate")
    p.add_argument("input")
    p.add_argument("-o", "--output", default=None)
    p.set_defaults(fn=_cmd_certify)

    p = sub.add_parser("compare", help="congruence comparison of two center sets")
    p.add_argument("a")
    p.add_argument("b")
    p.set_defaults(fn=_cmd_compare)

    p = sub.add_parser("angles", help="print the inner dihedral angles")
    p.add_argument("input")
    p.set_defaults(fn=_cmd_angles)

    p = sub.add_parser("dual", help="centers of the dual ball-polyhedron")
    p.add_argument("input")
    p.add_argument("-o", "--output", default=None)
    p.set_defaults(fn=_cmd_dual)

    p = sub.add_parser("export", help="write an OFF mesh")
    p.add_argument("input")
    p.add_argument("--what", choices=["q", "boundary", "p-mesh"], default="q")
    p.add_argument("--depth", type=int, default=3)
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(fn=_cmd_export)

    p = sub.add_parser("probe", help="perturbation experiment on a certified input")
    p.add_argument("input")
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--magnitude", type=float, default=1e-3)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(fn=_cmd_probe)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.fn(args)
    except (
        HypothesesNotMetError,
        LatticeMismatchError,
        DualityError,
        EmptyInteriorError,
        NotReducedError,
        TruncationError,
    ) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_HYPOTHESES
    except (
        DegenerateConfigurationError,
        ConsistencyError,
        DegenerateSpanError,
        CodecompositionError,
    ) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DEGENERATE
    except BallRigidError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DEGENERATE
    except (OSError, ValueError, KeyError, TypeError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


def main_entry() -> None:
    raise SystemExit(main())


if __name__ == "__main__":
    main_entry()
