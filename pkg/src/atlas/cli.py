"""Command line entry point.

Usage: atlas [--config FILE] [--format json|text|dot] COMMAND ...

Commands: classify, orbit, links, normalize, split, divisor, rr.
Exit status is 0 on success, 2 for malformed input, 3 when the input lies
outside the implemented universe and 4 when a queried maximality verdict is Open.
"""

from __future__ import annotations

import argparse
import json
import os
import re
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from . import __version__
from .bundle_data import TransitionData, extract_invariants, normalize
from .classifier import aut_descriptor, bir_maximality, classify, stiffness
from .divisor_class import ClassGroup, Divisor, miller_reduce, rr_basis
from .errors import AtlasError, OutOfFamily, OutOfUniverse
from .field_tower import CurveSpec, FunctionFieldElement
from .link_engine import (Boundary, available_links, canonical, describe, descriptor_from_json, descriptor_to_json,
                          enumerate_orbit, from_normal_form, set_default_group, tag_to_json)
from .splitting_type import LaurentMatrix, birkhoff_split

SCHEMA_VERSION = "1.0"
DEFAULT_SEED = 0xC0FFEE
CONFIG_ENV = "ATLAS_CONFIG"

EXIT_OK, EXIT_MALFORMED, EXIT_UNIVERSE, EXIT_OPEN = 0, 2, 3, 4


class MalformedInput(Exception):
    pass


@dataclass
class RunConfig:
    curve: CurveSpec = field(default_factory=lambda: CurveSpec(101, 1, 3))
    class_group: dict = field(default_factory=lambda: {"backend": "abstract", "rank": 2, "torsion": [2]})
    seed: int = DEFAULT_SEED
    output_format: str = "json"
    named_points: dict = field(default_factory=dict)

    def group(self) -> ClassGroup:
        return ClassGroup.from_json(self.class_group, self.curve)

    @classmethod
    def from_json(cls, data: dict) -> "RunConfig":
        cfg = cls()
        if "curve" in data:
            cfg.curve = CurveSpec.from_json(data["curve"])
        if "class_group" in data:
            cfg.class_group = dict(data["class_group"])
        if "seed" in data:
            cfg.seed = int(data["seed"], 0) if isinstance(data["seed"], str) else int(data["seed"])
        if "format" in data:
            cfg.output_format = data["format"]
        if "named_points" in data:
            cfg.named_points = dict(data["named_points"])
        if cfg.output_format not in ("json", "text", "dot"):
            raise MalformedInput(f"unknown output format {cfg.output_format!r}")
        return cfg


def find_config(explicit: Optional[str]) -> Optional[Path]:
    if explicit:
        return Path(explicit)
    env = os.environ.get(CONFIG_ENV)
    if env:
        return Path(env)
    local = Path("atlas.json")
    return local if local.exists() else None


def load_config(explicit: Optional[str]) -> RunConfig:
    path = find_config(explicit)
    if path is None:
        return RunConfig()
    try:
        return RunConfig.from_json(json.loads(path.read_text()))
    except (OSError, ValueError, KeyError, TypeError) as exc:
        raise MalformedInput(f"config {path}: {exc}") from exc


def _read_json(path: str):
    try:
        return json.loads(Path(path).read_text())
    except (OSError, ValueError) as exc:
        raise MalformedInput(f"{path}: {exc}") from exc


def _emit(report: dict, fmt: str, out=None) -> None:
    out = out or sys.stdout
    report = {"schema_version": SCHEMA_VERSION, **report}
    if fmt == "text":
        for key, value in report.items():
            if isinstance(value, (dict, list)):
                value = json.dumps(value, sort_keys=True)
            print(f"{key}: {value}", file=out)
    else:
        print(json.dumps(report, indent=2, sort_keys=True), file=out)


# ---------------------------------------------------------------------------
# commands

def _descriptor(args, cfg):
    group = cfg.group()
    set_default_group(group)
    try:
        return descriptor_from_json(_read_json(args.descriptor), group)
    except (KeyError, TypeError, ValueError) as exc:
        raise MalformedInput(f"{args.descriptor}: {exc}") from exc


def cmd_classify(args, cfg) -> int:
    d = _descriptor(args, cfg)
    verdict = classify(d, args.genus)
    stiff = stiffness(d, args.genus)
    bir = bir_maximality(d, args.genus)
    try:
        aut = aut_descriptor(d).to_json()
    except OutOfUniverse:
        aut = None
    reasons = [verdict.rule, stiff.rule, bir.rule]
    report = {
        "descriptor": descriptor_to_json(canonical(d)),
        "label": describe(canonical(d)),
        "genus": args.genus,
        "relatively_maximal": verdict.relatively_maximal,
        "side_conditions": verdict.side_conditions,
        "stiffness": stiff.to_json(),
        "bir_maximality": bir.status,
        "aut": aut,
        "reasons": reasons,
        "witness_path": verdict.witness,
    }
    if args.field:
        report = {"field": args.field, args.field: report[args.field], "reasons": reasons}
    _emit(report, cfg.output_format)
    if args.field == "bir_maximality" and bir.status == "Open":
        return EXIT_OPEN
    return EXIT_OK


def cmd_links(args, cfg) -> int:
    d = _descriptor(args, cfg)
    rows = []
    for choice, result in available_links(d, witness=args.witness):
        rows.append({
            "selector": choice.selector,
            "target": describe(result.target),
            "descriptor": None if isinstance(result.target, Boundary) else descriptor_to_json(result.target),
            "conjugates_full_group": result.conjugates_full_group,
            "link_type": result.link_type,
            "rule": result.rule,
        })
    _emit({"descriptor": describe(canonical(d)), "links": rows}, cfg.output_format)
    return EXIT_OK


def cmd_orbit(args, cfg) -> int:
    d = _descriptor(args, cfg)
    graph = enumerate_orbit(d, args.bound)
    fmt = cfg.output_format
    if fmt == "dot":
        print(graph.to_dot())
    else:
        _emit({"bound": args.bound, "dot": graph.to_dot(), **graph.to_json()}, fmt)
    return EXIT_OK


def cmd_normalize(args, cfg) -> int:
    data = _read_json(args.transition)
    curve = CurveSpec.from_json(data["curve"]) if "curve" in data else cfg.curve
    group = ClassGroup("concrete", curve)
    try:
        td = TransitionData.from_json(data, curve, group)
    except (KeyError, TypeError, ValueError) as exc:
        raise MalformedInput(f"{args.transition}: {exc}") from exc
    nf = normalize(td, group)
    desc = from_normal_form(nf, curve.p)
    base, b, D = extract_invariants(td, group)
    _emit({"normal_form": type(nf).__name__, "label": describe(desc),
           "descriptor": descriptor_to_json(desc),
           "invariants": {"base": tag_to_json(base), "b": b, "D": D.to_json()}}, cfg.output_format)
    return EXIT_OK


def cmd_split(args, cfg) -> int:
    data = _read_json(args.matrix)
    try:
        A = LaurentMatrix.from_json(data, cfg.curve.p)
    except (KeyError, TypeError, ValueError) as exc:
        raise MalformedInput(f"{args.matrix}: {exc}") from exc
    cert = birkhoff_split(A)
    _emit({"splitting_type": [cert.m, cert.n], "b": cert.b, "verified": cert.verify(A),
           "M": cert.M.to_json(), "N": cert.N.to_json()}, cfg.output_format)
    return EXIT_OK


_NAME = re.compile(r"\b([a-fh-np-z])\b")


def _parse_divisor(text: str, cfg) -> Divisor:
    """Parse a divisor over the configured curve, allowing named points like p and q.

    Names come from ``named_points`` in the config; otherwise p, q, r, ... are the
    affine points of the curve with y != 0 in sorted order.
    """
    curve = cfg.curve
    ordinary = [P for P in curve.points() if not P.is_infinity and P.y != 0]
    default_names = "pqrstuvwz"
    names = {n: str(P) for n, P in zip(default_names, ordinary)}
    names.update(cfg.named_points)
    text = re.sub(r"(\d)\s*([a-fh-np-z])\b", r"\1*\2", text)

    def sub(m):
        key = m.group(1)
        if key not in names:
            raise MalformedInput(f"unknown point name {key!r}")
        return names[key]

    text = _NAME.sub(sub, text)
    try:
        return Divisor.parse(text, curve)
    except (ValueError, KeyError) as exc:
        raise MalformedInput(f"cannot parse divisor: {exc}") from exc


def _element_str(f: FunctionFieldElement) -> str:
    j = f.to_json()
    return f"({j['u']}) + ({j['v']})*y"


def cmd_divisor(args, cfg) -> int:
    D = _parse_divisor(args.expression, cfg)
    curve = cfg.curve
    group = ClassGroup("concrete", curve)
    cls = group.class_of(D)
    R, h = miller_reduce(curve, D)
    _emit({"divisor": str(D), "degree": D.degree, "class": cls.to_json(),
           "principal": cls.is_trivial(), "reduced": f"{R} + {D.degree - 1}*O" if D.degree else str(R),
           "support": [str(P) for P in D.support]}, cfg.output_format)
    return EXIT_OK


def cmd_rr(args, cfg) -> int:
    D = _parse_divisor(args.expression, cfg)
    basis = rr_basis(cfg.curve, D)
    _emit({"divisor": str(D), "degree": D.degree, "dimension": basis.dimension,
           "basis": [_element_str(f) for f in basis.basis]}, cfg.output_format)
    return EXIT_OK


# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="atlas", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"atlas {__version__}")
    parser.add_argument("--config", help="config file (else $ATLAS_CONFIG, else ./atlas.json)")
    parser.add_argument("--format", dest="global_format", choices=["json", "text", "dot"])
    sub = parser.add_subparsers(dest="command", required=True)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=["json", "text", "dot"], help="output format for this command")

    p = sub.add_parser("classify", parents=[common], help="relative maximality, stiffness and Aut facts")
    p.add_argument("descriptor")
    p.add_argument("--genus", type=int, default=1)
    p.add_argument("--field", choices=["relatively_maximal", "stiffness", "bir_maximality", "aut"])
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("links", parents=[common], help="equivariant links from a descriptor")
    p.add_argument("descriptor")
    p.add_argument("--witness", action="store_true", help="include links defined under failed side conditions")
    p.set_defaults(func=cmd_links)

    p = sub.add_parser("orbit", parents=[common], help="conjugacy orbit up to a number of links")
    p.add_argument("descriptor")
    p.add_argument("--bound", type=int, required=True)
    p.set_defaults(func=cmd_orbit)

    p = sub.add_parser("normalize", parents=[common], help="normal form of two-chart transition data")
    p.add_argument("transition")
    p.set_defaults(func=cmd_normalize)

    p = sub.add_parser("split", parents=[common], help="Birkhoff splitting of a 2x2 Laurent matrix")
    p.add_argument("matrix")
    p.set_defaults(func=cmd_split)

    p = sub.add_parser("divisor", parents=[common], help="degree, class and reduced form of a divisor")
    p.add_argument("expression")
    p.set_defaults(func=cmd_divisor)

    p = sub.add_parser("rr", parents=[common], help="Riemann-Roch space of a divisor")
    p.add_argument("expression")
    p.set_defaults(func=cmd_rr)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_MALFORMED if exc.code else EXIT_OK
    try:
        cfg = load_config(args.config)
        if args.format or args.global_format:
            cfg.output_format = args.format or args.global_format
        return args.func(args, cfg)
    except MalformedInput as exc:
        print(f"atlas: malformed input: {exc}", file=sys.stderr)
        return EXIT_MALFORMED
    except (OutOfUniverse, OutOfFamily) as exc:
        print(f"atlas: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_UNIVERSE
    except AtlasError as exc:
        print(f"atlas: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_MALFORMED


if __name__ == "__main__":
    sys.exit(main())
