"""Command line interface: verify, gb, list, show."""

from __future__ import annotations

import argparse
import json
import sys
from importlib import resources
from pathlib import Path

from ..groebner import IdealPresentation, groebner_basis
from ..polyring import GREVLEX, GradedRing, PolyError, elimination_order
from .checks import run_checks
from .report import JSON_TREE, TEXT, render_json, report_emit, use_color
from .scenario import ScenarioError, load_scenario

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_USAGE = 2


def corpus_dir() -> Path:
    return Path(str(resources.files("chowkit") / "corpus"))


def resolve_path(path: str) -> Path:
    """Paths starting with ``corpus`` fall back to the bundled corpus."""
    p = Path(path)
    if p.exists():
        return p
    parts = p.parts
    if parts and parts[0] == "corpus":
        bundled = corpus_dir().joinpath(*parts[1:])
        if bundled.exists():
            return bundled
    return p


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="chowkit", description="Verify graded ring presentations and compute Groebner bases.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    v = sub.add_parser("verify", help="run the checks of a scenario file")
    v.add_argument("file")
    v.add_argument("--check", metavar="GLOB", help="only run checks whose name matches")
    v.add_argument("--report", metavar="PATH", help="also write the JSON report here")
    v.add_argument("--format", choices=(TEXT, JSON_TREE), default=TEXT)

    g = sub.add_parser("gb", help="Groebner basis of an ad-hoc ideal")
    g.add_argument("--ring", required=True, help='e.g. "Z[x:1,y:1]"')
    g.add_argument("--ideal", required=True, help='generators separated by ";"')
    g.add_argument("--order", default="grevlex", help="grevlex or elim:k")

    ls = sub.add_parser("list", help="list scenario files in a directory")
    ls.add_argument("dir")

    sh = sub.add_parser("show", help="show one named definition of a scenario")
    sh.add_argument("file")
    sh.add_argument("name")
    return parser


def _parse_order(text: str):
    if text == "grevlex":
        return GREVLEX
    if text.startswith("elim:"):
        try:
            k = int(text[5:])
        except ValueError:
            k = -1
        if k >= 0:
            return elimination_order(k)
    raise ValueError(f"unknown order {text!r}; use grevlex or elim:k")


def cmd_verify(args, out, err) -> int:
    scenario = load_scenario(resolve_path(args.file))
    report = run_checks(scenario, args.check)
    color = args.format == TEXT and use_color(out)
    out.write(report_emit(report, args.format, color).decode("utf-8"))
    if args.report:
        Path(args.report).write_text(render_json(report), encoding="utf-8")
    return EXIT_OK if report.ok else EXIT_FAIL


def cmd_gb(args, out, err) -> int:
    ring = GradedRing.parse(args.ring)
    order = _parse_order(args.order)
    if order.split and order.split > ring.nvars:
        raise ValueError(f"cannot eliminate {order.split} of {ring.nvars} variables")
    texts = [t for t in (s.strip() for s in args.ideal.split(";")) if t]
    ideal = IdealPresentation.parse(ring, texts)
    G = groebner_basis(ideal, order)
    out.write(f"# {G.strength} basis of {len(G)} element(s), order {order}\n")
    for g in G.basis:
        out.write(f"{g}\n")
    return EXIT_OK


def cmd_list(args, out, err) -> int:
    directory = resolve_path(args.dir)
    if not directory.is_dir():
        err.write(f"chowkit: not a directory: {args.dir}\n")
        return EXIT_USAGE
    status = EXIT_OK
    for path in sorted(directory.glob("*.scn")):
        try:
            sc = load_scenario(path)
        except ScenarioError as e:
            out.write(f"{path.name}: {e}\n")
            status = EXIT_USAGE
            continue
        out.write(f"{path.name}: {sc.id}, {len(sc.rings)} rings, {len(sc.maps)} maps, {len(sc.checks)} checks\n")
        for tag, text in sc.datasets.items():
            out.write(f"  {tag}: {text}\n")
    return status


def cmd_show(args, out, err) -> int:
    sc = load_scenario(resolve_path(args.file))
    found = sc.definition(args.name)
    if found is None:
        err.write(f"chowkit: no definition named {args.name!r}\n")
        return EXIT_USAGE
    section, item = found
    out.write(f"[{section}]\n{json.dumps(item, indent=2, ensure_ascii=False)}\n")
    if section == "rings":
        out.write(f"{sc.rings[args.name]}\n")
    elif section == "classes":
        out.write(f"{args.name} = {sc.classes[args.name].value}\n")
    return EXIT_OK


_COMMANDS = {"verify": cmd_verify, "gb": cmd_gb, "list": cmd_list, "show": cmd_show}


def main(argv=None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else EXIT_USAGE
    try:
        return _COMMANDS[args.command](args, out, err)
    except ScenarioError as e:
        err.write(f"chowkit: {e}\n")
        return EXIT_USAGE
    except (PolyError, ValueError) as e:
        code = getattr(e, "code", "USAGE")
        err.write(f"chowkit: {code}: {e}\n")
        return EXIT_USAGE


if __name__ == "__main__":
    raise SystemExit(main())
