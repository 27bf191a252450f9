"""Command-line entry point: ``pillowbraid verify | emit-presentation | render | hurwitz | certify``.

Exit codes: 0 pass, 1 audit or certification failure, 2 input error.
"""

from __future__ import annotations

import argparse
import json
import re
import sys
from pathlib import Path

from .braid import BraidWord
from .errors import PillowBraidError

EXIT_OK, EXIT_FAIL, EXIT_INPUT = 0, 1, 2


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def _catalog(args):
    from .dataset import load_catalog
    return load_catalog(args.catalog)


def _write(text: str, output: str | None) -> None:
    if output:
        Path(output).write_text(text)
    else:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")


# ---------------------------------------------------------------------------
# verify


def cmd_verify(args) -> int:
    from .catalog import assemble_delta48, audit
    cat = _catalog(args)
    report = audit(assemble_delta48(cat), args.level, seeds=args.seeds, seed=args.seed, catalog=cat)
    if args.format == "json":
        _write(report.to_json(), None)
    else:
        text = report.to_text()
        if report.census:
            c = report.census
            text = text.replace("census:", f"census ({c['cusp']}, {c['node']}, {c['branch']}):", 1)
        _write(text, None)
    return EXIT_OK if report.passed else EXIT_FAIL


# ---------------------------------------------------------------------------
# emit-presentation


def cmd_emit(args) -> int:
    from .catalog import assemble_delta48
    from .vankampen import class_exponents, emit_relations, expand_by_invariance, projective_closure
    f = assemble_delta48(_catalog(args))
    pres = emit_relations(f)
    if args.expand_rho:
        pres = expand_by_invariance(pres, f.ambient, class_exponents(args.expand_rho))
    if args.target == "projective":
        pres = projective_closure(pres)
    _write(pres.to_json() if args.format == "json" else pres.to_text(), args.output)
    if args.output:
        print(f"{pres.generator_count} generators, {len(pres.relations)} relations -> {args.output}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# render


def _figure_specs(name: str, cat: dict):
    from .catalog import _figure_spec, local_system
    if name not in cat["figure_paths"]:
        raise PillowBraidError(f"unknown figure {name!r}; known: {', '.join(sorted(cat['figure_paths']))}")
    for rec in (cat["phi"][k] for k in sorted(cat["phi"], key=int)):
        for item in rec.get("F", []):
            if isinstance(item, dict) and item.get("figure") == name:
                ref = dict(item)
                lines = sorted(int(v) for v in item["map"].values())
                specs = []
                for slot in range(len(cat["figure_paths"][name]["slots"])):
                    ref["slot"] = slot
                    specs.append(_figure_spec(cat, ref))
                return local_system(lines), specs
    raise PillowBraidError(f"figure {name!r} is not used by any block")


def select_paths(selector: str, cat: dict):
    """Return (system, specs, stem) for a render selector."""
    from .arrangement import build_pillow
    from .catalog import phi
    from .disk import doubled_system
    from .regeneration import build_Ci, regenerated_Dt
    from .twists import expand_all

    if not selector:
        raise argparse.ArgumentTypeError("empty selector")
    if m := re.fullmatch(r"phi(\d+)", selector):
        f = phi(int(m.group(1)), cat, local=True)
        specs = [s for x in f.factors for s in expand_all(x.spec, f.ambient)]
        return f.ambient, specs, selector
    if m := re.fullmatch(r"D:(\d+)", selector):
        return doubled_system(24), regenerated_Dt(int(m.group(1)), cat), f"D{m.group(1)}"
    if m := re.fullmatch(r"C:(\d+)", selector):
        return doubled_system(24), build_Ci(int(m.group(1)), build_pillow(cat), cat), f"C{m.group(1)}"
    if m := re.fullmatch(r"fig:(\w+)", selector):
        system, specs = _figure_specs(m.group(1), cat)
        return system, specs, f"fig_{m.group(1)}"
    raise PillowBraidError(f"unknown selector {selector!r} (use phiN, D:t, C:j or fig:name)")


def cmd_render(args) -> int:
    from .twists import format_spec, render_path
    try:
        system, specs, stem = select_paths(args.selector, _catalog(args))
    except argparse.ArgumentTypeError as e:
        print(f"pillowbraid render: error: {e}", file=sys.stderr)
        return EXIT_INPUT
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    for k, spec in enumerate(specs):
        path = out / f"{stem}_{k:02d}.svg"
        path.write_text(render_path(spec.path, system, title=format_spec(spec)))
    print(f"{len(specs)} drawings written to {out}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# hurwitz


def read_expression(path: str):
    """JSON ``{"strand_count": n, "factors": [[letters], ...]}``."""
    from .invariance import Expression
    try:
        d = json.loads(Path(path).read_text())
        n = int(d["strand_count"])
        return Expression(n, tuple(BraidWord(n, tuple(int(x) for x in w)) for w in d["factors"]))
    except (KeyError, TypeError, ValueError) as e:
        raise PillowBraidError(f"{path}: not an expression document ({e})") from None


def expression_json(e) -> str:
    return json.dumps({"strand_count": e.strand_count, "factors": [list(w.letters) for w in e.factors]})


def parse_moves(text: str):
    """'2R,3L' or a JSON list of [position, direction] pairs."""
    from .invariance import HurwitzMove
    text = text.strip()
    if text.startswith("["):
        return [HurwitzMove(int(p), str(d)) for p, d in json.loads(text)]
    moves = []
    for item in filter(None, (s.strip() for s in text.split(","))):
        m = re.fullmatch(r"(\d+)([LR])", item, re.I)
        if not m:
            raise PillowBraidError(f"bad move {item!r}; expected e.g. 3R")
        moves.append(HurwitzMove(int(m.group(1)), "right" if m.group(2).upper() == "R" else "left"))
    return moves


def cmd_hurwitz(args) -> int:
    from .invariance import apply_moves, search_hurwitz_equivalence
    e = read_expression(args.input)
    if args.action == "apply":
        _write(expression_json(apply_moves(e, parse_moves(args.moves))), args.output)
        return EXIT_OK
    g = read_expression(args.target)
    r = search_hurwitz_equivalence(e, g, move_budget=args.budget, state_limit=args.limit)
    print(json.dumps({"status": r.status, "moves": [m.to_json() for m in r.moves or []],
                      "explored": r.explored}))
    return EXIT_OK if r.status == "witness" else EXIT_FAIL


# ---------------------------------------------------------------------------
# certify


def _block(selector: str, cat: dict, local: bool):
    from .catalog import parasitic, phi
    if m := re.fullmatch(r"phi(\d+)", selector):
        return phi(int(m.group(1)), cat, local=local)
    if m := re.fullmatch(r"C:(\d+)", selector):
        return parasitic(int(m.group(1)), catalog=cat)
    raise PillowBraidError(f"unknown block {selector!r} (use phiN or C:j)")


def cmd_certify(args) -> int:
    from .invariance import (InvarianceCertificate, catalog_hints, certify_invariance,
                             system_lines, verify_certificate)
    from .vankampen import parse_exponents
    cat = _catalog(args)
    f = _block(args.block, cat, args.local)
    if args.verify:
        cert = InvarianceCertificate.from_dict(json.loads(Path(args.verify).read_text()))
        ok = verify_certificate(cert, f)
        print("certificate verified" if ok else "certificate REJECTED")
        return EXIT_OK if ok else EXIT_FAIL
    lines = system_lines(f.ambient)
    exps = {j: v for j, v in parse_exponents(args.exponents, lines).items() if v}
    cert = certify_invariance(f, exps, name=args.block, hints=catalog_hints(f, cat))
    if not cert:
        print(f"not certified: {cert.block}: {cert.reason}")
        return EXIT_FAIL
    ok = verify_certificate(cert, f)
    _write(cert.to_json(), args.output)
    if args.output:
        kinds = sorted({c.kind for c in cert.leaves()})
        print(f"certificate for {args.block} ({', '.join(kinds)}) -> {args.output}; "
              + ("verified" if ok else "REJECTED"))
    return EXIT_OK if ok else EXIT_FAIL


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="pillowbraid", description=__doc__.splitlines()[0])
    p.add_argument("--catalog", help="catalog JSON (default: the shipped one)")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    v = sub.add_parser("verify", help="assemble the factorization and audit it")
    v.add_argument("--level", default="degree",
                   choices=("degree", "census", "permutation", "burau", "normal_form"))
    v.add_argument("--seeds", type=int, default=3, help="number of Burau evaluation points")
    v.add_argument("--seed", type=int, default=0, help="RNG seed for the evaluation points")
    v.add_argument("--format", choices=("text", "json"), default="text")
    v.set_defaults(func=cmd_verify)

    e = sub.add_parser("emit-presentation", help="write the van Kampen presentation")
    e.add_argument("--target", choices=("affine", "projective"), default="affine")
    e.add_argument("--expand-rho", metavar="EXPONENTS",
                   help="append R_rho for every relation, e.g. all=1 or 4=2,13=-1")
    e.add_argument("--format", choices=("text", "json"), default="text")
    e.add_argument("--output", "-o")
    e.set_defaults(func=cmd_emit)

    r = sub.add_parser("render", help="draw factor paths as SVG")
    r.add_argument("selector", help="phiN, D:t, C:j or fig:name")
    r.add_argument("--out", default=".", help="output directory")
    r.set_defaults(func=cmd_render)

    h = sub.add_parser("hurwitz", help="apply Hurwitz moves or search for an equivalence")
    h.add_argument("action", choices=("apply", "search"))
    h.add_argument("--input", required=True, help="expression JSON")
    h.add_argument("--moves", default="", help="for apply: e.g. 2R,3L")
    h.add_argument("--target", help="for search: expression JSON to reach")
    h.add_argument("--budget", type=int, default=6)
    h.add_argument("--limit", type=int, default=200_000)
    h.add_argument("--output", "-o")
    h.set_defaults(func=cmd_hurwitz)

    c = sub.add_parser("certify", help="certify invariance of a block under pair twists")
    c.add_argument("block", help="phiN or C:j")
    c.add_argument("--exponents", default="", help="per line, e.g. 3=1,19=1 or all=1")
    c.add_argument("--local", action="store_true", help="use the block's own small disk")
    c.add_argument("--verify", metavar="CERT", help="check a stored certificate instead")
    c.add_argument("--output", "-o")
    c.set_defaults(func=cmd_certify)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "hurwitz":
        if args.action == "search" and not args.target:
            parser.error("hurwitz search needs --target")
    try:
        return args.func(args)
    except (PillowBraidError, OSError, json.JSONDecodeError) as e:
        print(f"pillowbraid: error: {e}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
