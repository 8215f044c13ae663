"""Command-line front end; every verb prints one JSON report."""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from nilspec.graphs import Graph, GraphFormatError, parse_graph, split_join
from nilspec.intlinalg import cokernel_order, det, parse_matrix, smith_normal_form
from nilspec.product import (BlockMap, CommutingError, ConsistencyError, PreconditionError,
                             TheoremViolation, analyze_automorphism, block_map,
                             reidemeister_block_paths, spectrum_compose, spectrum_sample,
                             validate_block)
from nilspec.spectrum import (INF, SpectrumSyntaxError, ext_to_json, parse_spectrum,
                              spec_enumerate, to_text)
from nilspec.twostep import (DomainError, EndoFormatError, GroupElement, RelationError,
                             TwoStepGroup,
                             build_graph_group, census, direct_product_group,
                             is_automorphism, parse_endo, reidemeister,
                             reidemeister_via_series, witt_rank)

CENSUS_LIMIT = 6


class FormatError(ValueError):
    """Malformed input file (exit code 2)."""


class UsageError(ValueError):
    pass


def _load_json(path: str | Path):
    try:
        return json.loads(Path(path).read_text())
    except OSError as exc:
        raise FormatError(f"cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise FormatError(f"{path}: invalid JSON: {exc}") from None


def _resolve(ref, base: Path):
    """A reference is either inline JSON or a path relative to ``base``."""
    if isinstance(ref, str):
        return _load_json(base / ref), (base / ref).parent
    return ref, base


def load_graph_ref(ref, base: Path) -> Graph:
    data, _ = _resolve(ref, base)
    return parse_graph(data)


def load_group_ref(ref, base: Path) -> TwoStepGroup:
    data, here = _resolve(ref, base)
    if isinstance(data, dict) and "product" in data:
        parts = data["product"]
        if not isinstance(parts, list) or not parts:
            raise FormatError('"product" must be a non-empty list of group references')
        return direct_product_group([load_group_ref(p, here) for p in parts])
    return build_graph_group(parse_graph(data))


def load_group(path: str) -> TwoStepGroup:
    p = Path(path)
    return load_group_ref(p.name, p.parent)


def load_blocks(path: str) -> BlockMap:
    p = Path(path)
    data = _load_json(p)
    if not isinstance(data, dict) or not isinstance(data.get("factors"), list) \
            or not isinstance(data.get("blocks"), list):
        raise FormatError('block file needs "factors" and "blocks" lists')
    base = p.parent
    factors = [load_group_ref(f, base) for f in data["factors"]]
    k = len(factors)
    rows = data["blocks"]
    if len(rows) != k or any(not isinstance(r, list) or len(r) != k for r in rows):
        raise FormatError(f"blocks must be a {k}x{k} grid")
    grid = {}
    for i, row in enumerate(rows):
        for j, ref in enumerate(row):
            if ref == "zero":
                continue
            endo_data, _ = _resolve(ref, base)
            src, tgt = factors[j], factors[i]
            images = _parse_images(endo_data, src, tgt, f"blocks[{i}][{j}]")
            grid[(i, j)] = images
    return block_map(factors, grid)


def _parse_images(data, src: TwoStepGroup, tgt: TwoStepGroup, where: str):
    if not isinstance(data, dict) or not isinstance(data.get("images"), list):
        raise FormatError(f'{where}: expected an object with an "images" list')
    if len(data["images"]) != src.n:
        raise FormatError(f"{where}: {len(data['images'])} images for {src.n} generators")
    out = []
    for t, item in enumerate(data["images"]):
        try:
            x = [int(v) for v in item.get("x", [])]
            y = [int(v) for v in item.get("y", [0] * tgt.m)]
        except (AttributeError, TypeError, ValueError):
            raise FormatError(f"{where}.images[{t}]: coordinates must be integer lists") from None
        if len(x) != tgt.n or len(y) != tgt.m:
            raise FormatError(f"{where}.images[{t}]: expected {tgt.n}+{tgt.m} coordinates")
        out.append(GroupElement(x, y))
    return out


def _report(command: str, inputs: dict, result, cross_checks=None) -> dict:
    return {"command": command, "inputs": inputs, "result": result,
            "cross_checks": list(cross_checks or [])}


def cmd_graph_join(args) -> dict:
    g = parse_graph(_load_json(args.file))
    parts = split_join(g)
    return _report("graph join", {"file": args.file},
                   "indecomposable" if parts is None else parts)


def cmd_group_info(args) -> dict:
    grp = load_group(args.group)
    return _report("group info", {"group": args.group}, grp.describe())


def _load_aut(args):
    grp = load_group(args.group)
    try:
        phi = parse_endo(grp, _load_json(args.aut))
    except EndoFormatError as exc:
        raise FormatError(str(exc)) from None
    return grp, phi


def cmd_reidemeister(args) -> dict:
    grp, phi = _load_aut(args)
    r = reidemeister(grp, phi)
    checks = []
    alt = reidemeister_via_series(grp, phi, "gamma2-isolator")
    if alt != r:
        raise ConsistencyError(f"series disagree: center {r}, isolator {alt}")
    checks.append("series-agree")
    if r is not INF and r <= CENSUS_LIMIT:
        res = census(grp, phi, args.box)
        if res.classes != r:
            raise ConsistencyError(f"census found {res.classes} classes, expected {r}")
        checks.append(f"census-{res.classes}")
    return _report("reidemeister", {"group": args.group, "aut": args.aut, "box": args.box},
                   ext_to_json(r), checks)


def cmd_census(args) -> dict:
    grp, phi = _load_aut(args)
    res = census(grp, phi, args.box)
    r = reidemeister(grp, phi)
    checks = [f"witnesses-verified-{res.witnesses_verified}"]
    if r is not INF and res.classes == r:
        checks.append("matches-reidemeister")
    return _report("census", {"group": args.group, "aut": args.aut, "box": args.box},
                   {"classes": res.classes, "elements": res.elements,
                    "class_sizes": res.class_sizes,
                    "representatives": [g.to_json() for g in res.representatives],
                    "reidemeister": ext_to_json(r)}, checks)


def cmd_check_structure(args) -> dict:
    b = load_blocks(args.blocks)
    phi = validate_block(b)
    if not is_automorphism(b.group, phi):
        raise DomainError("block map does not assemble to an automorphism")
    report = analyze_automorphism(b)
    paths = reidemeister_block_paths(b)
    if len(set(paths.values())) != 1:
        raise ConsistencyError(f"Reidemeister computations disagree: {paths}")
    result = report.to_json()
    result["reidemeister"] = ext_to_json(paths["assembled"])
    checks = ["block-roundtrip", "reidemeister-paths-agree"]
    return _report("check-structure", {"blocks": args.blocks}, result, checks)


def _read_spectrum(ref: str):
    p = Path(ref)
    text = p.read_text() if p.exists() else ref
    return parse_spectrum(text)


def cmd_spectrum_compose(args) -> dict:
    if len(args.mult) not in (0, len(args.spec)):
        raise UsageError("give one --mult per --spec (or none for all 1)")
    mults = args.mult or [1] * len(args.spec)
    specs = [_read_spectrum(s) for s in args.spec]
    expr = spectrum_compose(list(zip(specs, mults)), args.abelian_rank)
    values, has_inf = spec_enumerate(expr, args.bound)
    return _report("spectrum compose",
                   {"spec": args.spec, "mult": mults, "abelian_rank": args.abelian_rank,
                    "bound": args.bound},
                   {"expression": to_text(expr), "members_upto_bound": values,
                    "contains_inf": has_inf})


def cmd_spectrum_sample(args) -> dict:
    grp = load_group(args.group)
    s = spectrum_sample(grp, args.trials, args.seed, args.coeff_bound)
    return _report("spectrum sample",
                   {"group": args.group, "trials": args.trials, "seed": args.seed,
                    "coeff_bound": args.coeff_bound},
                   {"spectrum": to_text(s),
                    "values": [ext_to_json(v) for v in sorted(s.values)]},
                   ["subset-of-SpecR"])


def cmd_witt(args) -> dict:
    if args.r < 1 or args.c < 1:
        raise DomainError("witt needs r >= 1 and c >= 1")
    return _report("witt", {"r": args.r, "c": args.c}, witt_rank(args.r, args.c))


def cmd_oracle_snf(args) -> dict:
    m = parse_matrix(_load_json(args.matrix))
    snf = smith_normal_form(m)
    if snf.U @ m @ snf.V != snf.D:
        raise ConsistencyError("U M V != D")
    result = {"diagonal": snf.diagonal, "rank": snf.rank,
              "U": snf.U.to_rows(), "V": snf.V.to_rows()}
    checks = ["UMV=D"]
    if m.is_square:
        order = cokernel_order(m)
        d = det(m)
        expected = INF if d == 0 else abs(d)
        if order != expected:
            raise ConsistencyError(f"cokernel order {order} but |det| = {abs(d)}")
        result["cokernel_order"] = ext_to_json(order)
        result["det"] = d
        checks.append("snf-vs-det")
    return _report("oracle snf", {"matrix": args.matrix}, result, checks)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="nilspec", description="Reidemeister numbers of 2-step nilpotent groups")
    sub = p.add_subparsers(dest="verb", required=True, parser_class=_Parser)

    graph = sub.add_parser("graph").add_subparsers(dest="sub", required=True, parser_class=_Parser)
    gj = graph.add_parser("join", help="split a graph as a simplicial join")
    gj.add_argument("file")
    gj.set_defaults(func=cmd_graph_join)

    group = sub.add_parser("group").add_subparsers(dest="sub", required=True, parser_class=_Parser)
    gi = group.add_parser("info")
    gi.add_argument("--group", required=True)
    gi.set_defaults(func=cmd_group_info)

    for name, func, box in (("reidemeister", cmd_reidemeister, 2), ("census", cmd_census, 2)):
        c = sub.add_parser(name)
        c.add_argument("--group", required=True)
        c.add_argument("--aut", required=True)
        c.add_argument("--box", type=int, default=box)
        c.set_defaults(func=func)

    cs = sub.add_parser("check-structure")
    cs.add_argument("--blocks", required=True)
    cs.set_defaults(func=cmd_check_structure)

    spec = sub.add_parser("spectrum").add_subparsers(dest="sub", required=True, parser_class=_Parser)
    sc = spec.add_parser("compose")
    sc.add_argument("--spec", action="append", required=True,
                    help="spectrum file or literal; repeat per factor")
    sc.add_argument("--mult", type=int, action="append", default=[])
    sc.add_argument("--abelian-rank", type=int, default=0)
    sc.add_argument("--bound", type=int, default=50)
    sc.set_defaults(func=cmd_spectrum_compose)
    ss = spec.add_parser("sample")
    ss.add_argument("--group", required=True)
    ss.add_argument("--trials", type=int, required=True)
    ss.add_argument("--seed", type=int, required=True)
    ss.add_argument("--coeff-bound", type=int, default=5)
    ss.set_defaults(func=cmd_spectrum_sample)

    w = sub.add_parser("witt")
    w.add_argument("r", type=int)
    w.add_argument("c", type=int)
    w.set_defaults(func=cmd_witt)

    oracle = sub.add_parser("oracle").add_subparsers(dest="sub", required=True, parser_class=_Parser)
    on = oracle.add_parser("snf")
    on.add_argument("--matrix", required=True)
    on.set_defaults(func=cmd_oracle_snf)
    return p


FORMAT_ERRORS = (FormatError, GraphFormatError, EndoFormatError, SpectrumSyntaxError,
                 UsageError)


def run(argv: list[str] | None = None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        report = args.func(args)
    except UsageError as exc:
        print(str(exc), file=err)
        print(parser.format_usage(), file=err, end="")
        return 2
    except FORMAT_ERRORS as exc:
        print(f"format error: {exc}", file=err)
        return 2
    except ConsistencyError as exc:
        print(f"internal consistency failure: {exc}", file=err)
        return 3
    except (DomainError, RelationError, CommutingError, PreconditionError, TheoremViolation,
            ValueError) as exc:
        print(f"error: {exc}", file=err)
        return 1
    print(json.dumps(report, sort_keys=True, indent=2), file=out)
    return 0


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
