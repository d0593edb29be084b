"""Command-line front end: rule checking, patch generation, experiment drivers.

Commands write CSV/JSON/SVG/PGM artifacts; all writes go through a temp file
plus atomic rename so a failing command never leaves partial output behind.
Exit codes: 1 usage, 2 validation, 3 tile-cap exceeded, 4 I/O.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import tempfile

import numpy as np

from .errors import (CapExceededError, ParseError, RuleError, TilesubError,
                     UsageError)
from .geometry import Vec2, polygon_area
from .hull import patch_distance, verify_witness
from .orientstats import circle_discrepancy, hierarchical_sequence, weyl_sums
from .spectral import autocorrelation, ball_window, control_points, diffraction
from .substitution import (DEFAULT_TILE_CAP, Patch, SubstitutionRule,
                           _AngleClasses, expand_translation_classes,
                           is_primitive, load_rule_file, orientation_census,
                           pf_eigen, predicted_tile_count, substitution_matrix,
                           supertile, validate_rule)

PATCH_FORMAT = "tilesub-patch"

# fills cycle through this list, keyed by decoration when present, else by
# prototile id; chosen for contrast on white
_PALETTE = ("#4e79a7", "#f28e2b", "#59a14f", "#e15759", "#b07aa1",
            "#76b7b2", "#edc948", "#9c755f")


def _fmt(x: float) -> str:
    # repr of a Python float is the shortest string that round-trips
    return repr(float(x))


def tile_cap() -> int:
    """Active tile cap: TILESUB_CAP when set, else the library default."""
    raw = os.environ.get("TILESUB_CAP")
    if raw is None:
        return DEFAULT_TILE_CAP
    try:
        cap = int(raw)
    except ValueError:
        raise UsageError(f"TILESUB_CAP must be an integer, got {raw!r}") from None
    if cap <= 0:
        raise UsageError(f"TILESUB_CAP must be positive, got {cap}")
    return cap


def atomic_write(path: str, text: str) -> None:
    """Write text to path via temp file + rename; no partial files on failure."""
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tilesub-", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise


# ---------------------------------------------------------------------------
# patch files


def patch_to_json(patch: Patch) -> str:
    prov: object = "free"
    if patch.provenance is not None:
        prov = {"prototile": int(patch.provenance[0]),
                "depth": int(patch.provenance[1])}
    tiles = [{"prototile": i, "angle": a, "translation": t}
             for i, a, t in zip(patch.ids.tolist(), patch.angles.tolist(),
                                patch.trans.tolist())]
    doc = {
        "format": PATCH_FORMAT,
        "rule": patch.rule.name,
        "lambda": float(patch.rule.inflation),
        "provenance": prov,
        "tile_count": len(patch),
        "tiles": tiles,
    }
    return json.dumps(doc, separators=(",", ":")) + "\n"


def _parse_tile(entry: object, idx: int, m: int) -> tuple[int, float, float, float]:
    where = f"tiles[{idx}]"
    if not isinstance(entry, dict):
        raise ParseError(f"{where}: expected an object")
    try:
        pid = entry["prototile"]
        angle = entry["angle"]
        trans = entry["translation"]
    except KeyError as e:
        raise ParseError(f"{where}: missing field {e.args[0]!r}") from None
    if not isinstance(pid, int) or not (0 <= pid < m):
        raise ParseError(f"{where}.prototile: expected an id in 0..{m - 1}")
    if not isinstance(angle, (int, float)) or not math.isfinite(angle):
        raise ParseError(f"{where}.angle: expected a finite number")
    if (not isinstance(trans, list) or len(trans) != 2
            or not all(isinstance(c, (int, float)) and math.isfinite(c) for c in trans)):
        raise ParseError(f"{where}.translation: expected [x, y] finite numbers")
    return pid, float(angle), float(trans[0]), float(trans[1])


def load_patch_file(path: str, rule: SubstitutionRule) -> Patch:
    """Read a patch file back, cross-checking it against the rule in hand.

    The provenance header lets a downstream command notice when the rule file
    changed between pipeline stages: the recorded tile count must match the
    count the current rule predicts.
    """
    with open(path, "r", encoding="utf-8") as fh:
        text = fh.read()
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise ParseError(f"{path}: invalid JSON: {e}") from None
    if not isinstance(doc, dict) or doc.get("format") != PATCH_FORMAT:
        raise ParseError(f"{path}: not a {PATCH_FORMAT} file")
    if doc.get("rule") != rule.name:
        raise RuleError(f"{path}: patch was generated from rule "
                        f"{doc.get('rule')!r}, not {rule.name!r}")
    lam = doc.get("lambda")
    if not isinstance(lam, (int, float)) or abs(lam - rule.inflation) > 1e-12:
        raise RuleError(f"{path}: inflation factor mismatch "
                        f"(patch {lam!r}, rule {rule.inflation!r})")
    tiles = doc.get("tiles")
    if not isinstance(tiles, list):
        raise ParseError(f"{path}: tiles: expected an array")
    if doc.get("tile_count") != len(tiles):
        raise RuleError(f"{path}: tile_count {doc.get('tile_count')!r} does not "
                        f"match {len(tiles)} tiles")
    prov_field = doc.get("provenance")
    provenance: tuple[int, int] | None = None
    if prov_field != "free":
        if (not isinstance(prov_field, dict)
                or not isinstance(prov_field.get("prototile"), int)
                or not isinstance(prov_field.get("depth"), int)):
            raise ParseError(f"{path}: provenance: expected \"free\" or "
                             "{prototile, depth}")
        provenance = (prov_field["prototile"], prov_field["depth"])
        expected = predicted_tile_count(rule, provenance[0], provenance[1])
        if expected != len(tiles):
            raise RuleError(
                f"{path}: provenance says depth-{provenance[1]} supertile of "
                f"prototile {provenance[0]} ({expected} tiles) but file has "
                f"{len(tiles)}; was the rule file edited?")
    n = len(tiles)
    ids = np.empty(n, dtype=np.int64)
    angles = np.empty(n)
    trans = np.empty((n, 2))
    for idx, entry in enumerate(tiles):
        pid, a, tx, ty = _parse_tile(entry, idx, rule.m)
        ids[idx] = pid
        angles[idx] = a
        trans[idx, 0] = tx
        trans[idx, 1] = ty
    return Patch(rule, ids, angles, trans, provenance=provenance)


# ---------------------------------------------------------------------------
# SVG / PGM emitters


def _fill_keys(rule: SubstitutionRule) -> dict[int, str]:
    keys = [p.decoration if p.decoration else f"prototile-{p.id}"
            for p in rule.prototiles]
    order = {k: i for i, k in enumerate(sorted(set(keys)))}
    return {p.id: _PALETTE[order[keys[p.id]] % len(_PALETTE)]
            for p in rule.prototiles}


def patch_svg(patch: Patch, ticks: bool = False) -> str:
    if len(patch) == 0:
        return ('<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 1 1">'
                '</svg>\n')
    rule = patch.rule
    xmin, ymin, xmax, ymax = patch.bounding_box()
    pad = 0.03 * max(xmax - xmin, ymax - ymin, 1.0)
    fills = _fill_keys(rule)
    areas = [polygon_area(p.shape) for p in rule.prototiles]
    counts = np.bincount(patch.ids, minlength=rule.m)
    mean_area = float(np.dot(counts, areas)) / len(patch)
    stroke = 0.02 * math.sqrt(mean_area)
    tick_len = 0.35 * math.sqrt(mean_area)

    out = []
    out.append(f'<svg xmlns="http://www.w3.org/2000/svg" '
               f'viewBox="{_fmt(xmin - pad)} {_fmt(-(ymax + pad))} '
               f'{_fmt(xmax - xmin + 2 * pad)} {_fmt(ymax - ymin + 2 * pad)}">')
    # y axis flip: tiling coordinates go up, SVG pixels go down
    out.append('<g transform="scale(1,-1)">')
    for idx in range(len(patch)):
        pts = patch.realized_polygon(idx).array
        coords = " ".join(f"{_fmt(x)},{_fmt(y)}" for x, y in pts)
        fill = fills[int(patch.ids[idx])]
        out.append(f'<polygon points="{coords}" fill="{fill}" '
                   f'stroke="#1a1a1a" stroke-width="{_fmt(stroke)}"/>')
    if ticks:
        centers = patch.control_xy()
        for idx in range(len(patch)):
            cx, cy = centers[idx]
            a = float(patch.angles[idx])
            ex = cx + tick_len * math.cos(a)
            ey = cy + tick_len * math.sin(a)
            out.append(f'<line x1="{_fmt(cx)}" y1="{_fmt(cy)}" '
                       f'x2="{_fmt(ex)}" y2="{_fmt(ey)}" stroke="#111111" '
                       f'stroke-width="{_fmt(0.6 * stroke)}"/>')
    out.append("</g>")
    out.append("</svg>")
    return "\n".join(out) + "\n"


def _gray_levels(values: np.ndarray) -> np.ndarray:
    # amplitude (sqrt) scale: Bragg-dominated grids stay legible
    vmax = float(values.max())
    if vmax <= 0.0:
        return np.zeros(values.shape, dtype=np.int64)
    return np.rint(255.0 * np.sqrt(values / vmax)).astype(np.int64)


def intensity_pgm(values: np.ndarray) -> str:
    levels = _gray_levels(values)
    res_x, res_y = levels.shape
    rows = []
    # image rows scan ky from top (largest) down; columns scan kx left-right
    for r in range(res_y - 1, -1, -1):
        rows.append(" ".join(str(int(levels[c, r])) for c in range(res_x)))
    return f"P2\n{res_x} {res_y}\n255\n" + "\n".join(rows) + "\n"


def intensity_svg(values: np.ndarray) -> str:
    levels = _gray_levels(values)
    res_x, res_y = levels.shape
    out = [f'<svg xmlns="http://www.w3.org/2000/svg" '
           f'viewBox="0 0 {res_x} {res_y}" shape-rendering="crispEdges">']
    for r in range(res_y):
        for c in range(res_x):
            g = int(levels[c, res_y - 1 - r])
            out.append(f'<rect x="{c}" y="{r}" width="1" height="1" '
                       f'fill="rgb({g},{g},{g})"/>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


# ---------------------------------------------------------------------------
# commands


def _load_rule(args: argparse.Namespace) -> SubstitutionRule:
    return load_rule_file(args.rule)


def _load_patch(args: argparse.Namespace, rule: SubstitutionRule,
                attr: str = "patch") -> Patch:
    return load_patch_file(getattr(args, attr), rule)


def cmd_validate(args: argparse.Namespace) -> int:
    rule = _load_rule(args)
    report = validate_rule(rule, seed=args.seed)
    print(report.summary())
    return 0 if report.passes else 2


def cmd_generate(args: argparse.Namespace) -> int:
    rule = _load_rule(args)
    report = validate_rule(rule)
    if not report.passes:
        print(report.summary(), file=sys.stderr)
        raise RuleError(f"rule {rule.name!r} failed validation")
    patch = supertile(rule, args.prototile, args.depth, cap=tile_cap())
    if args.recenter:
        xmin, ymin, xmax, ymax = patch.bounding_box()
        patch = patch.translated(Vec2(-(xmin + xmax) / 2.0, -(ymin + ymax) / 2.0))
    if args.shift is not None:
        patch = patch.translated(Vec2(args.shift[0], args.shift[1]))
    atomic_write(args.out, patch_to_json(patch))
    print(f"wrote {args.out} ({len(patch)} tiles)")
    return 0


def cmd_render(args: argparse.Namespace) -> int:
    rule = _load_rule(args)
    patch = _load_patch(args, rule)
    atomic_write(args.out, patch_svg(patch, ticks=args.ticks))
    print(f"wrote {args.out} ({len(patch)} tiles)")
    return 0


def cmd_matrix(args: argparse.Namespace) -> int:
    rule = _load_rule(args)
    M = substitution_matrix(rule)
    primitive, power = is_primitive(M)
    lines = [f"rule: {rule.name}", "matrix:"]
    for row in M.tolist():
        lines.append("  [" + ", ".join(str(v) for v in row) + "]")
    if primitive:
        lines.append(f"primitive: yes (M^{power} > 0)")
        value, vector = pf_eigen(M)
        lines.append(f"pf_eigenvalue: {_fmt(value)}")
        lines.append("pf_vector: [" + ", ".join(_fmt(v) for v in vector) + "]")
    else:
        lines.append("primitive: no")
    lines.append(f"lambda_squared: {_fmt(rule.inflation ** 2)}")
    text = "\n".join(lines)
    print(text)
    if args.out:
        atomic_write(args.out, text + "\n")
    return 0


def cmd_stats(args: argparse.Namespace) -> int:
    rule = _load_rule(args)
    seq = hierarchical_sequence(rule, args.prototile, args.depth, cap=tile_cap())
    rows = ["n,discrepancy,W1,W2,W3,W4"]
    for n in seq.marks:
        prefix = seq.angles[:n]
        d = circle_discrepancy(prefix)
        w = weyl_sums(prefix, 4)
        rows.append(f"{n},{_fmt(d)},{_fmt(w[0])},{_fmt(w[1])},"
                    f"{_fmt(w[2])},{_fmt(w[3])}")
    atomic_write(args.out, "\n".join(rows) + "\n")
    print(f"wrote {args.out} ({len(seq.marks)} marks, {len(seq.angles)} tiles)")
    return 0


def cmd_freq(args: argparse.Namespace) -> int:
    rule = _load_rule(args)
    patch = supertile(rule, args.prototile, args.depth, cap=tile_cap())
    classes = _AngleClasses(rule.m)
    census = orientation_census(rule)
    pf_by_class: dict[tuple[int, float], float] = {}
    if census.finite:
        assert census.classes is not None
        for p, a in sorted(census.classes):
            classes.canon_rep(p, a)
        expanded, class_map = expand_translation_classes(rule)
        _, vector = pf_eigen(substitution_matrix(expanded))
        for new_id, (old_id, angle) in class_map.items():
            pf_by_class[(old_id, classes.canon_rep(old_id, angle))] = float(vector[new_id])
    counts: dict[tuple[int, float], int] = {}
    for idx in range(len(patch)):
        key = (int(patch.ids[idx]), classes.canon_rep(int(patch.ids[idx]),
                                                      float(patch.angles[idx])))
        counts[key] = counts.get(key, 0) + 1
    total = len(patch)
    rows = ["prototile,angle,count,frequency,pf_frequency"]
    for (p, a) in sorted(counts):
        c = counts[(p, a)]
        pf = pf_by_class.get((p, a))
        pf_text = _fmt(pf) if pf is not None else ""
        rows.append(f"{p},{_fmt(a)},{c},{_fmt(c / total)},{pf_text}")
    atomic_write(args.out, "\n".join(rows) + "\n")
    print(f"wrote {args.out} ({len(counts)} classes, {total} tiles)")
    return 0


def cmd_diffract(args: argparse.Namespace) -> int:
    rule = _load_rule(args)
    patch = _load_patch(args, rule)
    grid = diffraction(control_points(patch), args.k_max, args.resolution)
    rows = ["kx,ky,intensity"]
    for i in range(grid.resolution):
        for j in range(grid.resolution):
            rows.append(f"{_fmt(grid.ks[i])},{_fmt(grid.ks[j])},"
                        f"{_fmt(grid.values[i, j])}")
    atomic_write(args.out, "\n".join(rows) + "\n")
    written = [args.out]
    if args.image:
        ext = os.path.splitext(args.image)[1].lower()
        if ext == ".pgm":
            atomic_write(args.image, intensity_pgm(grid.values))
        elif ext == ".svg":
            atomic_write(args.image, intensity_svg(grid.values))
        else:
            raise UsageError(f"--image must end in .pgm or .svg, got {args.image!r}")
        written.append(args.image)
    print(f"wrote {', '.join(written)} ({grid.resolution}x{grid.resolution} grid, "
          f"{grid.n_points} points)")
    return 0


def cmd_autocorr(args: argparse.Namespace) -> int:
    rule = _load_rule(args)
    patch = _load_patch(args, rule)
    ps = control_points(patch)
    if args.window is not None:
        cx, cy, radius = args.window
        ps = ball_window(ps, (cx, cy), radius)
    edges = None
    if args.r_edges is not None:
        try:
            edges = np.array([float(tok) for tok in args.r_edges.split(",")])
        except ValueError:
            raise UsageError(f"--r-edges must be comma-separated numbers, "
                             f"got {args.r_edges!r}") from None
    hist = autocorrelation(ps, args.r_max, radial_bins=args.bins,
                           angular_bins=args.angular_bins, r_edges=edges)
    step = 2.0 * math.pi / hist.weights.shape[1]
    rows = ["r_lo,r_hi,theta_lo,theta_hi,weight"]
    for b in range(hist.weights.shape[0]):
        for a in range(hist.weights.shape[1]):
            rows.append(f"{_fmt(hist.radial_edges[b])},{_fmt(hist.radial_edges[b + 1])},"
                        f"{_fmt(a * step)},{_fmt((a + 1) * step)},"
                        f"{_fmt(hist.weights[b, a])}")
    atomic_write(args.out, "\n".join(rows) + "\n")
    print(f"wrote {args.out} ({hist.weights.shape[0]}x{hist.weights.shape[1]} bins, "
          f"{hist.n_left} left points)")
    return 0


def _witness_json(w) -> dict | None:
    if w is None:
        return None
    return {"epsilon": float(w.epsilon), "alpha": float(w.alpha),
            "s": [float(w.s.x), float(w.s.y)], "t": [float(w.t.x), float(w.t.y)]}


def cmd_hull_dist(args: argparse.Namespace) -> int:
    rule = _load_rule(args)
    first = _load_patch(args, rule, "patch_a")
    second = _load_patch(args, rule, "patch_b")
    forward = patch_distance(first, second, eps_floor=args.eps_floor)
    backward = patch_distance(second, first, eps_floor=args.eps_floor)
    verified = None
    if forward.witness is not None:
        verified = verify_witness(first, second, forward.witness)
    asymmetry = abs(forward.value - backward.value)
    doc = {
        "value": float(forward.value),
        "witness": _witness_json(forward.witness),
        "exactness": forward.exactness,
        "witness_verified": verified,
        "reverse_value": float(backward.value),
        "reverse_exactness": backward.exactness,
        "asymmetry": asymmetry,
        "asymmetry_flagged": bool(asymmetry > 1e-9),
    }
    text = json.dumps(doc, indent=2) + "\n"
    if args.out:
        atomic_write(args.out, text)
        print(f"wrote {args.out}")
    else:
        sys.stdout.write(text)
    return 0


# ---------------------------------------------------------------------------
# parser


class _Parser(argparse.ArgumentParser):
    # argparse exits with code 2 on bad usage; the exit-code contract
    # reserves 2 for validation failures, so route usage errors through
    # UsageError and let main() map them to 1
    def error(self, message: str) -> None:  # type: ignore[override]
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="tilesub",
                     description="substitution tilings: generation, orientation "
                                 "statistics, spectral estimates, hull metric")
    sub = parser.add_subparsers(dest="command", required=True,
                                parser_class=_Parser)

    def common(p: argparse.ArgumentParser) -> None:
        p.add_argument("--threads", type=int, default=1,
                       help="worker cap; 1 guarantees byte-identical reruns "
                            "(the current evaluators are deterministic at any "
                            "setting)")

    p = sub.add_parser("validate", help="check a rule file's dissection")
    p.add_argument("--rule", required=True)
    p.add_argument("--seed", type=int, default=0,
                   help="offset for the coverage sample sequence")
    common(p)
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("generate", help="write a depth-k supertile patch file")
    p.add_argument("--rule", required=True)
    p.add_argument("--prototile", type=int, default=0)
    p.add_argument("--depth", type=int, required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--recenter", action="store_true",
                   help="translate the bounding-box center to the origin")
    p.add_argument("--shift", type=float, nargs=2, metavar=("DX", "DY"),
                   help="translate the patch by (DX, DY) after any recentering")
    common(p)
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("render", help="render a patch file to SVG")
    p.add_argument("--rule", required=True)
    p.add_argument("--patch", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--ticks", action="store_true",
                   help="draw an orientation tick from each control point")
    common(p)
    p.set_defaults(func=cmd_render)

    p = sub.add_parser("matrix", help="substitution matrix and PF data")
    p.add_argument("--rule", required=True)
    p.add_argument("--out")
    common(p)
    p.set_defaults(func=cmd_matrix)

    p = sub.add_parser("stats", help="orientation discrepancy and Weyl sums "
                                     "at supertile prefix marks")
    p.add_argument("--rule", required=True)
    p.add_argument("--prototile", type=int, default=0)
    p.add_argument("--depth", type=int, required=True)
    p.add_argument("--out", required=True)
    common(p)
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("freq", help="per-orientation-class tile frequencies")
    p.add_argument("--rule", required=True)
    p.add_argument("--prototile", type=int, default=0)
    p.add_argument("--depth", type=int, required=True)
    p.add_argument("--out", required=True)
    common(p)
    p.set_defaults(func=cmd_freq)

    p = sub.add_parser("diffract", help="diffraction intensity grid from a patch")
    p.add_argument("--rule", required=True)
    p.add_argument("--patch", required=True)
    p.add_argument("--k-max", type=float, required=True)
    p.add_argument("--resolution", type=int, required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--image", help="also write a grayscale .pgm or .svg")
    common(p)
    p.set_defaults(func=cmd_diffract)

    p = sub.add_parser("autocorr", help="polar pair-correlation histogram")
    p.add_argument("--rule", required=True)
    p.add_argument("--patch", required=True)
    p.add_argument("--r-max", type=float, required=True)
    p.add_argument("--bins", type=int, default=10)
    p.add_argument("--angular-bins", type=int, default=24)
    p.add_argument("--r-edges", help="comma-separated radial bin edges")
    p.add_argument("--window", type=float, nargs=3, metavar=("CX", "CY", "R"),
                   help="restrict to a ball window before analysis")
    p.add_argument("--out", required=True)
    common(p)
    p.set_defaults(func=cmd_autocorr)

    p = sub.add_parser("hull-dist", help="metric distance between two patches")
    p.add_argument("--rule", required=True)
    p.add_argument("--patch-a", required=True, dest="patch_a")
    p.add_argument("--patch-b", required=True, dest="patch_b")
    p.add_argument("--eps-floor", type=float, default=1e-6)
    p.add_argument("--out")
    common(p)
    p.set_defaults(func=cmd_hull_dist)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.threads < 1:
            raise UsageError("--threads must be >= 1")
        return args.func(args)
    except UsageError as e:
        print(f"usage error: {e}", file=sys.stderr)
        return 1
    except CapExceededError as e:
        print(f"cap exceeded: {e}", file=sys.stderr)
        return 3
    except TilesubError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except OSError as e:
        print(f"i/o error: {e}", file=sys.stderr)
        return 4


def run() -> None:
    sys.exit(main())


if __name__ == "__main__":
    run()
