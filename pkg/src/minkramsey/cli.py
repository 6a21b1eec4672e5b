"""Command-line entry point: ``minkramsey <command> ...``.

Every command prints its main JSON result on stdout and also writes it,
with a ``manifest.json``, into ``--out`` (default: the working directory).
Exit codes: 0 success, 1 domain error (error JSON on stdout), 2 usage error.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .errors import DomainError, MalformedInput
from .norms import (
    DEFAULT_TOL,
    PolygonalNorm,
    builtin_norm,
    facet_index,
    min_side_length,
    norm_from_json,
)


def _plain(o):
    if isinstance(o, np.ndarray):
        return o.tolist()
    if isinstance(o, np.generic):
        return o.item()
    raise TypeError(f"not JSON serializable: {type(o).__name__}")


def _dump(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2, default=_plain)


def _vec(text: str) -> np.ndarray:
    try:
        x, y = (float(t) for t in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected 'x,y', got {text!r}") from None
    return np.array([x, y])


def _window(text: str) -> tuple[float, float, float, float]:
    try:
        vals = tuple(float(t) for t in text.split(","))
    except ValueError:
        vals = ()
    if len(vals) != 4:
        raise argparse.ArgumentTypeError("window is 'xmin,xmax,ymin,ymax'")
    return vals


def _read_json(path: str):
    try:
        return json.loads(Path(path).read_text())
    except OSError as exc:
        raise MalformedInput(f"cannot read {path}: {exc.strerror}") from exc
    except json.JSONDecodeError as exc:
        raise MalformedInput(f"{path} is not valid JSON: {exc}") from exc


def load_norm(ref: str, tol: float):
    """A JSON file path, or a built-in name such as ``square`` or ``l3``."""
    if Path(ref).is_file():
        return norm_from_json(_read_json(ref), tol)
    try:
        return builtin_norm(ref)
    except MalformedInput:
        raise MalformedInput(f"{ref!r} is neither a norm file nor a built-in norm") from None


def norm_hash(norm) -> str:
    return hashlib.sha256(json.dumps(norm.to_json(), sort_keys=True).encode()).hexdigest()


class Run:
    """Collects output files and writes the manifest."""

    def __init__(self, args):
        self.args = args
        self.out = Path(args.out)
        self.out.mkdir(parents=True, exist_ok=True)
        self.outputs: list[str] = []
        self.norm = None
        self.oracle = None

    def path(self, name: str | None, default: str) -> Path:
        p = Path(name) if name else self.out / default
        if not p.is_absolute() and name:
            p = self.out / p
        self.outputs.append(str(p))
        return p

    def write_json(self, obj, name: str | None, default: str) -> Path:
        p = self.path(name, default)
        p.write_text(_dump(obj) + "\n")
        return p

    def manifest(self) -> dict:
        params = {k: v for k, v in sorted(vars(self.args).items()) if k not in ("func", "out")}
        man = {
            "command": self.args.command,
            "parameters": params,
            "norm_sha256": norm_hash(self.norm) if self.norm is not None else None,
            "oracle": self.oracle,
            "seed": getattr(self.args, "seed", 0),
            "version": __version__,
            "outputs": self.outputs,
        }
        (self.out / "manifest.json").write_text(_dump(man) + "\n")
        return man


# -- commands ---------------------------------------------------------------------


def cmd_norm(args, run: Run) -> dict:
    n = load_norm(args.file, args.tol)
    run.norm = n
    out: dict = {"norm": n.to_json()}
    if isinstance(n, PolygonalNorm):
        out["facets"] = [
            {"k": k, "v": f.v.tolist(), "w": f.w.tolist(), "lambda": f.lam} for k, f in enumerate(n.facets)
        ]
        out["min_side_length"] = min_side_length(n)
    if args.eval is not None:
        out["x"] = args.eval.tolist()
        out["value"] = float(n.norm(args.eval))
        if isinstance(n, PolygonalNorm):
            out["facet_index"] = list(facet_index(n, args.eval, args.tol))
    run.write_json(out, None, "norm.json")
    return out


def cmd_verify_copy(args, run: Run) -> dict:
    from .oracles import parse_oracle
    from .progressions import CopyCertificate, verify_copy

    cert = CopyCertificate.from_json(_read_json(args.cert))
    run.norm = cert.norm
    run.oracle = cert.oracle
    verdict = verify_copy(cert.norm, cert.sequence, args.tol)
    out = {"accepted": verdict.accepted, "max_deviation": verdict.max_deviation, "points": len(cert.sequence.points)}
    if args.check_colours:
        cols = parse_oracle(cert.oracle, cert.norm)(cert.sequence.points)
        out["colours_ok"] = bool(np.all(cols == cert.colour))
        out["accepted"] = out["accepted"] and out["colours_ok"]
    run.write_json(out, None, "verdict.json")
    return out


def cmd_find_copy(args, run: Run) -> dict:
    from .oracles import parse_oracle
    from .search import SearchConfig, find_copy

    n = load_norm(args.norm, args.tol)
    run.norm = n
    oracle = parse_oracle(args.oracle, n)
    run.oracle = oracle.name
    cfg = SearchConfig(
        q=args.q,
        prefix=args.prefix,
        density=args.density,
        density_cap=args.density_cap,
        tol=args.tol,
        max_iterations=args.max_iterations,
        scale=args.scale,
        seed=args.seed,
    )
    result = find_copy(n, oracle, cfg)
    cert = result.certificate.to_json()
    run.write_json(cert, args.cert, "certificate.json")
    run.write_json(result.trace, args.trace, "trace.json")
    if not args.no_svg:
        from .plotting import plot_search

        plot_search(result, run.path(args.svg, "find-copy.svg"))
    return cert


def cmd_ring_colouring(args, run: Run) -> dict:
    from .rings import SAMPLERS, build_ring_colouring

    n = load_norm(args.norm, args.tol)
    run.norm = n
    sampler = SAMPLERS[args.set](args.q) if args.set == "geometric" else SAMPLERS[args.set]()
    rc = build_ring_colouring(n, sampler, args.rings)
    out = rc.to_json()
    if args.query:
        out["queries"] = []
        for p in args.query:
            rc = rc.covering(float(n.norm(p)))
            ring = rc.ring_of(p)
            out["queries"].append({"point": p.tolist(), "ring": ring, "colour": rc.colour(p)})
    run.write_json(out, None, "rings.json")
    return out


def cmd_distinct_subset(args, run: Run) -> dict:
    from .distinct import (
        all_distances_distinct,
        brute_force_distinct_subset,
        red_blue_filter,
        select_contracting,
    )

    n = load_norm(args.norm, args.tol)
    run.norm = n
    raw = _read_json(args.points)
    pts = np.asarray(raw["points"] if isinstance(raw, dict) else raw, dtype=float)
    cs = select_contracting(pts, n, args.limit, args.tol)
    res = red_blue_filter(cs, n, args.tol)
    out = {
        "limit": cs.y.tolist(),
        "contracting": cs.pts.tolist(),
        "kept": res.kept.tolist(),
        "colours": {str(k): v for k, v in sorted(res.colours.items())},
        "pairwise_distinct": all_distances_distinct(res.kept, n, args.tol),
    }
    if args.oracle:
        best = brute_force_distinct_subset(pts, n, args.tol)
        out["brute_force"] = {"size": len(best), "indices": best}
    run.write_json(out, None, "distinct.json")
    return out


def cmd_peel(args, run: Run) -> dict:
    from .hypergraph import FiniteHypergraph, core_disjointness_check, is_polychromatic, peel_transversals

    h = FiniteHypergraph.from_json(_read_json(args.hypergraph))
    ok, pair = core_disjointness_check(h, args.k)
    res = peel_transversals(h, args.k, args.colours)
    out = res.to_json()
    out["cores_disjoint"] = ok
    out["offending_cores"] = list(pair) if pair else None
    out["polychromatic"] = res.success and is_polychromatic(h, res.colouring, args.colours)
    run.write_json(out, None, "peel.json")
    return out


def cmd_bisector(args, run: Run) -> dict:
    from .bisectors import BisectorSpec, count_intersections, linearity_test, trace_bisector

    b1 = BisectorSpec(args.p, args.y1, args.y2)
    tr1 = trace_bisector(b1, args.window, args.step, args.tol)
    traces = [tr1]
    if args.mode == "trace":
        out = tr1.to_json()
        if len(tr1.points) >= 3:
            verdict = linearity_test(tr1.points, tol=args.tol)
            out["linear"] = verdict.linear
            out["max_line_deviation"] = verdict.max_deviation
        inter = None
    else:
        if args.z1 is None or args.z2 is None:
            raise MalformedInput("intersect needs the second pair --z1 and --z2")
        b2 = BisectorSpec(args.p2 or args.p, args.z1, args.z2)
        traces.append(trace_bisector(b2, args.window, args.step, args.tol))
        inter = count_intersections(b1, b2, args.window, args.step, args.tol)
        out = {"bisectors": [b1.to_json(), b2.to_json()], **inter.to_json()}
    run.write_json(out, None, f"bisector-{args.mode}.json")
    if not args.no_svg:
        from .plotting import plot_bisectors

        plot_bisectors(traces, run.path(args.svg, f"bisector-{args.mode}.svg"), inter, args.window)
    return out


# -- parser -----------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", default=".", help="directory for output files (default: cwd)")
    common.add_argument("--tol", type=float, default=DEFAULT_TOL, help="tolerance (env MINKRAMSEY_TOL)")

    p = argparse.ArgumentParser(prog="minkramsey", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("norm", parents=[common], help="build a norm and evaluate it")
    s.add_argument("--file", "--norm", dest="file", required=True, help="norm JSON file or built-in name")
    s.add_argument("--eval", type=_vec, help="point x,y to evaluate")
    s.set_defaults(func=cmd_norm)

    s = sub.add_parser("verify-copy", parents=[common], help="check a copy certificate")
    s.add_argument("--cert", required=True)
    s.add_argument("--check-colours", action="store_true", help="re-query the certificate's oracle")
    s.set_defaults(func=cmd_verify_copy)

    s = sub.add_parser("find-copy", parents=[common], help="search for a monochromatic G(q) copy")
    s.add_argument("--norm", required=True)
    s.add_argument("--oracle", required=True, help="built-in oracle spec or module:function")
    s.add_argument("--q", type=float, required=True)
    s.add_argument("--prefix", type=int, default=8)
    s.add_argument("--density", type=int, default=64)
    s.add_argument("--density-cap", type=int, default=4096)
    s.add_argument("--max-iterations", type=int, default=10_000)
    s.add_argument("--scale", type=int, default=1, help="target q^(s-1) G(q)")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--cert", help="certificate file (default certificate.json)")
    s.add_argument("--trace", help="trace file (default trace.json)")
    s.add_argument("--svg", help="figure file (default find-copy.svg)")
    s.add_argument("--no-svg", action="store_true")
    s.set_defaults(func=cmd_find_copy)

    s = sub.add_parser("ring-colouring", parents=[common], help="nested-ball colouring")
    s.add_argument("--norm", required=True)
    s.add_argument("--set", choices=("powers-of-two", "geometric"), default="powers-of-two")
    s.add_argument("--q", type=float, default=0.5, help="ratio for --set geometric")
    s.add_argument("--rings", type=int, default=10)
    s.add_argument("--query", type=_vec, action="append", help="point x,y to colour (repeatable)")
    s.set_defaults(func=cmd_ring_colouring)

    s = sub.add_parser("distinct-subset", parents=[common], help="subset with distinct distances")
    s.add_argument("--norm", required=True)
    s.add_argument("--points", required=True, help='JSON list of points or {"points": [...]}')
    s.add_argument("--limit", type=_vec, help="accumulation point (default: heuristic)")
    s.add_argument("--oracle", action="store_true", help="also run the exhaustive search")
    s.set_defaults(func=cmd_distinct_subset)

    s = sub.add_parser("peel", parents=[common], help="polychromatic colouring of a hypergraph")
    s.add_argument("--hypergraph", required=True, help='JSON {"V": int, "edges": [[...]]}')
    s.add_argument("--k", type=int, required=True)
    s.add_argument("--colours", type=int, required=True)
    s.set_defaults(func=cmd_peel)

    s = sub.add_parser("bisector", parents=[common], help="trace or intersect l_p bisectors")
    s.add_argument("mode", choices=("trace", "intersect"))
    s.add_argument("--p", type=float, required=True)
    s.add_argument("--y1", type=_vec, required=True)
    s.add_argument("--y2", type=_vec, required=True)
    s.add_argument("--p2", type=float, help="p of the second bisector (default --p)")
    s.add_argument("--z1", type=_vec, help="second pair, first point")
    s.add_argument("--z2", type=_vec, help="second pair, second point")
    s.add_argument("--window", type=_window, default=(-10.0, 10.0, -10.0, 10.0))
    s.add_argument("--step", type=float, default=0.05)
    s.add_argument("--svg")
    s.add_argument("--no-svg", action="store_true")
    s.set_defaults(func=cmd_bisector)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)  # exits with 2 on usage errors
    try:
        run = Run(args)
        out = args.func(args, run)
    except DomainError as exc:
        print(_dump(exc.to_json()))
        return 1
    run.manifest()
    print(_dump(out))
    if args.command == "verify-copy" and not out["accepted"]:
        return 1
    return 0


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
