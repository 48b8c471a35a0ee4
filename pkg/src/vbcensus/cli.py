"""Command line front end: ``vbcensus <subcommand> ...``."""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import sys
from pathlib import Path
from typing import Optional, Sequence

from . import __version__
from .abgroup import format_structure
from .adams import StableData, compute_stable
from .ahss import diagonal_order, run_ahss
from .cache import cache_clear, cache_info, default_cache_dir, resolve_cached
from .census import census, count_bundles, load_reference_tables, local_orders, verify_census
from .errors import ConfigurationError, RangeError, VbcensusError, VerificationMismatch
from .proj_modules import sphere_module, stunted_module
from .render import FORMATS, render_chart
from .resolution import chart_of
from .steenrod import DEFAULT_DEGREE_CAP, adem_normalize

log = logging.getLogger("vbcensus")


def _dump(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


def _rank_offset(text: str) -> int:
    t = text.replace(" ", "").lower()
    table = {"l-1": 1, "l-2": 2, "1": 1, "2": 2}
    if t not in table:
        raise argparse.ArgumentTypeError(f"rank must be l-1 or l-2, got {text!r}")
    return table[t]


def _prime(text: str) -> int:
    try:
        p = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid prime {text!r}") from None
    if p not in (2, 3):
        raise argparse.ArgumentTypeError(f"prime must be 2 or 3, got {p}")
    return p


def _cache_opts(args) -> tuple[Optional[Path], bool]:
    return (Path(args.cache_dir) if args.cache_dir else None), not args.no_cache


# ---------------------------------------------------------------------------
# subcommands


def cmd_adem(args, out) -> int:
    elem = adem_normalize(args.expression, args.prime, args.strategy)
    out.write(str(elem) + "\n")
    return 0


def cmd_module(args, out) -> int:
    if args.k is None and args.t_max is None:
        raise ConfigurationError("give --k or --t-max to bound the module")
    m = stunted_module(args.prime, args.n, args.k, args.t_max)
    if args.format == "json":
        out.write(_dump(m.to_json()))
        return 0
    out.write(f"module p={m.prime} n={m.n} k={m.k} cells={len(m.degrees)}\n")
    for nm, d in zip(m.names, m.degrees):
        out.write(f"  {nm}  degree {d}\n")
    for a in m.arcs():
        coef = "" if a["coef"] == 1 else f"{a['coef']}*"
        out.write(f"  {a['op']}: {a['from']} -> {coef}{a['to']}\n")
    return 0


def cmd_resolve(args, out) -> int:
    cache_dir, use_cache = _cache_opts(args)
    if args.s_max < 0:
        raise ConfigurationError("s_max must be non-negative")
    if args.sphere:
        m = sphere_module(args.prime, 0)
        t_max = args.t_max if args.t_max is not None else 16
    else:
        t_max = args.t_max if args.t_max is not None else 2 * args.n + 1 + 14
        m = stunted_module(args.prime, args.n, args.k, t_max)
    res = resolve_cached(m, t_max, args.s_max, args.degree_cap, cache_dir, use_cache)
    chart = chart_of(res, stem_max=args.stem_max)
    doc = render_chart(chart, args.format, args.stem_min, args.stem_max)
    if args.out:
        Path(args.out).write_text(doc, encoding="utf-8")
        log.info("wrote %s", args.out)
    else:
        out.write(doc)
    return 0


def _expected_stable(n: int, prime: int) -> Optional[dict[int, list[int]]]:
    """Reference groups by stem, or None when no table covers (n, prime)."""
    ref = load_reference_tables()
    if n == 2 and prime == 2:
        vals = {int(k): v for k, v in ref["stable_sigma_cp2"]["values"].items()}
        return {i: vals.get(i, []) for i in range(0, 2 * n + 5)}
    key = "stable_2_local" if prime == 2 else "stable_3_local"
    tab = ref[key]
    if n < tab["n_min"]:
        return None
    row = tab["values"][str(n % tab["modulus"])]
    want = {i: [] for i in range(0, 2 * n + 1)}
    for rel, orders in row.items():
        want[2 * n + int(rel)] = orders
    return want


def _stable_mismatches(data: StableData) -> list[dict]:
    want = _expected_stable(data.n, data.prime)
    if want is None:
        raise ConfigurationError(f"no reference table for n={data.n} at p={data.prime}")
    bad = []
    for i, orders in sorted(want.items()):
        got = list(data.groups[i].orders)
        if sorted(got) != sorted(orders):
            bad.append({"stem": i, "computed": format_structure(got), "expected": format_structure(orders)})
    return bad


def cmd_pi_stable(args, out) -> int:
    cache_dir, use_cache = _cache_opts(args)
    data = compute_stable(args.n, args.prime, args.t_max, args.s_max, args.degree_cap, cache_dir, use_cache)
    bad = _stable_mismatches(data) if args.verify_paper else []
    if args.format == "json":
        doc = data.to_json()
        if args.verify_paper:
            doc["verification"] = {"ok": not bad, "mismatches": bad}
        out.write(_dump(doc))
    else:
        out.write(f"pi^s_i(Sigma CP^inf_{data.n}) localized at {data.prime}\n")
        for i in sorted(data.groups):
            out.write(f"  {i:>3}  {data.groups[i]}\n")
        for d in data.differentials:
            out.write(f"  Adams d{d['r']}: {tuple(d['source_pos'])} -> {tuple(d['target_pos'])}\n")
        if args.verify_paper:
            out.write("verification: " + ("ok" if not bad else f"{len(bad)} mismatch(es)") + "\n")
    if bad:
        raise VerificationMismatch("; ".join(f"stem {b['stem']}: {b['computed']} != {b['expected']}" for b in bad))
    return 0


def cmd_ahss(args, out) -> int:
    rank = args.l - args.rank
    pages = run_ahss(args.l, rank, args.prime)
    d = diagonal_order(pages[-1])
    shown = pages if args.dump_pages else pages[-1:]
    if args.format == "json":
        out.write(_dump({
            "l": args.l,
            "rank": rank,
            "prime": args.prime,
            "order": None if d.order == math.inf else d.order,
            "diagonal": [{"cell": list(c), "group": g} for c, g in d.cells],
            "pages": [p.to_json() for p in shown],
        }))
        return 0
    for p in shown:
        out.write(p.render() + "\n")
        for dr in p.differentials:
            if not dr.is_zero:
                out.write(f"  d{dr.r}: {dr.source} -> {dr.target}  image {format_structure(dr.image)}  ({dr.note})\n")
        out.write("\n")
    out.write(f"diagonal order: {d.order}\n")
    return 0


def cmd_count(args, out) -> int:
    n = count_bundles(args.l, args.rank)
    if args.format == "json":
        local = {str(p): o for p, o in local_orders(args.l, args.rank)}
        out.write(_dump({"l": args.l, "rank": args.l - args.rank, "count": n, "local": local}))
    else:
        out.write(f"{n}\n")
    return 0


def cmd_census(args, out) -> int:
    lmin = args.lmin if args.lmin is not None else (3 if args.rank == 1 else 4)
    if args.lmax < lmin:
        raise RangeError(f"lmax={args.lmax} is below lmin={lmin}")
    table = census(lmin, args.lmax, args.rank)
    bad = verify_census(table) if args.verify_paper else []
    if args.format == "json":
        doc = table.to_json()
        if args.verify_paper:
            doc["verification"] = {"ok": not bad, "mismatches": bad}
        out.write(_dump(doc))
    elif args.format == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["l", "rank", "count", "two_local", "three_local"])
        for r in table.rows:
            loc = dict(r.local)
            w.writerow([r.l, r.l - args.rank, r.count, loc[2], loc[3]])
        out.write(buf.getvalue())
    else:
        out.write(f"rank l-{args.rank} bundles over CP^l with vanishing Chern classes\n")
        out.write("   l  count  (2-local, 3-local)\n")
        for r in table.rows:
            loc = dict(r.local)
            out.write(f"{r.l:>4}  {r.count:>5}  ({loc[2]}, {loc[3]})\n")
        out.write(f"period: {table.period()}\n")
        if args.verify_paper:
            out.write("verification: " + ("ok" if not bad else f"{len(bad)} mismatch(es)") + "\n")
    if bad:
        raise VerificationMismatch(f"{len(bad)} census rows disagree with the reference table")
    return 0


def cmd_cache(args, out) -> int:
    d = Path(args.cache_dir) if args.cache_dir else None
    if args.action == "path":
        out.write(str(d or default_cache_dir()) + "\n")
    elif args.action == "info":
        out.write(_dump(cache_info(d)))
    else:
        out.write(f"removed {cache_clear(d)} entries\n")
    return 0


# ---------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    def global_options(suppress: bool) -> argparse.ArgumentParser:
        # subcommands repeat the global flags; SUPPRESS keeps them from
        # overwriting values given before the subcommand name
        g = argparse.ArgumentParser(add_help=False)
        dflt = (lambda v: argparse.SUPPRESS) if suppress else (lambda v: v)
        g.add_argument("--cache-dir", default=dflt(None),
                       help="cache directory (default: $VBCENSUS_CACHE_DIR or ./.vbcensus-cache)")
        g.add_argument("--no-cache", action="store_true", default=dflt(False),
                       help="neither read nor write the resolution cache")
        g.add_argument("-v", "--verbose", action="count", default=dflt(0))
        return g

    common = global_options(True)
    parser = argparse.ArgumentParser(prog="vbcensus", parents=[global_options(False)],
                                     description="Count bundles over CP^l with vanishing Chern classes.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("adem", parents=[common], help="normal form of a product of Steenrod operations")
    p.add_argument("--prime", type=_prime, default=2)
    p.add_argument("--strategy", choices=("leftmost", "rightmost"), default="leftmost")
    p.add_argument("expression")
    p.set_defaults(func=cmd_adem)

    p = sub.add_parser("module", parents=[common], help="Steenrod action on a stunted projective space")
    p.add_argument("--prime", type=_prime, default=2)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int, default=None)
    p.add_argument("--t-max", type=int, default=None)
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.set_defaults(func=cmd_module)

    p = sub.add_parser("resolve", parents=[common], help="minimal resolution and Ext chart")
    p.add_argument("--prime", type=_prime, default=2)
    p.add_argument("--n", type=int, default=1)
    p.add_argument("--k", type=int, default=None)
    p.add_argument("--sphere", action="store_true", help="resolve F_p instead of a stunted projective space")
    p.add_argument("--t-max", type=int, default=None)
    p.add_argument("--s-max", type=int, default=12)
    p.add_argument("--degree-cap", type=int, default=DEFAULT_DEGREE_CAP)
    p.add_argument("--stem-min", type=int, default=None)
    p.add_argument("--stem-max", type=int, default=None)
    p.add_argument("--format", choices=FORMATS, default="ascii")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_resolve)

    p = sub.add_parser("pi-stable", parents=[common], help="stable homotopy of Sigma CP^inf_n in stems <= 2n+4")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--prime", type=_prime, default=2)
    p.add_argument("--t-max", type=int, default=None)
    p.add_argument("--s-max", type=int, default=None)
    p.add_argument("--degree-cap", type=int, default=DEFAULT_DEGREE_CAP)
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.add_argument("--verify-paper", action="store_true", help="compare against the embedded reference table")
    p.set_defaults(func=cmd_pi_stable)

    p = sub.add_parser("ahss", parents=[common], help="AHSS pages for stable maps CP^l -> Sigma CP^inf_r")
    p.add_argument("--l", type=int, required=True)
    p.add_argument("--rank", type=_rank_offset, required=True, help="l-1 or l-2")
    p.add_argument("--prime", type=_prime, default=2)
    p.add_argument("--dump-pages", action="store_true", help="show E2 and E4 as well as E-infinity")
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.set_defaults(func=cmd_ahss)

    p = sub.add_parser("count", parents=[common], help="number of bundles for one l")
    p.add_argument("--l", type=int, required=True)
    p.add_argument("--rank", type=_rank_offset, required=True)
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.set_defaults(func=cmd_count)

    p = sub.add_parser("census", parents=[common], help="counts for a range of l")
    p.add_argument("--rank", type=_rank_offset, required=True)
    p.add_argument("--lmax", type=int, required=True)
    p.add_argument("--lmin", type=int, default=None)
    p.add_argument("--format", choices=("text", "json", "csv"), default="text")
    p.add_argument("--verify-paper", action="store_true", help="compare against the embedded reference table")
    p.set_defaults(func=cmd_census)

    p = sub.add_parser("cache", parents=[common], help="inspect or clear the resolution cache")
    p.add_argument("action", choices=("info", "clear", "path"))
    p.set_defaults(func=cmd_cache)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    level = logging.WARNING - 10 * min(args.verbose, 2)
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)
    out = sys.stdout
    try:
        return args.func(args, out)
    except VbcensusError as exc:
        sys.stderr.write(json.dumps({"error": exc.category, "message": str(exc)}, sort_keys=True) + "\n")
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())
