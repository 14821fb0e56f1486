"""Command-line driver: ``reglab matrix|scan|appendix|lattice``.

Exit codes: 0 success or verdict yes, 1 usage error, 2 degenerate input,
3 undecided or non-convergent.
"""
from __future__ import annotations

import argparse
import dataclasses
import json
import logging
import sys
from dataclasses import dataclass, field

from mpmath import nstr

from . import elliptic, lattice
from .exact import format_exact, parse_rational
from .twisted import (
    DegenerateSeeds, GlueData, PrecisionPolicy, interval_mid, interval_radius, regulator_matrix,
    sample_triples, scan_parameters,
)

SCHEMA_VERSION = 1
EXIT_OK, EXIT_USAGE, EXIT_DEGENERATE, EXIT_UNDECIDED = 0, 1, 2, 3

log = logging.getLogger("reglab")


class UsageError(ValueError):
    pass


@dataclass
class RunConfig:
    command: str
    arguments: dict
    precision: dict | None = None
    quadrature: dict | None = None
    outputs: dict = field(default_factory=dict)
    report_format: str = "json"

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)


def _seeds(text: str) -> tuple:
    parts = [p for p in text.split(",")]
    if len(parts) != 3:
        raise UsageError(f"expected three comma-separated rationals, got {text!r}")
    try:
        return tuple(parse_rational(p) for p in parts)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _floats(text: str, n: int, what: str) -> tuple:
    try:
        vals = tuple(float(p) for p in text.split(","))
    except ValueError:
        raise UsageError(f"malformed {what} {text!r}") from None
    if len(vals) != n:
        raise UsageError(f"{what} needs {n} comma-separated numbers")
    return vals


def _policy(args) -> PrecisionPolicy:
    try:
        if getattr(args, "config", None):
            pol = PrecisionPolicy.from_file(args.config)
        else:
            pol = PrecisionPolicy.from_env()
        kw = {}
        if getattr(args, "bits", None):
            kw["initial_bits"] = args.bits
        if getattr(args, "max_bits", None):
            kw["max_bits"] = args.max_bits
        if kw:
            kw.setdefault("max_bits", max(pol.max_bits, kw.get("initial_bits", 0)))
            pol = dataclasses.replace(pol, **kw)
        return pol
    except (OSError, ValueError, json.JSONDecodeError) as exc:
        raise UsageError(f"bad precision policy: {exc}") from None


def _policy_dict(p: PrecisionPolicy) -> dict:
    return {"initial_bits": p.initial_bits, "max_bits": p.max_bits,
            "det_tolerance_mode": p.det_tolerance_mode}


def _emit(report: dict, cfg: RunConfig, path: str | None) -> None:
    doc = {"schema_version": SCHEMA_VERSION, "config": cfg.to_dict(), **report}
    text = json.dumps(doc, indent=2, sort_keys=False, default=str) + "\n"
    if path == "-":
        sys.stdout.write(text)
    elif path:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)


# -- matrix ----------------------------------------------------------------


def cmd_matrix(args) -> int:
    seeds = _seeds(args.seeds)
    policy = _policy(args)
    cfg = RunConfig("matrix", {"seeds": [format_exact(s) for s in seeds], "variant": args.variant,
                               "lam": args.lam},
                    precision=_policy_dict(policy), outputs={"json": args.json})
    try:
        lam = parse_rational(args.lam)
        g = GlueData(seeds, lam, args.variant)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    try:
        m = regulator_matrix(g, policy)
    except DegenerateSeeds as exc:
        print(f"degenerate: {exc.reason}")
        _emit({"invertible": "no", "degenerate": True, "reason": exc.reason}, cfg, args.json)
        return EXIT_DEGENERATE
    rows = [[nstr(interval_mid(e), 20) for e in r.entries] for r in m.rows]
    report = {
        "basis": list(g.basis),
        "rows": rows,
        "row_radii": [[nstr(interval_radius(e), 5) for e in r.entries] for r in m.rows],
        "determinant": {"mid": nstr(m.det_mid, 20), "radius": nstr(m.det_radius, 5)},
        "invertible": m.invertible,
        "degenerate": m.degenerate,
        "bits": m.precision,
    }
    for r in rows:
        print("  [" + ", ".join(r) + "]")
    print(f"det = {report['determinant']['mid']} +- {report['determinant']['radius']}"
          f"  ({m.precision} bits)")
    print(f"invertible: {m.invertible}" + ("  (degenerate: complex-conjugate roots)" if m.degenerate else ""))
    _emit(report, cfg, args.json)
    if m.degenerate:
        return EXIT_DEGENERATE
    return EXIT_OK if m.invertible == "yes" else EXIT_UNDECIDED


# -- scan ------------------------------------------------------------------


def _grid(args) -> tuple[list, dict]:
    if args.triples:
        triples = [_seeds(t) for t in args.triples.split(";") if t.strip()]
        spec = {"kind": "grid", "triples": args.triples}
    elif args.triples_file:
        with open(args.triples_file, encoding="utf-8") as fh:
            lines = [ln.strip() for ln in fh if ln.strip() and not ln.startswith("#")]
        triples = [_seeds(ln) for ln in lines]
        spec = {"kind": "grid", "file": args.triples_file}
    else:
        if args.sample < 1 or args.max_den < 4:
            raise UsageError("need --sample >= 1 and --max-den >= 4")
        triples = sample_triples(args.sample, args.max_den, args.seed)
        spec = {"kind": "sample", "n": args.sample, "max_den": args.max_den, "seed": args.seed}
    if not triples:
        raise UsageError("empty parameter grid")
    return triples, spec


def cmd_scan(args) -> int:
    policy = _policy(args)
    triples, spec = _grid(args)
    cfg = RunConfig("scan", {"grid": spec, "workers": args.workers}, precision=_policy_dict(policy),
                    outputs={"csv": args.csv, "json": args.json},
                    report_format="csv" if args.csv else "json")
    rep = scan_parameters(triples, policy, workers=args.workers, spec=spec)
    c = rep.counts
    summary = sys.stderr if args.csv == "-" or args.json == "-" else sys.stdout
    print(f"scanned {len(rep.entries)}: invertible {c['invertible']}, degenerate {c['degenerate']}, "
          f"undecided {c['undecided']}; fraction {rep.invertible_fraction:.4f}", file=summary)
    if args.csv:
        csv_text = rep.to_csv()
        if args.csv == "-":
            sys.stdout.write(csv_text)
        else:
            with open(args.csv, "w", encoding="utf-8", newline="") as fh:
                fh.write(csv_text)
    _emit(rep.to_dict(), cfg, args.json)
    return EXIT_OK


# -- appendix --------------------------------------------------------------


def _qcfg(args, base: elliptic.QuadratureConfig) -> elliptic.QuadratureConfig:
    kw = {}
    if args.levels is not None:
        kw["levels"] = args.levels
    if args.order is not None:
        kw["order"] = args.order
    try:
        return dataclasses.replace(base, **kw)
    except elliptic.QuadratureError as exc:
        raise UsageError(str(exc)) from None


ZERO_PAIRS = {("f1", "omega2"), ("f2", "omega1")}


def cmd_appendix(args) -> int:
    which = args.which
    if which == "claim1":
        try:
            curve = elliptic.EllipticCurve.parse(args.curve)
        except (ValueError, TypeError) as exc:
            raise UsageError(f"bad curve: {exc}") from None
        q = _qcfg(args, elliptic.QuadratureConfig())
        cfg = RunConfig("appendix", {"which": which, "curve": args.curve}, quadrature=q.to_dict(),
                        outputs={"json": args.json})
        res = elliptic.det2x2_claim(curve, q)
        print(f"curve y^2 = {res.curve}")
        for row, err in zip(res.matrix, res.errors):
            print("  [" + ", ".join(f"{v:.12g} +- {e:.2g}" for v, e in zip(row, err)) + "]")
        print(f"det = {res.det:.12g} +- {res.det_error:.3g}; verdict {res.verdict} (numerical evidence)")
        _emit(res.to_dict(), cfg, args.json)
        return EXIT_OK if res.verdict == "nonzero" else EXIT_UNDECIDED

    annulus = _floats(args.annulus, 2, "annulus")
    q = _qcfg(args, elliptic.DEGENERATE_DEFAULT)
    try:
        if which == "degenerate":
            key = elliptic._pair_key(args.pair)
            res = elliptic.degenerate_integral(key, annulus, q)
            ref = elliptic.degenerate_integral(("f1", "omega1"), annulus, q)
            if key in ZERO_PAIRS:
                expect = "zero"
                passed = abs(res.value) <= 1e-6 * abs(ref.value) + res.error_estimate
            elif key == ("f1", "omega1"):
                expect, passed = "positive", res.value > 0
            else:
                expect, passed = "negative", res.value < 0
            report = {"pair": list(key), "integrand": res.note, "expect": expect, "pass": passed,
                      "result": res.to_dict()}
            print(f"{key[0]},{key[1]} on [{annulus[0]}, {annulus[1]}]: {res.value:.12g} "
                  f"+- {res.error_estimate:.3g}  ({res.note}); expect {expect}: "
                  f"{'pass' if passed else 'fail'}")
        else:
            chk = elliptic.verify_w_substitution(annulus, q)
            res = None
            passed = chk.passed
            report = {"pass": passed, "check": chk.to_dict()}
            print(f"(f1,omega1) = {chk.value_f1_omega1:.12g}, (f2,omega2) = {chk.value_f2_omega2:.12g}, "
                  f"tolerance {chk.tolerance:.3g}: {'pass' if passed else 'fail'}")
    except elliptic.QuadratureError as exc:
        raise UsageError(str(exc)) from None
    cfg = RunConfig("appendix", {"which": which, "pair": getattr(args, "pair", None),
                                 "annulus": list(annulus)}, quadrature=q.to_dict(),
                    outputs={"json": args.json})
    _emit(report, cfg, args.json)
    if res is not None and not res.converged:
        return EXIT_UNDECIDED
    return EXIT_OK if passed else EXIT_UNDECIDED


# -- lattice ---------------------------------------------------------------


def cmd_lattice(args) -> int:
    L = lattice.BL_LATTICE
    q = args.query
    try:
        if q == "pair":
            a, b = L.parse_class(args.a), L.parse_class(args.b)
            value = lattice.pair(L, a, b)
            report = {"a": a.label(), "b": b.label(), "value": value}
            print(value)
        elif q == "self":
            a = L.parse_class(args.cls)
            value = lattice.self_intersection(L, a)
            report = {"class": a.label(), "value": value}
            print(value)
        elif q == "picard":
            fc = lattice.config_from_string(args.chains)
            value = lattice.picard_number(fc)
            report = {"chains": list(fc.chains), "nodes": fc.nodes, "picard_number": value}
            print(value)
        else:
            cfgs = lattice.enumerate_max_picard_configs(args.nodes, args.rank)
            report = {"nodes": args.nodes, "rank": args.rank, "count": len(cfgs),
                      "configs": [list(c.chains) for c in cfgs]}
            for c in cfgs:
                print(",".join(map(str, c.chains)))
    except lattice.LatticeError as exc:
        raise UsageError(str(exc)) from None
    cfg = RunConfig("lattice", {k: v for k, v in vars(args).items() if k not in ("func",)},
                    outputs={"json": args.json})
    _emit(report, cfg, args.json)
    return EXIT_OK


# -- parser ----------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="reglab", description="Regulator computations for degenerate K3 and elliptic curves.")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def precision_flags(sp):
        sp.add_argument("--bits", type=int, help="initial working precision")
        sp.add_argument("--max-bits", type=int, help="precision cap (also REGLAB_MAX_BITS)")
        sp.add_argument("--config", help="JSON precision policy file")
        sp.add_argument("--json", help="write a JSON report here ('-' for stdout)")

    m = sub.add_parser("matrix", help="3x3 regulator matrix for one seed triple")
    m.add_argument("--seeds", required=True, help="y0,y1,y2 as p/q rationals")
    m.add_argument("--lam", default="1", help="gluing twist (rescaled to 1)")
    m.add_argument("--variant", choices=("r2", "r4"), default="r2")
    precision_flags(m)
    m.set_defaults(func=cmd_matrix)

    s = sub.add_parser("scan", help="invertibility over many seed triples")
    g = s.add_mutually_exclusive_group()
    g.add_argument("--triples", help="';'-separated list of y0,y1,y2")
    g.add_argument("--triples-file", help="one y0,y1,y2 per line")
    s.add_argument("--sample", type=int, default=1000, help="number of random triples")
    s.add_argument("--max-den", type=int, default=64)
    s.add_argument("--seed", type=int, default=0, help="sampler seed")
    s.add_argument("--workers", type=int, default=1)
    s.add_argument("--csv", help="write the CSV report here ('-' for stdout)")
    precision_flags(s)
    s.set_defaults(func=cmd_scan)

    a = sub.add_parser("appendix", help="elliptic-curve regulator integrals")
    a.add_argument("which", choices=("claim1", "degenerate", "substitution"))
    a.add_argument("--curve", default="x^3-x", help="cubic h(x) of y^2 = h(x)")
    a.add_argument("--pair", default="f1,omega1", help="f1|f2,omega1|omega2")
    a.add_argument("--annulus", default="0.1,10", help="inner,outer radius")
    a.add_argument("--levels", type=int)
    a.add_argument("--order", type=int)
    a.add_argument("--json")
    a.set_defaults(func=cmd_appendix)

    lt = sub.add_parser("lattice", help="Picard lattice queries")
    lsub = lt.add_subparsers(dest="query", required=True, parser_class=_Parser)
    lp = lsub.add_parser("pair")
    lp.add_argument("--a", required=True)
    lp.add_argument("--b", required=True)
    ls = lsub.add_parser("self")
    ls.add_argument("--class", dest="cls", required=True)
    lpi = lsub.add_parser("picard")
    lpi.add_argument("--chains", required=True, help="comma-separated chain lengths")
    lc = lsub.add_parser("configs")
    lc.add_argument("--nodes", type=int, default=24)
    lc.add_argument("--rank", type=int, default=20)
    for sp_ in (lp, ls, lpi, lc):
        sp_.add_argument("--json")
    lt.set_defaults(func=cmd_lattice)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"reglab: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
