"""Command-line front end."""
from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
import time
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import cubic, quadratic
from .arith import BoundExceeded, parse_rational, primes_up_to
from .classgroup import UnsupportedCase
from .densities import density_csv, split_density
from .sieve import UndefinedBound

CACHE_VERSION = 1


@dataclass
class Config:
    cache_dir: Path = field(default_factory=lambda: Path(
        os.environ.get("CLASS_SIEVE_CACHE", Path.home() / ".cache" / "class_sieve")))
    limits: dict = field(default_factory=lambda: {2: quadratic.MAX_X, 3: cubic.MAX_X})
    threads: int = 1
    output: str = "json"
    seed: int = 0


class CliError(Exception):
    pass


def _log(msg: str) -> None:
    print(msg, file=sys.stderr)


# ---- caches -----------------------------------------------------------------------

def cache_path(cfg: Config, degree: int, X: int, sign: str) -> Path:
    tag = "qcen" if degree == 2 else "ccen"
    return cfg.cache_dir / f"{tag}_d{degree}_{sign}_X{X}_v{CACHE_VERSION}.bin"


def load_census(cfg: Config, degree: int, X: int, sign: str = "both", refresh: bool = False):
    if degree not in (2, 3):
        raise CliError(_out_of_scope(degree))
    if X > cfg.limits[degree]:
        raise BoundExceeded(f"X={X} exceeds the configured limit {cfg.limits[degree]} for degree {degree}")
    sign = quadratic.normalize_sign(sign) if degree == 2 else cubic.normalize_sign(sign)
    path = cache_path(cfg, degree, X, sign)
    mod = quadratic if degree == 2 else cubic
    if path.exists() and not refresh:
        return mod.read_census(path) if degree == 2 else mod.read_census(path, sign)
    _log(f"building degree-{degree} census up to {X} ({sign}) -> {path}")
    census = mod.enumerate_quadratic(X, sign) if degree == 2 else mod.enumerate_cubic(X, sign)
    mod.write_census(path, census)
    return census


def _out_of_scope(degree: int) -> str:
    names = {4: "quartic", 5: "quintic"}
    if degree in names:
        return (f"{names[degree]} enumeration out of scope: it needs Bhargava's "
                f"parametrization of {names[degree]} rings")
    return f"unsupported degree {degree}"


# ---- commands ---------------------------------------------------------------------

def cmd_enumerate(args, cfg: Config) -> int:
    if args.degree not in (2, 3):
        raise CliError(_out_of_scope(args.degree))
    t = time.perf_counter()
    census = load_census(cfg, args.degree, args.x, args.sign, refresh=True)
    dt = time.perf_counter() - t
    D = census.discriminants if args.degree == 2 else census.disc
    print(f"N={len(D)} positive={int((D > 0).sum())} negative={int((D < 0).sum())} X={args.x}")
    _log(f"enumerated in {dt:.2f}s")
    if args.csv:
        (quadratic if args.degree == 2 else cubic).write_csv(args.csv, census)
    return 0


def _conditions(args) -> list:
    out = []
    for kind in ("split", "inert", "ramified"):
        for p in getattr(args, kind) or ():
            out.append((p, kind))
    return out


def cmd_count(args, cfg: Config) -> int:
    conds = _conditions(args)
    if args.degree == 2:
        census = load_census(cfg, 2, args.x, args.sign)
        direct = quadratic.count_with_conditions_direct(args.x, args.sign, conds, census)
        sieved = quadratic.count_with_conditions_sieve(args.x, args.sign, conds)
        dens = quadratic.density_prediction_quadratic(conds)
        main = quadratic.main_term(args.x, args.sign, conds)
        rows = {"X": args.x, "sign": args.sign, "conditions": conds, "direct": direct,
                "inclusion_exclusion": sieved, "agree": direct == sieved, "delta": str(dens),
                "main_term": main, "deviation": direct - main}
        _emit(rows, args.format)
        return 0 if direct == sieved else 1
    if args.degree == 3:
        if args.inert or args.ramified:
            raise CliError("degree 3 counts support --split conditions only")
        census = load_census(cfg, 3, args.x, "both")
        keep = np.ones(len(census), dtype=bool)
        dens = Fraction(1)
        for p in args.split or ():
            keep &= cubic.split_mask(census, p)
            dens *= split_density(3, p)
        n = int(keep.sum())
        rows = {"X": args.x, "split": list(args.split or ()), "count": n, "total": len(census),
                "delta": str(dens), "ratio": n / len(census) if len(census) else None,
                "deviation": n - float(dens) * len(census)}
        _emit(rows, args.format)
        return 0
    raise CliError(f"conditions on degree {args.degree} are not supported")


def cmd_sieve(args, cfg: Config) -> int:
    from . import sieve

    certs = []
    extra = {}
    if args.source == "synthetic":
        rng = np.random.default_rng(args.seed if args.seed is not None else cfg.seed)
        for _ in range(args.instances):
            inst = sieve.synthetic_instance(rng, args.items, args.zmax)
            certs.append(sieve.certify_lemma(inst))
    else:
        degree = 2 if args.source == "quadratic" else 3
        delta = args.delta if args.delta is not None else (Fraction(1, 6) if degree == 2 else Fraction(2, 25))
        census = load_census(cfg, degree, args.x, "both")
        make = sieve.quadratic_instance if degree == 2 else sieve.cubic_instance
        inst = make(args.x, delta, census)
        certs.append(sieve.certify_lemma(inst))
        windows = []
        for X in (args.x // 100, args.x // 10, args.x):
            if X < 10:
                continue
            sub = make(X, delta, census)
            if sub.primes:
                windows.append(sieve.mean_window(sieve.compute_stats(sub), sub.z))
        if windows:
            c0, c1 = sieve.fit_window(windows)
            extra = {"delta": str(delta), "c0": c0, "c1": c1}
    ok = all(c.holds and c.variance_identity and c.mean_identity for c in certs)
    if len(certs) == 1:
        payload = certs[0].as_dict() | extra
    else:
        payload = {"instances": len(certs), "all_hold": ok,
                   "certificates": [c.as_dict() for c in certs]}
    print(json.dumps(payload, indent=2, sort_keys=True))
    return 0 if ok else 1


def cmd_torsion(args, cfg: Config) -> int:
    from . import torsion

    sign = quadratic.normalize_sign(args.sign)
    if sign != "imaginary" and args.ell % 2 == 0:
        raise UnsupportedCase("even ell with real quadratic fields is not supported")
    if sign != "imaginary":
        s = torsion.average_torsion(args.ell, args.x, sign)
        report = {"parameters": {"X": args.x, "ell": args.ell, "sign": sign},
                  "per_scale": [{"X": args.x, "sum_torsion": s,
                                 "ratio_to_prediction": s / args.x / torsion.dh_prediction(sign)
                                 if args.ell == 3 else None}]}
    else:
        scales = sorted({x for x in (args.x // 100, args.x) if x >= 100} or {args.x})
        if len(scales) > 1:
            report = torsion.torsion_experiment(scales, args.ell, sign)
        else:
            s = torsion.average_torsion(args.ell, args.x, sign)
            report = {"parameters": {"X": args.x, "ell": args.ell, "sign": sign},
                      "per_scale": [{"X": args.x, "sum_torsion": s}]}
        if args.ev_scan and len(scales) > 1:
            report["ev_consistency"] = {str(k): v for k, v in
                                        torsion.ev_consistency(scales[0], scales[-1], args.ell).items()}
    text = torsion.report_json(report)
    if args.out:
        Path(args.out).write_text(text + "\n")
    print(text)
    ev = report.get("ev_consistency")
    return 0 if ev is None or ev["stable"] else 1


def cmd_densities(args, cfg: Config) -> int:
    primes = args.primes or list(primes_up_to(args.pmax))
    text = density_csv(args.degree or [2, 3, 4, 5], primes)
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return 0


def _flatten(prefix, obj, out):
    if isinstance(obj, dict):
        for k, v in obj.items():
            _flatten(f"{prefix}.{k}" if prefix else str(k), v, out)
    elif isinstance(obj, list):
        for i, v in enumerate(obj):
            _flatten(f"{prefix}[{i}]", v, out)
    else:
        out.append((prefix, obj))


def cmd_report(args, cfg: Config) -> int:
    data = json.loads(Path(args.path).read_text())
    rows = []
    _flatten("", data, rows)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["key", "value"])
    w.writerows(rows)
    if args.out:
        Path(args.out).write_text(buf.getvalue())
    else:
        sys.stdout.write(buf.getvalue())
    return 0


def _emit(rows: dict, fmt: str) -> None:
    if fmt == "csv":
        w = csv.writer(sys.stdout, lineterminator="\n")
        w.writerow(list(rows))
        w.writerow([json.dumps(v) if isinstance(v, list) else v for v in rows.values()])
    else:
        print(json.dumps(rows, indent=2))


# ---- parser -------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="class-sieve", description=__doc__)
    ap.add_argument("--cache-dir", type=Path, help="overrides CLASS_SIEVE_CACHE")
    ap.add_argument("--threads", type=int, default=1)
    ap.add_argument("--format", choices=["json", "csv"], default="json")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("enumerate", help="build a field census and cache it")
    p.add_argument("degree", type=int)
    p.add_argument("--x", type=int, required=True)
    p.add_argument("--sign", default="both")
    p.add_argument("--csv", type=Path)
    p.set_defaults(func=cmd_enumerate)

    p = sub.add_parser("count", help="count fields under local conditions")
    p.add_argument("degree", type=int)
    p.add_argument("--x", type=int, required=True)
    p.add_argument("--sign", default="both")
    for kind in ("split", "inert", "ramified"):
        p.add_argument(f"--{kind}", type=int, action="append", metavar="P")
    p.add_argument("--format", choices=["json", "csv"], default=argparse.SUPPRESS)
    p.set_defaults(func=cmd_count)

    p = sub.add_parser("sieve", help="certify the sieve inequality on a family")
    p.add_argument("source", choices=["synthetic", "quadratic", "cubic"])
    p.add_argument("--items", type=int, default=1000)
    p.add_argument("--zmax", type=int, default=50)
    p.add_argument("--seed", type=int)
    p.add_argument("--instances", type=int, default=1)
    p.add_argument("--x", type=int, default=100_000)
    p.add_argument("--delta", type=parse_rational)
    p.set_defaults(func=cmd_sieve)

    p = sub.add_parser("torsion", help="class group torsion experiment")
    p.add_argument("--x", type=int, required=True)
    p.add_argument("--ell", type=int, default=3)
    p.add_argument("--sign", default="imaginary")
    p.add_argument("--ev-scan", action="store_true")
    p.add_argument("--out", type=Path)
    p.set_defaults(func=cmd_torsion)

    p = sub.add_parser("densities", help="dump splitting density tables as CSV")
    p.add_argument("--degree", type=int, action="append")
    p.add_argument("--primes", type=lambda s: [int(x) for x in s.split(",")])
    p.add_argument("--pmax", type=int, default=50)
    p.add_argument("--out", type=Path)
    p.set_defaults(func=cmd_densities)

    p = sub.add_parser("report", help="flatten an experiment JSON into long CSV")
    p.add_argument("path", type=Path)
    p.add_argument("--out", type=Path)
    p.set_defaults(func=cmd_report)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    cfg = Config(output=args.format)
    if args.cache_dir:
        cfg.cache_dir = args.cache_dir
    cfg.threads = args.threads
    if cfg.threads > 1:
        import numba

        numba.set_num_threads(min(cfg.threads, numba.config.NUMBA_NUM_THREADS))
    try:
        return args.func(args, cfg)
    except (CliError, UnsupportedCase, BoundExceeded, UndefinedBound, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
