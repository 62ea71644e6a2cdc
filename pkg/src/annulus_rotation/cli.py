"""Command-line experiment runner.

    annulus-rotation orbit --config runs.ini --out results/run
    annulus-rotation winding a.arc b.arc
    annulus-rotation winding --fixture under
    annulus-rotation horseshoe --code periodic:100 --horizon 1000
    annulus-rotation gallery transverse boomerang
    annulus-rotation verify all

Config files are INI style (``key = value`` lines under ``[section]``
headers).  Every section other than ``[tolerances]`` is one experiment;
``[DEFAULT]`` values apply to all of them.  See README.md for the keys.
"""
from __future__ import annotations

import argparse
import configparser
import json
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from importlib import resources

from . import _accel
from .arcs import arcs_disjoint, read_arc, relative_winding
from .cover import BACKWARD, FORWARD, FullMap, LiftPoint, check_deck_commutation, check_direction
from .errors import AnnulusError, PreconditionError
from .gallery import build_system, proxy_prime_end_rotation, verify_invariance
from .horseshoe import (SymbolCode, itinerary_shift_check, rotation_bounds_from_code,
                        verify_shift_bound)
from .rotation import iterate_orbit, rotation_estimate, summary_dict, write_series_csv, write_summary_json
from .verify import run_suite

EXIT_PRECONDITION = 2
FIXTURES = ("parallel", "under", "crossing")
KNOWN_TOLERANCES = {"winding": 1e-12, "tie": 1e-6, "invariance": 1e-8}


@dataclass
class ExperimentConfig:
    name: str
    system: str
    point: str
    horizon: int
    direction: str = FORWARD
    rho: float | None = None
    code: str | None = None
    output: str | None = None
    rng_seed: int = 0
    tolerances: dict = field(default_factory=dict)

    def validate(self):
        if self.horizon < 1:
            raise PreconditionError(f"[{self.name}] horizon must be >= 1")
        check_direction(self.direction)


def parse_tolerances(items) -> dict:
    out = {}
    for item in items or []:
        key, sep, val = item.partition("=")
        key = key.strip()
        if not sep or key not in KNOWN_TOLERANCES:
            raise PreconditionError(f"bad --tol {item!r}; known names: {', '.join(KNOWN_TOLERANCES)}")
        out[key] = float(val)
    return out


def load_config(path: str) -> list[ExperimentConfig]:
    parser = configparser.ConfigParser(interpolation=None)
    with open(path) as fh:
        parser.read_file(fh)
    tols = {}
    if parser.has_section("tolerances"):
        tols = {k: float(v) for k, v in parser.items("tolerances", raw=True) if k not in parser.defaults()}
    out = []
    for sec in parser.sections():
        if sec == "tolerances":
            continue
        s = parser[sec]
        if "system" not in s:
            raise PreconditionError(f"[{sec}] needs a 'system' key")
        rho = s.get("rho")
        out.append(ExperimentConfig(
            name=sec,
            system=s["system"],
            point=s.get("point", ""),
            horizon=s.getint("horizon", 1000),
            direction=s.get("direction", FORWARD),
            rho=None if rho in (None, "") else float(rho),
            code=s.get("code"),
            output=s.get("output"),
            rng_seed=s.getint("seed", 0),
            tolerances=dict(tols),
        ))
    if not out:
        raise PreconditionError(f"{path}: no experiment sections")
    return out


def _resolve_point(sysm, point: str):
    if not point:
        return next(iter(sysm.marked_points.values()))
    if point in sysm.marked_points:
        return sysm.marked_points[point]
    if "," in point:
        if not isinstance(sysm.source, FullMap):
            raise PreconditionError(f"{sysm.name}: explicit seeds need a full map")
        x1, r = (float(v) for v in point.split(","))
        return LiftPoint(x1, r)
    raise PreconditionError(f"{sysm.name}: unknown marked point {point!r}; have {', '.join(sysm.marked_points)}")


def run_orbit(cfg: ExperimentConfig, prefix: str) -> dict:
    """Write ``<prefix>.series.csv`` and ``<prefix>.summary.json``; return the summary."""
    cfg.validate()
    sysm = build_system(cfg.system, cfg.code)
    seed = _resolve_point(sysm, cfg.point)
    series = iterate_orbit(sysm.source, seed, cfg.horizon, cfg.direction)
    rho = cfg.rho if cfg.rho is not None else (sysm.rho_hat if sysm.rho_hat is not None else 0.0)
    summary = summary_dict(series, rho)
    write_series_csv(f"{prefix}.series.csv", series, rho)
    write_summary_json(f"{prefix}.summary.json", summary)
    return summary


def fixture_paths(name: str):
    if name not in FIXTURES:
        raise PreconditionError(f"unknown fixture {name!r}; choose from {', '.join(FIXTURES)}")
    base = resources.files("annulus_rotation") / "data"
    return str(base / f"{name}_a.arc"), str(base / f"{name}_b.arc")


def run_winding(path_a: str, path_b: str, tol: float = 1e-12, tie_tol: float = 1e-6) -> dict:
    g, g2 = read_arc(path_a), read_arc(path_b)
    dj = arcs_disjoint(g, g2)
    if not (dj.disjoint or dj.disjoint_except_landing):
        raise PreconditionError(f"arcs intersect (segments {dj.crossing[0]} and {dj.crossing[1]})")
    res = relative_winding(g, g2, tol=tol, tie_tol=tie_tol)
    return {"w": res.w, "nearest_int": res.nearest_int}


def _cmd_orbit(args, tols):
    if args.config:
        cfgs = load_config(args.config)
    else:
        if not args.system:
            raise PreconditionError("orbit needs --config or --system")
        cfgs = [ExperimentConfig(name=args.system.replace(":", "_").replace("/", "-"), system=args.system,
                                 point=args.point or "", horizon=1000, direction=args.direction,
                                 rho=args.rho, code=args.code)]
    jobs = []
    for cfg in cfgs:
        if args.horizon is not None:
            cfg.horizon = args.horizon
        if args.seed is not None:
            cfg.rng_seed = args.seed
        cfg.tolerances.update(tols)
        if args.out:
            prefix = args.out if len(cfgs) == 1 else f"{args.out}.{cfg.name}"
        else:
            prefix = cfg.output or cfg.name
        jobs.append((cfg, prefix))
    with ThreadPoolExecutor(max_workers=max(1, args.jobs)) as pool:
        results = list(pool.map(lambda job: run_orbit(*job), jobs))
    for (cfg, prefix), summary in zip(jobs, results):
        print(json.dumps({"experiment": cfg.name, "prefix": prefix, **summary}))
    return 0


def _cmd_winding(args, tols):
    if args.fixture:
        a, b = fixture_paths(args.fixture)
    elif args.arc_a and args.arc_b:
        a, b = args.arc_a, args.arc_b
    else:
        raise PreconditionError("winding needs two arc files or --fixture")
    print(json.dumps(run_winding(a, b, tols.get("winding", KNOWN_TOLERANCES["winding"]),
                                 tols.get("tie", KNOWN_TOLERANCES["tie"]))))
    return 0


def _cmd_horseshoe(args, tols):
    code = SymbolCode.parse(args.code)
    n = args.horizon or 1000
    out = {"code": code.label, "horizon": n}
    sysm = build_system("horseshoe", args.code)
    series = iterate_orbit(sysm.source, "x", n)
    out["rotation_estimate"] = rotation_estimate(series).estimate if n >= 15 else series.cumulative[-1] / n
    shift = verify_shift_bound(code, n)
    out["shift_max_dev"], out["shift_pass"] = shift.max_dev, shift.passed
    if n >= 16:
        pr = rotation_bounds_from_code(code, n)
        out["liminf_proxy"], out["limsup_proxy"] = pr.liminf_proxy, pr.limsup_proxy
    it = itinerary_shift_check(code, min(n, 200), min(n, 200) + 40)
    out["itinerary_pass"] = it.passed
    if args.out:
        write_series_csv(f"{args.out}.series.csv", series, 0.0)
        write_summary_json(f"{args.out}.summary.json", out)
    print(json.dumps(out))
    return 0 if shift.passed and it.passed else 1


def _cmd_gallery(args, tols):
    names = args.names or ["periodic:1/3", "transverse", "boomerang", "horseshoe"]
    tol = tols.get("invariance", KNOWN_TOLERANCES["invariance"])
    n = args.horizon or 1000
    for name in names:
        sysm = build_system(name)
        rec = {"name": sysm.name, "rho_hat": sysm.rho_hat,
               "marked_points": {k: (list(v) if isinstance(v, LiftPoint) else v) for k, v in sysm.marked_points.items()}}
        rec["proxy"] = proxy_prime_end_rotation(sysm, n) if sysm.proxy is not None else None
        rec["invariance"] = verify_invariance(sysm, 1000, tol, seed=args.seed or 0).fraction
        if isinstance(sysm.source, FullMap):
            rec["deck_error"] = check_deck_commutation(sysm.source, 10_000, seed=args.seed or 0).max_error
        print(json.dumps(rec))
    return 0


def _cmd_verify(args, tols):
    results = run_suite(args.suite, seed=args.seed or 0)
    for r in results:
        print(r.line(), flush=True)
    total = sum(r.seconds for r in results)
    ok = all(r.passed for r in results)
    print(f"{'PASS' if ok else 'FAIL'}: {sum(r.passed for r in results)}/{len(results)} checks, "
          f"{total:.1f}s, backend={_accel.backend()}")
    return 0 if ok else 1


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="INI experiment file")
    common.add_argument("--out", help="output path prefix")
    common.add_argument("--seed", type=int, default=None, help="RNG seed (default 0)")
    common.add_argument("--horizon", type=int, default=None, help="orbit length")
    common.add_argument("--tol", action="append", metavar="NAME=VALUE", help="override a tolerance")

    p = argparse.ArgumentParser(prog="annulus-rotation", description=__doc__.split("\n")[0])
    sub = p.add_subparsers(dest="command", required=True)

    o = sub.add_parser("orbit", parents=[common], help="iterate orbits and write CSV/JSON")
    o.add_argument("--system", help="system name when no config is given")
    o.add_argument("--point", help="marked point name or 'x1,r'")
    o.add_argument("--direction", default=FORWARD, choices=(FORWARD, BACKWARD))
    o.add_argument("--rho", type=float, default=None)
    o.add_argument("--code", help="symbol code for the horseshoe")
    o.add_argument("--jobs", type=int, default=1, help="experiments run concurrently")
    o.set_defaults(func=_cmd_orbit)

    w = sub.add_parser("winding", parents=[common], help="relative winding number of two arc files")
    w.add_argument("arc_a", nargs="?")
    w.add_argument("arc_b", nargs="?")
    w.add_argument("--fixture", choices=FIXTURES, help="use a bundled arc pair")
    w.set_defaults(func=_cmd_winding)

    h = sub.add_parser("horseshoe", parents=[common], help="shift accounting and rotation for a code")
    h.add_argument("--code", default="periodic:10")
    h.set_defaults(func=_cmd_horseshoe)

    g = sub.add_parser("gallery", parents=[common], help="describe and check gallery systems")
    g.add_argument("names", nargs="*")
    g.set_defaults(func=_cmd_gallery)

    v = sub.add_parser("verify", parents=[common], help="run acceptance suites")
    v.add_argument("suite", nargs="?", default="all")
    v.set_defaults(func=_cmd_verify)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        tols = parse_tolerances(args.tol)
        return args.func(args, tols)
    except PreconditionError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION
    except (AnnulusError, OSError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
