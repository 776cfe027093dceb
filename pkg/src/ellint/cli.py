"""Command-line runner for the identity suites.

    ellint --suite beta --seed 7 --out run/beta
    ellint --suite all --regime QGreater1
    ellint --list

Word-level gates from perm_engine run first; a suite whose gate fails is
reported as failed whatever its residuals.  Exit status: 0 all pass, 1 some
record failed, 2 bad configuration.
"""

import argparse
import csv
import io
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path

from . import perm_engine
from .relations import DEFAULT_SEED, SUITE_GATES, SUITES, run_suite

CSV_HEADER = ["identity_id", "seed", "residual", "tolerance", "pass", "N", "runtime_ms"]
REGIMES = ("QLess1", "QGreater1")


class ConfigError(Exception):
    pass


@dataclass
class RunConfig:
    suites: list = field(default_factory=lambda: ["all"])
    seed: int = DEFAULT_SEED
    draws: int = 1
    grid: dict = field(default_factory=dict)
    tol: dict = field(default_factory=dict)
    moduli: list = None
    regime: str = "QLess1"
    out: str = None
    timing: bool = False

    def validate(self):
        if self.regime not in REGIMES:
            raise ConfigError(f"regime must be one of {REGIMES}, got {self.regime!r}")
        if not 0 <= self.seed < 2 ** 64:
            raise ConfigError("seed must be an unsigned 64-bit integer")
        if self.draws < 1:
            raise ConfigError("draws must be positive")
        names = list(SUITES) if "all" in self.suites else self.suites
        bad = [s for s in names if s not in SUITES]
        if bad:
            raise ConfigError(f"unknown suite(s): {', '.join(bad)}; see --list")
        for k, v in self.tol.items():
            if not v > 0:
                raise ConfigError(f"tolerance for {k} must be positive")
        for k, v in self.grid.items():
            if v < 4 or v & (v - 1):
                raise ConfigError(f"grid size for {k} must be a power of two >= 4, got {v}")
        if self.moduli is not None:
            lo, hi = self.moduli
            if not 0 < lo < hi < 1:
                raise ConfigError("moduli range must satisfy 0 < lo < hi < 1")
        self.suites = names
        return self


def _per_suite(text, kind):
    """'1e-7' applies to every suite; 'beta=1e-9,rll=1e-6' to the named ones."""
    out = {}
    for part in text.split(","):
        if "=" in part:
            k, v = part.split("=", 1)
        else:
            k, v = "*", part
        out[k.strip()] = kind(v)
    return out


def build_parser():
    ap = argparse.ArgumentParser(prog="ellint", description="Certify the elliptic R-operator identities numerically.")
    ap.add_argument("--suite", action="append", help="suite id (repeatable, comma lists allowed, 'all' for every suite)")
    ap.add_argument("--seed", type=lambda s: int(s, 0), help=f"base seed (default {DEFAULT_SEED:#x})")
    ap.add_argument("--draws", type=int, help="parameter draws per check (seeds seed, seed+1, ...)")
    ap.add_argument("--tol", help="tolerance override: a number, or suite=value pairs")
    ap.add_argument("--grid", help="grid size override: a number, or suite=value pairs")
    ap.add_argument("--moduli", help="sampler range for |p| and |q| as lo,hi")
    ap.add_argument("--regime", choices=REGIMES)
    ap.add_argument("--out", help="report path; the CSV goes next to it with suffix .csv")
    ap.add_argument("--config", help="JSON file with the same keys as the flags; flags win")
    ap.add_argument("--timing", action="store_true", help="write measured runtimes into the CSV (breaks byte equality)")
    ap.add_argument("--list", action="store_true", help="print suite ids and exit")
    return ap


def config_from_args(args):
    base = {}
    if args.config:
        try:
            base = json.loads(Path(args.config).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {args.config}: {exc}")
    cfg = RunConfig()
    try:
        if "suite" in base:
            cfg.suites = base["suite"] if isinstance(base["suite"], list) else [base["suite"]]
        for key in ("seed", "draws", "regime", "out", "timing", "moduli"):
            if key in base:
                setattr(cfg, key, base[key])
        if isinstance(cfg.seed, str):
            cfg.seed = int(cfg.seed, 0)
        for key, kind in (("tol", float), ("grid", int)):
            if key in base:
                val = base[key]
                setattr(cfg, key, {k: kind(v) for k, v in val.items()} if isinstance(val, dict) else {"*": kind(val)})
        if args.suite:
            cfg.suites = [s.strip() for item in args.suite for s in item.split(",") if s.strip()]
        if args.seed is not None:
            cfg.seed = args.seed
        if args.draws is not None:
            cfg.draws = args.draws
        if args.regime:
            cfg.regime = args.regime
        if args.out:
            cfg.out = args.out
        if args.timing:
            cfg.timing = True
        if args.tol:
            cfg.tol = _per_suite(args.tol, float)
        if args.grid:
            cfg.grid = _per_suite(args.grid, int)
        if args.moduli:
            cfg.moduli = [float(x) for x in args.moduli.split(",")]
            if len(cfg.moduli) != 2:
                raise ConfigError("--moduli takes lo,hi")
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc))
    return cfg.validate()


def run_gates():
    out = {}
    for name, gate in perm_engine.GATES.items():
        res = gate()
        out[name] = {"pass": res.passed, "checks": [{"check": c, "pass": ok} for c, ok in res.checks]}
    return out


def _suite_job(name, cfg):
    pick = lambda d: d.get(name, d.get("*"))
    return run_suite(name, seed=cfg.seed, draws=cfg.draws, regime=cfg.regime, N=pick(cfg.grid),
                     tol=pick(cfg.tol), modulus_range=cfg.moduli)


def run(cfg):
    """Gates, then every suite in registry order; returns (gates, records)."""
    gates = run_gates()
    threads = max(1, int(os.environ.get("ELLINT_THREADS", "1")))
    if threads == 1 or len(cfg.suites) == 1:
        results = [_suite_job(name, cfg) for name in cfg.suites]
    else:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(_suite_job, cfg.suites, [cfg] * len(cfg.suites)))
    records = []
    for name, reps in zip(cfg.suites, results):
        gate = SUITE_GATES.get(name)
        for r in reps:
            d = r.to_dict()
            d["suite"] = name
            if gate is not None and not gates[gate]["pass"]:
                d["pass"] = False
                d["gate_failed"] = gate
            records.append(d)
    return gates, records


def csv_text(records, timing=False):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for r in records:
        w.writerow([r["identity_id"], r["seed"], repr(r["residual"]), repr(r["tolerance"]),
                    "true" if r["pass"] else "false", r["N_used"], r["runtime_ms"] if timing else 0])
    return buf.getvalue()


def emit_report(records, out, gates=None, cfg=None, timing=False):
    """Write <out> (JSON) and <out>.csv; returns the two paths."""
    path = Path(out)
    csv_path = path.with_suffix(".csv")
    report = {"config": asdict(cfg) if cfg is not None else None, "gates": gates or {}, "records": records}
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(json.dumps(report, indent=2) + "\n")
        csv_path.write_text(csv_text(records, timing))
    except OSError as exc:
        raise OSError(f"cannot write report to {path} / {csv_path}: {exc}") from exc
    return path, csv_path


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code == 0 else 2
    if args.list:
        for name, (checks, regimes) in SUITES.items():
            print(f"{name:14s} {len(checks)} check(s)  regimes: {', '.join(regimes)}")
        return 0
    try:
        cfg = config_from_args(args)
    except ConfigError as exc:
        print(f"ellint: {exc}", file=sys.stderr)
        return 2
    gates, records = run(cfg)
    for r in records:
        flag = "PASS" if r["pass"] else "FAIL"
        print(f"{flag}  {r['identity_id']:36s} residual {r['residual']:.3e}  tol {r['tolerance']:.0e}  seed {r['seed']}")
    for name, g in gates.items():
        if not g["pass"]:
            print(f"ellint: word-level gate {name} failed", file=sys.stderr)
    if cfg.out:
        try:
            emit_report(records, cfg.out, gates, cfg, cfg.timing)
        except OSError as exc:
            print(f"ellint: {exc}", file=sys.stderr)
            return 2
    return 0 if all(r["pass"] for r in records) else 1


if __name__ == "__main__":
    sys.exit(main())
