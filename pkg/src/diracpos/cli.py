"""Command-line entry point: ``diracpos {verify,converge,trajectory,derive}``."""

from __future__ import annotations

import argparse
import csv
import sys
import time
import warnings
from dataclasses import asdict

import numpy as np

from . import checks, noether
from .checks import CheckResult
from .config import ConfigError, RunConfig, load_config
from .fock import ModeTable, ResourceError, build_space, build_state
from .gamma import ConfigurationError
from .report import EXIT_CONFIG, Report
from .spinors import DomainError

CSV_HEADER = ("t", "x_expect", "x0_expect", "im_residual")


class UsageError(ConfigurationError):
    pass


def parse_state(spec: str) -> dict:
    """``vacuum`` | ``wavepacket:pbar,sigma,s`` | ``pair:p,s,sprime,alpha,beta``."""
    kind, _, rest = spec.partition(":")
    vals = [v for v in rest.split(",") if v.strip()]
    try:
        nums = [float(v) for v in vals]
    except ValueError:
        raise UsageError(f"non-numeric state parameter in {spec!r}") from None
    if kind == "vacuum" and not vals:
        return {"kind": "vacuum"}
    if kind == "wavepacket" and len(nums) == 3:
        return {"kind": "wavepacket", "species": "c", "pbar": nums[0], "sigma": nums[1], "s": nums[2]}
    if kind == "pair" and len(nums) == 5:
        return dict(zip(("p", "s", "sprime", "alpha", "beta"), nums), kind="pair")
    raise UsageError(f"bad --state {spec!r}; expected vacuum, wavepacket:pbar,sigma,s or pair:p,s,sprime,alpha,beta")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", metavar="PATH")
    common.add_argument("--m", type=float)
    common.add_argument("--L", type=float)
    common.add_argument("--N", type=int)
    common.add_argument("--sector", type=int)
    common.add_argument("--t", type=float)
    common.add_argument("--tmax", type=float)
    common.add_argument("--dt", type=float)
    common.add_argument("--state")
    common.add_argument("--out", metavar="PATH")

    p = argparse.ArgumentParser(prog="diracpos", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)
    v = sub.add_parser("verify", parents=[common], help="run invariant suites")
    v.add_argument("--suite", default="all", choices=("all",) + checks.SUITES)
    c = sub.add_parser("converge", parents=[common], help="continuum convergence scan")
    c.add_argument("--doublings", type=int, default=2)
    sub.add_parser("trajectory", parents=[common], help="export <X^3>(t), <X^0>(t) as CSV")
    d = sub.add_parser("derive", parents=[common], help="symbolic derivation vs target")
    d.add_argument("component", choices=("temporal", "spatial"))
    d.add_argument("--target", metavar="PATH", help="alternative target expression file")
    return p


def _config(args) -> RunConfig:
    flags = {k: getattr(args, k, None) for k in ("m", "L", "N", "sector", "t", "tmax", "dt", "state", "out")}
    return load_config(args.config, **flags)


def _safe(fn, name: str) -> CheckResult:
    try:
        return fn()
    except (ResourceError, ConfigurationError):
        raise
    except Exception as exc:  # a crashed check is a failed check
        return CheckResult(name, "fail", None, None, 0.0, {"exception": f"{type(exc).__name__}: {exc}"})


def cmd_verify(cfg: RunConfig, suite: str) -> Report:
    report = Report("verify", asdict(cfg), extra={"suite": suite})
    if suite == "all":
        dim = cfg.fock_dimension(sector=None)
        if dim > cfg.max_dim:
            raise ResourceError(dim, cfg.max_dim)
    for k, fn in enumerate(checks.suite(suite, cfg)):
        report.add(_safe(fn, f"{suite}_{k}"))
    return report


def _continuity_on_box(L: float, N: int, m: float, h: float) -> np.ndarray:
    table = ModeTable(L, N, m)
    ns = [1, -2, max(N, 3)]
    specs = [(float(table.momentum(n)), 0.5, 1 if k != 1 else -1, (0.8, 0.5 + 0.3j, 0.3j)[k]) for k, n in enumerate(ns)]
    sol = noether.superposition(specs, m=m, L=L)
    return noether.continuity_order(sol, 0.37, -0.21, h)


def cmd_converge(cfg: RunConfig, doublings: int) -> Report:
    if doublings < 1:
        raise UsageError("--doublings must be at least 1")
    report = Report("converge", asdict(cfg), extra={"doublings": doublings})
    conv = report.add(checks.check_convergence(cfg, doublings))
    rows = []
    orders = []
    for k in range(doublings + 1):
        L, N = cfg.L * 2**k, checks.CONVERGE["N0"] * 2**k
        order = _continuity_on_box(L, N, cfg.m, cfg.fd_factor)
        orders.append(order)
        rows.append({"k": k, "L": L, "N": N, "spatial_error": conv.detail["errors"][k], "fd_order": order.tolist()})
    t0 = time.perf_counter()
    flat = np.concatenate(orders)
    ok = bool(np.all((flat >= 1.9) & (flat <= 2.1)))
    report.add(CheckResult("continuity_order_scan", "pass" if ok else "fail", float(np.min(flat)), "[1.9, 2.1]", time.perf_counter() - t0))
    report.extra["table"] = rows
    return report


def _trajectory_space(cfg: RunConfig, state: dict, n_given: bool):
    N = cfg.N if n_given else (10 if state["kind"] == "pair" else 32)
    sector = cfg.sector if cfg.sector is not None else (2 if state["kind"] == "pair" else 1)
    return build_space(ModeTable(cfg.L, N, cfg.m), sector, cfg.max_dim)


def cmd_trajectory(cfg: RunConfig, n_given: bool = False) -> Report:
    state_spec = parse_state(cfg.state)
    space = _trajectory_space(cfg, state_spec, n_given)
    table = space.table
    tmax = cfg.tmax if cfg.tmax is not None else table.L / 8
    if cfg.dt <= 0 or tmax <= 0:
        raise UsageError("dt and tmax must be positive")
    times = np.arange(0.0, tmax + cfg.dt / 2, cfg.dt)
    state = build_state(space, state_spec)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)  # window violations are reported below
        tr = noether.trajectory(space, state, times, "expanded")
    report = Report("trajectory", asdict(cfg), extra={"state": state_spec, "N": table.N, "rows": len(times)})
    if cfg.out:
        with open(cfg.out, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh)
            w.writerow(CSV_HEADER)
            for s in tr.samples:
                w.writerow([repr(s.t), repr(s.x_expect), repr(s.x0_expect), repr(s.im_residual)])
    t0 = time.perf_counter()
    im = max(s.im_residual for s in tr.samples)
    report.add(CheckResult("im_residual", "pass" if im < cfg.tol_exact else "fail", im, cfg.tol_exact, time.perf_counter() - t0))
    flagged = [s.t for s in tr.samples if not s.in_window]
    report.extra["flagged_times"] = flagged
    name = {"wavepacket": "drift_slope", "pair": "zitterbewegung_frequency", "vacuum": "vacuum_profile"}[state_spec["kind"]]
    if flagged:
        report.add(CheckResult(name, "skip", None, cfg.tol_fit, 0.0, {"reason": "samples outside the wrap window |t| < L/4"}))
        return report
    t0 = time.perf_counter()
    if state_spec["kind"] == "wavepacket":
        amps = noether.gaussian_amplitudes(table, state_spec["pbar"], state_spec["sigma"])
        v = noether.mean_velocity(table, amps)
        slope = noether.fit_drift(tr.times, tr.x)
        rel = abs(slope - v) / max(abs(v), 1e-300)
        res = CheckResult(name, "pass" if rel < cfg.tol_fit else "fail", rel, cfg.tol_fit, 0.0, {"slope": slope, "mean_velocity": v})
    elif state_spec["kind"] == "pair":
        expected = 2 * float(table.energy(table.mode_of_momentum(state_spec["p"])))
        omega = noether.fit_frequency(tr.times, tr.x, omega_max=4 * expected)
        rel = abs(omega - expected) / expected
        res = CheckResult(name, "pass" if rel < cfg.tol_fit else "fail", rel, cfg.tol_fit, 0.0, {"omega": omega, "expected": expected})
    else:
        dev = max(float(np.max(np.abs(tr.x))), float(np.max(np.abs(tr.x0 - tr.times * table.n_modes))))
        res = CheckResult(name, "pass" if dev < cfg.tol_exact else "fail", dev, cfg.tol_exact, 0.0, {"zero_point_modes": table.n_modes})
    res.runtime = time.perf_counter() - t0
    report.add(res)
    return report


def cmd_derive(cfg: RunConfig, component: str, target_path: str | None = None) -> Report:
    from .symbolic import canonical_equal, derive_position, parse

    report = Report("derive", asdict(cfg), extra={"component": component})
    if target_path is None:
        res = checks.check_derivation(cfg, component)
        report.add(res)
        text = res.detail["expression"]
        report.extra["diff"] = res.detail["diff"]
    else:
        t0 = time.perf_counter()
        mu = 0 if component == "temporal" else 1
        with open(target_path, encoding="utf-8") as fh:
            target = parse(fh.read())
        d = derive_position(mu)
        ok, diff = canonical_equal(d.result, target)
        text = str(d.result)
        report.extra["diff"] = {k: [checks._pair(x) for x in v] for k, v in diff.items()}
        n = sum(len(v) for v in diff.values())
        report.add(CheckResult(f"derive_{component}", "pass" if ok else "fail", n, 0, time.perf_counter() - t0))
    if cfg.out:
        with open(cfg.out, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    report.extra["expression"] = text
    return report


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    report_out = None
    try:
        cfg = _config(args)
        if args.command == "verify":
            report = cmd_verify(cfg, args.suite)
            report_out = cfg.out
        elif args.command == "converge":
            report = cmd_converge(cfg, args.doublings)
            report_out = cfg.out
        elif args.command == "trajectory":
            report = cmd_trajectory(cfg, n_given=args.N is not None or _file_sets(args.config, "N"))
        else:
            report = cmd_derive(cfg, args.component, args.target)
    except (ConfigError, UsageError, ResourceError, ConfigurationError, DomainError, OSError) as exc:
        report = Report(args.command, {}, error=f"{type(exc).__name__}: {exc}")
        print(report.to_json())
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    text = report.to_json()
    if report_out:
        with open(report_out, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    else:
        print(text)
    return report.exit_code


def _file_sets(path: str | None, key: str) -> bool:
    if path is None:
        return False
    from .config import parse_config

    with open(path, encoding="utf-8") as fh:
        return key in parse_config(fh.read())


if __name__ == "__main__":
    sys.exit(main())
