"""Command-line driver: one verification suite per subcommand.

    diraclab <command> [--config FILE] [--seed N] [--out-dir DIR] [--set key=value ...]

Parameters resolve as flag > config file > built-in default, and the
resolved table is printed before the run.  A config file may hold the keys
at top level or inside a table named after the command.  Every command
writes <command>.csv (timestamp only in the leading comment) and
<command>.json; some add two-column .dat dumps.  Exit status is 0 when
every check passed, 1 when a check failed and 2 for configuration errors.
"""

from __future__ import annotations

import argparse
import datetime as _dt
import json
import math
import os
import sys
import time
from pathlib import Path

import numpy as np

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from . import __version__
from .clifford import build_clifford, check_relations, dirac_symbol, invert_symbol

COMMANDS = (
    "clifford-check",
    "carleman-sweep",
    "carleman-1d",
    "reduce2d",
    "radial-solve",
    "landis-fit",
    "regularity-check",
)

DEFAULTS: dict[str, dict] = {
    "clifford-check": {"seed": 0, "n_min": 2, "n_max": 8, "symbol_trials": 1000, "symbol_dims": [2, 3, 4],
                       "tol": 1e-13},
    "carleman-sweep": {
        "seed": 0, "count": 250, "L": 4.0, "M": 512, "eps": 1e-3, "double_worst": 0, "indices": [],
        "weights": [{"variant": "LogSquared", "tau": t} for t in (0.5, 1.0, 2.0, 5.0)],
    },
    "carleman-1d": {"seed": 0, "count": 1000, "nus": [0.5, 1.0, 2.0, 8.0], "L": 2.0, "M": 4096, "span": 1.5,
                    "eps": 1e-6},
    "reduce2d": {"seed": 0, "trials": 3, "cases": ["general", "case1", "case2", "majorana"], "L": 5.0, "M": 64,
                 "gap_tol": 1e-12, "residual_tol": 1e-8, "min_mask_fraction": 0.95},
    "radial-solve": {"seed": 0, "dims": [2, 3], "lams": [0.5, 1.5], "alphas": [0.25, 0.5, 1.0, 2.0],
                     "y_max": 30.0, "steps": 3000, "slope_tol": 1e-6, "halving_steps": 100,
                     "halving_range": [14.0, 18.0]},
    "landis-fit": {"seed": 0, "cs": [0.5, 1.0, 2.0], "L": 14.0, "M": 1024, "smoothing": 1.0,
                   "R_min": 3.0, "R_max": 12.0, "R_step": 0.5, "sphere_samples": 64, "ball_samples": 256,
                   "kappa_tol": 0.05, "bound": {"kappa": 1.0, "p": 2.0, "q": 2.0, "c": 1e-3},
                   "residual_ratio": 10.0},
    "regularity-check": {"seed": 0, "cz_trials": 500, "cz_M": 256, "cz_ps": [2.0, 4.0], "cz_tol": 1e-10,
                         "family_size": 30, "family_seeds": [1, 2], "ps": [2.0, 4.0], "radii": [1.0, 2.0, 4.0],
                         "centers": [[a, b] for a in (-1.0, 0.0, 1.0) for b in (-1.0, 0.0, 1.0)],
                         "L": 16.0, "M": 512, "stability": 0.25},
}


class ConfigError(Exception):
    pass


# -- configuration -------------------------------------------------------------------


def load_config_file(path, command: str) -> dict:
    try:
        with open(path, "rb") as fh:
            data = tomllib.load(fh)
    except tomllib.TOMLDecodeError as exc:  # message carries line and column
        raise ConfigError(f"{path}: {exc}") from None
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from None
    if command in data and isinstance(data[command], dict):
        return dict(data[command])
    return {k: v for k, v in data.items() if not (k in COMMANDS and isinstance(v, dict))}


def parse_override(text: str):
    key, sep, raw = text.partition("=")
    if not sep or not key.strip():
        raise ConfigError(f"--set expects key=value, got {text!r}")
    try:
        value = tomllib.loads(f"v = {raw}")["v"]
    except tomllib.TOMLDecodeError:
        value = raw
    return key.strip(), value


def resolve(command: str, file_cfg: dict, flags: dict) -> tuple[dict, dict]:
    defaults = DEFAULTS[command]
    cfg, source = {}, {}
    for layer, name in ((defaults, "default"), (file_cfg, "file"), (flags, "flag")):
        for k, v in layer.items():
            if k not in defaults:
                raise ConfigError(f"unknown parameter {k!r} for {command}")
            cfg[k] = v
            source[k] = name
    validate(command, cfg)
    return cfg, source


def validate(command: str, cfg: dict) -> None:
    for k, v in cfg.items():
        if (k.endswith("tol") or k in ("eps",)) and not (isinstance(v, (int, float)) and v > 0):
            raise ConfigError(f"{k} must be a positive number, got {v!r}")
    if not isinstance(cfg.get("seed"), int):
        raise ConfigError("seed must be an explicit integer")
    if command == "clifford-check":
        dims = list(range(cfg["n_min"], cfg["n_max"] + 1)) + list(cfg["symbol_dims"])
        if any(int(d) < 2 for d in dims):
            raise ConfigError("Clifford dimensions must be >= 2")


def print_config(command: str, cfg: dict, source: dict, stream=None) -> None:
    stream = stream or sys.stdout
    print(f"diraclab {__version__} {command}", file=stream)
    for k in sorted(cfg):
        print(f"  {k} = {json.dumps(cfg[k])}  [{source[k]}]", file=stream)


def header(command: str, cfg: dict) -> str:
    stamp = _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds")
    return f"diraclab {__version__} {command} generated {stamp}\nconfig {json.dumps(cfg, sort_keys=True)}"


def write_json(path: Path, data) -> None:
    path.write_text(json.dumps(data, indent=2, sort_keys=True, default=_json_default) + "\n")


def _json_default(o):
    if isinstance(o, (np.floating, np.integer, np.bool_)):
        return o.item()
    if isinstance(o, np.ndarray):
        return o.tolist()
    if isinstance(o, complex):
        return [o.real, o.imag]
    raise TypeError(f"cannot serialize {type(o).__name__}")


def _csv(rows, fields, path: Path, comment: str) -> str:
    import csv
    import io

    buf = io.StringIO()
    for line in comment.splitlines():
        buf.write(f"# {line}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(fields)
    for row in rows:
        row = [x.item() if isinstance(x, np.generic) else x for x in row]
        w.writerow([repr(x) if isinstance(x, float) else x for x in row])
    text = buf.getvalue()
    path.write_text(text)
    return text


# -- commands ------------------------------------------------------------------------


def cmd_clifford_check(cfg: dict, out: Path) -> bool:
    rng = np.random.default_rng(cfg["seed"])
    rows, reports = [], []
    ok = True
    for n in range(cfg["n_min"], cfg["n_max"] + 1):
        rep = build_clifford(n)
        exact = check_relations(rep, exact=True)
        flt = check_relations(rep, exact=False)
        passed = exact.passed and flt.passed and flt.max_error < cfg["tol"]
        ok &= passed
        reports.append({"n": n, "N": rep.N, "exact_max_error": exact.max_error, "float_max_error": flt.max_error,
                        "passed": passed})
        rows.append(["relations", n, rep.N, exact.max_error, flt.max_error, "pass" if passed else "fail"])
    symbol = []
    if cfg["n_max"] >= cfg["n_min"]:
        for n in cfg["symbol_dims"]:
            rep = build_clifford(int(n))
            sq_err = inv_err = 0.0
            for _ in range(cfg["symbol_trials"]):
                xi = rng.normal(size=rep.n) * 10.0 ** rng.uniform(-3, 3)
                s = dirac_symbol(rep, xi)
                q = float(xi @ xi)
                sq_err = max(sq_err, float(np.abs(s @ s - q * np.eye(rep.N)).max()) / q)
                inv_err = max(inv_err, float(np.abs(invert_symbol(rep, xi) @ s - np.eye(rep.N)).max()))
            passed = sq_err < cfg["tol"] and inv_err < cfg["tol"]
            ok &= passed
            symbol.append({"n": int(n), "square_rel_error": sq_err, "inverse_error": inv_err, "passed": passed})
            rows.append(["symbol", int(n), rep.N, sq_err, inv_err, "pass" if passed else "fail"])
    _csv(rows, ["check", "n", "N", "error_a", "error_b", "verdict"], out / "clifford-check.csv",
         header("clifford-check", cfg))
    write_json(out / "clifford-check.json", {"relations": reports, "symbol": symbol, "all_pass": ok})
    for r in reports:
        print(f"n={r['n']} N={r['N']} exact={r['exact_max_error']:g} float={r['float_max_error']:.1e} "
              f"{'pass' if r['passed'] else 'FAIL'}")
    return ok


def _weights(cfg: dict):
    from .carleman import CarlemanWeight

    out = []
    for w in cfg["weights"]:
        if not isinstance(w, dict) or "variant" not in w:
            raise ConfigError(f"weight entries need a 'variant' key, got {w!r}")
        try:
            out.append(CarlemanWeight(w["variant"], float(w.get("tau", 0.0)), float(w.get("a", 0.0)),
                                      float(w.get("nu", 0.0))))
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
    return out


def cmd_carleman_sweep(cfg: dict, out: Path) -> bool:
    from .carleman import classify, random_specs, reports_to_csv, summarize, sweep

    weights = _weights(cfg)
    specs = random_specs(cfg["count"], cfg["seed"], L=cfg["L"], M=cfg["M"])
    if cfg["indices"]:
        specs = [specs[i] for i in cfg["indices"]]
    rep = build_clifford(2)
    reports = sweep(weights, specs, rep=rep)
    for r in reports:
        if r.verdict.startswith("pass") or r.verdict == "fail":
            r.verdict = classify(r.ratio, cfg["eps"])
    reports_to_csv(reports, out / "carleman-sweep.csv", header("carleman-sweep", cfg))
    summary = summarize(reports)
    ok = summary["all_pass"]
    if cfg["double_worst"] and reports:
        doubling = doubling_check(rep, weights, specs, reports, cfg["double_worst"])
        summary["doubling"] = doubling
        ok &= doubling["passed"]
    write_json(out / "carleman-sweep.json", summary)
    print(f"reports={summary['reports']} min_ratio={summary['min_ratio']} verdicts={summary['verdicts']}")
    return ok


def doubling_check(rep, weights, specs, reports, k: int) -> dict:
    """Re-run the k specs with the smallest ratio at twice the resolution.

    Passes when the worst slack max(0, 1 - ratio) shrinks at least 4x; a
    zero slack at the base resolution passes as 0 <= 0 / 4.
    """
    from .carleman import sweep

    per_spec = len(weights)
    worst = {}
    for i, r in enumerate(reports):
        s = i // per_spec
        if math.isfinite(r.ratio):
            worst[s] = min(worst.get(s, math.inf), r.ratio)
    picked = sorted(worst, key=lambda s: worst[s])[:k]
    fine_specs = [specs[s].with_resolution(2 * specs[s].M) for s in picked]
    fine = sweep(weights, fine_specs, rep=rep)
    base = [reports[s * per_spec + j] for s in picked for j in range(per_spec)]
    slack0 = max((r.slack for r in base if math.isfinite(r.ratio)), default=0.0)
    slack1 = max((r.slack for r in fine if math.isfinite(r.ratio)), default=0.0)
    delta = max((abs(a.ratio - b.ratio) for a, b in zip(base, fine)
                 if math.isfinite(a.ratio) and math.isfinite(b.ratio)), default=0.0)
    return {"specs": len(picked), "slack_base": slack0, "slack_doubled": slack1, "max_ratio_change": delta,
            "passed": slack1 <= slack0 / 4 and all(r.ok for r in fine)}


def cmd_carleman_1d(cfg: dict, out: Path) -> bool:
    from .carleman import classify, random_bump_1d, reports_to_csv, summarize, verify_carleman_1d

    L, M = cfg["L"], cfg["M"]
    y = -L + 2 * L * np.arange(M) / M
    reports = []
    for t in range(cfg["count"]):
        rng = np.random.default_rng([cfg["seed"], t])
        phi = random_bump_1d(rng, y, cfg["span"])
        for nu in cfg["nus"]:
            r = verify_carleman_1d(phi, float(nu), y)
            r.seed = t
            r.verdict = classify(r.ratio, cfg["eps"])
            reports.append(r)
    reports_to_csv(reports, out / "carleman-1d.csv", header("carleman-1d", cfg))
    summary = summarize(reports)
    write_json(out / "carleman-1d.json", summary)
    print(f"reports={summary['reports']} min_ratio={summary['min_ratio']} verdicts={summary['verdicts']}")
    return summary["all_pass"]


def cmd_reduce2d(cfg: dict, out: Path) -> bool:
    from .fields import GridSpec
    from . import reduction2d as rd

    grid = GridSpec(2, cfg["L"], cfg["M"])
    rows, items = [], []
    ok = True
    for case in cfg["cases"]:
        for t in range(cfg["trials"]):
            seed = cfg["seed"] + t
            if case == "majorana":
                U, V = rd.manufacture_majorana(grid, seed)
                sys_ = rd.DbarSystem.from_fields(U, V)
                scalars = [rd.majorana_reduce(U, V)]
            elif case in ("general", "case1", "case2"):
                sys_ = getattr(rd, f"manufacture_{case}")(grid, seed)
                scalars = {"general": lambda s: [], "case1": lambda s: list(rd.case1_reduce(s)),
                           "case2": lambda s: [rd.case2_reduce(s)]}[case](sys_)
            else:
                raise ConfigError(f"unknown reduction case {case!r}")
            gap = rd.equivalence_gap(sys_)
            res = max(rd.system_residual(sys_))
            passed = gap < cfg["gap_tol"] and res < cfg["residual_tol"]
            rep = rd.reduction_report(scalars, sys_)
            for s in scalars:
                good = (s.residual < cfg["residual_tol"] and s.mask_fraction >= cfg["min_mask_fraction"]
                        and s.bound_ok)
                passed &= good
                rows.append([case, seed, res, gap, s.form, s.residual, s.mask_fraction, s.w_sup,
                             s.bound_sup if s.bound_sup is not None else "", s.bound_ok,
                             "pass" if good and gap < cfg["gap_tol"] else "fail"])
            if not scalars:
                rows.append([case, seed, res, gap, "", "", "", "", "", "", "pass" if passed else "fail"])
            if case == "case2":
                s = scalars[0]
                print(f"case2 seed={seed}: sup|W| = {s.w_sup:.6g} <= |V21|+|V22| pointwise "
                      f"(sup {s.bound_sup:.6g}) {'verified' if s.bound_ok else 'VIOLATED'}; "
                      f"||V21||+||V22|| = {s.extras['V21_sup_plus_V22_sup']:.6g}")
            rep.update({"case": case, "seed": seed, "passed": passed})
            items.append(rep)
            ok &= passed
    _csv(rows, ["case", "seed", "system_residual", "equivalence_gap", "form", "equation_residual",
                "mask_fraction", "W_sup", "W_bound_sup", "W_within_bound", "verdict"],
         out / "reduce2d.csv", header("reduce2d", cfg))
    write_json(out / "reduce2d.json", {"reports": items, "all_pass": ok})
    print(f"reductions={len(items)} all_pass={ok}")
    return ok


def cmd_radial_solve(cfg: dict, out: Path) -> bool:
    from .polar import (RadialPotential, asymptotic_slope, coulomb_exponents, radial_ode_solve,
                        step_halving_ratio)

    rows, items = [], []
    ok = True
    lo, hi = cfg["halving_range"]
    for n in cfg["dims"]:
        half = (n - 1) / 2
        for lam in cfg["lams"]:
            ratio = step_halving_ratio(
                n, lam, RadialPotential.zero(), (1.0, 1.0), (0.0, 5.0), cfg["halving_steps"],
                exact=lambda y, lam=lam, half=half: (np.exp((lam - half) * y), np.exp(-(lam + half) * y)))
            free_ok = lo <= ratio <= hi
            ok &= free_ok
            items.append({"n": n, "lam": lam, "alpha": 0.0, "halving_ratio": ratio, "passed": free_ok})
            rows.append([n, lam, 0.0, lam - half, -(lam + half), "", "", "", "", ratio,
                         "pass" if free_ok else "fail"])
            for alpha in cfg["alphas"]:
                mp, mm = coulomb_exponents(n, lam, alpha)
                pot = RadialPotential.coulomb(alpha)
                g, h = radial_ode_solve(n, lam, pot, (1.0, 0.3), (0.0, cfg["y_max"]), cfg["steps"])
                sp = asymptotic_slope(g, h, "right")
                g2, h2 = radial_ode_solve(n, lam, pot, (1.0, 0.3), (0.0, -cfg["y_max"]), cfg["steps"])
                sm = asymptotic_slope(g2, h2, "left")
                good = abs(sp - mp) < cfg["slope_tol"] and abs(sm - mm) < cfg["slope_tol"]
                ok &= good
                tag = f"n{n}_lam{lam:g}_alpha{alpha:g}"
                _dat(out / f"radial-solve_{tag}_fwd.dat", g.y, np.log(np.hypot(np.abs(g.values), np.abs(h.values))))
                _dat(out / f"radial-solve_{tag}_bwd.dat", g2.y,
                     np.log(np.hypot(np.abs(g2.values), np.abs(h2.values))))
                items.append({"n": n, "lam": lam, "alpha": alpha, "mu_plus": mp, "mu_minus": mm,
                              "slope_forward": sp, "slope_backward": sm, "passed": good})
                rows.append([n, lam, alpha, mp, mm, sp, sm, abs(sp - mp), abs(sm - mm), "",
                             "pass" if good else "fail"])
                print(f"n={n} lambda={lam:g} alpha={alpha:g}: mu+ = {mp:.12g} mu- = {mm:.12g} "
                      f"(measured {sp:.12g}, {sm:.12g})")
    _csv(rows, ["n", "lambda", "alpha", "mu_plus", "mu_minus", "slope_plus", "slope_minus", "err_plus",
                "err_minus", "halving_ratio", "verdict"], out / "radial-solve.csv", header("radial-solve", cfg))
    write_json(out / "radial-solve.json", {"runs": items, "all_pass": ok})
    return ok


def _dat(path: Path, x, y) -> None:
    path.write_text("".join(f"{a!r} {b!r}\n" for a, b in zip(np.asarray(x).tolist(), np.asarray(y).tolist())))


def cmd_landis_fit(cfg: dict, out: Path) -> bool:
    from .fields import DecayProfile, GridSpec, manufacture_solution
    from .landis import check_lower_bound, check_own_envelope, fit_envelope, vanishing_curve

    grid = GridSpec(2, cfg["L"], cfg["M"])
    rep = build_clifford(2)
    ladder = np.arange(cfg["R_min"], cfg["R_max"] + 1e-9, cfg["R_step"])
    b = cfg["bound"]
    rows, items = [], []
    ok = True
    for c in cfg["cs"]:
        U, V = manufacture_solution(DecayProfile.exponential(c, cfg["smoothing"]), rep, grid)
        curve = vanishing_curve(U, ladder, cfg["sphere_samples"], cfg["ball_samples"])
        f10 = fit_envelope(curve, 1, 0)
        f22 = fit_envelope(curve, 2, 2)
        chk = check_lower_bound(curve, b["kappa"], b["p"], b["q"], b["c"])
        own = check_own_envelope(curve, f10)
        kappa_ok = abs(f10.kappa - c) <= cfg["kappa_tol"] * c
        resid_ok = f22.residual >= cfg["residual_ratio"] * f10.residual
        passed = kappa_ok and resid_ok and chk.passed and own.passed
        ok &= passed
        for R, m, bd, v in zip(chk.R.tolist(), chk.MR.tolist(), chk.bound.tolist(), chk.verdicts):
            rows.append([c, R, m, bd, "pass" if v else "fail"])
        curve.to_dat(out / f"landis-fit_c{c:g}.dat")
        items.append({"c": c, "V_sup": V.sup_norm, "fit_1_0": f10.__dict__, "fit_2_2": f22.__dict__,
                      "kappa_ok": kappa_ok, "residual_ratio": f22.residual / max(f10.residual, 1e-300),
                      "bound_pass": chk.passed, "own_envelope_pass": own.passed, "passed": passed})
        print(f"c={c:g} ||V||_inf={V.sup_norm:.6g}: kappa(1,0)={f10.kappa:.6g} residual(1,0)={f10.residual:.3g} "
              f"residual(2,2)={f22.residual:.3g} bound {'pass' if chk.passed else 'FAIL'}")
    _csv(rows, ["c", "R", "M_R", "bound", "verdict"], out / "landis-fit.csv", header("landis-fit", cfg))
    write_json(out / "landis-fit.json", {"fits": items, "ladder": ladder.tolist(), "all_pass": ok})
    return ok


def cmd_regularity_check(cfg: dict, out: Path) -> bool:
    from .carleman import random_specs
    from .fields import GridSpec
    from .regularity import cz_ratio, empirical_constants, manufactured_family, reports_to_csv, w1p_sweep

    rep = build_clifford(2)
    specs = random_specs(cfg["cz_trials"], cfg["seed"], L=4.0, M=cfg["cz_M"])
    cz = {}
    for p in cfg["cz_ps"]:
        ratios = [cz_ratio(rep, s, float(p)) for s in specs]
        cz[repr(float(p))] = {"max": max(ratios, default=0.0), "min": min(ratios, default=0.0)}
    cz_ok = all(v["max"] <= 1 + cfg["cz_tol"] for k, v in cz.items() if float(k) == 2.0)
    grid = GridSpec(2, cfg["L"], cfg["M"])
    centers = [tuple(c) for c in cfg["centers"]]
    reports, constants = [], []
    for fs in cfg["family_seeds"]:
        fam = manufactured_family(cfg["family_size"], int(fs), grid)
        rs = w1p_sweep(fam, cfg["ps"], cfg["radii"], centers)
        reports.extend(rs)
        constants.append(empirical_constants(rs))
    vals = [c["constant"] for c in constants]
    spread = (max(vals) - min(vals)) / min(vals) if len(vals) > 1 and min(vals) > 0 else 0.0
    w1p_ok = spread < cfg["stability"]
    reports_to_csv(reports, out / "regularity-check.csv", header("regularity-check", cfg))
    write_json(out / "regularity-check.json",
               {"cz": cz, "cz_pass": cz_ok, "w1p_families": constants, "w1p_spread": spread, "w1p_pass": w1p_ok,
                "norm_convention": "W1p = Lp + Lp(grad)"})
    for k, v in cz.items():
        print(f"CZ p={k}: max ratio {v['max']!r}")
    print(f"W1p constants per family: {vals} spread {spread:.3f}")
    return cz_ok and w1p_ok


HANDLERS = {
    "clifford-check": cmd_clifford_check,
    "carleman-sweep": cmd_carleman_sweep,
    "carleman-1d": cmd_carleman_1d,
    "reduce2d": cmd_reduce2d,
    "radial-solve": cmd_radial_solve,
    "landis-fit": cmd_landis_fit,
    "regularity-check": cmd_regularity_check,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="diraclab", description="Dirac operator verification suites.")
    parser.add_argument("--version", action="version", version=f"diraclab {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name, help=HANDLERS[name].__doc__ or name)
        p.add_argument("--config", help="TOML file")
        p.add_argument("--seed", type=int)
        p.add_argument("--out-dir", default=".", help="directory for CSV/JSON/.dat outputs")
        p.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                       help="override a config key (TOML literal syntax)")
    return parser


def run(command: str, cfg: dict, out_dir) -> bool:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    return HANDLERS[command](cfg, out)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        file_cfg = load_config_file(args.config, args.command) if args.config else {}
        flags = dict(parse_override(s) for s in args.set)
        if args.seed is not None:
            flags["seed"] = args.seed
        cfg, source = resolve(args.command, file_cfg, flags)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    print_config(args.command, cfg, source)
    threads = os.environ.get("DIRACLAB_THREADS", "1")
    print(f"  threads = {threads}  [env DIRACLAB_THREADS]")
    t0 = time.perf_counter()
    try:
        ok = run(args.command, cfg, args.out_dir)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    print(f"{'PASS' if ok else 'FAIL'} ({time.perf_counter() - t0:.1f} s)")
    return 0 if ok else 1


if __name__ == "__main__":
    sys.exit(main())
