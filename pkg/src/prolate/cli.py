"""Command-line entry point: ``prolate pswf | verify <suite> | export <what>``.

Exit status: 0 when every assertion of the command passes, 1 on the first
violated inequality, 2 on infrastructure or input errors.  Reports are
canonical JSON on stdout (and optionally in a file), so identical
configurations give byte-identical output.
"""
from __future__ import annotations

import argparse
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from . import besov, extensions, functional, heat, perturbation
from .errors import INFRASTRUCTURE_ERRORS, DomainError, PotentialNegative, ProlateError, VerificationFailure
from .geometry import theta, theta_grid
from .io import REPORT_VERSION, RunConfig, cached_decomposition, dumps, write_csv, write_json
from .orthopoly import eval_legendre_normalized
from .pswf import bracket_margins, proximity_bound

__all__ = ["main", "build_parser", "run"]

DRIFT_TOL = 0.25


def _floats(text):
    return [float(v) for v in str(text).split(",") if v.strip()]


def _ints(text):
    return [int(v) for v in str(text).split(",") if v.strip()]


def _pmap(fn, items, workers):
    """Ordered map, in worker processes when workers > 1."""
    items = list(items)
    if workers is None or workers <= 1 or len(items) <= 1:
        return [fn(v) for v in items]
    with ProcessPoolExecutor(max_workers=workers) as ex:
        return list(ex.map(fn, items))


def _drift(a, b):
    return abs(b / a - 1.0) if a else math.inf


# -- pswf -------------------------------------------------------------------

def cmd_pswf(args):
    dec, path, _ = cached_decomposition(args.c, args.n_max, use_cache=not args.no_cache)
    x = theta_grid(args.grid)
    lo, hi = bracket_margins(dec)
    Psi = dec.evaluate(x)
    rows, worst = [], math.inf
    for n in range(dec.n_max + 1):
        err = float(np.max(np.abs(Psi[n] - eval_legendre_normalized(n, x))))
        bound = float(proximity_bound(args.c, n))
        rows.append([n, float(dec.chis[n]), float(lo[n]), float(hi[n]), err, bound])
        worst = min(worst, bound - err)
    if args.c == 0:
        bracket_ok = bool(np.max(np.abs(lo)) <= 1e-12 * max(1.0, float(dec.chis[-1])))
    else:
        bracket_ok = bool(np.min(lo) > 0 and np.min(hi) > 0)
    out = Path(args.out) if args.out else None
    if out:
        write_json(out / f"pswf_c{args.c!r}_n{args.n_max}.json", dec.to_dict())
        write_csv(out / f"pswf_c{args.c!r}_n{args.n_max}_table.csv",
                  ["n", "chi", "lower_margin", "upper_margin", "sup_psi_minus_P", "proximity_bound"], rows)
    report = {
        "command": "pswf", "c": args.c, "n_max": args.n_max, "N": dec.N,
        "passed": bracket_ok and worst >= 0,
        "min_lower_margin": float(np.min(lo)), "min_upper_margin": float(np.min(hi)),
        "min_proximity_slack": worst,
        "table": [dict(zip(["n", "chi", "lower_margin", "upper_margin", "sup_psi_minus_P", "proximity_bound"], r))
                  for r in rows],
    }
    return report


# -- verify suites ----------------------------------------------------------

def _sandwich_one(job):
    c, t, grid = job
    return heat.verify_pswf_sandwich(c, [t], theta_grid(grid), raise_on_violation=False)


def suite_sandwich(args):
    reps = _pmap(_sandwich_one, [(args.c, t, args.grid) for t in args.t], args.workers)
    per_t = [r["per_t"][0] for r in reps]
    lo = min(r["lower_slack"] for r in per_t)
    hi = min(r["upper_slack"] for r in per_t)
    return {"c": args.c, "grid": args.grid, "passed": lo >= 0 and hi >= 0,
            "worst_lower_slack": lo, "worst_upper_slack": hi, "per_t": per_t}


def _fit_dict(f):
    return {k: getattr(f, k) for k in ("c1", "c2", "c3", "c4")}


def suite_envelope(args):
    kinds = ["legendre", "prolate"] if args.kind == "both" else [args.kind]
    out = {"t0": args.t0, "grid": args.grid, "c": args.c, "kinds": {}}
    passed = True
    for kind in kinds:
        coarse = heat.fit_envelope_bands(kind, args.t0, args.grid, args.c)
        fine = heat.fit_envelope_bands(kind, args.t0, 2 * args.grid - 1, args.c)
        refine = max(_drift(getattr(a, k), getattr(b, k)) for a, b in zip(coarse, fine) for k in ("c1", "c2", "c3", "c4"))
        across = max(max(getattr(f, k) for f in coarse) / min(getattr(f, k) for f in coarse) - 1
                     for k in ("c1", "c2", "c3", "c4"))
        ok = refine < DRIFT_TOL and across < DRIFT_TOL
        passed &= ok
        out["kinds"][kind] = {"bands": [_fit_dict(f) for f in coarse], "bands_refined": [_fit_dict(f) for f in fine],
                              "refinement_drift": refine, "band_drift": across, "passed": ok}
    out["passed"] = passed
    return out


def suite_holder(args):
    kinds = ["legendre", "prolate"] if args.kind == "both" else [args.kind]
    out = {"t": args.t, "grid": args.grid, "c": args.c, "kinds": {}}
    passed = True
    for kind in kinds:
        fit = heat.fit_gaussian_envelope(kind, args.t, args.grid, args.c)
        c8 = 2 * fit.c4
        a = heat.verify_holder_alpha1(kind, args.t, args.grid, c8, args.c)["C"]
        b = heat.verify_holder_alpha1(kind, args.t, 2 * args.grid - 1, c8, args.c)["C"]
        ok = math.isfinite(a) and _drift(a, b) < DRIFT_TOL
        passed &= ok
        out["kinds"][kind] = {"c8": c8, "C": a, "C_refined": b, "drift": _drift(a, b), "passed": ok}
    out["passed"] = passed
    return out


def suite_finite_speed(args):
    if args.profile == "fejer":
        prof = functional.MultiplierProfile.fejer(args.A)
    else:
        prof = functional.MultiplierProfile.band_limited(args.A, args.p)
    reps = [functional.verify_finite_speed(prof, d, "prolate", args.c, args.grid, args.n_terms) for d in args.delta]
    return {"passed": all(r["passed"] for r in reps), "runs": reps}


def suite_besov(args):
    params = besov.BesovParams(args.s, args.p, args.q, args.flavor)
    rep = besov.equivalence_experiment(params, args.c, tuple(args.support), space=args.space, seed=args.seed)
    if args.c == 0:
        ok = all(abs(r["min_ratio"] - 1) <= 1e-10 and abs(r["max_ratio"] - 1) <= 1e-10 for r in rep["rows"])
    else:
        ok = rep["drift"] < 0.10
    rep["passed"] = ok
    return rep


def _potential(args):
    if args.potential == "quadratic":
        return extensions.Potential.quadratic(args.c)
    if args.potential == "constant":
        return extensions.Potential.constant(args.value)
    if args.potential == "quartic":
        return extensions.Potential.polynomial([0, 0, 0, 0, args.value])
    raise DomainError(f"unknown potential {args.potential!r}")


def suite_interlacing(args):
    prob = extensions.JacobiPerturbationProblem(args.alpha, args.beta, _potential(args))
    rep = extensions.verify_interlacing(prob, args.n_max)
    rep["passed"] = True
    return rep


def suite_ball(args):
    prob = extensions.BallProblem(args.d, args.gamma, args.c, args.m_max, args.m_max // 2)
    tab = extensions.ball_eigenvalues(prob)
    mask = (np.arange(prob.n_max + 1)[:, None] + 2 * np.arange(prob.k_max + 1)[None, :]) <= args.m_max
    lo = (tab.chi - tab.lam)[mask]
    hi = (tab.lam + args.c**2 - tab.chi)[mask]
    bracket_ok = bool(lo.min() > 0 and hi.min() > 0) if args.c > 0 else bool(np.abs(lo).max() <= 1e-9)
    rep = {"d": args.d, "gamma": args.gamma, "c": args.c, "m_max": args.m_max,
           "min_lower_gap": float(lo.min()), "min_upper_gap": float(hi.min()), "bracket_passed": bracket_ok}
    if args.t and args.d in (2, 3):
        rep["sandwich"] = extensions.ball_sandwich_diagonal(args.d, args.gamma, args.c, args.t, args.n_radial,
                                                            raise_on_violation=False)
        rep["passed"] = bracket_ok and rep["sandwich"]["passed"]
    else:
        rep["passed"] = bracket_ok
    return rep


def suite_perturbation(args):
    rep = perturbation.fuzz_sandwich(args.instances, args.seed)
    rep["passed"] = True
    return rep


SUITES = {
    "sandwich": suite_sandwich,
    "envelope": suite_envelope,
    "holder": suite_holder,
    "finite-speed": suite_finite_speed,
    "besov": suite_besov,
    "interlacing": suite_interlacing,
    "ball": suite_ball,
    "perturbation": suite_perturbation,
}


def cmd_verify(args):
    rep = SUITES[args.suite](args)
    rep["suite"] = args.suite
    if not rep["passed"]:
        raise VerificationFailure(f"{args.suite} suite failed", report=rep)
    return rep


# -- export -----------------------------------------------------------------

def cmd_export(args):
    out = Path(args.out or ".")
    files = []
    x = theta_grid(args.grid)
    if args.what == "heat":
        for t in args.t:
            K = heat.eval_heat_kernel(args.kind, t, x, x, c=args.c)
            rows = [[x[i], x[j], t, K.values[i, j]] for i in range(len(x)) for j in range(len(x))]
            files.append(write_csv(out / f"heat_{args.kind}_c{args.c!r}_t{t!r}.csv", ["x", "y", "t", "value"], rows))
    elif args.what == "multiplier":
        prof = functional.MultiplierProfile.gaussian() if args.profile == "gaussian" else functional.MultiplierProfile.bump(args.R)
        for d in args.delta:
            K = functional.eval_multiplier_kernel(prof, d, args.kind, x, x, args.c)
            rows = [[x[i], x[j], d, K.values[i, j]] for i in range(len(x)) for j in range(len(x))]
            files.append(write_csv(out / f"multiplier_{args.profile}_{args.kind}_delta{d!r}.csv",
                                   ["x", "y", "delta", "value"], rows))
    elif args.what == "envelope":
        fit = heat.fit_gaussian_envelope(args.kind, args.t, args.grid, args.c)
        th = theta(x)
        rows = []
        for t in args.t:
            K = heat.eval_heat_kernel(args.kind, t, x, x, c=args.c)
            r, rho, mask = heat.envelope_ratio(K)
            upper = r / (fit.c3 * np.exp(-rho**2 / (fit.c4 * t)))
            lower = r * math.exp(t * args.c**2) / (fit.c1 * np.exp(-rho**2 / (fit.c2 * t)))
            for i in range(len(th)):
                for j in range(len(th)):
                    if mask[i, j]:
                        rows.append([rho[i, j], t, upper[i, j], lower[i, j]])
        files.append(write_csv(out / f"envelope_{args.kind}_c{args.c!r}.csv", ["rho", "t", "ratio_upper", "ratio_lower"], rows))
    else:  # pragma: no cover - argparse restricts choices
        raise DomainError(f"unknown export {args.what!r}")
    return {"command": "export", "what": args.what, "passed": True, "files": [str(f) for f in files]}


# -- parser -----------------------------------------------------------------

def _common(p):
    p.add_argument("--out", help="output directory for artifacts")
    p.add_argument("--report", help="also write the JSON report to this file")
    p.add_argument("--workers", type=int, default=os.cpu_count() or 1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--save-config", help="write the resolved run configuration here")


def build_parser():
    ap = argparse.ArgumentParser(prog="prolate", description="PSWF spectral numerics and inequality checks")
    ap.add_argument("--config", help="run configuration JSON (replaces the command line)")
    ap.add_argument("--report", dest="config_report", help="with --config: write the JSON report here")
    ap.add_argument("--out", dest="config_out", help="with --config: output directory override")
    sub = ap.add_subparsers(dest="command")

    p = sub.add_parser("pswf", help="eigen-solve, cache and tabulate")
    p.add_argument("--c", type=float, required=True)
    p.add_argument("--n-max", type=int, required=True)
    p.add_argument("--grid", type=int, default=2001)
    p.add_argument("--no-cache", action="store_true")
    _common(p)

    p = sub.add_parser("verify", help="run a verification suite")
    p.add_argument("suite", choices=sorted(SUITES))
    p.add_argument("--c", type=float, default=1.0)
    p.add_argument("--t", type=_floats, default=[0.01, 0.1, 1.0])
    p.add_argument("--t0", type=float, default=0.05)
    p.add_argument("--grid", type=int, default=None)
    p.add_argument("--kind", choices=["legendre", "prolate", "both"], default="both")
    p.add_argument("--A", type=float, default=2.0)
    p.add_argument("--delta", type=_floats, default=[0.5])
    p.add_argument("--profile", choices=["fejer", "band_limited"], default="fejer")
    p.add_argument("--p", type=float, default=None)
    p.add_argument("--n-terms", type=int, default=1200)
    p.add_argument("--s", type=float, default=0.5)
    p.add_argument("--q", type=float, default=2.0)
    p.add_argument("--flavor", choices=["classical", "nonclassical"], default="classical")
    p.add_argument("--space", choices=["besov", "tl"], default="besov")
    p.add_argument("--support", type=_ints, default=[32, 64, 128])
    p.add_argument("--alpha", type=float, default=0.0)
    p.add_argument("--beta", type=float, default=0.0)
    p.add_argument("--potential", choices=["quadratic", "constant", "quartic"], default="quadratic")
    p.add_argument("--value", type=float, default=1.0)
    p.add_argument("--n-max", type=int, default=60)
    p.add_argument("--d", type=int, default=2)
    p.add_argument("--gamma", type=float, default=0.5)
    p.add_argument("--m-max", type=int, default=40)
    p.add_argument("--n-radial", type=int, default=25)
    p.add_argument("--instances", type=int, default=200)
    _common(p)

    p = sub.add_parser("export", help="write tidy CSV plot data")
    p.add_argument("what", choices=["heat", "multiplier", "envelope"])
    p.add_argument("--kind", choices=["legendre", "prolate"], default="prolate")
    p.add_argument("--c", type=float, default=1.0)
    p.add_argument("--t", type=_floats, default=[0.05, 0.1, 0.2])
    p.add_argument("--delta", type=_floats, default=[0.25, 0.5, 1.0])
    p.add_argument("--profile", choices=["gaussian", "bump"], default="gaussian")
    p.add_argument("--R", type=float, default=2.0)
    p.add_argument("--grid", type=int, default=41)
    _common(p)
    return ap


_GRID_DEFAULTS = {"sandwich": 41, "envelope": 41, "holder": 41, "finite-speed": 241}


def _finalize(args):
    if args.command == "verify":
        if args.grid is None:
            args.grid = _GRID_DEFAULTS.get(args.suite, 41)
        if args.p is None:
            args.p = 4 if args.suite == "finite-speed" else 2.0
        if args.suite == "ball" and args.c == 1.0 and args.t == [0.01, 0.1, 1.0]:
            args.t = [0.2]
    if args.command == "pswf" and args.c < 0:
        raise DomainError("c must be nonnegative", c=args.c)
    return args


def _config_of(args):
    skip = {"config", "config_report", "config_out", "save_config", "report", "workers"}
    params = {k: v for k, v in sorted(vars(args).items()) if k not in skip and k != "command"}
    return RunConfig(args.command, params, getattr(args, "seed", 0))


def _args_from_config(cfg: RunConfig, parser):
    ns = argparse.Namespace(command=cfg.command, config=None, save_config=None, report=None,
                            workers=os.cpu_count() or 1)
    for k, v in cfg.params.items():
        setattr(ns, k, v)
    ns.seed = cfg.seed
    return ns


def run(argv=None):
    """Parse, execute and return (exit status, report dict)."""
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.config:
            overrides = {k: getattr(args, "config_" + k) for k in ("report", "out") if getattr(args, "config_" + k, None)}
            args = _args_from_config(RunConfig.load(args.config), parser)
            for k, v in overrides.items():
                setattr(args, k, v)
        if not args.command:
            parser.print_help(sys.stderr)
            return 2, {"status": "error", "error": {"code": "usage", "message": "no command"}}
        args = _finalize(args)
        if getattr(args, "save_config", None):
            _config_of(args).save(args.save_config)
        handler = {"pswf": cmd_pswf, "verify": cmd_verify, "export": cmd_export}[args.command]
        report = handler(args)
        status, body = 0, {"status": "pass", "report": report}
    except VerificationFailure as exc:
        status, body = 1, {"status": "fail", "error": exc.to_dict()}
    except ProlateError as exc:
        if isinstance(exc, INFRASTRUCTURE_ERRORS + (DomainError, PotentialNegative)):
            status = 2
        else:
            status = 1  # a violated inequality raised by a module
        body = {"status": "error" if status == 2 else "fail", "error": exc.to_dict()}
    except OSError as exc:
        status, body = 2, {"status": "error", "error": {"code": "io", "message": str(exc)}}
    body["version"] = REPORT_VERSION
    if getattr(args, "report", None):
        write_json(args.report, body)
    return status, body


def main(argv=None):
    status, body = run(argv)
    sys.stdout.write(dumps(body))
    return status


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
