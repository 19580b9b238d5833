"""Command-line entry point.

Angles are given in degrees and converted to radians internally.  Exit codes:
0 success, 1 usage error, 2 numerical termination (singularity, unclassifiable
trajectory and other solver-reported failures).
"""

from __future__ import annotations

import argparse
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from . import io
from .errors import ConeSolitonError

EXIT_OK, EXIT_USAGE, EXIT_NUMERICAL = 0, 1, 2
OUT_ENV = "CONESOLITONS_OUT"


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _out_dir(args):
    out = Path(args.out or os.environ.get(OUT_ENV) or "out")
    out.mkdir(parents=True, exist_ok=True)
    return out


# ---------------------------------------------------------------------------
# Presets
# ---------------------------------------------------------------------------


def _floats(text, count, name):
    try:
        vals = [float(x) for x in text.split(",")]
    except ValueError:
        raise UsageError(f"preset {name} needs {count} numbers") from None
    if len(vals) != count:
        raise UsageError(f"preset {name} needs {count} numbers")
    return vals


def preset_profile(name, n=512):
    """Initial radial profile for a named preset."""
    from .football import football_profile, solve_angles
    from .geometry import cigar_profile, flat_cone_profile, sphere_profile
    from .soliton import SolitonSpec, orbit, trajectory_profile

    key, _, arg = name.partition(":")
    if key == "sphere" and not arg:
        return sphere_profile(n)
    if key == "cigar" and not arg:
        return cigar_profile(rho_max=10.0, n=n)
    if key == "flatcone":
        (beta,) = _floats(arg or "-0.5", 1, key)
        if not -1.0 < beta <= 0.0:
            raise UsageError("flatcone beta must lie in (-1, 0]")
        return flat_cone_profile(2 * math.pi * (beta + 1.0), rho_max=5.0, n=n)
    if key == "football":
        a1, a2 = _floats(arg or "108,183.38", 2, key)
        if a1 <= 0 or a2 <= 0:
            raise UsageError("football angles must be positive")
        return football_profile(solve_angles(math.radians(a1), math.radians(a2)), n)
    if key == "teardrop":
        a, b = _floats(arg or "0.8,-1", 2, key)
        if a <= 0 or b == 0:
            raise UsageError("teardrop needs a > 0 and b != 0")
        return trajectory_profile(orbit(SolitonSpec(-1, a, b)), n)
    raise UsageError(f"unknown preset {name!r}")


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------


def cmd_classify(args):
    from .soliton import ClassifyConfig, SolitonSpec, classify, integrate

    if args.a < 0 or args.span <= 0:
        raise UsageError("need a >= 0 and span > 0")
    spec = SolitonSpec(args.eps, args.a, args.b)
    fam, traj = classify(spec, ClassifyConfig(tol=args.tol), return_trajectory=True)
    print(fam)
    if traj is None and args.b != 0:
        # Families decided by rule alone still get a sampled trajectory.
        sgn = 1.0 if args.b > 0 else -1.0
        traj = integrate(spec, (0.0, args.b), (0.0, sgn * args.span), tol=args.tol, tip_stop=1)
    if traj is not None:
        path = io.write_trajectory(_out_dir(args) / "trajectory.csv", traj)
        print(f"trajectory: {path}")
    return EXIT_OK


def cmd_football(args):
    from .football import solve_angles, verify_orbit

    if args.a1 <= 0 or args.a2 <= 0:
        raise UsageError("angles must be positive")
    sol = solve_angles(math.radians(args.a1), math.radians(args.a2), tol=args.tol)
    out = _out_dir(args)
    rec = {
        "alpha1": sol.alpha1,
        "alpha2": sol.alpha2,
        "k": sol.k,
        "p": sol.p,
        "q": sol.q,
        "a": sol.a,
        "A": sol.A,
        "closure_residual": verify_orbit(sol),
        "orbit_csv": None,
    }
    if sol.spherical:
        print("equal angles: spherical football h = c sin(r/sqrt2), a = 0")
    else:
        rec["orbit_csv"] = io.write_trajectory(out / "football_orbit.csv", sol.orbit).name
    path = io.write_json(out / "football.json", rec)
    print(f"a={sol.a:.6f} A={sol.A:.6f} closure_residual={rec['closure_residual']:.3e}")
    print(f"result: {path}")
    return EXIT_OK


def cmd_flow(args):
    from .polar_flow import SINGULARITY, FlowConfig, _operators, angle_drift, run_polar_flow

    if args.T <= 0 or args.n < 8:
        raise UsageError("need T > 0 and n >= 8")
    p = preset_profile(args.preset, args.n)
    cfg = FlowConfig(cfl=args.cfl, snapshot_every=args.snapshot_every, normalized=args.normalized)
    run = run_polar_flow(p, args.T, cfg)
    out = _out_dir(args)
    keys = sorted(k for k in run.series if k != "time")
    io.write_csv(out / "flow_series.csv", ["time"] + keys, [run.series["time"]] + [run.series[k] for k in keys])
    slices = []
    for i, s in enumerate(run.history):
        K = _operators(s.grid, s.h, s.closed)[2]
        name = f"flow_slice_{i:04d}.csv"
        io.write_flow_slice(out / name, s, K)
        slices.append({"time": s.time, "csv": name})
    manifest = {
        "initial": args.preset,
        "grid_n": args.n,
        "dt_policy": {"cfl": args.cfl, "rule": "dtau = cfl * drho^2"},
        "T": args.T,
        "normalized": args.normalized,
        "termination": run.status,
        "steps": run.steps,
        "angle_drift": angle_drift(run.history),
        "diagnostics_series_csv": "flow_series.csv",
        "slices": slices,
    }
    io.write_json(out / "flow.json", manifest)
    f = run.final
    print(f"status={run.status} steps={run.steps} tau={f.time:.6g} area={f.diagnostics['area']:.10g}")
    return EXIT_NUMERICAL if run.status == SINGULARITY else EXIT_OK


def _smooth_one(task):
    from .geometry import ConformalProfile
    from .smoothing import log_grid, run_conformal_flow, truncate_cone

    beta, A, k, r_min, n, T, times = task
    c0 = math.log(beta + 1.0) + A
    cone = ConformalProfile(beta=beta, a_fn=lambda r: np.full_like(np.asarray(r, dtype=float), c0), name="euclidean", a0=c0)
    run = run_conformal_flow(truncate_cone(cone, k, log_grid(r_min, 1.0, n)), T, times)
    return k, [run.at(t) for t in times]


def cmd_smooth(args):
    from .smoothing import barrier_coefficient

    if not -1.0 < args.beta < 0.0:
        raise UsageError("beta must lie in (-1, 0)")
    ks = sorted(float(k) for k in args.ks.split(","))
    times = [float(t) for t in np.logspace(math.log10(args.t_min), math.log10(args.T), args.samples)]
    tasks = [(args.beta, args.A, k, args.r_min, args.n, args.T, times) for k in ks]
    if args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as ex:
            results = list(ex.map(_smooth_one, tasks))
    else:
        results = [_smooth_one(t) for t in tasks]
    results.sort(key=lambda x: x[0])
    out = _out_dir(args)
    coef = barrier_coefficient(args.beta)
    shifted = np.array([[s.sup - coef * math.log(s.time) for s in sl] for _, sl in results])
    B = float(np.max(shifted[:, 0]))
    mono = min((float(np.min(results[i + 1][1][j].u - results[i][1][j].u)) for i in range(len(ks) - 1) for j in range(len(times))), default=0.0)
    for k, sl in results:
        grid = sl[0].grid
        io.write_csv(out / f"smooth_k{k:g}.csv", ["r"] + [f"u_t{j}" for j in range(len(times))], [grid] + [s.u for s in sl])
    report = {
        "beta": args.beta,
        "A": args.A,
        "ks": ks,
        "times": times,
        "barrier_coefficient": coef,
        "B": B,
        "barrier_excess": float(np.max(shifted - B)),
        "min_ordering_gap": mono,
        "sup_minus_log_term": shifted,
    }
    io.write_json(out / "smooth.json", report)
    print(f"B={B:.6f} barrier_excess={report['barrier_excess']:.3e} min_ordering_gap={mono:.3e}")
    return EXIT_OK


def cmd_cusp3d(args):
    from .cusp3d import CuspConfig, asymptotics_check, build_metric, linearize, shoot_separatrix

    if args.delta <= 0:
        raise UsageError("delta must be positive")
    cfg = CuspConfig(delta=args.delta, H_stop=args.H_stop, tol=args.tol, method=args.method)
    lin = linearize((0.5, 0.0))
    m = build_metric(shoot_separatrix(cfg))
    out = _out_dir(args)
    io.write_cusp_metric(out / "cusp3d.csv", m)
    report = {
        "eigenvalues": lin["eigenvalues"],
        "eigenvector_slopes": lin["slopes"],
        "delta": args.delta,
        "asymptotics": asymptotics_check(m),
        "sec_xy_range": [float(m.sec_xy.min()), float(m.sec_xy.max())],
        "sec_rx_range": [float(m.sec_rx.min()), float(m.sec_rx.max())],
        "sec_rx_two_way": float(np.max(np.abs(m.sec_rx - m.sec_rx_alt))),
        "metric_csv": "cusp3d.csv",
    }
    io.write_json(out / "cusp3d.json", report)
    l1, l2 = lin["eigenvalues"]
    print(f"eigenvalues {l1:.15f} {l2:.15f}  (-1+-sqrt5)/2 = {(-1 + math.sqrt(5)) / 2:.15f} {(-1 - math.sqrt(5)) / 2:.15f}")
    print(f"sec_xy in [{report['sec_xy_range'][0]:.6g}, {report['sec_xy_range'][1]:.6g}]")
    print(f"sec_rx in [{report['sec_rx_range'][0]:.6g}, {report['sec_rx_range'][1]:.6g}]")
    return EXIT_OK


def cmd_embed(args):
    from .geometry import embed_profile
    from .soliton import SolitonSpec, integrate, trajectory_profile

    if args.preset:
        p = preset_profile(args.preset, args.n)
    else:
        if args.a <= 0 or args.A <= 0 or args.b == 0:
            raise UsageError("need a > 0, A > 0 and b != 0 (or --preset)")
        spec = SolitonSpec(args.eps, args.a, args.b)
        sgn = 1.0 if args.b > 0 else -1.0
        # A little past A so that a closing tip near A is caught by the event.
        traj = integrate(spec, (0.0, args.b), (0.0, sgn * args.A * 1.05), tip_stop=1)
        p = trajectory_profile(traj, args.n, length=None if traj.tips() else args.A)
    h, z = embed_profile(p)
    verts, faces = io.revolution_mesh(h, z, args.segments)
    path = io.write_obj(_out_dir(args) / "embed.obj", verts, faces)
    print(f"vertices={len(verts)} faces={len(faces)} mesh: {path}")
    return EXIT_OK


def cmd_portrait(args):
    from .soliton import phase_portrait

    if args.a <= 0 or args.grid < 1:
        raise UsageError("need a > 0 and grid >= 1")
    hs = np.linspace(-args.box, args.box, args.grid + 2)[1:-1]
    us = np.linspace(-args.box, args.box, args.grid + 2)[1:-1]
    samples = [(h, u) for h in hs for u in us]
    bundle = phase_portrait(args.eps, args.a, samples, span=args.span, jobs=args.jobs)
    out = _out_dir(args)
    trajs = []
    for i, t in enumerate(bundle["trajectories"]):
        name = f"portrait_traj_{i:04d}.csv"
        io.write_csv(out / name, ["r", "h", "u"], [t["r"], t["states"][:, 0], t["states"][:, 1]])
        trajs.append({"init": t["init"], "csv": name})
    seps = []
    for i, s in enumerate(bundle["separatrices"]):
        name = f"portrait_sep_{i:02d}.csv"
        io.write_csv(out / name, ["r", "h", "u"], [s["r"], s["states"][:, 0], s["states"][:, 1]])
        seps.append({"eigenvalue": s["eigenvalue"], "direction": s["direction"], "csv": name})
    doc = {k: v for k, v in bundle.items() if k not in ("trajectories", "separatrices")}
    doc["trajectories"] = trajs
    doc["separatrices"] = seps
    io.write_json(out / "portrait.json", doc)
    print(f"critical_points={len(doc['critical_points'])} trajectories={len(trajs)} separatrices={len(seps)}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------


def _eps(text):
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError("eps must be -1, 0 or 1") from None
    if v not in (-1, 0, 1):
        raise argparse.ArgumentTypeError("eps must be -1, 0 or 1")
    return v


def build_parser():
    fmt = argparse.ArgumentDefaultsHelpFormatter
    parser = _Parser(prog="conesolitons", description="Rotationally symmetric Ricci solitons and flows.", formatter_class=fmt)
    parser.add_argument("--out", default=None, help=f"output directory (falls back to ${OUT_ENV}, then ./out)")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add(name, fn, help_):
        p = sub.add_parser(name, help=help_, description=help_, formatter_class=fmt)
        p.set_defaults(func=fn)
        p.add_argument("--out", default=argparse.SUPPRESS, help="output directory")
        return p

    p = add("classify", cmd_classify, "classify the soliton starting at the tip (0, b)")
    p.add_argument("--eps", type=_eps, default=-1, help="-1 shrinking, 0 steady, 1 expanding")
    p.add_argument("--a", type=float, default=1.0, help="gradient constant (f' = a h)")
    p.add_argument("--b", type=float, default=0.3, help="initial slope h'(0)")
    p.add_argument("--tol", type=float, default=1e-10, help="integrator tolerance")
    p.add_argument("--span", type=float, default=10.0, help="arc length sampled when the family is decided without integrating")

    p = add("football", cmd_football, "solve for the shrinking soliton with two given cone angles")
    p.add_argument("--a1", type=float, default=108.0, help="first cone angle (degrees)")
    p.add_argument("--a2", type=float, default=183.38, help="second cone angle (degrees)")
    p.add_argument("--tol", type=float, default=1e-10, help="integrator tolerance")

    p = add("flow", cmd_flow, "angle-preserving Ricci flow of a preset profile")
    p.add_argument("--preset", default="sphere", help="sphere | cigar | flatcone:beta | football:a1,a2 | teardrop:a,b")
    p.add_argument("--T", type=float, default=0.1, help="final time")
    p.add_argument("--n", type=int, default=512, help="grid nodes")
    p.add_argument("--cfl", type=float, default=0.25, help="dtau / drho^2")
    p.add_argument("--snapshot-every", type=int, default=0, help="keep a slice every N steps (0: first and last)")
    p.add_argument("--normalized", action="store_true", help="area-preserving normalized flow")

    p = add("smooth", cmd_smooth, "flows of truncated Euclidean cones and the upper barrier")
    p.add_argument("--beta", type=float, default=-0.5, help="cone exponent in (-1, 0)")
    p.add_argument("--A", type=float, default=3.0, help="log scale of the cone, u0 = ln(beta+1) + A + beta ln r")
    p.add_argument("--ks", default="8,10,12,14,16", help="comma-separated truncation levels")
    p.add_argument("--r-min", type=float, default=1e-30, help="innermost radius")
    p.add_argument("--n", type=int, default=4000, help="grid nodes (log-spaced)")
    p.add_argument("--t-min", type=float, default=1e-3, help="first sample time")
    p.add_argument("--T", type=float, default=0.1, help="final time")
    p.add_argument("--samples", type=int, default=21, help="log-spaced sample times")
    p.add_argument("--jobs", type=int, default=1, help="parallel worker processes")

    p = add("cusp3d", cmd_cusp3d, "expanding soliton on R x T^2 by separatrix shooting")
    p.add_argument("--delta", type=float, default=1e-6, help="offset from the saddle")
    p.add_argument("--H-stop", type=float, default=1e-4, help="stop when H falls below this")
    p.add_argument("--tol", type=float, default=1e-10, help="integrator tolerance")
    p.add_argument("--method", default="LSODA", choices=["LSODA", "Radau", "BDF"], help="stiff integrator")

    p = add("embed", cmd_embed, "surface of revolution mesh (OBJ) of a soliton or preset")
    p.add_argument("--eps", type=_eps, default=-1, help="-1 shrinking, 0 steady, 1 expanding")
    p.add_argument("--a", type=float, default=1.0, help="gradient constant")
    p.add_argument("--b", type=float, default=0.3, help="initial slope h'(0)")
    p.add_argument("--A", type=float, default=4.56, help="arc length to integrate")
    p.add_argument("--preset", default=None, help="embed a flow preset instead")
    p.add_argument("--n", type=int, default=256, help="meridian samples")
    p.add_argument("--segments", type=int, default=64, help="angular resolution")

    p = add("portrait", cmd_portrait, "phase portrait bundle (JSON + trajectory CSVs)")
    p.add_argument("--eps", type=_eps, default=-1, help="-1 shrinking, 0 steady, 1 expanding")
    p.add_argument("--a", type=float, default=1.0, help="gradient constant")
    p.add_argument("--grid", type=int, default=4, help="samples per axis")
    p.add_argument("--box", type=float, default=1.5, help="half-width of the sampled square")
    p.add_argument("--span", type=float, default=6.0, help="arc length each way")
    p.add_argument("--jobs", type=int, default=1, help="parallel worker processes")
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ConeSolitonError as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
