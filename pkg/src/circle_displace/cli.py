"""Batch command-line front end.

Every subcommand reads a map (or firing model) description, runs one library
operation, and writes deterministic CSV/JSON artifacts: 17 significant
digits, LF endings, a provenance comment line echoing the full config.
Errors exit nonzero with a machine-readable JSON object on stderr carrying a
stable error code.
"""

import argparse
import json
import os
import sys

import numpy as np

from . import measures, orbits, rational
from .errors import CircleDisplaceError
from .ifm import FiringModel, firing_map, isi_sequence
from .maps import MapSpec

FMT = "%.17g"


def _fmt(x):
    if isinstance(x, str):
        return x
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return FMT % float(x)


def _config_echo(args):
    cfg = {k: v for k, v in sorted(vars(args).items())
           if k != "func" and v is not None}
    cfg["rng_seed"] = cfg.get("rng_seed", 0)
    threads = os.environ.get("CIRCLE_DISPLACE_THREADS")
    if threads is not None:
        cfg["threads"] = threads
    return json.dumps(cfg, sort_keys=True, default=str)


def _open_out(path):
    if path in (None, "-"):
        return sys.stdout, False
    return open(path, "w", newline="\n"), True


def write_csv(args, header, rows):
    out, close = _open_out(getattr(args, "out", None))
    try:
        out.write(f"# config: {_config_echo(args)}\n")
        out.write(",".join(header) + "\n")
        for row in rows:
            out.write(",".join(_fmt(v) for v in row) + "\n")
    finally:
        if close:
            out.close()


def write_json(args, obj):
    out, close = _open_out(getattr(args, "out", None))
    try:
        out.write(json.dumps(obj, sort_keys=True) + "\n")
    finally:
        if close:
            out.close()


# -- input parsing ------------------------------------------------------------


def parse_map(text):
    """Map description: inline JSON, @file.json, or compact family:params.

    Compact forms: rotation:RHO | arnold:OMEGA,K | unit_graph:NAME |
    conjugated:RHO,A (A = sine-perturbation amplitude of the conjugacy).
    """
    text = text.strip()
    if text.startswith("@"):
        with open(text[1:]) as fh:
            text = fh.read()
    if text.startswith("{"):
        return MapSpec.from_json(text)
    family, _, rest = text.partition(":")
    parts = [p for p in rest.split(",") if p]
    if family == "rotation":
        return MapSpec("rotation", {"rho": float(parts[0])})
    if family == "arnold":
        return MapSpec("arnold", {"omega": float(parts[0]), "k": float(parts[1])})
    if family == "unit_graph":
        return MapSpec("unit_graph", {"f": parts[0]})
    if family == "conjugated":
        gamma = MapSpec("sine_perturb", {"a": float(parts[1])})
        return MapSpec("conjugated", {"rho": float(parts[0])}, aux=gamma)
    raise ValueError(f"cannot parse map {text!r}")


def parse_model(text):
    text = text.strip()
    if text.startswith("@"):
        with open(text[1:]) as fh:
            text = fh.read()
    return FiringModel.from_json(text)


def read_measure_csv(path):
    atoms, weights = [], []
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#") or line.startswith("atom"):
                continue
            a, w = line.split(",")
            atoms.append(float(a))
            weights.append(float(w))
    return measures.EmpiricalMeasure.from_atoms(atoms, weights)


def _build(args):
    return parse_map(args.map).build()


def _conjugacy_for(args, lift):
    if "conjugacy" in lift.meta:
        return lift.meta["conjugacy"]
    n = max(getattr(args, "n", 10 ** 5) or 10 ** 5, 10 ** 4)
    return measures.empirical_conjugacy(lift, args.x0, n)


# -- subcommands ---------------------------------------------------------------


def cmd_orbit(args):
    ob = orbits.iterate(_build(args), args.x0, args.n,
                        "backward" if args.backward else "forward")
    write_csv(args, ("n", "frac", "winding"),
              ((i, ob.fracs[i], int(ob.windings[i])) for i in range(len(ob))))


def cmd_disp(args):
    series = orbits.displacement_sequence(_build(args), args.x0, args.n,
                                          "backward" if args.backward else "forward")
    write_csv(args, ("n", "eta"),
              ((i + 1, v) for i, v in enumerate(series.values)))


def cmd_rotnum(args):
    est = orbits.rotation_number(_build(args), args.x0, args.n)
    write_json(args, {"value": est.value, "n_used": est.n_used,
                      "p": est.rational_approx[0], "q": est.rational_approx[1],
                      "classification": est.classification,
                      "residual": est.residual})


def cmd_periodic(args):
    lift = _build(args)
    est = orbits.rotation_number(lift, args.x0, args.n)
    p, q = (args.p, args.q) if args.q else est.rational_approx
    structure = rational.find_periodic_points(lift, q, p)
    if structure.degenerate:
        write_json(args, {"degenerate": True, "q": q, "p": p})
        return
    rows = [(x, *structure.stability(i)) for i, x in enumerate(structure.points)]
    write_csv(args, ("point", "left_side", "right_side"), rows)


def cmd_shred(args):
    lift = _build(args)
    eps_values = [float(e) for e in args.eps.split(",")]
    est = orbits.rotation_number(lift, args.x0, args.n)
    p, q = (args.p, args.q) if args.q else est.rational_approx
    structure = rational.find_periodic_points(lift, q, p)
    results = rational.shred_table(lift, eps_values, structure=structure)
    write_csv(args, ("eps", "m_tilde", "a", "b", "shred"),
              ((r.eps, r.m_tilde, r.a, r.b, r.shred) for r in results))
    if args.tau_out:
        rows = []
        for r in results:
            zs, tp, tm = rational.tau_grid(lift, structure, r.interval,
                                           r.m_tilde, args.tau_points)
            rows.extend(zip([r.eps] * len(zs), zs, tp, tm))
        sub = argparse.Namespace(**{**vars(args), "out": args.tau_out})
        write_csv(sub, ("eps", "z", "tau_plus", "tau_minus"), rows)


def cmd_universal_n(args):
    lift = _build(args)
    est = orbits.rotation_number(lift, args.x0, args.n)
    p, q = (args.p, args.q) if args.q else est.rational_approx
    structure = rational.find_periodic_points(lift, q, p)
    n_val = rational.universal_N(lift, args.eps, structure=structure)
    write_json(args, {"eps": args.eps, "N": n_val, "q": q, "p": p,
                      "periodic_points": [float(x) for x in structure.points],
                      "degenerate": structure.degenerate})


def cmd_conc(args):
    lo, hi = measures.concentration_interval(_build(args))
    write_json(args, {"lo": lo, "hi": hi})


def cmd_conj(args):
    est = measures.empirical_conjugacy(_build(args), args.x0, args.n, args.grid)
    write_csv(args, ("x", "gamma_hat"), zip(est.grid, est.gamma_hat))


def cmd_pushforward(args):
    lift = _build(args)
    mu = measures.displacement_pushforward(lift, _conjugacy_for(args, lift),
                                           grid=args.grid)
    write_csv(args, ("atom", "weight"), zip(mu.atoms, mu.weights))


def cmd_sample(args):
    lift = _build(args)
    mu = measures.sample_displacement_distribution(lift, args.x0, args.n)
    if args.summary:
        obj = {"mean": measures.distribution_mean(mu),
               "support": list(mu.support), "n": args.n, "atoms": len(mu.atoms)}
        if "conjugacy" in lift.meta:
            pf = measures.displacement_pushforward(lift, lift.meta["conjugacy"])
            obj["d_F_to_pushforward"] = measures.fortet_mourier(mu, pf)
        write_json(args, obj)
        return
    if args.hist:
        lo, hi = mu.support
        edges = np.linspace(lo, hi, args.hist + 1)
        mass, _ = np.histogram(mu.atoms, bins=edges, weights=mu.weights)
        write_csv(args, ("bin_lo", "bin_hi", "mass"),
                  zip(edges[:-1], edges[1:], mass))
    else:
        write_csv(args, ("atom", "weight"), zip(mu.atoms, mu.weights))


def cmd_density(args):
    lift = _build(args)
    gamma = lift.meta.get("conjugacy")
    if gamma is None and lift.family == "rotation":
        from .maps import make_rotation
        gamma = make_rotation(0.0)  # a rotation conjugates to itself by the identity
    if gamma is None:
        raise CircleDisplaceError("density needs a map with exact conjugacy metadata "
                                  "(family 'conjugated')")
    profile = measures.density_profile(lift, gamma, grid_points=args.grid)
    write_csv(args, ("y", "density"), zip(profile.grid, profile.density))


def cmd_wass(args):
    d = measures.fortet_mourier(read_measure_csv(args.a), read_measure_csv(args.b))
    out, close = _open_out(getattr(args, "out", None))
    try:
        out.write((FMT % d) + "\n")
    finally:
        if close:
            out.close()


def cmd_birkhoff(args):
    intervals = []
    for part in args.set.split(","):
        lo, _, hi = part.partition(":")
        intervals.append((float(lo), float(hi)))
    freq = measures.birkhoff_frequency(_build(args), args.x0, args.n, intervals)
    write_json(args, {"frequency": freq, "n": args.n})


def cmd_stability(args):
    lift = _build(args)
    other = parse_map(args.map2).build()
    d, sup = measures.stability_check(lift, other, args.n, x0=args.x0)
    write_json(args, {"d_F": d, "sup_norm_delta": sup})


def cmd_ifm(args):
    model = parse_model(args.model)
    if args.grid:
        ts = np.linspace(0.0, 1.0, args.grid + 1)
        write_csv(args, ("t", "phi"), zip(ts, model.lift(ts)))
    else:
        s = firing_map(model, args.t)
        write_json(args, {"t": args.t, "firing_time": s, "isi_true": s - args.t})


def cmd_isi(args):
    model = parse_model(args.model)
    series = isi_sequence(model, args.x0, args.n)
    write_csv(args, ("n", "isi_mod1", "isi_true"),
              ((i + 1, series.values[i], series.true_steps[i])
               for i in range(len(series))))


# -- parser --------------------------------------------------------------------


def _add_common(sp, map_arg=True, x0=True, n=None):
    if map_arg:
        sp.add_argument("--map", required=True, help="map spec: compact, JSON, or @file")
    if x0:
        sp.add_argument("--x0", type=float, default=0.2)
    if n is not None:
        sp.add_argument("--n", type=int, default=n)
    sp.add_argument("--out", default=None, help="output path ('-' = stdout)")
    sp.add_argument("--rng-seed", type=int, default=0, dest="rng_seed")


def build_parser():
    ap = argparse.ArgumentParser(
        prog="circle-displace",
        description="Displacement-sequence computations for circle homeomorphisms")
    sub = ap.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("orbit", help="orbit CSV (n, frac, winding)")
    _add_common(sp, n=100)
    sp.add_argument("--backward", action="store_true")
    sp.set_defaults(func=cmd_orbit)

    sp = sub.add_parser("disp", help="displacement sequence CSV (n, eta)")
    _add_common(sp, n=100)
    sp.add_argument("--backward", action="store_true")
    sp.set_defaults(func=cmd_disp)

    sp = sub.add_parser("rotnum", help="rotation number estimate (JSON)")
    _add_common(sp, n=10 ** 5)
    sp.set_defaults(func=cmd_rotnum)

    for name, fn, extra in (("periodic", cmd_periodic, ()),
                            ("shred", cmd_shred, ("eps", "tau")),
                            ("universal-n", cmd_universal_n, ("eps_single",))):
        sp = sub.add_parser(name)
        _add_common(sp, n=10 ** 5)
        sp.add_argument("--q", type=int, default=None, help="override detected period")
        sp.add_argument("--p", type=int, default=0)
        if "eps" in extra:
            sp.add_argument("--eps", required=True, help="comma-separated eps values")
            sp.add_argument("--tau-out", default=None, dest="tau_out",
                            help="also write (eps, z, tau_plus, tau_minus) plot data")
            sp.add_argument("--tau-points", type=int, default=256, dest="tau_points")
        if "eps_single" in extra:
            sp.add_argument("--eps", type=float, required=True)
        sp.set_defaults(func=fn)

    sp = sub.add_parser("conc", help="concentration interval (JSON)")
    _add_common(sp, x0=False)
    sp.set_defaults(func=cmd_conc)

    sp = sub.add_parser("conj", help="empirical conjugacy CSV (x, gamma_hat)")
    _add_common(sp, n=10 ** 5)
    sp.add_argument("--grid", type=int, default=512)
    sp.set_defaults(func=cmd_conj)

    sp = sub.add_parser("pushforward", help="pushforward measure CSV (atom, weight)")
    _add_common(sp, n=10 ** 5)
    sp.add_argument("--grid", type=int, default=2 ** 16)
    sp.set_defaults(func=cmd_pushforward)

    sp = sub.add_parser("sample", help="sampled displacement distribution CSV")
    _add_common(sp, n=10 ** 5)
    sp.add_argument("--hist", type=int, default=0, help="emit a histogram with this many bins")
    sp.add_argument("--summary", action="store_true",
                    help="emit a JSON summary (mean, support, d_F diagnostics)")
    sp.set_defaults(func=cmd_sample)

    sp = sub.add_parser("density", help="density profile CSV (y, density)")
    _add_common(sp, x0=False)
    sp.add_argument("--grid", type=int, default=4097)
    sp.set_defaults(func=cmd_density)

    sp = sub.add_parser("wass", help="Fortet-Mourier distance between two measure CSVs")
    sp.add_argument("--a", required=True)
    sp.add_argument("--b", required=True)
    sp.add_argument("--out", default=None)
    sp.add_argument("--rng-seed", type=int, default=0, dest="rng_seed")
    sp.set_defaults(func=cmd_wass)

    sp = sub.add_parser("birkhoff", help="displacement frequency in a set (JSON)")
    _add_common(sp, n=10 ** 5)
    sp.add_argument("--set", required=True, help="intervals lo:hi[,lo:hi...]")
    sp.set_defaults(func=cmd_birkhoff)

    sp = sub.add_parser("stability", help="d_F between displacement distributions (JSON)")
    _add_common(sp, n=10 ** 5)
    sp.add_argument("--map2", required=True)
    sp.set_defaults(func=cmd_stability)

    sp = sub.add_parser("ifm", help="evaluate a firing map (JSON or grid CSV)")
    sp.add_argument("--model", required=True, help="firing model JSON or @file")
    sp.add_argument("--t", type=float, default=0.0)
    sp.add_argument("--grid", type=int, default=0)
    sp.add_argument("--out", default=None)
    sp.add_argument("--rng-seed", type=int, default=0, dest="rng_seed")
    sp.set_defaults(func=cmd_ifm)

    sp = sub.add_parser("isi", help="interspike intervals CSV (n, isi_mod1, isi_true)")
    sp.add_argument("--model", required=True)
    sp.add_argument("--x0", type=float, default=0.0)
    sp.add_argument("--n", type=int, default=100)
    sp.add_argument("--out", default=None)
    sp.add_argument("--rng-seed", type=int, default=0, dest="rng_seed")
    sp.set_defaults(func=cmd_isi)

    return ap


def main(argv=None):
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as e:
        return e.code
    try:
        args.func(args)
    except CircleDisplaceError as e:
        sys.stderr.write(json.dumps({"error": e.code, "message": str(e)}) + "\n")
        return 1
    except (ValueError, OSError, KeyError, IndexError) as e:
        sys.stderr.write(json.dumps({"error": "usage", "message": str(e)}) + "\n")
        return 2
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
