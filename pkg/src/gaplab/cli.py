"""
``gaplab`` command line: batch experiments writing CSV/JSON artifacts and a
run manifest.

Exit codes: 0 success, 2 validation error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import hashlib
import platform
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import __version__
from . import io as gio
from .determinacy import (DEFAULT_RIDGE, DeterminacyThresholds, determinacy_verdict,
                          riesz_log_integral)
from .errors import BracketError, GaplabError, PreconditionError
from .fourier import gap_residual, highpass_residual_bound, make_highpass_lattice
from .gapsolver import (GapProblem, alternating_density, estimate_gap_characteristic,
                        lattice_sites, min_gap_residual)
from .krein import (ZeroSetFunction, double_zero_probe, double_zero_replacement,
                    oscillation_rate_check, partial_fraction_check, residue_measure)
from .measures import DiscreteMeasure, RealSequence, jordan_decompose
from .sequences import (ShortPartition, UniformityThresholds, cluster_sequence,
                        midpoint_double, uniformity_report)

EXIT_OK, EXIT_VALIDATION, EXIT_NUMERICAL = 0, 2, 3


class ValidationError(Exception):
    """Bad user input; reported with exit status 2 before anything is written."""


class NumericalFailure(Exception):
    """Computation finished without a trustworthy result; diagnostics are still written."""


def _floats(text):
    try:
        return [float(v) for v in str(text).split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def _ints(text):
    try:
        return [int(v) for v in str(text).split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def _positive(name, value):
    if not value > 0:
        raise ValidationError(f"{name} must be positive, got {value}")


# --- site-set and input parsing --------------------------------------------

def _site_spec(spec: str, window: float) -> np.ndarray:
    path = Path(spec)
    if path.is_file():
        return gio.read_sequence(path).points
    try:
        return lattice_sites(spec, window)
    except ValueError as exc:
        raise ValidationError(f"site set {spec!r}: {exc}")


def _read_file(kind, path):
    if not Path(path).is_file():
        raise ValidationError(f"{kind} file not found: {path}")
    try:
        return gio.read_measure(path) if kind == "measure" else gio.read_sequence(path)
    except ValueError as exc:
        raise ValidationError(f"{kind} file {path}: {exc}")


# --- experiments -----------------------------------------------------------
# each returns (outputs, failure) where outputs maps file name -> (kind, payload)

def run_highpass(args):
    _positive("spacing", args.spacing)
    _positive("gap", args.gap)
    if args.atoms < 1 or args.atoms % 2 == 0:
        raise ValidationError(f"atoms must be a positive odd integer, got {args.atoms}")
    if not 0 < args.fill < 1:
        raise ValidationError(f"fill must lie in (0, 1), got {args.fill}")
    from .fourier import PeriodicProfile
    period = 2 * np.pi / args.spacing
    if args.gap >= np.pi / args.spacing:
        raise ValidationError(f"gap {args.gap} must be below pi/spacing = {np.pi / args.spacing}")
    profile = PeriodicProfile.centered_bump(period, args.gap, args.fill)
    sigma = make_highpass_lattice(args.spacing, args.gap, args.atoms, profile)
    N = (args.atoms - 1) // 2
    radii = args.radii or list(np.round(np.linspace(0.2, 0.8, 7) * N * args.spacing, 9))
    res = gap_residual(sigma, args.gap)
    residual = {"gap": args.gap, "residual": res.value, "quad_nodes": res.quad_nodes.size,
                "truncation_bound": highpass_residual_bound(args.spacing, args.gap, args.atoms, profile),
                "n_atoms": len(sigma), "fill": args.fill}
    outputs = {"measure.txt": ("measure", sigma), "residual.json": ("json", residual)}
    failure = None
    try:
        rep = oscillation_rate_check(sigma, args.gap, radii, slack=args.slack, tol=args.tol)
        outputs["sign_changes.json"] = ("json", rep.to_dict())
        if not rep.passed:
            failure = f"sign-change rate {rep.observed:.4f} below bound {rep.bound:.4f}"
    except PreconditionError as exc:
        outputs["sign_changes.json"] = ("json", {"error": str(exc)})
        failure = str(exc)
    return outputs, failure


def run_gap_sweep(args):
    _positive("window", args.window)
    if not 0 < args.a_min < args.a_max:
        raise ValidationError(f"need 0 < a-min < a-max, got {args.a_min}, {args.a_max}")
    if args.points < 2:
        raise ValidationError("points must be at least 2")
    A = _site_spec(args.A, args.window)
    B = _site_spec(args.B, args.window)
    if A.size + B.size == 0:
        raise ValidationError("both site sets are empty")
    if np.intersect1d(A, B).size:
        raise ValidationError("site sets A and B overlap")
    settings = dict(restarts=args.restarts, seed=args.seed, max_iter=args.max_iter)
    radii = np.linspace(args.a_min, args.a_max, args.points)
    base = GapProblem(A, B, float(radii[0]), **settings)

    def probe(a):
        return min_gap_residual(base.with_radius(float(a)))

    with ThreadPoolExecutor(max_workers=max(1, args.threads)) as pool:
        sols = list(pool.map(probe, radii))
    rows = [(float(a), s.residual.value, s.converged, args.restarts) for a, s in zip(radii, sols)]
    outputs = {"sweep.csv": ("csv", (["a", "residual", "converged", "restarts"], rows))}
    density = alternating_density(A, B)
    bracket = {"window": args.window, "A": args.A, "B": args.B, "threshold": args.threshold,
               "alternating_density": density, "prediction": np.pi * density}
    failure = None
    try:
        br = estimate_gap_characteristic(A, B, args.a_min, args.a_max, args.threshold,
                                         rtol=args.bracket_rtol, **settings)
        bracket.update(br.to_dict())
        unconverged = [p for p in br.probes if not p[2]]
        if unconverged:
            bracket["unconverged_probes"] = unconverged
    except BracketError as exc:
        bracket["error"] = str(exc)
        failure = str(exc)
    outputs["bracket.json"] = ("json", bracket)
    return outputs, failure


def _determinacy_measure(args):
    if args.measure:
        mu = _read_file("measure", args.measure)
        if not mu.is_positive:
            mu = jordan_decompose(mu)[0]
        return mu
    if args.preset == "highpass":
        return jordan_decompose(make_highpass_lattice(1.0, np.pi / 2, 1001))[0]
    t = np.round(np.arange(-2000, 2001) * 0.01, 12)
    return DiscreteMeasure(t, np.exp(-t ** 2), label="gaussian grid")


def run_determinacy(args):
    _positive("a", args.a)
    if args.measure is None and args.preset is None:
        raise ValidationError("give --measure FILE or --preset {highpass,gaussian}")
    if any(w <= 0 for w in args.windows) or list(args.windows) != sorted(set(args.windows)):
        raise ValidationError("windows must be positive and strictly increasing")
    if any(g < 1 for g in args.grids):
        raise ValidationError("grid sizes must be positive")
    if args.ridge < 0:
        raise ValidationError("ridge must be nonnegative")
    mu = _determinacy_measure(args)
    table = riesz_log_integral(mu, args.a, args.windows, args.grids, ridge=args.ridge)
    verdict = determinacy_verdict(table, DeterminacyThresholds())
    header = ["window"] + [f"grid_{g}" for g in table.grids]
    return {"growth.csv": ("csv", (header, table.to_rows())),
            "verdict.json": ("json", {"a": args.a, **verdict.to_dict()})}, None


def _uniformity_sequence(args):
    if args.sequence:
        return _read_file("sequence", args.sequence)
    W = args.window
    if args.preset == "cluster":
        part = ShortPartition.generate(-W - 1, W + 1, args.gamma)
        return cluster_sequence(part, args.d, window=W)
    base = RealSequence.lattice(-W, W, 1.0)
    if args.preset == "evens":
        return RealSequence.lattice(-W, W, 2.0)
    if args.preset == "midpoint-evens":
        return midpoint_double(RealSequence.lattice(-W, W, 2.0))
    return base


def run_uniformity(args):
    _positive("d", args.d)
    _positive("window", args.window)
    _positive("gamma", args.gamma)
    if args.sequence is None and args.preset is None:
        raise ValidationError("give --sequence FILE or --preset")
    seq = _uniformity_sequence(args)
    if len(seq) < 2:
        raise ValidationError("sequence needs at least two points")
    lo, hi = min(seq.points[0], -1.0), max(seq.points[-1], 1.0) + 1.0
    part = ShortPartition.generate(lo, hi, args.gamma)
    rep = uniformity_report(seq, args.d, part, UniformityThresholds())
    return {"uniformity.json": ("json", {"n_points": len(seq), "gamma": args.gamma,
                                         **rep.to_dict()})}, None


def run_krein_check(args):
    if args.samples < 1:
        raise ValidationError("samples must be positive")
    rng = np.random.default_rng(args.seed)
    if args.zeros:
        seq = _read_file("sequence", args.zeros)
        if len(seq) == 0:
            raise ValidationError("zero file is empty")
        F = ZeroSetFunction.from_roots(seq.points)
        F_eval, repl = F, seq.points
    else:
        if args.sine < 1:
            raise ValidationError("sine truncation must be positive")
        F = ZeroSetFunction.sine(args.sine)
        F_eval = np.sinc
        n = np.arange(-args.sine, args.sine + 1)
        repl = n[n != 0].astype(float)
    z = rng.normal(scale=2.0, size=args.samples) + 1j * rng.uniform(0.5, 2.0, size=args.samples)
    dev = partial_fraction_check(F, z)
    _, summ = residue_measure(F)
    scan = np.linspace(args.scan_lo, args.scan_hi, args.scan_points) + args.scan_offset
    dz = double_zero_replacement(F_eval, repl, scan)
    probes = [double_zero_probe(F_eval, repl, float(dz.midpoints[0]), e) for e in (1e-2, 1e-3, 1e-4)] \
        if dz.midpoints.size else []
    report = {"partial_fraction_deviation": dev, "samples": args.samples,
              "summability": summ.to_dict(), "double_zero_sup": dz.sup,
              "midpoint_probe": {"gamma": float(dz.midpoints[0]) if dz.midpoints.size else None,
                                 "eps": [1e-2, 1e-3, 1e-4], "ratios": probes},
              "dropped_zeros": dz.dropped}
    return {"krein.json": ("json", report),
            "double_zero_scan.csv": ("csv", (["x", "log_abs_G", "sign"], dz.to_rows().tolist()))}, None


# --- parser and driver -----------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="gaplab", description=__doc__.strip().splitlines()[0])
    p.add_argument("--out", default="gaplab-out", help="output directory")
    p.add_argument("--seed", type=int, default=42, help="seed for solver restarts and random samples")
    p.add_argument("--threads", type=int, default=1, help="worker threads for independent sweep points")
    p.add_argument("--config", help="key=value file; command-line flags override it")
    sub = p.add_subparsers(dest="command", required=True)

    h = sub.add_parser("highpass", help="synthesize a lattice measure with a spectral gap")
    h.add_argument("--spacing", type=float, default=1.0, help="lattice spacing")
    h.add_argument("--gap", type=float, default=np.pi / 2, help="target gap radius")
    h.add_argument("--atoms", type=int, default=201, help="odd number of lattice atoms")
    h.add_argument("--fill", type=float, default=0.95, help="fraction of the admissible profile support used")
    h.add_argument("--radii", type=_floats, default=None, help="comma-separated radii for the sign-change count")
    h.add_argument("--slack", type=float, default=0.05, help="relative slack on the oscillation rate bound")
    h.add_argument("--tol", type=float, default=1e-8, help="gap residual required before counting sign changes")
    h.set_defaults(func=run_highpass)

    g = sub.add_parser("gap-sweep", help="residual sweep and transition bracket for a site pair")
    g.add_argument("--A", required=True, help="lattice rule (evens, odds, integers, 3k, 3k+1) or sequence file")
    g.add_argument("--B", required=True, help="negative-part sites, same forms as --A")
    g.add_argument("--window", type=float, default=64, help="half-width of the lattice window")
    g.add_argument("--a-min", type=float, default=0.5, help="smallest radius (radians)")
    g.add_argument("--a-max", type=float, default=4.0, help="largest radius (radians)")
    g.add_argument("--points", type=int, default=8, help="number of sweep radii")
    g.add_argument("--threshold", type=float, default=1e-3, help="residual separating feasible from infeasible")
    g.add_argument("--bracket-rtol", type=float, default=0.02, help="relative bracket width at which bisection stops")
    g.add_argument("--restarts", type=int, default=20, help="random restarts per radius")
    g.add_argument("--max-iter", type=int, default=20000, help="iteration cap per restart")
    g.set_defaults(func=run_gap_sweep)

    d = sub.add_parser("determinacy", help="majorant log-integral growth and verdict")
    d.add_argument("--measure", help="positive measure file")
    d.add_argument("--preset", choices=["highpass", "gaussian"], help="built-in reference measure")
    d.add_argument("--a", type=float, default=np.pi / 2, help="radius of the frequency window")
    d.add_argument("--windows", type=_floats, default=[8, 16, 32, 64], help="comma-separated log-integral windows")
    d.add_argument("--grids", type=_ints, default=[65, 129], help="comma-separated frequency grid sizes")
    d.add_argument("--ridge", type=float, default=DEFAULT_RIDGE, help="ridge relative to the total mass")
    d.set_defaults(func=run_determinacy)

    u = sub.add_parser("uniformity", help="regularity and energy report for a sequence")
    u.add_argument("--sequence", help="sequence file")
    u.add_argument("--preset", choices=["integers", "evens", "midpoint-evens", "cluster"], help="built-in sequence")
    u.add_argument("--d", type=float, default=1.0, help="density to test against")
    u.add_argument("--window", type=float, default=256, help="half-width of preset sequences")
    u.add_argument("--gamma", type=float, default=0.4, help="cell growth exponent of the generated partition")
    u.set_defaults(func=run_uniformity)

    k = sub.add_parser("krein-check", help="partial fractions, residues and double-zero replacement")
    k.add_argument("--zeros", help="sequence file of polynomial roots")
    k.add_argument("--sine", type=int, default=200, help="truncation of the sine zero set")
    k.add_argument("--samples", type=int, default=50, help="complex sample points for the identity check")
    k.add_argument("--scan-lo", type=float, default=-50.0, help="left end of the replacement scan")
    k.add_argument("--scan-hi", type=float, default=50.0, help="right end of the replacement scan")
    k.add_argument("--scan-points", type=int, default=2001, help="scan resolution")
    k.add_argument("--scan-offset", type=float, default=1e-3 * np.pi, help="shift keeping scan points off the zeros")
    k.set_defaults(func=run_krein_check)
    return p


def read_config(path) -> dict:
    if not Path(path).is_file():
        raise ValidationError(f"config file not found: {path}")
    cfg = {}
    for ln, raw in enumerate(Path(path).read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        if not sep or not key.strip():
            raise ValidationError(f"config line {ln}: expected key=value, got {raw!r}")
        cfg[key.strip().replace("-", "_")] = value.strip()
    return cfg


def _apply_config(parser, argv, cfg):
    """Reparse with config values as defaults so explicit flags win."""
    sub_action = next(a for a in parser._actions if isinstance(a, argparse._SubParsersAction))
    ns = parser.parse_args(argv)
    sp = sub_action.choices[ns.command]
    known = {a.dest: a for a in list(sp._actions) + list(parser._actions)}
    defaults = {}
    for key, value in cfg.items():
        act = known.get(key)
        if act is None or key in ("help", "config", "command", "func"):
            raise ValidationError(f"config key {key!r} is not a parameter of {ns.command}")
        try:
            conv = act.type(value) if act.type else value
        except (argparse.ArgumentTypeError, ValueError) as exc:
            raise ValidationError(f"config key {key!r}: {exc}")
        if act.choices is not None and conv not in act.choices:
            raise ValidationError(f"config key {key!r}: {conv!r} not in {list(act.choices)}")
        defaults[key] = conv
    glob = {k: v for k, v in defaults.items() if k in {a.dest for a in parser._actions}}
    parser.set_defaults(**glob)
    sp.set_defaults(**{k: v for k, v in defaults.items() if k not in glob})
    return parser.parse_args(argv)


def _parameters(ns) -> dict:
    return {k: v for k, v in sorted(vars(ns).items()) if k not in ("func", "out", "config", "threads")}


def _render(name, kind, payload, chash):
    stamp = f"config_hash: {chash}"
    if kind == "json":
        return gio.format_json({"config_hash": chash, **payload})
    if kind == "csv":
        header, rows = payload
        return gio.format_csv(header, rows, [stamp])
    if kind == "measure":
        return gio.format_measure(payload, [stamp])
    raise ValueError(kind)


def _versions():
    import scipy
    return {"gaplab": __version__, "numpy": np.__version__, "scipy": scipy.__version__,
            "python": platform.python_version()}


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    t0 = time.perf_counter()
    try:
        try:
            ns = parser.parse_args(argv)
        except SystemExit as exc:
            return EXIT_OK if exc.code == 0 else EXIT_VALIDATION
        if ns.config:
            try:
                ns = _apply_config(parser, argv, read_config(ns.config))
            except SystemExit as exc:
                return EXIT_VALIDATION
        if ns.threads < 1:
            raise ValidationError("threads must be at least 1")
        params = _parameters(ns)
        chash = gio.config_hash(params)
        try:
            outputs, failure = ns.func(ns)
        except (GaplabError, ValueError) as exc:
            if isinstance(exc, (BracketError, PreconditionError)):
                raise NumericalFailure(str(exc))
            raise ValidationError(str(exc))
    except ValidationError as exc:
        print(f"gaplab: validation error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except NumericalFailure as exc:
        print(f"gaplab: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL

    out = Path(ns.out)
    out.mkdir(parents=True, exist_ok=True)
    files = {}
    for name, (kind, payload) in sorted(outputs.items()):
        text = _render(name, kind, payload, chash)
        (out / name).write_text(text)
        files[name] = hashlib.sha256(text.encode()).hexdigest()
    manifest = {"command": ns.command, "config_hash": chash, "parameters": params,
                "inputs": {k: params[k] for k in ("measure", "sequence", "zeros") if params.get(k)},
                "seed": ns.seed, "versions": _versions(), "files": files,
                "status": "numerical-failure" if failure else "ok",
                "wall_time_s": round(time.perf_counter() - t0, 3),
                "timestamp": datetime.now(timezone.utc).isoformat(timespec="seconds")}
    if failure:
        manifest["failure"] = failure
    (out / "manifest.json").write_text(gio.format_json(manifest))
    if failure:
        print(f"gaplab: numerical failure: {failure} (diagnostics in {out})", file=sys.stderr)
        return EXIT_NUMERICAL
    print(f"gaplab: wrote {', '.join(sorted(files))} to {out}")
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
