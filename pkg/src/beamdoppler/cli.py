"""Command-line front end.

Angles are degrees, speeds km/h and frequencies Hz on the command line;
everything is converted to radians, m/s and Hz before use. Every run writes
its output plus a manifest (``<output>.manifest.json``, or stderr when the
output goes to stdout) from which ``beamdoppler replay`` reproduces it.

Exit codes: 0 success, 2 usage or configuration error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
import warnings
from datetime import datetime, timezone
from importlib import resources

import numpy as np

from . import __version__, _kernels
from .approx import approx_shift_spread
from .core import BeamGeometry, MotionState, doppler_support
from .fading import estimate_psd, generate_fading
from .oracle import analytic_histogram, empirical_pdf, l1_distance, sample_doppler
from .spectrum import (
    Cluster,
    ClusterSet,
    GainPattern,
    IntegrationError,
    Mode,
    doppler_psd,
    integrate_psd,
    multicluster_breakpoints,
    multicluster_psd,
    pdf_breakpoints,
    tabulate,
)
from .train import ConfigError, ScenarioConfig, BeamPolicy, simulate

JSON_SCHEMA = "beamdoppler-output/1"
MANIFEST_SCHEMA = "beamdoppler-manifest/1"
EXIT_USAGE = 2
EXIT_NUMERICAL = 3


class UsageError(Exception):
    pass


def _fmt(value) -> str:
    return repr(float(value))


def _csv(header, rows, comment: str | None = None) -> str:
    buf = io.StringIO()
    if comment:
        buf.write(f"# {comment}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_fmt(v) if isinstance(v, (float, np.floating)) else v for v in row])
    return buf.getvalue()


def _json(meta: dict, **arrays) -> str:
    doc = {"schema": JSON_SCHEMA, "meta": meta}
    for key, values in arrays.items():
        doc[key] = [float(v) for v in values]
    return json.dumps(doc, indent=1) + "\n"


def _geometry(args) -> BeamGeometry:
    if not 0 < args.theta_rx <= 360:
        raise UsageError("--theta-rx must lie in (0, 360] degrees")
    theta_tx = args.theta_tx if args.theta_tx is not None else args.theta_rx
    return BeamGeometry.from_degrees(args.theta_v, args.theta_rx, theta_tx)


def _motion(args) -> MotionState:
    if args.speed < 0:
        raise UsageError("--speed must be >= 0 km/h")
    if args.carrier <= 0:
        raise UsageError("--carrier must be > 0 Hz")
    return MotionState.from_kmh(args.speed, args.carrier)


def _gain(args) -> GainPattern:
    if args.gain == "flat":
        if args.hpbw is not None:
            raise UsageError("--hpbw only applies to --gain parametric")
        return GainPattern.flat(args.gain_peak)
    hpbw = math.radians(args.hpbw) if args.hpbw is not None else None
    return GainPattern.parametric(hpbw, args.gain_peak)


def _link_params(args) -> dict:
    geom, motion = _geometry(args), _motion(args)
    return {
        "theta_v_rad": geom.theta_v,
        "theta_rx_rad": geom.theta_rx,
        "theta_tx_rad": geom.theta_tx,
        "speed_mps": motion.speed,
        "carrier_hz": motion.carrier,
        "f_dmax_hz": motion.f_dmax,
    }


def parse_clusters(spec: str) -> ClusterSet:
    """``"center,width[,power];..."`` in degrees."""
    clusters = []
    for item in spec.split(";"):
        item = item.strip()
        if not item:
            continue
        parts = item.split(",")
        if len(parts) not in (2, 3):
            raise UsageError(f"bad cluster {item!r}: expected center,width[,power]")
        try:
            values = [float(p) for p in parts]
        except ValueError:
            raise UsageError(f"bad cluster {item!r}: not numeric") from None
        power = values[2] if len(values) == 3 else 1.0
        try:
            clusters.append(Cluster(math.radians(values[0]), math.radians(values[1]), power))
        except ValueError as exc:
            raise UsageError(f"bad cluster {item!r}: {exc}") from None
    if not clusters:
        raise UsageError("--clusters given but empty")
    return ClusterSet(clusters)


def cmd_spectrum(args):
    geom, motion, gain = _geometry(args), _motion(args), _gain(args)
    f_dmax = motion.f_dmax
    if f_dmax <= 0:
        raise UsageError("spectrum needs a moving receiver (--speed > 0)")
    if args.grid_points < 2:
        raise UsageError("--grid-points must be >= 2")
    mode = Mode(args.mode)
    if args.clusters:
        if mode is not Mode.EXACT:
            raise UsageError("--clusters is only defined for --mode exact")
        clusters = parse_clusters(args.clusters)
        func = lambda f: multicluster_psd(f, clusters, geom, motion, gain)
        points = multicluster_breakpoints(clusters, geom, motion)
        lo, hi = -f_dmax, f_dmax
    else:
        func = lambda f: doppler_psd(f, geom, motion, gain, mode)
        points = pdf_breakpoints(geom, motion)
        support = doppler_support(geom, motion)
        lo, hi = (support.f_lo, support.f_hi) if args.span == "support" else (-f_dmax, f_dmax)
    if hi <= lo:
        raise UsageError("empty frequency span")
    # cell-centred grid: never lands on the +/- f_dmax singularities
    step = (hi - lo) / args.grid_points
    freqs = lo + (np.arange(args.grid_points) + 0.5) * step
    total = integrate_psd(func, -f_dmax, f_dmax, f_dmax, points)
    samples = tabulate(lambda f: np.minimum(func(f), args.endpoint_cap), freqs, f_dmax, mode.value, total)
    meta = {
        "f_dmax_hz": f_dmax,
        "mode": mode.value,
        "gain": args.gain,
        "total_power": total,
        "clusters": args.clusters,
    }
    if not args.clusters:
        meta.update(region=support.region.name, f_lo_hz=support.f_lo, f_hi_hz=support.f_hi,
                    shift_hz=support.shift, spread_hz=support.spread)
    if args.format == "json":
        text = _json(meta, freqs=samples.freqs, psd=samples.values)
    else:
        text = _csv(("freq_hz", "psd"), zip(samples.freqs, samples.values), "schema: beamdoppler-spectrum/1")
    params = _link_params(args) | {"mode": mode.value, "grid_points": args.grid_points, "span": args.span}
    return text, params, None


def cmd_approx(args):
    motion = _motion(args)
    rows = []
    for theta_v in args.theta_v:
        geom = BeamGeometry.from_degrees(theta_v, args.theta_rx)
        est = approx_shift_spread(geom.theta_v, geom.theta_rx, motion.f_dmax)
        exact = doppler_support(geom, motion)
        rows.append((float(theta_v), est.region.name, est.shift, est.spread, exact.shift, exact.spread))
    header = ("theta_v_deg", "region", "shift_hz", "spread_hz", "exact_shift_hz", "exact_spread_hz")
    if args.format == "json":
        doc = {"schema": JSON_SCHEMA, "meta": {"f_dmax_hz": motion.f_dmax, "theta_rx_deg": args.theta_rx},
               "rows": [dict(zip(header, r)) for r in rows]}
        text = json.dumps(doc, indent=1) + "\n"
    else:
        text = _csv(header, rows, "schema: beamdoppler-approx/1")
    params = {"theta_v_rad": [math.radians(v) for v in args.theta_v], "theta_rx_rad": math.radians(args.theta_rx),
              "speed_mps": motion.speed, "carrier_hz": motion.carrier, "f_dmax_hz": motion.f_dmax}
    return text, params, None


def cmd_oracle(args):
    geom, motion, gain = _geometry(args), _motion(args), _gain(args)
    if args.samples < 1:
        raise UsageError("--samples must be >= 1")
    if args.bins < 2:
        raise UsageError("--bins must be >= 2")
    samples = sample_doppler(geom, motion, gain, args.samples, args.seed, args.workers)
    hist = empirical_pdf(samples, args.bins)
    meta = {"f_dmax_hz": motion.f_dmax, "samples": args.samples, "bins": args.bins, "seed": args.seed,
            "dropped": hist.dropped}
    columns = [hist.edges[:-1], hist.edges[1:], hist.densities]
    header = ["bin_lo_hz", "bin_hi_hz", "density"]
    if args.with_analytic:
        if motion.f_dmax <= 0:
            raise UsageError("--with-analytic needs --speed > 0")
        func = lambda f: doppler_psd(f, geom, motion, gain, Mode(args.mode))
        points = pdf_breakpoints(geom, motion)
        mass = integrate_psd(func, -motion.f_dmax, motion.f_dmax, motion.f_dmax, points)
        normalized = lambda f: func(f) / mass
        reference = analytic_histogram(normalized, hist.edges, motion.f_dmax, points)
        columns.append(reference.densities)
        header.append("analytic_density")
        meta["l1_distance"] = l1_distance(hist, normalized, motion.f_dmax, points)
        meta["mode"] = args.mode
    if args.format == "json":
        doc = {"schema": JSON_SCHEMA, "meta": meta, "bin_lo": [float(v) for v in columns[0]],
               "bin_hi": [float(v) for v in columns[1]], "density": [float(v) for v in columns[2]]}
        if args.with_analytic:
            doc["analytic_density"] = [float(v) for v in columns[3]]
        text = json.dumps(doc, indent=1) + "\n"
    else:
        text = _csv(header, zip(*columns), "schema: beamdoppler-histogram/1")
    params = _link_params(args) | {"samples": args.samples, "bins": args.bins}
    if "l1_distance" in meta:
        params["l1_distance"] = meta["l1_distance"]
    return text, params, [args.seed]


def cmd_fade(args):
    geom, motion, gain = _geometry(args), _motion(args), _gain(args)
    real = generate_fading(geom, motion, gain, args.paths, args.duration, args.sample_rate, args.seed)
    if args.psd:
        psd = estimate_psd(real, args.segment_len, args.overlap)
        text = _csv(("freq_hz", "density"), zip(psd.freqs, psd.values), "schema: beamdoppler-psd/1")
    else:
        t = real.times
        text = _csv(("t_s", "re", "im"), zip(t, real.samples.real, real.samples.imag), "schema: beamdoppler-fading/1")
    params = _link_params(args) | {"paths": args.paths, "duration_s": args.duration,
                                   "sample_rate_hz": real.sample_rate}
    return text, params, [args.seed]


def _load_config(path: str) -> ScenarioConfig:
    if path == "builtin:demo":
        data = json.loads(resources.files("beamdoppler").joinpath("data/demo.json").read_text())
        return ScenarioConfig.from_dict(data)
    try:
        return ScenarioConfig.load(path)
    except FileNotFoundError:
        raise UsageError(f"config file not found: {path}") from None


def cmd_train(args):
    config = _load_config(args.config)
    if args.mode:
        config.mode = args.mode
    if args.fixed_beam is not None:
        config.policy = BeamPolicy.fixed(args.fixed_beam)
    trace = simulate(config)
    params = config.to_dict() | {"handovers": trace.handover_count}
    return trace.to_csv(), params, None


def _common(parser, rng=False):
    parser.add_argument("--output", "-o", default="-", help="output path ('-' for stdout)")
    if rng:
        parser.add_argument("--seed", type=int, required=True)


def _link(parser, theta_v_multi=False):
    parser.add_argument("--carrier", type=float, default=28e9, help="carrier frequency [Hz]")
    parser.add_argument("--speed", type=float, required=True, help="receiver speed [km/h]")
    if theta_v_multi:
        parser.add_argument("--theta-v", type=float, nargs="+", required=True, help="velocity angle(s) [deg]")
    else:
        parser.add_argument("--theta-v", type=float, required=True, help="velocity angle [deg]")
    parser.add_argument("--theta-rx", type=float, required=True, help="receive HPBW [deg]")


def _gain_flags(parser):
    parser.add_argument("--theta-tx", type=float, default=None, help="transmit HPBW [deg]")
    parser.add_argument("--gain", choices=("flat", "parametric"), default="flat")
    parser.add_argument("--hpbw", type=float, default=None, help="parametric gain HPBW [deg]; defaults to --theta-rx")
    parser.add_argument("--gain-peak", type=float, default=1.0)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="beamdoppler", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("spectrum", help="sampled Doppler power spectrum")
    _link(p)
    _gain_flags(p)
    p.add_argument("--mode", choices=[m.value for m in Mode], default="exact")
    p.add_argument("--grid-points", type=int, default=1001)
    p.add_argument("--span", choices=("full", "support"), default="full")
    p.add_argument("--clusters", default=None, help="'center,width[,power];...' in degrees")
    p.add_argument("--endpoint-cap", type=float, default=math.inf, help="cap applied to singular values")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    _common(p)
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("approx", help="small-beamwidth shift/spread")
    _link(p, theta_v_multi=True)
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    _common(p)
    p.set_defaults(func=cmd_approx)

    p = sub.add_parser("oracle", help="Monte Carlo Doppler histogram")
    _link(p)
    _gain_flags(p)
    p.add_argument("--samples", type=int, default=1_000_000)
    p.add_argument("--bins", type=int, default=200)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--with-analytic", action="store_true", help="add the closed-form bin means")
    p.add_argument("--mode", choices=[m.value for m in Mode], default="exact")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    _common(p, rng=True)
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("fade", help="sum-of-sinusoids fading realization")
    _link(p)
    _gain_flags(p)
    p.add_argument("--paths", type=int, default=256)
    p.add_argument("--duration", type=float, default=1.0, help="[s]")
    p.add_argument("--sample-rate", type=float, default=None, help="[Hz]; default 4 f_dmax")
    p.add_argument("--psd", action="store_true", help="emit the Welch PSD instead of the time series")
    p.add_argument("--segment-len", type=int, default=1024)
    p.add_argument("--overlap", type=float, default=0.5)
    _common(p, rng=True)
    p.set_defaults(func=cmd_fade)

    p = sub.add_parser("train", help="high-speed-train beamwidth scenario")
    p.add_argument("--config", required=True, help="scenario JSON ('builtin:demo' for the reference run)")
    p.add_argument("--mode", choices=("approx", "exact"), default=None)
    p.add_argument("--fixed-beam", type=float, default=None, help="constant RX beam width [deg] baseline")
    _common(p)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("replay", help="re-run the command recorded in a manifest")
    p.add_argument("manifest")
    p.add_argument("--output", "-o", default=None, help="override the recorded output path")
    p.set_defaults(func=None)
    return parser


def _manifest(args, params, seeds) -> dict:
    arguments = {k: v for k, v in vars(args).items() if k not in ("func",)}
    if isinstance(arguments.get("endpoint_cap"), float) and math.isinf(arguments["endpoint_cap"]):
        arguments["endpoint_cap"] = "inf"
    return {
        "schema": MANIFEST_SCHEMA,
        "subcommand": args.command,
        "parameters": params,
        "seeds": seeds,
        "arguments": arguments,
        "version": __version__,
        "kernel_backend": _kernels.BACKEND,
        "timestamp": datetime.now(timezone.utc).isoformat(),
    }


def _replay_args(parser, path, output):
    with open(path) as fh:
        manifest = json.load(fh)
    if manifest.get("schema") != MANIFEST_SCHEMA:
        raise UsageError(f"{path} is not a beamdoppler manifest")
    arguments = dict(manifest["arguments"])
    if arguments.get("endpoint_cap") == "inf":
        arguments["endpoint_cap"] = math.inf
    if output is not None:
        arguments["output"] = output
    sub = parser._subparsers._group_actions[0].choices[manifest["subcommand"]]
    args = sub.parse_args(_required_stub(arguments))
    for key, value in arguments.items():
        setattr(args, key, value)
    return args


def _required_stub(arguments):
    """Minimal argv satisfying a subparser's required flags; real values are set afterwards."""
    stub = []
    flags = {"speed": "--speed", "theta_rx": "--theta-rx", "seed": "--seed", "config": "--config"}
    for key, flag in flags.items():
        if key in arguments:
            stub += [flag, str(arguments[key])]
    if "theta_v" in arguments:
        value = arguments["theta_v"]
        stub += ["--theta-v"] + [str(v) for v in (value if isinstance(value, list) else [value])]
    return stub


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "replay":
            args = _replay_args(parser, args.manifest, args.output)
        with warnings.catch_warnings():
            warnings.simplefilter("default")
            text, params, seeds = args.func(args)
        manifest = json.dumps(_manifest(args, params, seeds), indent=1, default=str) + "\n"
        if args.output == "-":
            sys.stdout.write(text)
            sys.stderr.write(manifest)
        else:
            with open(args.output, "w", newline="") as fh:
                fh.write(text)
            with open(args.output + ".manifest.json", "w") as fh:
                fh.write(manifest)
    except (UsageError, ConfigError, ValueError) as exc:
        kind = "config error" if isinstance(exc, ConfigError) else "usage error"
        print(f"beamdoppler: {kind}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (IntegrationError, ArithmeticError, FloatingPointError) as exc:
        print(f"beamdoppler: numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    return 0


if __name__ == "__main__":
    sys.exit(main())
