"""Command-line pipeline: simulate -> filter -> features -> assess / classify.

Every output file gets a JSON sidecar (or report) carrying the full
configuration and seed, so any result can be regenerated from its own
metadata.  Exit codes: 0 success, 1 validation or tolerance failure,
2 I/O or parse failure.
"""

import argparse
import json
import math
import os
import sys
import time
from pathlib import Path

import numpy as np

from .core_signal import Signal
from .errors import DegenerateInputError, NumericalFailureError, SignalParseError
from .features import (
    DEFAULT_BAND_FRACTION,
    FEATURE_NAMES,
    BearingGeometry,
    FaultFrequencies,
    extract_feature_vector,
    fault_frequencies,
)
from .health_models import SomConfig
from .ingest import iterate_run_to_failure, read_ims_file
from .pipeline import (
    DEFAULT_ASSESS_SOM,
    assess_sequence,
    classify_dataset,
    filter_signal,
    gradient_check,
)
from .simulate import (
    FaultSimConfig,
    LabeledDataset,
    make_degradation_sequence,
    make_fault_taxonomy_dataset,
    simulate_bearing_fault,
)
from .sparse_filter import CsfConfig

OUTPUT_DIR_ENV = "SPARSEVIB_OUTPUT_DIR"

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_IO = 2


def _out_path(path_str):
    path = Path(path_str)
    if not path.is_absolute():
        base = os.environ.get(OUTPUT_DIR_ENV)
        if base:
            path = Path(base) / path
    path.parent.mkdir(parents=True, exist_ok=True)
    return path


def _write_signal_csv(path, samples):
    with open(path, "w") as fh:
        fh.write("sample\n")
        for v in samples:
            fh.write(f"{v:.17g}\n")


def _write_sidecar(path, payload):
    sidecar = Path(str(path) + ".json")
    with open(sidecar, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
    return sidecar


def _read_signal_csv(path, sample_rate_hz=None, column=0):
    """Single-channel signal from a delimited file; header row optional.

    Falls back to the sidecar JSON for the sample rate when not given.
    """
    path = Path(path)
    if sample_rate_hz is None:
        sidecar = Path(str(path) + ".json")
        if sidecar.exists():
            with open(sidecar) as fh:
                meta = json.load(fh)
            sample_rate_hz = meta.get("config", {}).get("sample_rate_hz")
    if sample_rate_hz is None:
        raise ValueError(
            f"{path.name}: sample rate unknown; pass --sample-rate or provide a sidecar"
        )
    values = []
    with open(path) as fh:
        for line_no, line in enumerate(fh, start=1):
            stripped = line.strip()
            if not stripped:
                continue
            token = stripped.split(",")[column].strip()
            try:
                values.append(float(token))
            except ValueError:
                if line_no == 1:  # header row
                    continue
                raise SignalParseError(
                    f"{path.name}: non-numeric content on line {line_no}", line=line_no
                ) from None
    if len(values) < 2:
        raise SignalParseError(f"{path.name}: fewer than 2 samples")
    return Signal(np.asarray(values), float(sample_rate_hz))


def _sim_config_from_args(args):
    components = tuple(c for c in (args.fault or "").split(",") if c)
    return FaultSimConfig(
        fault_components=components,
        outer_fault_hz=args.outer_hz,
        inner_fault_hz=args.inner_hz,
        roller_fault_hz=args.roller_hz,
        resonance_hz=args.resonance_hz,
        damping_rate=args.damping_rate,
        shaft_hz=args.shaft_hz,
        snr_db=math.inf if args.snr_db is None else args.snr_db,
        n_samples=args.n_samples,
        sample_rate_hz=args.sample_rate,
        period_jitter_fraction=args.jitter,
        seed=args.seed,
    )


def _sim_config_dict(config):
    payload = {
        "fault_components": list(config.fault_components),
        "outer_fault_hz": config.outer_fault_hz,
        "inner_fault_hz": config.inner_fault_hz,
        "roller_fault_hz": config.roller_fault_hz,
        "resonance_hz": config.resonance_hz,
        "damping_rate": config.damping_rate,
        "shaft_hz": config.shaft_hz,
        "snr_db": None if math.isinf(config.snr_db) else config.snr_db,
        "n_samples": config.n_samples,
        "sample_rate_hz": config.sample_rate_hz,
        "period_jitter_fraction": config.period_jitter_fraction,
        "seed": config.seed,
    }
    return payload


def _csf_config_from_args(args):
    return CsfConfig(
        filter_length=args.filter_length,
        epsilon=args.epsilon,
        max_iterations=args.max_iterations,
        gradient_tolerance=args.gradient_tolerance,
        init_scheme=args.init,
        seed=args.seed,
    )


def _csf_config_dict(config):
    return {
        "filter_length": config.filter_length,
        "epsilon": config.epsilon,
        "max_iterations": config.max_iterations,
        "gradient_tolerance": config.gradient_tolerance,
        "init_scheme": config.init_scheme,
        "seed": config.seed,
    }


def _fault_frequencies_from_args(args):
    explicit = [args.bpfo, args.bpfi, args.bsf]
    has_geometry = args.geometry is not None
    if has_geometry and any(v is not None for v in explicit):
        raise ValueError("give either --geometry with --shaft-hz, or explicit --bpfo/--bpfi/--bsf")
    if has_geometry:
        try:
            n, d, big_d, angle = (float(t) for t in args.geometry.split(","))
        except ValueError:
            raise ValueError("--geometry expects n,roller_diameter,pitch_diameter,contact_angle_rad")
        geometry = BearingGeometry(int(n), d, big_d, angle)
        return fault_frequencies(geometry, args.shaft_hz)
    if all(v is not None for v in explicit):
        return FaultFrequencies(bpfo_hz=args.bpfo, bpfi_hz=args.bpfi, bsf_hz=args.bsf)
    raise ValueError("fault frequencies required: --bpfo/--bpfi/--bsf or --geometry + --shaft-hz")


def _add_sim_flags(parser):
    parser.add_argument("--fault", default="", help="comma list from {outer,inner,roller}; empty = normal")
    parser.add_argument("--snr-db", type=float, default=-8.0, help="signal-to-noise ratio; omit noise with --noiseless")
    parser.add_argument("--noiseless", action="store_true")
    parser.add_argument("--n-samples", type=int, default=20480)
    parser.add_argument("--sample-rate", type=float, default=20000.0)
    parser.add_argument("--resonance-hz", type=float, default=3000.0)
    parser.add_argument("--damping-rate", type=float, default=800.0)
    parser.add_argument("--shaft-hz", type=float, default=33.3)
    parser.add_argument("--outer-hz", type=float, default=100.0)
    parser.add_argument("--inner-hz", type=float, default=160.0)
    parser.add_argument("--roller-hz", type=float, default=70.0)
    parser.add_argument("--jitter", type=float, default=0.01, help="period jitter fraction")


def _add_csf_flags(parser):
    parser.add_argument("--filter-length", type=int, default=100)
    parser.add_argument("--epsilon", type=float, default=1e-8)
    parser.add_argument("--max-iterations", type=int, default=500)
    parser.add_argument("--gradient-tolerance", type=float, default=1e-6)
    parser.add_argument("--init", choices=("center_spike", "seeded_random"), default="center_spike")


def _add_fault_freq_flags(parser):
    parser.add_argument("--bpfo", type=float, help="outer-race defect frequency, Hz")
    parser.add_argument("--bpfi", type=float, help="inner-race defect frequency, Hz")
    parser.add_argument("--bsf", type=float, help="roller defect frequency, Hz")
    parser.add_argument("--geometry", help="n,roller_diameter,pitch_diameter,contact_angle_rad")
    parser.add_argument("--band-fraction", type=float, default=DEFAULT_BAND_FRACTION)


def cmd_simulate(args):
    if args.noiseless:
        args.snr_db = None
    config = _sim_config_from_args(args)
    signal = simulate_bearing_fault(config)
    out = _out_path(args.output)
    _write_signal_csv(out, signal.samples)
    _write_sidecar(out, {
        "kind": "simulate",
        "config": _sim_config_dict(config),
        "seed": config.seed,
        "n_samples_written": len(signal),
    })
    print(f"wrote {out} ({len(signal)} samples) + sidecar")
    return EXIT_OK


def cmd_filter(args):
    signal = _read_signal_csv(args.input, args.sample_rate)
    config = _csf_config_from_args(args)
    t0 = time.perf_counter()
    result = filter_signal(signal, config, method=args.method)
    wall = time.perf_counter() - t0
    out = _out_path(args.output)
    _write_signal_csv(out, result.filtered)
    report = {
        "kind": "filter",
        "method": args.method,
        "config": _csf_config_dict(config),
        "seed": config.seed,
        "sample_rate_hz": signal.sample_rate_hz,
        "input_samples": len(signal),
        "output_samples": int(result.filtered.size),
        "w": result.w.tolist(),
        "cost_history": result.cost_history.tolist(),
        "converged": result.converged,
        "iterations": result.iterations,
        "wall_time_s": wall,
    }
    _write_sidecar(out, report)
    print(f"{args.method}: cost {report['cost_history'][0]:.4f} -> {report['cost_history'][-1]:.4f} "
          f"in {result.iterations} iterations ({wall:.2f} s), converged={result.converged}")
    print(f"wrote {out} + report sidecar")
    return EXIT_OK


def cmd_features(args):
    signal = _read_signal_csv(args.input, args.sample_rate)
    faults = _fault_frequencies_from_args(args)
    vector = extract_feature_vector(signal, faults, args.band_fraction)
    values = dict(zip(FEATURE_NAMES, vector.as_array().tolist()))
    payload = {
        "kind": "features",
        "fault_frequencies_hz": {
            "bpfo": faults.bpfo_hz, "bpfi": faults.bpfi_hz, "bsf": faults.bsf_hz,
        },
        "band_fraction": args.band_fraction,
        "features": values,
    }
    out = _out_path(args.output)
    if args.format == "json":
        with open(out, "w") as fh:
            json.dump(payload, fh, indent=2, sort_keys=True)
    else:
        with open(out, "w") as fh:
            fh.write(",".join(FEATURE_NAMES) + "\n")
            fh.write(",".join(f"{values[k]:.17g}" for k in FEATURE_NAMES) + "\n")
        _write_sidecar(out, payload)
    print(" ".join(f"{k}={values[k]:.4g}" for k in FEATURE_NAMES))
    print(f"wrote {out}")
    return EXIT_OK


def _som_config_from_args(args):
    if args.som_grid:
        try:
            rows, cols = (int(t) for t in args.som_grid.lower().split("x"))
        except ValueError:
            raise ValueError("--som-grid expects ROWSxCOLS, e.g. 4x4")
        return SomConfig(
            grid_rows=rows, grid_cols=cols, epochs=args.som_epochs, seed=args.seed
        )
    return SomConfig(
        grid_rows=DEFAULT_ASSESS_SOM.grid_rows,
        grid_cols=DEFAULT_ASSESS_SOM.grid_cols,
        epochs=args.som_epochs,
        seed=args.seed,
    )


def cmd_assess(args):
    faults = _fault_frequencies_from_args(args)
    if args.input_dir:
        if args.channel is None:
            raise ValueError("--channel is required with --input-dir")
        sequence = iterate_run_to_failure(
            args.input_dir, args.channel, args.sample_rate, expected_rows=None
        )
        signals = sequence.signals
        source = {"input_dir": str(args.input_dir), "channel": args.channel,
                  "parse_errors": sequence.errors}
    else:
        base = _sim_config_from_args(args)
        signals = make_degradation_sequence(args.n_files, args.onset, base)
        source = {"simulated_degradation": {"n_files": args.n_files, "onset": args.onset,
                                            "config": _sim_config_dict(base)}}
    if len(signals) < args.n_train + 1:
        raise ValueError(f"need at least {args.n_train + 1} snapshots, got {len(signals)}")

    csf_config = _csf_config_from_args(args)
    som_config = _som_config_from_args(args)
    report = assess_sequence(signals, faults, csf_config, som_config,
                             n_train=args.n_train, band_fraction=args.band_fraction)

    out = _out_path(args.output)
    with open(out, "w") as fh:
        fh.write("file_index,mqe_raw,mqe_filtered\n")
        for i, (mr, mf) in enumerate(zip(report.raw.mqe, report.filtered.mqe), start=1):
            fh.write(f"{i},{mr:.17g},{mf:.17g}\n")
    payload = {
        "kind": "assess",
        "source": source,
        "seed": args.seed,
        "n_train": report.n_train,
        "band_fraction": args.band_fraction,
        "fault_frequencies_hz": {"bpfo": faults.bpfo_hz, "bpfi": faults.bpfi_hz,
                                 "bsf": faults.bsf_hz},
        "csf_config": _csf_config_dict(csf_config),
        "som": {"grid_rows": som_config.grid_rows, "grid_cols": som_config.grid_cols,
                "epochs": som_config.epochs, "seed": som_config.seed},
        "raw": {"threshold": report.raw.threshold, "alarm_index": report.raw.alarm_index},
        "filtered": {"threshold": report.filtered.threshold,
                     "alarm_index": report.filtered.alarm_index},
    }
    _write_sidecar(out, payload)
    if args.save_models:
        prefix = _out_path(args.save_models)
        report.raw.model.save(f"{prefix}_raw.json")
        report.filtered.model.save(f"{prefix}_filtered.json")
    print(f"alarm (raw): {report.raw.alarm_index}  alarm (filtered): {report.filtered.alarm_index}")
    print(f"wrote {out} + report sidecar")
    return EXIT_OK


def _read_manifest(path, sample_rate):
    signals, labels = [], []
    with open(path) as fh:
        for line_no, line in enumerate(fh, start=1):
            stripped = line.strip()
            if not stripped or (line_no == 1 and stripped.lower().startswith("path")):
                continue
            try:
                file_path, label = (t.strip() for t in stripped.split(",", 1))
            except ValueError:
                raise SignalParseError(f"manifest line {line_no}: expected 'path,label'",
                                       line=line_no) from None
            base = Path(path).parent
            snapshot = read_ims_file(base / file_path if not Path(file_path).is_absolute()
                                     else file_path, sample_rate, expected_rows=None)
            signals.append(snapshot.channel_signal(0))
            labels.append(label)
    if not signals:
        raise SignalParseError(f"{path}: empty manifest")
    return LabeledDataset(signals=signals, labels=labels)


def cmd_classify(args):
    faults = _fault_frequencies_from_args(args)
    if args.manifest:
        dataset = _read_manifest(args.manifest, args.sample_rate)
        source = {"manifest": str(args.manifest)}
    else:
        base = _sim_config_from_args(args)
        dataset = make_fault_taxonomy_dataset(args.n_per_class, base, seed=args.seed)
        source = {"simulated_taxonomy": {"n_per_class": args.n_per_class,
                                         "config": _sim_config_dict(base)}}
    csf_config = _csf_config_from_args(args)
    report = classify_dataset(dataset, faults, csf_config,
                              band_fraction=args.band_fraction,
                              n_restarts=args.restarts, seed=args.seed)

    outdir = _out_path(args.output_dir)
    outdir.mkdir(parents=True, exist_ok=True)
    for name, branch in (("raw", report.raw), ("filtered", report.filtered)):
        with open(outdir / f"scores_{name}.csv", "w") as fh:
            fh.write("index,label,pc1,pc2,cluster\n")
            for i, (lab, row, cl) in enumerate(
                zip(report.labels, branch.scores, branch.kmeans_labels)
            ):
                fh.write(f"{i},{lab},{row[0]:.17g},{row[1]:.17g},{int(cl)}\n")
        np.savetxt(outdir / f"vat_{name}.csv",
                   branch.vat.reordered_dissimilarity, delimiter=",", fmt="%.17g")
    payload = {
        "kind": "classify",
        "source": source,
        "seed": args.seed,
        "band_fraction": args.band_fraction,
        "fault_frequencies_hz": {"bpfo": faults.bpfo_hz, "bpfi": faults.bpfi_hz,
                                 "bsf": faults.bsf_hz},
        "csf_config": _csf_config_dict(csf_config),
        "kmeans_restarts": args.restarts,
        "raw": {"purity": report.raw.purity,
                "explained_variance": report.raw.explained_variance_fractions.tolist(),
                "vat_order": report.raw.vat.order.tolist()},
        "filtered": {"purity": report.filtered.purity,
                     "explained_variance": report.filtered.explained_variance_fractions.tolist(),
                     "vat_order": report.filtered.vat.order.tolist()},
        "labels": report.labels,
    }
    with open(outdir / "report.json", "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
    print(f"purity raw={report.raw.purity:.3f} filtered={report.filtered.purity:.3f}")
    print(f"wrote {outdir}/scores_*.csv, vat_*.csv, report.json")
    return EXIT_OK


def cmd_gradcheck(args):
    errors = gradient_check(n_trials=args.trials, n_samples=args.n,
                            filter_length=args.filter_length, step=args.step,
                            seed=args.seed)
    worst = float(errors.max())
    print(f"{args.trials} trials (N={args.n}, l={args.filter_length}, step={args.step:g}): "
          f"max relative error {worst:.3e}")
    if worst > args.tolerance:
        print(f"FAIL: exceeds tolerance {args.tolerance:g}")
        return EXIT_VALIDATION
    print(f"OK: within tolerance {args.tolerance:g}")
    return EXIT_OK


def build_parser():
    parser = argparse.ArgumentParser(
        prog="sparsevib",
        description="Impulsive-signature enhancement and bearing health pipelines.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="generate a synthetic bearing signal")
    _add_sim_flags(p)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("-o", "--output", required=True, help="output CSV path")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("filter", help="run the sparse filter (or MED) on a signal file")
    p.add_argument("--input", required=True)
    p.add_argument("--sample-rate", type=float, default=None)
    p.add_argument("--method", choices=("csf", "med"), default="csf")
    _add_csf_flags(p)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=cmd_filter)

    p = sub.add_parser("features", help="extract the scale-invariant feature vector")
    p.add_argument("--input", required=True)
    p.add_argument("--sample-rate", type=float, default=None)
    _add_fault_freq_flags(p)
    p.add_argument("--shaft-hz", type=float, default=None, help="shaft speed for --geometry")
    p.add_argument("--format", choices=("csv", "json"), default="json")
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=cmd_features)

    p = sub.add_parser("assess", help="SOM-MQE health assessment over a snapshot sequence")
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--input-dir", help="directory of snapshot files")
    group.add_argument("--simulate-degradation", action="store_true")
    p.add_argument("--channel", type=int, default=None)
    p.add_argument("--n-files", type=int, default=100)
    p.add_argument("--onset", type=int, default=40)
    p.add_argument("--n-train", type=int, default=20)
    p.add_argument("--som-grid", default=None, help="ROWSxCOLS (default 3x3)")
    p.add_argument("--som-epochs", type=int, default=200)
    _add_fault_freq_flags(p)
    _add_sim_flags(p)
    _add_csf_flags(p)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--save-models", default=None, help="prefix for saved SOM model JSON files")
    p.add_argument("-o", "--output", required=True, help="MQE series CSV path")
    p.set_defaults(func=cmd_assess)

    p = sub.add_parser("classify", help="PCA + k-means + VAT on a labeled dataset")
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--simulate-taxonomy", action="store_true")
    group.add_argument("--manifest", help="CSV manifest: path,label per row")
    p.add_argument("--n-per-class", type=int, default=10)
    p.add_argument("--restarts", type=int, default=10)
    _add_fault_freq_flags(p)
    _add_sim_flags(p)
    _add_csf_flags(p)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("-o", "--output-dir", required=True)
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("gradcheck", help="verify the analytic gradient against finite differences")
    p.add_argument("--trials", type=int, default=20)
    p.add_argument("--n", type=int, default=256)
    p.add_argument("--filter-length", type=int, default=32)
    p.add_argument("--step", type=float, default=1e-6)
    p.add_argument("--seed", type=int, default=1234)
    p.add_argument("--tolerance", type=float, default=1e-5)
    p.set_defaults(func=cmd_gradcheck)

    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (SignalParseError,) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (ValueError, DegenerateInputError, NumericalFailureError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
