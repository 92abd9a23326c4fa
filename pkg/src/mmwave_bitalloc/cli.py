"""Command-line front end.

Verbs: ``run`` (full experiment bundle), ``verify`` (self checks),
``enumerate-bset`` (feasible-set size/members), ``allocate`` (one allocator
at one operating point), ``sweep`` (CSV to stdout or file).

Exit codes: 0 success, 1 validation error, 2 runtime error, 3 verification
failure.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace

import numpy as np

from .bitalloc import enumerate_bset
from .channel import generate_channel
from .checks import run_all_checks
from .config import (
    PRESET_NAMES,
    ConfigError,
    load_config,
    preset_config,
    serialize_config,
)
from .metrics import snr_sweep
from .quantization import DEFAULT_DISTORTION, DistortionTable
from .runner import rows_to_csv, run_experiment

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_RUNTIME = 2
EXIT_VERIFICATION = 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"error: {message}\n")
        sys.exit(EXIT_VALIDATION)


def _add_config_arguments(parser):
    group = parser.add_mutually_exclusive_group(required=True)
    group.add_argument("--config", help="path to a JSON experiment config")
    group.add_argument("--preset", choices=PRESET_NAMES, help="named preset experiment")
    parser.add_argument("--output-dir", default=None, help="override the output directory")
    parser.add_argument("--seed", type=int, default=None, help="override the channel seed")


def _resolve_config(args):
    if args.preset:
        config = preset_config(args.preset)
    else:
        config = load_config(args.config)
    if args.output_dir is not None:
        config = replace(config, output_dir=args.output_dir)
    if args.seed is not None:
        config = replace(config, channel=replace(config.channel, rng_seed=args.seed))
    return config


def _cmd_run(args) -> int:
    config = _resolve_config(args)
    result = run_experiment(config, jobs=args.jobs)
    print(f"wrote {result.csv_path}")
    print(f"wrote {result.summary_path}")
    print(f"wrote {result.plot_path}")
    print(f"wrote {result.metadata_path}")
    return EXIT_OK


def _cmd_sweep(args) -> int:
    config = _resolve_config(args)
    channel = generate_channel(config.channel)
    rows = []
    for policy in config.policies:
        rows.extend(
            snr_sweep(
                channel,
                policy,
                config.snr_grid_db,
                b_min=config.b_min,
                b_max=config.b_max,
                power_budget=config.power_budget(),
                mc_num_symbols=config.mc.num_symbols,
                mc_seed=config.mc.seed,
                quantizer_mode=config.mc.quantizer_mode,
                ga_params=config.ga_params(),
            )
        )
    text = rows_to_csv(rows)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
        print(f"wrote {args.out}")
    else:
        sys.stdout.write(text)
    return EXIT_OK


def _cmd_enumerate(args) -> int:
    space = enumerate_bset(
        args.num_paths, b_min=args.b_min, b_max=args.b_max, power_budget=args.budget
    )
    print(f"num_paths={args.num_paths} bits=[{args.b_min},{args.b_max}] "
          f"budget={space.power_budget:g}")
    print(f"cardinality={space.cardinality()}")
    if args.list:
        for member in space:
            print("-".join(str(b) for b in member.bits))
    return EXIT_OK


def _cmd_allocate(args) -> int:
    config = _resolve_config(args)
    channel = generate_channel(config.channel)
    rows = snr_sweep(
        channel,
        args.method,
        [args.snr_db],
        b_min=config.b_min,
        b_max=config.b_max,
        power_budget=config.power_budget(),
        ga_params=config.ga_params(),
    )
    row = rows[0]
    bits = "-".join(str(b) for b in row.bits)
    print(f"method={args.method} snr_db={args.snr_db:g}")
    print(f"allocation={bits}")
    print(f"trace_mse={row.delta_analytic:.6g}")
    if row.evaluations is not None:
        print(f"evaluations={row.evaluations}")
    return EXIT_OK


def _parse_distortion_override(text: str) -> DistortionTable:
    values = dict(DEFAULT_DISTORTION.values)
    for item in text.split(","):
        bits_str, _, value_str = item.partition("=")
        values[int(bits_str)] = float(value_str)
    return DistortionTable(values)


def _cmd_verify(args) -> int:
    table = DEFAULT_DISTORTION
    if args.override_distortion:
        table = _parse_distortion_override(args.override_distortion)
    overrides = None
    if args.override_evaluations:
        overrides = {}
        for item in args.override_evaluations.split(","):
            paths_str, _, evals_str = item.partition("=")
            overrides[int(paths_str)] = int(evals_str)
    results = run_all_checks(
        distortion_table=table,
        evaluation_overrides=overrides,
        crlb_instances=args.instances,
    )
    failed = 0
    for res in results:
        status = "PASS" if res.passed else "FAIL"
        print(f"{status} {res.name}: {res.detail}")
        failed += 0 if res.passed else 1
    if failed:
        print(f"{failed} of {len(results)} checks failed")
        return EXIT_VERIFICATION
    print(f"all {len(results)} checks passed")
    return EXIT_OK


def _cmd_write_preset(args) -> int:
    config = preset_config(args.preset)
    text = serialize_config(config)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
        print(f"wrote {args.out}")
    else:
        sys.stdout.write(text)
    return EXIT_OK


def build_parser() -> _Parser:
    parser = _Parser(prog="mmwave-bitalloc")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run an experiment and write the artifact bundle")
    _add_config_arguments(p_run)
    p_run.add_argument("--jobs", type=int, default=1, help="parallel policy cells")
    p_run.set_defaults(func=_cmd_run)

    p_sweep = sub.add_parser("sweep", help="run the sweep and emit CSV")
    _add_config_arguments(p_sweep)
    p_sweep.add_argument("--out", default=None, help="CSV output path (default stdout)")
    p_sweep.set_defaults(func=_cmd_sweep)

    p_enum = sub.add_parser("enumerate-bset", help="count or list the feasible set")
    p_enum.add_argument("--num-paths", type=int, required=True)
    p_enum.add_argument("--b-min", type=int, default=1)
    p_enum.add_argument("--b-max", type=int, default=4)
    p_enum.add_argument("--budget", type=float, default=None)
    p_enum.add_argument("--list", action="store_true", help="print every member")
    p_enum.set_defaults(func=_cmd_enumerate)

    p_alloc = sub.add_parser("allocate", help="run one allocator at one SNR")
    _add_config_arguments(p_alloc)
    p_alloc.add_argument("--method", choices=("fs", "ga", "crlb"), required=True)
    p_alloc.add_argument("--snr-db", type=float, default=10.0)
    p_alloc.set_defaults(func=_cmd_allocate)

    p_verify = sub.add_parser("verify", help="run the self-verification checks")
    p_verify.add_argument("--instances", type=int, default=200,
                          help="instances for the MSE/CRLB identity check")
    p_verify.add_argument("--override-distortion", default=None, metavar="B=V[,B=V]",
                          help="fault-injection override of f(b) (self-test)")
    p_verify.add_argument("--override-evaluations", default=None, metavar="NS=MU[,NS=MU]",
                          help="fault-injection override of evaluation budgets (self-test)")
    p_verify.set_defaults(func=_cmd_verify)

    p_preset = sub.add_parser("write-preset", help="serialize a preset config to JSON")
    p_preset.add_argument("--preset", choices=PRESET_NAMES, required=True)
    p_preset.add_argument("--out", default=None)
    p_preset.set_defaults(func=_cmd_write_preset)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        sys.stderr.write(f"config error: {exc}\n")
        return EXIT_VALIDATION
    except (ValueError, np.linalg.LinAlgError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_VALIDATION
    except OSError as exc:
        sys.stderr.write(f"io error: {exc}\n")
        return EXIT_RUNTIME
    except Exception as exc:  # pragma: no cover
        sys.stderr.write(f"runtime error: {exc}\n")
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
