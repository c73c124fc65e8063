"""Command line front end.

Four subcommands: ``run`` executes a configuration file and writes the
trace artefacts, ``validate`` checks a file without running it, ``derive``
prints the equivalent-circuit parameters implied by the machine block, and
``list-scenarios`` shows the built-in scenario registry.

Exit codes: 0 on success (including a divergence the configuration declares
with expect_divergence), 1 for configuration or parameter problems, 2 when
a run blows up unexpectedly.

The only environment variable honoured is SESGSIM_OUT, an output-directory
override; --out beats it, and it beats the configuration file.
"""

from __future__ import annotations

import argparse
import dataclasses
import inspect
import json
import os
import sys

from .config_io import (
    PLOT_CHANNELS,
    config_hash,
    load_config,
    run_from_config,
)
from .errors import (
    ConfigurationError,
    FitError,
    NumericalError,
    ParameterError,
    SaturationRangeError,
)
from .params import composite_reactances, derive_parameters
from .scenarios import SCENARIOS, build_scenario

OUT_ENV_VAR = "SESGSIM_OUT"


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sim",
        description="per-unit dq simulator for a self-excited synchronous generator",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="execute a configuration file")
    run.add_argument("--config", required=True, help="JSON run configuration")
    run.add_argument("--scenario", help="registry scenario name overriding the file")
    run.add_argument("--out", help=f"output directory (beats {OUT_ENV_VAR} and the file)")
    run.add_argument("--plot", help="comma-separated channel list, e.g. 'psi_f,|v|'")

    val = sub.add_parser("validate", help="check a configuration file")
    val.add_argument("--config", required=True)

    der = sub.add_parser("derive", help="print derived parameters as JSON")
    der.add_argument("--config", required=True)

    sub.add_parser("list-scenarios", help="show the built-in scenarios")
    return parser


def _cmd_run(args) -> int:
    cfg = load_config(args.config)
    if args.scenario:
        cfg = dataclasses.replace(cfg, scenario=build_scenario(args.scenario))
    if args.plot is not None:
        channels = tuple(c.strip() for c in args.plot.split(",") if c.strip())
        bad = [c for c in channels if c not in PLOT_CHANNELS]
        if bad:
            raise ConfigurationError(
                f"unknown plot channels {bad}; valid: {', '.join(PLOT_CHANNELS)}"
            )
        cfg = dataclasses.replace(cfg, plot_channels=channels)
    out_dir = args.out or os.environ.get(OUT_ENV_VAR) or None

    ts, written = run_from_config(cfg, out_dir=out_dir)
    print(f"scenario: {cfg.scenario.name}")
    print(f"samples: {len(ts)}  outcome: {ts.outcome}")
    for warning in ts.metadata.get("warnings", []):
        print(f"warning: {warning}")
    for path in written:
        print(f"wrote {path}")
    if ts.outcome == "diverged":
        if cfg.expect_divergence:
            print(f"diverged at t={ts.metadata['diverged_at']:.6g} s (expected)")
            return 0
        print(
            f"unexpected divergence at t={ts.metadata['diverged_at']:.6g} s",
            file=sys.stderr,
        )
        return 2
    return 0


def _cmd_validate(args) -> int:
    cfg = load_config(args.config)
    print(f"{args.config}: valid (sha256 {config_hash(cfg)[:12]})")
    print(f"scenario: {cfg.scenario.name}")
    print(f"excitation: {cfg.excitation.mode}")
    print(f"saturation: {'on' if cfg.saturation_enabled else 'off'}")
    print(
        f"integrator: {cfg.integrator.method}, dt={cfg.integrator.step_size}, "
        f"duration={cfg.integrator.duration}"
    )
    return 0


def _cmd_derive(args) -> int:
    cfg = load_config(args.config)
    d = derive_parameters(cfg.machine, cfg.time_constant_overrides)
    derived = {
        k: v for k, v in dataclasses.asdict(d).items() if v is not None
    }
    report = {
        "machine": dataclasses.asdict(cfg.machine),
        "derived": derived,
        "composite_roundtrip": composite_reactances(d),
    }
    print(json.dumps(report, indent=2, sort_keys=True))
    return 0


def _cmd_list_scenarios() -> int:
    for name, builder in SCENARIOS.items():
        params = ", ".join(
            f"{p.name}={p.default!r}"
            for p in inspect.signature(builder).parameters.values()
        )
        doc = (inspect.getdoc(builder) or "").splitlines()
        print(f"{name}({params})")
        if doc:
            print(f"    {doc[0]}")
    return 0


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "run":
            return _cmd_run(args)
        if args.command == "validate":
            return _cmd_validate(args)
        if args.command == "derive":
            return _cmd_derive(args)
        return _cmd_list_scenarios()
    except (ConfigurationError, ParameterError, FitError, SaturationRangeError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 1
    except OSError as err:
        print(f"error: {err}", file=sys.stderr)
        return 1
    except NumericalError as err:
        print(f"numerical failure: {err}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
