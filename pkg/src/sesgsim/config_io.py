"""Run configuration files, CSV traces and plot output.

A run is described by one JSON document with a ``schema_version`` marker and
six blocks: machine, saturation, excitation, integrator, scenario, output.
Unknown keys anywhere in the document are rejected with their full path, so
a typo like ``Xd_pp`` vs ``Xd_p`` in the wrong place fails loudly instead of
silently falling back to a default.

Trace output is one CSV per run (fixed column set, full float precision)
plus a ``.meta.json`` sidecar carrying the run metadata, the normalised
configuration and its hash.  All files are written to a temporary name and
renamed into place so a crash never leaves a truncated artefact behind.
"""

from __future__ import annotations

import dataclasses
import hashlib
import json
import os
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import ConfigurationError
from .excitation import ExcitationConfig
from .integrator import IntegratorConfig, simulate
from .params import MachineParameters, derive_parameters, validate_machine
from .saturation import FroelichCurve, fit_froelich
from .scenarios import (
    COLUMNS,
    SCENARIOS,
    Event,
    ScenarioScript,
    TimeSeries,
    build_scenario,
)

SCHEMA_VERSION = 1
FIELD_TIME_CONSTANT_MODES = ("as_printed", "open_circuit")
OUTPUT_FORMATS = ("csv",)

# channels accepted by --plot: any trace column plus the dq magnitudes
PLOT_CHANNELS = tuple(c for c in COLUMNS if c != "t") + ("|v|", "|i|")
_PLOT_FILE_NAMES = {"|v|": "v_mag", "|i|": "i_mag"}

_TOP_KEYS = (
    "schema_version", "description", "machine", "time_constant_overrides",
    "saturation", "excitation", "integrator", "field_time_constant",
    "scenario", "expect_divergence", "output",
)
_SATURATION_KEYS = ("enabled", "a", "b", "anchor_low", "anchor_high")
_SCENARIO_KEYS = (
    "name", "params", "events", "initial_load", "initial_state_mode",
    "description",
)
_EVENT_KEYS = ("time", "action", "value")
_OUTPUT_KEYS = ("directory", "formats", "plot_channels")

_MACHINE_KEYS = tuple(f.name for f in dataclasses.fields(MachineParameters))
_EXCITATION_KEYS = tuple(f.name for f in dataclasses.fields(ExcitationConfig))
_INTEGRATOR_KEYS = tuple(f.name for f in dataclasses.fields(IntegratorConfig))


@dataclass(frozen=True)
class RunConfig:
    machine: MachineParameters
    excitation: ExcitationConfig
    integrator: IntegratorConfig
    scenario: ScenarioScript
    saturation_curve: FroelichCurve | None = None
    saturation_enabled: bool = False
    time_constant_overrides: dict | None = None
    field_time_constant: str = "as_printed"
    expect_divergence: bool = False
    output_directory: str = "."
    output_formats: tuple = ("csv",)
    plot_channels: tuple = ()
    description: str = ""


def _check_keys(block: dict, allowed, path: str, violations: list[str]) -> None:
    for key in block:
        if key not in allowed:
            violations.append(f"unknown key {path}.{key}")


def parse_config(raw: dict) -> RunConfig:
    """Build a validated RunConfig from a parsed JSON document."""
    if not isinstance(raw, dict):
        raise ConfigurationError("configuration root must be a JSON object")
    violations: list[str] = []
    _check_keys(raw, _TOP_KEYS, "<root>", violations)

    version = raw.get("schema_version")
    if version != SCHEMA_VERSION:
        violations.append(
            f"schema_version must be {SCHEMA_VERSION}, got {version!r}"
        )

    machine_block = raw.get("machine")
    if not isinstance(machine_block, dict):
        violations.append("machine block is required")
        machine_block = {}
    _check_keys(machine_block, _MACHINE_KEYS, "machine", violations)
    for key, value in machine_block.items():
        if key in _MACHINE_KEYS and value is not None and not isinstance(value, (int, float)):
            violations.append(f"machine.{key} must be a number, got {value!r}")

    sat_block = raw.get("saturation", {})
    _check_keys(sat_block, _SATURATION_KEYS, "saturation", violations)
    exc_block = raw.get("excitation", {})
    _check_keys(exc_block, _EXCITATION_KEYS, "excitation", violations)
    integ_block = raw.get("integrator", {})
    _check_keys(integ_block, _INTEGRATOR_KEYS, "integrator", violations)
    scen_block = raw.get("scenario", {})
    _check_keys(scen_block, _SCENARIO_KEYS, "scenario", violations)
    out_block = raw.get("output", {})
    _check_keys(out_block, _OUTPUT_KEYS, "output", violations)
    for idx, ev in enumerate(scen_block.get("events", ())):
        if isinstance(ev, dict):
            _check_keys(ev, _EVENT_KEYS, f"scenario.events[{idx}]", violations)

    ftc = raw.get("field_time_constant", "as_printed")
    if ftc not in FIELD_TIME_CONSTANT_MODES:
        violations.append(
            f"field_time_constant must be one of {FIELD_TIME_CONSTANT_MODES}, "
            f"got {ftc!r}"
        )
    formats = tuple(out_block.get("formats", ["csv"]))
    for fmt in formats:
        if fmt not in OUTPUT_FORMATS:
            violations.append(f"output.formats: unknown format {fmt!r}")
    channels = tuple(out_block.get("plot_channels", []))
    for ch in channels:
        if ch not in PLOT_CHANNELS:
            violations.append(
                f"output.plot_channels: unknown channel {ch!r}; "
                f"valid channels are {', '.join(PLOT_CHANNELS)}"
            )
    if violations:
        raise ConfigurationError(violations)

    try:
        machine = MachineParameters(**machine_block)
    except TypeError as err:
        raise ConfigurationError(f"machine: {err}") from err
    bad = validate_machine(machine)
    if bad:
        raise ConfigurationError([f"machine.{msg}" for msg in bad])

    curve, enabled = _parse_saturation(sat_block)
    excitation = ExcitationConfig(**exc_block)
    integrator = IntegratorConfig(**integ_block)
    scenario = _parse_scenario(scen_block)
    overrides = dict(raw.get("time_constant_overrides", {}))

    return RunConfig(
        machine=machine,
        excitation=excitation,
        integrator=integrator,
        scenario=scenario,
        saturation_curve=curve,
        saturation_enabled=enabled,
        time_constant_overrides=overrides,
        field_time_constant=ftc,
        expect_divergence=bool(raw.get("expect_divergence", False)),
        output_directory=str(out_block.get("directory", ".")),
        output_formats=formats,
        plot_channels=channels,
        description=str(raw.get("description", "")),
    )


def _parse_saturation(block: dict) -> tuple[FroelichCurve | None, bool]:
    enabled = bool(block.get("enabled", False))
    has_const = "a" in block or "b" in block
    has_anchor = "anchor_low" in block or "anchor_high" in block
    if has_const and ("a" not in block or "b" not in block):
        raise ConfigurationError("saturation: constants need both a and b")
    if has_anchor and ("anchor_low" not in block or "anchor_high" not in block):
        raise ConfigurationError("saturation: anchors need both anchor_low and anchor_high")
    if has_const:
        low = tuple(block["anchor_low"]) if has_anchor else None
        high = tuple(block["anchor_high"]) if has_anchor else None
        return FroelichCurve(a=float(block["a"]), b=float(block["b"]),
                             anchor_low=low, anchor_high=high), enabled
    if has_anchor:
        return fit_froelich(tuple(block["anchor_low"]), tuple(block["anchor_high"])), enabled
    if enabled:
        raise ConfigurationError(
            "saturation.enabled requires curve constants (a, b) or two anchors"
        )
    return None, False


def _parse_scenario(block: dict) -> ScenarioScript:
    if "events" in block:
        events = []
        for ev in block["events"]:
            events.append(Event(time=float(ev["time"]), action=ev["action"],
                                value=ev.get("value")))
        load = block.get("initial_load")
        return ScenarioScript(
            name=block.get("name", "custom"),
            events=tuple(events),
            initial_load=None if load is None else float(load),
            initial_state_mode=block.get("initial_state_mode", "excitation"),
            description=block.get("description", ""),
        )
    name = block.get("name")
    if name is None:
        raise ConfigurationError(
            "scenario needs a registry name or an inline event list; "
            f"known names: {', '.join(sorted(SCENARIOS))}"
        )
    return build_scenario(name, block.get("params"))


def load_config(path) -> RunConfig:
    """Read and validate a JSON configuration file."""
    text = Path(path).read_text()
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as err:
        raise ConfigurationError(f"{path}: not valid JSON: {err}") from err
    return parse_config(raw)


def config_to_dict(cfg: RunConfig) -> dict:
    """Normalised document form; parsing it back reproduces the config."""
    machine = dataclasses.asdict(cfg.machine)
    sat: dict = {"enabled": cfg.saturation_enabled}
    if cfg.saturation_curve is not None:
        c = cfg.saturation_curve
        sat["a"] = c.a
        sat["b"] = c.b
        if c.anchor_low is not None:
            sat["anchor_low"] = list(c.anchor_low)
            sat["anchor_high"] = list(c.anchor_high)
    scen = cfg.scenario
    return {
        "schema_version": SCHEMA_VERSION,
        "description": cfg.description,
        "machine": machine,
        "time_constant_overrides": dict(cfg.time_constant_overrides or {}),
        "saturation": sat,
        "excitation": dataclasses.asdict(cfg.excitation),
        "integrator": dataclasses.asdict(cfg.integrator),
        "field_time_constant": cfg.field_time_constant,
        "scenario": {
            "name": scen.name,
            "initial_load": scen.initial_load,
            "initial_state_mode": scen.initial_state_mode,
            "description": scen.description,
            "events": [
                {"time": ev.time, "action": ev.action, "value": ev.value}
                for ev in scen.events
            ],
        },
        "expect_divergence": cfg.expect_divergence,
        "output": {
            "directory": cfg.output_directory,
            "formats": list(cfg.output_formats),
            "plot_channels": list(cfg.plot_channels),
        },
    }


def config_hash(cfg: RunConfig) -> str:
    """SHA-256 of the canonical JSON form, for provenance in sidecars."""
    canon = json.dumps(config_to_dict(cfg), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canon.encode()).hexdigest()


def _atomic_write_text(path: Path, text: str) -> None:
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text(text)
    os.replace(tmp, path)


def write_csv(path, ts: TimeSeries, extra_meta: dict | None = None) -> tuple[Path, Path]:
    """Write the trace and its metadata sidecar atomically.

    Floats are printed with %.17g so a read-back reproduces them bit for
    bit.  Returns (csv_path, meta_path).
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_name(path.name + ".tmp")
    np.savetxt(tmp, ts.data, delimiter=",", fmt="%.17g",
               header=",".join(COLUMNS), comments="")
    os.replace(tmp, path)
    meta = dict(ts.metadata)
    if extra_meta:
        meta.update(extra_meta)
    meta_path = path.with_suffix(".meta.json")
    _atomic_write_text(meta_path, json.dumps(meta, indent=2, sort_keys=True) + "\n")
    return path, meta_path


def read_csv(path) -> TimeSeries:
    """Read a trace written by write_csv; picks up the sidecar if present."""
    path = Path(path)
    with path.open() as fh:
        header = fh.readline().strip()
        names = tuple(header.split(","))
        if names != COLUMNS:
            raise ConfigurationError(
                f"{path}: column header does not match the trace layout"
            )
        lines = [ln for ln in fh.read().splitlines() if ln.strip()]
    if lines:
        body = np.loadtxt(lines, delimiter=",", ndmin=2)
    else:
        body = np.empty((0, len(COLUMNS)))
    metadata = {}
    meta_path = path.with_suffix(".meta.json")
    if meta_path.exists():
        metadata = json.loads(meta_path.read_text())
    return TimeSeries(data=body, metadata=metadata)


def plot_file_name(stem: str, channel: str) -> str:
    return f"{stem}_{_PLOT_FILE_NAMES.get(channel, channel)}.svg"


def _channel_values(ts: TimeSeries, channel: str) -> np.ndarray:
    if channel == "|v|":
        return np.hypot(ts["v_d"], ts["v_q"])
    if channel == "|i|":
        return np.hypot(ts["i_d"], ts["i_q"])
    return ts[channel]


def emit_plot(path, ts: TimeSeries, channels) -> Path:
    """Render one or more channels against time into a single SVG."""
    if isinstance(channels, str):
        channels = (channels,)
    channels = tuple(channels)
    if not channels:
        raise ConfigurationError(
            f"no plot channels requested; valid channels are "
            f"{', '.join(PLOT_CHANNELS)}"
        )
    bad = [c for c in channels if c not in PLOT_CHANNELS]
    if bad:
        raise ConfigurationError(
            f"unknown plot channels {bad}; valid channels are "
            f"{', '.join(PLOT_CHANNELS)}"
        )
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fig, ax = plt.subplots(figsize=(8, 4))
    for channel in channels:
        ax.plot(ts.t, _channel_values(ts, channel), lw=0.8, label=channel)
    ax.set_xlabel("t [s]")
    if len(channels) == 1:
        ax.set_ylabel(f"{channels[0]} [pu]")
    else:
        ax.set_ylabel("pu")
        ax.legend(loc="best", fontsize=8)
    ax.set_title(ts.metadata.get("scenario", ""))
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    tmp = path.with_name(path.name + ".tmp")
    fig.savefig(tmp, format="svg")
    plt.close(fig)
    os.replace(tmp, path)
    return path


def run_from_config(cfg: RunConfig, out_dir=None) -> tuple[TimeSeries, list[Path]]:
    """Derive, simulate and write every requested artefact.

    ``out_dir`` overrides the configured output directory (command line and
    environment take precedence over the file).  Returns the trace and the
    list of paths written.
    """
    d = derive_parameters(cfg.machine, cfg.time_constant_overrides)
    curve = cfg.saturation_curve if cfg.saturation_enabled else None
    ts = simulate(
        d, cfg.excitation, cfg.scenario, cfg.integrator,
        saturation_curve=curve, field_time_constant=cfg.field_time_constant,
    )
    overrides = cfg.time_constant_overrides or {}
    if cfg.machine.r_1q is not None and "Tq_p" not in overrides:
        ts.metadata["notes"].append(
            "Tq_p taken from the open-circuit constant by the reactance "
            "ratio Xq_p/Xq; supply a measured override when available"
        )
    ts.metadata["config_sha256"] = config_hash(cfg)
    ts.metadata["configuration"] = config_to_dict(cfg)

    outdir = Path(out_dir) if out_dir is not None else Path(cfg.output_directory)
    stem = cfg.scenario.name
    written: list[Path] = []
    if "csv" in cfg.output_formats:
        csv_path, meta_path = write_csv(outdir / f"{stem}.csv", ts)
        written += [csv_path, meta_path]
    for channel in cfg.plot_channels:
        written.append(emit_plot(outdir / plot_file_name(stem, channel), ts, channel))
    return ts, written
