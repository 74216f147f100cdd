"""Command-line entry point: ``squidaccel <command> --config run.json``.

Every command reads one JSON configuration (see ``config_schema.json``) and
writes CSV or JSON. CSV numbers use a fixed 12-significant-digit exponent
format so identical configurations give byte-identical files.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import re
import sys
from importlib import resources
from pathlib import Path

import jsonschema
import numpy as np

from . import dc_squid, gp_deviation, rf_squid
from .core import (CONSTANTS, DEFAULT_STRICTNESS, ConfigurationError,
                   DcSquidConfig, Material, Rectangle, RfCircuitConfig, Ring,
                   SquidError)
from .phase_engine import drift_velocity, form_factor
from .tables import SweepTable, format_value

COMMANDS = ("dc-sweep", "rf-sweep", "rf-sim", "invert", "deviation", "validate")


class ConfigError(Exception):
    """Configuration rejected; the message names the offending line."""


def load_schema() -> dict:
    return json.loads(resources.files(__package__).joinpath("config_schema.json").read_text())


def _locate(text: str, path, extra_key: str | None = None) -> int:
    """Best-effort 1-based line of a JSON path inside ``text``."""
    pos = 0
    for part in path:
        if isinstance(part, str):
            m = re.compile(r'"%s"\s*:' % re.escape(part)).search(text, pos)
            if m:
                pos = m.start()
    if extra_key:
        m = re.compile(r'"%s"\s*:' % re.escape(extra_key)).search(text, pos)
        if m:
            pos = m.start()
    return text.count("\n", 0, pos) + 1


def parse_config(text: str, source: str = "<config>") -> dict:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{source}:{exc.lineno}: invalid JSON: {exc.msg}") from None
    validator = jsonschema.Draft202012Validator(load_schema())
    errors = sorted(validator.iter_errors(data), key=lambda e: list(e.absolute_path))
    if errors:
        lines = []
        for err in errors:
            extra = None
            if err.validator == "additionalProperties":
                m = re.search(r"'([^']+)' (?:was|were) unexpected", err.message)
                extra = m.group(1) if m else None
            where = "/".join(str(p) for p in err.absolute_path) or "<root>"
            line = _locate(text, list(err.absolute_path), extra)
            lines.append(f"{source}:{line}: {where}: {err.message}")
        raise ConfigError("\n".join(lines))
    return data


def load_config(path) -> dict:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"{path}: cannot read configuration: {exc.strerror}") from None
    return parse_config(text, str(path))


def build_material(section: dict) -> Material:
    return Material(n=section["n"], lam=section["lambda"], xi0=section["xi0"],
                    T=section["T"], Tc=section["Tc"], vF=section["vF"])


def build_geometry(section: dict):
    if section["shape"] == "ring":
        return Ring(Rs=section["Rs"], d=section["d"], dRs=section.get("dRs", 0.0))
    return Rectangle(b=section["b"], c=section["c"], d=section["d"])


def build_dc(device: dict) -> DcSquidConfig:
    if device["kind"] != "dc":
        raise ConfigError("this command needs a dc device (device.kind = \"dc\")")
    return DcSquidConfig(build_geometry(device["geometry"]), build_material(device["material"]),
                         device["Ic"])


def build_rf(device: dict) -> RfCircuitConfig:
    if device["kind"] != "rf":
        raise ConfigError("this command needs an rf device (device.kind = \"rf\")")
    geometry = build_geometry(device["geometry"]) if "geometry" in device else None
    material = build_material(device["material"]) if "material" in device else None
    f = device.get("form_factor")
    if f is None:
        if geometry is None or material is None:
            raise ConfigError("device.form_factor is required unless material and geometry are given")
        f = form_factor(geometry, material).f
    Rs = device.get("ring_Rs")
    if Rs is None:
        if not isinstance(geometry, Ring):
            raise ConfigError("device.ring_Rs is required unless a ring geometry is given")
        Rs = geometry.Rs
    return RfCircuitConfig(L=device["L"], R=device["R"], C=device["C"], Ic=device["Ic"],
                           Idc=device["Idc"], form_factor=f, ring_Rs=Rs)


def _optional_parts(device: dict):
    geometry = build_geometry(device["geometry"]) if "geometry" in device else None
    material = build_material(device["material"]) if "material" in device else None
    return geometry, material


def make_grid(sweep: dict, default_stop: float) -> np.ndarray:
    count = sweep.get("count", 50)
    if count == 0:
        raise ConfigError("empty sweep")
    start = sweep.get("start", 0.0)
    stop = sweep.get("stop")
    stop = default_stop if stop is None else stop
    if sweep.get("scale", "linear") == "log":
        if start <= 0.0:
            raise ConfigError("log sweep needs start > 0")
        return np.geomspace(start, stop, count)
    return np.linspace(start, stop, count)


def _emit(text: str, out: str | None) -> None:
    if out is None or out == "-":
        sys.stdout.write(text)
    else:
        with open(out, "w", newline="\n") as fh:
            fh.write(text)


def _table_text(table: SweepTable, precision: int) -> str:
    buf = io.StringIO()
    table.to_csv(buf, precision)
    return buf.getvalue()


def _json_text(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=False, default=_json_default) + "\n"


def _json_default(obj):
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def _finite(x: float):
    return x if math.isfinite(x) else None


def _out(args, cfg, key="path"):
    return args.out if args.out is not None else cfg.get("output", {}).get(key)


def _precision(cfg) -> int:
    return cfg.get("output", {}).get("precision", 12)


def _report_failures(table: SweepTable) -> None:
    for row, message in table.failures:
        print(f"row {row}: {message}", file=sys.stderr)


def cmd_dc_sweep(args, cfg) -> None:
    config = build_dc(cfg["device"])
    grid = make_grid(cfg.get("sweep", {}), dc_squid.max_acceleration(config))
    table = dc_squid.dc_sweep(config, grid, args.strictness)
    _report_failures(table)
    _emit(_table_text(table, _precision(cfg)), _out(args, cfg))


def _hertz(table: SweepTable) -> SweepTable:
    cols = {("freq" if k == "omega" else k): (np.asarray(v) / (2.0 * math.pi) if k == "omega" else v)
            for k, v in table.columns.items()}
    units = {("freq" if k == "omega" else k): ("Hz" if k == "omega" else u)
             for k, u in table.units.items()}
    return SweepTable(cols, units, table.failures)


def cmd_rf_sweep(args, cfg) -> None:
    device = cfg["device"]
    config = build_rf(device)
    geometry, material = _optional_parts(device)
    sweep = cfg.get("sweep", {})
    omega0 = rf_squid.derived_circuit(config).omega0
    sweep = {"start": 0.1 * omega0, **sweep}
    grid = make_grid(sweep, 3.0 * omega0)
    table = rf_squid.frequency_sweep(config, sweep.get("a_omega", 1e3), grid,
                                     geometry, material, args.strictness)
    if args.hertz:
        table = _hertz(table)
    _emit(_table_text(table, _precision(cfg)), _out(args, cfg))


def cmd_rf_sim(args, cfg) -> None:
    config = build_rf(cfg["device"])
    sim = cfg["simulation"]
    omega, a = sim["omega"], sim["a_omega"]
    period = 2.0 * math.pi / omega
    dt = sim.get("dt")
    if dt is None:
        dt = period / math.ceil(period / rf_squid.max_step(config, omega))
    decay = rf_squid.transient_decay_rate(config)
    settle = max(sim.get("settle_periods", 2), math.ceil(10.0 / decay / period))
    analysis = sim.get("analysis_periods", 10)
    t_end = sim.get("t_end", (settle + analysis) * period)
    series = rf_squid.simulate(config, rf_squid.sinusoidal_drive(a, omega), t_end, dt, omega)
    V = rf_squid.extract_fundamental(series, omega, settle, analysis, "V", decay)
    V_lin = rf_squid.linearized_ode_response(omega, config) * a
    rel = abs(V - V_lin) / abs(V_lin) if V_lin != 0 else abs(V)
    phase = math.degrees(math.remainder(np.angle(V) - np.angle(V_lin), 2.0 * math.pi)) if V_lin != 0 else 0.0
    summary = {
        "omega": omega, "a_omega": a, "dt": dt, "t_end": t_end,
        "settle_periods": settle, "analysis_periods": analysis,
        "V_omega": {"re": V.real, "im": V.imag},
        "V_linear": {"re": V_lin.real, "im": V_lin.imag},
        "relative_amplitude_error": abs(abs(V) / abs(V_lin) - 1.0) if V_lin != 0 else 0.0,
        "relative_error": rel,
        "phase_error_deg": phase,
        "max_abs_delta_phi": float(np.max(np.abs(series["delta_phi"]))),
    }
    precision = _precision(cfg)
    names = ["t", "delta_phi", "V", "I_minus", "I_plus"]
    buf = io.StringIO()
    buf.write("t[s],delta_phi[rad],V[V],I_minus[A],I_plus[A]\n")
    cols = [series.t] + [series[n] for n in names[1:]]
    for row in zip(*cols):
        buf.write(",".join(format_value(v, precision) for v in row) + "\n")
    out = _out(args, cfg)
    _emit(buf.getvalue(), out)
    summary_path = args.summary or cfg.get("output", {}).get("summary")
    if summary_path is None and out not in (None, "-"):
        summary_path = str(Path(out).with_suffix(".json"))
    if summary_path is None:
        sys.stderr.write(_json_text(summary))
    else:
        _emit(_json_text(summary), summary_path)


def read_voltage_csv(path) -> rf_squid.TimeSeries:
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = [h.split("[")[0].strip() for h in next(reader)]
        try:
            it, iv = header.index("t"), header.index("V")
        except ValueError:
            raise ConfigError(f"{path}: voltage file needs columns t and V") from None
        t, V = [], []
        for lineno, row in enumerate(reader, start=2):
            try:
                t.append(float(row[it]))
                V.append(float(row[iv]))
            except (ValueError, IndexError):
                raise ConfigError(f"{path}:{lineno}: malformed row") from None
    return rf_squid.TimeSeries(np.array(t), {"V": np.array(V)})


def cmd_invert(args, cfg) -> None:
    if args.voltage is None:
        raise ConfigError("invert needs --voltage PATH (CSV with columns t, V)")
    device = cfg["device"]
    config = build_rf(device)
    geometry, material = _optional_parts(device)
    inv = cfg.get("inversion", {})
    series = read_voltage_csv(args.voltage)
    table = rf_squid.invert_spectrum(series, config, inv.get("omegas"),
                                     inv.get("window", "integer_periods"),
                                     geometry, material, args.strictness)
    for i, (w, flag) in enumerate(zip(table["omega"], table["bandwidth"])):
        if flag != "pass":
            print(f"row {i}: omega={w:g} rad/s outside the passage-time bound ({flag})",
                  file=sys.stderr)
    if args.hertz:
        table = _hertz(table)
    _emit(_table_text(table, _precision(cfg)), _out(args, cfg))


def cmd_deviation(args, cfg) -> None:
    device = cfg["device"]
    if "material" not in device or "geometry" not in device:
        raise ConfigError("deviation needs device.material and device.geometry")
    material = build_material(device["material"])
    geometry = build_geometry(device["geometry"])
    dev = cfg.get("deviation", {"a": 0.0})
    a, d = dev["a"], geometry.d
    params = gp_deviation.condensate_params(material)
    closed = gp_deviation.deviation_closed(a, d, params.mu)
    numeric = gp_deviation.deviation_numeric(a, d, params.mu)
    v = dev.get("v")
    if v is None:
        Ic = device.get("Ic")
        if Ic is None:
            raise ConfigError("deviation needs deviation.v or device.Ic for the wavelength bound")
        current = 2.0 * Ic if device["kind"] == "dc" else device.get("Idc", Ic)
        v = drift_velocity(current, material, geometry)
    bound = gp_deviation.deviation_bound(closed, v, args.strictness)
    temps = dev.get("temperatures")
    sweep = gp_deviation.deviation_vs_temperature(material, a, d, temps)
    report = {
        "a": a, "d": d, "T": material.T,
        "mu": params.mu, "gc": params.gc, "gc_units": "estimate (not J m^3)", "N0": params.N0,
        "dr_z_closed": closed, "dr_z_numeric": numeric, "drift_velocity": v,
        "wavelength": CONSTANTS.hbar / (CONSTANTS.m * v),
        "bound": bound.as_dict(),
        "temperature_sweep": [{"T": T, "mu": mu, "dr_z": dr}
                              for T, mu, dr in zip(sweep["T"], sweep["mu"], sweep["dr_z"])],
    }
    _emit(_json_text(report), _out(args, cfg))


def cmd_validate(args, cfg) -> None:
    device = cfg["device"]
    section = cfg.get("validate", {})
    a = args.a if args.a is not None else section.get("a", 0.0)
    omega = args.omega if args.omega is not None else section.get("omega", 0.0)
    report = {"a": a, "omega": omega, "verdicts": []}
    if device["kind"] == "dc":
        verdicts = dc_squid.validity_report(build_dc(device), a, args.strictness)
    else:
        config = build_rf(device)
        geometry, material = _optional_parts(device)
        verdicts = rf_squid.bandwidth_limit(config, omega, geometry, material, args.strictness)
    report["verdicts"] = [dict(v.as_dict(), ratio=_finite(v.ratio)) for v in verdicts]
    report["all_pass"] = all(v.ok for v in verdicts)
    _emit(_json_text(report), _out(args, cfg))


HANDLERS = {
    "dc-sweep": cmd_dc_sweep, "rf-sweep": cmd_rf_sweep, "rf-sim": cmd_rf_sim,
    "invert": cmd_invert, "deviation": cmd_deviation, "validate": cmd_validate,
}


def _strictness(text: str) -> float:
    value = float(text)
    if not 0.0 < value <= 1.0:
        raise argparse.ArgumentTypeError("strictness must lie in (0, 1]")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="squidaccel",
                                     description="SQUID accelerometer sweeps, simulation and readout inversion")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", required=True, help="JSON run configuration")
        p.add_argument("--out", help="output path (default: output.path or stdout)")
        p.add_argument("--strictness", type=_strictness, default=DEFAULT_STRICTNESS,
                       help="ratio below which a '<<' condition passes (default 0.1)")
        if name in ("rf-sweep", "invert"):
            p.add_argument("--hertz", action="store_true",
                           help="write frequencies in Hz instead of rad/s")
        if name == "rf-sim":
            p.add_argument("--summary", help="path of the JSON summary")
        if name == "invert":
            p.add_argument("--voltage", help="CSV with columns t, V")
        if name == "validate":
            p.add_argument("--a", type=float, help="acceleration [m/s^2]")
            p.add_argument("--omega", type=float, help="angular frequency [rad/s]")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config)
        HANDLERS[args.command](args, cfg)
    except (ConfigError, ConfigurationError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    except SquidError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
