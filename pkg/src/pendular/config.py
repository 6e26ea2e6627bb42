"""Run-configuration files: sectioned key-value format, strict parsing.

Sections and keys (all optional unless noted):

    [run]       schema_version (required, = 1), initial_label
    [molecule]  preset | file | inline keys (name, B_x_MHz, B_y_MHz,
                B_z_MHz, mu_D, alpha_xx_A3, alpha_yy_A3, alpha_zz_A3)
    [block]     M (required), k_parity, sigmaZ_parity (M=0 only)
    [dc]        Es_Vcm (required), mode, ramp_rate_Vcm_ns
    [pulse]     I0_Wcm2, tau_ns, t_start_ns, t_end_ns
    [numerics]  J_max, n_track, sample_count, dt_fs, max_krylov,
                min_krylov, step_error_tol
    [scan]      I_min_Wcm2, I_max_Wcm2, n_points   (spectrum/crossings)
    [sweep]     vary (pulse.tau_ns | dc.Es_Vcm), values (comma list)

Unknown sections or keys are rejected; ``--set section.key=value``
overrides are applied before validation.
"""

from __future__ import annotations

import configparser
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from .basis import SymmetryBlock
from .errors import ConfigError
from .fields import DcSpec, PulseSpec
from .molecule import MoleculeSpec, PRESETS, molecule_from_file
from .propagator import SilControls, default_dt_fs
from .runner import RunConfig
from .spectrum import StateLabel

SCHEMA_VERSION = 1

_KNOWN_KEYS = {
    "run": {"schema_version", "initial_label"},
    "molecule": {
        "preset", "file", "name", "B_x_MHz", "B_y_MHz", "B_z_MHz",
        "mu_D", "alpha_xx_A3", "alpha_yy_A3", "alpha_zz_A3",
    },
    "block": {"M", "k_parity", "sigmaZ_parity"},
    "dc": {"Es_Vcm", "mode", "ramp_rate_Vcm_ns"},
    "pulse": {"I0_Wcm2", "tau_ns", "t_start_ns", "t_end_ns"},
    "numerics": {
        "J_max", "n_track", "sample_count", "dt_fs",
        "max_krylov", "min_krylov", "step_error_tol",
    },
    "scan": {"I_min_Wcm2", "I_max_Wcm2", "n_points"},
    "sweep": {"vary", "values"},
}

_SWEEP_TARGETS = ("pulse.tau_ns", "dc.Es_Vcm")


@dataclass
class ScanRequest:
    """Intensity grid request for spectrum/crossings subcommands."""

    I_min: float = 1e9
    I_max: float = 7e11
    n_points: int = 400

    def __post_init__(self) -> None:
        if not (0.0 < self.I_min < self.I_max):
            raise ConfigError(
                f"[scan] needs 0 < I_min_Wcm2 < I_max_Wcm2, got {self.I_min}, {self.I_max}"
            )
        if self.n_points < 3:
            raise ConfigError(f"[scan] n_points must be >= 3, got {self.n_points}")


@dataclass
class SweepRequest:
    """One-parameter sweep request."""

    vary: str
    values: tuple[float, ...]

    def __post_init__(self) -> None:
        if self.vary not in _SWEEP_TARGETS:
            raise ConfigError(f"[sweep] vary must be one of {_SWEEP_TARGETS}, got {self.vary!r}")
        if not self.values:
            raise ConfigError("[sweep] values must be a non-empty comma-separated list")


@dataclass
class LoadedConfig:
    """Validated configuration bundle for the CLI subcommands."""

    run_config: RunConfig
    scan: ScanRequest
    sweep: Optional[SweepRequest]
    source_path: str
    effective: dict[str, dict[str, str]] = field(default_factory=dict)

    def sweep_configs(self) -> list[RunConfig]:
        if self.sweep is None:
            raise ConfigError("config has no [sweep] section")
        out = []
        base = self.run_config
        for value in self.sweep.values:
            if self.sweep.vary == "pulse.tau_ns":
                pulse = PulseSpec(base.pulse.I0, value, t_end_ns=base.pulse.t_end_ns)
                out.append(_replace_run(base, pulse=pulse))
            else:
                dc = DcSpec(value, mode=base.dc.mode, ramp_rate=base.dc.ramp_rate)
                out.append(_replace_run(base, dc=dc))
        return out

    def write_effective(self, path) -> None:
        lines = []
        for section, keys in self.effective.items():
            lines.append(f"[{section}]")
            lines += [f"{k} = {v}" for k, v in keys.items()]
            lines.append("")
        Path(path).write_text("\n".join(lines))


def _replace_run(base: RunConfig, **kw) -> RunConfig:
    args = dict(
        molecule=base.molecule, block=base.block, initial_label=base.initial_label,
        dc=base.dc, pulse=base.pulse, J_max=base.J_max, sil=base.sil,
        n_track=base.n_track, sample_count=base.sample_count,
    )
    args.update(kw)
    return RunConfig(**args)


def _getter(section: dict[str, str], section_name: str):
    def get(key: str, conv, default=None, required: bool = False):
        if key not in section:
            if required:
                raise ConfigError(f"missing required key {key!r} in section [{section_name}]")
            return default
        raw = section[key]
        try:
            return conv(raw)
        except (TypeError, ValueError):
            raise ConfigError(
                f"[{section_name}] {key} = {raw!r}: expected {conv.__name__}"
            ) from None

    return get


def _parse_molecule(section: dict[str, str]) -> MoleculeSpec:
    get = _getter(section, "molecule")
    preset = get("preset", str)
    path = get("file", str)
    inline = set(section) - {"preset", "file"}
    provided = sum([preset is not None, path is not None, bool(inline)])
    if provided != 1:
        raise ConfigError(
            "[molecule] must provide exactly one of: preset, file, or the inline keys"
        )
    if preset is not None:
        try:
            return PRESETS[preset.lower()]
        except KeyError:
            raise ConfigError(
                f"unknown molecule preset {preset!r}; available: {sorted(PRESETS)}"
            ) from None
    if path is not None:
        try:
            return molecule_from_file(path)
        except OSError:
            raise
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
    try:
        return MoleculeSpec(
            name=get("name", str, required=True),
            B_x=get("B_x_MHz", float, required=True),
            B_y=get("B_y_MHz", float, required=True),
            B_z=get("B_z_MHz", float, required=True),
            mu=get("mu_D", float, required=True),
            alpha_xx=get("alpha_xx_A3", float, required=True),
            alpha_yy=get("alpha_yy_A3", float, required=True),
            alpha_zz=get("alpha_zz_A3", float, required=True),
        )
    except ValueError as exc:
        raise ConfigError(f"[molecule] {exc}") from None


def parse_config(path, overrides: Optional[list[str]] = None) -> LoadedConfig:
    """Parse and validate a config file, applying ``section.key=value`` overrides."""
    parser = configparser.ConfigParser(interpolation=None)
    parser.optionxform = str  # keys are case-sensitive (M, Es_Vcm, J_max, ...)
    text = Path(path).read_text()  # OSError propagates as an I/O failure
    try:
        parser.read_string(text, source=str(path))
    except configparser.Error as exc:
        raise ConfigError(f"cannot parse {path}: {exc}") from None

    data: dict[str, dict[str, str]] = {
        s: dict(parser.items(s)) for s in parser.sections()
    }
    for item in overrides or []:
        if "=" not in item or "." not in item.split("=", 1)[0]:
            raise ConfigError(f"override {item!r} must look like section.key=value")
        target, value = item.split("=", 1)
        section, key = target.split(".", 1)
        data.setdefault(section.strip(), {})[key.strip()] = value.strip()

    for section, keys in data.items():
        if section not in _KNOWN_KEYS:
            raise ConfigError(f"unknown section [{section}] in {path}")
        unknown = set(keys) - _KNOWN_KEYS[section]
        if unknown:
            raise ConfigError(
                f"unknown key(s) {sorted(unknown)} in section [{section}] of {path}"
            )

    get_run = _getter(data.get("run", {}), "run")
    version = get_run("schema_version", int, required=True)
    if version != SCHEMA_VERSION:
        raise ConfigError(f"unsupported schema_version {version}, expected {SCHEMA_VERSION}")

    if "molecule" not in data:
        raise ConfigError("missing required section [molecule]")
    molecule = _parse_molecule(data["molecule"])

    get_blk = _getter(data.get("block", {}), "block")
    if "block" not in data:
        raise ConfigError("missing required section [block]")
    M = get_blk("M", int, required=True)
    k_parity = get_blk("k_parity", str, "even")
    sigma = get_blk("sigmaZ_parity", str)
    try:
        block = SymmetryBlock(M, k_parity, sigma if M == 0 else None)
        if M == 0 and sigma is None:
            raise ConfigError("[block] M=0 requires sigmaZ_parity")
    except ValueError as exc:
        raise ConfigError(f"[block] {exc}") from None

    get_dc = _getter(data.get("dc", {}), "dc")
    if "dc" not in data:
        raise ConfigError("missing required section [dc]")
    try:
        dc = DcSpec(
            Es_max=get_dc("Es_Vcm", float, required=True),
            mode=get_dc("mode", str, "instantaneous"),
            ramp_rate=get_dc("ramp_rate_Vcm_ns", float, 10.0),
        )
    except ValueError as exc:
        raise ConfigError(f"[dc] {exc}") from None

    get_p = _getter(data.get("pulse", {}), "pulse")
    try:
        kwargs = {}
        if get_p("t_start_ns", float) is not None:
            kwargs["t_start_ns"] = get_p("t_start_ns", float)
        pulse = PulseSpec(
            I0=get_p("I0_Wcm2", float, 7e11),
            tau_ns=get_p("tau_ns", float, 1.0),
            t_end_ns=get_p("t_end_ns", float, 0.0),
            **kwargs,
        )
    except ValueError as exc:
        raise ConfigError(f"[pulse] {exc}") from None

    get_n = _getter(data.get("numerics", {}), "numerics")
    j_max = get_n("J_max", int, 30)
    n_track = get_n("n_track", int, 12)
    sample_count = get_n("sample_count", int, 600)
    dt_fs = get_n("dt_fs", float)
    sil = None
    if any(k in data.get("numerics", {}) for k in
           ("dt_fs", "max_krylov", "min_krylov", "step_error_tol")):
        try:
            sil = SilControls(
                dt_fs=dt_fs if dt_fs is not None else default_dt_fs(pulse.tau_ns),
                max_krylov=get_n("max_krylov", int, 25),
                min_krylov=get_n("min_krylov", int, 4),
                step_error_tol=get_n("step_error_tol", float, 1e-9),
            )
        except ValueError as exc:
            raise ConfigError(f"[numerics] {exc}") from None

    label_text = get_run("initial_label", str)
    if label_text is None:
        label_text = f"{M}_0_{M}_M{M}" if M > 0 else "0_0_0_M0"
    try:
        initial = StateLabel.parse(label_text)
    except ValueError as exc:
        raise ConfigError(f"[run] initial_label: {exc}") from None

    try:
        run_config = RunConfig(
            molecule=molecule, block=block, initial_label=initial,
            dc=dc, pulse=pulse, J_max=j_max, sil=sil,
            n_track=n_track, sample_count=sample_count,
        )
    except ConfigError:
        raise
    except ValueError as exc:
        raise ConfigError(str(exc)) from None

    get_s = _getter(data.get("scan", {}), "scan")
    scan = ScanRequest(
        I_min=get_s("I_min_Wcm2", float, 1e9),
        I_max=get_s("I_max_Wcm2", float, 7e11),
        n_points=get_s("n_points", int, 400),
    )

    sweep_req = None
    if "sweep" in data:
        get_w = _getter(data["sweep"], "sweep")
        raw_values = get_w("values", str, required=True)
        try:
            values = tuple(float(v) for v in raw_values.split(",") if v.strip())
        except ValueError:
            raise ConfigError(f"[sweep] values: cannot parse {raw_values!r}") from None
        sweep_req = SweepRequest(vary=get_w("vary", str, required=True), values=values)

    effective = {
        "run": {"schema_version": str(SCHEMA_VERSION), "initial_label": str(initial)},
        "molecule": {
            "name": molecule.name,
            "B_x_MHz": repr(molecule.B_x), "B_y_MHz": repr(molecule.B_y),
            "B_z_MHz": repr(molecule.B_z), "mu_D": repr(molecule.mu),
            "alpha_xx_A3": repr(molecule.alpha_xx),
            "alpha_yy_A3": repr(molecule.alpha_yy),
            "alpha_zz_A3": repr(molecule.alpha_zz),
        },
        "block": {"M": str(block.M), "k_parity": block.k_parity,
                  **({"sigmaZ_parity": block.sigmaZ_parity} if block.M == 0 else {})},
        "dc": {"Es_Vcm": repr(dc.Es_max), "mode": dc.mode,
               "ramp_rate_Vcm_ns": repr(dc.ramp_rate)},
        "pulse": {"I0_Wcm2": repr(pulse.I0), "tau_ns": repr(pulse.tau_ns),
                  "t_start_ns": repr(pulse.t_start_ns), "t_end_ns": repr(pulse.t_end_ns)},
        "numerics": {
            "J_max": str(j_max), "n_track": str(n_track),
            "sample_count": str(sample_count),
            "dt_fs": repr(run_config.controls().dt_fs),
            "max_krylov": str(run_config.controls().max_krylov),
            "min_krylov": str(run_config.controls().min_krylov),
            "step_error_tol": repr(run_config.controls().step_error_tol),
        },
        "scan": {"I_min_Wcm2": repr(scan.I_min), "I_max_Wcm2": repr(scan.I_max),
                 "n_points": str(scan.n_points)},
    }
    if sweep_req is not None:
        effective["sweep"] = {
            "vary": sweep_req.vary,
            "values": ", ".join(repr(v) for v in sweep_req.values),
        }

    return LoadedConfig(
        run_config=run_config, scan=scan, sweep=sweep_req,
        source_path=str(path), effective=effective,
    )
