"""Run configuration: INI-style files, compiled-in presets, validation."""

from __future__ import annotations

import configparser
import io
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .hamiltonian import DEFAULT_MAX_DIM, AggregateConfig
from .response import FrequencyGrid
from .vibronic import DisplacedOscillatorSpec, MonomerModel, build_model


class ConfigError(ValueError):
    """Raised for unreadable, incomplete or inconsistent run configurations."""


PRESETS: dict[str, dict[str, dict[str, str]]] = {
    # PDI homodimer in the Lambda truncation (unit Franck-Condon overlaps)
    "dimer-pdi": {
        "monomer": {
            "omega_v": "0.16",
            "huang_rhys": "0",
            "omega_00": "2.3",
            "m_g": "1",
            "m_e": "0",
            "fc_override": "1, 1",
        },
        "aggregate": {"n_ground": "1", "coupling": "-0.06", "gamma": "0.01", "gamma_v": "1e-5"},
        "grid": {"start": "1.8", "stop": "2.9", "count": "4001"},
        "output": {"methods": "exact,cpa"},
    },
    "lambda": {
        "monomer": {
            "omega_v": "0.16",
            "huang_rhys": "0",
            "omega_00": "2.3",
            "m_g": "1",
            "m_e": "0",
            "fc_override": "1, 1",
        },
        "aggregate": {"n_ground": "10", "coupling": "-0.006", "gamma": "0.01", "gamma_v": "1e-5"},
        "grid": {"start": "1.8", "stop": "2.9", "count": "4001"},
        "output": {"methods": "exact,cpa,order:1"},
    },
    "fig3-sweep": {
        "monomer": {
            "omega_v": "0.16",
            "huang_rhys": "0.5",
            "omega_00": "2.3",
            "m_g": "4",
            "m_e": "4",
        },
        "aggregate": {"n_ground": "100", "coupling": "0", "gamma": "0.01", "gamma_v": "1e-5"},
        "grid": {"start": "1.5", "stop": "3.58", "count": "4001"},
        "sweep": {"coupling_min": "-3", "coupling_max": "3", "count": "121", "k_max": "0"},
        "output": {"methods": "order:0"},
    },
}

PRESET_HELP = {
    "dimer-pdi": "PDI homodimer: w_e0=2.3, w_g1=0.16, J=-0.06, gamma=0.01, gamma_v=1e-5 eV, unit FC",
    "lambda": "Lambda system (2 ground levels, 1 excited level, unit FC), N=10, NJ=-0.06 eV",
    "fig3-sweep": "S=1/2 displaced oscillator, NJ/w_v from -3 to 3 in 121 steps, zeroth order",
}

_REQUIRED = object()

_SECTIONS = ("monomer", "aggregate", "grid", "sweep", "output", "compute")


@dataclass(frozen=True)
class SweepSettings:
    coupling_min: float
    coupling_max: float
    count: int
    k_max: int | None

    @property
    def axis(self) -> np.ndarray:
        return np.linspace(self.coupling_min, self.coupling_max, self.count)


@dataclass(frozen=True)
class RunConfig:
    model: MonomerModel
    vib_freq: float
    aggregate: AggregateConfig
    grid: FrequencyGrid
    methods: tuple
    sweep: SweepSettings | None
    out: str | None
    preset: str | None
    threads: int
    max_dim: int
    sections: dict

    def to_ini(self) -> str:
        return dump_sections(self.sections)


def dump_sections(sections: dict[str, dict[str, str]]) -> str:
    parser = configparser.ConfigParser()
    for name in _SECTIONS:
        if name in sections:
            parser[name] = dict(sorted(sections[name].items()))
    buf = io.StringIO()
    parser.write(buf)
    return buf.getvalue()


def parse_methods(text: str) -> tuple:
    methods = []
    for tok in (t.strip() for t in text.split(",")):
        if not tok:
            continue
        if tok in ("exact", "cpa"):
            methods.append(tok)
        elif tok.startswith("order:"):
            try:
                k = int(tok.split(":", 1)[1])
            except ValueError:
                raise ConfigError(f"bad truncation order in method {tok!r}") from None
            if k < 0:
                raise ConfigError(f"truncation order must be >= 0 in {tok!r}")
            methods.append(k)
        else:
            raise ConfigError(f"unknown method {tok!r} (use exact, cpa or order:<k>)")
    if not methods:
        raise ConfigError("at least one method is required")
    return tuple(methods)


def parse_grid(text: str) -> dict[str, str]:
    parts = [p.strip() for p in text.split(",")]
    if len(parts) != 3:
        raise ConfigError(f"grid must be 'start,stop,count', got {text!r}")
    return dict(zip(("start", "stop", "count"), parts))


def _floats(text: str, key: str) -> list[float]:
    try:
        return [float(x) for x in text.replace(",", " ").split()]
    except ValueError:
        raise ConfigError(f"{key!r} must be a list of numbers, got {text!r}") from None


def _get(sections, section, key, conv, default=_REQUIRED):
    sec = sections.get(section, {})
    if key not in sec:
        if default is _REQUIRED:
            raise ConfigError(f"missing key {key!r} in [{section}]")
        return default
    try:
        return conv(sec[key])
    except ValueError:
        raise ConfigError(f"invalid value for {key!r} in [{section}]: {sec[key]!r}") from None


def _int(text: str) -> int:
    value = float(text)
    if value != int(value):
        raise ValueError(text)
    return int(value)


def _build_model(sections) -> tuple[MonomerModel, float]:
    omega_v = _get(sections, "monomer", "omega_v", float)
    spec_kw = dict(
        vib_freq=omega_v,
        huang_rhys=_get(sections, "monomer", "huang_rhys", float),
        zero_zero_energy=_get(sections, "monomer", "omega_00", float),
        m_g=_get(sections, "monomer", "m_g", _int),
        m_e=_get(sections, "monomer", "m_e", _int),
    )
    dipole = _get(sections, "monomer", "dipole_mag", float, 1.0)
    try:
        spec = DisplacedOscillatorSpec(**spec_kw)
        model = build_model(spec, dipole)
        ground, excited, fc = model.ground_energies, model.excited_energies, model.fc
        mon = sections.get("monomer", {})
        if "fc_override" in mon:
            vals = _floats(mon["fc_override"], "fc_override")
            if len(vals) != fc.size:
                raise ConfigError(
                    f"'fc_override' needs {fc.size} values ((m_g+1) x (m_e+1), row-major), got {len(vals)}"
                )
            fc = np.array(vals).reshape(fc.shape)
        if "energies_override" in mon:
            text = mon["energies_override"]
            if "|" not in text:
                raise ConfigError("'energies_override' must read 'ground levels | excited levels'")
            g_txt, e_txt = text.split("|", 1)
            ground = _floats(g_txt, "energies_override")
            excited = _floats(e_txt, "energies_override")
            if len(ground) != spec.m_g + 1 or len(excited) != spec.m_e + 1:
                raise ConfigError("'energies_override' level counts must match m_g+1 and m_e+1")
        model = MonomerModel(ground, excited, fc, dipole)
    except ConfigError:
        raise
    except ValueError as exc:
        raise ConfigError(f"[monomer]: {exc}") from None
    return model, omega_v


def build_run_config(sections: dict[str, dict[str, str]], preset: str | None = None) -> RunConfig:
    unknown = set(sections) - set(_SECTIONS)
    if unknown:
        raise ConfigError(f"unknown section(s): {', '.join(sorted(unknown))}")
    model, omega_v = _build_model(sections)
    try:
        aggregate = AggregateConfig(
            n_ground=_get(sections, "aggregate", "n_ground", _int),
            coupling=_get(sections, "aggregate", "coupling", float),
            gamma=_get(sections, "aggregate", "gamma", float),
            gamma_v=_get(sections, "aggregate", "gamma_v", float, 0.0),
        )
    except ConfigError:
        raise
    except ValueError as exc:
        raise ConfigError(f"[aggregate]: {exc}") from None
    w00 = float(model.excited_energies[0])
    try:
        grid = FrequencyGrid(
            _get(sections, "grid", "start", float, w00 - 4 * omega_v),
            _get(sections, "grid", "stop", float, w00 + 4 * omega_v),
            _get(sections, "grid", "count", _int, 4001),
        )
    except ConfigError:
        raise
    except ValueError as exc:
        raise ConfigError(f"[grid]: {exc}") from None
    sweep = None
    if "sweep" in sections:
        k_txt = sections["sweep"].get("k_max", "0")
        sweep = SweepSettings(
            coupling_min=_get(sections, "sweep", "coupling_min", float),
            coupling_max=_get(sections, "sweep", "coupling_max", float),
            count=_get(sections, "sweep", "count", _int),
            k_max=None if k_txt.strip() == "exact" else _get(sections, "sweep", "k_max", _int),
        )
        if sweep.count < 1:
            raise ConfigError("'count' in [sweep] must be >= 1")
    threads = _get(sections, "compute", "threads", _int, 1)
    if threads < 1:
        raise ConfigError("'threads' must be >= 1")
    return RunConfig(
        model=model,
        vib_freq=omega_v,
        aggregate=aggregate,
        grid=grid,
        methods=parse_methods(sections.get("output", {}).get("methods", "exact")),
        sweep=sweep,
        out=sections.get("output", {}).get("path"),
        preset=preset,
        threads=threads,
        max_dim=_get(sections, "compute", "max_dim", _int, DEFAULT_MAX_DIM),
        sections=sections,
    )


def read_sections(path: str | Path) -> dict[str, dict[str, str]]:
    parser = configparser.ConfigParser()
    try:
        with open(path) as fh:
            parser.read_file(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror}") from None
    except configparser.Error as exc:
        raise ConfigError(f"cannot parse config {path}: {exc}") from None
    return {name: dict(parser[name]) for name in parser.sections()}


def apply_override(sections: dict, assignment: str) -> None:
    """Apply ``section.key=value`` in place."""
    if "=" not in assignment or "." not in assignment.split("=", 1)[0]:
        raise ConfigError(f"override must look like section.key=value, got {assignment!r}")
    lhs, value = assignment.split("=", 1)
    section, key = lhs.strip().split(".", 1)
    sections.setdefault(section, {})[key.strip()] = value.strip()


def parse_config(
    path: str | Path | None = None,
    preset: str | None = None,
    overrides: list[str] | None = None,
) -> RunConfig:
    """Load a preset and/or a config file (file keys win), then apply overrides."""
    if path is None and preset is None:
        raise ConfigError("give a config file or a preset")
    sections: dict[str, dict[str, str]] = {}
    if preset is not None:
        if preset not in PRESETS:
            raise ConfigError(f"unknown preset {preset!r}; choose from {', '.join(PRESETS)}")
        sections = {k: dict(v) for k, v in PRESETS[preset].items()}
    if path is not None:
        for name, values in read_sections(path).items():
            sections.setdefault(name, {}).update(values)
    for item in overrides or ():
        apply_override(sections, item)
    return build_run_config(sections, preset)
