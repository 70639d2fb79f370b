"""Run configuration: INI-style ``key = value`` entries within named sections.

Every key has a default, so an empty file is the reference configuration
(Rb-87, n = 1.51, theta_i = theta_c + 0.01, 6 mm drop, delta1 = 100 Gamma,
b = 0.5). Unknown sections or keys are rejected.
"""
from __future__ import annotations

import configparser
import hashlib
import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

from . import budget as bd
from . import mirror as md
from .core import builtin_rb87, g, h
from .montecarlo import Binning, MolassesConfig
from .optics import InterfaceGeometry

_NONE = object()

# section -> key -> (type, default); default _NONE means optional/unset
SCHEMA = {
    "species": {"name": (str, "rb87")},
    "geometry": {
        "n": (float, 1.51),
        "theta_offset": (float, 0.01),
        "theta_i": (float, _NONE),
        "lambda0": (float, 780e-9),
    },
    "mirror": {
        "u0_over_impact": (float, 2.0),
        "detuning_gamma": (float, 100.0),
        "branching_b": (float, 0.5),
        "pump_rate0": (float, _NONE),
        "gravity": (bool, False),
        "edge_level": (float, 1e-7),
    },
    "molasses": {
        "sigma_z": (float, 0.2e-3),
        "temperature": (float, 10e-6),
        "sigma_v": (float, _NONE),
        "drop_height": (float, 6e-3),
        "n_atoms": (int, 1_000_000),
    },
    "binning": {"n_z": (int, 256), "n_v": (int, 65)},
    "budget": {
        "delta1_ghz": (float, 100.0),
        "u1_ref_mhz": (float, 12.0),
        "impurity_eps": (float, 1e-3),
        "line_strength_d2_over_d1": (float, 2.0),
        "crosstalk_delta1_ghz": (float, 0.6),
        "scan_min_ghz": (float, 50.0),
        "scan_max_ghz": (float, 500.0),
        "scan_points": (int, 46),
    },
    "field": {
        "crossing_angle_deg": (float, 90.0),
        "extent_lambda": (float, 2.0),
        "points": (int, 41),
        "polarizations": (str, "TE,TE"),
    },
    "run": {"seed": (int, 0), "threads": (int, 1)},
}


class ConfigError(ValueError):
    pass


def _convert(section, key, text, lineno=None):
    kind, _ = SCHEMA[section][key]
    where = f"{section}.{key}" + (f" (line {lineno})" if lineno else "")
    try:
        if kind is bool:
            low = text.strip().lower()
            if low in ("1", "true", "yes", "on"):
                return True
            if low in ("0", "false", "no", "off"):
                return False
            raise ValueError(text)
        if kind is int:
            return int(text.strip())
        if kind is float:
            return float(text.strip())
        return text.strip()
    except ValueError:
        raise ConfigError(f"{where}: cannot parse {text!r} as {kind.__name__}") from None


def _key_lines(text):
    """Line numbers of ``key = value`` entries, for error messages."""
    lines, section = {}, None
    for i, line in enumerate(text.splitlines(), 1):
        s = line.strip()
        if s.startswith("[") and s.endswith("]"):
            section = s[1:-1].strip()
        elif section and "=" in s and not s.startswith(("#", ";")):
            lines[(section, s.split("=", 1)[0].strip().lower())] = i
    return lines


@dataclass
class RunConfig:
    values: dict

    def __getitem__(self, item):
        return self.values[item]

    @property
    def seed(self) -> int:
        return self.values["run"]["seed"]

    @property
    def threads(self) -> int:
        return self.values["run"]["threads"]

    def canonical(self) -> str:
        return json.dumps(self.values, sort_keys=True, separators=(",", ":"))

    def config_hash(self) -> str:
        return hashlib.sha256(self.canonical().encode()).hexdigest()

    # -- builders (validated at load time) --

    def species(self):
        name = self.values["species"]["name"].lower()
        if name not in ("rb87", "rb-87", "87rb"):
            raise ConfigError(f"species.name: unknown species {name!r} (only rb87 is built in)")
        return builtin_rb87()

    def geometry(self) -> InterfaceGeometry:
        gv = self.values["geometry"]
        theta = gv.get("theta_i")
        if theta is None:
            theta = math.asin(1 / gv["n"]) + gv["theta_offset"] if gv["n"] > 1 else gv["theta_offset"]
        return InterfaceGeometry(gv["n"], theta, gv["lambda0"])

    def impact_energy(self) -> float:
        return self.species().mass * g * self.values["molasses"]["drop_height"]

    def mirror(self) -> md.MirrorConfig:
        mv = self.values["mirror"]
        sp = self.species()
        return md.MirrorConfig(sp, self.geometry(), mv["u0_over_impact"] * self.impact_energy(),
                               mv["detuning_gamma"] * sp.gamma, mv["branching_b"], mv.get("pump_rate0"))

    def molasses(self) -> MolassesConfig:
        mv = self.values["molasses"]
        return MolassesConfig(mv["sigma_z"], mv["temperature"], mv.get("sigma_v"), mv["drop_height"],
                              mv["n_atoms"], self.seed)

    def binning(self) -> Binning:
        bv = self.values["binning"]
        if bv["n_z"] < 3 or bv["n_v"] < 1:
            raise ConfigError("binning: need n_z >= 3 and n_v >= 1")
        return Binning(bv["n_z"], bv["n_v"])

    def bounce_options(self) -> md.BounceOptions:
        return md.BounceOptions(gravity=self.values["mirror"]["gravity"])

    def budget_input(self) -> bd.BudgetInput:
        b = self.values["budget"]
        return bd.BudgetInput(self.species(), 2 * math.pi * b["delta1_ghz"] * 1e9, h * b["u1_ref_mhz"] * 1e6,
                              b["impurity_eps"], b["line_strength_d2_over_d1"],
                              2 * math.pi * b["crosstalk_delta1_ghz"] * 1e9)

    def field_settings(self):
        f = self.values["field"]
        pols = tuple(p.strip().upper() for p in f["polarizations"].split(","))
        if len(pols) != 2 or any(p not in ("TE", "TM") for p in pols):
            raise ConfigError("field.polarizations must be two of TE/TM, e.g. 'TE,TE'")
        if f["points"] < 2 or not f["extent_lambda"] > 0:
            raise ConfigError("field: need points >= 2 and extent_lambda > 0")
        return math.radians(f["crossing_angle_deg"]), f["extent_lambda"], f["points"], pols

    def validate(self):
        checks = [("species", self.species), ("geometry", self.geometry), ("mirror", self.mirror),
                  ("molasses", self.molasses), ("binning", self.binning), ("budget", self.budget_input),
                  ("field", self.field_settings)]
        for section, build in checks:
            try:
                build()
            except ConfigError:
                raise
            except ValueError as exc:
                raise ConfigError(f"{section}: {exc}") from None
        if self.values["molasses"]["drop_height"] <= md.entry_edge(self.mirror(), self.values["mirror"]["edge_level"]):
            raise ConfigError("molasses: drop_height must lie above the evanescent region")
        if self.threads < 0:
            raise ConfigError("run.threads must be >= 0")
        if not 0 <= self.seed < 2 ** 64:
            raise ConfigError("run.seed must be a 64-bit unsigned integer")
        return self


def parse_config_text(text: str, overrides: Optional[dict] = None) -> RunConfig:
    parser = configparser.ConfigParser(interpolation=None, strict=True)
    try:
        parser.read_string(text)
    except configparser.Error as exc:
        lineno = getattr(exc, "lineno", None)
        if lineno is None and getattr(exc, "errors", None):
            lineno = exc.errors[0][0]
        raise ConfigError(f"parse error at line {lineno}: {exc.message.splitlines()[0]}") from None
    lines = _key_lines(text)
    values = {s: {k: d for k, (_, d) in keys.items() if d is not _NONE} for s, keys in SCHEMA.items()}
    for section in parser.sections():
        if section not in SCHEMA:
            raise ConfigError(f"unknown section [{section}]")
        for key, raw in parser.items(section):
            if key not in SCHEMA[section]:
                raise ConfigError(f"unknown key {section}.{key} (line {lines.get((section, key))})")
            values[section][key] = _convert(section, key, raw, lines.get((section, key)))
    for dotted, raw in (overrides or {}).items():
        section, _, key = dotted.partition(".")
        if section not in SCHEMA or key not in SCHEMA[section]:
            raise ConfigError(f"unknown override key {dotted!r}")
        values[section][key] = _convert(section, key, str(raw))
    return RunConfig(values).validate()


def parse_config(path=None, overrides: Optional[dict] = None) -> RunConfig:
    text = "" if path is None else Path(path).read_text()
    return parse_config_text(text, overrides)
