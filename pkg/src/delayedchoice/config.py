"""Sectioned key-value experiment files.

Example::

    [experiment]
    scenario = paper_variant
    shots = 100000
    seed = 42

    [atom]
    level = excited_2

    [sweep]
    parameter = phi
    start = 0
    stop = pi
    steps = 9

Angles and other reals accept arithmetic on numbers and ``pi``
(``3*pi/4``).  Unknown sections and keys are rejected.
"""

from __future__ import annotations

import ast
import configparser
import dataclasses
import io
import math
import operator
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Callable

import numpy as np

from .errors import ConfigError
from .experiments import ExperimentConfig


def _real(text: str) -> float:
    """Evaluate a real literal, allowing + - * / ** and the constant ``pi``."""
    ops = {
        ast.Add: operator.add,
        ast.Sub: operator.sub,
        ast.Mult: operator.mul,
        ast.Div: operator.truediv,
        ast.Pow: operator.pow,
        ast.USub: operator.neg,
        ast.UAdd: operator.pos,
    }

    def ev(node):
        if isinstance(node, ast.Expression):
            return ev(node.body)
        if isinstance(node, ast.Constant) and type(node.value) in (int, float):
            return float(node.value)
        if isinstance(node, ast.Name) and node.id == "pi":
            return math.pi
        if isinstance(node, ast.BinOp) and type(node.op) in ops:
            return ops[type(node.op)](ev(node.left), ev(node.right))
        if isinstance(node, ast.UnaryOp) and type(node.op) in ops:
            return ops[type(node.op)](ev(node.operand))
        raise ValueError(f"not a real number: {text!r}")

    try:
        value = ev(ast.parse(text.strip(), mode="eval"))
    except (SyntaxError, ZeroDivisionError, OverflowError):
        raise ValueError(f"not a real number: {text!r}") from None
    if not math.isfinite(value):
        raise ValueError(f"not a finite number: {text!r}")
    return value


def _integer(text: str) -> int:
    try:
        return int(text.strip())
    except ValueError:
        raise ValueError(f"not an integer: {text!r}") from None


def _boolean(text: str) -> bool:
    key = text.strip().lower()
    if key not in configparser.ConfigParser.BOOLEAN_STATES:
        raise ValueError(f"not a boolean: {text!r}")
    return configparser.ConfigParser.BOOLEAN_STATES[key]


def _word(text: str) -> str:
    return text.strip()


# (section, key) -> (parser, ExperimentConfig field or None)
SCHEMA: dict[str, dict[str, tuple[Callable[[str], Any], str | None]]] = {
    "experiment": {
        "scenario": (_word, "scenario"),
        "shots": (_integer, "shots"),
        "seed": (_integer, "seed"),
        "choice_time": (_word, "choice_time"),
    },
    "atom": {"level": (_word, "atom_level")},
    "optics": {
        "phi": (_real, "phi"),
        "interferometer_closed": (_boolean, "interferometer_closed"),
        "input": (_word, "input"),
    },
    "plate": {"kind": (_word, "plate")},
    "screen": {"bins": (_integer, "bins"), "fringe_period": (_real, "fringe_period")},
    "marshall": {"overlap": (_real, "mirror_overlap")},
    "sweep": {
        "parameter": (_word, None),
        "start": (_real, None),
        "stop": (_real, None),
        "steps": (_integer, None),
    },
}

FIELD_KEYS = {
    fld: (section, key)
    for section, keys in SCHEMA.items()
    for key, (_, fld) in keys.items()
    if fld is not None
}

# error prefixes raised by ExperimentConfig -> file location
MESSAGE_KEYS = {
    **FIELD_KEYS,
    "overlap": ("marshall", "overlap"),
    "screen": ("screen", "bins"),
}

SWEEPABLE = {
    "phi": "phi",
    "overlap": "mirror_overlap",
    "shots": "shots",
    "seed": "seed",
    "bins": "bins",
    "fringe_period": "fringe_period",
}
INTEGER_FIELDS = {"shots", "seed", "bins"}


@dataclass(frozen=True)
class Sweep:
    parameter: str
    start: float
    stop: float
    steps: int

    def __post_init__(self):
        if self.parameter not in SWEEPABLE:
            raise ConfigError(f"sweep.parameter: must be one of {sorted(SWEEPABLE)}")
        if self.steps < 1:
            raise ConfigError(f"sweep.steps: must be >= 1, got {self.steps}")

    def values(self) -> np.ndarray:
        return np.linspace(self.start, self.stop, self.steps)


@dataclass(frozen=True)
class ConfigFile:
    """A validated experiment file: one configuration, or a sweep of them."""

    configs: tuple[ExperimentConfig, ...]
    sweep: Sweep | None = None

    @property
    def config(self) -> ExperimentConfig:
        if len(self.configs) != 1 or self.sweep is not None:
            raise ConfigError("file describes a sweep, not a single run")
        return self.configs[0]

    def sweep_values(self) -> list[float]:
        if self.sweep is None:
            return []
        return [float(v) for v in self.sweep.values()]

    def with_overrides(self, **overrides) -> "ConfigFile":
        overrides = {k: v for k, v in overrides.items() if v is not None}
        if not overrides:
            return self
        configs = tuple(dataclasses.replace(c, **overrides) for c in self.configs)
        return ConfigFile(configs, self.sweep)


def _key_lines(text: str) -> dict[tuple[str, str], int]:
    lines = {}
    section = None
    for n, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        m = re.match(r"^\[([^\]]+)\]$", stripped)
        if m:
            section = m.group(1).strip()
            lines.setdefault((section, ""), n)
            continue
        m = re.match(r"^([^=:#;\s][^=:]*?)\s*[=:]", stripped)
        if m and section is not None:
            lines[(section, m.group(1).strip().lower())] = n
    return lines


def _where(lines, section, key):
    n = lines.get((section, key))
    return f" (line {n})" if n else ""


def _read(text: str, source: str) -> configparser.ConfigParser:
    parser = configparser.ConfigParser(
        interpolation=None, inline_comment_prefixes=("#", ";"), default_section="\x00"
    )
    try:
        parser.read_string(text, source=source)
    except configparser.MissingSectionHeaderError as exc:
        raise ConfigError(f"{source}: line {exc.lineno}: key outside any [section]") from None
    except (configparser.DuplicateSectionError, configparser.DuplicateOptionError) as exc:
        raise ConfigError(f"{source}: line {exc.lineno}: {exc}") from None
    except configparser.ParsingError as exc:
        lineno, line = exc.errors[0]
        raise ConfigError(f"{source}: line {lineno}: cannot parse {line!r}") from None
    return parser


def parse_config_text(text: str, source: str = "<config>") -> ConfigFile:
    parser = _read(text, source)
    lines = _key_lines(text)

    values: dict[str, Any] = {}
    sweep_raw: dict[str, Any] = {}
    for section in parser.sections():
        if section not in SCHEMA:
            raise ConfigError(f"{source}: unknown section [{section}]{_where(lines, section, '')}")
        for key, raw in parser.items(section):
            if key not in SCHEMA[section]:
                raise ConfigError(
                    f"{source}: unknown key {section}.{key}{_where(lines, section, key)}"
                )
            convert, fld = SCHEMA[section][key]
            try:
                value = convert(raw)
            except ValueError as exc:
                raise ConfigError(
                    f"{source}: {section}.{key}{_where(lines, section, key)}: {exc}"
                ) from None
            if fld is None:
                sweep_raw[key] = value
            else:
                values[fld] = value

    for required in ("scenario", "shots", "seed"):
        if required not in values:
            raise ConfigError(f"{source}: missing required key experiment.{required}")

    sweep = None
    if parser.has_section("sweep"):
        missing = [k for k in SCHEMA["sweep"] if k not in sweep_raw]
        if missing:
            raise ConfigError(f"{source}: missing required key sweep.{missing[0]}")
        sweep = Sweep(**sweep_raw)

    grid: list[dict[str, Any]]
    if sweep is None:
        grid = [values]
    else:
        fld = SWEEPABLE[sweep.parameter]
        grid = []
        for v in sweep.values():
            v = float(v)
            if fld in INTEGER_FIELDS:
                if v != round(v):
                    raise ConfigError(
                        f"{source}: sweep over {sweep.parameter} produces non-integer value {v}"
                    )
                v = int(round(v))
            grid.append({**values, fld: v})

    configs = []
    for point in grid:
        try:
            configs.append(ExperimentConfig(**point))
        except ConfigError as exc:
            fld, _, detail = str(exc).partition(":")
            section, key = MESSAGE_KEYS.get(fld, (None, None))
            if section is None:
                raise ConfigError(f"{source}: {exc}") from None
            raise ConfigError(
                f"{source}: {section}.{key}{_where(lines, section, key)}:{detail}"
            ) from None
    return ConfigFile(tuple(configs), sweep)


def parse_config(path: str | Path) -> ConfigFile:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except FileNotFoundError:
        raise ConfigError(f"{path}: no such config file") from None
    except OSError as exc:
        raise ConfigError(f"{path}: cannot read config file: {exc.strerror}") from None
    return parse_config_text(text, source=str(path))


def config_sections(config: ExperimentConfig) -> dict[str, dict[str, str]]:
    """Config fields grouped by file section, defaults included, as file text."""
    sections: dict[str, dict[str, str]] = {}
    for fld, (section, key) in FIELD_KEYS.items():
        value = getattr(config, fld)
        if value is None:
            continue
        if hasattr(value, "value"):
            value = value.value
        if isinstance(value, bool):
            text = "true" if value else "false"
        elif isinstance(value, float):
            text = repr(value)
        else:
            text = str(value)
        sections.setdefault(section, {})[key] = text
    return sections


def serialize_config(cfg: ConfigFile | ExperimentConfig) -> str:
    """Inverse of :func:`parse_config_text`."""
    if isinstance(cfg, ExperimentConfig):
        cfg = ConfigFile((cfg,))
    base = cfg.configs[0]
    sections = config_sections(base)
    if cfg.sweep is not None:
        sw = cfg.sweep
        sections["sweep"] = {
            "parameter": sw.parameter,
            "start": repr(float(sw.start)),
            "stop": repr(float(sw.stop)),
            "steps": str(sw.steps),
        }
    buf = io.StringIO()
    for section in SCHEMA:
        if section not in sections:
            continue
        buf.write(f"[{section}]\n")
        for key in SCHEMA[section]:
            if key in sections[section]:
                buf.write(f"{key} = {sections[section][key]}\n")
        buf.write("\n")
    return buf.getvalue()
