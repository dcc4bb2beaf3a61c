"""
Run configurations: an INI-style ``key = value`` text with one section per
concern. Unknown sections and keys are rejected.

Example::

    [run]
    command = conductivity

    [lattice]
    dimension = 1
    N = 200
    boundary = periodic

    [thermo]
    beta = 10
    mu = 0
    lambda = 0.5
"""

from __future__ import annotations

import configparser
import math
import re
from dataclasses import dataclass, field, replace
from typing import Optional, Tuple

import numpy as np

from .errors import ConfigError
from .lattice import OPEN, LatticeSpec, PotentialSpec, load_potential_table
from .spectral import ThermoParams

COMMANDS = ("ness", "current", "conductivity", "bands", "bloch-conductivity", "solvable", "drude", "sweep")
SWEEP_AXES = ("N", "E", "lambda", "beta", "mu")
FORMATS = ("csv", "json")
LATTICE_COMMANDS = ("ness", "current", "conductivity")
BLOCH_COMMANDS = ("bands", "bloch-conductivity")

SCHEMA = {
    "run": ("command", "format", "out", "threads"),
    "lattice": ("dimension", "N", "boundary"),
    "potential": ("kind", "file", "periods", "values", "seed", "amplitude"),
    "thermo": ("beta", "mu", "lambda", "E"),
    "observable": ("site", "direction", "dE", "convention", "time", "cell_average"),
    "bloch": ("k_points", "curvature"),
    "dispersion": ("kind", "amplitude"),
    "sweep": ("axis", "command", "values", "start", "stop", "step"),
}


@dataclass(frozen=True)
class PotentialConfig:
    """
    Potential as written in the config. ``random`` draws i.i.d. uniform values on
    ``[-amplitude, amplitude]`` from a stream keyed by ``seed`` and the site, so
    boxes of different size share their common sites.
    """

    kind: str = "zero"
    file: Optional[str] = None
    periods: Optional[Tuple[int, ...]] = None
    values: Optional[Tuple[float, ...]] = None
    seed: int = 0
    amplitude: float = 1.0

    def build(self, lattice: Optional[LatticeSpec] = None) -> PotentialSpec:
        if self.kind == "zero":
            return PotentialSpec.zero()
        if self.kind == "periodic":
            return PotentialSpec.periodic(self.periods, self.values)
        if self.kind == "table":
            return load_potential_table(self.file)
        if self.kind == "random":
            if lattice is None:
                raise ConfigError("a random potential needs a lattice")
            # one stream per site so the value at x does not depend on the box size
            table = {}
            for site in map(tuple, lattice.coords().tolist()):
                key = [self.seed] + [2 * c if c >= 0 else -2 * c - 1 for c in site]
                table[site] = np.random.default_rng(key).uniform(-self.amplitude, self.amplitude)
            return PotentialSpec.from_table(table)
        raise ConfigError(f"potential.kind: unknown kind {self.kind!r}")

    def describe(self) -> str:
        if self.kind == "periodic":
            return f"periodic({'x'.join(map(str, self.periods))}:{' '.join(_fmt(v) for v in self.values)})"
        if self.kind == "table":
            return f"table({self.file})"
        if self.kind == "random":
            return f"random(seed={self.seed},amplitude={_fmt(self.amplitude)})"
        return "zero"


@dataclass(frozen=True)
class ObservableConfig:
    site: Optional[Tuple[int, ...]] = None
    direction: int = 1
    dE: float = 1e-4
    convention: str = "forward"
    time: Optional[float] = None
    cell_average: bool = False


@dataclass(frozen=True)
class BlochConfig:
    k_points: Tuple[int, ...] = (256,)
    curvature: str = "auto"


@dataclass(frozen=True)
class DispersionConfig:
    kind: str = "cosine"
    amplitude: float = 2.0


@dataclass(frozen=True)
class SweepConfig:
    axis: str
    command: str
    values: Tuple[float, ...]


@dataclass(frozen=True)
class RunConfig:
    command: str
    thermo: ThermoParams
    lattice: Optional[LatticeSpec] = None
    potential: PotentialConfig = field(default_factory=PotentialConfig)
    observable: ObservableConfig = field(default_factory=ObservableConfig)
    bloch: BlochConfig = field(default_factory=BlochConfig)
    dispersion: DispersionConfig = field(default_factory=DispersionConfig)
    sweep: Optional[SweepConfig] = None
    format: str = "csv"
    out: Optional[str] = None
    threads: int = 1

    @property
    def target(self) -> str:
        """Command evaluated at each parameter point."""
        return self.sweep.command if self.command == "sweep" else self.command

    def at(self, axis: str, value: float) -> "RunConfig":
        """Copy with one sweep axis set to ``value`` and the command replaced by the sweep target."""
        if axis == "N":
            if int(value) != value or value < 1:
                raise ConfigError(f"sweep: N values must be positive integers, got {value}")
            return replace(self, command=self.target, sweep=None,
                           lattice=replace(self.lattice, half_width=int(value)))
        key = {"lambda": "lam"}.get(axis, axis)
        return replace(self, command=self.target, sweep=None, thermo=self.thermo.replace(**{key: value}))


def _fmt(x) -> str:
    if isinstance(x, float) or isinstance(x, np.floating):
        return "inf" if math.isinf(x) and x > 0 else ("-inf" if math.isinf(x) else repr(float(x)))
    return str(x)


def _line_of(text: str, section: str, key: Optional[str] = None) -> str:
    current = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        m = re.fullmatch(r"\[([^\]]+)\]", line)
        if m:
            current = m.group(1).strip()
            if key is None and current == section:
                return f"line {lineno}"
        elif key is not None and current == section and "=" in line and line.split("=", 1)[0].strip() == key:
            return f"line {lineno}"
    return "config"


class _Reader:
    """Typed access to a parsed section with field-qualified error messages."""

    def __init__(self, parser: configparser.ConfigParser, text: str):
        self.parser = parser
        self.text = text

    def has(self, section: str, key: str) -> bool:
        return self.parser.has_option(section, key)

    def raw(self, section, key, default=None):
        if not self.has(section, key):
            return default
        return self.parser.get(section, key).strip()

    def error(self, section, key, message):
        return ConfigError(f"{_line_of(self.text, section, key)}: {section}.{key}: {message}")

    def convert(self, section, key, conv, default=None):
        value = self.raw(section, key)
        if value is None:
            return default
        try:
            return conv(value)
        except (ValueError, TypeError) as exc:
            raise self.error(section, key, f"cannot parse {value!r} ({exc})") from None

    def real(self, section, key, default=None):
        return self.convert(section, key, _parse_real, default)

    def integer(self, section, key, default=None):
        return self.convert(section, key, int, default)

    def ints(self, section, key, default=None):
        return self.convert(section, key, lambda s: tuple(int(t) for t in s.replace(",", " ").split()), default)

    def reals(self, section, key, default=None):
        return self.convert(section, key, lambda s: tuple(_parse_real(t) for t in s.replace(",", " ").split()),
                            default)

    def choice(self, section, key, options, default=None):
        value = self.raw(section, key, default)
        if value is not None and value not in options:
            raise self.error(section, key, f"expected one of {', '.join(options)}, got {value!r}")
        return value


def _parse_real(s: str) -> float:
    s = s.strip().lower()
    if s in ("inf", "+inf", "infinity"):
        return math.inf
    value = float(s)
    if math.isnan(value):
        raise ValueError("nan is not allowed")
    return value


def _parse_bool(s: str) -> bool:
    s = s.strip().lower()
    if s in ("true", "yes", "1", "on"):
        return True
    if s in ("false", "no", "0", "off"):
        return False
    raise ValueError("expected true or false")


def _required_keys(command: Optional[str]) -> list:
    keys = ["run.command", "thermo.beta", "thermo.mu", "thermo.lambda"]
    if command in LATTICE_COMMANDS:
        keys.append("lattice.N")
    if command in BLOCH_COMMANDS:
        keys += ["potential.kind", "bloch.k_points"]
    if command == "sweep":
        keys += ["sweep.axis", "sweep.command"]
    return keys


def parse_config(text: str, command: Optional[str] = None) -> RunConfig:
    """
    Parse a run configuration.

    ``command`` (from the command line) fills in a missing ``run.command``
    and must agree with it when both are given.
    """
    parser = configparser.ConfigParser(inline_comment_prefixes=("#",), comment_prefixes=("#",),
                                       interpolation=None, empty_lines_in_values=False)
    parser.optionxform = str
    try:
        parser.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(f"malformed config: {exc}") from None
    for section in parser.sections():
        if section not in SCHEMA:
            raise ConfigError(f"{_line_of(text, section)}: unknown section [{section}]")
        for key in parser.options(section):
            if key not in SCHEMA[section]:
                raise ConfigError(f"{_line_of(text, section, key)}: unknown key {section}.{key}; "
                                  f"allowed: {', '.join(SCHEMA[section])}")
    r = _Reader(parser, text)

    file_command = r.choice("run", "command", COMMANDS)
    if command is not None and command not in COMMANDS:
        raise ConfigError(f"unknown command {command!r}; expected one of {', '.join(COMMANDS)}")
    if file_command and command and file_command != command:
        raise r.error("run", "command", f"config says {file_command!r} but the command line says {command!r}")
    command = file_command or command
    missing = [k for k in _required_keys(command) if not r.has(*k.split(".")) and
               not (k == "run.command" and command)]
    if missing:
        raise ConfigError(f"missing required keys: {', '.join(missing)}")

    try:
        thermo = ThermoParams(r.real("thermo", "beta"), r.real("thermo", "mu"),
                              r.real("thermo", "lambda"), r.real("thermo", "E", 0.0))
    except ConfigError as exc:
        raise ConfigError(f"{_line_of(text, 'thermo')}: [thermo]: {exc}") from None

    lattice = None
    if r.has("lattice", "N"):
        try:
            lattice = LatticeSpec(r.integer("lattice", "dimension", 1), r.integer("lattice", "N"),
                                  r.choice("lattice", "boundary", ("open", "periodic"), OPEN))
        except ConfigError as exc:
            raise ConfigError(f"{_line_of(text, 'lattice')}: [lattice]: {exc}") from None

    kind = r.choice("potential", "kind", ("zero", "table", "periodic", "random"), "zero")
    potential = PotentialConfig(kind, r.raw("potential", "file"), r.ints("potential", "periods"),
                                r.reals("potential", "values"), r.integer("potential", "seed", 0),
                                r.real("potential", "amplitude", 1.0))
    if kind == "table" and not potential.file:
        raise r.error("potential", "file", "required for kind = table")
    if kind == "periodic":
        if not potential.periods or not potential.values:
            raise r.error("potential", "periods", "kind = periodic needs periods and values")
        if len(potential.values) != int(np.prod(potential.periods)):
            raise r.error("potential", "values", f"need {int(np.prod(potential.periods))} values, "
                                                 f"got {len(potential.values)}")
        if any(p < 1 for p in potential.periods):
            raise r.error("potential", "periods", "periods must be positive")
    if lattice is not None and kind == "periodic" and len(potential.periods) != lattice.dimension:
        raise r.error("potential", "periods", f"{len(potential.periods)} periods for a {lattice.dimension}D lattice")
    if command in BLOCH_COMMANDS and kind not in ("zero", "periodic"):
        raise r.error("potential", "kind", "band structure needs a zero or periodic potential")

    observable = ObservableConfig(
        r.ints("observable", "site"), r.integer("observable", "direction", 1),
        r.real("observable", "dE", 1e-4), r.choice("observable", "convention", ("forward", "reversed", "literal"),
                                                    "forward"),
        r.real("observable", "time"), r.convert("observable", "cell_average", _parse_bool, False))
    if observable.dE == 0 or not math.isfinite(observable.dE):
        raise r.error("observable", "dE", "must be finite and non-zero")
    if observable.time is not None and not (0 <= observable.time < math.inf):
        raise r.error("observable", "time", "must be finite and non-negative")
    if lattice is not None:
        if not 1 <= observable.direction <= lattice.dimension:
            raise r.error("observable", "direction", f"must be in 1..{lattice.dimension}")
        if observable.site is not None and len(observable.site) != lattice.dimension:
            raise r.error("observable", "site", f"needs {lattice.dimension} coordinates")

    bloch = BlochConfig(r.ints("bloch", "k_points", (256,)),
                        r.choice("bloch", "curvature", ("auto", "fd", "analytic"), "auto"))
    if any(m < 2 for m in bloch.k_points):
        raise r.error("bloch", "k_points", "need at least 2 points per axis")
    if command in BLOCH_COMMANDS and kind == "periodic" and len(bloch.k_points) not in (1, len(potential.periods)):
        raise r.error("bloch", "k_points", f"give 1 or {len(potential.periods)} values")

    dispersion = DispersionConfig(r.choice("dispersion", "kind", ("cosine", "quadratic"), "cosine"),
                                  r.real("dispersion", "amplitude", 2.0))

    sweep = None
    if command == "sweep":
        axis = r.choice("sweep", "axis", SWEEP_AXES)
        inner = r.choice("sweep", "command", tuple(c for c in COMMANDS if c != "sweep"))
        if r.has("sweep", "values"):
            if any(r.has("sweep", k) for k in ("start", "stop", "step")):
                raise r.error("sweep", "values", "give either values or start/stop/step, not both")
            values = r.reals("sweep", "values")
        else:
            start, stop, step = (r.real("sweep", k) for k in ("start", "stop", "step"))
            if None in (start, stop, step):
                raise ConfigError(f"{_line_of(text, 'sweep')}: [sweep]: need values or all of start, stop, step")
            if not all(math.isfinite(v) for v in (start, stop, step)) or step == 0 or (stop - start) / step < 0:
                raise r.error("sweep", "step", f"range {start}..{stop} step {step} is empty or infinite")
            count = int(math.floor((stop - start) / step + 1e-9)) + 1
            values = tuple(start + i * step for i in range(count))
        if not values:
            raise r.error("sweep", "values", "sweep range is empty")
        if axis != "beta" and not all(math.isfinite(v) for v in values):
            raise r.error("sweep", "values", "values must be finite")
        if axis == "N" and lattice is None:
            raise ConfigError("sweep over N needs a [lattice] section")
        if inner in LATTICE_COMMANDS and lattice is None:
            raise ConfigError("missing required keys: lattice.N")
        sweep = SweepConfig(axis, inner, tuple(values))
    elif command in LATTICE_COMMANDS and lattice is None:
        raise ConfigError("missing required keys: lattice.N")

    fmt = r.choice("run", "format", FORMATS, "csv")
    threads = r.integer("run", "threads", 1)
    if threads < 1:
        raise r.error("run", "threads", "must be at least 1")
    return RunConfig(command, thermo, lattice, potential, observable, bloch, dispersion, sweep,
                     fmt, r.raw("run", "out"), threads)


def emit_config(config: RunConfig) -> str:
    """Text that :func:`parse_config` maps back to ``config``."""
    lines = ["[run]", f"command = {config.command}", f"format = {config.format}", f"threads = {config.threads}"]
    if config.out:
        lines.append(f"out = {config.out}")
    if config.lattice is not None:
        lat = config.lattice
        lines += ["", "[lattice]", f"dimension = {lat.dimension}", f"N = {lat.half_width}",
                  f"boundary = {lat.boundary}"]
    pot = config.potential
    lines += ["", "[potential]", f"kind = {pot.kind}", f"seed = {pot.seed}", f"amplitude = {_fmt(pot.amplitude)}"]
    if pot.file:
        lines.append(f"file = {pot.file}")
    if pot.periods:
        lines.append(f"periods = {' '.join(map(str, pot.periods))}")
    if pot.values:
        lines.append(f"values = {' '.join(_fmt(v) for v in pot.values)}")
    th = config.thermo
    lines += ["", "[thermo]", f"beta = {_fmt(float(th.beta))}", f"mu = {_fmt(float(th.mu))}",
              f"lambda = {_fmt(float(th.lam))}", f"E = {_fmt(float(th.E))}"]
    ob = config.observable
    lines += ["", "[observable]", f"direction = {ob.direction}", f"dE = {_fmt(ob.dE)}",
              f"convention = {ob.convention}", f"cell_average = {str(ob.cell_average).lower()}"]
    if ob.site is not None:
        lines.append(f"site = {' '.join(map(str, ob.site))}")
    if ob.time is not None:
        lines.append(f"time = {_fmt(float(ob.time))}")
    lines += ["", "[bloch]", f"k_points = {' '.join(map(str, config.bloch.k_points))}",
              f"curvature = {config.bloch.curvature}"]
    lines += ["", "[dispersion]", f"kind = {config.dispersion.kind}",
              f"amplitude = {_fmt(config.dispersion.amplitude)}"]
    if config.sweep is not None:
        lines += ["", "[sweep]", f"axis = {config.sweep.axis}", f"command = {config.sweep.command}",
                  f"values = {' '.join(_fmt(float(v)) for v in config.sweep.values)}"]
    return "\n".join(lines) + "\n"
