"""Run configuration: TOML files, builtin curves and command-line overrides.

Layout::

    [curve]          builtin = "graph_perturbed"   # or mode/param/hypersurface/curve/normal
                     interval = [0.0, 6.28]
                     order = 7
    [tolerances]     kg = 1e-8 ...
    [grid]           kind = "hyperbolic", range = [a, b], samples = 100,
                     theta_range = [a, b], theta_samples = 50
    [output]         csv = "out.csv", obj = "mesh.obj", projection = "auto"

Unknown keys anywhere are rejected before any computation starts.
"""

import hashlib
import json
import sys as _sys
from dataclasses import dataclass, field, fields

if _sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .builtins import get_builtin
from .errors import ConfigError
from .tolerances import DEFAULT, Tolerances

SECTIONS = {
    "curve": {"builtin", "mode", "param", "hypersurface", "curve", "normal", "interval", "order"},
    "tolerances": {f.name for f in fields(Tolerances)},
    "grid": {"kind", "range", "samples", "theta_range", "theta_samples"},
    "output": {"csv", "obj", "projection"},
}
PROJECTIONS = ("auto", "poincare", "drop_x0")
KINDS = ("hyperbolic", "desitter")


@dataclass
class RunConfig:
    defs: dict
    interval: tuple
    order: int = 7
    tol: Tolerances = DEFAULT
    kind: str = "hyperbolic"
    range: tuple = None
    samples: int = 100
    theta_range: tuple = None
    theta_samples: int = 50
    csv: str = None
    obj: str = None
    projection: str = "auto"
    name: str = "custom"
    extra: dict = field(default_factory=dict)

    def compile(self):
        from .frame import compile_system

        return compile_system(self.defs, self.interval, order=self.order, tol=self.tol)

    def digest(self):
        """SHA-256 of everything that determines the computed numbers."""
        payload = {
            "defs": self.defs, "interval": list(self.interval), "order": self.order,
            "tol": {f.name: getattr(self.tol, f.name) for f in fields(Tolerances)},
            "kind": self.kind, "range": self.range and list(self.range),
            "samples": self.samples, "theta_range": self.theta_range and list(self.theta_range),
            "theta_samples": self.theta_samples,
        }
        blob = json.dumps(payload, sort_keys=True, separators=(",", ":")).encode()
        return hashlib.sha256(blob).hexdigest()


def _pair(value, what):
    try:
        a, b = (float(x) for x in value)
    except (TypeError, ValueError):
        raise ConfigError(f"{what} must be two numbers") from None
    if not a < b:
        raise ConfigError(f"{what} must satisfy a < b, got [{a}, {b}]")
    return (a, b)


def _positive_int(value, what, minimum=2):
    if isinstance(value, bool) or not isinstance(value, int) or value < minimum:
        raise ConfigError(f"{what} must be an integer >= {minimum}")
    return value


def _strings(value, what):
    if not isinstance(value, list) or not all(isinstance(x, str) for x in value):
        raise ConfigError(f"{what} must be a list of expression strings")
    return list(value)


def parse_tol_overrides(items):
    """['kg=1e-9', ...] -> {'kg': 1e-9}."""
    out = {}
    known = SECTIONS["tolerances"]
    for item in items or ():
        name, sep, value = item.partition("=")
        name = name.strip()
        if not sep or name not in known:
            raise ConfigError(f"bad --tol {item!r}; names: {', '.join(sorted(known))}")
        try:
            out[name] = float(value)
        except ValueError:
            raise ConfigError(f"--tol {name} needs a number, got {value!r}") from None
    return out


def from_mapping(data, name="custom"):
    if not isinstance(data, dict):
        raise ConfigError("configuration must be a table")
    for key, value in data.items():
        if key not in SECTIONS:
            raise ConfigError(f"unknown section [{key}]")
        if not isinstance(value, dict):
            raise ConfigError(f"[{key}] must be a table")
        bad = set(value) - SECTIONS[key]
        if bad:
            raise ConfigError(f"unknown key(s) in [{key}]: {', '.join(sorted(bad))}")

    curve = dict(data.get("curve", {}))
    base = None
    if "builtin" in curve:
        try:
            base = get_builtin(curve.pop("builtin"))
        except KeyError as e:
            raise ConfigError(str(e.args[0])) from None
        name = base.name
        defs = dict(base.defs)
        interval = base.interval
        kind = base.kind
    else:
        defs, interval, kind = {}, None, "hyperbolic"
    for key in ("mode", "param"):
        if key in curve:
            defs[key] = str(curve[key])
    for key in ("hypersurface", "curve", "normal"):
        if key in curve:
            defs[key] = _strings(curve[key], f"curve.{key}")
    if "interval" in curve:
        interval = _pair(curve["interval"], "curve.interval")
    if not defs.get("curve"):
        raise ConfigError("no curve given: set [curve] builtin or curve expressions")
    if interval is None:
        raise ConfigError("curve.interval is required")
    order = curve.get("order", 7)
    if isinstance(order, bool) or not isinstance(order, int) or order < 6:
        raise ConfigError("curve.order must be an integer >= 6")

    try:
        tol = DEFAULT.with_overrides(**data.get("tolerances", {}))
    except (TypeError, ValueError) as e:
        raise ConfigError(f"bad tolerance value: {e}") from None

    grid = data.get("grid", {})
    kind = grid.get("kind", kind)
    if kind not in KINDS:
        raise ConfigError(f"grid.kind must be one of {KINDS}")
    out = data.get("output", {})
    projection = out.get("projection", "auto")
    if projection not in PROJECTIONS:
        raise ConfigError(f"output.projection must be one of {PROJECTIONS}")
    return RunConfig(
        defs=defs, interval=interval, order=order, tol=tol, kind=kind,
        range=_pair(grid["range"], "grid.range") if "range" in grid else None,
        samples=_positive_int(grid.get("samples", 100), "grid.samples", 1),
        theta_range=(_pair(grid["theta_range"], "grid.theta_range")
                     if "theta_range" in grid else None),
        theta_samples=_positive_int(grid.get("theta_samples", 50), "grid.theta_samples"),
        csv=out.get("csv"), obj=out.get("obj"), projection=projection, name=name,
    )


def load(path):
    try:
        with open(path, "rb") as fh:
            data = tomllib.load(fh)
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}") from None
    except OSError as e:
        raise ConfigError(f"cannot read {path}: {e.strerror}") from None
    except tomllib.TOMLDecodeError as e:
        raise ConfigError(f"invalid TOML in {path}: {e}") from None
    return from_mapping(data, name=str(path))


def builtin_config(name):
    return from_mapping({"curve": {"builtin": name}})


def builtin_toml(name):
    """A TOML document reproducing a builtin curve without the builtin key."""
    b = get_builtin(name)
    lines = ["[curve]", f'mode = "{b.defs.get("mode", "embedded")}"']
    for key in ("hypersurface", "curve", "normal"):
        if key in b.defs:
            lines.append(f"{key} = [" + ", ".join(json.dumps(e) for e in b.defs[key]) + "]")
    lines.append(f"interval = [{b.interval[0]!r}, {b.interval[1]!r}]")
    lines += ["", "[grid]", f'kind = "{b.kind}"', "samples = 100"]
    return "\n".join(lines) + "\n"
