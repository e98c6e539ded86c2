"""JSON configuration for the command line front end.

Operator records::

    {"kind": "matrix", "entries": [[2, -1], [-1, 2]], "shift": 0}
    {"kind": "diagonal", "rule": {"name": "affine", "offset": 1, "slope": 1},
     "ess_inf": null, "mixing_seed": null, "tail_power": 1.0}
    {"kind": "dirichlet_laplacian", "length": "pi", "nodes": 255}
    {"kind": "schrodinger_1d", "potential": "harmonic", "half_width": 10, "nodes": 400}

Complex matrix or vector entries are written as ``[re, im]``.  Lengths may be
numbers or the strings ``"pi"``, ``"2*pi"``, ``"pi/2"``.
"""

from dataclasses import dataclass
import json
import math
from pathlib import Path

from .errors import ConfigInvalid
from .forms import (POTENTIALS, CoefficientVector, make_diagonal_operator, make_dirichlet_laplacian,
                    make_matrix_operator, make_schrodinger_1d)

FAMILY_KINDS = ("truncation", "mesh_interpolation", "oracle")


def _require(record, key, where):
    if key not in record:
        raise ConfigInvalid(f"{where}: missing field '{key}'")
    return record[key]


def _number(value, field):
    if isinstance(value, bool):
        raise ConfigInvalid(f"{field} must be a number")
    if isinstance(value, (int, float)):
        return float(value)
    if isinstance(value, str):
        text = value.replace(" ", "")
        try:
            if "pi" in text:
                num, _, den = text.partition("/")
                factor = num.replace("*pi", "").replace("pi", "") or "1"
                return float(factor) * math.pi / (float(den) if den else 1.0)
            return float(text)
        except ValueError:
            pass
    raise ConfigInvalid(f"{field} must be a number, got {value!r}")


def _integer(value, field):
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigInvalid(f"{field} must be an integer, got {value!r}")
    return value


def _complex(value, field):
    if isinstance(value, (list, tuple)):
        if len(value) != 2:
            raise ConfigInvalid(f"{field}: complex entries are written [re, im]")
        return complex(_number(value[0], field), _number(value[1], field))
    return complex(_number(value, field))


def _rule(spec):
    if isinstance(spec, str):
        spec = {"name": spec}
    name = _require(spec, "name", "operator.rule")
    if name == "affine":
        offset = _number(spec.get("offset", 1.0), "rule.offset")
        slope = _number(spec.get("slope", 1.0), "rule.slope")
        return lambda i: offset + slope * i
    if name == "saturating":
        limit = _number(spec.get("limit", 2.0), "rule.limit")
        scale = _number(spec.get("scale", 1.0), "rule.scale")
        return lambda i: limit - scale / (i + 1)
    if name == "list":
        values = [_number(v, "rule.values") for v in _require(spec, "values", "operator.rule")]
        if not values:
            raise ConfigInvalid("rule.values must not be empty")
        slope = _number(spec.get("then_slope", 1.0), "rule.then_slope")
        last = len(values) - 1
        return lambda i: values[i] if i <= last else values[last] + slope * (i - last)
    raise ConfigInvalid(f"operator.rule: unknown rule {name!r}; expected affine, saturating or list")


def build_operator(spec, default_seed=0):
    if not isinstance(spec, dict):
        raise ConfigInvalid("operator must be an object")
    kind = _require(spec, "kind", "operator")
    try:
        if kind == "matrix":
            rows = _require(spec, "entries", "operator")
            entries = [[_complex(x, "operator.entries") for x in row] for row in rows]
            return make_matrix_operator(entries, _number(spec.get("shift", 0.0), "operator.shift"))
        if kind == "diagonal":
            ess = spec.get("ess_inf")
            seed = spec.get("mixing_seed")
            if seed is None and spec.get("mixed", False):
                seed = default_seed
            return make_diagonal_operator(
                _rule(_require(spec, "rule", "operator")),
                None if ess is None else _number(ess, "operator.ess_inf"),
                mixing_seed=seed,
                tail_power=_number(spec.get("tail_power", 1.0), "operator.tail_power"),
                probe=_integer(spec.get("probe", 2000), "operator.probe"))
        if kind == "dirichlet_laplacian":
            return make_dirichlet_laplacian(_number(_require(spec, "length", "operator"), "operator.length"),
                                            _integer(_require(spec, "nodes", "operator"), "operator.nodes"))
        if kind == "schrodinger_1d":
            potential = _require(spec, "potential", "operator")
            if potential not in POTENTIALS:
                raise ConfigInvalid(f"operator.potential must be one of {', '.join(POTENTIALS)}")
            extra = {k: _number(spec[k], f"operator.{k}") for k in ("well_half_width", "well_height")
                     if k in spec}
            return make_schrodinger_1d(potential,
                                       _number(_require(spec, "half_width", "operator"), "operator.half_width"),
                                       _integer(_require(spec, "nodes", "operator"), "operator.nodes"),
                                       **extra)
    except ConfigInvalid:
        raise
    except ValueError as exc:
        raise ConfigInvalid(f"operator: {exc}") from None
    raise ConfigInvalid(f"operator.kind: unknown kind {kind!r}")


def build_family(spec, op, m):
    from .convergence import family_mesh_interpolation, family_oracle, family_truncation
    from .errors import Unsupported

    if isinstance(spec, str):
        spec = {"kind": spec}
    kind = _require(spec, "kind", "family")
    levels = spec.get("levels")
    if levels is not None:
        levels = _integer(levels, "family.levels")
    try:
        if kind == "truncation":
            return family_truncation(op, m)
        if kind == "mesh_interpolation":
            return family_mesh_interpolation(op, m, levels)
        if kind == "oracle":
            return family_oracle(op, m, levels)
    except Unsupported as exc:
        raise ConfigInvalid(f"family '{kind}' does not fit operator '{op.kind}': {exc}") from None
    raise ConfigInvalid(f"family.kind must be one of {', '.join(FAMILY_KINDS)}")


def parse_vector(spec, field="basis"):
    if isinstance(spec, dict):
        coords = _require(spec, "coords", field)
        pairs = []
        for entry in coords:
            if not isinstance(entry, (list, tuple)) or len(entry) not in (2, 3):
                raise ConfigInvalid(f"{field}: coords entries are [index, re] or [index, re, im]")
            im = _number(entry[2], field) if len(entry) == 3 else 0.0
            pairs.append((_integer(entry[0], f"{field} index"), complex(_number(entry[1], field), im)))
        return CoefficientVector.from_pairs(pairs)
    if isinstance(spec, list):
        return CoefficientVector.from_dense([_complex(x, field) for x in spec])
    raise ConfigInvalid(f"{field}: a vector is a list of coordinates or {{\"coords\": ...}}")


@dataclass(frozen=True)
class StudyConfig:
    operator: dict
    family: dict
    m: int
    steps: int
    target_tol: float = 1e-6
    prune_tol: float = 1e-8
    seed: int = 0
    output_path: str = None


def load_json(path):
    try:
        with open(path) as fh:
            return json.load(fh)
    except OSError as exc:
        raise ConfigInvalid(f"cannot read config {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise ConfigInvalid(f"config {path} is not valid JSON: {exc}") from None


def parse_study(data):
    if not isinstance(data, dict):
        raise ConfigInvalid("config must be a JSON object")
    m = _integer(_require(data, "m", "config"), "m")
    if m < 1:
        raise ConfigInvalid("m must be ≥ 1")
    steps = _integer(_require(data, "steps", "config"), "steps")
    if steps < 1:
        raise ConfigInvalid("steps must be ≥ 1")
    target = _number(data.get("target_tol", 1e-6), "target_tol")
    prune = _number(data.get("prune_tol", 1e-8), "prune_tol")
    if not target > 0:
        raise ConfigInvalid("target_tol must be > 0")
    if not prune > 0:
        raise ConfigInvalid("prune_tol must be > 0")
    out = data.get("output_path")
    if out is not None and not isinstance(out, str):
        raise ConfigInvalid("output_path must be a string")
    return StudyConfig(_require(data, "operator", "config"), _require(data, "family", "config"),
                       m, steps, target, prune, _integer(data.get("seed", 0), "seed"), out)


def scenario_dir():
    return Path(__file__).parent / "scenarios"


def scenario_names():
    return sorted(p.stem for p in scenario_dir().glob("*.json"))
