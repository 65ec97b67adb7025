"""TOML documents for system specifications.

A document holds the scalar system fields, an optional ``prefix`` array of
levels and a ``tail`` table::

    name = "custom"
    separation = "OSC"

    [[prefix]]
    ratios = [[0.5, 2]]            # (ratio, multiplicity)

    [tail]
    kind = "periodic"
    levels = [{ log_groups = [[-1.0986122886681098, 2]] }]

Levels are written back with ``log_groups`` (exact log-ratios), and analytic
levels as ``{ family = "geometric", log_scale = ..., decay = ... }``.  Tail
kinds are ``periodic``, ``rule`` (``name`` plus a ``params`` table) and
``truncated`` (``base`` document plus ``plan`` table).
"""

from __future__ import annotations

import hashlib
import math

import tomli
import tomli_w

from .infinite import TruncationPlan
from .system import AnalyticFamily, LevelSpec, Periodic, Rule, SystemSpec, Truncated

_INT64_MAX = 2 ** 63 - 1
_SPEC_KEYS = {"name", "ambient_diameter", "distortion_constant", "separation",
              "gap_fraction", "dimension", "prefix", "tail"}


class SpecFormatError(ValueError):
    pass


def _mult_out(m: int):
    return m if m <= _INT64_MAX else str(m)


def _mult_in(m) -> int:
    if isinstance(m, str):
        if not m.isdigit():
            raise SpecFormatError(f"multiplicity {m!r} is not an integer")
        return int(m)
    if isinstance(m, bool) or not isinstance(m, int):
        raise SpecFormatError(f"multiplicity {m!r} is not an integer")
    return m


def level_to_dict(level: LevelSpec) -> dict:
    if level.family is not None:
        f = level.family
        out = {"family": f.kind, "log_scale": f.log_scale, "decay": f.decay}
    else:
        out = {"log_groups": [[lr, _mult_out(m)] for lr, m in level.groups]}
    if level.truncated:
        out["truncated"] = True
    return out


def level_from_dict(d: dict) -> LevelSpec:
    unknown = set(d) - {"family", "log_scale", "decay", "scale", "log_groups", "ratios",
                        "truncated"}
    if unknown:
        raise SpecFormatError(f"unknown level keys: {sorted(unknown)}")
    truncated = bool(d.get("truncated", False))
    if "family" in d:
        if "log_scale" in d:
            log_scale = float(d["log_scale"])
        elif "scale" in d:
            log_scale = math.log(float(d["scale"]))
        else:
            raise SpecFormatError("analytic level needs log_scale or scale")
        return LevelSpec(family=AnalyticFamily(d["family"], log_scale, float(d["decay"])),
                         truncated=truncated)
    if "log_groups" in d:
        groups = tuple((float(lr), _mult_in(m)) for lr, m in d["log_groups"])
        return LevelSpec(groups=groups, truncated=truncated)
    if "ratios" in d:
        return LevelSpec.from_ratios([(float(r), _mult_in(m)) for r, m in d["ratios"]],
                                     truncated=truncated)
    raise SpecFormatError("level needs log_groups, ratios or family")


def plan_to_dict(plan: TruncationPlan) -> dict:
    out = {"blocks": [[n, d] for n, d in plan.blocks], "t_values": list(plan.t_values),
           "provenance": plan.provenance.value,
           "distortion_constant": plan.distortion_constant, "dimension": plan.dimension}
    if plan.prune is not None:
        out["prune"] = list(plan.prune)
    return out


def plan_from_dict(d: dict) -> TruncationPlan:
    return TruncationPlan(blocks=tuple(tuple(b) for b in d["blocks"]),
                          t_values=tuple(d.get("t_values", ())),
                          provenance=d.get("provenance", "coverage-rule"),
                          prune=tuple(d["prune"]) if "prune" in d else None,
                          distortion_constant=float(d.get("distortion_constant", 1.0)),
                          dimension=int(d.get("dimension", 1)))


def spec_to_dict(spec: SystemSpec) -> dict:
    out = {"name": spec.name, "ambient_diameter": spec.ambient_diameter,
           "distortion_constant": spec.distortion_constant,
           "separation": spec.separation.value, "dimension": spec.dimension}
    if spec.gap_fraction is not None:
        out["gap_fraction"] = spec.gap_fraction
    if spec.prefix:
        out["prefix"] = [level_to_dict(lv) for lv in spec.prefix]
    tail = spec.tail
    if isinstance(tail, Periodic):
        out["tail"] = {"kind": "periodic", "levels": [level_to_dict(lv) for lv in tail.levels]}
    elif isinstance(tail, Rule):
        out["tail"] = {"kind": "rule", "name": tail.name, "params": dict(tail.params)}
    elif isinstance(tail, Truncated):
        out["tail"] = {"kind": "truncated", "base": spec_to_dict(tail.base),
                       "plan": plan_to_dict(tail.plan)}
    return out


def spec_from_dict(d: dict) -> SystemSpec:
    unknown = set(d) - _SPEC_KEYS
    if unknown:
        raise SpecFormatError(f"unknown system keys: {sorted(unknown)}")
    tail = None
    if "tail" in d:
        t = d["tail"]
        kind = t.get("kind")
        if kind == "periodic":
            tail = Periodic(tuple(level_from_dict(lv) for lv in t["levels"]))
        elif kind == "rule":
            tail = Rule(t["name"], t.get("params", {}))
        elif kind == "truncated":
            tail = Truncated(spec_from_dict(t["base"]), plan_from_dict(t["plan"]))
        else:
            raise SpecFormatError(f"unknown tail kind {kind!r}")
    return SystemSpec(prefix=tuple(level_from_dict(lv) for lv in d.get("prefix", ())),
                      tail=tail, ambient_diameter=float(d.get("ambient_diameter", 1.0)),
                      distortion_constant=float(d.get("distortion_constant", 1.0)),
                      separation=d.get("separation", "SSC"),
                      gap_fraction=d.get("gap_fraction"),
                      dimension=int(d.get("dimension", 1)), name=d.get("name", ""))


def dumps_spec(spec: SystemSpec) -> str:
    return tomli_w.dumps(spec_to_dict(spec))


def loads_spec(text: str) -> SystemSpec:
    try:
        data = tomli.loads(text)
    except tomli.TOMLDecodeError as exc:
        raise SpecFormatError(f"system document: {exc}") from None
    try:
        return spec_from_dict(data)
    except (KeyError, TypeError) as exc:
        raise SpecFormatError(f"malformed system document: {exc!r}") from None


def spec_hash(spec: SystemSpec) -> str:
    """sha256 of the canonical TOML document."""
    return hashlib.sha256(dumps_spec(spec).encode()).hexdigest()
