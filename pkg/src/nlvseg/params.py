"""Run configuration: the single table of default parameters and its parser.

Config files are flat UTF-8 ``key = value`` lines. ``#`` starts a comment.
Unknown keys are rejected and missing keys fall back to the defaults below.
"""
from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass, field, fields
from pathlib import Path
from typing import Optional


class ConfigError(ValueError):
    """Raised for malformed config lines, unknown keys or out-of-range values."""


@dataclass(frozen=True)
class FlowParams:
    smoothness_weight: float = 15.0
    iterations: int = 100
    pyramid_levels: int = 3

    def __post_init__(self):
        if not self.smoothness_weight > 0:
            raise ConfigError("flow_smoothness must be > 0")
        if self.iterations < 1:
            raise ConfigError("flow_iterations must be >= 1")
        if self.pyramid_levels < 1:
            raise ConfigError("flow_pyramid_levels must be >= 1")


# (low, high, low_inclusive, high_inclusive); None means unbounded.
_RANGES = {
    "rho": (0.0, 1.0, False, False),
    "lambda_m": (0.0, None, False, False),
    "lambda_theta": (0.0, None, False, False),
    "boundary_threshold": (0.0, 1.0, False, False),
    "F": (1, None, True, False),
    "beta": (0.0, 1.0, True, True),
    "alpha": (0.0, None, False, False),
    "gamma1": (0.0, None, True, False),
    "gamma2": (0.0, None, True, False),
    "eta": (0.0, None, True, False),
    "sigma_l_scale": (0.0, None, False, False),
    "gmm_components": (1, None, True, False),
    "superpixels_per_frame": (1, None, True, False),
    "slic_compactness": (0.0, None, False, False),
    "slic_iterations": (1, None, True, False),
    "outer_iterations": (1, None, True, False),
    "ann_max_leaf_visits": (1, None, True, False),
    "flow_smoothness": (0.0, None, False, False),
    "flow_iterations": (1, None, True, False),
    "flow_pyramid_levels": (1, None, True, False),
}


def _describe(lo, hi, lo_inc, hi_inc):
    left = "[" if lo_inc else "("
    right = "]" if hi_inc else ")"
    hi_s = "inf" if hi is None else hi
    return f"{left}{lo}, {hi_s}{right}"


@dataclass(frozen=True)
class PipelineParams:
    """Every tunable of the segmentation pipeline.

    ``rho``, ``boundary_threshold`` and ``F`` follow the method's published
    values. The rest are calibrated defaults for desk-scale sequences.
    ``superpixels_per_frame=None`` picks 100 below 200x200 px and 1500 above.
    """

    rho: float = 0.5
    lambda_m: float = 2.0
    lambda_theta: float = 2.0
    boundary_threshold: float = 0.5
    F: int = 5
    beta: float = 0.7
    alpha: float = 5.0
    gamma1: float = 2.0
    gamma2: float = 2.0
    eta: float = 1.0
    sigma_l_scale: float = 0.2
    gmm_components: int = 5
    superpixels_per_frame: Optional[int] = None
    slic_compactness: float = 10.0
    slic_iterations: int = 10
    outer_iterations: int = 4
    random_seed: int = 42
    ann_exact: bool = True
    ann_max_leaf_visits: int = 64
    flow_smoothness: float = 15.0
    flow_iterations: int = 100
    flow_pyramid_levels: int = 3

    def __post_init__(self):
        for key, (lo, hi, lo_inc, hi_inc) in _RANGES.items():
            value = getattr(self, key)
            if value is None:
                continue
            ok = math.isfinite(value)
            if ok and lo is not None:
                ok = value >= lo if lo_inc else value > lo
            if ok and hi is not None:
                ok = value <= hi if hi_inc else value < hi
            if not ok:
                raise ConfigError(
                    f"{key} = {value} out of range; legal range is {_describe(lo, hi, lo_inc, hi_inc)}"
                )

    @property
    def flow(self) -> FlowParams:
        return FlowParams(self.flow_smoothness, self.flow_iterations, self.flow_pyramid_levels)

    def superpixel_count(self, width: int, height: int) -> int:
        if self.superpixels_per_frame is not None:
            return self.superpixels_per_frame
        return 100 if width * height < 200 * 200 else 1500

    def replace(self, **changes) -> "PipelineParams":
        return dataclasses.replace(self, **changes)

    def as_dict(self) -> dict:
        return dataclasses.asdict(self)


DEFAULTS = PipelineParams()


def _coerce(key: str, raw: str, target_type):
    raw = raw.strip()
    try:
        if key == "superpixels_per_frame" and raw.lower() in ("auto", "none", ""):
            return None
        if target_type is bool:
            low = raw.lower()
            if low in ("1", "true", "yes", "on"):
                return True
            if low in ("0", "false", "no", "off"):
                return False
            raise ValueError(raw)
        if target_type is int:
            return int(raw)
        return float(raw)
    except ValueError:
        raise ConfigError(f"{key}: cannot parse {raw!r} as {target_type.__name__}") from None


def _field_types() -> dict:
    types = {}
    for f in fields(PipelineParams):
        default = f.default
        if f.name == "superpixels_per_frame":
            types[f.name] = int
        else:
            types[f.name] = type(default)
    return types


def parse_config(text: str, base: PipelineParams = DEFAULTS) -> PipelineParams:
    types = _field_types()
    overrides = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {line!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        if key not in types:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        overrides[key] = _coerce(key, value, types[key])
    return base.replace(**overrides)


def load_config(path) -> PipelineParams:
    return parse_config(Path(path).read_text(encoding="utf-8"))
