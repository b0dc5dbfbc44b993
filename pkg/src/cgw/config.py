"""Runtime configuration: quadrature targets, ladders, thresholds."""
from __future__ import annotations

import dataclasses
import json
from dataclasses import dataclass, field
from pathlib import Path


@dataclass(frozen=True)
class QuadConfig:
    """Contour-integration controls."""

    tol: float = 1e-9            # relative target per contour integral
    min_level: int = 1           # first rule size: 16*2^level Jacobi points
    max_level: int = 6           # doubling stops here
    loop_points: int = 48        # Gauss points per loop leg at level 1
    loop_radius_frac: float = 0.1  # loop radius = frac * local gap
    reality_rel: float = 1e-8    # |Im F| <= rel*|F| + abs
    reality_abs: float = 1e-12

    def __post_init__(self):
        if self.tol <= 0 or self.loop_radius_frac <= 0:
            raise ValueError("tolerances must be positive")


@dataclass(frozen=True)
class LadderConfig:
    """Collapse-ladder and series-fit controls."""

    delta0_frac: float = 0.1     # first separation = frac * local gap
    count: int = 7               # rungs delta0 * 2^-k, k = 0..count-1
    shrink: float = 2.0
    residual_tol: float = 1e-6   # relative fit residual for acceptance
    stability_tol: float = 1e-4  # leading coefficient drift between windows

    def deltas(self, gap: float):
        d0 = self.delta0_frac * gap
        return [d0 * self.shrink ** (-k) for k in range(self.count)]


@dataclass(frozen=True)
class FDConfig:
    """Finite-difference steps for the PDE residuals."""

    h_frac: float = 1e-2         # step = frac * min gap; Richardson refines
    richardson: bool = True


@dataclass(frozen=True)
class RunConfig:
    quad: QuadConfig = field(default_factory=QuadConfig)
    ladder: LadderConfig = field(default_factory=LadderConfig)
    fd: FDConfig = field(default_factory=FDConfig)
    zero_coef_rel: float = 1e-6      # scale-relative "coefficient is zero" band
    indeterminate_factor: float = 10.0
    near_singular_det: float = 1e-8  # refuse the meander solve below this
    seed: int = 0
    output_format: str = "json"      # json | csv

    def __post_init__(self):
        if self.output_format not in ("json", "csv"):
            raise ValueError("output_format must be json or csv")


def _from_dict(cls, data: dict):
    names = {f.name for f in dataclasses.fields(cls)}
    unknown = set(data) - names
    if unknown:
        raise ValueError(f"unknown config keys: {sorted(unknown)}")
    kwargs = {}
    for f in dataclasses.fields(cls):
        if f.name not in data:
            continue
        val = data[f.name]
        if dataclasses.is_dataclass(f.type) or f.name in ("quad", "ladder", "fd"):
            val = _from_dict({"quad": QuadConfig, "ladder": LadderConfig,
                              "fd": FDConfig}[f.name], val)
        kwargs[f.name] = val
    return cls(**kwargs)


def load_config(path) -> RunConfig:
    """RunConfig from a JSON or TOML file (decided by suffix)."""
    p = Path(path)
    text = p.read_text()
    if p.suffix == ".toml":
        try:
            import tomllib  # py >= 3.11
        except ImportError:
            import tomli as tomllib
        data = tomllib.loads(text)
    else:
        data = json.loads(text)
    return _from_dict(RunConfig, data)
