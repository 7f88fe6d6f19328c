"""Run configuration: seeds, detector model, grids and tolerance overrides.

A plain ``key = value`` text file (``#`` comments allowed) can override
any default; command-line flags override the file.  The file is located
through ``--config`` or the ``NCPOT_CONFIG`` environment variable.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field, replace
from pathlib import Path

from . import linalg
from .errors import InvalidState
from .simulator import DetectorModel
from .wigner import DEFAULT_N_TRUNC, GridSpec

ENV_VAR = "NCPOT_CONFIG"

_TOLERANCE_KEYS = ("hermiticity_tol", "trace_tol", "psd_tol")


@dataclass(frozen=True)
class RunConfig:
    seed: int = 12345
    detector: DetectorModel = field(default_factory=DetectorModel)
    grid: GridSpec = field(default_factory=GridSpec)
    n_trunc: int = DEFAULT_N_TRUNC
    output_dir: str = "."
    tolerances: dict = field(default_factory=dict)

    def as_items(self) -> list[tuple[str, object]]:
        """Flat key/value view, the same keys the config file accepts."""
        items = [
            ("seed", self.seed),
            ("output_dir", self.output_dir),
            ("efficiency_a", self.detector.efficiency_a),
            ("efficiency_b", self.detector.efficiency_b),
            ("efficiency_c", self.detector.efficiency_c),
            ("pair_rate_hz", self.detector.pair_rate_hz),
            ("dark_coincidence_hz", self.detector.dark_coincidence_hz),
            ("grid_lo", self.grid.lo),
            ("grid_hi", self.grid.hi),
            ("grid_points", self.grid.n),
            ("n_trunc", self.n_trunc),
        ]
        for key in _TOLERANCE_KEYS:
            items.append((key, self.tolerances.get(key, getattr(linalg, key.upper()))))
        return items


def _coerce(key: str, raw: str):
    if key in ("seed", "grid_points", "n_trunc"):
        return int(raw)
    if key == "output_dir":
        return raw
    return float(raw)


def load_config_file(path) -> dict:
    """Parse a key-value config file into typed overrides."""
    overrides = {}
    for lineno, line in enumerate(Path(path).read_text().splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise InvalidState(f"{path}:{lineno}: expected 'key = value'")
        key, _, raw = line.partition("=")
        key = key.strip()
        raw = raw.strip()
        try:
            overrides[key] = _coerce(key, raw)
        except ValueError as exc:
            raise InvalidState(f"{path}:{lineno}: bad value for {key}: {raw}") from exc
    return overrides


def build_config(config_path=None, **flag_overrides) -> RunConfig:
    """Defaults, overlaid by the config file, overlaid by explicit flags."""
    overrides: dict = {}
    path = config_path or os.environ.get(ENV_VAR)
    if path:
        overrides.update(load_config_file(path))
    overrides.update({k: v for k, v in flag_overrides.items() if v is not None})

    cfg = RunConfig()
    det = cfg.detector
    det_kwargs = {}
    for key in ("efficiency_a", "efficiency_b", "efficiency_c", "pair_rate_hz", "dark_coincidence_hz"):
        if key in overrides:
            det_kwargs[key] = overrides[key]
    if det_kwargs:
        det = replace(det, **det_kwargs)
    grid = cfg.grid
    grid_kwargs = {}
    for key, attr in (("grid_lo", "lo"), ("grid_hi", "hi"), ("grid_points", "n")):
        if key in overrides:
            grid_kwargs[attr] = overrides[key]
    if grid_kwargs:
        grid = replace(grid, **grid_kwargs)
    tolerances = {k: overrides[k] for k in _TOLERANCE_KEYS if k in overrides}

    known = {
        "seed",
        "output_dir",
        "n_trunc",
        "efficiency_a",
        "efficiency_b",
        "efficiency_c",
        "pair_rate_hz",
        "dark_coincidence_hz",
        "grid_lo",
        "grid_hi",
        "grid_points",
        *_TOLERANCE_KEYS,
    }
    unknown = set(overrides) - known
    if unknown:
        raise InvalidState(f"unknown config keys: {sorted(unknown)}")

    return RunConfig(
        seed=int(overrides.get("seed", cfg.seed)),
        detector=det,
        grid=grid,
        n_trunc=int(overrides.get("n_trunc", cfg.n_trunc)),
        output_dir=str(overrides.get("output_dir", cfg.output_dir)),
        tolerances=tolerances,
    )


def apply_tolerances(cfg: RunConfig) -> None:
    """Install tolerance overrides as the module constants they shadow."""
    for key, value in cfg.tolerances.items():
        setattr(linalg, key.upper(), float(value))
