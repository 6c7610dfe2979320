"""Cell layout, terminal placement and large-scale fading snapshots.

Cells are flat-top hexagons of circumradius ``cell_radius``.  The centre
cell sits at the origin and, for seven cells, one ring of neighbours
surrounds it.  There is no wraparound: outer cells only act as interferers
for the centre cell.

All fading quantities are linear and normalised to unit noise power.
"""
from __future__ import annotations

from dataclasses import dataclass, fields
from pathlib import Path

import numpy as np
import yaml

from .errors import DegeneratePlacement, InvalidConfig, UnsupportedLayout

SQRT3 = np.sqrt(3.0)

Seed = int | np.random.SeedSequence

# config-file key -> SystemConfig field
CONFIG_KEYS = {
    "cells": "cells",
    "antennas": "antennas",
    "terminals": "terminals",
    "coherence_length": "coherence_length",
    "cell_radius_m": "cell_radius",
    "exclusion_radius_m": "exclusion_radius",
    "shadow_std_db": "shadow_std_db",
    "pathloss_exponent": "pathloss_exponent",
}


@dataclass(frozen=True)
class SystemConfig:
    """Static scenario parameters.

    Defaults reproduce the seven-cell evaluation scenario: 100 antennas,
    10 terminals per cell, coherence length 200, 1 km cells with a 200 m
    exclusion zone, 8 dB shadowing and pathloss exponent 3.8.
    """

    cells: int = 7
    antennas: int = 100
    terminals: int = 10
    coherence_length: int = 200
    cell_radius: float = 1000.0
    exclusion_radius: float = 200.0
    shadow_std_db: float = 8.0
    pathloss_exponent: float = 3.8

    def __post_init__(self):
        L, N, K, T = self.cells, self.antennas, self.terminals, self.coherence_length
        for name in ("cells", "antennas", "terminals", "coherence_length"):
            value = getattr(self, name)
            if isinstance(value, bool) or int(value) != value:
                raise InvalidConfig(f"{name} must be an integer, got {value!r}")
        if L < 1:
            raise InvalidConfig(f"need at least one cell, got {L}")
        if not (N > K >= 1):
            raise InvalidConfig(f"need antennas > terminals >= 1, got N={N}, K={K}")
        if not K < T:
            raise InvalidConfig(f"need terminals < coherence_length, got K={K}, T={T}")
        if not self.exclusion_radius > 0:
            raise InvalidConfig("exclusion_radius must be positive")
        if not self.cell_radius > self.exclusion_radius:
            raise InvalidConfig("cell_radius must exceed exclusion_radius")
        if not self.pathloss_exponent > 0:
            raise InvalidConfig("pathloss_exponent must be positive")
        if not self.shadow_std_db >= 0:
            raise InvalidConfig("shadow_std_db must be non-negative")

    # short aliases matching the usual notation
    @property
    def L(self) -> int:
        return self.cells

    @property
    def N(self) -> int:
        return self.antennas

    @property
    def K(self) -> int:
        return self.terminals

    @property
    def T(self) -> int:
        return self.coherence_length

    def replace(self, **changes) -> "SystemConfig":
        values = {f.name: getattr(self, f.name) for f in fields(self)}
        values.update(changes)
        return SystemConfig(**values)


def load_config(path: str | Path) -> tuple[SystemConfig, int | None]:
    """Read a YAML (or JSON) config file.

    Returns the config and the ``seed`` entry (``None`` when absent).
    Unknown keys are rejected so that typos do not silently fall back to
    defaults.
    """
    try:
        with open(path) as fh:
            raw = yaml.safe_load(fh)
    except OSError as exc:
        raise InvalidConfig(f"cannot read config {path}: {exc}") from exc
    except yaml.YAMLError as exc:
        raise InvalidConfig(f"malformed config {path}: {exc}") from exc
    if raw is None:
        raw = {}
    if not isinstance(raw, dict):
        raise InvalidConfig(f"config {path} must be a mapping")
    unknown = set(raw) - set(CONFIG_KEYS) - {"seed"}
    if unknown:
        raise InvalidConfig(f"unknown config keys: {sorted(unknown)}")
    kwargs = {CONFIG_KEYS[k]: v for k, v in raw.items() if k in CONFIG_KEYS}
    try:
        config = SystemConfig(**kwargs)
    except TypeError as exc:
        raise InvalidConfig(str(exc)) from exc
    seed = raw.get("seed")
    if seed is not None and (isinstance(seed, bool) or not isinstance(seed, int) or seed < 0):
        raise InvalidConfig(f"seed must be a non-negative integer, got {seed!r}")
    return config, seed


@dataclass(frozen=True)
class TerminalPlacement:
    """Terminal coordinates, shape (L, K, 2), plus the BS sites, shape (L, 2)."""

    positions: np.ndarray
    base_stations: np.ndarray


@dataclass(frozen=True)
class FadingSnapshot:
    """Large-scale fading ``beta[l, i, k]``: BS ``l`` to terminal ``k`` of cell ``i``."""

    beta: np.ndarray

    def __post_init__(self):
        beta = np.asarray(self.beta, dtype=float)
        if beta.ndim != 3 or beta.shape[0] != beta.shape[1]:
            raise ValueError(f"beta must have shape (L, L, K), got {beta.shape}")
        if not (np.all(np.isfinite(beta)) and np.all(beta > 0)):
            raise ValueError("beta entries must be finite and strictly positive")
        object.__setattr__(self, "beta", beta)

    @property
    def cells(self) -> int:
        return self.beta.shape[0]

    @property
    def terminals(self) -> int:
        return self.beta.shape[2]


def seed_sequence(seed: Seed) -> np.random.SeedSequence:
    if isinstance(seed, np.random.SeedSequence):
        return seed
    return np.random.SeedSequence(int(seed))


def substream(seed: Seed, *keys: int) -> np.random.SeedSequence:
    """Child sequence addressed by ``keys``.

    Unlike ``SeedSequence.spawn`` this keeps no counter, so the same
    (seed, keys) always names the same stream.
    """
    parent = seed_sequence(seed)
    return np.random.SeedSequence(parent.entropy, spawn_key=tuple(parent.spawn_key) + tuple(int(k) for k in keys))


def hexagonal_layout(L: int, r_c: float) -> np.ndarray:
    """BS coordinates for ``L`` flat-top hexagonal cells of radius ``r_c``.

    Only a single cell or a centre cell with one full ring (L = 7) is
    supported.  Neighbours sit at distance ``sqrt(3) * r_c`` at angles
    30 + 60 j degrees.
    """
    if L == 1:
        return np.zeros((1, 2))
    if L == 7:
        angles = np.deg2rad(30.0 + 60.0 * np.arange(6))
        ring = SQRT3 * r_c * np.column_stack([np.cos(angles), np.sin(angles)])
        return np.vstack([np.zeros((1, 2)), ring])
    raise UnsupportedLayout(f"hexagonal layout supports L in {{1, 7}}, got {L}")


def in_hexagon(offsets: np.ndarray, r_c: float) -> np.ndarray:
    """Membership test for a flat-top hexagon centred at the origin."""
    x = np.abs(offsets[..., 0])
    y = np.abs(offsets[..., 1])
    return (y <= SQRT3 / 2 * r_c) & (SQRT3 * x + y <= SQRT3 * r_c)


def sample_cell_offsets(rng: np.random.Generator, n: int, r_c: float, r_h: float) -> np.ndarray:
    """Uniform points in {hexagon} minus {disc of radius r_h}, by rejection."""
    out = np.empty((0, 2))
    half_height = SQRT3 / 2 * r_c
    while len(out) < n:
        # box acceptance is ~0.7 for the default geometry
        m = max(16, int(1.3 * (n - len(out))))
        cand = np.column_stack([rng.uniform(-r_c, r_c, m), rng.uniform(-half_height, half_height, m)])
        keep = in_hexagon(cand, r_c) & (np.hypot(cand[:, 0], cand[:, 1]) >= r_h)
        out = np.vstack([out, cand[keep]])
    return out[:n]


def place_terminals(config: SystemConfig, seed: Seed) -> TerminalPlacement:
    """Drop K terminals uniformly in every cell, outside the exclusion disc."""
    bs = hexagonal_layout(config.cells, config.cell_radius)
    rng = np.random.default_rng(seed_sequence(seed))
    offsets = sample_cell_offsets(rng, config.cells * config.terminals, config.cell_radius, config.exclusion_radius)
    positions = offsets.reshape(config.cells, config.terminals, 2) + bs[:, None, :]
    return TerminalPlacement(positions=positions, base_stations=bs)


def distances(placement: TerminalPlacement) -> np.ndarray:
    """``r[l, i, k]``: distance from BS ``l`` to terminal ``k`` of cell ``i``."""
    diff = placement.positions[None, :, :, :] - placement.base_stations[:, None, None, :]
    return np.hypot(diff[..., 0], diff[..., 1])


def large_scale_fading(placement: TerminalPlacement, config: SystemConfig, seed: Seed) -> FadingSnapshot:
    """beta = z / (r / r_h)^nu with 10 log10(z) ~ N(0, shadow_std_db^2)."""
    r = distances(placement)
    if np.any(r <= 0):
        raise DegeneratePlacement("a terminal coincides with a base station")
    rng = np.random.default_rng(seed_sequence(seed))
    shadow_db = config.shadow_std_db * rng.standard_normal(r.shape)
    beta = 10.0 ** (shadow_db / 10.0) / (r / config.exclusion_radius) ** config.pathloss_exponent
    return FadingSnapshot(beta)


def draw_snapshot(config: SystemConfig, seed: Seed) -> FadingSnapshot:
    """Fresh placement and shadowing, each from its own substream of ``seed``."""
    placement = place_terminals(config, substream(seed, 0))
    return large_scale_fading(placement, config, substream(seed, 1))


def draw_snapshots(config: SystemConfig, seed: Seed, count: int) -> list[FadingSnapshot]:
    """``count`` independent snapshots; snapshot ``j`` only depends on (seed, j)."""
    return [draw_snapshot(config, substream(seed, j)) for j in range(count)]
