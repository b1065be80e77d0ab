"""Deterministic seeded sampling for the verification suites.

One root seed governs a whole run. Each (suite, check) pair gets its own
generator derived by hashing, so adding or reordering checks never
perturbs the samples other checks see.

Continuous carriers are sampled in (rapidity, direction) coordinates:
rapidity uniform on [0, t_max], direction uniform on the circle/sphere.
A fixed 1% slice of each operand stream is forced to the carrier
boundary at distance ``boundary_margin``; distinct operands use distinct
index strides so the forced points of two operands never coincide.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass

import numpy as np

from .errors import SamplingError

DEFAULT_T_MAX = 3.0
FORCED_STRIDE = 100  # every 100th sample of an operand stream is a boundary point


@dataclass(frozen=True)
class ToleranceConfig:
    abs_tol: float = 1e-9
    rel_tol: float = 1e-9
    boundary_margin: float = 1e-6

    def __post_init__(self):
        if self.abs_tol < 0 or self.rel_tol < 0 or self.boundary_margin < 0:
            raise ValueError("tolerances must be nonnegative")
        if self.boundary_margin >= 1:
            raise ValueError("boundary_margin must be < 1 for ball carriers")

    def to_dict(self):
        return {
            "abs_tol": self.abs_tol,
            "rel_tol": self.rel_tol,
            "boundary_margin": self.boundary_margin,
        }


def derive_seed(root_seed: int, suite: str, check: str) -> int:
    digest = hashlib.sha256(f"{root_seed}|{suite}|{check}".encode()).digest()
    return int.from_bytes(digest[:8], "little")


class Sampler:
    """Root-seeded factory of per-check random generators."""

    def __init__(self, seed: int = 42):
        self.seed = int(seed)

    def stream(self, suite: str, check: str) -> np.random.Generator:
        return np.random.default_rng(derive_seed(self.seed, suite, check))


def directions(gen: np.random.Generator, n: int, dim: int) -> np.ndarray:
    if dim == 2:
        theta = gen.uniform(0.0, 2.0 * np.pi, n)
        return np.stack([np.cos(theta), np.sin(theta)], axis=1)
    v = gen.normal(size=(n, dim))
    norm = np.linalg.norm(v, axis=1, keepdims=True)
    # resample the (measure-zero) degenerate draws rather than dividing by ~0
    bad = norm[:, 0] < 1e-12
    while bad.any():
        v[bad] = gen.normal(size=(int(bad.sum()), dim))
        norm = np.linalg.norm(v, axis=1, keepdims=True)
        bad = norm[:, 0] < 1e-12
    return v / norm


def ball_points(
    gen: np.random.Generator,
    n: int,
    dim: int,
    bound: float = 1.0,
    t_max: float = DEFAULT_T_MAX,
    margin: float | None = 1e-6,
    forced_offset: int | None = None,
) -> np.ndarray:
    """Sample n carrier points of a radius-``bound`` ball.

    Radii are tanh of a uniform rapidity. When ``forced_offset`` is given,
    indices forced_offset::100 are placed at Euclidean distance
    bound*margin from the boundary.
    """
    if n < 1:
        raise SamplingError("sample count must be >= 1")
    rho = gen.uniform(0.0, t_max, n)
    r = np.tanh(rho)
    if forced_offset is not None:
        if margin is None or margin <= 0:
            raise SamplingError("boundary forcing requires a positive margin")
        r[forced_offset::FORCED_STRIDE] = 1.0 - margin
    return (bound * r)[:, None] * directions(gen, n, dim)


def sample_operands(
    gen: np.random.Generator,
    n: int,
    dim: int,
    k: int,
    bound: float = 1.0,
    t_max: float = DEFAULT_T_MAX,
    margin: float = 1e-6,
    force_boundary: bool = True,
) -> list:
    """Draw k operand streams of n points each from one generator.

    Operand j gets its forced-boundary points at stride offset j, so no
    sampled tuple has two operands at the boundary simultaneously.
    """
    out = []
    for j in range(k):
        off = j % FORCED_STRIDE if force_boundary else None
        out.append(ball_points(gen, n, dim, bound, t_max, margin, off))
    return out
