"""Uniform random colorings and the monochromatic-copy count T(H, G).

Colors come from a counter-based pseudorandom function: the color of vertex
``v`` in sample ``stream_index`` is a hash of ``(master_seed, stream_index, v)``.
No generator state is carried between samples, so any partition of the
stream indices across workers reproduces the serial result bit for bit.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .embed import Copy, CopyIndex
from .errors import ValidationError

_MASK64 = (1 << 64) - 1
_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_STREAM_MULT = np.uint64(0xD1B54A32D192ED03)
_VERTEX_MULT = np.uint64(0x8CB92BA72F3D8DD7)


@dataclass(frozen=True)
class SeedSpec:
    master_seed: int
    stream_index: int = 0

    def __post_init__(self):
        if self.stream_index < 0:
            raise ValidationError("stream_index must be nonnegative")


@dataclass(frozen=True)
class Coloring:
    """``colors[v - 1]`` is the color (in ``1..c``) of host vertex ``v``."""

    colors: tuple[int, ...]
    c: int

    def __post_init__(self):
        if self.c < 2:
            raise ValidationError("need at least two colors")
        if any(not 1 <= x <= self.c for x in self.colors):
            raise ValidationError(f"colors must lie in 1..{self.c}")

    def __len__(self) -> int:
        return len(self.colors)

    def __getitem__(self, v: int) -> int:
        return self.colors[v - 1]


def _mix64(z: np.ndarray) -> np.ndarray:
    # SplitMix64 finalizer; uint64 arrays wrap silently
    z = (z ^ (z >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
    return z ^ (z >> np.uint64(31))


def color_matrix(n: int, c: int, master_seed: int, streams) -> np.ndarray:
    """Colors ``0..c-1`` for every stream index in ``streams`` (rows) and vertex ``1..n`` (columns)."""
    if c < 2:
        raise ValidationError("need at least two colors")
    streams = np.asarray(streams, dtype=np.uint64).reshape(-1, 1)
    key = _mix64(np.array([master_seed & _MASK64], dtype=np.uint64) ^ _GOLDEN)
    base = _mix64(key + streams * _STREAM_MULT)
    verts = np.arange(1, n + 1, dtype=np.uint64).reshape(1, -1)
    x = _mix64(base + verts * _VERTEX_MULT)
    # modulo bias is at most c / 2**64
    return (x % np.uint64(c)).astype(np.int16)


def sample_coloring(n: int, c: int, seed: SeedSpec) -> Coloring:
    if c < 2:
        raise ValidationError("need at least two colors")
    row = color_matrix(n, c, seed.master_seed, [seed.stream_index])[0]
    return Coloring(tuple(int(x) + 1 for x in row), c)


def is_monochromatic(copy: Copy, x: Coloring) -> bool:
    first = x[copy.vertices[0]]
    return all(x[v] == first for v in copy.vertices)


def monochromatic_count(idx: CopyIndex, x: Coloring) -> int:
    if len(x) != idx.host.vertex_count:
        raise ValidationError(
            f"coloring has {len(x)} entries, host has {idx.host.vertex_count} vertices"
        )
    return sum(1 for cp in idx.copies if is_monochromatic(cp, x))


def centered_indicator(copy: Copy, x: Coloring, c: int) -> Fraction:
    """Z_s = 1{copy monochromatic} - c^(1-r), exactly."""
    base = Fraction(1, c ** (len(copy) - 1))
    return (1 if is_monochromatic(copy, x) else 0) - base


def monochromatic_counts(idx: CopyIndex, colors: np.ndarray) -> np.ndarray:
    """T for each row of a ``(samples, n)`` color matrix (0-based colors)."""
    cls = idx.classes
    if not len(cls):
        return np.zeros(colors.shape[0], dtype=np.int64)
    verts = np.asarray(cls.sets, dtype=np.int64) - 1
    mult = np.asarray(cls.mult, dtype=np.int64)
    out = np.zeros(colors.shape[0], dtype=np.int64)
    # chunk over classes to bound the (samples, classes, r) temporary
    step = max(1, 4_000_000 // max(1, colors.shape[0] * verts.shape[1]))
    for lo in range(0, len(verts), step):
        sub = colors[:, verts[lo:lo + step]]
        mono = (sub == sub[:, :, :1]).all(axis=2)
        out += mono.astype(np.int64) @ mult[lo:lo + step]
    return out
