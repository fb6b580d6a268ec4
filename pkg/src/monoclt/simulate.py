"""Seeded Monte Carlo for T(H, G): histogram, empirical moments, KS distance to N(0, 1).

Samples are split into fixed blocks of ``BLOCK`` stream indices. Each block
produces an integer histogram of T; histograms are merged in block order and
all statistics are computed from the merged histogram, so the result does not
depend on how many workers processed the blocks.
"""

from __future__ import annotations

import math
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

import numpy as np

from .coloring import color_matrix, monochromatic_counts
from .embed import CopyIndex, Pattern, enumerate_copies
from .errors import UndefinedStatisticError, ValidationError
from .graph import GeneratorSpec, generate
from .moments import expected_T, exact_variance

BLOCK = 4096
SWEEP_POWERS = (2, 4, 6, 8)
_SQRT2 = math.sqrt(2.0)


def normal_cdf(x: float) -> float:
    """Phi(x) through the complementary error function.

    ``erfc`` keeps full relative precision in the lower tail, where
    ``0.5 * (1 + erf(x / sqrt 2))`` would cancel.
    """
    return 0.5 * math.erfc(-x / _SQRT2)


@dataclass(frozen=True)
class SimResult:
    samples: int
    seed: int
    c: int
    exact_mean: Fraction
    exact_sigma: float
    histogram: tuple[tuple[int, int], ...]
    empirical_mean: float
    mean_se: float
    empirical_variance: float
    variance_se: float
    empirical_fourth_moment_Z: float
    fourth_se: float
    ks_distance: float
    z_mean: float = field(default=0.0)
    z_variance: float = field(default=0.0)
    z_mean_se: float = field(default=0.0)
    z_variance_se: float = field(default=0.0)


def _block_histogram(idx: CopyIndex, c: int, seed: int, lo: int, hi: int) -> Counter:
    colors = color_matrix(idx.host.vertex_count, c, seed, np.arange(lo, hi, dtype=np.uint64))
    values, counts = np.unique(monochromatic_counts(idx, colors), return_counts=True)
    return Counter(dict(zip(values.tolist(), counts.tolist())))


def sample_histogram(idx: CopyIndex, c: int, samples: int, seed: int, workers: int = 1) -> dict[int, int]:
    if samples < 1:
        raise ValidationError("samples must be >= 1")
    if c < 2:
        raise ValidationError("need at least two colors")
    blocks = [(lo, min(samples, lo + BLOCK)) for lo in range(0, samples, BLOCK)]
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(lambda b: _block_histogram(idx, c, seed, *b), blocks))
    else:
        parts = [_block_histogram(idx, c, seed, *b) for b in blocks]
    total: Counter = Counter()
    for part in parts:
        total.update(part)
    return dict(sorted(total.items()))


def ks_from_histogram(hist: Mapping[int, int], mean: Fraction | float, sigma: float) -> float:
    """sup_x |F_n(x) - Phi(x)| for the standardized sample; both one-sided gaps at each atom."""
    n = sum(hist.values())
    if n < 1:
        raise ValidationError("empty histogram")
    below = 0
    worst = 0.0
    for t in sorted(hist):
        z = float(t - mean) / sigma
        phi = normal_cdf(z)
        left = below / n
        below += hist[t]
        right = below / n
        worst = max(worst, abs(right - phi), abs(left - phi))
    return min(1.0, worst)


def ks_distance(values: Sequence[float]) -> float:
    """KS distance of already-standardized sample points to Phi."""
    hist = Counter(values)
    return ks_from_histogram(hist, 0.0, 1.0)


def _weighted_moments(xs: np.ndarray, w: np.ndarray, n: int) -> tuple[float, float]:
    """Mean of xs under counts w, and its standard error."""
    mean = float(np.dot(w, xs) / n)
    if n < 2:
        return mean, float("nan")
    var = float(np.dot(w, (xs - mean) ** 2) / (n - 1))
    return mean, math.sqrt(var / n)


def _sigma(idx: CopyIndex, c: int) -> tuple[Fraction, Fraction, float]:
    mean = expected_T(idx, c)
    var = exact_variance(idx, c)
    if var <= 0:
        raise UndefinedStatisticError("Var[T] = 0, Z is undefined")
    return mean, var, math.sqrt(var)


def summarize(hist: Mapping[int, int], mean: Fraction, sigma: float, seed: int, c: int) -> SimResult:
    n = sum(hist.values())
    ts = np.asarray(sorted(hist), dtype=np.float64)
    w = np.asarray([hist[t] for t in sorted(hist)], dtype=np.float64)
    z = np.asarray([float(t - mean) / sigma for t in sorted(hist)])

    t_mean, t_mean_se = _weighted_moments(ts, w, n)
    centered = (ts - t_mean) ** 2
    t_var = float(np.dot(w, centered) / (n - 1)) if n > 1 else float("nan")
    _, t_var_se = _weighted_moments(centered, w, n)
    z_mean, z_mean_se = _weighted_moments(z, w, n)
    z_var, z_var_se = _weighted_moments(z * z, w, n)
    z4, z4_se = _weighted_moments(z**4, w, n)
    return SimResult(
        samples=n,
        seed=seed,
        c=c,
        exact_mean=mean,
        exact_sigma=sigma,
        histogram=tuple((int(t), int(k)) for t, k in sorted(hist.items())),
        empirical_mean=t_mean,
        mean_se=t_mean_se,
        empirical_variance=t_var,
        variance_se=t_var_se,
        empirical_fourth_moment_Z=z4,
        fourth_se=z4_se,
        ks_distance=ks_from_histogram(hist, mean, sigma),
        z_mean=z_mean,
        z_variance=z_var,
        z_mean_se=z_mean_se,
        z_variance_se=z_var_se,
    )


def simulate(idx: CopyIndex, c: int, samples: int, seed: int, workers: int = 1) -> SimResult:
    """Sample T under ``samples`` seeded colorings; Z uses the exact mean and sigma."""
    mean, _, sigma = _sigma(idx, c)
    hist = sample_histogram(idx, c, samples, seed, workers)
    return summarize(hist, mean, sigma, seed, c)


def histogram_csv(sim: SimResult) -> str:
    lines = ["t,count"]
    lines.extend(f"{t},{k}" for t, k in sim.histogram)
    return "\n".join(lines) + "\n"


def tv_distance(hist: Mapping[int, int], dist: Mapping[int, Fraction]) -> float:
    """Total variation between the empirical law in ``hist`` and an exact law."""
    n = sum(hist.values())
    keys = set(hist) | set(dist)
    return 0.5 * sum(abs(hist.get(t, 0) / n - float(dist.get(t, 0))) for t in keys)


@dataclass(frozen=True)
class SweepRow:
    host: str
    copies: int
    samples: int
    moments: dict[int, tuple[float, float]]  # power -> (E|Z|^power, standard error)
    ks_distance: float


def absolute_moments(sim: SimResult, powers: Sequence[int] = SWEEP_POWERS) -> dict[int, tuple[float, float]]:
    ts = [t for t, _ in sim.histogram]
    w = np.asarray([k for _, k in sim.histogram], dtype=np.float64)
    z = np.abs(np.asarray([float(t - sim.exact_mean) / sim.exact_sigma for t in ts]))
    return {m: _weighted_moments(z**m, w, sim.samples) for m in powers}


def moment_sweep(
    family: Sequence[GeneratorSpec | str],
    h: Pattern,
    c: int,
    samples: int,
    seed: int,
    workers: int = 1,
    powers: Sequence[int] = SWEEP_POWERS,
) -> list[SweepRow]:
    rows = []
    for spec in family:
        idx = enumerate_copies(h, generate(spec))
        sim = simulate(idx, c, samples, seed, workers)
        rows.append(SweepRow(str(spec), len(idx), samples, absolute_moments(sim, powers), sim.ks_distance))
    return rows
