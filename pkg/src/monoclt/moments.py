"""Exact moments of T(H, G) and Z(H, G), plus the all-colorings oracle.

Every quantity here is an exact :class:`fractions.Fraction`. Floating point
only appears where a caller asks for sigma itself.
"""

from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import combinations, product
from typing import Mapping, Sequence

import numpy as np

from .coloring import monochromatic_counts
from .embed import Copy, CopyIndex
from .errors import CapacityError, UndefinedStatisticError, ValidationError
from .joins import DEFAULT_MAX_STEPS, count_2shared_tuples, iter_good_quadruples

MAX_MIXED_LENGTH = 8
MAX_BRUTE_BITS = 24
DEFAULT_MAX_DIRECT_QUADRUPLES = 200_000
_CHUNK = 1 << 15


def _check_c(c: int) -> None:
    if c < 2:
        raise ValidationError("need at least two colors")


def _inv_pow(c: int, e: int) -> Fraction:
    """c^(-e) for e >= 0."""
    return Fraction(1, c**e)


def expected_T(idx: CopyIndex, c: int) -> Fraction:
    _check_c(c)
    return len(idx) * _inv_pow(c, idx.r - 1)


def _cov_from_sizes(c: int, size1: int, size2: int, union: int, inter: int) -> Fraction:
    if inter <= 1:
        return Fraction(0)
    return _inv_pow(c, union - 1) - _inv_pow(c, size1 + size2 - 2)


def pair_covariance(copy1: Copy, copy2: Copy, c: int) -> Fraction:
    """Cov(1{copy1 mono}, 1{copy2 mono}); zero unless the copies share two vertices."""
    _check_c(c)
    a, b = copy1.mask, copy2.mask
    return _cov_from_sizes(c, len(copy1), len(copy2), (a | b).bit_count(), (a & b).bit_count())


def _shared_class_pairs(idx: CopyIndex):
    """Yield ``(a, b)`` for every ordered pair of vertex classes sharing >= 2 vertices."""
    cls = idx.classes
    masks = cls.masks
    for a, row in enumerate(cls.neighbours):
        ma = masks[a]
        for b in row:
            if (ma & masks[b]).bit_count() >= 2:
                yield a, b


def exact_variance(idx: CopyIndex, c: int) -> Fraction:
    _check_c(c)
    cls = idx.classes
    r = idx.r
    # covariance depends only on the union size, so bucket by it first
    weight_by_union: dict[int, int] = defaultdict(int)
    for a, b in _shared_class_pairs(idx):
        weight_by_union[(cls.masks[a] | cls.masks[b]).bit_count()] += cls.mult[a] * cls.mult[b]
    return sum(
        (w * _cov_from_sizes(c, r, r, u, 2) for u, w in weight_by_union.items()),
        Fraction(0),
    )


# ---------------------------------------------------------------------------
# Mixed central moments


def _components(members: Sequence[int], adjacent) -> int:
    parent = {j: j for j in members}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for i, j in combinations(members, 2):
        if adjacent(i, j):
            parent[find(i)] = find(j)
    return sum(1 for j in members if find(j) == j)


def _signature(masks: Sequence[int]) -> tuple[tuple[int, ...], tuple[bool, ...]]:
    """Union sizes of every nonempty subcollection and the pairwise-overlap flags.

    These two tuples determine the mixed moment completely.
    """
    L = len(masks)
    unions = [0] * (1 << L)
    for A in range(1, 1 << L):
        low = (A & -A).bit_length() - 1
        unions[A] = unions[A & (A - 1)] | masks[low]
    sizes = tuple(u.bit_count() for u in unions[1:])
    flags = tuple(bool(masks[i] & masks[j]) for i, j in combinations(range(L), 2))
    return sizes, flags


@lru_cache(maxsize=1 << 18)
def _moment_from_signature(L: int, sizes: tuple[int, ...], flags: tuple[bool, ...], c: int) -> Fraction:
    pair_index = {pair: k for k, pair in enumerate(combinations(range(L), 2))}

    def adjacent(i, j):
        return flags[pair_index[(i, j)]]

    single = [sizes[(1 << j) - 1] for j in range(L)]
    total = Fraction(0)
    full = (1 << L) - 1
    for A in range(1 << L):
        members = [j for j in range(L) if A >> j & 1]
        outside = full & ~A
        # prod over j outside A of -c^(1 - |s_j|)
        exp_out = sum(single[j] - 1 for j in range(L) if outside >> j & 1)
        sign = -1 if (L - len(members)) % 2 else 1
        if members:
            inside = _inv_pow(c, sizes[A - 1] - _components(members, adjacent))
        else:
            inside = Fraction(1)
        total += sign * _inv_pow(c, exp_out) * inside
    return total


def mixed_moment_from_masks(masks: Sequence[int], c: int) -> Fraction:
    """E[prod_j (1{s_j mono} - c^(1-|s_j|))] for vertex-set bitmasks.

    Expanding the product gives an alternating sum over subcollections A. The
    probability that every copy in A is monochromatic is c^(comp(A) - |union A|),
    where comp(A) counts connected components of the overlap graph of A.
    """
    L = len(masks)
    if L < 1:
        raise ValidationError("need at least one copy")
    if L > MAX_MIXED_LENGTH:
        raise CapacityError(f"mixed moments limited to {MAX_MIXED_LENGTH} copies")
    sizes, flags = _signature(masks)
    return _moment_from_signature(L, sizes, flags, c)


def mixed_central_moment(copies: Sequence[Copy], c: int) -> Fraction:
    _check_c(c)
    return mixed_moment_from_masks([cp.mask for cp in copies], c)


# ---------------------------------------------------------------------------
# Fourth moment


def _require_variance(var: Fraction) -> None:
    if var <= 0:
        raise UndefinedStatisticError("Var[T] = 0 (no copies), Z is undefined")


def _pair_correction(idx: CopyIndex, c: int) -> Fraction:
    """Sum of cov(P1) cov(P2) over ordered 2-shared pairs P1, P2 whose unions share >= 2 vertices.

    Each pair is summarized by its union U; Moebius inversion over the common
    subset of two unions isolates ``|U1 & U2| >= 2``.
    """
    cls = idx.classes
    r = idx.r
    w: dict[int, Fraction] = defaultdict(Fraction)
    for a, b in _shared_class_pairs(idx):
        u = cls.masks[a] | cls.masks[b]
        w[u] += cls.mult[a] * cls.mult[b] * _cov_from_sizes(c, r, r, u.bit_count(), 2)
    big_w: dict[int, Fraction] = defaultdict(Fraction)
    for u, val in w.items():
        bits = [1 << v for v in range(u.bit_length()) if u >> v & 1]
        for k in range(2, len(bits) + 1):
            for combo in combinations(bits, k):
                big_w[sum(combo)] += val
    total = Fraction(0)
    for t, val in big_w.items():
        size = t.bit_count()
        total += (-1) ** size * (size - 1) * val * val
    return total


def fourth_central_sum(idx: CopyIndex, c: int, max_steps: int = DEFAULT_MAX_STEPS) -> Fraction:
    """E[(T - E[T])^4] - 3 Var[T]^2 computed from good quadruples only.

    A quadruple that is not good either has a copy nearly disjoint from the rest
    (moment 0) or splits into two pairs whose unions meet in at most one vertex
    (moment = product of the two covariances). Subtracting three copies of
    Var[T]^2 leaves the good-quadruple sum minus the pair products that were
    counted in Var[T]^2 but belong to good quadruples.
    """
    cls = idx.classes
    masks = cls.masks
    mult = cls.mult
    good = Fraction(0)
    for key, orders in iter_good_quadruples(cls, idx.r, max_steps):
        weight = orders
        for i in key:
            weight *= mult[i]
        good += weight * mixed_moment_from_masks([masks[i] for i in key], c)
    return good - 3 * _pair_correction(idx, c)


def exact_fourth_moment(idx: CopyIndex, c: int, max_steps: int = DEFAULT_MAX_STEPS) -> Fraction:
    """E[Z^4] exactly, via the good-join identity."""
    _check_c(c)
    var = exact_variance(idx, c)
    _require_variance(var)
    return 3 + fourth_central_sum(idx, c, max_steps) / (var * var)


def fourth_moment_direct(
    idx: CopyIndex, c: int, max_quadruples: int = DEFAULT_MAX_DIRECT_QUADRUPLES
) -> Fraction:
    """E[Z^4] by summing the mixed moment over every ordered quadruple of copies."""
    _check_c(c)
    var = exact_variance(idx, c)
    _require_variance(var)
    cls = idx.classes
    if len(cls) ** 4 > max_quadruples:
        raise CapacityError(
            f"direct fourth moment needs {len(cls)}^4 quadruples (cap {max_quadruples})"
        )
    total = Fraction(0)
    for q in product(range(len(cls)), repeat=4):
        weight = cls.mult[q[0]] * cls.mult[q[1]] * cls.mult[q[2]] * cls.mult[q[3]]
        total += weight * mixed_moment_from_masks([cls.masks[i] for i in q], c)
    return total / (var * var)


# ---------------------------------------------------------------------------
# Brute-force oracle


def _check_brute(n: int, c: int) -> None:
    if n * math.log2(c) > MAX_BRUTE_BITS + 1e-9:
        raise CapacityError(
            f"brute force over {c}^{n} colorings exceeds the 2^{MAX_BRUTE_BITS} cap"
        )


def _colorings(n: int, c: int, start: int, stop: int) -> np.ndarray:
    """Rows ``start..stop-1`` of all colorings in base-c order, vertex 1 as the lowest digit."""
    codes = np.arange(start, stop, dtype=np.int64)
    out = np.empty((len(codes), n), dtype=np.int16)
    for v in range(n):
        codes, digit = np.divmod(codes, c)
        out[:, v] = digit
    return out


def brute_force_distribution(idx: CopyIndex, c: int) -> dict[int, Fraction]:
    """Exact law of T by enumerating colorings.

    T is invariant under permuting colors, so vertex n is pinned to one color
    and the remaining c^(n-1) colorings carry the full distribution.
    """
    _check_c(c)
    n = idx.host.vertex_count
    _check_brute(n, c)
    total = c ** (n - 1)
    hist: dict[int, int] = defaultdict(int)
    for lo in range(0, total, _CHUNK):
        hi = min(total, lo + _CHUNK)
        colors = _colorings(n, c, lo, hi)  # last digit is always 0 because hi <= c^(n-1)
        values, counts = np.unique(monochromatic_counts(idx, colors), return_counts=True)
        for t, k in zip(values.tolist(), counts.tolist()):
            hist[t] += k
    return {t: Fraction(k, total) for t, k in sorted(hist.items())}


def distribution_moment(dist: Mapping[int, Fraction], k: int, center: Fraction | int = 0) -> Fraction:
    return sum((p * (t - center) ** k for t, p in dist.items()), Fraction(0))


@dataclass(frozen=True)
class DistributionMoments:
    mean: Fraction
    variance: Fraction
    fourth_moment_Z: Fraction | None


def distribution_moments(dist: Mapping[int, Fraction]) -> DistributionMoments:
    mean = distribution_moment(dist, 1)
    var = distribution_moment(dist, 2, mean)
    fourth = distribution_moment(dist, 4, mean) / (var * var) if var else None
    return DistributionMoments(mean, var, fourth)


def brute_force_mixed_moment(copies: Sequence[Copy], c: int) -> Fraction:
    """E[prod Z_s] by enumerating colorings of the vertices the copies touch."""
    _check_c(c)
    verts = sorted({v for cp in copies for v in cp.vertices})
    _check_brute(len(verts), c)
    pos = {v: i for i, v in enumerate(verts)}
    cols = _colorings(len(verts), c, 0, c ** len(verts))
    prod = np.ones(len(cols), dtype=object)
    for cp in copies:
        sub = cols[:, [pos[v] for v in cp.vertices]]
        mono = (sub == sub[:, :1]).all(axis=1)
        base = Fraction(1, c ** (len(cp) - 1))
        prod = prod * np.where(mono, 1 - base, -base)
    return Fraction(sum(prod.tolist(), Fraction(0))) / len(cols)


# ---------------------------------------------------------------------------
# Report


@dataclass(frozen=True)
class MomentReport:
    mean_T: Fraction
    variance_T: Fraction
    fourth_moment_Z: Fraction | None
    copy_count: int
    pair2_count: int

    @property
    def sigma(self) -> float:
        return math.sqrt(self.variance_T)


def moment_report(
    idx: CopyIndex, c: int, fourth: bool = True, max_steps: int = DEFAULT_MAX_STEPS
) -> MomentReport:
    var = exact_variance(idx, c)
    fourth_val = exact_fourth_moment(idx, c, max_steps) if fourth and var > 0 else None
    return MomentReport(
        mean_T=expected_T(idx, c),
        variance_T=var,
        fourth_moment_Z=fourth_val,
        copy_count=len(idx),
        pair2_count=count_2shared_tuples(idx, 2),
    )
