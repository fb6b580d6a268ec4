"""Martingale-difference decomposition of T - E[T] over a vertex ordering.

For an increasing tuple w = (w_1, ..., w_k) in the active ordering,

    Y~_w = D_w * sum_{P subset of positions, |P| >= 2} (-1)^(k-|P|) c^(|P|-r) 1{colors on P equal}

and Y_w is Y~_w minus its mean. Summing Y~_w over all tuples recovers T, and
V_t = sum of Y_w over tuples whose last vertex is t gives T - E[T] = sum_t V_t,
with E[V_t | X_1..X_{t-1}] = 0. V_t / sigma is the martingale increment U_t.
"""

from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import product
from typing import Sequence

import numpy as np

from .coloring import Coloring, color_matrix, monochromatic_count
from .embed import CopyIndex
from .errors import CapacityError, UndefinedStatisticError, ValidationError
from .joins import anchored_subsets, check_ordering, sorted_ordering
from .moments import MAX_BRUTE_BITS, _colorings, expected_T, exact_variance

DEFAULT_MAX_CONDITIONAL = 1 << 16
MAX_PRODUCT_VERTICES = 10
JACKKNIFE_GROUPS = 20
_AB_CHUNK = 2048


@dataclass(frozen=True)
class IncreasingTuple:
    vertices: tuple[int, ...]
    d: int
    r: int

    @property
    def anchor(self) -> int:
        return self.vertices[-1]

    @property
    def k(self) -> int:
        return len(self.vertices)


@dataclass(frozen=True)
class DecompositionCheck:
    t_identity_residual: Fraction
    z_identity_residual: Fraction
    martingale_violations: int = 0

    @property
    def ok(self) -> bool:
        return not (self.t_identity_residual or self.z_identity_residual or self.martingale_violations)


def _ordering(idx: CopyIndex, ordering: Sequence[int] | None) -> tuple[int, ...]:
    return sorted_ordering(idx) if ordering is None else check_ordering(idx, ordering)


def all_tuples(idx: CopyIndex, ordering: Sequence[int] | None = None) -> dict[int, list[IncreasingTuple]]:
    """anchor -> increasing tuples ending there (every size 2..r, D_w > 0)."""
    ordering = _ordering(idx, ordering)
    r = idx.r
    return {
        t: [IncreasingTuple(verts, d, r) for verts, d in rows]
        for t, rows in anchored_subsets(idx, ordering).items()
    }


def enumerate_tuples(
    idx: CopyIndex, k: int, t: int | None = None, ordering: Sequence[int] | None = None
) -> list[IncreasingTuple]:
    if not 2 <= k <= idx.r:
        raise ValidationError(f"tuple size k must lie in 2..{idx.r}")
    by_anchor = all_tuples(idx, ordering)
    anchors = [t] if t is not None else _ordering(idx, ordering)
    return [w for a in anchors for w in by_anchor.get(a, ()) if w.k == k]


# ---------------------------------------------------------------------------
# Evaluation. Y~_w only depends on how many of w's vertices share each color:
# a subset P is monochromatic iff it sits inside one color class.


@lru_cache(maxsize=None)
def _class_weights(k: int, r: int, c: int) -> tuple[Fraction, ...]:
    """f[m] = sum_{p=2}^{m} C(m,p) (-1)^(k-p) c^(p-r): contribution of a color class of size m."""
    out = []
    for m in range(k + 1):
        out.append(sum(
            (math.comb(m, p) * (-1) ** (k - p) * Fraction(c) ** (p - r) for p in range(2, m + 1)),
            Fraction(0),
        ))
    return tuple(out)


@lru_cache(maxsize=None)
def _centering(k: int, r: int, c: int) -> Fraction:
    return sum(
        (math.comb(k, p) * (-1) ** (k - p) for p in range(2, k + 1)), 0
    ) * Fraction(1, c ** (r - 1))


def _tilde_unit(colors: Sequence[int], r: int, c: int) -> Fraction:
    f = _class_weights(len(colors), r, c)
    counts: dict[int, int] = defaultdict(int)
    for x in colors:
        counts[x] += 1
    return sum((f[m] for m in counts.values()), Fraction(0))


def y_tilde(w: IncreasingTuple, x: Coloring, c: int) -> Fraction:
    if not w.d:
        return Fraction(0)
    return w.d * _tilde_unit([x[v] for v in w.vertices], w.r, c)


def y_centered(w: IncreasingTuple, x: Coloring, c: int) -> Fraction:
    if not w.d:
        return Fraction(0)
    return w.d * (_tilde_unit([x[v] for v in w.vertices], w.r, c) - _centering(w.k, w.r, c))


def u_term(
    idx: CopyIndex, t: int, x: Coloring, c: int, ordering: Sequence[int] | None = None,
    tuples: dict[int, list[IncreasingTuple]] | None = None,
) -> Fraction:
    """V_t = sigma * U_t, exactly."""
    tuples = all_tuples(idx, ordering) if tuples is None else tuples
    return sum((y_centered(w, x, c) for w in tuples.get(t, ())), Fraction(0))


def verify_decomposition(
    idx: CopyIndex, c: int, x: Coloring, ordering: Sequence[int] | None = None,
    tuples: dict[int, list[IncreasingTuple]] | None = None,
) -> DecompositionCheck:
    ordering = _ordering(idx, ordering)
    tuples = all_tuples(idx, ordering) if tuples is None else tuples
    t_val = monochromatic_count(idx, x)
    tilde = sum((y_tilde(w, x, c) for rows in tuples.values() for w in rows), Fraction(0))
    v_sum = sum((u_term(idx, t, x, c, tuples=tuples) for t in ordering), Fraction(0))
    return DecompositionCheck(
        t_identity_residual=t_val - tilde,
        z_identity_residual=(t_val - expected_T(idx, c)) - v_sum,
    )


def _canonical(colors: Sequence[int]) -> tuple[int, ...]:
    """Relabel colors by first appearance; Y_w is invariant under color permutations."""
    seen: dict[int, int] = {}
    return tuple(seen.setdefault(x, len(seen)) for x in colors)


def verify_martingale(
    idx: CopyIndex, c: int, ordering: Sequence[int] | None = None,
    max_cost: int = DEFAULT_MAX_CONDITIONAL,
) -> int:
    """Count (tuple, prefix coloring) pairs where E[Y_w | prefix] != 0.

    Y_w depends only on the colors of w, so the conditional mean given
    X_{w_1}..X_{w_{k-1}} is the average of Y_w over the c colors of w_k.
    Results are cached per canonical prefix pattern.
    """
    if c ** idx.r > max_cost:
        raise CapacityError(f"conditional check costs c^r = {c ** idx.r} > cap {max_cost}")
    cache: dict[tuple, bool] = {}
    violations = 0
    for rows in all_tuples(idx, ordering).values():
        for w in rows:
            k = w.k
            for prefix in product(range(c), repeat=k - 1):
                key = (k, w.r, _canonical(prefix))
                if key not in cache:
                    avg = sum(
                        (_tilde_unit(prefix + (z,), w.r, c) for z in range(c)), Fraction(0)
                    ) / c - _centering(k, w.r, c)
                    cache[key] = avg != 0
                violations += cache[key]
    return violations


# ---------------------------------------------------------------------------
# Exact expectations of Y-products (small vertex sets)


def _y_unit(colors: Sequence[int], r: int, c: int) -> Fraction:
    return _tilde_unit(colors, r, c) - _centering(len(colors), r, c)


def expected_y_product(
    tuples: Sequence[IncreasingTuple], c: int, fixed: dict[int, int] | None = None
) -> Fraction:
    """E[prod Y_w], optionally conditioned on fixed colors ``{vertex: color}``."""
    fixed = fixed or {}
    verts = sorted({v for w in tuples for v in w.vertices} - set(fixed))
    if len(verts) + len(fixed) > MAX_PRODUCT_VERTICES:
        raise CapacityError(f"Y-products limited to {MAX_PRODUCT_VERTICES} involved vertices")
    total = Fraction(0)
    for assignment in product(range(c), repeat=len(verts)):
        col = dict(zip(verts, assignment))
        col.update(fixed)
        val = Fraction(1)
        for w in tuples:
            val *= w.d * _y_unit([col[v] for v in w.vertices], w.r, c)
            if not val:
                break
        total += val
    return total / c ** len(verts)


# ---------------------------------------------------------------------------
# Martingale statistics A = sum_t E[U_t^4] and B = Var[sum_t U_t^2]


class _VectorV:
    """Batch evaluation of V_t for many colorings at once (floating point)."""

    def __init__(self, idx: CopyIndex, c: int, ordering: Sequence[int]):
        n = idx.host.vertex_count
        self.n = n
        self.c = c
        self.groups = []
        by_k: dict[int, list[IncreasingTuple]] = defaultdict(list)
        for rows in all_tuples(idx, ordering).values():
            for w in rows:
                by_k[w.k].append(w)
        for k, rows in sorted(by_k.items()):
            verts = np.asarray([w.vertices for w in rows], dtype=np.int64) - 1
            d = np.asarray([w.d for w in rows], dtype=np.float64)
            # incidence of each tuple with its anchor column
            anchor = np.zeros((len(rows), n))
            anchor[np.arange(len(rows)), verts[:, -1]] = 1.0
            table = np.asarray([float(x) for x in _class_weights(k, idx.r, c)])
            shift = float(_centering(k, idx.r, c))
            self.groups.append((verts, d, anchor, table, shift))

    def __call__(self, colors: np.ndarray) -> np.ndarray:
        out = np.zeros((colors.shape[0], self.n))
        for verts, d, anchor, table, shift in self.groups:
            sub = colors[:, verts]  # (samples, tuples, k)
            val = np.zeros(sub.shape[:2])
            for j in range(self.c):
                val += table[(sub == j).sum(axis=2)]
            out += ((val - shift) * d) @ anchor
        return out


@dataclass(frozen=True)
class ABEstimate:
    A: float
    B: float
    A_se: float
    B_se: float
    samples: int


def _jackknife(values: np.ndarray, stat, groups: int = JACKKNIFE_GROUPS) -> float:
    g = min(groups, len(values))
    if g < 2:
        return float("nan")
    parts = np.array_split(values, g)
    loo = []
    for i in range(g):
        rest = np.concatenate([p for j, p in enumerate(parts) if j != i])
        loo.append(stat(rest))
    loo = np.asarray(loo)
    return float(math.sqrt((g - 1) / g * np.sum((loo - loo.mean()) ** 2)))


def estimate_AB(
    idx: CopyIndex, c: int, samples: int, seed: int, ordering: Sequence[int] | None = None
) -> ABEstimate:
    if samples < 2:
        raise ValidationError("need at least two samples")
    var = exact_variance(idx, c)
    if var <= 0:
        raise UndefinedStatisticError("Var[T] = 0, U_t is undefined")
    sigma = math.sqrt(var)
    vec = _VectorV(idx, c, _ordering(idx, ordering))
    a_vals = np.empty(samples)
    b_vals = np.empty(samples)
    for lo in range(0, samples, _AB_CHUNK):
        hi = min(samples, lo + _AB_CHUNK)
        u = vec(color_matrix(idx.host.vertex_count, c, seed, np.arange(lo, hi))) / sigma
        sq = u * u
        a_vals[lo:hi] = (sq * sq).sum(axis=1)
        b_vals[lo:hi] = sq.sum(axis=1)

    def var_stat(x):
        return float(np.var(x, ddof=1))

    return ABEstimate(
        A=float(a_vals.mean()),
        B=var_stat(b_vals),
        A_se=_jackknife(a_vals, lambda x: float(x.mean())),
        B_se=_jackknife(b_vals, var_stat),
        samples=samples,
    )


def exact_AB(idx: CopyIndex, c: int, ordering: Sequence[int] | None = None) -> tuple[Fraction, Fraction]:
    """A and B exactly, by enumerating every coloring of a tiny host.

    U_t^2 = V_t^2 / Var[T], so both statistics are rational.
    """
    n = idx.host.vertex_count
    if n * math.log2(c) > MAX_BRUTE_BITS - 8:
        raise CapacityError("exact A/B limited to hosts with at most 2^16 colorings")
    var = exact_variance(idx, c)
    if var <= 0:
        raise UndefinedStatisticError("Var[T] = 0, U_t is undefined")
    ordering = _ordering(idx, ordering)
    tuples = all_tuples(idx, ordering)
    total = c**n
    a_sum = Fraction(0)
    b_sum = Fraction(0)
    b_sq = Fraction(0)
    for row in _colorings(n, c, 0, total):
        x = Coloring(tuple(int(v) + 1 for v in row), c)
        sq = [u_term(idx, t, x, c, tuples=tuples) ** 2 / var for t in ordering]
        a_sum += sum((s * s for s in sq), Fraction(0))
        b = sum(sq, Fraction(0))
        b_sum += b
        b_sq += b * b
    mean_b = b_sum / total
    return a_sum / total, b_sq / total - mean_b * mean_b
