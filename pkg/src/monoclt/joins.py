"""Join census: 2-shared k-joins, good joins, xi counts and the Upsilon functional.

All counts use tuple semantics: ordered tuples of copies, repetition allowed.

Both join conditions depend on copies only through their vertex sets, so the
enumeration works on vertex-set classes (bitmasks) and multiplies by class
multiplicities at the end.
"""

from __future__ import annotations

from bisect import bisect_left
from collections import Counter, defaultdict
from dataclasses import dataclass
from itertools import combinations
from math import factorial
from typing import Iterator, Sequence

from .embed import Copy, CopyIndex, VertexClasses
from .errors import CapacityError, ValidationError

DEFAULT_MAX_STEPS = 5_000_000
MAX_UPSILON_R = 6
DEFAULT_MAX_ANCHORED = 5_000_000

PAIRINGS = (((0, 1), (2, 3)), ((0, 2), (1, 3)), ((0, 3), (1, 2)))


def _vertex_masks(copies: Sequence[Copy]) -> list[int]:
    return [sum(1 << v for v in cp.vertices) for cp in copies]


def join_failure(masks: Sequence[int], r: int) -> str | None:
    """Name of the first violated good-join condition for four vertex-set masks.

    ``"good"``: some copy has more than r-2 vertices outside the other three.
    ``"vgood"``: some pairing has pair-unions meeting in fewer than 2 vertices,
    which is the same as ``|V(all)| > |V(pair1)| + |V(pair2)| - 2``.
    """
    m0, m1, m2, m3 = masks
    total = (m0 | m1 | m2 | m3).bit_count()
    if total - (m1 | m2 | m3).bit_count() > r - 2:
        return "good"
    if total - (m0 | m2 | m3).bit_count() > r - 2:
        return "good"
    if total - (m0 | m1 | m3).bit_count() > r - 2:
        return "good"
    if total - (m0 | m1 | m2).bit_count() > r - 2:
        return "good"
    for (a, b), (c, d) in PAIRINGS:
        if ((masks[a] | masks[b]) & (masks[c] | masks[d])).bit_count() < 2:
            return "vgood"
    return None


def is_2shared(copies: Sequence[Copy]) -> bool:
    if len(copies) < 2:
        raise ValidationError("a join needs at least two copies")
    common = set(copies[0].vertices)
    for cp in copies[1:]:
        common &= set(cp.vertices)
    return len(common) >= 2


def _check_r(r: int) -> None:
    if r < 3:
        raise ValidationError(f"good joins need patterns with r >= 3 vertices (got r={r})")


def is_good_join(q: Sequence[Copy]) -> bool:
    if len(q) != 4:
        raise ValidationError("a good join is built from exactly four copies")
    r = len(q[0].vertices)
    _check_r(r)
    return join_failure(_vertex_masks(q), r) is None


@dataclass(frozen=True)
class Classification:
    label: str
    failed_condition: str | None = None
    two_shared: bool = False

    def __str__(self) -> str:
        if self.failed_condition:
            return f"{self.label}: fails condition ({self.failed_condition})"
        if self.label == "good-join" and self.two_shared:
            return "good-join; 2-shared-4-join"
        return self.label


def classify(copies: Sequence[Copy]) -> Classification:
    """Label a tuple of copies. Four copies get the full good-join test."""
    k = len(copies)
    shared = is_2shared(copies)
    if k != 4:
        if shared:
            return Classification(f"2-shared-{k}-join", two_shared=True)
        return Classification(f"{k}-join-only", "2-shared")
    r = len(copies[0].vertices)
    _check_r(r)
    failure = join_failure(_vertex_masks(copies), r)
    if failure is None:
        return Classification("good-join", two_shared=shared)
    return Classification("4-join-only", failure, shared)


# ---------------------------------------------------------------------------
# Counting


def _signed_overlap_sum(counts: dict[int, int], k: int) -> int:
    """Number of ordered k-tuples whose common vertex set has size >= 2.

    ``counts`` maps a vertex subset T to the number of items containing T; the
    Moebius weight of T is ``(-1)^|T| (|T| - 1)``.
    """
    total = 0
    for mask, n in counts.items():
        size = mask.bit_count()
        if size >= 2:
            total += (-1) ** size * (size - 1) * n**k
    return total


def count_2shared_tuples(idx: CopyIndex, k: int) -> int:
    if k < 2:
        raise ValidationError("k must be at least 2")
    return _signed_overlap_sum(idx.classes.subset_counts, k)


def _orderings(key: tuple[int, ...]) -> int:
    out = factorial(len(key))
    for n in Counter(key).values():
        out //= factorial(n)
    return out


def iter_good_quadruples(
    classes: VertexClasses, r: int, max_steps: int = DEFAULT_MAX_STEPS
) -> Iterator[tuple[tuple[int, int, int, int], int]]:
    """Yield ``(sorted class ids, number of distinct orderings)`` for every good multiset.

    A good quadruple has a connected overlap graph, so every one is reached by
    growing from its smallest class through classes that share a vertex with the
    current union. The last class added must meet the union of the other three
    in at least two vertices. Each multiset is yielded once.
    """
    masks = classes.masks
    nbrs = classes.neighbours
    steps = 0
    for a in range(len(masks)):

        def near(x: int) -> set[int]:
            row = nbrs[x]
            return set(row[bisect_left(row, a):])

        seen: set[tuple[int, ...]] = set()
        n_a = near(a)
        for b in n_a:
            n_ab = n_a | near(b)
            m_ab = masks[a] | masks[b]
            for c in n_ab:
                n_abc = n_ab | near(c)
                m_abc = m_ab | masks[c]
                steps += len(n_abc)
                if steps > max_steps:
                    raise CapacityError(
                        f"good-join enumeration exceeded {max_steps} candidate steps (cap max_tuples)"
                    )
                for d in n_abc:
                    if (masks[d] & m_abc).bit_count() < 2:
                        continue
                    key = tuple(sorted((a, b, c, d)))
                    if key in seen:
                        continue
                    seen.add(key)
                    if join_failure([masks[i] for i in key], r) is None:
                        yield key, _orderings(key)


def count_good_tuples(idx: CopyIndex, max_steps: int = DEFAULT_MAX_STEPS) -> int:
    _check_r(idx.r)
    mult = idx.classes.mult
    total = 0
    for key, orders in iter_good_quadruples(idx.classes, idx.r, max_steps):
        w = orders
        for i in key:
            w *= mult[i]
        total += w
    return total


def xi_counts(idx: CopyIndex) -> tuple[int, ...]:
    """xi[v-1] = ordered 2-shared pairs whose common vertex set contains v."""
    xi = [0] * idx.host.vertex_count
    for mask, n in idx.classes.subset_counts.items():
        size = mask.bit_count()
        if size < 2:
            continue
        val = (-1) ** size * n * n
        v = 0
        while mask:
            if mask & 1:
                xi[v - 1] += val
            mask >>= 1
            v += 1
    return tuple(xi)


def sorted_ordering(idx: CopyIndex) -> tuple[int, ...]:
    """Vertices by descending xi, ties by ascending id."""
    xi = xi_counts(idx)
    return tuple(sorted(range(1, idx.host.vertex_count + 1), key=lambda v: (-xi[v - 1], v)))


def natural_ordering(idx: CopyIndex) -> tuple[int, ...]:
    return tuple(range(1, idx.host.vertex_count + 1))


def ranks(ordering: Sequence[int]) -> dict[int, int]:
    return {v: i for i, v in enumerate(ordering)}


def check_ordering(idx: CopyIndex, ordering: Sequence[int]) -> tuple[int, ...]:
    ordering = tuple(ordering)
    if sorted(ordering) != list(range(1, idx.host.vertex_count + 1)):
        raise ValidationError("ordering must be a permutation of the host vertices")
    return ordering


def anchored_subsets(
    idx: CopyIndex, ordering: Sequence[int], max_tuples: int = DEFAULT_MAX_ANCHORED
) -> dict[int, list[tuple[tuple[int, ...], int]]]:
    """anchor -> [(tuple in ordering order, D_w)] for every w with 2 <= |w| <= r and D_w > 0."""
    rank = ranks(ordering)
    out: dict[int, list[tuple[tuple[int, ...], int]]] = defaultdict(list)
    counts = idx.classes.subset_counts
    if sum(1 for m in counts if m.bit_count() >= 2) > max_tuples:
        raise CapacityError(f"more than {max_tuples} increasing tuples (cap max_tuples)")
    for mask, d in counts.items():
        if mask.bit_count() < 2:
            continue
        verts = sorted(_bits(mask), key=rank.get)
        out[verts[-1]].append((tuple(verts), d))
    for rows in out.values():
        rows.sort(key=lambda row: [rank[v] for v in row[0]])
    return out


def _bits(mask: int) -> list[int]:
    out = []
    v = 0
    while mask:
        if mask & 1:
            out.append(v)
        mask >>= 1
        v += 1
    return out


def upsilon(
    idx: CopyIndex, ordering: Sequence[int] | None = None, max_tuples: int = DEFAULT_MAX_ANCHORED
) -> int:
    """Sum over anchors t of D_{w1}^2 D_{w2}^2 for ordered tuple pairs meeting exactly in t.

    Pairs with ``w1 & w2 == {t}`` are isolated by Moebius inversion over the
    shared part below the anchor.
    """
    if idx.r > MAX_UPSILON_R:
        raise CapacityError(f"upsilon is limited to patterns with r <= {MAX_UPSILON_R}")
    ordering = sorted_ordering(idx) if ordering is None else check_ordering(idx, ordering)
    total = 0
    for t, rows in anchored_subsets(idx, ordering, max_tuples).items():
        h: dict[tuple[int, ...], int] = defaultdict(int)
        for verts, d in rows:
            rest = verts[:-1]
            sq = d * d
            for k in range(len(rest) + 1):
                for sub in combinations(rest, k):
                    h[sub] += sq
        total += sum((-1) ** len(sub) * val * val for sub, val in h.items())
    return total


@dataclass(frozen=True)
class CensusReport:
    copies: int
    pair2_tuples: int
    q4_tuples: int
    good_tuples: int
    xi: tuple[int, ...]
    upsilon: int | None
    ordering: tuple[int, ...]


def census(
    idx: CopyIndex,
    ordering: Sequence[int] | None = None,
    max_steps: int = DEFAULT_MAX_STEPS,
    with_upsilon: bool = True,
) -> CensusReport:
    _check_r(idx.r)
    ordering = sorted_ordering(idx) if ordering is None else check_ordering(idx, ordering)
    ups = upsilon(idx, ordering) if with_upsilon and idx.r <= MAX_UPSILON_R else None
    return CensusReport(
        copies=len(idx),
        pair2_tuples=count_2shared_tuples(idx, 2),
        q4_tuples=count_2shared_tuples(idx, 4),
        good_tuples=count_good_tuples(idx, max_steps),
        xi=xi_counts(idx),
        upsilon=ups,
        ordering=ordering,
    )
