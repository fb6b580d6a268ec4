"""Shared helpers and independent brute-force oracles for the test suite."""

from __future__ import annotations

from fractions import Fraction
from itertools import combinations, permutations, product

import pytest

from monoclt.embed import Copy, enumerate_copies, pattern_from_spec
from monoclt.graph import Graph, generate


def index(pattern: str, host: str | Graph):
    g = generate(host) if isinstance(host, str) else host
    return enumerate_copies(pattern_from_spec(pattern), g)


def naive_copies(h: Graph, g: Graph) -> set[tuple[frozenset, frozenset]]:
    """Copies as (vertex set, edge image) from every injective map, no pruning."""
    found = set()
    hv = list(h.vertices())
    for verts in combinations(g.vertices(), h.vertex_count):
        for perm in permutations(verts):
            phi = dict(zip(hv, perm))
            if all(g.has_edge(phi[u], phi[v]) for u, v in h.edges):
                image = frozenset(frozenset((phi[u], phi[v])) for u, v in h.edges)
                found.add((frozenset(verts), image))
    return found


def colorings(n: int, c: int):
    return product(range(1, c + 1), repeat=n)


def brute_moments(copies: list[Copy], n: int, c: int) -> dict[str, Fraction]:
    """Mean, variance and E[Z^4] of T by direct enumeration of every coloring."""
    total = c**n
    s1 = s2 = s4 = Fraction(0)
    values = []
    for x in colorings(n, c):
        t = sum(1 for cp in copies if len({x[v - 1] for v in cp.vertices}) == 1)
        values.append(t)
    mean = Fraction(sum(values), total)
    var = sum((Fraction(t) - mean) ** 2 for t in values) / total
    m4 = sum((Fraction(t) - mean) ** 4 for t in values) / total
    return {"mean": mean, "var": var, "fourth": m4 / var**2 if var else None}


def good_by_definition(q, r: int) -> bool:
    """Direct transcription of both good-join conditions on vertex sets."""
    sets = [set(cp.vertices) for cp in q]
    whole = set().union(*sets)
    for i in range(4):
        rest = set().union(*(sets[j] for j in range(4) if j != i))
        if len(whole) - len(rest) > r - 2:
            return False
    best = min(
        len(sets[a] | sets[b]) + len(sets[c] | sets[d]) - 2
        for (a, b), (c, d) in (((0, 1), (2, 3)), ((0, 2), (1, 3)), ((0, 3), (1, 2)))
    )
    return len(whole) <= best


def two_shared_by_definition(tup) -> bool:
    common = set(tup[0].vertices)
    for cp in tup[1:]:
        common &= set(cp.vertices)
    return len(common) >= 2


SMALL_HOSTS = [
    ("complete:3", "complete:4"),
    ("complete:3", "complete:5"),
    ("complete:3", "union:complete:3x3"),
    ("star:2", "complete:4"),
    ("star:2", "star:5"),
    ("star:2", "path:6"),
    ("star:2", "cycle:6"),
    ("path:4", "path:6"),
    ("path:4", "cycle:6"),
    ("complete:3", "er:8:0.5:3"),
    ("star:2", "er:7:0.4:5"),
]


@pytest.fixture
def k4_triangles():
    return index("triangle", "complete:4")


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[2].rstrip(":"))):
            terminalreporter.write_line(line)
