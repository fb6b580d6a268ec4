"""Normality diagnostics: the good-join ratio, the fourth-moment gap, the variance
sandwich, and a deterministic JSON rendering of the combined report.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Mapping

from .embed import CopyIndex
from .errors import CapacityError, UndefinedStatisticError, ValidationError
from .joins import (
    DEFAULT_MAX_STEPS,
    MAX_UPSILON_R,
    CensusReport,
    census as run_census,
    count_2shared_tuples,
    upsilon,
)
from .moments import (
    MAX_BRUTE_BITS,
    brute_force_distribution,
    distribution_moments,
    exact_fourth_moment,
    exact_variance,
    expected_T,
)
from .simulate import SimResult

LARGE_C = 30
ROOT = 20
FOURTH_METHODS = ("auto", "identity", "brute")


def clt_ratio_exact(census: CensusReport) -> Fraction:
    if census.pair2_tuples < 1:
        raise UndefinedStatisticError("no copies, the good-join ratio is undefined")
    return Fraction(census.good_tuples, census.pair2_tuples**2)


def clt_ratio(census: CensusReport) -> float:
    """good_tuples / pair2_tuples^2, with no constant applied."""
    return float(clt_ratio_exact(census))


@dataclass(frozen=True)
class FourthGap:
    fourth_moment: Fraction
    method: str
    c: int

    @property
    def gap(self) -> Fraction:
        return self.fourth_moment - 3

    @property
    def gap_pow(self) -> float:
        return float(abs(self.gap)) ** (1 / ROOT)

    @property
    def negative(self) -> bool:
        return self.gap < 0

    @property
    def large_c(self) -> bool:
        return self.c >= LARGE_C


def _brute_fourth(idx: CopyIndex, c: int) -> Fraction:
    dm = distribution_moments(brute_force_distribution(idx, c))
    if dm.fourth_moment_Z is None:
        raise UndefinedStatisticError("Var[T] = 0, Z is undefined")
    return dm.fourth_moment_Z


def fourth_gap(
    idx: CopyIndex, c: int, method: str = "auto", max_steps: int = DEFAULT_MAX_STEPS
) -> FourthGap:
    """Exact E[Z^4] - 3.

    ``identity`` sums over good quadruples; ``brute`` enumerates colorings;
    ``auto`` uses the identity and falls back to enumeration when the good-join
    census exceeds its cap on a host small enough to enumerate.
    """
    if method not in FOURTH_METHODS:
        raise ValidationError(f"method must be one of {FOURTH_METHODS}")
    if exact_variance(idx, c) <= 0:
        raise UndefinedStatisticError("Var[T] = 0, Z is undefined")
    if method == "brute":
        return FourthGap(_brute_fourth(idx, c), "brute", c)
    try:
        return FourthGap(exact_fourth_moment(idx, c, max_steps), "identity", c)
    except CapacityError:
        small = idx.host.vertex_count * math.log2(c) <= MAX_BRUTE_BITS
        if method == "identity" or not small:
            raise
    return FourthGap(_brute_fourth(idx, c), "brute", c)


@dataclass(frozen=True)
class BoundReport:
    host: str
    pattern: str
    c: int
    copies: int
    pair2_tuples: int
    q4_tuples: int
    good_tuples: int | None
    mean_T: Fraction
    variance_T: Fraction
    fourth: FourthGap | None
    sandwich_low: Fraction
    sandwich_high: Fraction
    upsilon: int | None
    ks_distance: float | None = None
    samples: int | None = None
    seed: int | None = None

    @property
    def ratio_exact(self) -> Fraction | None:
        if self.good_tuples is None or self.pair2_tuples < 1:
            return None
        return Fraction(self.good_tuples, self.pair2_tuples**2)

    @property
    def ratio(self) -> float | None:
        q = self.ratio_exact
        return None if q is None else float(q)

    @property
    def ratio_pow(self) -> float | None:
        q = self.ratio
        return None if q is None else q ** (1 / ROOT)

    @property
    def fourth_gap(self) -> Fraction | None:
        return None if self.fourth is None else self.fourth.gap

    @property
    def gap_pow(self) -> float | None:
        return None if self.fourth is None else self.fourth.gap_pow


def sandwich(pair2_tuples: int, c: int, r: int) -> tuple[Fraction, Fraction]:
    """Bounds on Var[T] from the range of a nonzero pair covariance."""
    low = pair2_tuples * Fraction(c - 1, c ** (2 * r - 2))
    high = pair2_tuples * Fraction(1, c ** (r - 1))
    return low, high


def assemble_report(
    idx: CopyIndex,
    c: int,
    census: CensusReport | None = None,
    sim: SimResult | None = None,
    host: str = "",
    fourth_method: str = "auto",
    max_steps: int = DEFAULT_MAX_STEPS,
) -> BoundReport:
    """Collect every diagnostic for one (H, G, c).

    When the good-join census exceeds ``max_steps`` the census-derived fields
    are left empty rather than failing the whole report.
    """
    if census is None:
        try:
            census = run_census(idx, max_steps=max_steps)
        except CapacityError:
            census = None
    pair2 = census.pair2_tuples if census else count_2shared_tuples(idx, 2)
    q4 = census.q4_tuples if census else count_2shared_tuples(idx, 4)
    ups = census.upsilon if census else (upsilon(idx) if idx.r <= MAX_UPSILON_R else None)
    var = exact_variance(idx, c)
    fourth = fourth_gap(idx, c, fourth_method, max_steps) if var > 0 else None
    low, high = sandwich(pair2, c, idx.r)
    return BoundReport(
        host=host,
        pattern=str(idx.pattern),
        c=c,
        copies=len(idx),
        pair2_tuples=pair2,
        q4_tuples=q4,
        good_tuples=census.good_tuples if census else None,
        mean_T=expected_T(idx, c),
        variance_T=var,
        fourth=fourth,
        sandwich_low=low,
        sandwich_high=high,
        upsilon=ups,
        ks_distance=sim.ks_distance if sim else None,
        samples=sim.samples if sim else None,
        seed=sim.seed if sim else None,
    )


def report_fields(rep: BoundReport) -> dict[str, Any]:
    """Schema keys first, in their fixed order, then supplementary keys."""
    return {
        "host": rep.host,
        "pattern": rep.pattern,
        "c": rep.c,
        "copies": rep.copies,
        "pair2_tuples": rep.pair2_tuples,
        "q4_tuples": rep.q4_tuples,
        "good_tuples": rep.good_tuples,
        "mean_T": rep.mean_T,
        "variance_T": rep.variance_T,
        "fourth_moment_Z": rep.fourth.fourth_moment if rep.fourth else None,
        "fourth_gap": rep.fourth_gap,
        "clt_ratio": rep.ratio,
        "clt_ratio_pow": rep.ratio_pow,
        "sandwich": [rep.sandwich_low, rep.sandwich_high],
        "upsilon": rep.upsilon,
        "ks_distance": rep.ks_distance,
        "samples": rep.samples,
        "seed": rep.seed,
        "fourth_gap_pow": rep.gap_pow,
        "fourth_gap_negative": rep.fourth.negative if rep.fourth else None,
        "c_at_least_30": rep.c >= LARGE_C,
        "fourth_method": rep.fourth.method if rep.fourth else None,
    }


# ---------------------------------------------------------------------------
# Deterministic JSON: insertion-ordered keys, rationals as "p/q", floats as %.17g


def _scalar(value: Any) -> str:
    if value is None:
        return "null"
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, Fraction):
        return f'"{value.numerator}/{value.denominator}"'
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        if not math.isfinite(value):
            return "null"
        text = "%.17g" % value
        if not any(ch in text for ch in ".en"):
            text += ".0"
        return text
    if isinstance(value, str):
        return json.dumps(value)
    raise TypeError(f"cannot serialize {type(value).__name__}")


def dumps(obj: Any, indent: int = 2, _level: int = 0) -> str:
    pad = " " * (indent * (_level + 1))
    end = " " * (indent * _level)
    if isinstance(obj, Mapping):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {dumps(v, indent, _level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        if all(not isinstance(v, (Mapping, list, tuple)) for v in obj):
            return "[" + ", ".join(_scalar(v) for v in obj) + "]"
        items = [pad + dumps(v, indent, _level + 1) for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    return _scalar(obj)


def report_json(rep: BoundReport) -> str:
    return dumps(report_fields(rep)) + "\n"
