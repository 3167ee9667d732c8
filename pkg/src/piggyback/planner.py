"""Repair-bandwidth and complexity analytics for piggybacked codes.

Rates are exact ``Fraction`` values so identities such as 18/30 == 3/5 can be
asserted without tolerances.
"""

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations

from .layout import Grouping, PlanError, build_plan, make_equal_grouping
from .mds import CodeParams

BRUTE_FORCE_MAX_K = 14
BRUTE_FORCE_MAX_R = 7


@dataclass(frozen=True)
class BandwidthReport:
    k: int
    r: int
    per_node: tuple  # cells downloaded to repair systematic node 1..k

    @property
    def total_systematic(self) -> int:
        return sum(self.per_node)

    @property
    def average_systematic(self) -> Fraction:
        return Fraction(self.total_systematic, self.k)

    @property
    def gamma_systematic(self) -> Fraction:
        return self.average_systematic / (self.k * self.r)

    @property
    def gamma_all(self) -> Fraction:
        # parity nodes are repaired by downloading all k*r systematic cells
        return (self.gamma_systematic * self.k + self.r) / (self.k + self.r)


def node_traffic(k: int, r: int, grouping: Grouping, node: int) -> int:
    """Cells downloaded to repair ``node`` under the baseline placement: k*l + (r-l)*s_l."""
    if node > k:
        return k * r
    l = grouping.group_of(node)
    return k * l + (r - l) * grouping.sizes[l - 1]


def plan_traffic(k: int, r: int, plan, node: int) -> int:
    """Cells downloaded to repair ``node`` under an arbitrary plan.

    The MDS phase reads k cells in each of the l last columns; each
    piggybacked symbol of the node then costs the size of its group.
    """
    if node > k:
        return k * r
    l = plan.group_of_node[node]
    where = plan.locate()
    return k * l + sum(len(plan.entries[where[node, j]]) for j in range(1, r - l + 1))


def average_bandwidth(k: int, r: int, grouping: Grouping, strategy: str = "baseline") -> BandwidthReport:
    params = CodeParams(k, r)
    grouping.check(params)
    if strategy == "baseline":
        per_node = tuple(node_traffic(k, r, grouping, i) for i in range(1, k + 1))
    else:
        plan = build_plan(params, grouping, strategy)
        per_node = tuple(plan_traffic(k, r, plan, i) for i in range(1, k + 1))
    return BandwidthReport(k, r, per_node)


def total_traffic(k: int, r: int, sizes) -> int:
    """Objective sum_l s_l * (k*l + (r-l)*s_l) over all systematic nodes."""
    return sum(s * (k * l + (r - l) * s) for l, s in enumerate(sizes, 1))


def equal_group_rate(k: int, r: int, t: int) -> Fraction:
    if t < 1 or k % t:
        raise PlanError(f"formula regime violated: t={t} does not divide k={k}")
    if t > max(1, r - 1):
        raise PlanError(f"too many groups: t={t} > r-1={r - 1}")
    return rate_of_t(r, t)


def rate_of_t(r: int, t) -> Fraction:
    """(t/r + (2 - 1/r)/t) / 2 for any positive t; independent of k."""
    t = Fraction(t)
    return (t / r + (2 - Fraction(1, r)) / t) / 2


def optimal_t(r: int) -> int:
    if r < 2:
        return 0
    root = math.isqrt(2 * r - 1)
    cands = {root, root + 1} if root * root != 2 * r - 1 else {root}
    cands = sorted(c for c in cands if 1 <= c <= r - 1) or [r - 1]
    return min(cands, key=lambda t: (rate_of_t(r, t), t))


def default_grouping(k: int, r: int, t: int | None = None) -> Grouping:
    """Equal split with t defaulting to optimal_t(r), clipped to [1, k]."""
    if t is None or t == 0:
        t = optimal_t(r) or 1
        t = min(t, k)
    return make_equal_grouping(k, t)


def compositions(n: int, parts: int):
    """All ordered tuples of ``parts`` positive integers summing to n, lexicographic."""
    for cuts in combinations(range(1, n), parts - 1):
        bounds = (0,) + cuts + (n,)
        yield tuple(b - a for a, b in zip(bounds, bounds[1:]))


def brute_force_optimum(k: int, r: int):
    """Exhaustive minimiser of the total systematic repair traffic.

    Ties go to the lexicographically smallest size tuple.
    """
    if k > BRUTE_FORCE_MAX_K or r > BRUTE_FORCE_MAX_R:
        raise PlanError(f"use heuristic: k={k}, r={r} beyond enumeration bound")
    CodeParams(k, r)
    best = None
    for t in range(1, min(max(1, r - 1), k) + 1):
        for sizes in compositions(k, t):
            key = (total_traffic(k, r, sizes), sizes)
            if best is None or key < best:
                best = key
    return Grouping(best[1]), best[0]


@dataclass(frozen=True)
class ComplexityModel:
    e: int
    x: int
    per_node: tuple      # repair cost of systematic node 1..k
    repair_avg_bound: Fraction
    encoding_cost: int


def field_bits(q: int) -> int:
    if q < 2 or q & (q - 1):
        raise ValueError(f"invalid q={q}: must be a power of 2")
    return q.bit_length() - 1


def complexity_metrics(k: int, r: int, q: int, grouping: Grouping) -> ComplexityModel:
    """Elementary binary additions: e per field addition, e^2 per multiplication."""
    e = field_bits(q)
    if k + r > q:
        raise ValueError(f"invalid q={q}: need q >= k + r = {k + r}")
    grouping.check(CodeParams(k, r))
    x = k * e * e + (k - 1) * e
    s = grouping.sizes
    per_node = tuple(r * x + (r - l) * s[l - 1] * e
                     for l in (grouping.group_of(i) for i in range(1, k + 1)))
    bound = r * x + Fraction(sum((r - l) * sl * (sl + 1) * e for l, sl in enumerate(s, 1)), k + r)
    encoding = r * r * x + sum(sl * (r - l) * e for l, sl in enumerate(s, 1))
    return ComplexityModel(e, x, per_node, bound, encoding)


@dataclass(frozen=True)
class CodeRow:
    code: str
    instances: int | None
    fault_tolerance: int
    gamma: Fraction
    avg_repair_complexity: Fraction | int | None
    encoding_complexity: int | None


def compare_codes(k: int, r: int, q: int = 256, grouping: Grouping | None = None):
    """Rows for MDS, RSR, MSR and the new code, plus notices for omitted rows."""
    if r < 2:
        raise ValueError("comparison needs r >= 2")
    e = field_bits(q)
    x = k * e * e + (k - 1) * e
    rows, notices = [CodeRow("MDS", 1, r, Fraction(1), x, r * x)], []
    if r >= 3:
        m = 2 * r - 3
        rows.append(CodeRow("RSR", m, r, Fraction(r - 1, m), m * x, m * r * x + k * r * e * e + k * r * e))
    else:
        notices.append("RSR row omitted: needs r >= 3")
    rows.append(CodeRow("MSR", None, r, Fraction(k + r - 1, r * k), None, None))
    grouping = grouping or default_grouping(k, r)
    bw = average_bandwidth(k, r, grouping)
    cm = complexity_metrics(k, r, q, grouping)
    rows.append(CodeRow("New", r, r, bw.gamma_systematic, cm.repair_avg_bound, cm.encoding_cost))
    return rows, notices
