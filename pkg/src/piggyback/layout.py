"""Grouping of systematic nodes and the piggyback placement plan.

Indices are 1-based throughout: node i in [1, k], instance/column j in
[1, r], parity row p in [1, r] (stored on node k + p).
"""

import re
from dataclasses import dataclass, field

from .mds import CodeParams

STRATEGIES = ("baseline", "even")


class PlanError(ValueError):
    pass


@dataclass(frozen=True)
class Grouping:
    sizes: tuple

    def __post_init__(self):
        object.__setattr__(self, "sizes", tuple(int(s) for s in self.sizes))
        if not self.sizes or any(s < 1 for s in self.sizes):
            raise PlanError(f"invalid partition: sizes {self.sizes}")

    @property
    def t(self) -> int:
        return len(self.sizes)

    @property
    def k(self) -> int:
        return sum(self.sizes)

    @property
    def groups(self) -> list:
        """S_1..S_t as contiguous ranges of node indices."""
        out, start = [], 1
        for s in self.sizes:
            out.append(range(start, start + s))
            start += s
        return out

    def group_of(self, node: int) -> int:
        for l, g in enumerate(self.groups, 1):
            if node in g:
                return l
        raise PlanError(f"node {node} is not systematic")

    def check(self, params: CodeParams):
        if self.k != params.k:
            raise PlanError(f"invalid partition: sizes sum to {self.k}, k={params.k}")
        # r == 1 degenerates to a single group and no piggybacks
        if self.t > max(1, params.r - 1):
            raise PlanError(f"too many groups: t={self.t} > r-1={params.r - 1}")


def make_equal_grouping(k: int, t: int) -> Grouping:
    if t < 1 or t > k:
        raise PlanError(f"invalid partition: t={t} for k={k}")
    q, rem = divmod(k, t)
    return Grouping(tuple(q + 1 if l < rem else q for l in range(t)))


@dataclass(frozen=True)
class PiggybackPlan:
    strategy: str
    # (column, parity row) -> sorted tuple of (node, instance) sources
    entries: dict = field(default_factory=dict)
    group_of_node: dict = field(default_factory=dict)

    def locate(self):
        """Map each piggybacked source (node, instance) to its (column, parity row)."""
        where = {}
        for cell, srcs in self.entries.items():
            for s in srcs:
                where[s] = cell
        return where

    def column(self, c: int) -> dict:
        return {p: srcs for (cc, p), srcs in self.entries.items() if cc == c}

    def to_text(self) -> str:
        lines = []
        for (c, p), srcs in sorted(self.entries.items()):
            body = ",".join(f"({i},{j})" for i, j in srcs)
            lines.append(f"col={c} row={p} sources={body}")
        return "\n".join(lines) + ("\n" if lines else "")


_LINE = re.compile(r"col=(\d+) row=(\d+) sources=(.*)")
_PAIR = re.compile(r"\((\d+),(\d+)\)")


def plan_from_text(text: str, strategy: str, grouping: Grouping) -> PiggybackPlan:
    entries = {}
    for line in text.splitlines():
        if not line.strip():
            continue
        m = _LINE.fullmatch(line.strip())
        if not m:
            raise PlanError(f"bad plan line: {line!r}")
        srcs = tuple(sorted((int(i), int(j)) for i, j in _PAIR.findall(m.group(3))))
        entries[int(m.group(1)), int(m.group(2))] = srcs
    return PiggybackPlan(strategy, entries, _node_groups(grouping))


def _node_groups(grouping: Grouping) -> dict:
    return {i: l for l, g in enumerate(grouping.groups, 1) for i in g}


def _even_groups(symbols, r):
    """Cut a node-cyclic symbol list into r-1 groups whose sizes differ by at most one."""
    n = len(symbols)
    t_f, n_c = divmod(n, r - 1)
    t_c = t_f + (n_c > 0)
    sizes = [t_c] * n_c + [t_f] * (r - 1 - n_c)
    out, pos = [], 0
    for s in sizes:
        out.append(symbols[pos:pos + s])
        pos += s
    return out


def build_plan(params: CodeParams, grouping: Grouping, strategy: str = "baseline") -> PiggybackPlan:
    if strategy not in STRATEGIES:
        raise PlanError(f"unknown strategy {strategy!r}")
    grouping.check(params)
    r = params.r
    node_groups = _node_groups(grouping)
    if r == 1:
        return PiggybackPlan(strategy, {}, node_groups)
    entries = {}
    for l, members in enumerate(grouping.groups, 1):
        c = r - l + 1
        if strategy == "baseline":
            for j in range(1, c):
                entries[c, j + 1] = tuple((i, j) for i in members)
        else:
            cyclic = [(i, j) for j in range(1, c) for i in members]
            for p, grp in enumerate(_even_groups(cyclic, r), 2):
                if grp:
                    entries[c, p] = tuple(sorted(grp))
    return PiggybackPlan(strategy, entries, node_groups)


def validate_plan(params: CodeParams, grouping: Grouping, plan: PiggybackPlan) -> list:
    """Return a list of human-readable violations; empty when the plan is valid."""
    k, r = params.k, params.r
    bad = []
    try:
        grouping.check(params)
    except PlanError as exc:
        return [str(exc)]

    seen = {}
    for (c, p), srcs in sorted(plan.entries.items()):
        if not (2 <= c <= r and 2 <= p <= r):
            bad.append(f"cell out of range: col={c} row={p}")
        if not srcs:
            bad.append(f"empty entry: col={c} row={p}")
        nodes = [i for i, _ in srcs]
        if len(set(nodes)) != len(nodes):
            bad.append(f"duplicate node in group: col={c} row={p}")
        for i, j in srcs:
            if j >= c:
                bad.append(f"piggybacking condition: ({i},{j}) at col={c}")
            seen.setdefault((i, j), []).append((c, p))

    for i in range(1, k + 1):
        l = grouping.group_of(i)
        home = r - l + 1
        for j in range(1, r + 1):
            cells = seen.get((i, j), [])
            if j <= r - l:
                if len(cells) != 1:
                    bad.append(f"coverage: ({i},{j}) placed {len(cells)} times")
                elif cells[0][0] != home:
                    bad.append(f"misplaced: ({i},{j}) at col={cells[0][0]}, expected col={home}")
            elif cells:
                bad.append(f"coverage: ({i},{j}) must not be piggybacked")
    for (i, j) in seen:
        if not 1 <= i <= k:
            bad.append(f"unknown source node {i}")

    if plan.strategy == "baseline":
        if plan.entries != build_plan(params, grouping, "baseline").entries:
            bad.append("baseline layout mismatch")
    elif plan.strategy == "even":
        for c in sorted({c for c, _ in plan.entries}):
            sizes = [len(s) for s in plan.column(c).values()]
            n = sum(sizes)
            # empty rows count as size-0 groups when fewer than r-1 symbols exist
            if len(sizes) < r - 1 and n >= r - 1:
                sizes += [0] * (r - 1 - len(sizes))
            if max(sizes) - min(sizes) > 1:
                bad.append(f"uneven column: col={c} sizes={sorted(sizes)}")
    else:
        bad.append(f"unknown strategy {plan.strategy!r}")
    return bad
