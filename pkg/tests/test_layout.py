import random

import pytest
from hypothesis import given, settings, strategies as st

from piggyback.layout import (Grouping, PiggybackPlan, PlanError, build_plan,
                              make_equal_grouping, plan_from_text, validate_plan)
from piggyback.mds import CodeParams

# parity rows 2..5 of the (11,6) example, columns 3..5, read off the table
TABLE_V = """\
col=3 row=2 sources=(5,1),(6,1)
col=3 row=3 sources=(5,2),(6,2)
col=4 row=2 sources=(3,1),(4,1)
col=4 row=3 sources=(3,2),(4,2)
col=4 row=4 sources=(3,3),(4,3)
col=5 row=2 sources=(1,1),(2,1)
col=5 row=3 sources=(1,2),(2,2)
col=5 row=4 sources=(1,3),(2,3)
col=5 row=5 sources=(1,4),(2,4)
"""

P11 = CodeParams(6, 5)
G222 = Grouping((2, 2, 2))


def test_equal_grouping():
    g = make_equal_grouping(6, 3)
    assert g.sizes == (2, 2, 2)
    assert [list(s) for s in g.groups] == [[1, 2], [3, 4], [5, 6]]
    assert make_equal_grouping(6, 1).sizes == (6,)
    assert make_equal_grouping(7, 3).sizes == (3, 2, 2)
    for bad in (0, 7):
        with pytest.raises(PlanError, match="invalid partition"):
            make_equal_grouping(6, bad)


def test_group_of():
    g = Grouping((3, 2, 2))
    assert [g.group_of(i) for i in range(1, 8)] == [1, 1, 1, 2, 2, 3, 3]


def test_baseline_reproduces_table_v():
    plan = build_plan(P11, G222, "baseline")
    assert plan.to_text() == TABLE_V
    assert validate_plan(P11, G222, plan) == []


def test_even_plan_11_6():
    plan = build_plan(P11, G222, "even")
    col3 = plan.column(3)
    assert sorted(col3) == [2, 3, 4, 5]
    assert sorted(col3.values()) == [((5, 1),), ((5, 2),), ((6, 1),), ((6, 2),)]
    col4 = plan.column(4)
    assert sorted(len(s) for s in col4.values()) == [1, 1, 2, 2]
    assert [len(col4[p]) for p in (2, 3, 4, 5)] == [2, 2, 1, 1]
    for srcs in col4.values():
        assert len({i for i, _ in srcs}) == len(srcs)
    assert plan.column(5) == build_plan(P11, G222, "baseline").column(5)
    assert validate_plan(P11, G222, plan) == []


@pytest.mark.parametrize("strategy", ["baseline", "even"])
def test_piggybacking_condition(strategy):
    plan = build_plan(P11, G222, strategy)
    for (c, _), srcs in plan.entries.items():
        assert all(j < c for _, j in srcs)


def test_errors():
    with pytest.raises(PlanError, match="too many groups"):
        build_plan(CodeParams(6, 3), make_equal_grouping(6, 3))
    with pytest.raises(PlanError):
        build_plan(P11, G222, "random")
    plan = build_plan(CodeParams(4, 1), Grouping((4,)))
    assert plan.entries == {}


def test_violation_piggybacking_condition():
    base = build_plan(P11, G222, "baseline")
    entries = dict(base.entries)
    entries[3, 2] = ((5, 3), (6, 1))
    bad = validate_plan(P11, G222, PiggybackPlan("baseline", entries, base.group_of_node))
    assert any(v.startswith("piggybacking condition") for v in bad)


def test_violation_duplicate_node():
    even = build_plan(P11, G222, "even")
    entries = dict(even.entries)
    entries[4, 2] = ((3, 1), (3, 2))
    entries[4, 3] = ((4, 1), (4, 2))
    bad = validate_plan(P11, G222, PiggybackPlan("even", entries, even.group_of_node))
    assert any(v.startswith("duplicate node in group") for v in bad)


def test_violation_coverage():
    base = build_plan(P11, G222, "baseline")
    entries = dict(base.entries)
    del entries[5, 5]
    bad = validate_plan(P11, G222, PiggybackPlan("baseline", entries, base.group_of_node))
    assert any("coverage" in v for v in bad)


def test_text_roundtrip():
    for strategy in ("baseline", "even"):
        plan = build_plan(P11, G222, strategy)
        assert plan_from_text(plan.to_text(), strategy, G222).entries == plan.entries
    assert plan_from_text(TABLE_V, "baseline", G222).entries == build_plan(P11, G222).entries


def grids():
    for k in range(1, 13):
        for r in range(2, 7):
            for t in range(1, min(r - 1, k) + 1):
                yield k, r, t


@pytest.mark.parametrize("strategy", ["baseline", "even"])
def test_plans_valid_and_counts(strategy):
    for k, r, t in grids():
        params, g = CodeParams(k, r), make_equal_grouping(k, t)
        plan = build_plan(params, g, strategy)
        assert validate_plan(params, g, plan) == [], (k, r, t)
        for c in range(1, r + 1):
            n = sum(len(s) for s in plan.column(c).values())
            expected = (c - 1) * g.sizes[r - c] if c >= r - t + 1 else 0
            assert n == expected, (k, r, t, c)


@settings(max_examples=60)
@given(st.integers(1, 12), st.integers(2, 8), st.data())
def test_even_sum_of_squares_ordering_independent(k, r, data):
    t = data.draw(st.integers(1, min(k, r - 1)))
    g = make_equal_grouping(k, t)
    plan = build_plan(CodeParams(k, r), g, "even")
    for c in {c for c, _ in plan.entries}:
        groups = list(plan.column(c).values())
        sizes = [len(s) for s in groups]
        symbols = [s for grp in groups for s in grp]
        random.Random(data.draw(st.integers(0, 10**6))).shuffle(symbols)
        recut, pos = [], 0
        for n in sizes:
            recut.append(symbols[pos:pos + n])
            pos += n
        assert sum(len(x) ** 2 for x in recut) == sum(n * n for n in sizes)
        # cost of repairing every symbol in this column = sum of squared group sizes
        assert sum(len(grp) for grp in groups for _ in grp) == sum(n * n for n in sizes)
