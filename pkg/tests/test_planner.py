import math
from fractions import Fraction

import pytest

from oracles import compositions_by_product, table_total
from piggyback.layout import Grouping, PlanError, build_plan, make_equal_grouping
from piggyback.mds import CodeParams
from piggyback.planner import (average_bandwidth, brute_force_optimum, compare_codes,
                               complexity_metrics, compositions, equal_group_rate,
                               optimal_t, plan_traffic, rate_of_t, total_traffic)


def test_average_bandwidth_11_6():
    rep = average_bandwidth(6, 5, Grouping((2, 2, 2)))
    assert rep.per_node == (14, 14, 18, 18, 22, 22)
    assert rep.average_systematic == 18
    assert rep.gamma_systematic == Fraction(3, 5)
    assert rep.total_systematic == 108
    assert rep.gamma_all == (Fraction(3, 5) * 6 + 5) / 11


def test_single_group_is_mds_rate():
    rep = average_bandwidth(6, 5, Grouping((6,)))
    assert rep.per_node == (30,) * 6
    assert rep.gamma_systematic == 1


def test_even_bandwidth():
    rep = average_bandwidth(6, 5, Grouping((2, 2, 2)), "even")
    assert rep.per_node == (14, 14, 17, 17, 20, 20)
    assert rep.average_systematic == 17


def test_invalid_grouping():
    with pytest.raises(PlanError):
        average_bandwidth(6, 5, Grouping((2, 2)))
    with pytest.raises(PlanError):
        average_bandwidth(6, 3, Grouping((2, 2, 2)))


def test_total_matches_node_by_node_oracle():
    for k in range(1, 10):
        for r in range(2, 7):
            for t in range(1, min(k, r - 1) + 1):
                for sizes in compositions_by_product(k, t):
                    assert total_traffic(k, r, sizes) == table_total(k, r, sizes)
                    assert average_bandwidth(k, r, Grouping(sizes)).total_systematic == table_total(k, r, sizes)


def test_equal_group_rate():
    assert equal_group_rate(6, 5, 3) == Fraction(3, 5)
    assert equal_group_rate(130, 13, 5) == Fraction(5, 13)
    with pytest.raises(PlanError, match="regime"):
        equal_group_rate(7, 5, 3)


def test_equal_group_rate_matches_bandwidth():
    for k in range(1, 25):
        for r in range(2, 9):
            for t in range(1, min(k, r - 1) + 1):
                if k % t == 0:
                    rep = average_bandwidth(k, r, make_equal_grouping(k, t))
                    assert equal_group_rate(k, r, t) == rep.gamma_systematic


def test_optimal_t():
    assert optimal_t(5) == 3
    assert optimal_t(13) == 5
    assert optimal_t(2) == 1
    assert optimal_t(1) == 0


def test_perfect_square_rate():
    for r in range(2, 200):
        root = math.isqrt(2 * r - 1)
        if root * root == 2 * r - 1:
            # sqrt(2r-1)/r as an exact rational
            assert rate_of_t(r, optimal_t(r)) == Fraction(root, r)


def test_discrete_minimizer_adjacent_to_sqrt():
    for r in range(2, 101):
        vals = [rate_of_t(r, t) for t in range(1, r)]
        best = min(vals)
        assert rate_of_t(r, optimal_t(r)) == best
        assert abs(optimal_t(r) - math.sqrt(2 * r - 1)) < 1
        # unimodal: decreases then increases
        i = vals.index(best)
        assert all(a > b for a, b in zip(vals[:i], vals[1:i + 1]))
        assert all(a <= b for a, b in zip(vals[i:], vals[i + 1:]))


def test_compositions_agree_with_product_oracle():
    for n in range(1, 11):
        for t in range(1, n + 1):
            assert sorted(compositions(n, t)) == sorted(compositions_by_product(n, t))


def test_brute_force_examples():
    g, total = brute_force_optimum(2, 2)
    assert g.sizes == (2,) and total == 8
    g, total = brute_force_optimum(6, 5)
    assert total <= 108
    assert total == min(table_total(6, 5, s) for t in range(1, 5) for s in compositions_by_product(6, t))
    with pytest.raises(PlanError, match="heuristic"):
        brute_force_optimum(15, 5)


def test_brute_force_tie_break():
    k, r = 6, 5
    g, total = brute_force_optimum(k, r)
    ties = sorted(s for t in range(1, r) for s in compositions_by_product(k, t)
                  if table_total(k, r, s) == total)
    assert g.sizes == ties[0]


def test_complexity_examples():
    cm = complexity_metrics(6, 5, 256, Grouping((2, 2, 2)))
    assert cm.e == 8
    assert cm.x == 424
    assert cm.per_node[0] == 2184
    assert cm.encoding_cost == 10744
    # rx + sum (r-l) s_l (s_l+1) e / (k+r)
    assert cm.repair_avg_bound == 5 * 424 + Fraction((4 + 3 + 2) * 2 * 3 * 8, 11)
    with pytest.raises(ValueError, match="invalid q"):
        complexity_metrics(6, 5, 100, Grouping((2, 2, 2)))


def test_complexity_average_identity():
    # average of per-node systematic costs plus parity costs equals the closed form
    for k, r, sizes in [(6, 5, (2, 2, 2)), (7, 4, (3, 2, 2)), (10, 6, (1, 4, 5))]:
        cm = complexity_metrics(k, r, 256, Grouping(sizes))
        parity = r * r * cm.x + sum((r - l) * s * cm.e for l, s in enumerate(sizes, 1))
        assert Fraction(sum(cm.per_node) + parity, k + r) == cm.repair_avg_bound


def test_compare_codes():
    rows, notices = compare_codes(6, 5)
    g = {row.code: row for row in rows}
    assert g["MDS"].gamma == 1 and g["MDS"].instances == 1
    assert g["RSR"].gamma == Fraction(4, 7) and g["RSR"].instances == 7
    assert g["MSR"].gamma == Fraction(1, 3)
    assert g["New"].gamma == Fraction(3, 5) and g["New"].instances == 5
    assert all(row.fault_tolerance == 5 for row in rows)
    assert notices == []
    rows, _ = compare_codes(130, 13)
    g = {row.code: row for row in rows}
    assert g["New"].gamma == Fraction(5, 13) < g["RSR"].gamma == Fraction(12, 23)


def test_compare_small_r():
    rows, notices = compare_codes(6, 2)
    assert "RSR" not in {row.code for row in rows}
    assert notices
    with pytest.raises(ValueError):
        compare_codes(6, 1)


@pytest.mark.parametrize("strategy", ["baseline", "even"])
def test_plan_traffic_group_sums(strategy):
    for k, r, t in [(6, 5, 3), (9, 6, 4), (12, 6, 5), (7, 4, 2)]:
        g = make_equal_grouping(k, t)
        plan = build_plan(CodeParams(k, r), g, strategy)
        for l, members in enumerate(g.groups, 1):
            groups = plan.column(r - l + 1).values()
            got = sum(plan_traffic(k, r, plan, i) for i in members)
            assert got == k * l * len(members) + sum(len(s) ** 2 for s in groups)
