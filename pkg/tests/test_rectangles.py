"""Rectangle kernel: residue convolution vs brute force, bias/advantage
correspondence, involvement, scans, and the trade-off inequality."""

import itertools
import random
from fractions import Fraction

import pytest

from nonlocal_lab.errors import (
    BudgetExceeded,
    DeltaOutOfRange,
    EmptyIntersection,
    EmptyWeight,
    InvalidInput,
)
from nonlocal_lab.ghz import GhzInstance, ghz_problem
from nonlocal_lab.rectangles import (
    INFINITE,
    Rectangle,
    advantage,
    advantage_bias_relation,
    bias,
    involvement,
    iter_rectangles,
    rectangle_stats,
    rectangle_tradeoff_check,
    residue_counts,
    scan_rectangles,
    stats_to_csv,
)

F = Fraction


def brute_counts(r: Rectangle, modulus: int) -> dict:
    counts = {residue: 0 for residue in range(modulus)}
    for x in itertools.product(*[sorted(s) for s in r.sets]):
        counts[sum(x) % modulus] += 1
    return counts


def test_residue_counts_examples():
    cube = Rectangle(k=2, sets=(frozenset({0, 1}),) * 3)
    assert residue_counts(cube, 4) == {0: 1, 1: 3, 2: 3, 3: 1}
    origin = Rectangle(k=3, sets=(frozenset({0}),) * 5)
    assert residue_counts(origin, 7) == {i: (1 if i == 0 else 0) for i in range(7)}
    square = Rectangle(k=2, sets=(frozenset({0, 1}),) * 2)
    assert residue_counts(square, 2) == {0: 2, 1: 2}


def test_residue_counts_against_brute_force():
    rng = random.Random(13)
    for _ in range(300):
        n = rng.randint(1, 5)
        k = rng.randint(2, 6)
        sets = tuple(
            frozenset(rng.sample(range(k), rng.randint(1, k))) for _ in range(n)
        )
        r = Rectangle(k=k, sets=sets)
        if r.size > 2**16:
            continue
        modulus = rng.randint(1, 2 * k)
        assert residue_counts(r, modulus) == brute_counts(r, modulus)


def test_advantage_examples():
    inst = GhzInstance(n=3, k=2)
    problem = ghz_problem(inst)
    point = Rectangle(k=2, sets=(frozenset({0}),) * 3)
    assert advantage(point, (0, 0, 0), problem) == 1
    cube = Rectangle(k=2, sets=(frozenset({0, 1}),) * 3)
    assert advantage(cube, (0, 0, 0), problem) == F(1, 4)
    empty = Rectangle(k=2, sets=(frozenset({1}), frozenset({0}), frozenset({0})))
    with pytest.raises(EmptyWeight):
        advantage(empty, (0, 0, 0), problem)
    with pytest.raises(InvalidInput):
        advantage(cube, (0, None, 0), problem)


def test_bias_examples():
    inst = GhzInstance(n=3, k=2)
    cube = Rectangle(k=2, sets=(frozenset({0, 1}),) * 3)
    assert bias(cube, inst) == 2
    point = Rectangle(k=2, sets=(frozenset({0}),) * 3)
    assert bias(point, inst) == INFINITE
    balanced = Rectangle(
        k=2, sets=(frozenset({0, 1}), frozenset({0, 1}), frozenset({0}))
    )
    assert bias(balanced, inst) == 0
    empty = Rectangle(k=2, sets=(frozenset({1}), frozenset({0}), frozenset({0})))
    with pytest.raises(EmptyIntersection):
        bias(empty, inst)


def test_advantage_bias_relation_examples():
    inst = GhzInstance(n=3, k=2)
    balanced = Rectangle(
        k=2, sets=(frozenset({0, 1}), frozenset({0, 1}), frozenset({0}))
    )
    rep = advantage_bias_relation(balanced, inst)
    assert rep.bias == 0 and rep.max_advantage == F(1, 2) and rep.passed

    cube = Rectangle(k=2, sets=(frozenset({0, 1}),) * 3)
    rep = advantage_bias_relation(cube, inst)
    assert rep.bias == 2 and rep.max_advantage == F(3, 4) and rep.passed

    point = Rectangle(k=2, sets=(frozenset({0}),) * 3)
    rep = advantage_bias_relation(point, inst)
    assert rep.bias == INFINITE and rep.max_advantage == 1 and rep.passed


def test_advantage_bias_relation_all_rectangles():
    for n, k in [(3, 2), (4, 2), (2, 3)]:
        inst = GhzInstance(n=n, k=k)
        for r in iter_rectangles(inst):
            try:
                rep = advantage_bias_relation(r, inst)
            except EmptyIntersection:
                continue
            assert rep.passed
            assert rep.cross_checked


def test_involvement_examples():
    assert involvement(Rectangle(k=2, sets=(frozenset({0}), frozenset({0, 1}), frozenset({0, 1})))) == 2
    assert involvement(Rectangle(k=2, sets=(frozenset({0}),) * 4)) == 0
    full = Rectangle(k=3, sets=(frozenset({0, 1, 2}),) * 3)
    assert involvement(full) == 3 and full.size == 27


def test_minuscule_size_bound_everywhere():
    for n, k in [(3, 2), (4, 2), (2, 4)]:
        inst = GhzInstance(n=n, k=k)
        for r in iter_rectangles(inst):
            m = involvement(r)
            assert r.size <= k**m  # log2|R| <= m*log2(k), exactly
            if all(len(s) in (1, k) for s in r.sets):
                assert r.size == k**m  # equality only for full involved sets


def test_tradeoff_check_examples():
    assert rectangle_tradeoff_check(F(1, 2), F(1, 4), 0, F(1), F(0), 2, 3)
    # an error budget at or past 1-delta makes the left side nonpositive
    assert rectangle_tradeoff_check(F(1, 2), F(0), 0, F(1), F(1, 2), 2, 3)
    assert rectangle_tradeoff_check(F(1, 2), F(0), 0, F(1), F(3, 4), 2, 3)
    with pytest.raises(DeltaOutOfRange):
        rectangle_tradeoff_check(F(1), F(1), 0, F(1), F(0), 2, 3)
    with pytest.raises(DeltaOutOfRange):
        rectangle_tradeoff_check(F(-1, 2), F(1), 0, F(1), F(0), 2, 3)


def test_scan_delta_zero_is_full_weight():
    for mode in ("lattice", "canonical"):
        res = scan_rectangles(GhzInstance(n=3, k=2), F(0), mode=mode)
        assert res.r_cap == 1 and res.exact


def test_scan_delta_one_single_point_weight_small_instance():
    inst = GhzInstance(n=2, k=2)
    res = scan_rectangles(inst, F(1), mode="lattice")
    assert res.r_cap == F(1, 2)  # equals the single-point weight 1/k^(n-1)


def test_scan_modes_agree():
    for n, k in [(2, 2), (3, 2), (4, 2), (3, 4), (2, 4), (3, 3)]:
        inst = GhzInstance(n=n, k=k)
        for delta in (F(0), F(1, 2), F(3, 4), F(7, 8), F(1)):
            a = scan_rectangles(inst, delta, mode="lattice")
            b = scan_rectangles(inst, delta, mode="canonical")
            assert a.r_cap == b.r_cap
            s = scan_rectangles(
                inst, delta, mode="sample", samples=500, rng=random.Random(1)
            )
            assert not s.exact
            assert s.r_cap <= a.r_cap


def test_scan_witness_qualifies():
    inst = GhzInstance(n=3, k=2)
    res = scan_rectangles(inst, F(7, 8), mode="canonical")
    assert res.r_cap == F(1, 2)
    r = Rectangle(k=2, sets=res.witness)
    counts = residue_counts(r, 4)
    n0, n1 = counts[0], counts[2]
    assert F(max(n0, n1), n0 + n1) >= F(7, 8)
    assert F(n0 + n1, 4) == res.r_cap


def test_scan_budget_exceeded():
    with pytest.raises(BudgetExceeded):
        scan_rectangles(GhzInstance(n=6, k=2), F(1, 2), budget=10, mode="lattice")


def test_full_involvement_bias_decreases_with_party_count():
    # deterministic parity-class counts over all singleton offsets
    def worst_bias(n_parties: int, involved: int) -> Fraction:
        inst = GhzInstance(n=n_parties, k=2)
        worst = F(0)
        for offset_parity in range(4):
            sets = [frozenset({0, 1})] * involved + [frozenset({0})] * (
                n_parties - involved
            )
            counts = residue_counts(Rectangle(k=2, sets=tuple(sets)), 4)
            n0 = counts[(-offset_parity) % 4]
            n1 = counts[(2 - offset_parity) % 4]
            if n0 + n1 == 0:
                continue
            if min(n0, n1) == 0:
                return INFINITE
            worst = max(worst, F(max(n0, n1), min(n0, n1)) - 1)
        return worst

    series = [worst_bias(32, m) for m in (4, 8, 16, 32)]
    assert all(b != INFINITE for b in series)
    assert all(a > b for a, b in zip(series, series[1:]))

    full8 = bias(Rectangle(k=2, sets=(frozenset({0, 1}),) * 8), GhzInstance(n=8, k=2))
    full32 = bias(
        Rectangle(k=2, sets=(frozenset({0, 1}),) * 32), GhzInstance(n=32, k=2)
    )
    assert full32 < full8
    assert full8 == F(2, 7)  # (72-56)/56 from the mod-4 binomial classes


def test_stats_and_csv():
    inst = GhzInstance(n=3, k=2)
    stats = [
        rectangle_stats(r, inst)
        for r in iter_rectangles(inst)
        if sum(residue_counts(r, 4)[i] for i in (0, 2)) > 0
    ]
    text = stats_to_csv(stats)
    lines = text.strip().splitlines()
    assert lines[0].startswith("sets,size,involvement")
    assert len(lines) == len(stats) + 1
    cube = rectangle_stats(Rectangle(k=2, sets=(frozenset({0, 1}),) * 3), inst)
    assert cube.n0 == 1 and cube.n1 == 3 and cube.bias == 2
    assert cube.advantage_even == F(1, 4) and cube.advantage_odd == F(3, 4)
    assert cube.mu_weight == 1
    assert sum(cube.counts.values()) == cube.size
