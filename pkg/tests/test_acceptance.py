"""Acceptance suite: one test per exit criterion, each printing a PASS/FAIL
line with its runtime and enforcing the stated time limit.

Run with ``pytest tests/test_acceptance.py -v -s`` to see the per-criterion
lines as they complete.
"""

import itertools
import math
import random
import time
from fractions import Fraction

from conftest import random_mixed_protocol
from nonlocal_lab.cyclic import (
    INFINITE,
    MultisetZ,
    Subgroup,
    coins_bound_sweep,
    multiset_sum,
    random_subsets,
    subgroup_bias,
    verify_addition_theorem,
)
from nonlocal_lab.ghz import (
    GhzInstance,
    broadcast_strategy,
    default_k,
    equivalence_max_deviation,
    ghz_problem,
)
from nonlocal_lab.model import (
    all_click,
    error_probability,
    evaluate_mixed_lhv,
    mixed_lhv_metrics,
    uniform_problem,
)
from nonlocal_lab.protocol import (
    MixedProtocol,
    cost,
    induced_distribution,
    mixed_cost,
    to_detector_model,
)
from nonlocal_lab.rectangles import (
    EmptyIntersection,
    Rectangle,
    advantage_bias_relation,
    involvement,
    iter_rectangles,
    rectangle_tradeoff_check,
    residue_counts,
    scan_rectangles,
)
from nonlocal_lab.search import best_deterministic_error, tradeoff_table

F = Fraction


class Criterion:
    """Timed scope that prints one PASS/FAIL line and enforces the limit."""

    def __init__(self, number: int, name: str, limit_s: float):
        self.number = number
        self.name = name
        self.limit = limit_s

    def __enter__(self):
        self.start = time.perf_counter()
        return self

    def __exit__(self, exc_type, exc, tb):
        elapsed = time.perf_counter() - self.start
        status = "PASS" if exc_type is None and elapsed < self.limit else "FAIL"
        print(
            f"[criterion {self.number}] {self.name}: {status} "
            f"({elapsed:.1f}s / limit {self.limit:.0f}s)"
        )
        if exc_type is None:
            assert elapsed < self.limit, (
                f"criterion {self.number} exceeded its {self.limit}s limit"
            )
        return False


def test_criterion_1_ghz_equivalence():
    with Criterion(1, "GHZ quantum/target equivalence", 30.0):
        for n in range(2, 7):
            for k in (2, 4, 8):
                dev = equivalence_max_deviation(GhzInstance(n=n, k=k))
                assert dev < 1e-12, (n, k, dev)


def test_criterion_2_mermin_figure():
    with Criterion(2, "exhaustive minimum classical error", 1.0):
        assert best_deterministic_error(
            ghz_problem(GhzInstance(n=3, k=2))
        ).optimum == F(1, 4)
        assert best_deterministic_error(
            ghz_problem(GhzInstance(n=2, k=2))
        ).optimum == 0


def test_criterion_3_detector_conversion_round_trip():
    with Criterion(3, "communication-to-detector round trip", 30.0):
        rng = random.Random(1234)
        for trial in range(100):
            n = rng.randint(2, 4)
            mp = random_mixed_protocol(rng, n, 2, max_depth=3)
            c = mixed_cost(mp)
            slot = F(1, 2**c)
            detector = to_detector_model(mp)
            problem = uniform_problem(n, 2)
            induced = induced_distribution(mp, problem)
            d = evaluate_mixed_lhv(detector, problem)
            for x in itertools.product(range(2), repeat=n):
                row = d.probs[x]
                clicks = sum(p for a, p in row.items() if all_click(a))
                assert clicks == slot, (trial, x)
                conditioned = {
                    a: p / slot for a, p in row.items() if all_click(a)
                }
                assert conditioned == induced.probs[x], (trial, x)


def test_criterion_4_tradeoff_inequality_soundness():
    with Criterion(4, "rectangle trade-off inequality soundness", 300.0):
        inst = GhzInstance(n=3, k=2)
        problem = ghz_problem(inst)
        deltas = (F(1, 2), F(3, 4), F(7, 8))
        scans = [scan_rectangles(inst, d, mode="lattice") for d in deltas]
        assert all(s.exact for s in scans)
        rng = random.Random(4321)
        for trial in range(1000):
            mp = random_mixed_protocol(rng, 3, 2, max_depth=3)
            c = mixed_cost(mp)
            induced = induced_distribution(mp, problem)
            eps = error_probability(induced, problem)
            met = mixed_lhv_metrics(to_detector_model(mp), problem)
            assert met.eta_n == F(1, 2**c) and met.eps == eps
            for s in scans:
                # the protocol itself: c bits, every detector clicks
                assert rectangle_tradeoff_check(
                    s.delta, s.r_cap, c, F(1), eps, 2, 3
                ), (trial, s.delta)
                # the converted model: no bits, 2^-c click probability
                assert rectangle_tradeoff_check(
                    s.delta, s.r_cap, 0, met.eta_n, met.eps, 2, 3
                ), (trial, s.delta)


def test_criterion_5_coin_counting_bound():
    with Criterion(5, "coin-counting near-uniformity bound", 60.0):
        for big_k in (2, 4, 8, 16):
            results = coins_bound_sweep(big_k, 4096)
            assert results[0][0] == big_k * big_k
            assert results[-1][0] == 4096
            assert all(ok for _, ok in results), big_k


def test_criterion_6_addition_theorem_and_monotonicity():
    with Criterion(6, "addition-theorem bias bound", 120.0):
        for big_t, r in ((4, 6400), (8, 4096)):
            for seed in range(20):
                rng = random.Random(1000 * big_t + seed)
                rep = verify_addition_theorem(
                    big_t, random_subsets(big_t, r, rng)
                )
                assert rep.passed, (big_t, r, seed, rep.bias)
        # adding any multiset never increases a finite subgroup bias
        for big_t in (2, 4, 8, 16):
            rng = random.Random(77 + big_t)
            done = 0
            while done < 1000:
                a = MultisetZ(
                    modulus=big_t,
                    mult=tuple(rng.randint(1, 8) for _ in range(big_t)),
                )
                mult_b = [rng.randint(0, 8) for _ in range(big_t)]
                mult_b[rng.randrange(big_t)] += 1
                b = MultisetZ(modulus=big_t, mult=tuple(mult_b))
                h = Subgroup(modulus=big_t, generator=rng.randrange(1, big_t))
                bias_a = subgroup_bias(a, h)
                if bias_a == INFINITE:
                    continue
                assert subgroup_bias(multiset_sum(a, b), h) <= bias_a
                done += 1


def test_criterion_7_rectangle_kernel():
    with Criterion(7, "rectangle counting kernel", 300.0):
        rng = random.Random(9)
        for _ in range(1000):
            n = rng.randint(1, 6)
            k = rng.randint(2, 8)
            sets = []
            size = 1
            for _ in range(n):
                s = frozenset(rng.sample(range(k), rng.randint(1, k)))
                if size * len(s) > 2**16:
                    s = frozenset({rng.randrange(k)})
                size *= len(s)
                sets.append(s)
            r = Rectangle(k=k, sets=tuple(sets))
            assert r.size <= 2**16
            modulus = rng.randint(1, 2 * k)
            brute = {ρ: 0 for ρ in range(modulus)}
            for x in itertools.product(*[sorted(s) for s in sets]):
                brute[sum(x) % modulus] += 1
            assert residue_counts(r, modulus) == brute
        for n in (3, 4):
            inst = GhzInstance(n=n, k=2)
            for r in iter_rectangles(inst):
                m = involvement(r)
                assert r.size <= 2**m  # k = 2
                try:
                    rep = advantage_bias_relation(r, inst)
                except EmptyIntersection:
                    continue
                assert rep.passed


def test_criterion_8_broadcast_protocol():
    with Criterion(8, "broadcast strategy and conversion", 300.0):
        for n in range(2, 7):
            for k in (2, 4):
                inst = GhzInstance(n=n, k=k)
                problem = ghz_problem(inst)
                tree = broadcast_strategy(inst)
                c = cost(tree)
                assert c == n * math.ceil(math.log2(k))
                mp = MixedProtocol(components=((tree, F(1)),))
                induced = induced_distribution(mp, problem)
                assert error_probability(induced, problem) == 0
                met = mixed_lhv_metrics(to_detector_model(mp), problem)
                assert met.eta_n == F(1, 2**c), (n, k)
                assert met.eps == 0


def test_criterion_9_desk_scale_gap_reports():
    # The asymptotic magnitudes themselves are out of reach at desk scale;
    # this substitute emits the achievable-vs-bound tables at n in {8, 16}
    # and checks they are internally consistent (criteria 4-7 carry the
    # inequality soundness).
    with Criterion(9, "desk-scale trade-off gap report", 300.0):
        for n in (8, 16):
            k = default_k(n)
            assert k == 2
            inst = GhzInstance(n=n, k=k)
            c_grid = [0, 2, 4, n * math.ceil(math.log2(k))]
            eps_grid = [F(0), F(1, 10)]
            table = tradeoff_table(inst, c_grid, eps_grid, lp_budget=0)
            assert all(s.exact for s in table.scans)
            gaps = []
            for row in table.rows:
                if row.achievable_eta_n is None or row.bound_eta_n is None:
                    continue
                assert row.achievable_eta_n <= row.bound_eta_n, row
                gaps.append(
                    (row.c, row.eps, float(row.bound_eta_n / row.achievable_eta_n))
                )
            assert gaps
            widest = max(gaps, key=lambda g: g[2])
            print(
                f"    n={n}: widest bound/achievable ratio "
                f"{widest[2]:.3g} at c={widest[0]}, eps={widest[1]}"
            )
