#!/usr/bin/env python3
"""Why large rectangles cannot favor one parity class: cyclic-group sums.

Summing many subsets of Z_T (each with at least two elements) produces a
multiset that is nearly uniform along the order-2 subgroup {0, T/2}. The
underlying engine is binomial: tossing s coins and reducing the head count
mod K is almost uniform once s >= K**2. Everything here is verified in exact
big-integer arithmetic.
"""

import random
from fractions import Fraction

from nonlocal_lab import (
    MultisetZ,
    Subgroup,
    coin_counts,
    multiset_sum,
    random_subsets,
    repeated_pair_sum,
    subgroup_bias,
    verify_addition_theorem,
    verify_size2_sets,
)


def main() -> None:
    print("Coin counting: heads mod K over all 2^s coin sequences.")
    for s, big_k in ((4, 2), (16, 4), (64, 8)):
        counts = coin_counts(s, big_k)
        spread = max(counts) / min(counts)
        print(f"  s={s:3d}, K={big_k}: spread max/min = {spread:.6f}")

    print("\nRepeated pair sums land on a subgroup with binomial weights:")
    ms = repeated_pair_sum(2, 3, 4)
    print(f"  {{0,2}} summed 3 times over Z_4 -> multiplicities {ms.mult}")
    h = Subgroup(modulus=4, generator=2)
    print(f"  bias along <2> = {subgroup_bias(ms, h)}")

    print("\nAdding any multiset never increases a finite bias:")
    rng = random.Random(11)
    a = MultisetZ(modulus=8, mult=tuple(rng.randint(1, 6) for _ in range(8)))
    b = MultisetZ(modulus=8, mult=tuple(rng.randint(1, 6) for _ in range(8)))
    h8 = Subgroup(modulus=8, generator=4)
    print(f"  bias(A)   = {subgroup_bias(a, h8)}")
    print(f"  bias(A+B) = {subgroup_bias(multiset_sum(a, b), h8)}")

    print("\nFull verification on random subset families (exact comparisons,")
    print("square roots eliminated by squaring):")
    for big_t, r in ((4, 6400), (8, 4096)):
        sets = random_subsets(big_t, r, random.Random(big_t))
        rep = verify_addition_theorem(big_t, sets)
        print(
            f"  T={big_t}, r={r}: bias {Fraction(rep.bias)} "
            f"<= bound {rep.bound:.4f} -> {'pass' if rep.passed else 'FAIL'}"
        )

    pair_sets = random_subsets(4, 6400, random.Random(99), min_size=2, max_size=2)
    rep2 = verify_size2_sets(4, pair_sets)
    print(
        f"  size-2 family, T=4, r=6400: majority difference {rep2.majority_difference}"
        f" ({rep2.majority_count} copies), bias {Fraction(rep2.bias)}"
        f" -> {'pass' if rep2.passed else 'FAIL'}"
    )


if __name__ == "__main__":
    main()
