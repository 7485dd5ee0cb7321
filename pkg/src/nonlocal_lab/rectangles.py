"""Rectangle combinatorics over the input space: admissible-outcome
advantage, parity bias, exact residue counting by convolution, and the
communication/efficiency/error trade-off inequality driven by rectangle
weight caps.

A rectangle is a Cartesian product of per-party setting subsets; it is
exactly the shape of any deterministic local model's preimage of a fixed
outcome, which is why caps on "advantaged" rectangles constrain every
classical model.
"""

from __future__ import annotations

import csv
import io
import itertools
import math
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Optional, Sequence

from .errors import (
    BudgetExceeded,
    DeltaOutOfRange,
    EmptyIntersection,
    EmptyWeight,
    InvalidInput,
)
from .ghz import GhzInstance, ghz_problem
from .model import CorrelationProblem, OutcomeVector, all_click

INFINITE = math.inf

#: default cap on the number of rectangles an exhaustive scan may visit
DEFAULT_SCAN_BUDGET = 1 << 24


@dataclass(frozen=True)
class Rectangle:
    """Product of per-party subsets of {0..k-1}, each nonempty."""

    k: int
    sets: tuple[frozenset[int], ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "sets", tuple(frozenset(s) for s in self.sets))
        for s in self.sets:
            if not s:
                raise InvalidInput("rectangle parts must be nonempty")
            if any(not (0 <= v < self.k) for v in s):
                raise InvalidInput(f"rectangle part {set(s)} outside 0..{self.k - 1}")

    @property
    def n(self) -> int:
        return len(self.sets)

    @property
    def size(self) -> int:
        size = 1
        for s in self.sets:
            size *= len(s)
        return size

    def __contains__(self, x: Sequence[int]) -> bool:
        return len(x) == self.n and all(v in s for v, s in zip(x, self.sets))


def residue_counts(r: Rectangle, modulus: int) -> dict[int, int]:
    """Exact counts of rectangle points by (sum of entries) mod ``modulus``.

    Computed by convolving the per-party indicator vectors, so it stays
    polynomial even when the rectangle itself is astronomically large.
    """
    if modulus < 1:
        raise InvalidInput(f"modulus must be >= 1, got {modulus}")
    counts = [0] * modulus
    counts[0] = 1
    for s in r.sets:
        nxt = [0] * modulus
        for residue, c in enumerate(counts):
            if c:
                for v in s:
                    nxt[(residue + v) % modulus] += c
        counts = nxt
    return {residue: c for residue, c in enumerate(counts)}


def involvement(r: Rectangle) -> int:
    """Number of parties whose subset has at least two settings.

    The rectangle size can never exceed k**involvement.
    """
    m = sum(1 for s in r.sets if len(s) >= 2)
    assert r.size <= r.k**m
    return m


def advantage(r: Rectangle, a: OutcomeVector, problem: CorrelationProblem) -> Fraction:
    """Fraction of the rectangle's input weight on which outcome ``a`` is
    admissible (has nonzero target probability)."""
    if len(a) != r.n or not all_click(a):
        raise InvalidInput("advantage is defined for click-only outcomes of length n")
    weight = Fraction(0)
    admissible = Fraction(0)
    for x in problem.support:
        if x in r:
            w = problem.mu_weight(x)
            weight += w
            if problem.target_prob(x, a) > 0:
                admissible += w
    if weight == 0:
        raise EmptyWeight("rectangle carries no input weight")
    return admissible / weight


def _parity_counts(r: Rectangle, inst: GhzInstance) -> tuple[int, int]:
    counts = residue_counts(r, 2 * inst.k)
    return counts[0], counts[inst.k]


def bias(r: Rectangle, inst: GhzInstance):
    """Smallest delta such that the two parity classes of valid inputs inside
    the rectangle are within a factor (1+delta) of each other.

    Returns ``math.inf`` when one class is empty and the other is not.
    """
    n0, n1 = _parity_counts(r, inst)
    if n0 + n1 == 0:
        raise EmptyIntersection("rectangle contains no valid inputs")
    lo, hi = min(n0, n1), max(n0, n1)
    if lo == 0:
        return INFINITE
    return Fraction(hi, lo) - 1


@dataclass(frozen=True)
class BiasAdvantageReport:
    """Both sides of the bias <-> advantage correspondence for one rectangle."""

    n0: int
    n1: int
    bias: object  # Fraction or math.inf
    max_advantage: Fraction
    advantage_from_bias: Fraction
    cross_checked: bool
    passed: bool


def advantage_bias_relation(
    r: Rectangle, inst: GhzInstance, cross_check_budget: int = 1 << 20
) -> BiasAdvantageReport:
    """Verify that bias <= delta holds exactly when every click outcome has
    advantage at most (1+delta)/(2+delta).

    Both quantities reduce to the two parity-class counts, so the check is
    the exact identity max_advantage == (1+bias)/(2+bias) (advantage 1 for
    one-sided rectangles). When the instance is small enough the maximum
    advantage is recomputed from the generic per-outcome definition as an
    independent route.
    """
    n0, n1 = _parity_counts(r, inst)
    if n0 + n1 == 0:
        raise EmptyIntersection("rectangle contains no valid inputs")
    b = INFINITE if min(n0, n1) == 0 else Fraction(max(n0, n1), min(n0, n1)) - 1
    max_adv = Fraction(max(n0, n1), n0 + n1)
    expected = Fraction(1) if b == INFINITE else (1 + b) / (2 + b)
    passed = max_adv == expected

    work = inst.valid_input_count() * 2**inst.n
    cross_checked = False
    if passed and work <= cross_check_budget:
        problem = ghz_problem(inst)
        generic = max(
            advantage(r, a, problem)
            for a in itertools.product(range(2), repeat=inst.n)
        )
        cross_checked = True
        passed = generic == max_adv
    return BiasAdvantageReport(
        n0=n0,
        n1=n1,
        bias=b,
        max_advantage=max_adv,
        advantage_from_bias=expected,
        cross_checked=cross_checked,
        passed=passed,
    )


@dataclass(frozen=True)
class RectangleStats:
    """Exact per-rectangle figures used by scans and reports."""

    sets: tuple[frozenset[int], ...]
    size: int
    involvement: int
    counts: dict[int, int]
    n0: int
    n1: int
    bias: object  # Fraction or math.inf
    advantage_even: Fraction
    advantage_odd: Fraction
    mu_weight: Fraction


def rectangle_stats(r: Rectangle, inst: GhzInstance) -> RectangleStats:
    counts = residue_counts(r, 2 * inst.k)
    n0, n1 = counts[0], counts[inst.k]
    if n0 + n1 == 0:
        raise EmptyIntersection("rectangle contains no valid inputs")
    b = INFINITE if min(n0, n1) == 0 else Fraction(max(n0, n1), min(n0, n1)) - 1
    total = n0 + n1
    return RectangleStats(
        sets=r.sets,
        size=r.size,
        involvement=involvement(r),
        counts=counts,
        n0=n0,
        n1=n1,
        bias=b,
        advantage_even=Fraction(n0, total),
        advantage_odd=Fraction(n1, total),
        mu_weight=Fraction(total, inst.valid_input_count()),
    )


def stats_to_csv(stats: Sequence[RectangleStats]) -> str:
    """Render rectangle statistics as CSV (bias rendered as num/den or inf)."""
    buf = io.StringIO()
    writer = csv.writer(buf)
    writer.writerow(
        ["sets", "size", "involvement", "n0", "n1", "bias", "max_advantage", "mu_weight"]
    )
    for s in stats:
        sets_txt = "|".join("".join(str(v) for v in sorted(part)) for part in s.sets)
        bias_txt = "inf" if s.bias == INFINITE else str(s.bias)
        writer.writerow(
            [
                sets_txt,
                s.size,
                s.involvement,
                s.n0,
                s.n1,
                bias_txt,
                str(max(s.advantage_even, s.advantage_odd)),
                str(s.mu_weight),
            ]
        )
    return buf.getvalue()


def rectangle_tradeoff_check(
    delta: Fraction,
    r_cap: Fraction,
    c: int,
    eta_n: Fraction,
    eps: Fraction,
    l: int,
    n: int,
) -> bool:
    """Exactly evaluate the rectangle-cap constraint on a classical model:

        (eta_n / 2**c) * (1 - eps/(1-delta)) <= l**n * r_cap

    valid whenever every rectangle with some outcome-advantage >= delta has
    input weight at most ``r_cap``. A sound cap can never make this fail.
    """
    if not 0 <= delta < 1:
        raise DeltaOutOfRange(f"delta must be in [0, 1), got {delta}")
    lhs = Fraction(1, 2**c) * eta_n * (1 - eps / (1 - delta))
    rhs = Fraction(l**n) * r_cap
    return lhs <= rhs


def iter_rectangles(inst: GhzInstance) -> Iterator[Rectangle]:
    """All rectangles with nonempty per-party subsets (the full lattice)."""
    subsets = [
        frozenset(s)
        for size in range(1, inst.k + 1)
        for s in itertools.combinations(range(inst.k), size)
    ]
    for sets in itertools.product(subsets, repeat=inst.n):
        yield Rectangle(k=inst.k, sets=sets)


@dataclass(frozen=True)
class ScanResult:
    """Largest input weight among rectangles meeting an advantage threshold."""

    delta: Fraction
    r_cap: Fraction
    exact: bool
    examined: int
    witness: Optional[tuple[frozenset[int], ...]]


def _max_advantage(n0: int, n1: int) -> Fraction:
    return Fraction(max(n0, n1), n0 + n1)


def scan_rectangles(
    inst: GhzInstance,
    delta: Fraction,
    budget: int = DEFAULT_SCAN_BUDGET,
    mode: str = "canonical",
    samples: int = 10000,
    rng: Optional[random.Random] = None,
) -> ScanResult:
    """Maximum input weight over rectangles with some advantage >= delta.

    Modes:

    * ``"lattice"``: every rectangle in the subset lattice (exact; budget
      applies to the rectangle count).
    * ``"canonical"``: exact as well, but enumerates only one representative
      per party permutation. The residue counts are a convolution of the
      per-party indicator vectors, which is order-independent, so weight,
      bias and advantage are class functions of the subset multiset.
      (Setting translations are NOT a sound reduction: wrapping changes the
      integer input sum by d-k instead of d, which can change bias.)
    * ``"sample"``: random rectangles only; the result is a lower bound on
      the true maximum (``exact=False``).
    """
    if not 0 <= delta <= 1:
        raise DeltaOutOfRange(f"delta must be in [0, 1], got {delta}")
    n, k = inst.n, inst.k
    denom = inst.valid_input_count()
    best: Optional[Fraction] = None
    witness: Optional[tuple[frozenset[int], ...]] = None
    examined = 0

    def consider(n0: int, n1: int, sets: tuple[frozenset[int], ...]) -> None:
        nonlocal best, witness
        if n0 + n1 == 0:
            return
        if _max_advantage(n0, n1) >= delta:
            w = Fraction(n0 + n1, denom)
            if best is None or w > best:
                best = w
                witness = sets

    if mode == "lattice":
        total = (2**k - 1) ** n
        if total > budget:
            raise BudgetExceeded(f"lattice scan of {total} rectangles exceeds {budget}")
        for r in iter_rectangles(inst):
            examined += 1
            counts = residue_counts(r, 2 * k)
            consider(counts[0], counts[k], r.sets)
    elif mode == "canonical":
        subsets = sorted(
            (
                frozenset(s)
                for size in range(1, k + 1)
                for s in itertools.combinations(range(k), size)
            ),
            key=lambda s: tuple(sorted(s)),
        )
        combos = math.comb(n + len(subsets) - 1, len(subsets) - 1)
        if combos > budget:
            raise BudgetExceeded(f"canonical scan of {combos} classes exceeds {budget}")
        for combo in itertools.combinations_with_replacement(subsets, n):
            counts = residue_counts(Rectangle(k=k, sets=combo), 2 * k)
            examined += 1
            consider(counts[0], counts[k], combo)
    elif mode == "sample":
        rng = rng or random.Random(0)
        if samples > budget:
            raise BudgetExceeded(f"{samples} samples exceed budget {budget}")
        values = list(range(k))
        for _ in range(samples):
            sets = tuple(
                frozenset(rng.sample(values, rng.randint(1, k))) for _ in range(n)
            )
            examined += 1
            counts = residue_counts(Rectangle(k=k, sets=sets), 2 * k)
            consider(counts[0], counts[k], sets)
    else:
        raise InvalidInput(f"unknown scan mode {mode!r}")

    if best is None:
        best = Fraction(0)
    return ScanResult(
        delta=delta,
        r_cap=best,
        exact=mode in ("lattice", "canonical"),
        examined=examined,
        witness=witness,
    )
