"""Optimal classical figures at small instance sizes: exhaustive minimum
error over deterministic click-only strategies, maximum input-independent
all-click probability via an exact LP, and the communication/efficiency
trade-off table.
"""

from __future__ import annotations

import itertools
import time
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Optional, Sequence

from .errors import BudgetExceeded, Infeasible
from .ghz import GhzInstance, broadcast_prefix_stats, ghz_problem
from .model import (
    CorrelationProblem,
    DeterministicLhv,
    MixedLhv,
    ZERO,
)
from .rectangles import ScanResult, rectangle_tradeoff_check, scan_rectangles
from .simplex import solve_lp_max

#: default cap on enumerated strategy vertices
DEFAULT_SEARCH_BUDGET = 1 << 20

ONE = Fraction(1)


@dataclass(frozen=True)
class SearchReport:
    """Outcome of one optimization run, with a re-checkable witness."""

    kind: str
    params: dict
    optimum: Fraction
    witness: object
    enumerated: int
    wall_time: float


def _click_tables(k: int, l: int) -> list[tuple[int, ...]]:
    return [tuple(t) for t in itertools.product(range(l), repeat=k)]


def _iter_click_strategies(n: int, k: int, l: int) -> Iterator[DeterministicLhv]:
    """Click-only deterministic strategies in lexicographic table order."""
    tables = _click_tables(k, l)
    for combo in itertools.product(tables, repeat=n):
        yield DeterministicLhv(tables=combo)


def best_deterministic_error(
    problem: CorrelationProblem, budget: int = DEFAULT_SEARCH_BUDGET
) -> SearchReport:
    """Exhaustive minimum of the forbidden-outcome error over click-only
    deterministic strategies.

    Mixtures cannot do better: the error is linear in the mixing weights, so
    the minimum over the simplex is attained at a vertex. Ties are broken by
    the first strategy found in lexicographic order.
    """
    total = problem.l ** (problem.n * problem.k)
    if total > budget:
        raise BudgetExceeded(f"{total} strategies exceed the budget of {budget}")
    start = time.perf_counter()
    support = problem.support
    weights = [problem.mu_weight(x) for x in support]
    best: Optional[Fraction] = None
    witness: Optional[DeterministicLhv] = None
    count = 0
    for lhv in _iter_click_strategies(problem.n, problem.k, problem.l):
        count += 1
        err = ZERO
        for x, w in zip(support, weights):
            if problem.is_forbidden(x, lhv.outputs(x)):
                err += w
        if best is None or err < best:
            best = err
            witness = lhv
            if best == 0:
                break
    return SearchReport(
        kind="best_deterministic_error",
        params={"n": problem.n, "k": problem.k, "l": problem.l},
        optimum=best,
        witness=witness,
        enumerated=count,
        wall_time=time.perf_counter() - start,
    )


def _iter_detector_strategies(n: int, k: int, l: int) -> Iterator[DeterministicLhv]:
    """Strategies whose outputs may also be silent, lexicographic order with
    the silent symbol sorted last."""
    entries = list(range(l)) + [None]
    tables = [tuple(t) for t in itertools.product(entries, repeat=k)]
    for combo in itertools.product(tables, repeat=n):
        yield DeterministicLhv(tables=combo)


def eta_star_lp(
    problem: CorrelationProblem,
    eps_budget: Fraction,
    budget: int = DEFAULT_SEARCH_BUDGET,
    relaxed: bool = False,
) -> SearchReport:
    """Maximum all-click probability of a mixture of silent-allowed
    deterministic strategies whose all-click probability is the same for
    every supported input and whose conditional error stays within budget.

    Exact rational LP: variables are the mixture weights and the common
    all-click probability q; the default (input-independent) variant pins
    each input's click mass to q, the relaxed variant only requires >= q.
    """
    if eps_budget < 0:
        raise Infeasible("a negative error budget admits no model")
    n, k, l = problem.n, problem.k, problem.l
    total = (l + 1) ** (n * k)
    if total > budget:
        raise BudgetExceeded(f"{total} strategies exceed the budget of {budget}")
    start = time.perf_counter()
    strategies = list(_iter_detector_strategies(n, k, l))
    m = len(strategies)
    support = problem.support

    clicks: list[list[bool]] = []
    err_coef: list[Fraction] = []
    for lhv in strategies:
        col_clicks = [lhv.clicks_on(x) for x in support]
        clicks.append(col_clicks)
        coef = ZERO
        for x, clicked in zip(support, col_clicks):
            if clicked and problem.is_forbidden(x, lhv.outputs(x)):
                coef += problem.mu_weight(x)
        err_coef.append(coef)

    # columns: m mixture weights, then q
    objective = [ZERO] * m + [ONE]
    eq_rows: list[tuple[list[Fraction], Fraction]] = [([ONE] * m + [ZERO], ONE)]
    ub_rows: list[tuple[list[Fraction], Fraction]] = []
    for xi in range(len(support)):
        row = [ONE if clicks[j][xi] else ZERO for j in range(m)] + [-ONE]
        if relaxed:
            ub_rows.append(([-c for c in row], ZERO))  # click mass >= q
        else:
            eq_rows.append((row, ZERO))
    ub_rows.append((err_coef + [-Fraction(eps_budget)], ZERO))

    result = solve_lp_max(objective, eq_rows, ub_rows)
    nu = result.solution[:m]
    components = tuple(
        (strategies[j], w) for j, w in enumerate(nu) if w > 0
    )
    witness = MixedLhv(components=components) if components else None
    return SearchReport(
        kind="eta_star_lp",
        params={
            "n": n,
            "k": k,
            "l": l,
            "eps_budget": eps_budget,
            "relaxed": relaxed,
        },
        optimum=result.solution[m],
        witness=witness,
        enumerated=m,
        wall_time=time.perf_counter() - start,
    )


@dataclass(frozen=True)
class TradeoffRow:
    """One (bits, error budget) grid point of the trade-off table."""

    c: int
    eps: Fraction
    achievable_eta_n: Optional[Fraction]
    achievable_source: str
    bound_eta_n: Optional[Fraction]
    bound_exact: bool


@dataclass(frozen=True)
class TradeoffTable:
    instance: GhzInstance
    delta_grid: tuple[Fraction, ...]
    scans: tuple[ScanResult, ...]
    rows: tuple[TradeoffRow, ...]


def _bound_eta_n(
    inst: GhzInstance, scans: Sequence[ScanResult], c: int, eps: Fraction
) -> Optional[Fraction]:
    """Best rearranged rectangle-cap bound on eta**n at the grid point."""
    best: Optional[Fraction] = None
    l_pow = Fraction(2**inst.n)
    for scan in scans:
        if eps >= 1 - scan.delta:
            continue  # the inequality constrains nothing here
        value = 2**c * l_pow * scan.r_cap / (1 - eps / (1 - scan.delta))
        if best is None or value < best:
            best = value
    if best is None:
        return None
    return min(best, ONE)


def tradeoff_table(
    inst: GhzInstance,
    c_grid: Sequence[int],
    eps_grid: Sequence[Fraction],
    delta_grid: Sequence[Fraction] = (Fraction(1, 2), Fraction(3, 4), Fraction(7, 8)),
    lp_budget: int = 4096,
    scan_budget: int = 1 << 24,
    scan_mode: str = "canonical",
) -> TradeoffTable:
    """Achievable versus bound all-click probability over a (c, eps) grid.

    Achievable points come from the broadcast-prefix family (converted to
    detector models, so eta**n = 2**-cost at the prefix error) and, when the
    vertex count fits the LP budget, from the exact no-communication LP.
    Bounds come from rectangle scans at the given advantage thresholds; each
    achievable entry must stay below the bound entry (checked by callers and
    the test suite; a violation would signal an implementation bug).
    """
    prefix_points = [broadcast_prefix_stats(inst, j) for j in range(inst.n + 1)]
    scans = tuple(
        scan_rectangles(inst, d, budget=scan_budget, mode=scan_mode) for d in delta_grid
    )
    lp_ok = 3 ** (inst.n * inst.k) <= lp_budget  # binary outputs plus silence
    problem = None
    lp_cache: dict[Fraction, Fraction] = {}
    if lp_ok:
        problem = ghz_problem(inst)

    rows: list[TradeoffRow] = []
    for c in c_grid:
        for eps in eps_grid:
            best: Optional[Fraction] = None
            source = "none"
            for p in prefix_points:
                if p.cost <= c and p.eps <= eps:
                    if best is None or p.eta_n_converted > best:
                        best = p.eta_n_converted
                        source = f"broadcast_prefix[{p.prefix}]"
            if lp_ok:
                if eps not in lp_cache:
                    lp_cache[eps] = eta_star_lp(problem, eps).optimum
                if best is None or lp_cache[eps] > best:
                    best = lp_cache[eps]
                    source = "eta_star_lp"
            rows.append(
                TradeoffRow(
                    c=c,
                    eps=eps,
                    achievable_eta_n=best,
                    achievable_source=source,
                    bound_eta_n=_bound_eta_n(inst, scans, c, eps),
                    bound_exact=all(s.exact for s in scans),
                )
            )
    return TradeoffTable(
        instance=inst, delta_grid=tuple(delta_grid), scans=scans, rows=tuple(rows)
    )


def model_respects_rectangle_bound(
    inst: GhzInstance,
    scans: Sequence[ScanResult],
    c: int,
    eta_n: Fraction,
    eps: Fraction,
) -> bool:
    """Check one measured (c, eta**n, eps) triple against every scanned cap."""
    return all(
        rectangle_tradeoff_check(s.delta, s.r_cap, c, eta_n, eps, 2, inst.n)
        for s in scans
        if s.delta < 1
    )
