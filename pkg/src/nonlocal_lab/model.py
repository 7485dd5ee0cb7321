"""Core domain types: correlation problems, local classical models, and the
three imperfection metrics (all-click efficiency, forbidden-outcome error,
total-variation error).

Conventions used throughout the package:

* inputs are tuples ``x`` with entries in ``{0..k-1}``, one entry per party;
* outcomes are tuples ``a`` with entries in ``{0..l-1}`` or ``None``, where
  ``None`` stands for a detector that produced no output (no click);
* every probability that comes from a classical model is an exact
  ``fractions.Fraction``; floating point appears only for quantities that are
  irrational by nature (such as the per-party efficiency eta).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, NamedTuple, Optional, Union

from .errors import ArityMismatch, DivisionByZeroEfficiency

#: tolerance for real-valued (non-rational) probability checks
REAL_TOLERANCE = 1e-12

Entry = Optional[int]
InputVector = tuple[int, ...]
OutcomeVector = tuple[Entry, ...]
Prob = Union[Fraction, float]

ZERO = Fraction(0)
ONE = Fraction(1)


def all_click(values: Iterable[Entry]) -> bool:
    """True when no entry of an outcome vector is a missing click."""
    return all(v is not None for v in values)


@dataclass(frozen=True)
class Outcome:
    """Joint outcome vector; ``None`` entries mark detectors that stayed silent."""

    values: OutcomeVector

    def __post_init__(self) -> None:
        object.__setattr__(self, "values", tuple(self.values))

    def __iter__(self):
        return iter(self.values)

    def __len__(self) -> int:
        return len(self.values)

    @property
    def all_click(self) -> bool:
        return all_click(self.values)


@dataclass(frozen=True)
class CorrelationProblem:
    """A target joint conditional distribution plus an input distribution.

    ``mu`` is stored sparsely on its support; ``target`` is stored sparsely as
    ``x -> {outcome: probability}`` and missing outcomes carry probability 0.
    Outcomes with missing clicks conventionally carry target probability 0
    (the target describes an ideal, always-clicking scenario).
    """

    n: int
    k: int
    l: int
    mu: Mapping[InputVector, Fraction]
    target: Mapping[InputVector, Mapping[OutcomeVector, Prob]]

    def __post_init__(self) -> None:
        if self.n < 1 or self.k < 1 or self.l < 1:
            raise ArityMismatch("n, k, l must all be positive")
        total = ZERO
        for x, w in self.mu.items():
            if len(x) != self.n or any(not (0 <= v < self.k) for v in x):
                raise ArityMismatch(f"input {x} outside {{0..{self.k - 1}}}^{self.n}")
            if w < 0:
                raise ValueError(f"negative input weight at {x}")
            total += w
        if total != 1:
            raise ValueError(f"input weights sum to {total}, expected 1")
        for x in self.support:
            row = self.target.get(x)
            if row is None:
                raise ValueError(f"no target distribution for supported input {x}")
            exact = all(isinstance(p, Fraction) for p in row.values())
            s = sum(row.values())
            if exact:
                if s != 1:
                    raise ValueError(f"target at {x} sums to {s}, expected 1")
            elif abs(s - 1.0) > REAL_TOLERANCE:
                raise ValueError(f"target at {x} sums to {s}, expected 1")

    @property
    def support(self) -> tuple[InputVector, ...]:
        """Inputs with nonzero weight, in insertion order."""
        return tuple(x for x, w in self.mu.items() if w > 0)

    def mu_weight(self, x: InputVector) -> Fraction:
        return self.mu.get(x, ZERO)

    def target_prob(self, x: InputVector, a: OutcomeVector) -> Prob:
        return self.target.get(x, {}).get(a, ZERO)

    def is_forbidden(self, x: InputVector, a: OutcomeVector) -> bool:
        """True when the all-click outcome ``a`` has exactly zero target mass.

        Forbidden-ness is defined by an exact zero of the target, never by a
        numeric threshold.
        """
        return self.target_prob(x, a) == 0


def uniform_problem(n: int, k: int, l: int = 2) -> CorrelationProblem:
    """Full-support problem: uniform inputs, uniform click-only targets."""
    inputs = list(itertools.product(range(k), repeat=n))
    w = Fraction(1, len(inputs))
    t = Fraction(1, l**n)
    row = {a: t for a in itertools.product(range(l), repeat=n)}
    return CorrelationProblem(
        n=n, k=k, l=l, mu={x: w for x in inputs}, target={x: row for x in inputs}
    )


@dataclass(frozen=True)
class DeterministicLhv:
    """One lookup table per party; entries may be ``None`` (no click).

    Every party's table must be a total function on ``{0..k-1}``.
    """

    tables: tuple[tuple[Entry, ...], ...]

    def __post_init__(self) -> None:
        tables = tuple(tuple(t) for t in self.tables)
        object.__setattr__(self, "tables", tables)
        if not tables:
            raise ValueError("at least one party required")
        k = len(tables[0])
        for t in tables:
            if len(t) != k or k == 0:
                raise ValueError("party tables must share one input range")
            for v in t:
                if v is not None and v < 0:
                    raise ValueError("outputs must be None or nonnegative ints")

    @property
    def n(self) -> int:
        return len(self.tables)

    @property
    def k(self) -> int:
        return len(self.tables[0])

    @property
    def is_click_only(self) -> bool:
        return all(v is not None for t in self.tables for v in t)

    def outputs(self, x: InputVector) -> OutcomeVector:
        return tuple(t[v] for t, v in zip(self.tables, x))

    def clicks_on(self, x: InputVector) -> bool:
        return all(t[v] is not None for t, v in zip(self.tables, x))


@dataclass(frozen=True)
class MixedLhv:
    """Probability distribution over deterministic local models."""

    components: tuple[tuple[DeterministicLhv, Fraction], ...]

    def __post_init__(self) -> None:
        comps = tuple((lhv, Fraction(w)) for lhv, w in self.components)
        object.__setattr__(self, "components", comps)
        if not comps:
            raise ValueError("a mixture needs at least one component")
        shape = (comps[0][0].n, comps[0][0].k)
        for lhv, w in comps:
            if (lhv.n, lhv.k) != shape:
                raise ArityMismatch("all components must share (n, k)")
            if w <= 0:
                raise ValueError("component weights must be positive")
        if sum(w for _, w in comps) != 1:
            raise ValueError("component weights must sum to 1")

    @property
    def n(self) -> int:
        return self.components[0][0].n

    @property
    def k(self) -> int:
        return self.components[0][0].k


@dataclass(frozen=True)
class ModelDistribution:
    """Induced conditional distribution of a classical model, exact rationals.

    ``probs[x][a]`` covers outcomes with and without missing clicks; rows sum
    to exactly 1 for every stored input.
    """

    probs: Mapping[InputVector, Mapping[OutcomeVector, Fraction]]

    def __post_init__(self) -> None:
        for x, row in self.probs.items():
            s = ZERO
            for a, p in row.items():
                if p < 0:
                    raise ValueError(f"negative probability at {x} -> {a}")
                s += p
            if s != 1:
                raise ValueError(f"distribution at {x} sums to {s}, expected 1")

    def prob(self, x: InputVector, a: OutcomeVector) -> Fraction:
        return self.probs.get(x, {}).get(a, ZERO)

    def click_row(self, x: InputVector) -> dict[OutcomeVector, Fraction]:
        return {a: p for a, p in self.probs.get(x, {}).items() if all_click(a)}


class Efficiency(NamedTuple):
    """All-click probability (exact) plus its n-th root (numeric)."""

    eta_n: Fraction
    eta: float
    n: int


class ModelMetrics(NamedTuple):
    """The three imperfection figures of a model on one problem."""

    eta_n: Fraction
    eta: float
    eps: Fraction
    eps_var: Prob


def evaluate_mixed_lhv(m: MixedLhv, problem: CorrelationProblem) -> ModelDistribution:
    """Exact induced distribution: per input, each component adds its weight
    onto the outcome its tables produce."""
    if (m.n, m.k) != (problem.n, problem.k):
        raise ArityMismatch(
            f"model is ({m.n}, {m.k}) but problem is ({problem.n}, {problem.k})"
        )
    probs: dict[InputVector, dict[OutcomeVector, Fraction]] = {}
    for x in problem.support:
        row: dict[OutcomeVector, Fraction] = {}
        for lhv, w in m.components:
            a = lhv.outputs(x)
            row[a] = row.get(a, ZERO) + w
        probs[x] = row
    return ModelDistribution(probs=probs)


def _eta_n(d: ModelDistribution, problem: CorrelationProblem) -> Fraction:
    acc = ZERO
    for x in problem.support:
        w = problem.mu_weight(x)
        for a, p in d.probs.get(x, {}).items():
            if all_click(a):
                acc += w * p
    return acc


def detection_efficiency(d: ModelDistribution, problem: CorrelationProblem) -> Efficiency:
    """Expected all-click probability under the input distribution.

    The exact value is the n-th power ``eta_n``; ``eta`` is its numeric n-th
    root (irrational in general).
    """
    eta_n = _eta_n(d, problem)
    return Efficiency(eta_n=eta_n, eta=float(eta_n) ** (1.0 / problem.n), n=problem.n)


def error_probability(d: ModelDistribution, problem: CorrelationProblem) -> Fraction:
    """Click-conditioned probability of an outcome the target forbids outright."""
    eta_n = _eta_n(d, problem)
    if eta_n == 0:
        raise DivisionByZeroEfficiency("no all-click events, error undefined")
    acc = ZERO
    for x in problem.support:
        w = problem.mu_weight(x)
        for a, p in d.probs.get(x, {}).items():
            if all_click(a) and problem.is_forbidden(x, a):
                acc += w * p
    return acc / eta_n


def total_variation_error(d: ModelDistribution, problem: CorrelationProblem) -> Prob:
    """Click-conditioned L1 distance between the model and the target.

    Exact when the target is rational; float otherwise.
    """
    eta_n = _eta_n(d, problem)
    if eta_n == 0:
        raise DivisionByZeroEfficiency("no all-click events, deviation undefined")
    acc: Prob = ZERO
    for x in problem.support:
        w = problem.mu_weight(x)
        model_row = d.click_row(x)
        target_row = problem.target.get(x, {})
        for a in set(model_row) | set(target_row):
            if not all_click(a):
                continue
            acc += w * abs(target_row.get(a, ZERO) - model_row.get(a, ZERO))
    return acc / eta_n


def mixed_lhv_metrics(m: MixedLhv, problem: CorrelationProblem) -> ModelMetrics:
    """All three metrics in one streaming pass, without materializing the
    (possibly huge) histogram of partial-click outcomes.

    Agrees exactly with the ``ModelDistribution`` route; only click outcomes
    ever enter the metrics, so the per-input state stays bounded by ``l**n``.
    """
    if (m.n, m.k) != (problem.n, problem.k):
        raise ArityMismatch(
            f"model is ({m.n}, {m.k}) but problem is ({problem.n}, {problem.k})"
        )
    eta_n = ZERO
    err = ZERO
    var: Prob = ZERO
    for x in problem.support:
        w = problem.mu_weight(x)
        click_row: dict[OutcomeVector, Fraction] = {}
        for lhv, cw in m.components:
            a = lhv.outputs(x)
            if all_click(a):
                click_row[a] = click_row.get(a, ZERO) + cw
        target_row = problem.target.get(x, {})
        for a, p in click_row.items():
            eta_n += w * p
            if problem.is_forbidden(x, a):
                err += w * p
        for a in set(click_row) | set(target_row):
            if not all_click(a):
                continue
            var += w * abs(target_row.get(a, ZERO) - click_row.get(a, ZERO))
    if eta_n == 0:
        raise DivisionByZeroEfficiency("no all-click events, metrics undefined")
    return ModelMetrics(
        eta_n=eta_n,
        eta=float(eta_n) ** (1.0 / problem.n),
        eps=err / eta_n,
        eps_var=var / eta_n,
    )
