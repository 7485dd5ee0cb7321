"""The n-party GHZ measurement scenario and the correlation problem it
induces.

Each party holds one qubit of the state (|0...0> + |1...1>)/sqrt(2) and, on
input ``x_i``, measures in the basis (|0> +- exp(i*pi*x_i/k)|1>)/sqrt(2),
reporting 0 for the "+" projector and 1 for the "-" projector. An input
vector is valid when its entries sum to 0 mod k; on valid inputs the parity
of the outputs is forced to a bit computable from the input sum alone, which
is what the classical models in the rest of the package try to reproduce.
"""

from __future__ import annotations

import cmath
import functools
import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Sequence

from .errors import InvalidInput, LengthMismatch, ResourceLimit
from .model import CorrelationProblem, DeterministicLhv, InputVector, OutcomeVector, ZERO
from .protocol import Edge, Leaf, MixedProtocol, Node, ProtocolTree, SHARED

#: maximum number of valid inputs materialized or scanned by default
DEFAULT_INPUT_CAP = 10**7

#: numeric tolerance tying the amplitude computation to its closed form
AMPLITUDE_TOLERANCE = 1e-12

_INV_SQRT2 = 1.0 / math.sqrt(2.0)


@dataclass(frozen=True)
class GhzInstance:
    """Scenario parameters: ``n`` parties, ``k`` measurement settings each."""

    n: int
    k: int

    def __post_init__(self) -> None:
        if self.n < 2:
            raise InvalidInput(f"need at least 2 parties, got n={self.n}")
        if self.k < 2:
            raise InvalidInput(f"need at least 2 settings, got k={self.k}")

    def valid_input_count(self) -> int:
        return self.k ** (self.n - 1)


def default_k(n: int) -> int:
    """Experiment default: ceil(n**(1/6)) rounded up to a power of two."""
    m = 1
    while m**6 < n:
        m += 1
    p = 1
    while p < m:
        p *= 2
    return max(p, 2)


@dataclass(frozen=True)
class PhaseMeasurement:
    """Equatorial qubit basis selected by one party's setting."""

    setting: int
    k: int

    def __post_init__(self) -> None:
        if not 0 <= self.setting < self.k:
            raise InvalidInput(f"setting {self.setting} outside 0..{self.k - 1}")

    @property
    def phase(self) -> float:
        """Basis phase, always in [0, pi)."""
        return math.pi * self.setting / self.k

    def bra(self, outcome: int) -> tuple[complex, complex]:
        """Conjugated overlaps (<phi_outcome|0>, <phi_outcome|1>)."""
        sign = -1.0 if outcome else 1.0
        return (_INV_SQRT2 + 0j, sign * cmath.exp(-1j * self.phase) * _INV_SQRT2)


def _check_input(inst: GhzInstance, x: Sequence[int]) -> None:
    if len(x) != inst.n:
        raise LengthMismatch(f"input has {len(x)} entries, expected {inst.n}")
    if any(not (0 <= v < inst.k) for v in x):
        raise InvalidInput(f"input {tuple(x)} outside 0..{inst.k - 1}")


def is_valid_input(inst: GhzInstance, x: Sequence[int]) -> bool:
    """True when the entries of ``x`` sum to 0 mod k."""
    _check_input(inst, x)
    return sum(x) % inst.k == 0


def promise_bit(inst: GhzInstance, x: Sequence[int]) -> int:
    """The bit ((sum x_i) mod 2k)/k; defined exactly on valid inputs."""
    if not is_valid_input(inst, x):
        raise InvalidInput(f"{tuple(x)} violates the sum-to-zero promise")
    return (sum(x) % (2 * inst.k)) // inst.k


def _check_click_outcome(inst: GhzInstance, a: Sequence[int]) -> None:
    if len(a) != inst.n:
        raise LengthMismatch(f"outcome has {len(a)} entries, expected {inst.n}")
    if any(v not in (0, 1) for v in a):
        raise InvalidInput(f"outcome {tuple(a)} is not a click-only bit vector")


def target_probability(inst: GhzInstance, x: Sequence[int], a: Sequence[int]) -> Fraction:
    """Ideal correlation: 1/2**(n-1) when the output parity matches the
    promise bit of ``x``, and exactly 0 otherwise."""
    _check_click_outcome(inst, a)
    bit = promise_bit(inst, x)
    if sum(a) % 2 == bit:
        return Fraction(1, 2 ** (inst.n - 1))
    return ZERO


@functools.lru_cache(maxsize=None)
def _phase_table(k: int) -> tuple[complex, ...]:
    return tuple(cmath.exp(-1j * math.pi * v / k) for v in range(k))


def quantum_probability(inst: GhzInstance, x: Sequence[int], a: Sequence[int]) -> float:
    """Born probability of click outcome ``a`` on input ``x``.

    Computed as an explicit amplitude inner product against the two nonzero
    amplitudes of the shared state (per-party overlap products, never a full
    2**n state vector), then checked against the cosine closed form.
    """
    _check_input(inst, x)
    _check_click_outcome(inst, a)
    overlap_zero = 1 + 0j
    overlap_one = 1 + 0j
    for xi, ai in zip(x, a):
        b0, b1 = PhaseMeasurement(setting=xi, k=inst.k).bra(ai)
        overlap_zero *= b0
        overlap_one *= b1
    amp = (overlap_zero + overlap_one) * _INV_SQRT2
    p = amp.real * amp.real + amp.imag * amp.imag
    closed = (1.0 + math.cos(math.pi * (sum(a) - sum(x) / inst.k))) / 2**inst.n
    assert abs(p - closed) <= AMPLITUDE_TOLERANCE, "amplitude/closed-form mismatch"
    return p


def valid_inputs(inst: GhzInstance) -> Iterator[InputVector]:
    """All inputs satisfying the promise; the last entry balances the sum."""
    n, k = inst.n, inst.k
    for head in itertools.product(range(k), repeat=n - 1):
        yield head + ((-sum(head)) % k,)


def ghz_problem(inst: GhzInstance, cap: int = DEFAULT_INPUT_CAP) -> CorrelationProblem:
    """Uniform distribution on valid inputs with the ideal parity target.

    Outcomes with missing clicks carry target probability 0 (sparse storage).
    Raises ``ResourceLimit`` when the valid-input count exceeds ``cap``.
    """
    count = inst.valid_input_count()
    if count > cap:
        raise ResourceLimit(f"{count} valid inputs exceed the cap of {cap}")
    n = inst.n
    weight = Fraction(1, count)
    p_allowed = Fraction(1, 2 ** (n - 1))
    rows = (
        {a: p_allowed for a in itertools.product(range(2), repeat=n) if sum(a) % 2 == 0},
        {a: p_allowed for a in itertools.product(range(2), repeat=n) if sum(a) % 2 == 1},
    )
    mu: dict[InputVector, Fraction] = {}
    target: dict[InputVector, dict[OutcomeVector, Fraction]] = {}
    for x in valid_inputs(inst):
        mu[x] = weight
        target[x] = rows[(sum(x) % (2 * inst.k)) // inst.k]
    return CorrelationProblem(n=n, k=inst.k, l=2, mu=mu, target=target)


def equivalence_max_deviation(inst: GhzInstance, cross_check_stride: int = 257) -> float:
    """Largest |quantum - target| over all valid inputs and click outcomes.

    Uses one per-party overlap product per input (the outcome only flips the
    sign of the |1...1> branch) and re-derives every ``cross_check_stride``-th
    point through :func:`quantum_probability` to tie the two paths together.
    """
    n, k = inst.n, inst.k
    phases = _phase_table(k)
    scale = _INV_SQRT2 ** n
    parities = tuple(bin(m).count("1") & 1 for m in range(2**n))
    p_allowed = 1.0 / 2 ** (n - 1)
    outcomes = tuple(itertools.product(range(2), repeat=n))
    worst = 0.0
    seen = 0
    for x in valid_inputs(inst):
        overlap_one = 1 + 0j
        for xi in x:
            overlap_one *= phases[xi]
        overlap_one *= scale
        bit = (sum(x) % (2 * k)) // k
        for m in range(2**n):
            sign = -1.0 if parities[m] else 1.0
            amp = (scale + sign * overlap_one) * _INV_SQRT2
            p = amp.real * amp.real + amp.imag * amp.imag
            t = p_allowed if parities[m] == bit else 0.0
            dev = abs(p - t)
            if dev > worst:
                worst = dev
            seen += 1
            if seen % cross_check_stride == 0:
                direct = quantum_probability(inst, x, outcomes[m])
                assert abs(direct - p) <= AMPLITUDE_TOLERANCE
    return worst


def _full_sum_counts(parties: int, modulus: int, k: int) -> list[int]:
    """Counts of (sum of ``parties`` free settings) mod ``modulus``."""
    counts = [0] * modulus
    counts[0] = 1
    for _ in range(parties):
        nxt = [0] * modulus
        for residue, c in enumerate(counts):
            if c:
                for v in range(k):
                    nxt[(residue + v) % modulus] += c
        counts = nxt
    return counts


def _majority_bit(inst: GhzInstance, known: int, free_counts: list[int]) -> tuple[int, int]:
    """Best constant parity guess given the known part of the input sum.

    Returns (bit, number of valid completions it gets wrong).
    """
    k = inst.k
    n0 = free_counts[(-known) % (2 * k)]
    n1 = free_counts[(k - known) % (2 * k)]
    return (0, n1) if n0 >= n1 else (1, n0)


@dataclass(frozen=True)
class PrefixPoint:
    """Figures of one broadcast-prefix strategy (before/after conversion)."""

    prefix: int
    cost: int
    eps: Fraction
    eta_n_converted: Fraction


def broadcast_prefix_stats(inst: GhzInstance, prefix: int) -> PrefixPoint:
    """Exact error of the strategy where the first ``prefix`` parties
    broadcast their settings and the best-informed party answers with the
    majority parity consistent with everything it knows.

    For ``prefix < n`` the answerer is party ``prefix``, which knows the
    broadcast settings plus its own; for ``prefix = n`` it is party 0. The
    converted detector model clicks with probability 2**-cost.
    """
    n, k = inst.n, inst.k
    if not 0 <= prefix <= n:
        raise InvalidInput(f"prefix {prefix} outside 0..{n}")
    bits = prefix * math.ceil(math.log2(k))
    known = min(prefix + 1, n)  # the answerer's own setting counts too
    pre_counts = _full_sum_counts(known, 2 * k, k)
    suffix_counts = _full_sum_counts(n - known, 2 * k, k)
    wrong = 0
    for sigma, c in enumerate(pre_counts):
        if c:
            _, misses = _majority_bit(inst, sigma, suffix_counts)
            wrong += c * misses
    return PrefixPoint(
        prefix=prefix,
        cost=bits,
        eps=Fraction(wrong, inst.valid_input_count()),
        eta_n_converted=Fraction(1, 2**bits),
    )


def _chain_tree(inst: GhzInstance, prefix: int, leaf_tables) -> ProtocolTree:
    """Chain of k-way splits for parties 0..prefix-1; leaves from a callback."""
    k = inst.k

    def build(level: int, head: tuple[int, ...]):
        if level == prefix:
            return Leaf(lhv=DeterministicLhv(tables=leaf_tables(head)))
        return Node(
            party=level,
            edges=tuple(Edge(inputs=frozenset({v}), child=build(level + 1, head + (v,))) for v in range(k)),
        )

    return ProtocolTree(n=inst.n, k=k, root=build(0, ()))


def broadcast_prefix_strategy(inst: GhzInstance, prefix: int) -> ProtocolTree:
    """Materialized tree for :func:`broadcast_prefix_stats` (same leaf rule)."""
    n, k = inst.n, inst.k
    if not 0 <= prefix <= n:
        raise InvalidInput(f"prefix {prefix} outside 0..{n}")
    zeros = tuple(0 for _ in range(k))

    if prefix == n:
        suffix_counts = _full_sum_counts(0, 2 * k, k)

        def full_leaf_tables(head: tuple[int, ...]):
            bit, _ = _majority_bit(inst, sum(head) % (2 * k), suffix_counts)
            return (tuple(bit for _ in range(k)),) + tuple(zeros for _ in range(n - 1))

        return _chain_tree(inst, n, full_leaf_tables)

    answerer = prefix
    suffix_counts = _full_sum_counts(n - prefix - 1, 2 * k, k)

    def leaf_tables(head: tuple[int, ...]):
        sigma = sum(head) % (2 * k)
        guesses = tuple(
            _majority_bit(inst, (sigma + v) % (2 * k), suffix_counts)[0] for v in range(k)
        )
        return tuple(
            guesses if i == answerer else zeros for i in range(n)
        )

    return _chain_tree(inst, prefix, leaf_tables)


def broadcast_strategy(inst: GhzInstance) -> ProtocolTree:
    """Every party broadcasts its setting; party 0 answers the forced parity.

    Costs n*ceil(log2 k) bits and makes no forbidden outcome on the induced
    problem (each leaf pins the whole input, so the parity is exact).
    """
    return broadcast_prefix_strategy(inst, inst.n)


def broadcast_strategy_mixed(inst: GhzInstance) -> MixedProtocol:
    """Shared-randomness version reproducing the ideal target exactly.

    A uniformly shared bit vector r makes parties 1..n-1 output r_i while
    party 0 absorbs their parity, so outcomes are uniform over the allowed
    parity class.
    """
    n, k = inst.n, inst.k
    zeros_row = _full_sum_counts(0, 2 * k, k)
    weight = Fraction(1, 2 ** (n - 1))
    components = []
    for r in itertools.product(range(2), repeat=n - 1):
        flip = sum(r) % 2

        def leaf_tables(head: tuple[int, ...], flip=flip, r=r):
            bit, _ = _majority_bit(inst, sum(head) % (2 * k), zeros_row)
            first = tuple((bit ^ flip) for _ in range(k))
            return (first,) + tuple(tuple(ri for _ in range(k)) for ri in r)

        components.append((_chain_tree(inst, n, leaf_tables), weight))
    return MixedProtocol(components=tuple(components), flavor=SHARED)
