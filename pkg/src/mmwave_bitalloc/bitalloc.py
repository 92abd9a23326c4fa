"""Bit allocation over a power-budgeted search space.

Three allocators share the same feasible set: an exhaustive trace-MSE
minimizer (full search), a generational genetic algorithm, and the fast
gain-table scan that maximizes the summed per-path gains.  Operation counts
for each are reported from closed-form expressions.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .channel import ChannelRealization
from .combining import HybridCombiner
from .metrics import NoiseModel
from .quantization import DEFAULT_DISTORTION, BitAllocation, DistortionTable


class EmptySearchSpaceError(ValueError):
    """The power budget excludes even the all-b_min allocation."""


@dataclass(frozen=True)
class BudgetedSearchSpace:
    """All bit vectors in [b_min, b_max]^num_paths whose ADC power
    cost_scale * sum(2**b_i) stays within ``power_budget``.

    Iteration is depth-first with budget pruning and yields members in
    lexicographic order; ``cardinality`` counts without materializing.
    """

    num_paths: int
    b_min: int = 1
    b_max: int = 4
    power_budget: float = 0.0
    cost_scale: float = 1.0

    def __post_init__(self):
        if self.num_paths < 1:
            raise ValueError("num_paths must be >= 1")
        if self.b_min > self.b_max:
            raise ValueError("b_min must not exceed b_max")
        min_cost = self.num_paths * self.cost_scale * 2**self.b_min
        if min_cost > self.power_budget:
            raise EmptySearchSpaceError(
                f"budget {self.power_budget} below the all-{self.b_min}-bit cost {min_cost}"
            )

    @property
    def num_bit_levels(self) -> int:
        return self.b_max - self.b_min + 1

    def _unit_budget(self) -> int:
        # costs are integer multiples of cost_scale
        return int(np.floor(self.power_budget / self.cost_scale + 1e-9))

    def __iter__(self):
        for bits in self._iter_tuples():
            yield BitAllocation(
                bits, cost_scale=self.cost_scale, b_min=self.b_min, b_max=self.b_max
            )

    def _iter_tuples(self):
        budget = self._unit_budget()
        min_step = 2**self.b_min
        prefix = []

        def rec(remaining: int, depth: int):
            if depth == self.num_paths:
                yield tuple(prefix)
                return
            tail = (self.num_paths - depth - 1) * min_step
            for b in range(self.b_min, self.b_max + 1):
                cost = 2**b
                if cost + tail > remaining:
                    break
                prefix.append(b)
                yield from rec(remaining - cost, depth + 1)
                prefix.pop()

        yield from rec(budget, 0)

    def cardinality(self) -> int:
        budget = self._unit_budget()
        min_step = 2**self.b_min

        def rec(remaining: int, depth: int) -> int:
            if depth == self.num_paths:
                return 1
            tail = (self.num_paths - depth - 1) * min_step
            total = 0
            for b in range(self.b_min, self.b_max + 1):
                cost = 2**b
                if cost + tail > remaining:
                    break
                total += rec(remaining - cost, depth + 1)
            return total

        return rec(budget, 0)

    @cached_property
    def member_array(self) -> np.ndarray:
        """All members as an (M, num_paths) int array in lexicographic order."""
        return np.asarray(list(self._iter_tuples()), dtype=np.int64)


def enumerate_bset(
    num_paths: int,
    b_min: int = 1,
    b_max: int = 4,
    power_budget: float | None = None,
    cost_scale: float = 1.0,
) -> BudgetedSearchSpace:
    """Build the budgeted search space; the default budget is the cost of
    running 2-bit ADCs on every RF path."""
    if power_budget is None:
        power_budget = num_paths * cost_scale * 4.0
    return BudgetedSearchSpace(
        num_paths=num_paths,
        b_min=b_min,
        b_max=b_max,
        power_budget=power_budget,
        cost_scale=cost_scale,
    )


@dataclass(frozen=True)
class GainTable:
    """Per-path gains sigma_i^2 / (sigma_n^2 + f/(1-f) * (1 + p*q_i)) for
    every path i and every bit depth in [b_min, b_max]."""

    values: np.ndarray
    b_min: int

    def lookup(self, bits_array: np.ndarray) -> np.ndarray:
        rows = np.arange(self.values.shape[0])
        return self.values[rows, np.asarray(bits_array) - self.b_min]


def gain_table_from_parts(
    sigma_sq,
    path_power,
    sigma_n_sq: float,
    b_min: int = 1,
    b_max: int = 4,
    table: DistortionTable = DEFAULT_DISTORTION,
    signal_power: float = 1.0,
) -> GainTable:
    """Gain table from raw per-path quantities (test hook for scaling laws)."""
    sigma_sq = np.asarray(sigma_sq, dtype=float)
    path_power = np.asarray(path_power, dtype=float)
    if np.any(sigma_sq <= 0):
        raise ValueError("gain table requires strictly positive sigma_i")
    cols = []
    for b in range(b_min, b_max + 1):
        g = table.gain_ratio(b)
        cols.append(sigma_sq / (sigma_n_sq + g * (1.0 + signal_power * path_power)))
    return GainTable(values=np.stack(cols, axis=1), b_min=b_min)


def gain_table(
    channel: ChannelRealization,
    combiner: HybridCombiner,
    noise: NoiseModel,
    b_min: int = 1,
    b_max: int = 4,
    table: DistortionTable = DEFAULT_DISTORTION,
    signal_power: float = 1.0,
) -> GainTable:
    analog = combiner.effective_analog()
    rows = analog.conj().T @ channel.H
    path_power = np.sum(np.abs(rows) ** 2, axis=1)
    return gain_table_from_parts(
        channel.sigma**2,
        path_power,
        noise.sigma_n_sq,
        b_min=b_min,
        b_max=b_max,
        table=table,
        signal_power=signal_power,
    )


@dataclass(frozen=True)
class ComplexityReport:
    complex_mults: int
    complex_adds: int
    real_adds: int
    evaluations: int


@dataclass(frozen=True)
class AllocationResult:
    allocation: BitAllocation
    objective: float
    evaluations: int
    complexity: ComplexityReport


def complexity_report(
    method: str,
    num_paths: int,
    num_tx: int,
    num_rx: int,
    num_bit_levels: int,
    evaluations: int,
) -> ComplexityReport:
    """Closed-form operation counts per allocator.

    Full search and the GA pay one full MSE evaluation per candidate:
    evals * (N_s^2 + 4 N_s + N_s (N_t + N_r)) complex multiplications and
    evals * (N_s^2 + 2 N_s + N_s (N_t + N_r)) complex additions.  The
    gain-table method pays N_s (3 N_b + N_t + N_r) multiplications and
    N_s (N_t + N_r - 1) complex additions once, plus evals * (N_s - 1) real
    additions for the candidate scan.
    """
    if evaluations < 0:
        raise ValueError("evaluations must be >= 0")
    method = method.upper()
    n_s, n_t, n_r = num_paths, num_tx, num_rx
    if method in ("FS", "GA"):
        mults = evaluations * (n_s**2 + 4 * n_s + n_s * (n_t + n_r))
        adds = evaluations * (n_s**2 + 2 * n_s + n_s * (n_t + n_r))
        return ComplexityReport(mults, adds, 0, evaluations)
    if method == "CRLB":
        mults = n_s * (3 * num_bit_levels + n_t + n_r)
        adds = n_s * (n_t + n_r - 1)
        real_adds = evaluations * (n_s - 1)
        return ComplexityReport(mults, adds, real_adds, evaluations)
    raise ValueError(f"unknown method {method!r}; expected FS, GA or CRLB")


def per_path_mse_table(
    channel: ChannelRealization,
    combiner: HybridCombiner,
    noise: NoiseModel,
    b_min: int = 1,
    b_max: int = 4,
    table: DistortionTable = DEFAULT_DISTORTION,
    signal_power: float = 1.0,
) -> np.ndarray:
    """(N_s, N_b) table of per-path trace-MSE contributions
    (sigma_n^2 + f/(1-f) * (1 + p*q_i)) / sigma_i^2."""
    sigma_sq = channel.sigma**2
    if np.any(sigma_sq <= 0):
        raise ValueError("trace MSE requires strictly positive sigma_i")
    analog = combiner.effective_analog()
    rows = analog.conj().T @ channel.H
    path_power = np.sum(np.abs(rows) ** 2, axis=1)
    cols = []
    for b in range(b_min, b_max + 1):
        g = table.gain_ratio(b)
        cols.append(
            (noise.sigma_n_sq + g * (1.0 + signal_power * path_power)) / sigma_sq
        )
    return np.stack(cols, axis=1)


def trace_mse_objective(
    channel: ChannelRealization,
    combiner: HybridCombiner,
    noise: NoiseModel,
    b_min: int = 1,
    b_max: int = 4,
    table: DistortionTable = DEFAULT_DISTORTION,
    signal_power: float = 1.0,
):
    """Callable bits-vector -> analytic trace MSE, for the GA."""
    contrib = per_path_mse_table(
        channel, combiner, noise, b_min, b_max, table, signal_power
    )
    rows = np.arange(contrib.shape[0])

    def objective(bits: np.ndarray) -> float:
        return float(contrib[rows, np.asarray(bits) - b_min].sum())

    return objective


def allocate_crlb(
    space: BudgetedSearchSpace,
    table: GainTable,
    num_tx: int = 0,
    num_rx: int = 0,
) -> AllocationResult:
    """Scan the gain table over the whole feasible set and keep the bit
    vector with the largest summed gain (first hit wins ties, which is the
    lexicographically smallest member given the enumeration order)."""
    members = space.member_array
    if members.shape[0] == 0:
        raise EmptySearchSpaceError("no feasible allocations")
    rows = np.arange(space.num_paths)
    scores = table.values[rows[None, :], members - table.b_min].sum(axis=1)
    idx = int(np.argmax(scores))
    allocation = BitAllocation(
        tuple(int(b) for b in members[idx]),
        cost_scale=space.cost_scale,
        b_min=space.b_min,
        b_max=space.b_max,
    )
    evaluations = members.shape[0]
    return AllocationResult(
        allocation=allocation,
        objective=float(scores[idx]),
        evaluations=evaluations,
        complexity=complexity_report(
            "CRLB", space.num_paths, num_tx, num_rx, space.num_bit_levels, evaluations
        ),
    )


def allocate_full_search(
    space: BudgetedSearchSpace,
    channel: ChannelRealization,
    combiner: HybridCombiner,
    noise: NoiseModel,
    table: DistortionTable = DEFAULT_DISTORTION,
    signal_power: float = 1.0,
) -> AllocationResult:
    """Exhaustive minimization of the analytic trace MSE over the feasible set."""
    members = space.member_array
    if members.shape[0] == 0:
        raise EmptySearchSpaceError("no feasible allocations")
    contrib = per_path_mse_table(
        channel, combiner, noise, space.b_min, space.b_max, table, signal_power
    )
    rows = np.arange(space.num_paths)
    scores = contrib[rows[None, :], members - space.b_min].sum(axis=1)
    idx = int(np.argmin(scores))
    allocation = BitAllocation(
        tuple(int(b) for b in members[idx]),
        cost_scale=space.cost_scale,
        b_min=space.b_min,
        b_max=space.b_max,
    )
    evaluations = members.shape[0]
    return AllocationResult(
        allocation=allocation,
        objective=float(scores[idx]),
        evaluations=evaluations,
        complexity=complexity_report(
            "FS",
            space.num_paths,
            channel.num_tx_antennas,
            channel.num_rx_antennas,
            space.num_bit_levels,
            evaluations,
        ),
    )


@dataclass(frozen=True)
class GaParams:
    population: int = 36
    generations: int = 9
    crossover_rate: float = 0.9
    mutation_rate: float = 0.1
    rng_seed: int = 0


def ga_preset(num_paths: int, rng_seed: int = 0) -> GaParams:
    """Population/generation presets sized to the standard evaluation budgets
    (36 x 9 for 8 paths, 45 x 45 for 12)."""
    if num_paths == 12:
        return GaParams(population=45, generations=45, rng_seed=rng_seed)
    return GaParams(population=36, generations=9, rng_seed=rng_seed)


def _repair(bits: np.ndarray, space: BudgetedSearchSpace) -> np.ndarray:
    budget = space._unit_budget()
    cost = int(np.sum(2**bits))
    while cost > budget:
        i = int(np.argmax(bits))
        cost -= 2 ** int(bits[i]) - 2 ** (int(bits[i]) - 1)
        bits[i] -= 1
    return bits


def allocate_ga(
    space: BudgetedSearchSpace,
    objective,
    params: GaParams,
    num_tx: int = 0,
    num_rx: int = 0,
) -> AllocationResult:
    """Generational GA over feasible bit vectors.

    Tournament selection of size 2, single-point crossover, per-gene
    mutation, budget repair (decrement the leftmost largest entry until
    feasible) and elitism of one.  Evaluation count is population x
    generations; deterministic given ``params.rng_seed``.
    """
    if params.population < 2:
        raise ValueError("population must be >= 2")
    rng = np.random.default_rng(params.rng_seed)
    n = space.num_paths

    pop = [
        _repair(rng.integers(space.b_min, space.b_max + 1, size=n), space)
        for _ in range(params.population)
    ]
    best_bits = None
    best_score = np.inf

    for gen in range(params.generations):
        scores = np.array([objective(ind) for ind in pop])
        elite_idx = int(np.argmin(scores))
        if scores[elite_idx] < best_score or (
            scores[elite_idx] == best_score
            and tuple(pop[elite_idx]) < tuple(best_bits)
        ):
            best_score = float(scores[elite_idx])
            best_bits = pop[elite_idx].copy()
        if gen == params.generations - 1:
            break

        def tournament():
            a, b = rng.integers(0, params.population, size=2)
            return pop[a] if scores[a] <= scores[b] else pop[b]

        next_pop = [pop[elite_idx].copy()]
        while len(next_pop) < params.population:
            parent_a = tournament().copy()
            parent_b = tournament().copy()
            if rng.random() < params.crossover_rate and n > 1:
                cut = int(rng.integers(1, n))
                child_a = np.concatenate([parent_a[:cut], parent_b[cut:]])
                child_b = np.concatenate([parent_b[:cut], parent_a[cut:]])
            else:
                child_a, child_b = parent_a, parent_b
            for child in (child_a, child_b):
                if len(next_pop) >= params.population:
                    break
                mask = rng.random(n) < params.mutation_rate
                if np.any(mask):
                    child = child.copy()
                    child[mask] = rng.integers(
                        space.b_min, space.b_max + 1, size=int(mask.sum())
                    )
                next_pop.append(_repair(child, space))
        pop = next_pop

    evaluations = params.population * params.generations
    allocation = BitAllocation(
        tuple(int(b) for b in best_bits),
        cost_scale=space.cost_scale,
        b_min=space.b_min,
        b_max=space.b_max,
    )
    return AllocationResult(
        allocation=allocation,
        objective=best_score,
        evaluations=evaluations,
        complexity=complexity_report(
            "GA", n, num_tx, num_rx, space.num_bit_levels, evaluations
        ),
    )
