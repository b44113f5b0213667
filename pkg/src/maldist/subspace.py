"""Subsequences constrained block by block, and extensions that steer their
empirical measure toward a target.

A member sequence takes exactly m_j indices from block j.  `greedy_extension`
extends a valid prefix block by block toward a target measure that the
envelope bound allows, preferring indices whose points lie in the cells the
target still under-serves; `brute_force_extension` minimizes the final
total deviation exactly over all admissible extensions (small instances) and
is the oracle the greedy is measured against.  The exchange structure of the
minimizer (high-deviation cells are served before any other cell gets an
index) is checkable per block via `exchange_facts`.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import comb
from typing import Callable, Sequence

from .empirical import CellPartition, MeasureVector
from .envelope import BlockSpec, RatioMeasure, envelope_dominates
from .rng import SplitMix64

__all__ = [
    "ExtensionTarget",
    "BlockTrace",
    "ExtensionResult",
    "BruteForceResult",
    "ExchangeFactsReport",
    "validate_membership",
    "sample_uniform",
    "greedy_extension",
    "brute_force_extension",
    "exchange_facts",
    "deviation_gap_cells",
]

_ZERO = Fraction(0)

PointSource = Callable[[int], Fraction]


def _as_source(x: PointSource | Sequence[Fraction]) -> PointSource:
    if callable(x):
        return x
    seq = x

    def source(n: int) -> Fraction:
        return seq[n - 1]

    return source


def validate_membership(
    indices: Sequence[int], spec: BlockSpec, blocks: int | None = None
) -> bool | None:
    """Exact per-block membership check of a strictly increasing prefix.

    Completed blocks must hold exactly m_j indices (False otherwise).  A
    prefix ending strictly inside a block is judged by extendability: too
    many indices there, or too few remaining slots, is False; a count already
    at m_j leaves nothing open (True, given the completed blocks pass); an
    underfull block that later indices could still top up is None
    ("indeterminate"), never False.
    """
    idx = list(indices)
    if any(n < 1 for n in idx):
        raise ValueError("indices must be positive")
    if any(a >= b for a, b in zip(idx, idx[1:])):
        raise ValueError("indices must be strictly increasing")
    if not idx:
        return True if blocks is None else (all(spec.m(j) == 0 for j in range(1, blocks + 1)))
    nmax = idx[-1]
    if blocks is not None:
        complete = blocks
        partial_block = None
    else:
        total = spec.block_count
        complete = 0
        while (total is None or complete < total) and spec.a(complete + 1) <= nmax:
            complete += 1
        if spec.a(complete) < nmax:
            if total is not None and complete >= total:
                raise ValueError("prefix reaches beyond the spec's blocks")
            partial_block = complete + 1
        else:
            partial_block = None
    counts: dict[int, int] = {}
    horizon = spec.a(complete) if partial_block is None else spec.a(partial_block)
    for n in idx:
        if n > horizon:
            continue
        j = spec.block_of(n)
        counts[j] = counts.get(j, 0) + 1
    for j in range(1, complete + 1):
        if counts.get(j, 0) != spec.m(j):
            return False
    if partial_block is not None:
        count = counts.get(partial_block, 0)
        m = spec.m(partial_block)
        remaining = spec.a(partial_block) - nmax
        if count > m or count + remaining < m:
            return False
        if count < m:
            return None
    return True


def sample_uniform(spec: BlockSpec, blocks: int, seed: int) -> tuple[int, ...]:
    """Seeded uniform member prefix: an independent uniform m_j-subset of each
    block, drawn from one SplitMix64 stream in block order."""
    if blocks < 1:
        raise ValueError("need at least one block")
    rng = SplitMix64(seed)
    out: list[int] = []
    for j in range(1, blocks + 1):
        out.extend(rng.subset(spec.a(j - 1) + 1, spec.a(j), spec.m(j)))
    return tuple(out)


@dataclass(frozen=True)
class ExtensionTarget:
    """Target cell measure, tolerance, and the envelope the target must obey."""

    mu: MeasureVector
    eps: Fraction
    pi: RatioMeasure

    def __post_init__(self):
        object.__setattr__(self, "eps", Fraction(self.eps))
        if self.eps <= 0:
            raise ValueError("eps must be positive")


@dataclass(frozen=True)
class BlockTrace:
    block: int
    chosen: tuple[int, ...]
    cumulative: int
    deviations: tuple[Fraction, ...]
    y_cells: tuple[int, ...]


@dataclass(frozen=True)
class ExtensionResult:
    indices: tuple[int, ...]
    blocks: int
    deviations: tuple[Fraction, ...]
    total_abs_dev: Fraction
    max_abs_dev: Fraction
    achieved: bool
    trace: tuple[BlockTrace, ...]


def deviation_gap_cells(
    deviations: Sequence[Fraction], eps: Fraction, fallback_positive: bool
) -> tuple[int, ...]:
    """High-deviation cell set: cells above the first sorted-deviation gap
    exceeding eps/s^2 (with the gap's top value also above eps/s^2).

    With `fallback_positive`, a missing gap falls back to all cells of
    positive deviation (the steering rule); otherwise the result is empty,
    meaning no exchange obligation is in force.
    """
    s = len(deviations)
    thresh = Fraction(eps) / (s * s)
    order = sorted(range(s), key=lambda i: (-deviations[i], i))
    for r in range(s - 1):
        top, nxt = deviations[order[r]], deviations[order[r + 1]]
        if top - nxt > thresh and top > thresh:
            return tuple(sorted(order[: r + 1]))
    if fallback_positive:
        return tuple(i for i in range(s) if deviations[i] > 0)
    return ()


def _prefix_state(
    prefix: Sequence[int],
    spec: BlockSpec,
    cell_of: Callable[[int], int],
    s: int,
    j0: int | None,
) -> tuple[int, list[int]]:
    idx = list(prefix)
    if any(a >= b for a, b in zip(idx, idx[1:])):
        raise ValueError("prefix must be strictly increasing")
    if j0 is None:
        j0 = 0
        while idx and spec.a(j0 + 1) <= idx[-1]:
            j0 += 1
    if idx and idx[-1] > spec.a(j0):
        raise ValueError("prefix reaches beyond its covered blocks")
    if len(idx) != spec.M(j0):
        raise ValueError(f"prefix must cover blocks 1..{j0} exactly")
    if validate_membership(idx, spec, blocks=j0) is False:
        raise ValueError("prefix is not a valid member through its blocks")
    counts = [0] * s
    for n in idx:
        counts[cell_of(n)] += 1
    return j0, counts


def greedy_extension(
    prefix: Sequence[int],
    spec: BlockSpec,
    x: PointSource | Sequence[Fraction],
    partition: CellPartition,
    lam: MeasureVector,
    target: ExtensionTarget,
    j0: int | None = None,
    max_blocks: int = 512,
    fixed_blocks: int | None = None,
    validate_target: bool = True,
) -> ExtensionResult:
    """Extend a valid prefix block by block toward the target measure.

    Indices are picked one at a time.  Each pick recomputes the steering
    deviations, takes the high-deviation cell set Y from them (gap rule,
    falling back to the positive-deviation cells), and prefers candidates in
    Y while Y still has unmet deficit, then the largest remaining cell
    deficit, ties by smallest index.  At the asymptotic scale the design
    mirrors (per-block mass vanishing relative to the total) this per-pick
    refresh coincides with recomputing Y once per block; at finite scale it
    is what keeps a block from overshooting its own steering set.

    Steering measures deviations against the sample size where the result
    will be judged: the end of the current block on an open horizon, or the
    end of block j0 + fixed_blocks when the horizon is fixed.  A fixed
    horizon also discounts picks that later blocks will force regardless
    (blocks whose other-cell supply cannot absorb their multiplicity), since
    chasing mass that arrives anyway gives away accuracy the remaining
    blocks cannot return.

    With `fixed_blocks` the extension runs exactly that many blocks past the
    prefix; otherwise it stops at the first block boundary where every
    |deviation| < eps and the prefix mass has washed out to below eps/(3s),
    or gives a partial result once `max_blocks` is exhausted.
    """
    source = _as_source(x)
    s = partition.size
    if lam.size != s or target.mu.size != s:
        raise ValueError("partition, lambda and target sizes disagree")
    if validate_target:
        verdict = envelope_dominates(target.mu, lam, target.pi, partition)
        if not verdict.ok:
            raise ValueError(
                f"target exceeds the envelope on cells {verdict.violation}: "
                f"{verdict.union_mass} > {verdict.bound}"
            )
    cell_cache: dict[int, int] = {}

    def cell_of(n: int) -> int:
        got = cell_cache.get(n)
        if got is None:
            got = partition.cell_index(source(n))
            cell_cache[n] = got
        return got

    j0_val, counts = _prefix_state(prefix, spec, cell_of, s, j0)
    chosen = list(prefix)
    mu = target.mu.masses
    eps = target.eps
    trace: list[BlockTrace] = []
    prefix_mass = spec.M(j0_val)

    def deviations(total: int) -> tuple[Fraction, ...]:
        if total == 0:
            return tuple(mu)
        return tuple(mu[i] - Fraction(counts[i], total) for i in range(s))

    achieved = False
    j = j0_val
    blocks_budget = fixed_blocks if fixed_blocks is not None else max_blocks
    final_total = spec.M(j0_val + fixed_blocks) if fixed_blocks is not None else None
    forced_after: dict[int, list[int]] = {}
    if fixed_blocks is not None:
        # forced_after[j][i]: picks of cell i that blocks after j will force
        # because their other cells cannot absorb the block multiplicity.
        last = j0_val + fixed_blocks
        suffix = [0] * s
        forced_after[last] = list(suffix)
        for jj in range(last, j0_val, -1):
            avail = [0] * s
            for n in spec.block_range(jj):
                avail[cell_of(n)] += 1
            m_jj = spec.m(jj)
            total_avail = sum(avail)
            for i in range(s):
                suffix[i] += max(0, m_jj - (total_avail - avail[i]))
            forced_after[jj - 1] = list(suffix)
    while j - j0_val < blocks_budget:
        j += 1
        m_j = spec.m(j)
        steer_total = final_total if final_total is not None else len(chosen) + m_j
        future = forced_after.get(j, [0] * s)
        deficit = [mu[i] * steer_total - counts[i] - future[i] for i in range(s)]
        y_entry = deviation_gap_cells(
            tuple(d / steer_total for d in deficit) if steer_total else tuple(mu),
            eps,
            fallback_positive=True,
        )
        pool = sorted(spec.block_range(j))
        picked: list[int] = []
        for _ in range(m_j):
            devs = tuple(d / steer_total for d in deficit) if steer_total else tuple(mu)
            y_set = set(deviation_gap_cells(devs, eps, fallback_positive=True))
            best = None
            best_key = None
            for n in pool:
                c = cell_of(n)
                key = (0 if (c in y_set and deficit[c] > 0) else 1, -deficit[c], n)
                if best_key is None or key < best_key:
                    best, best_key = n, key
            picked.append(best)
            pool.remove(best)
            c = cell_of(best)
            counts[c] += 1
            deficit[c] -= 1
        picked.sort()
        chosen.extend(picked)
        devs_after = deviations(len(chosen))
        trace.append(
            BlockTrace(
                block=j,
                chosen=tuple(picked),
                cumulative=len(chosen),
                deviations=devs_after,
                y_cells=y_entry,
            )
        )
        if fixed_blocks is None:
            washout = (
                prefix_mass == 0
                or Fraction(prefix_mass, len(chosen)) < eps / (3 * s)
            )
            if washout and max(abs(d) for d in devs_after) < eps:
                achieved = True
                break
    final = deviations(len(chosen))
    if fixed_blocks is not None:
        achieved = max(abs(d) for d in final) < eps
    return ExtensionResult(
        indices=tuple(chosen),
        blocks=j,
        deviations=final,
        total_abs_dev=sum((abs(d) for d in final), _ZERO),
        max_abs_dev=max(abs(d) for d in final),
        achieved=achieved,
        trace=tuple(trace),
    )


@dataclass(frozen=True)
class BruteForceResult:
    indices: tuple[int, ...]
    deviations: tuple[Fraction, ...]
    total_abs_dev: Fraction
    sorted_dev_tuple: tuple[Fraction, ...]
    leaves: int


def brute_force_extension(
    prefix: Sequence[int],
    spec: BlockSpec,
    x: PointSource | Sequence[Fraction],
    partition: CellPartition,
    target: ExtensionTarget,
    j1: int,
    j0: int | None = None,
    limit: int = 10**7,
) -> BruteForceResult:
    """Exact minimizer of the final total absolute deviation over all
    admissible extensions through block j1.

    Ties on the total are broken by the lexicographically smallest sorted
    (descending) deviation tuple, then by the smallest per-block cell
    allocation, which pins a unique minimizer; within a block, cells receive
    their smallest available indices.  The admissible-extension count
    prod C(b_j, m_j) must stay within `limit`.
    """
    source = _as_source(x)
    s = partition.size
    cell_cache: dict[int, int] = {}

    def cell_of(n: int) -> int:
        got = cell_cache.get(n)
        if got is None:
            got = partition.cell_index(source(n))
            cell_cache[n] = got
        return got

    j0_val, base_counts = _prefix_state(prefix, spec, cell_of, s, j0)
    if j1 < j0_val:
        raise ValueError("j1 must not precede the prefix blocks")
    space = 1
    for j in range(j0_val + 1, j1 + 1):
        space *= comb(spec.b(j), spec.m(j))
        if space > limit:
            raise ValueError(f"search space exceeds limit {limit}")
    total = spec.M(j1)
    mu = target.mu.masses
    den = 1
    for f in mu:
        den = den * f.denominator // _gcd(den, f.denominator)
    p_scaled = [int(f * den) for f in mu]  # mu_i * den, exact integers

    # Per block: available indices per cell and the distinct cell-count
    # allocations (k_0..k_{s-1}) with sum m_j, k_i <= avail_i.
    block_opts: list[list[tuple[int, ...]]] = []
    block_avail: list[list[list[int]]] = []
    for j in range(j0_val + 1, j1 + 1):
        avail: list[list[int]] = [[] for _ in range(s)]
        for n in spec.block_range(j):
            avail[cell_of(n)].append(n)
        block_avail.append(avail)
        block_opts.append(_count_vectors(tuple(len(a) for a in avail), spec.m(j)))

    best_key = None
    best_path: tuple[tuple[int, ...], ...] | None = None
    leaves = 0
    path: list[tuple[int, ...]] = []

    def walk(depth: int, counts: list[int]):
        nonlocal best_key, best_path, leaves
        if depth == len(block_opts):
            leaves += 1
            scaled = [p_scaled[i] * total - counts[i] * den for i in range(s)]
            t = sum(abs(v) for v in scaled)
            key = (t, tuple(sorted(scaled, reverse=True)), tuple(path))
            if best_key is None or key < best_key:
                best_key = key
                best_path = tuple(path)
            return
        for vec in block_opts[depth]:
            for i in range(s):
                counts[i] += vec[i]
            path.append(vec)
            walk(depth + 1, counts)
            path.pop()
            for i in range(s):
                counts[i] -= vec[i]

    walk(0, list(base_counts))
    if best_path is None:  # every block supplied a vector, so this cannot fire
        raise AssertionError("enumeration produced no candidate")

    indices = list(prefix)
    for depth, vec in enumerate(best_path):
        for i in range(s):
            indices.extend(block_avail[depth][i][: vec[i]])
    indices.sort()
    counts = list(base_counts)
    for vec in best_path:
        for i in range(s):
            counts[i] += vec[i]
    devs = tuple(mu[i] - Fraction(counts[i], total) for i in range(s))
    return BruteForceResult(
        indices=tuple(indices),
        deviations=devs,
        total_abs_dev=sum((abs(d) for d in devs), _ZERO),
        sorted_dev_tuple=tuple(sorted(devs, reverse=True)),
        leaves=leaves,
    )


def _gcd(a: int, b: int) -> int:
    while b:
        a, b = b, a % b
    return a


def _count_vectors(avail: tuple[int, ...], m: int) -> list[tuple[int, ...]]:
    """All (k_i) with sum = m and 0 <= k_i <= avail_i, lexicographically
    largest-first on the first cells (so smaller cells yield deterministic
    order)."""
    out: list[tuple[int, ...]] = []
    vec: list[int] = []

    def rec(i: int, left: int):
        if i == len(avail) - 1:
            if left <= avail[i]:
                out.append(tuple(vec + [left]))
            return
        for k in range(min(avail[i], left), -1, -1):
            vec.append(k)
            rec(i + 1, left - k)
            vec.pop()

    if m == 0:
        return [tuple([0] * len(avail))]
    rec(0, m)
    if not out:
        raise ValueError("block cannot supply the required multiplicity")
    return out


@dataclass(frozen=True)
class BlockFactCheck:
    block: int
    y_available: int
    y_chosen: int
    multiplicity: int
    literal_ok: bool
    exchange_ok: bool


@dataclass(frozen=True)
class ExchangeFactsReport:
    y_cells: tuple[int, ...]
    applicable: bool
    blocks: tuple[BlockFactCheck, ...]

    @property
    def literal_ok(self) -> bool:
        return all(b.literal_ok for b in self.blocks)

    @property
    def exchange_ok(self) -> bool:
        return all(b.exchange_ok for b in self.blocks)


def exchange_facts(
    indices: Sequence[int],
    spec: BlockSpec,
    x: PointSource | Sequence[Fraction],
    partition: CellPartition,
    target: ExtensionTarget,
    j_start: int,
    j_end: int,
) -> ExchangeFactsReport:
    """Check the exchange structure of a candidate solution on blocks
    (j_start, j_end].

    Y is the high-deviation cell set of the *final* deviations (gap rule; if
    no gap exists the obligations are vacuous and the report says so).  Per
    block, either every chosen index lies in Y (when the block offers at
    least m_j indices in Y) or every offered Y-index is chosen.  A literal
    failure is additionally retested by swapping: `exchange_ok` stays true
    when no single in-block swap of a chosen non-Y index for an unchosen
    Y-index strictly improves the (total deviation, sorted tuple) objective,
    which is exactly the optimality the minimizer must have.
    """
    source = _as_source(x)
    s = partition.size
    cell_of = lambda n: partition.cell_index(source(n))
    chosen_set = set(indices)
    total = sum(1 for n in indices if n <= spec.a(j_end))
    counts = [0] * s
    for n in indices:
        if n <= spec.a(j_end):
            counts[cell_of(n)] += 1
    mu = target.mu.masses
    devs = [mu[i] - Fraction(counts[i], total) for i in range(s)]
    y_cells = deviation_gap_cells(devs, target.eps, fallback_positive=False)
    if not y_cells:
        return ExchangeFactsReport(y_cells=(), applicable=False, blocks=())
    y_set = set(y_cells)

    def objective(cnts: Sequence[int]) -> tuple[Fraction, tuple[Fraction, ...]]:
        d = [mu[i] - Fraction(cnts[i], total) for i in range(s)]
        return sum((abs(v) for v in d), _ZERO), tuple(sorted(d, reverse=True))

    base_obj = objective(counts)
    checks = []
    for j in range(j_start + 1, j_end + 1):
        members = list(spec.block_range(j))
        y_avail = sum(1 for n in members if cell_of(n) in y_set)
        in_block_chosen = [n for n in members if n in chosen_set]
        y_chosen = sum(1 for n in in_block_chosen if cell_of(n) in y_set)
        m_j = spec.m(j)
        if y_avail >= m_j:
            literal = y_chosen == m_j
        else:
            literal = y_chosen == y_avail
        exchange = literal
        if not literal:
            exchange = True
            swap_out = [n for n in in_block_chosen if cell_of(n) not in y_set]
            swap_in = [n for n in members if n not in chosen_set and cell_of(n) in y_set]
            for n_out in swap_out:
                for n_in in swap_in:
                    trial = list(counts)
                    trial[cell_of(n_out)] -= 1
                    trial[cell_of(n_in)] += 1
                    if objective(trial) < base_obj:
                        exchange = False
                        break
                if not exchange:
                    break
        checks.append(
            BlockFactCheck(
                block=j,
                y_available=y_avail,
                y_chosen=y_chosen,
                multiplicity=m_j,
                literal_ok=literal,
                exchange_ok=exchange,
            )
        )
    return ExchangeFactsReport(y_cells=y_cells, applicable=True, blocks=tuple(checks))
