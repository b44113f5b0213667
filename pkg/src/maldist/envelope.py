"""Block-constrained subsequence spaces and the envelope bound on their
limit measures.

A block spec partitions the positive integers into consecutive blocks of
lengths b_1, b_2, ... and fixes how many indices (m_j) a subsequence takes
from each block.  The sampling ratios q_j = m_j/b_j, weighted by m_j, form a
discrete probability measure on [0, 1]; its envelope function

    F(t) = mass((0-atoms and atoms <= t)) + t * sum_{q > t} weight(q)/q

caps every achievable limit measure of such subsequences of a well-distributed
sequence: mu(A) <= F(lambda(A)) for all Borel A.  Because F is concave, the
binding checks are on unions of partition cells, not single cells; the
exhaustive union check walks all 2^s - 1 of them.  `counting_oracle` verifies
the same bound from scratch at finite horizons by splitting the raw count
block by block.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Sequence

from .empirical import CellPartition, MeasureVector
from .exact import format_rational, parse_rational
from .rng import SplitMix64

__all__ = [
    "BlockSpec",
    "RatioMeasure",
    "EnvelopeFunction",
    "AdmissibilityReport",
    "check_admissible",
    "pi_measure",
    "F_pi_eval",
    "DominationResult",
    "envelope_dominates",
    "CountingOracleReport",
    "counting_oracle",
]

_ZERO = Fraction(0)
_ONE = Fraction(1)

EXHAUSTIVE_UNION_CAP = 25


class BlockSpec:
    """Block lengths b_j and per-block multiplicities m_j (j is 1-based).

    Lengths/multiplicities may be finite lists or generator functions of j;
    function-backed specs are materialized lazily and cached.  Invariants
    0 <= m_j <= b_j and b_j >= 1 are enforced as blocks materialize.
    """

    def __init__(
        self,
        lengths: Sequence[int] | Callable[[int], int],
        multiplicities: Sequence[int] | Callable[[int], int],
    ):
        self._b_fn = lengths if callable(lengths) else None
        self._m_fn = multiplicities if callable(multiplicities) else None
        self._b: list[int] = [] if callable(lengths) else [int(b) for b in lengths]
        self._m: list[int] = [] if callable(multiplicities) else [int(m) for m in multiplicities]
        if self._b_fn is None and self._m_fn is None and len(self._b) != len(self._m):
            raise ValueError("lengths and multiplicities must have equal length")
        self._a: list[int] = [0]
        self._M: list[int] = [0]
        self._check_prefix(min(len(self._b), len(self._m)) or 0)

    def _check_prefix(self, upto: int) -> None:
        for j in range(1, upto + 1):
            self._extend_sums(j)

    @property
    def block_count(self) -> int | None:
        """Number of blocks for list-backed specs, None if unbounded."""
        if self._b_fn is None and self._m_fn is None:
            return len(self._b)
        return None

    def _materialize(self, j: int) -> None:
        while len(self._b) < j:
            if self._b_fn is None:
                raise IndexError(f"block {j} beyond the {len(self._b)} given lengths")
            self._b.append(int(self._b_fn(len(self._b) + 1)))
        while len(self._m) < j:
            if self._m_fn is None:
                raise IndexError(f"block {j} beyond the {len(self._m)} given multiplicities")
            self._m.append(int(self._m_fn(len(self._m) + 1)))

    def _extend_sums(self, j: int) -> None:
        self._materialize(j)
        while len(self._a) <= j:
            i = len(self._a)  # block index being summed
            b, m = self._b[i - 1], self._m[i - 1]
            if b < 1:
                raise ValueError(f"block {i}: length {b} must be >= 1")
            if not 0 <= m <= b:
                raise ValueError(f"block {i}: multiplicity {m} violates 0 <= m <= b ({b})")
            self._a.append(self._a[-1] + b)
            self._M.append(self._M[-1] + m)

    def b(self, j: int) -> int:
        self._extend_sums(j)
        return self._b[j - 1]

    def m(self, j: int) -> int:
        self._extend_sums(j)
        return self._m[j - 1]

    def a(self, j: int) -> int:
        """End of block j: blocks are (a(j-1), a(j)]."""
        self._extend_sums(j)
        return self._a[j]

    def M(self, j: int) -> int:
        """Total multiplicity of blocks 1..j."""
        self._extend_sums(j)
        return self._M[j]

    def q(self, j: int) -> Fraction:
        return Fraction(self.m(j), self.b(j))

    def block_range(self, j: int) -> range:
        """The integers of block j."""
        return range(self.a(j - 1) + 1, self.a(j) + 1)

    def block_of(self, n: int) -> int:
        """Block index containing the integer n >= 1 (list specs must cover n)."""
        if n < 1:
            raise ValueError("indices are positive")
        j = 1
        while self.a(j) < n:
            j += 1
        return j

    def to_json(self) -> dict:
        if self.block_count is None:
            raise ValueError("function-backed specs serialize via their CLI names")
        return {"b": list(self._b), "m": list(self._m)}


@dataclass(frozen=True)
class RatioMeasure:
    """Finite discrete probability measure on [0, 1]: sorted distinct atom
    locations with positive weights summing to exactly 1."""

    atoms: tuple[tuple[Fraction, Fraction], ...]

    def __post_init__(self):
        atoms = tuple((Fraction(q), Fraction(w)) for q, w in self.atoms)
        object.__setattr__(self, "atoms", atoms)
        if any(not 0 <= q <= 1 for q, _ in atoms):
            raise ValueError("atom locations must lie in [0, 1]")
        if any(w <= 0 for _, w in atoms):
            raise ValueError("atom weights must be positive")
        if any(a >= b for (a, _), (b, _) in zip(atoms, atoms[1:])):
            raise ValueError("atom locations must be sorted and distinct")
        if sum(w for _, w in atoms) != 1:
            raise ValueError("atom weights must sum to exactly 1")

    @classmethod
    def from_pairs(cls, pairs: Iterable[tuple[Fraction, Fraction]]) -> "RatioMeasure":
        """Build from unsorted pairs, merging weights at equal locations."""
        merged: dict[Fraction, Fraction] = {}
        for q, w in pairs:
            q, w = Fraction(q), Fraction(w)
            if w == 0:
                continue
            merged[q] = merged.get(q, _ZERO) + w
        return cls(tuple(sorted(merged.items())))

    @classmethod
    def point_mass(cls, q: Fraction) -> "RatioMeasure":
        return cls(((Fraction(q), _ONE),))

    def mass_at_zero(self) -> Fraction:
        return self.atoms[0][1] if self.atoms and self.atoms[0][0] == 0 else _ZERO

    def mass_leq(self, t: Fraction) -> Fraction:
        return sum((w for q, w in self.atoms if q <= t), _ZERO)

    def harmonic_tail(self, t: Fraction) -> Fraction:
        """sum of weight(q)/q over atoms with q > t (never touches q = 0)."""
        return sum((w / q for q, w in self.atoms if q > t), _ZERO)

    def tv_norm_distance(self, other: "RatioMeasure") -> Fraction:
        """Total-variation norm sum_q |self({q}) - other({q})| over all atoms."""
        locs = {q for q, _ in self.atoms} | {q for q, _ in other.atoms}
        mine = dict(self.atoms)
        theirs = dict(other.atoms)
        return sum(
            (abs(mine.get(q, _ZERO) - theirs.get(q, _ZERO)) for q in locs), _ZERO
        )

    def to_json(self) -> list:
        return [[format_rational(q), format_rational(w)] for q, w in self.atoms]

    @classmethod
    def from_json(cls, obj: list) -> "RatioMeasure":
        return cls(tuple((parse_rational(q), parse_rational(w)) for q, w in obj))


def pi_measure(spec: BlockSpec, horizon: int) -> RatioMeasure:
    """Ratio measure of the first `horizon` blocks: weight m_j/M_horizon at
    each distinct ratio q_j = m_j/b_j (blocks with m_j = 0 contribute nothing)."""
    if horizon < 1:
        raise ValueError("horizon must be >= 1")
    total = spec.M(horizon)
    if total == 0:
        raise ValueError("all multiplicities are zero up to the horizon")
    return RatioMeasure.from_pairs(
        (spec.q(j), Fraction(spec.m(j), total))
        for j in range(1, horizon + 1)
        if spec.m(j) > 0
    )


def F_pi_eval(pi: RatioMeasure, t0: Fraction) -> Fraction:
    """Envelope value F(t0) = pi([0, t0]) + t0 * sum_{q > t0} weight(q)/q, exact."""
    t0 = Fraction(t0)
    if not 0 <= t0 <= 1:
        raise ValueError("argument must lie in [0, 1]")
    return pi.mass_leq(t0) + t0 * pi.harmonic_tail(t0)


class EnvelopeFunction:
    """Callable envelope with a cache of exact evaluations."""

    def __init__(self, pi: RatioMeasure):
        self.pi = pi
        self._cache: dict[Fraction, Fraction] = {}

    def __call__(self, t0: Fraction) -> Fraction:
        t0 = Fraction(t0)
        got = self._cache.get(t0)
        if got is None:
            got = F_pi_eval(self.pi, t0)
            self._cache[t0] = got
        return got

    def table(self, grid: Sequence[Fraction]) -> list[tuple[Fraction, Fraction]]:
        return [(Fraction(t), self(t)) for t in grid]


@dataclass(frozen=True)
class AdmissibilityReport:
    """Finite-horizon trend report for a block spec.

    Admissibility requires b_j -> infinity and m_j/M_j -> 0; at any finite
    horizon only the trend is observable, so the report shows tail minima of
    b_j and tail maxima of m_j/M_j at a few anchor points and flags the cases
    where the trend visibly fails.
    """

    horizon: int
    anchors: tuple[int, ...]
    b_tail_min: tuple[int, ...]
    ratio_tail_max: tuple[Fraction, ...]
    b_bounded_flag: bool
    ratio_stalled_flag: bool

    @property
    def admissible_trend(self) -> bool:
        return not (self.b_bounded_flag or self.ratio_stalled_flag)


def check_admissible(spec: BlockSpec, horizon: int) -> AdmissibilityReport:
    """Validate m_j <= b_j up to the horizon (hard error if violated, done by
    BlockSpec itself) and report divergence/vanishing trends."""
    if horizon < 1:
        raise ValueError("horizon must be >= 1")
    spec.M(horizon)  # forces validation of every block up to the horizon
    anchors = sorted({1, max(1, horizon // 4), max(1, horizon // 2), max(1, (3 * horizon) // 4)})
    ratios = []
    for j in range(1, horizon + 1):
        mj = spec.M(j)
        ratios.append(Fraction(spec.m(j), mj) if mj > 0 else _ONE)
    b_tail_min = []
    ratio_tail_max = []
    for k in anchors:
        b_tail_min.append(min(spec.b(j) for j in range(k, horizon + 1)))
        ratio_tail_max.append(max(ratios[k - 1 : horizon]))
    b_bounded = b_tail_min[-1] <= b_tail_min[0] and horizon > 1
    ratio_stalled = ratio_tail_max[-1] >= ratio_tail_max[0] and horizon > 1
    return AdmissibilityReport(
        horizon=horizon,
        anchors=tuple(anchors),
        b_tail_min=tuple(b_tail_min),
        ratio_tail_max=tuple(ratio_tail_max),
        b_bounded_flag=b_bounded,
        ratio_stalled_flag=ratio_stalled,
    )


@dataclass(frozen=True)
class DominationResult:
    ok: bool
    violation: tuple[int, ...] | None = None
    union_mass: Fraction | None = None
    bound: Fraction | None = None
    unions_checked: int = 0
    exhaustive: bool = True


def _dfs_first_violation(
    mu_masses: Sequence[Fraction],
    lam_masses: Sequence[Fraction],
    envelope: EnvelopeFunction,
    tol: Fraction,
    first_cell_lo: int,
    first_cell_hi: int,
) -> tuple[tuple[int, ...] | None, Fraction | None, Fraction | None, int]:
    """Pre-order walk of the subset tree (lexicographic order on the sorted
    index tuples); returns the first violating union, its masses, and the
    number of unions visited."""
    s = len(mu_masses)
    checked = 0
    stack: list[tuple[tuple[int, ...], Fraction, Fraction]] = []
    for first in range(first_cell_hi - 1, first_cell_lo - 1, -1):
        stack.append(((first,), mu_masses[first], lam_masses[first]))
    while stack:
        cells, mu_val, lam_val = stack.pop()
        checked += 1
        if mu_val > envelope(lam_val) + tol:
            return cells, mu_val, envelope(lam_val), checked
        last = cells[-1]
        for nxt in range(s - 1, last, -1):
            stack.append((cells + (nxt,), mu_val + mu_masses[nxt], lam_val + lam_masses[nxt]))
    return None, None, None, checked


def envelope_dominates(
    mu: MeasureVector,
    lam: MeasureVector,
    pi: RatioMeasure,
    partition: CellPartition | None = None,
    tol: Fraction = _ZERO,
    mode: str = "exhaustive",
    workers: int = 1,
    sample_count: int = 4096,
    seed: int = 0,
) -> DominationResult:
    """Check mu(A) <= F(lambda(A)) + tol for unions A of partition cells.

    mode "cellwise" checks single cells only (a fast necessary pre-filter,
    strictly weaker than the union check because F is concave); "exhaustive"
    walks all 2^s - 1 unions in lexicographic order and reports the first
    violation.  Above EXHAUSTIVE_UNION_CAP cells the exhaustive walk is
    refused and a seeded random sample of unions is drawn instead (reported
    as non-exhaustive).  `workers` > 1 splits the walk by leading cell and
    merges deterministically (earliest violation in the same order wins).
    """
    s = mu.size
    if lam.size != s or (partition is not None and partition.size != s):
        raise ValueError("mu, lambda and partition disagree on the cell count")
    tol = Fraction(tol)
    envelope = EnvelopeFunction(pi)

    if mode == "cellwise":
        for i in range(s):
            bound = envelope(lam.masses[i])
            if mu.masses[i] > bound + tol:
                return DominationResult(False, (i,), mu.masses[i], bound, i + 1)
        return DominationResult(True, unions_checked=s)
    if mode != "exhaustive":
        raise ValueError(f"unknown mode {mode!r}")

    if s > EXHAUSTIVE_UNION_CAP:
        rng = SplitMix64(seed)
        checked = 0
        for _ in range(sample_count):
            cells: tuple[int, ...] = ()
            while not cells:
                cells = tuple(i for i in range(s) if rng.next_u64() & 1)
            mu_val = mu.mass(cells)
            bound = envelope(lam.mass(cells))
            checked += 1
            if mu_val > bound + tol:
                return DominationResult(False, cells, mu_val, bound, checked, exhaustive=False)
        return DominationResult(True, unions_checked=checked, exhaustive=False)

    if workers > 1:
        return _dominates_parallel(mu, lam, pi, tol, workers)
    cells, mu_val, bound, checked = _dfs_first_violation(
        mu.masses, lam.masses, envelope, tol, 0, s
    )
    if cells is not None:
        return DominationResult(False, cells, mu_val, bound, checked)
    return DominationResult(True, unions_checked=checked)


def _subtree_task(args):
    mu_masses, lam_masses, pi, tol, lo, hi = args
    return _dfs_first_violation(mu_masses, lam_masses, EnvelopeFunction(pi), tol, lo, hi)


def _dominates_parallel(mu, lam, pi, tol, workers) -> DominationResult:
    from concurrent.futures import ProcessPoolExecutor

    s = mu.size
    tasks = [(mu.masses, lam.masses, pi, tol, first, first + 1) for first in range(s)]
    checked = 0
    with ProcessPoolExecutor(max_workers=workers) as pool:
        # Subtrees rooted at cell 0, 1, ... preserve the global lexicographic
        # order, so the first violating subtree (in root order) wins.
        for cells, mu_val, bound, n in pool.map(_subtree_task, tasks):
            checked += n
            if cells is not None:
                return DominationResult(False, cells, mu_val, bound, checked)
    return DominationResult(True, unions_checked=checked)


@dataclass(frozen=True)
class CheckpointBound:
    blocks: int
    chosen_total: int
    count: int
    c1: int
    c2: int
    c3: int
    envelope_value: Fraction
    rhs: Fraction
    ok: bool


@dataclass(frozen=True)
class CountingOracleReport:
    """Block-by-block recount of the envelope bound at finite horizons.

    The chosen-index count of a union A up to block N splits as C1 + C2 + C3
    (early blocks, blocks with ratio <= t0, blocks with ratio > t0); the three
    pieces certify count <= M_N * (F(t0) + eps/t0) + M_{j(eps)} where j(eps)
    is the first block after which every full-block frequency of A stays
    within eps of lambda(A).
    """

    t0: Fraction
    eps: Fraction
    j_eps: int
    lam_mass: Fraction
    checkpoints: tuple[CheckpointBound, ...]

    @property
    def ok(self) -> bool:
        return all(c.ok for c in self.checkpoints)


def counting_oracle(
    x: Callable[[int], Fraction],
    indices: Sequence[int],
    spec: BlockSpec,
    partition: CellPartition,
    lam: MeasureVector,
    cells: Iterable[int],
    t0: Fraction,
    checkpoints: Sequence[int],
    eps: Fraction,
) -> CountingOracleReport:
    """Verify the finite-horizon envelope bound for an explicit subsequence.

    `x` maps a positive integer to a point, `indices` is the chosen
    subsequence (must be a valid member through the last checkpoint block),
    `cells` the union A, t0 an upper bound for lambda(A), `checkpoints` block
    counts N_k.
    """
    t0 = Fraction(t0)
    eps = Fraction(eps)
    if eps <= 0 or t0 <= 0:
        raise ValueError("eps and t0 must be positive")
    cells = tuple(sorted(set(cells)))
    lam_mass = lam.mass(cells)
    if lam_mass > t0:
        raise ValueError("t0 must dominate lambda(A)")
    cps = list(checkpoints)
    if not cps or any(a >= b for a, b in zip(cps, cps[1:])):
        raise ValueError("checkpoints must be strictly increasing and nonempty")
    last = cps[-1]
    horizon_end = spec.a(last)
    if sum(1 for n in indices if n <= horizon_end) != spec.M(last):
        raise ValueError("subsequence does not cover whole blocks up to the last checkpoint")
    cellset = set(cells)

    def hit(n: int) -> bool:
        return partition.cell_index(x(n)) in cellset

    # Full-block hit frequencies determine j(eps).
    full_defect = []
    for j in range(1, last + 1):
        cj = sum(1 for n in spec.block_range(j) if hit(n))
        full_defect.append(abs(Fraction(cj, spec.b(j)) - lam_mass))
    j_eps = 0
    for j in range(last, 0, -1):
        if full_defect[j - 1] > eps:
            j_eps = j
            break

    chosen_hits = []
    for j in range(1, last + 1):
        lo, hi = spec.a(j - 1), spec.a(j)
        chosen_hits.append(sum(1 for n in indices if lo < n <= hi and hit(n)))

    bounds = []
    for N in cps:
        pi_n = pi_measure(spec, N)
        envelope_value = F_pi_eval(pi_n, t0)
        m_total = spec.M(N)
        c1 = sum(chosen_hits[: min(j_eps, N)])
        c2 = sum(
            chosen_hits[j - 1]
            for j in range(j_eps + 1, N + 1)
            if spec.q(j) <= t0
        )
        c3 = sum(
            chosen_hits[j - 1]
            for j in range(j_eps + 1, N + 1)
            if spec.q(j) > t0
        )
        count = c1 + c2 + c3
        rhs = m_total * (envelope_value + eps / t0) + spec.M(min(j_eps, N))
        bounds.append(
            CheckpointBound(
                blocks=N,
                chosen_total=m_total,
                count=count,
                c1=c1,
                c2=c2,
                c3=c3,
                envelope_value=envelope_value,
                rhs=rhs,
                ok=Fraction(count) <= rhs,
            )
        )
    return CountingOracleReport(
        t0=t0,
        eps=eps,
        j_eps=j_eps,
        lam_mass=lam_mass,
        checkpoints=tuple(bounds),
    )
