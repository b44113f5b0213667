"""Explicit rational points whose multiplication orbits are provably
irregular, built by nested-interval chains.

The engine is `mixing_chain`: given multipliers growing fast enough, it pins
down a nested chain of rational intervals forcing n_k * alpha mod 1 into a
prescribed target interval for every k, and returns the midpoint of the last
interval.  On top of it sit two witness constructions (one forcing a short
interval to be hit with frequency above 1/(2c) along a geometric-growth
sequence, one forcing an entire histogram shape at horizon N0^2), the
gap-{1,2} avoidance extension that keeps an orbit out of a fixed interval
forever, and the zero-block digit surgery used by the doubling-map analysis.

Every construction re-verifies its own claims through independent exact
arithmetic before returning.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .doubling import BinaryPoint
from .exact import binary_digits, mod1
from .torus import (
    TorusInterval,
    interval_contains_interval,
    mul_mod1,
)

__all__ = [
    "MixingConfigError",
    "MixingConfig",
    "MixingChain",
    "mixing_chain",
    "WitnessPlan",
    "auto_plan",
    "HitFrequencyWitness",
    "hit_frequency_witness",
    "HistogramTarget",
    "HistogramWitness",
    "histogram_witness",
    "AvoidanceResult",
    "avoidance_sequence",
    "zero_block_alpha",
]

_ZERO = Fraction(0)
_ONE = Fraction(1)
_HALF = Fraction(1, 2)

# Default start interval for chains whose witness may sit anywhere.
_DEFAULT_START = TorusInterval(_ZERO, _HALF)


class MixingConfigError(ValueError):
    """A growth or size hypothesis of a chain configuration fails; carries the
    index of the first offending multiplier (0 for the initial-size check)."""

    def __init__(self, index: int, reason: str):
        self.index = index
        super().__init__(f"mixing hypothesis fails at k={index}: {reason}")


@dataclass(frozen=True)
class MixingConfig:
    """Multipliers n_1 < n_2 < ..., target width eps, start width delta, the
    start interval (length >= delta) and one target interval (length >= eps)
    per multiplier.

    Hypotheses checked exactly: n_{k+1} > (2/eps) n_k for all k, and
    n_1 > 2/delta.
    """

    multipliers: tuple[int, ...]
    eps: Fraction
    delta: Fraction
    start: TorusInterval
    targets: tuple[TorusInterval, ...]

    def __post_init__(self):
        object.__setattr__(self, "multipliers", tuple(int(n) for n in self.multipliers))
        object.__setattr__(self, "eps", Fraction(self.eps))
        object.__setattr__(self, "delta", Fraction(self.delta))
        object.__setattr__(self, "targets", tuple(self.targets))

    def validate(self) -> None:
        if not 0 < self.eps < 1 or not 0 < self.delta < 1:
            raise MixingConfigError(0, "eps and delta must lie in (0, 1)")
        if len(self.targets) != len(self.multipliers):
            raise MixingConfigError(0, "need one target interval per multiplier")
        if self.start.length < self.delta:
            raise MixingConfigError(0, f"start interval shorter than delta={self.delta}")
        if self.start.wraps:
            raise MixingConfigError(0, "start interval must not wrap")
        n = self.multipliers
        if n and n[0] * self.delta <= 2:
            raise MixingConfigError(1, f"n_1={n[0]} must exceed 2/delta={2 / self.delta}")
        for k in range(len(n) - 1):
            if n[k + 1] * self.eps <= 2 * n[k]:
                raise MixingConfigError(
                    k + 2,
                    f"n_{k + 2}={n[k + 1]} must exceed (2/eps) n_{k + 1}={2 * n[k] / self.eps}",
                )
        for k, t in enumerate(self.targets, start=1):
            if t.wraps:
                raise MixingConfigError(k, "target intervals must not wrap")
            if t.length < self.eps:
                raise MixingConfigError(k, f"target {k} shorter than eps={self.eps}")


@dataclass(frozen=True)
class MixingChain:
    """Nested intervals I_0 (the start) down to I_K, and alpha = midpoint of I_K."""

    config: MixingConfig
    intervals: tuple[TorusInterval, ...]
    alpha: Fraction


def mixing_chain(config: MixingConfig) -> MixingChain:
    """Build the nested chain: I_k has exact length eps/n_k, sits inside
    I_{k-1}, and maps into target k under multiplication by n_k.

    The returned alpha (midpoint of the last interval) therefore satisfies
    alpha in start and n_k * alpha mod 1 in target_k for every k; all
    containments are re-verified through mul_mod1 before returning.
    """
    config.validate()
    eps = config.eps
    chain = [config.start]
    current = config.start
    for k, (n_k, target) in enumerate(zip(config.multipliers, config.targets), start=1):
        # Trim the target to its leading sub-interval of length exactly eps.
        a = target.left
        trimmed = TorusInterval(a, a + eps)
        lo, hi = current.left, current.right
        # A full closed cell [j/n, (j+1)/n] fits strictly inside (lo, hi)
        # because hi - lo > 2/n_k; take the smallest such j.
        j = (lo * n_k).numerator // (lo * n_k).denominator + 1
        if not (lo < Fraction(j, n_k) and Fraction(j + 1, n_k) < hi):
            raise MixingConfigError(k, "internal: no full preimage cell fits")
        nxt = TorusInterval(
            Fraction(a + j, n_k),
            Fraction(a + eps + j, n_k),
        )
        chain.append(nxt)
        current = nxt
    alpha = current.midpoint()
    _verify_chain(config, chain, alpha)
    return MixingChain(config=config, intervals=tuple(chain), alpha=alpha)


def _verify_chain(
    config: MixingConfig, chain: Sequence[TorusInterval], alpha: Fraction
) -> None:
    eps = config.eps
    if not config.start.contains(alpha):
        raise AssertionError("alpha escaped the start interval")
    for k, (n_k, target) in enumerate(zip(config.multipliers, config.targets), start=1):
        got = chain[k]
        if got.length != eps / n_k:
            raise AssertionError(f"interval {k} has wrong length")
        if not interval_contains_interval(chain[k - 1], got):
            raise AssertionError(f"interval {k} not nested in its predecessor")
        value = mul_mod1(n_k, alpha)
        if not target.contains(value):
            raise AssertionError(f"containment {k} fails: {value} outside target")
        # The whole interval must map into the target, not just alpha.
        if not _interval_maps_into(n_k, got, target):
            raise AssertionError(f"interval {k} is not inside the preimage of target {k}")


def _interval_maps_into(n: int, interval: TorusInterval, target: TorusInterval) -> bool:
    """True iff multiplication by n carries the whole open interval into the
    open target; works for arbitrarily large n (no preimage enumeration)."""
    lo, hi = interval.lifted()
    scaled_lo, scaled_hi = n * lo, n * hi
    j = scaled_lo.numerator // scaled_lo.denominator
    ta, tb = target.lifted()
    return scaled_lo - j >= ta and scaled_hi - j <= tb


@dataclass(frozen=True)
class WitnessPlan:
    """Constants of the hit-frequency construction.

    quality = 1/(4u) for a positive integer u; c is the subsampling stride;
    repeats (k*) counts the forced hit positions c*repeats .. 2c*repeats.
    The defining inequalities are checked exactly in rational arithmetic:
        q^(u-2) > 2            (the quality constant is small enough)
        q^c > 2/eps            (stride large enough for mixing)
        q^c * eps^u < 1        (stride below the upper end; equivalently
                                1/(2c) > 2*quality / log_q(1/eps))
    """

    ratio: Fraction  # q, the growth-ratio lower bound
    u: int
    c: int
    repeats: int

    @property
    def quality(self) -> Fraction:
        return Fraction(1, 4 * self.u)

    def validate(self, eps: Fraction) -> None:
        q, u, c = self.ratio, self.u, self.c
        if q <= 1:
            raise ValueError("ratio must exceed 1")
        if u < 1 or c < 1 or self.repeats < 1:
            raise ValueError("u, c and repeats must be positive")
        if not q ** (u - 2) > 2:
            raise ValueError(f"quality constant too large: q^(u-2) = {q ** (u - 2)} <= 2")
        if not q**c > 2 / eps:
            raise ValueError(f"stride too small: q^c = {q ** c} <= 2/eps")
        if not q**c * eps**u < 1:
            raise ValueError(f"stride too large: q^c * eps^u = {q ** c * eps ** u} >= 1")


def auto_plan(
    ratio: Fraction, eps: Fraction, multipliers_len: int | None = None
) -> WitnessPlan:
    """Smallest-constant plan: minimal u with q^(u-2) > 2, then minimal c
    with q^c > 2/eps (always below the upper end, whose distance exceeds one)."""
    ratio = Fraction(ratio)
    eps = Fraction(eps)
    if ratio <= 1:
        raise ValueError("ratio must exceed 1")
    if not 0 < eps < 1 / ratio:
        raise ValueError("eps must lie in (0, 1/ratio)")
    u = 1
    while not ratio ** (u - 2) > 2:
        u += 1
    c = 1
    while not ratio**c > 2 / eps:
        c += 1
    plan = WitnessPlan(ratio=ratio, u=u, c=c, repeats=1)
    plan.validate(eps)
    return plan


@dataclass(frozen=True)
class HitFrequencyWitness:
    alpha: Fraction
    plan: WitnessPlan
    interval: TorusInterval
    forced_positions: tuple[int, ...]
    horizon: int  # N = 2 * repeats * c
    hit_count: int
    frequency: Fraction
    threshold: Fraction  # 1/(2c)
    chain: MixingChain


def hit_frequency_witness(
    multipliers: Sequence[int],
    interval: TorusInterval,
    ratio: Fraction,
    plan: WitnessPlan | None = None,
    start: TorusInterval = _DEFAULT_START,
) -> HitFrequencyWitness:
    """Point alpha whose orbit n_j * alpha hits the given short interval at
    every position j = c*k*, ..., 2c*k*, so the hit frequency among the first
    N = 2c*k* positions strictly exceeds 1/(2c).

    Requires n_{j+1}/n_j >= ratio for all j and interval length < 1/ratio.
    The subsampled multipliers n_{c*k*}, n_{c*(k*+1)}, ... grow by more than
    q^c > 2/eps per step, so the mixing chain applies to them directly.
    """
    ratio = Fraction(ratio)
    n = [int(v) for v in multipliers]
    eps = interval.length
    if interval.wraps:
        raise ValueError("target interval must not wrap")
    if not eps < 1 / ratio:
        raise ValueError("interval length must be below 1/ratio")
    for j in range(len(n) - 1):
        if not Fraction(n[j + 1], n[j]) >= ratio:
            raise ValueError(f"growth fails at step {j + 1}: {n[j + 1]}/{n[j]} < {ratio}")
    if plan is None:
        plan = auto_plan(ratio, eps)
    else:
        plan.validate(eps)
    c, repeats = plan.c, plan.repeats
    delta = start.length
    # Raise repeats until the first subsampled multiplier clears 2/delta.
    while repeats * c <= len(n) and n[repeats * c - 1] * delta <= 2:
        repeats += 1
    if plan.repeats != repeats:
        plan = WitnessPlan(ratio=ratio, u=plan.u, c=c, repeats=repeats)
    horizon = 2 * repeats * c
    if len(n) < horizon:
        raise ValueError(f"need at least {horizon} multipliers, got {len(n)}")
    positions = tuple(range(repeats * c, horizon + 1, c))
    sub = [n[p - 1] for p in positions]
    config = MixingConfig(
        multipliers=tuple(sub),
        eps=eps,
        delta=delta,
        start=start,
        targets=tuple(interval for _ in sub),
    )
    chain = mixing_chain(config)
    alpha = chain.alpha
    hits = sum(1 for j in range(1, horizon + 1) if interval.contains(mul_mod1(n[j - 1], alpha)))
    freq = Fraction(hits, horizon)
    threshold = Fraction(1, 2 * c)
    if not freq > threshold:
        raise AssertionError("forced frequency failed to clear the threshold")
    return HitFrequencyWitness(
        alpha=alpha,
        plan=plan,
        interval=interval,
        forced_positions=positions,
        horizon=horizon,
        hit_count=hits,
        frequency=freq,
        threshold=threshold,
        chain=chain,
    )


@dataclass(frozen=True)
class HistogramTarget:
    """Desired cell weights e_0..e_{l-1} over the uniform l-cell partition and
    the allowed per-cell deviation eta."""

    weights: tuple[int, ...]
    eta: Fraction

    def __post_init__(self):
        object.__setattr__(self, "weights", tuple(int(w) for w in self.weights))
        object.__setattr__(self, "eta", Fraction(self.eta))
        if not self.weights or any(w < 1 for w in self.weights):
            raise ValueError("weights must be positive integers")
        if self.eta <= 0:
            raise ValueError("eta must be positive")

    @property
    def cells(self) -> int:
        return len(self.weights)

    @property
    def total(self) -> int:
        return sum(self.weights)


@dataclass(frozen=True)
class HistogramWitness:
    alpha: Fraction
    target: HistogramTarget
    base: int  # N0
    horizon: int  # N0^2
    assignment: tuple[int, ...]  # target cell for positions N0+1..N0^2
    counts: tuple[int, ...]
    frequencies: tuple[Fraction, ...]
    deviations: tuple[Fraction, ...]
    chain: MixingChain


def histogram_witness(
    multipliers: Sequence[int],
    target: HistogramTarget,
    base: int,
    start: TorusInterval = _DEFAULT_START,
) -> HistogramWitness:
    """Point alpha whose first base^2 orbit points n_j * alpha reproduce the
    target histogram within eta on the uniform partition into len(weights)
    cells.

    Positions base+1..base^2 are steered into cells via a mixing chain with
    eps = 1/cells; the untouched first `base` positions contribute at most
    base hits to any cell, and the per-cell share of the steered positions is
    off the target share by at most (share) * base/base^2, so the worst-case
    deviation is max(share, 1 - share) / base, which must be below eta
    (checked upfront; this is the sharp form of the crude base > 1/eta
    requirement).  Requires total | base and n_{j+1}/n_j > 2*cells along the
    steered range.
    """
    ell = target.cells
    e_total = target.total
    if base < 2:
        raise ValueError("base must be at least 2")
    if base % e_total != 0:
        raise ValueError(f"weight total {e_total} must divide base {base}")
    if ell > 1:
        worst_share = max(
            max(Fraction(w, e_total), 1 - Fraction(w, e_total)) for w in target.weights
        )
        if not worst_share / base < target.eta:
            raise ValueError(
                f"eta too small: worst-case slack {worst_share}/{base} >= {target.eta}"
            )
    horizon = base * base
    n = [int(v) for v in multipliers]
    if len(n) < horizon:
        raise ValueError(f"need at least {horizon} multipliers, got {len(n)}")
    if ell == 1:
        # One cell holds everything; any point in the start interval works.
        chain = mixing_chain(
            MixingConfig(
                multipliers=(), eps=_HALF, delta=start.length, start=start, targets=()
            )
        )
        return HistogramWitness(
            alpha=chain.alpha,
            target=target,
            base=base,
            horizon=horizon,
            assignment=tuple([0] * (horizon - base)),
            counts=(horizon,),
            frequencies=(_ONE,),
            deviations=(_ZERO,),
            chain=chain,
        )
    # Steered cell counts: exact shares of the base^2 - base steered slots.
    steered = horizon - base
    shares = [w * steered // e_total for w in target.weights]
    if sum(shares) != steered:
        raise ValueError("internal: steered shares do not sum up")
    assignment: list[int] = []
    for i, cnt in enumerate(shares):
        assignment.extend([i] * cnt)
    eps = Fraction(1, ell)
    targets = tuple(
        TorusInterval(Fraction(i, ell), Fraction(i + 1, ell)) for i in assignment
    )
    config = MixingConfig(
        multipliers=tuple(n[base : horizon]),
        eps=eps,
        delta=start.length,
        start=start,
        targets=targets,
    )
    chain = mixing_chain(config)
    alpha = chain.alpha
    counts = [0] * ell
    for j in range(1, horizon + 1):
        v = mul_mod1(n[j - 1], alpha)
        counts[min(int(v * ell), ell - 1)] += 1
    freqs = tuple(Fraction(cnt, horizon) for cnt in counts)
    devs = tuple(
        freqs[i] - Fraction(target.weights[i], e_total) for i in range(ell)
    )
    if not all(abs(d) < target.eta for d in devs):
        raise AssertionError("histogram deviations exceed eta")
    return HistogramWitness(
        alpha=alpha,
        target=target,
        base=base,
        horizon=horizon,
        assignment=tuple(assignment),
        counts=tuple(counts),
        frequencies=freqs,
        deviations=devs,
        chain=chain,
    )


@dataclass(frozen=True)
class AvoidanceResult:
    alpha: Fraction
    eps: Fraction
    indices: tuple[int, ...]
    gaps: tuple[int, ...]
    prefix_length: int
    hits_after_prefix: int


def avoidance_sequence(
    alpha: Fraction,
    eps: Fraction,
    prefix: Sequence[int] = (1,),
    horizon: int = 10_000,
) -> AvoidanceResult:
    """Gap-{1,2} extension of the prefix whose orbit never enters [0, eps)
    after the prefix.

    Induction: if (n+1)*alpha mod 1 lands in [0, eps), then (n+2)*alpha lands
    in [alpha, alpha+eps), which is disjoint from [0, eps) by precondition,
    so gaps of 1 or 2 always suffice.  The avoided set includes 0 itself
    (slightly more than the open interval), which also keeps the orbit off
    the endpoint and is what forces the star discrepancy up to about eps.
    Both the gap structure and the zero-hit claim are re-verified exactly.
    """
    alpha = mod1(Fraction(alpha))
    eps = Fraction(eps)
    if not 0 < eps < 1:
        raise ValueError("eps must lie in (0, 1)")
    # Disjointness of [0, eps) and [alpha, alpha+eps) mod 1, exact.
    if not (alpha >= eps and alpha + eps <= 1):
        raise ValueError(
            f"[0, {eps}) and [{alpha}, {alpha + eps}) overlap mod 1; pick a smaller eps"
        )
    idx = [int(v) for v in prefix]
    if not idx:
        raise ValueError("prefix must contain at least one index")
    if idx[0] < 1 or any(b - a not in (1, 2) for a, b in zip(idx, idx[1:])):
        raise ValueError("prefix gaps must lie in {1, 2}")
    if len(idx) > horizon:
        raise ValueError("prefix longer than the requested horizon")

    def avoided(v: Fraction) -> bool:
        return v < eps  # [0, eps)

    prefix_length = len(idx)
    value = mod1(idx[-1] * alpha)
    while len(idx) < horizon:
        n = idx[-1]
        step1 = mod1(value + alpha)
        if not avoided(step1):
            idx.append(n + 1)
            value = step1
        else:
            step2 = mod1(step1 + alpha)
            if avoided(step2):
                raise AssertionError("disjointness failed along the run")
            idx.append(n + 2)
            value = step2
    # Independent verification of the construction's claims.
    hits = sum(1 for n in idx[prefix_length:] if mod1(n * alpha) < eps)
    if hits:
        raise AssertionError("avoidance failed: orbit entered the interval")
    gaps = tuple(b - a for a, b in zip(idx, idx[1:]))
    return AvoidanceResult(
        alpha=alpha,
        eps=eps,
        indices=tuple(idx),
        gaps=gaps,
        prefix_length=prefix_length,
        hits_after_prefix=hits,
    )


def zero_block_alpha(
    base: Fraction,
    block_starts: Sequence[int],
) -> BinaryPoint:
    """Binary point equal to `base` except that digits j..j^2 are forced to 0
    for each block start j; the result must stay strictly inside (1/2, 3/4).

    The digit string runs to the square of the last block start, and the
    returned point is the exact dyadic rational it denotes.  Block starts
    must leave the two leading digits (1, 0) untouched, and zeroing must not
    push the value onto or below 1/2.
    """
    base = Fraction(base)
    if not Fraction(1, 2) < base < Fraction(3, 4):
        raise ValueError("base must lie strictly inside (1/2, 3/4)")
    starts = sorted(int(j) for j in block_starts)
    if not starts:
        raise ValueError("need at least one block start")
    if starts[0] < 3:
        raise ValueError("blocks must not overlap the two leading digits")
    length = starts[-1] ** 2
    digits = list(binary_digits(base, length))
    for j in starts:
        for pos in range(j, j * j + 1):
            digits[pos - 1] = 0
    point = BinaryPoint(tuple(digits), exact=True)
    if not Fraction(1, 2) < point.value < Fraction(3, 4):
        raise ValueError("zeroing the blocks pushed the value out of (1/2, 3/4)")
    return point
