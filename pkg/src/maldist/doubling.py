"""Orbits of the doubling map T: x -> 2x mod 1 and the exact finite-horizon
facts about their empirical measures.

Covers digit-shift arithmetic on binary points, exact invariance defects of
orbit segments, the 5/6 density cap for hits of the widened middle interval
along (2^k + 1)-orbits of small points, and the density-1 hitting counts for
points whose binary expansion carries long zero blocks.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .exact import binary_digits, mod1
from .empirical import CellPartition
from .torus import TorusInterval

__all__ = [
    "BinaryPoint",
    "OrbitHitReport",
    "WindowDensity",
    "doubling_orbit",
    "invariance_defect",
    "five_sixth_check",
    "zero_block_density",
    "doubling_period",
]

_ZERO = Fraction(0)
_HALF = Fraction(1, 2)


@dataclass(frozen=True)
class BinaryPoint:
    """Point given by binary digits a_1 a_2 ... a_L (value sum a_j 2^-j).

    `exact` marks the string as the complete expansion of a dyadic rational
    (every digit beyond L is 0), which makes shifts past L well defined; a
    truncated expansion of a longer number must set exact=False, and then
    shifts beyond L are refused rather than guessed.
    """

    digits: tuple[int, ...]
    exact: bool = True

    def __post_init__(self):
        if len(self.digits) < 1:
            raise ValueError("need at least one digit")
        if any(d not in (0, 1) for d in self.digits):
            raise ValueError("digits must be bits")

    @property
    def value(self) -> Fraction:
        num = 0
        for d in self.digits:
            num = (num << 1) | d
        return Fraction(num, 1 << len(self.digits))

    def shift(self, k: int) -> "BinaryPoint":
        """Digits of 2^k * value mod 1 (drop the first k digits)."""
        if k < 0:
            raise ValueError("shift must be nonnegative")
        if k >= len(self.digits):
            if not self.exact:
                raise ValueError(
                    f"shift {k} consumes digits beyond the {len(self.digits)} known"
                )
            return BinaryPoint((0,), exact=True)
        rest = self.digits[k:]
        return BinaryPoint(rest, exact=self.exact)

    @classmethod
    def from_fraction(cls, value: Fraction, length: int) -> "BinaryPoint":
        """First `length` digits of value in [0, 1); exact iff the value is a
        dyadic rational fully captured by that many digits."""
        value = Fraction(value)
        digits = binary_digits(value, length)
        exact = (value * (1 << length)).denominator == 1
        return cls(digits, exact=exact)


def doubling_orbit(alpha: Fraction | BinaryPoint, steps: int) -> list[Fraction]:
    """T^k(alpha) for k = 1..steps, exact.

    Rationals iterate by modular doubling (any horizon); digit strings
    iterate by shifts and, unless exact, must keep steps < their length.
    """
    if steps < 0:
        raise ValueError("steps must be nonnegative")
    if isinstance(alpha, BinaryPoint):
        if not alpha.exact and steps >= len(alpha.digits):
            raise ValueError("digit string too short for the requested orbit")
        return [alpha.shift(k).value for k in range(1, steps + 1)]
    v = mod1(Fraction(alpha))
    out = []
    for _ in range(steps):
        v = mod1(2 * v)
        out.append(v)
    return out


def doubling_period(alpha: Fraction) -> tuple[int, int]:
    """(preperiod, period) of the doubling orbit of a rational point."""
    alpha = mod1(Fraction(alpha))
    den = alpha.denominator
    pre = 0
    while den % 2 == 0:
        den //= 2
        pre += 1
    if den == 1:
        return (pre, 1)
    k, p = 2 % den, 1
    while k != 1:
        k = (2 * k) % den
        p += 1
    return (pre, p)


def invariance_defect(points: list[Fraction], partition: CellPartition) -> Fraction:
    """Max over cells A of |freq(A) - freq(T^{-1}A)| for the segment's
    empirical measure; exactly 0 on full periods of a periodic orbit.

    Membership in T^{-1}A is decided exactly by doubling each point, so the
    defect is exact; the partition must be dyadic (cut points k/2^L), the
    only family under which the comparison is meaningful cell by cell.
    """
    if not points:
        raise ValueError("empty orbit segment")
    if not partition.is_dyadic():
        raise ValueError("partition cut points must be dyadic rationals")
    n = len(points)
    s = partition.size
    counts = [0] * s
    pre_counts = [0] * s
    for p in points:
        counts[partition.cell_index(p)] += 1
        pre_counts[partition.cell_index(mod1(2 * Fraction(p)))] += 1
    return max(abs(Fraction(counts[i] - pre_counts[i], n)) for i in range(s))


@dataclass(frozen=True)
class OrbitHitReport:
    """Exact hit counts of a target arc along an orbit segment."""

    horizon: int
    hits: int
    density: Fraction
    minus_hits: int
    plus_hits: int
    density_bound: Fraction
    bound_ok: bool
    spacing_ok: bool


def five_sixth_check(alpha: Fraction, horizon: int) -> OrbitHitReport:
    """Count k <= horizon with (2^k + 1)*alpha mod 1 in the widened interval
    I' = (1/2 - alpha/3, 3/4 + alpha/3); requires 0 < alpha < 1/16.

    Equivalently 2^k * alpha must land in I' - alpha, whose two halves
    I- = (1/2 - 4a/3, 1/2] and I+ = (1/2, 3/4 - 2a/3) exclude their own
    near-future: a hit of I- blocks the next two k from I-, a hit of I+
    blocks the next k from I+.  That spacing caps the count at
    5/6 * horizon + O(1); the report asserts density <= 5/6 + 3/horizon and
    verifies the spacing patterns k,k+1 / k,k+2 in I- and k,k+1 in I+
    exactly along the orbit.
    """
    alpha = Fraction(alpha)
    if not 0 < alpha < Fraction(1, 16):
        raise ValueError("alpha must lie in (0, 1/16)")
    if horizon < 1:
        raise ValueError("horizon must be positive")
    left = _HALF - 4 * alpha / 3
    mid = _HALF
    right = Fraction(3, 4) - 2 * alpha / 3
    wide = TorusInterval(_HALF - alpha / 3, Fraction(3, 4) + alpha / 3)
    minus_flags = []
    plus_flags = []
    hits = 0
    v = alpha
    for k in range(1, horizon + 1):
        v = mod1(2 * v)  # v = 2^k alpha
        shifted = mod1(v + alpha)  # (2^k + 1) alpha
        in_minus = left < v <= mid
        in_plus = mid < v < right
        if wide.contains(shifted) != (in_minus or in_plus):
            raise AssertionError("shifted-orbit identity failed")  # unreachable
        minus_flags.append(in_minus)
        plus_flags.append(in_plus)
        if in_minus or in_plus:
            hits += 1
    spacing_ok = True
    for k in range(horizon):
        if minus_flags[k]:
            if k + 1 < horizon and minus_flags[k + 1]:
                spacing_ok = False
            if k + 2 < horizon and minus_flags[k + 2]:
                spacing_ok = False
        if plus_flags[k] and k + 1 < horizon and plus_flags[k + 1]:
            spacing_ok = False
    density = Fraction(hits, horizon)
    bound = Fraction(5, 6) + Fraction(3, horizon)
    return OrbitHitReport(
        horizon=horizon,
        hits=hits,
        density=density,
        minus_hits=sum(minus_flags),
        plus_hits=sum(plus_flags),
        density_bound=bound,
        bound_ok=density <= bound,
        spacing_ok=spacing_ok,
    )


@dataclass(frozen=True)
class WindowDensity:
    window_end: int
    hits: int
    density: Fraction


def zero_block_density(
    point: BinaryPoint,
    windows: list[int],
    target: TorusInterval | None = None,
) -> list[WindowDensity]:
    """Per-window hit densities of (2^k + 1)*point mod 1 in the target arc
    (default (1/2, 3/4)) for k = 1..N, N running over the window ends.

    Inside a zero block of the expansion the shifted point vanishes, so the
    sum collapses to the point itself, which lies in the target; the window
    densities therefore approach 1 as the blocks lengthen.  Digit shifts are
    exact (the point is a dyadic rational); windows must be increasing.
    """
    if target is None:
        target = TorusInterval(_HALF, Fraction(3, 4))
    if not windows or any(a >= b for a, b in zip(windows, windows[1:])):
        raise ValueError("window ends must be strictly increasing and nonempty")
    if windows[0] < 1:
        raise ValueError("window ends must be positive")
    if not point.exact and windows[-1] >= len(point.digits):
        raise ValueError("windows reach beyond the known digits")
    alpha = point.value
    if not target.contains(alpha):
        raise ValueError("the point itself must lie in the target arc")
    out = []
    hits = 0
    k = 0
    for end in windows:
        while k < end:
            k += 1
            shifted = mod1(point.shift(k).value + alpha)
            if target.contains(shifted):
                hits += 1
        out.append(WindowDensity(window_end=end, hits=hits, density=Fraction(hits, end)))
    return out
