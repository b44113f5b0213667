from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from maldist.empirical import CellPartition, MeasureVector
from maldist.envelope import (
    BlockSpec,
    EnvelopeFunction,
    F_pi_eval,
    RatioMeasure,
    check_admissible,
    counting_oracle,
    envelope_dominates,
    pi_measure,
)
from maldist.exact import mod1
from maldist.rng import SplitMix64
from tests.conftest import GOLDEN


def random_ratio_measure(rng: SplitMix64) -> RatioMeasure:
    atoms = rng.randint(1, 8)
    pairs = []
    for _ in range(atoms):
        loc = rng.fraction(50, closed_top=True)
        weight = rng.randint(1, 20)
        pairs.append((loc, weight))
    total = sum(w for _, w in pairs)
    return RatioMeasure.from_pairs((loc, F(w, total)) for loc, w in pairs)


# --- block specs -----------------------------------------------------------


def test_block_spec_rejects_m_above_b():
    with pytest.raises(ValueError):
        BlockSpec([2, 3], [1, 4])
    # Function-backed specs fail as soon as the bad block materializes.
    lazy = BlockSpec(lambda j: 2, lambda j: j)
    with pytest.raises(ValueError):
        lazy.M(3)


def test_block_spec_lazy_function_backed():
    spec = BlockSpec(lambda j: j, lambda j: 1)
    assert spec.a(4) == 10
    assert spec.M(4) == 4
    assert spec.q(3) == F(1, 3)
    assert list(spec.block_range(3)) == [4, 5, 6]
    assert spec.block_of(6) == 3


def test_admissible_linear():
    rep = check_admissible(BlockSpec(lambda j: j, lambda j: 1), 200)
    assert rep.admissible_trend


def test_admissible_flags_bounded_lengths():
    rep = check_admissible(BlockSpec(lambda j: 2, lambda j: 1), 200)
    assert rep.b_bounded_flag
    assert not rep.admissible_trend


def test_admissible_half_ratio_trend():
    spec = BlockSpec(lambda j: j + 1, lambda j: (j + 2) // 2)
    rep = check_admissible(spec, 10_000)
    assert rep.admissible_trend
    # sampling ratios approach 1/2 from above
    assert abs(spec.q(10_000) - F(1, 2)) < F(1, 10_000)


# --- ratio measures and the envelope --------------------------------------


def test_pi_measure_merges_atoms():
    pi = pi_measure(BlockSpec([2, 2, 4], [1, 2, 2]), 3)
    assert pi.atoms == ((F(1, 2), F(3, 5)), (F(1), F(2, 5)))


def test_pi_measure_full_sequence():
    pi = pi_measure(BlockSpec([3, 5, 7], [3, 5, 7]), 3)
    assert pi.atoms == ((F(1), F(1)),)


def test_pi_measure_two_blocks():
    pi = pi_measure(BlockSpec([10, 10], [1, 9]), 2)
    assert pi.atoms == ((F(1, 10), F(1, 10)), (F(9, 10), F(9, 10)))


def test_pi_measure_rejects_all_zero():
    with pytest.raises(ValueError):
        pi_measure(BlockSpec([2, 2], [0, 0]), 2)


def test_envelope_point_mass_at_one():
    pi = RatioMeasure.point_mass(F(1))
    assert F_pi_eval(pi, F(1, 2)) == F(1, 2)


def test_envelope_point_mass_at_zero():
    pi = RatioMeasure.point_mass(F(0))
    assert F_pi_eval(pi, F(1, 2)) == 1
    assert F_pi_eval(pi, F(0)) == 1  # F(0) = pi({0})


def test_envelope_mixture():
    pi = RatioMeasure.from_pairs([(F(1, 2), F(1, 2)), (F(1), F(1, 2))])
    assert F_pi_eval(pi, F(1, 4)) == F(3, 8)


def test_envelope_closed_form_point_masses():
    grid = [F(i, 100) for i in range(101)]
    for q in (F(1, 10), F(1, 2), F(1)):
        pi = RatioMeasure.point_mass(q)
        for t in grid:
            assert F_pi_eval(pi, t) == min(t / q, F(1))


def test_atom_merge_preserves_envelope():
    split = RatioMeasure.from_pairs(
        [(F(1, 3), F(1, 4)), (F(1, 3), F(1, 4)), (F(2, 3), F(1, 2))]
    )
    merged = RatioMeasure.from_pairs([(F(1, 3), F(1, 2)), (F(2, 3), F(1, 2))])
    assert split == merged
    for t in (F(0), F(1, 5), F(1, 3), F(1, 2), F(1)):
        assert F_pi_eval(split, t) == F_pi_eval(merged, t)


@settings(max_examples=50, deadline=None)
@given(seed=st.integers(min_value=0, max_value=2**32))
def test_envelope_properties_random(seed):
    pi = random_ratio_measure(SplitMix64(seed))
    env = EnvelopeFunction(pi)
    grid = [F(i, 20) for i in range(21)]
    values = [env(t) for t in grid]
    assert values[0] == pi.mass_at_zero()
    assert values[-1] == 1
    for t, v in zip(grid, values):
        assert t <= v <= 1
    for a, b in zip(values, values[1:]):
        assert a <= b
    for i in range(1, len(grid) - 1):
        assert 2 * values[i] >= values[i - 1] + values[i + 1]


def test_envelope_uniform_convergence_bound():
    # Perturb pi toward a point mass with vanishing weight; the sup-distance
    # of the envelopes on a fine grid is controlled by the atom-wise
    # total-variation norm and shrinks monotonically.
    base = RatioMeasure.from_pairs([(F(1, 4), F(1, 2)), (F(3, 4), F(1, 2))])
    spike = F(9, 10)
    grid = [F(i, 1000) for i in range(1001)]
    base_vals = [F_pi_eval(base, t) for t in grid]
    last = None
    for n in range(2, 12):
        mixed = RatioMeasure.from_pairs(
            [(q, w * (1 - F(1, n))) for q, w in base.atoms] + [(spike, F(1, n))]
        )
        dev = max(abs(F_pi_eval(mixed, t) - v) for t, v in zip(grid, base_vals))
        tv = mixed.tv_norm_distance(base)
        min_loc = min(q for q, _ in mixed.atoms if q > 0)
        assert dev <= tv * max(F(1), 1 / min_loc)
        if last is not None:
            assert dev <= last
        last = dev


# --- domination ------------------------------------------------------------


HALVES = CellPartition.uniform(2)
UNIFORM2 = MeasureVector((F(1, 2), F(1, 2)))


def test_dominates_identity_envelope():
    res = envelope_dominates(UNIFORM2, UNIFORM2, RatioMeasure.point_mass(F(1)), HALVES)
    assert res.ok


def test_dominates_reports_first_violation():
    res = envelope_dominates(
        MeasureVector((F(3, 5), F(2, 5))), UNIFORM2, RatioMeasure.point_mass(F(1)), HALVES
    )
    assert not res.ok
    assert res.violation == (0,)
    assert res.union_mass == F(3, 5)
    assert res.bound == F(1, 2)


def test_dominates_half_ratio_allows_full_concentration():
    res = envelope_dominates(
        MeasureVector((F(1), F(0))), UNIFORM2, RatioMeasure.point_mass(F(1, 2)), HALVES
    )
    assert res.ok


def test_dominates_mismatched_sizes():
    with pytest.raises(ValueError):
        envelope_dominates(UNIFORM2, MeasureVector((F(1),)), RatioMeasure.point_mass(F(1)))


def test_union_check_strictly_stronger_than_cellwise():
    # Strictly concave envelope: each cell passes, the two-cell union fails.
    pi = RatioMeasure.from_pairs([(F(1, 4), F(1, 2)), (F(1), F(1, 2))])
    partition = CellPartition((F(0), F(1, 4), F(1, 2), F(1)))
    lam = partition.lebesgue_masses()
    mu = MeasureVector((F(5, 8), F(3, 8), F(0)))
    assert envelope_dominates(mu, lam, pi, partition, mode="cellwise").ok
    res = envelope_dominates(mu, lam, pi, partition)
    assert not res.ok
    assert res.violation == (0, 1)


def test_lambda_always_dominated():
    rng = SplitMix64(12)
    partition = CellPartition.uniform(4)
    lam = partition.lebesgue_masses()
    for _ in range(25):
        pi = random_ratio_measure(rng)
        assert envelope_dominates(lam, lam, pi, partition).ok


def test_parallel_matches_sequential():
    pi = RatioMeasure.from_pairs([(F(1, 4), F(1, 2)), (F(1), F(1, 2))])
    partition = CellPartition((F(0), F(1, 4), F(1, 2), F(1)))
    lam = partition.lebesgue_masses()
    mu = MeasureVector((F(5, 8), F(3, 8), F(0)))
    seq = envelope_dominates(mu, lam, pi, partition)
    par = envelope_dominates(mu, lam, pi, partition, workers=2)
    assert (seq.ok, seq.violation) == (par.ok, par.violation)


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(min_value=0, max_value=2**32))
def test_cellwise_prefilter_never_stricter(seed):
    # cellwise is a necessary condition: any cellwise failure must also fail
    # exhaustively, and an exhaustive pass implies a cellwise pass.
    rng = SplitMix64(seed)
    pi = random_ratio_measure(rng)
    partition = CellPartition.uniform(4)
    lam = partition.lebesgue_masses()
    weights = [rng.randint(0, 8) for _ in range(4)]
    if sum(weights) == 0:
        weights[0] = 1
    mu = MeasureVector(tuple(F(w, sum(weights)) for w in weights))
    cellwise = envelope_dominates(mu, lam, pi, partition, mode="cellwise")
    exhaustive = envelope_dominates(mu, lam, pi, partition)
    if not cellwise.ok:
        assert not exhaustive.ok
    if exhaustive.ok:
        assert cellwise.ok


def test_randomized_fallback_above_cap():
    partition = CellPartition.uniform(30)
    lam = partition.lebesgue_masses()
    res = envelope_dominates(lam, lam, RatioMeasure.point_mass(F(1)), partition, sample_count=200)
    assert res.ok
    assert not res.exhaustive


# --- counting oracle -------------------------------------------------------


def rotation(n: int) -> F:
    return mod1(n * GOLDEN)


def test_counting_oracle_full_sequence():
    spec = BlockSpec(lambda j: 10, lambda j: 10)
    partition = CellPartition.uniform(2)
    lam = partition.lebesgue_masses()
    indices = list(range(1, spec.a(12) + 1))
    report = counting_oracle(
        rotation, indices, spec, partition, lam,
        cells=[0], t0=F(1, 2), checkpoints=[4, 8, 12], eps=F(1, 10),
    )
    assert report.ok


def test_counting_oracle_half_blocks(golden_points):
    spec = BlockSpec(lambda j: 10, lambda j: 5)
    partition = CellPartition.uniform(2)
    lam = partition.lebesgue_masses()
    rng = SplitMix64(3)
    indices = []
    for j in range(1, 13):
        indices.extend(rng.subset(spec.a(j - 1) + 1, spec.a(j), 5))
    report = counting_oracle(
        rotation, indices, spec, partition, lam,
        cells=[0], t0=F(1, 2), checkpoints=[4, 8, 12], eps=F(1, 10),
    )
    assert report.ok
    # F never exceeds 1, and q = 1/2 <= t0 puts all post-threshold blocks in C2.
    for cp in report.checkpoints:
        assert cp.envelope_value <= 1


def test_counting_oracle_adversarial_choice():
    # Take every in-target index available per block: the frequency pushes
    # toward 1 and the bound F(1/2) = 1 still holds.
    spec = BlockSpec(lambda j: 10, lambda j: 5)
    partition = CellPartition.uniform(2)
    lam = partition.lebesgue_masses()
    indices = []
    for j in range(1, 13):
        block = list(spec.block_range(j))
        hits = [n for n in block if rotation(n) < F(1, 2)]
        rest = [n for n in block if n not in hits]
        indices.extend(sorted((hits + rest)[:5]))
    indices.sort()
    report = counting_oracle(
        rotation, indices, spec, partition, lam,
        cells=[0], t0=F(1, 2), checkpoints=[12], eps=F(1, 10),
    )
    assert report.ok
    cp = report.checkpoints[0]
    assert F(cp.count, cp.chosen_total) > F(4, 5)
    assert cp.envelope_value == 1


@settings(max_examples=25, deadline=None)
@given(seed=st.integers(min_value=0, max_value=2**32))
def test_counting_oracle_bound_holds_for_any_member(seed):
    # The three-way count split certifies the bound for every member choice,
    # however adversarial, because chosen hits per block are capped by both
    # m_j and the full-block count.
    rng = SplitMix64(seed)
    b = [rng.randint(3, 9) for _ in range(10)]
    m = [rng.randint(0, bi) for bi in b]
    if sum(m) == 0:
        m[0] = 1
    spec = BlockSpec(b, m)
    partition = CellPartition.uniform(2)
    lam = partition.lebesgue_masses()
    indices = []
    for j in range(1, 11):
        block = list(spec.block_range(j))
        hits = [n for n in block if rotation(n) < F(1, 2)]
        rest = [n for n in block if n not in hits]
        indices.extend(sorted((hits + rest)[: spec.m(j)]))
    indices.sort()
    report = counting_oracle(
        rotation, indices, spec, partition, lam,
        cells=[0], t0=F(1, 2), checkpoints=[5, 10], eps=F(1, 8),
    )
    assert report.ok
    for cp in report.checkpoints:
        assert cp.count == cp.c1 + cp.c2 + cp.c3


def test_counting_oracle_rejects_short_subsequence():
    spec = BlockSpec(lambda j: 10, lambda j: 5)
    partition = CellPartition.uniform(2)
    lam = partition.lebesgue_masses()
    with pytest.raises(ValueError):
        counting_oracle(
            rotation, [1, 2], spec, partition, lam,
            cells=[0], t0=F(1, 2), checkpoints=[12], eps=F(1, 10),
        )
