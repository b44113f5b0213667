"""Self-contained certificates for every construction, and their independent
re-verification.

A certificate echoes its inputs exactly (rationals as "p/q" strings, integer
sequences verbatim) and lists claims with the exact values the construction
computed.  `verify_certificate` recomputes every claim from the echoed inputs
alone, through the primitive operations (modular arithmetic, interval
membership, direct counting) rather than the construction code, and reports
the first-principles verdicts; any value or verdict mismatch names the
failing claim.  Certificates therefore stay checkable long after the run that
produced them.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .doubling import BinaryPoint, OrbitHitReport, WindowDensity, invariance_defect
from .empirical import CellPartition, MeasureVector, star_discrepancy
from .envelope import DominationResult, RatioMeasure, envelope_dominates
from .exact import binary_digits, format_rational, mod1, parse_rational
from .torus import TorusInterval, interval_contains_interval, mul_mod1
from .witness import (
    AvoidanceResult,
    HistogramWitness,
    HitFrequencyWitness,
    MixingChain,
)

__all__ = [
    "FORMAT",
    "VerificationResult",
    "certificate_ok",
    "verify_certificate",
    "mixing_certificate",
    "hitfreq_certificate",
    "histogram_certificate",
    "avoidance_certificate",
    "zeroblock_certificate",
    "fivesixth_certificate",
    "invariance_certificate",
    "envelope_certificate",
]

FORMAT = "maldist-certificate/1"

_fr = format_rational


@dataclass(frozen=True)
class VerificationResult:
    ok: bool
    failures: tuple[str, ...]

    def first_failure(self) -> str | None:
        return self.failures[0] if self.failures else None


def certificate_ok(cert: dict) -> bool:
    """True iff every claim in the certificate carries verdict true."""
    return all(bool(c.get("verdict")) for c in cert.get("claims", []))


# ---------------------------------------------------------------------------
# builders


def _base(kind: str, inputs: dict, claims: list[dict], margins: dict | None = None) -> dict:
    cert = {"format": FORMAT, "kind": kind, "inputs": inputs, "claims": claims}
    if margins:
        cert["margins"] = margins
    return cert


def mixing_certificate(chain: MixingChain) -> dict:
    cfg = chain.config
    inputs = {
        "multipliers": list(cfg.multipliers),
        "eps": _fr(cfg.eps),
        "delta": _fr(cfg.delta),
        "start": cfg.start.to_json(),
        "targets": [t.to_json() for t in cfg.targets],
        "intervals": [iv.to_json() for iv in chain.intervals],
    }
    alpha = chain.alpha
    claims = [
        {
            "id": "alpha-in-start",
            "kind": "point-in-interval",
            "multiplier": 1,
            "alpha": _fr(alpha),
            "interval": cfg.start.to_json(),
            "value": _fr(alpha),
            "verdict": cfg.start.contains(alpha),
        }
    ]
    for k, (n_k, target) in enumerate(zip(cfg.multipliers, cfg.targets), start=1):
        value = mul_mod1(n_k, alpha)
        claims.append(
            {
                "id": f"containment-{k}",
                "kind": "point-in-interval",
                "multiplier": n_k,
                "alpha": _fr(alpha),
                "interval": target.to_json(),
                "value": _fr(value),
                "verdict": target.contains(value),
            }
        )
        claims.append(
            {
                "id": f"length-{k}",
                "kind": "interval-length",
                "interval": chain.intervals[k].to_json(),
                "length": _fr(cfg.eps / n_k),
                "verdict": chain.intervals[k].length == cfg.eps / n_k,
            }
        )
        claims.append(
            {
                "id": f"nesting-{k}",
                "kind": "interval-nested",
                "outer": chain.intervals[k - 1].to_json(),
                "inner": chain.intervals[k].to_json(),
                "verdict": interval_contains_interval(
                    chain.intervals[k - 1], chain.intervals[k]
                ),
            }
        )
    margins = {}
    if chain.intervals:
        last = chain.intervals[-1]
        margins["witness_interval_radius"] = _fr(last.length / 2)
    return _base("mixing", {"alpha": _fr(alpha), **inputs}, claims, margins)


def hitfreq_certificate(witness: HitFrequencyWitness, multipliers: Sequence[int]) -> dict:
    plan = witness.plan
    horizon = witness.horizon
    inputs = {
        "alpha": _fr(witness.alpha),
        "multipliers": [int(v) for v in multipliers[:horizon]],
        "interval": witness.interval.to_json(),
        "ratio": _fr(plan.ratio),
        "plan": {"u": plan.u, "c": plan.c, "repeats": plan.repeats},
        "forced_positions": list(witness.forced_positions),
    }
    eps = witness.interval.length
    q, u, c = plan.ratio, plan.u, plan.c
    claims = []
    for p in witness.forced_positions:
        n_p = int(multipliers[p - 1])
        value = mul_mod1(n_p, witness.alpha)
        claims.append(
            {
                "id": f"containment-{p}",
                "kind": "point-in-interval",
                "multiplier": n_p,
                "alpha": _fr(witness.alpha),
                "interval": witness.interval.to_json(),
                "value": _fr(value),
                "verdict": witness.interval.contains(value),
            }
        )
    claims.append(
        {
            "id": "hit-frequency",
            "kind": "hit-count-frequency",
            "count": witness.hit_count,
            "horizon": horizon,
            "threshold": _fr(witness.threshold),
            "verdict": witness.frequency > witness.threshold,
        }
    )
    claims.append(
        {
            "id": "plan-quality",
            "kind": "rational-power-gt",
            "statement": "ratio^(u-2) > 2",
            "lhs": _fr(q ** (u - 2)),
            "rhs": "2/1",
            "verdict": q ** (u - 2) > 2,
        }
    )
    claims.append(
        {
            "id": "plan-stride-low",
            "kind": "rational-power-gt",
            "statement": "ratio^c > 2/eps",
            "lhs": _fr(q**c),
            "rhs": _fr(2 / eps),
            "verdict": q**c > 2 / eps,
        }
    )
    # Exact form of: 1/(2c) exceeds 2*quality / log_ratio(1/eps).
    claims.append(
        {
            "id": "threshold-vs-quality",
            "kind": "rational-power-lt",
            "statement": "ratio^c * eps^u < 1",
            "lhs": _fr(q**c * eps**u),
            "rhs": "1/1",
            "verdict": q**c * eps**u < 1,
        }
    )
    margins = {
        "frequency": _fr(witness.frequency),
        "frequency_margin": _fr(witness.frequency - witness.threshold),
    }
    return _base("hitfreq", inputs, claims, margins)


def histogram_certificate(witness: HistogramWitness, multipliers: Sequence[int]) -> dict:
    t = witness.target
    inputs = {
        "alpha": _fr(witness.alpha),
        "multipliers": [int(v) for v in multipliers[: witness.horizon]],
        "weights": list(t.weights),
        "eta": _fr(t.eta),
        "base": witness.base,
    }
    claims = []
    for i, (count, dev) in enumerate(zip(witness.counts, witness.deviations)):
        claims.append(
            {
                "id": f"cell-{i}",
                "kind": "cell-frequency-within",
                "cell": i,
                "count": count,
                "horizon": witness.horizon,
                "target": _fr(Fraction(t.weights[i], t.total)),
                "eta": _fr(t.eta),
                "verdict": abs(dev) < t.eta,
            }
        )
    margins = {"max_cell_deviation": _fr(max(abs(d) for d in witness.deviations))}
    return _base("histogram", inputs, claims, margins)


def avoidance_certificate(result: AvoidanceResult, discrepancy_floor: Fraction | None = None) -> dict:
    inputs = {
        "alpha": _fr(result.alpha),
        "eps": _fr(result.eps),
        "prefix": list(result.indices[: result.prefix_length]),
        "gaps": "".join(str(g) for g in result.gaps[result.prefix_length - 1 :]),
        "horizon": len(result.indices),
    }
    claims = [
        {
            "id": "gap-structure",
            "kind": "gaps-in-one-two",
            "verdict": all(g in (1, 2) for g in result.gaps),
        },
        {
            "id": "zero-hits",
            "kind": "orbit-avoids-interval",
            "hits": result.hits_after_prefix,
            "verdict": result.hits_after_prefix == 0,
        },
    ]
    margins = {}
    if discrepancy_floor is not None:
        points = [mod1(n * result.alpha) for n in result.indices]
        disc = star_discrepancy(points)
        claims.append(
            {
                "id": "star-discrepancy-floor",
                "kind": "star-discrepancy-at-least",
                "value": _fr(disc),
                "floor": _fr(discrepancy_floor),
                "verdict": disc >= discrepancy_floor,
            }
        )
        margins["star_discrepancy"] = _fr(disc)
    return _base("avoid", inputs, claims, margins)


def zeroblock_certificate(
    point: BinaryPoint,
    base: Fraction,
    starts: Sequence[int],
    windows: Sequence[WindowDensity] = (),
) -> dict:
    inputs = {
        "base": _fr(Fraction(base)),
        "block_starts": [int(j) for j in starts],
        "digits": "".join(str(d) for d in point.digits),
    }
    half, three_q = Fraction(1, 2), Fraction(3, 4)
    zeroed_ok = all(
        all(point.digits[pos - 1] == 0 for pos in range(j, j * j + 1))
        for j in starts
    )
    claims = [
        {
            "id": "value-in-band",
            "kind": "point-in-interval",
            "multiplier": 1,
            "alpha": _fr(point.value),
            "interval": TorusInterval(half, three_q).to_json(),
            "value": _fr(point.value),
            "verdict": half < point.value < three_q,
        },
        {
            "id": "blocks-zeroed",
            "kind": "digit-blocks-zero",
            "verdict": zeroed_ok,
        },
    ]
    for w in windows:
        claims.append(
            {
                "id": f"window-{w.window_end}",
                "kind": "window-density",
                "end": w.window_end,
                "hits": w.hits,
                "density": _fr(w.density),
                "verdict": True,
            }
        )
    return _base("zeroblock", inputs, claims)


def fivesixth_certificate(report: OrbitHitReport, alpha: Fraction) -> dict:
    inputs = {"alpha": _fr(Fraction(alpha)), "horizon": report.horizon}
    claims = [
        {
            "id": "hit-count",
            "kind": "widened-interval-hits",
            "hits": report.hits,
            "minus_hits": report.minus_hits,
            "plus_hits": report.plus_hits,
            "verdict": True,
        },
        {
            "id": "density-bound",
            "kind": "density-at-most",
            "density": _fr(report.density),
            "bound": _fr(report.density_bound),
            "verdict": report.bound_ok,
        },
        {
            "id": "spacing",
            "kind": "hit-spacing",
            "verdict": report.spacing_ok,
        },
    ]
    margins = {"density_margin": _fr(report.density_bound - report.density)}
    return _base("fivesixth", inputs, claims, margins)


def invariance_certificate(
    alpha: Fraction, steps: int, partition: CellPartition, defect: Fraction
) -> dict:
    inputs = {
        "alpha": _fr(Fraction(alpha)),
        "steps": steps,
        "cuts": [_fr(t) for t in partition.cuts],
    }
    claims = [
        {
            "id": "invariance-defect",
            "kind": "invariance-defect-equals",
            "defect": _fr(defect),
            "verdict": True,
        },
        {
            "id": "defect-bound",
            "kind": "defect-at-most",
            "defect": _fr(defect),
            "bound": _fr(Fraction(2, steps)),
            "verdict": defect <= Fraction(2, steps),
        },
    ]
    return _base("invariance", inputs, claims)


def envelope_certificate(
    mu: MeasureVector,
    lam: MeasureVector,
    pi: RatioMeasure,
    result: DominationResult,
    tol: Fraction = Fraction(0),
) -> dict:
    inputs = {
        "mu": [_fr(m) for m in mu.masses],
        "lambda": [_fr(m) for m in lam.masses],
        "pi": pi.to_json(),
        "tol": _fr(tol),
    }
    claim = {
        "id": "domination",
        "kind": "envelope-domination",
        "verdict": result.ok,
    }
    if not result.ok:
        claim["violation"] = list(result.violation)
        claim["union_mass"] = _fr(result.union_mass)
        claim["bound"] = _fr(result.bound)
    return _base("envelope", inputs, claims=[claim])


# ---------------------------------------------------------------------------
# verification


def verify_certificate(cert: dict) -> VerificationResult:
    """Recompute every claim from the echoed inputs; report all mismatches."""
    try:
        kind = cert["kind"]
        if cert.get("format") != FORMAT:
            return VerificationResult(False, (f"unknown certificate format {cert.get('format')!r}",))
        checker = _CHECKERS[kind]
    except KeyError as exc:
        return VerificationResult(False, (f"unknown certificate kind: {exc}",))
    try:
        failures = tuple(checker(cert))
    except Exception as exc:  # malformed inputs are verification failures
        return VerificationResult(False, (f"verification error: {exc}",))
    return VerificationResult(not failures, failures)


def _check_point_claim(claim: dict):
    alpha = parse_rational(claim["alpha"])
    n = int(claim["multiplier"])
    interval = TorusInterval.from_json(claim["interval"])
    value = mul_mod1(n, alpha)
    if _fr(value) != claim["value"]:
        yield f"{claim['id']}: recomputed value {_fr(value)} != stated {claim['value']}"
    verdict = interval.contains(value)
    if verdict != bool(claim["verdict"]):
        yield f"{claim['id']}: recomputed verdict {verdict} != stated {claim['verdict']}"


def _verify_mixing(cert: dict):
    inp = cert["inputs"]
    alpha = parse_rational(inp["alpha"])
    eps = parse_rational(inp["eps"])
    multipliers = [int(v) for v in inp["multipliers"]]
    targets = [TorusInterval.from_json(t) for t in inp["targets"]]
    intervals = [TorusInterval.from_json(t) for t in inp["intervals"]]
    start = TorusInterval.from_json(inp["start"])
    if len(intervals) != len(multipliers) + 1:
        yield "interval chain length mismatch"
        return
    for claim in cert["claims"]:
        cid = claim["id"]
        if claim["kind"] == "point-in-interval":
            yield from _check_point_claim(claim)
        elif claim["kind"] == "interval-length":
            k = int(cid.split("-")[1])
            want = eps / multipliers[k - 1]
            got = TorusInterval.from_json(claim["interval"]).length
            if got != want or _fr(want) != claim["length"] or not claim["verdict"]:
                yield f"{cid}: interval length {got} != eps/n = {want}"
        elif claim["kind"] == "interval-nested":
            outer = TorusInterval.from_json(claim["outer"])
            inner = TorusInterval.from_json(claim["inner"])
            if not interval_contains_interval(outer, inner) or not claim["verdict"]:
                yield f"{cid}: nesting fails"
        else:
            yield f"{cid}: unknown claim kind {claim['kind']!r}"
    # Cross-checks tying the echo together.
    if not start.contains(alpha):
        yield "alpha outside the start interval"
    for k, (n_k, target) in enumerate(zip(multipliers, targets), start=1):
        if not target.contains(mul_mod1(n_k, alpha)):
            yield f"containment-{k}: alpha fails the target"


def _verify_hitfreq(cert: dict):
    inp = cert["inputs"]
    alpha = parse_rational(inp["alpha"])
    multipliers = [int(v) for v in inp["multipliers"]]
    interval = TorusInterval.from_json(inp["interval"])
    ratio = parse_rational(inp["ratio"])
    plan = inp["plan"]
    u, c = int(plan["u"]), int(plan["c"])
    eps = interval.length
    horizon = len(multipliers)
    for j in range(horizon - 1):
        if Fraction(multipliers[j + 1], multipliers[j]) < ratio:
            yield f"growth fails at step {j + 1}"
    count = sum(
        1 for j in range(1, horizon + 1) if interval.contains(mul_mod1(multipliers[j - 1], alpha))
    )
    for claim in cert["claims"]:
        cid = claim["id"]
        kind = claim["kind"]
        if kind == "point-in-interval":
            yield from _check_point_claim(claim)
        elif kind == "hit-count-frequency":
            if count != int(claim["count"]):
                yield f"{cid}: recount {count} != stated {claim['count']}"
            threshold = parse_rational(claim["threshold"])
            verdict = Fraction(count, horizon) > threshold
            if threshold != Fraction(1, 2 * c):
                yield f"{cid}: threshold is not 1/(2c)"
            if verdict != bool(claim["verdict"]):
                yield f"{cid}: verdict mismatch"
        elif kind == "rational-power-gt":
            lhs, rhs = parse_rational(claim["lhs"]), parse_rational(claim["rhs"])
            want_lhs = ratio ** (u - 2) if cid == "plan-quality" else ratio**c
            want_rhs = Fraction(2) if cid == "plan-quality" else 2 / eps
            if lhs != want_lhs or rhs != want_rhs or (lhs > rhs) != bool(claim["verdict"]):
                yield f"{cid}: inequality fails recomputation"
        elif kind == "rational-power-lt":
            lhs = parse_rational(claim["lhs"])
            if lhs != ratio**c * eps**u or (lhs < 1) != bool(claim["verdict"]):
                yield f"{cid}: inequality fails recomputation"
        else:
            yield f"{cid}: unknown claim kind {kind!r}"


def _verify_histogram(cert: dict):
    inp = cert["inputs"]
    alpha = parse_rational(inp["alpha"])
    multipliers = [int(v) for v in inp["multipliers"]]
    weights = [int(w) for w in inp["weights"]]
    eta = parse_rational(inp["eta"])
    ell = len(weights)
    total = sum(weights)
    horizon = len(multipliers)
    counts = [0] * ell
    for n in multipliers:
        v = mul_mod1(n, alpha)
        counts[int(v * ell)] += 1
    for claim in cert["claims"]:
        if claim["kind"] != "cell-frequency-within":
            yield f"{claim['id']}: unknown claim kind"
            continue
        i = int(claim["cell"])
        if counts[i] != int(claim["count"]):
            yield f"{claim['id']}: recount {counts[i]} != stated {claim['count']}"
        dev = abs(Fraction(counts[i], horizon) - Fraction(weights[i], total))
        if (dev < eta) != bool(claim["verdict"]):
            yield f"{claim['id']}: verdict mismatch (deviation {dev})"


def _verify_avoid(cert: dict):
    inp = cert["inputs"]
    alpha = parse_rational(inp["alpha"])
    eps = parse_rational(inp["eps"])
    prefix = [int(v) for v in inp["prefix"]]
    gaps = [int(ch) for ch in inp["gaps"]]
    indices = list(prefix)
    for g in gaps:
        indices.append(indices[-1] + g)
    if len(indices) != int(inp["horizon"]):
        yield "horizon does not match prefix + gaps"
        return
    hits = sum(1 for n in indices[len(prefix) :] if mod1(n * alpha) < eps)
    for claim in cert["claims"]:
        cid, kind = claim["id"], claim["kind"]
        if kind == "gaps-in-one-two":
            ok = all(g in (1, 2) for g in gaps) and all(
                b - a in (1, 2) for a, b in zip(prefix, prefix[1:])
            )
            if ok != bool(claim["verdict"]):
                yield f"{cid}: verdict mismatch"
        elif kind == "orbit-avoids-interval":
            if hits != int(claim["hits"]) or (hits == 0) != bool(claim["verdict"]):
                yield f"{cid}: recomputed hits {hits} != stated {claim['hits']}"
        elif kind == "star-discrepancy-at-least":
            points = [mod1(n * alpha) for n in indices]
            disc = star_discrepancy(points)
            floor = parse_rational(claim["floor"])
            if _fr(disc) != claim["value"] or (disc >= floor) != bool(claim["verdict"]):
                yield f"{cid}: recomputed discrepancy {_fr(disc)} != stated {claim['value']}"
        else:
            yield f"{cid}: unknown claim kind {kind!r}"


def _verify_zeroblock(cert: dict):
    inp = cert["inputs"]
    base = parse_rational(inp["base"])
    starts = [int(j) for j in inp["block_starts"]]
    digits = [int(ch) for ch in inp["digits"]]
    length = max(j * j for j in starts)
    if len(digits) != length:
        yield f"digit string length {len(digits)} != {length}"
        return
    want = list(binary_digits(base, length))
    for j in starts:
        for pos in range(j, j * j + 1):
            want[pos - 1] = 0
    if want != digits:
        yield "digit string does not match base with zeroed blocks"
    value = Fraction(int("".join(str(d) for d in digits), 2), 1 << length)
    point = BinaryPoint(tuple(digits), exact=True)
    for claim in cert["claims"]:
        cid, kind = claim["id"], claim["kind"]
        if kind == "point-in-interval":
            iv = TorusInterval.from_json(claim["interval"])
            if _fr(value) != claim["value"] or iv.contains(value) != bool(claim["verdict"]):
                yield f"{cid}: value or verdict mismatch"
        elif kind == "digit-blocks-zero":
            ok = all(digits[pos - 1] == 0 for j in starts for pos in range(j, j * j + 1))
            if ok != bool(claim["verdict"]):
                yield f"{cid}: verdict mismatch"
        elif kind == "window-density":
            end = int(claim["end"])
            hits = 0
            for k in range(1, end + 1):
                shifted = mod1(point.shift(k).value + value)
                if Fraction(1, 2) < shifted < Fraction(3, 4):
                    hits += 1
            if hits != int(claim["hits"]) or _fr(Fraction(hits, end)) != claim["density"]:
                yield f"{cid}: recomputed hits {hits} != stated {claim['hits']}"
        else:
            yield f"{cid}: unknown claim kind {kind!r}"


def _verify_fivesixth(cert: dict):
    inp = cert["inputs"]
    alpha = parse_rational(inp["alpha"])
    horizon = int(inp["horizon"])
    if not 0 < alpha < Fraction(1, 16):
        yield "alpha outside (0, 1/16)"
        return
    # Independent recount via modular arithmetic on (2^k + 1) * alpha.
    p, q = alpha.numerator, alpha.denominator
    left = Fraction(1, 2) - alpha / 3
    right = Fraction(3, 4) + alpha / 3
    hits = minus = plus = 0
    minus_flags = []
    plus_flags = []
    for k in range(1, horizon + 1):
        value = Fraction(((pow(2, k, q) + 1) * p) % q, q)
        hit = left < value < right
        in_minus = in_plus = False
        if hit:
            hits += 1
            shifted = mod1(value - alpha)
            in_minus = shifted <= Fraction(1, 2)
            in_plus = not in_minus
            minus += in_minus
            plus += in_plus
        minus_flags.append(in_minus)
        plus_flags.append(in_plus)
    spacing_ok = True
    for k in range(horizon):
        if minus_flags[k] and (
            (k + 1 < horizon and minus_flags[k + 1]) or (k + 2 < horizon and minus_flags[k + 2])
        ):
            spacing_ok = False
        if plus_flags[k] and k + 1 < horizon and plus_flags[k + 1]:
            spacing_ok = False
    for claim in cert["claims"]:
        cid, kind = claim["id"], claim["kind"]
        if kind == "widened-interval-hits":
            if hits != int(claim["hits"]) or minus != int(claim["minus_hits"]) or plus != int(
                claim["plus_hits"]
            ):
                yield f"{cid}: recount ({hits},{minus},{plus}) differs"
        elif kind == "density-at-most":
            bound = parse_rational(claim["bound"])
            density = Fraction(hits, horizon)
            if bound != Fraction(5, 6) + Fraction(3, horizon):
                yield f"{cid}: bound is not 5/6 + 3/K"
            if _fr(density) != claim["density"] or (density <= bound) != bool(claim["verdict"]):
                yield f"{cid}: density or verdict mismatch"
        elif kind == "hit-spacing":
            if spacing_ok != bool(claim["verdict"]):
                yield f"{cid}: recomputed spacing {spacing_ok} != stated {claim['verdict']}"
        else:
            yield f"{cid}: unknown claim kind {kind!r}"


def _verify_invariance(cert: dict):
    inp = cert["inputs"]
    alpha = parse_rational(inp["alpha"])
    steps = int(inp["steps"])
    partition = CellPartition(tuple(parse_rational(t) for t in inp["cuts"]))
    v = mod1(alpha)
    points = []
    for _ in range(steps):
        v = mod1(2 * v)
        points.append(v)
    defect = invariance_defect(points, partition)
    for claim in cert["claims"]:
        cid, kind = claim["id"], claim["kind"]
        if kind == "invariance-defect-equals":
            if _fr(defect) != claim["defect"]:
                yield f"{cid}: recomputed defect {_fr(defect)} != stated {claim['defect']}"
        elif kind == "defect-at-most":
            bound = parse_rational(claim["bound"])
            if (defect <= bound) != bool(claim["verdict"]):
                yield f"{cid}: verdict mismatch"
        else:
            yield f"{cid}: unknown claim kind {kind!r}"


def _verify_envelope(cert: dict):
    inp = cert["inputs"]
    mu = MeasureVector(tuple(parse_rational(v) for v in inp["mu"]))
    lam = MeasureVector(tuple(parse_rational(v) for v in inp["lambda"]))
    pi = RatioMeasure.from_json(inp["pi"])
    tol = parse_rational(inp["tol"])
    result = envelope_dominates(mu, lam, pi, tol=tol)
    for claim in cert["claims"]:
        if claim["kind"] != "envelope-domination":
            yield f"{claim['id']}: unknown claim kind"
            continue
        if result.ok != bool(claim["verdict"]):
            yield f"{claim['id']}: recomputed verdict {result.ok} != stated {claim['verdict']}"
        if not result.ok and "violation" in claim:
            if list(result.violation) != list(claim["violation"]):
                yield f"{claim['id']}: first violation {result.violation} differs"


_CHECKERS = {
    "mixing": _verify_mixing,
    "hitfreq": _verify_hitfreq,
    "histogram": _verify_histogram,
    "avoid": _verify_avoid,
    "zeroblock": _verify_zeroblock,
    "fivesixth": _verify_fivesixth,
    "invariance": _verify_invariance,
    "envelope": _verify_envelope,
}
