"""Command-line front end: reproducible experiments with exact outputs.

Subcommands: envelope, subspace, witness, doubling, scan, verify.  Options
may also come from a key=value config file (--config); an explicit flag wins
over the file, unknown keys are rejected, and every rational is parsed
exactly ("p/q" or decimal string).  Outputs are JSON certificates (stable key
order) and CSV tables; identical configuration and seed reproduce identical
bytes.  The default seed is 0, overridable through the MALDIST_SEED
environment variable or --seed.  All randomness comes from the SplitMix64
stream named in the output.

Exit codes: 0 success, 1 a certificate claim failed (or verification found a
mismatch), 2 usage error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from fractions import Fraction

from . import certificates as certs
from .doubling import (
    doubling_orbit,
    doubling_period,
    five_sixth_check,
    invariance_defect,
    zero_block_density,
)
from .empirical import CellPartition, MeasureVector, checkpoint_scan, scan_to_csv
from .envelope import (
    BlockSpec,
    EnvelopeFunction,
    RatioMeasure,
    check_admissible,
    envelope_dominates,
    pi_measure,
)
from .exact import RationalParseError, decimal_str, format_rational, mod1, parse_rational
from .rng import ALGORITHM
from .subspace import ExtensionTarget, greedy_extension
from .torus import TorusInterval
from .witness import (
    HistogramTarget,
    MixingConfig,
    WitnessPlan,
    avoidance_sequence,
    histogram_witness,
    hit_frequency_witness,
    mixing_chain,
    zero_block_alpha,
)

USAGE_ERROR = 2
CLAIM_ERROR = 1


class CliError(Exception):
    """Usage-level error: reported on stderr, exit code 2."""


# ---------------------------------------------------------------------------
# option plumbing: flags + config file, flag wins, unknown keys rejected


_SUBCOMMAND_KEYS: dict[str, set[str]] = {}


def _add_option(parser: argparse.ArgumentParser, sub: str, name: str, **kwargs):
    _SUBCOMMAND_KEYS.setdefault(sub, set()).add(name)
    parser.add_argument(f"--{name}", default=None, **kwargs)


def _merge_config(args: argparse.Namespace, sub: str) -> dict[str, str]:
    values: dict[str, str] = {}
    if args.config:
        try:
            text = open(args.config, "r", encoding="utf-8").read()
        except OSError as exc:
            raise CliError(f"cannot read config file: {exc}")
        for lineno, raw in enumerate(text.splitlines(), start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise CliError(f"{args.config}:{lineno}: expected key = value")
            key, _, val = line.partition("=")
            key, val = key.strip(), val.strip()
            if key not in _SUBCOMMAND_KEYS[sub]:
                raise CliError(f"{args.config}:{lineno}: unknown key {key!r} for {sub!r}")
            values[key] = val
    for key in _SUBCOMMAND_KEYS[sub]:
        flag_val = getattr(args, key.replace("-", "_"))
        if flag_val is not None:
            values[key] = flag_val
    return values


def _require(opts: dict, key: str) -> str:
    if key not in opts:
        raise CliError(f"missing required option --{key}")
    return opts[key]


def _rational(opts: dict, key: str, default: str | None = None) -> Fraction:
    if key not in opts:
        if default is None:
            raise CliError(f"missing required option --{key}")
        return parse_rational(default)
    try:
        return parse_rational(opts[key])
    except RationalParseError as exc:
        raise CliError(f"--{key}: {exc}")


def _int(opts: dict, key: str, default: int | None = None) -> int:
    if key not in opts:
        if default is None:
            raise CliError(f"missing required option --{key}")
        return default
    try:
        return int(opts[key])
    except ValueError:
        raise CliError(f"--{key}: expected an integer, got {opts[key]!r}")


def _int_list(text: str, key: str) -> list[int]:
    try:
        return [int(v) for v in text.split(",") if v.strip() != ""]
    except ValueError:
        raise CliError(f"--{key}: expected comma-separated integers")


def _rational_list(text: str, key: str) -> list[Fraction]:
    out = []
    for part in text.split(","):
        try:
            out.append(parse_rational(part))
        except RationalParseError as exc:
            raise CliError(f"--{key}: {exc}")
    return out


def _interval(text: str, key: str) -> TorusInterval:
    vals = _rational_list(text, key)
    if len(vals) != 2:
        raise CliError(f"--{key}: expected 'left,right'")
    return TorusInterval(vals[0], vals[1])


def _seed(opts: dict) -> int:
    if "seed" in opts:
        return _int(opts, "seed")
    env = os.environ.get("MALDIST_SEED")
    if env is not None:
        try:
            return int(env)
        except ValueError:
            raise CliError(f"MALDIST_SEED must be an integer, got {env!r}")
    return 0


def _write_json(obj: dict, path: str | None) -> None:
    text = json.dumps(obj, sort_keys=True, indent=2) + "\n"
    if path:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _write_text(text: str, path: str | None) -> None:
    if path:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# ---------------------------------------------------------------------------
# generators for block specs and multiplier sequences


def _length_fn(desc: str, key: str):
    if ":" in desc:
        name, _, arg = desc.partition(":")
    else:
        name, arg = desc, None
    if name == "linear":
        offset = int(arg) if arg else 0
        return lambda j: j + offset
    if name == "log":
        return lambda j: j.bit_length()
    if name == "const":
        if arg is None:
            raise CliError(f"--{key}: const needs a value, e.g. const:4")
        c = int(arg)
        return lambda j: c
    raise CliError(f"--{key}: unknown generator {name!r} (use linear[:o], log, const:c)")


def _mult_fn(desc: str, key: str, lengths):
    if ":" in desc:
        name, _, arg = desc.partition(":")
    else:
        name, arg = desc, None
    if name == "halfceil":
        return lambda j: (lengths(j) + 1) // 2
    if name in ("linear", "log", "const"):
        return _length_fn(desc, key)
    raise CliError(f"--{key}: unknown generator {name!r} (use linear[:o], log, const:c, halfceil)")


def _block_spec(opts: dict) -> BlockSpec:
    spec_text = _require(opts, "spec")
    try:
        obj = json.loads(spec_text)
    except json.JSONDecodeError as exc:
        raise CliError(f"--spec: invalid JSON ({exc})")
    if not isinstance(obj, dict) or set(obj) - {"b", "m"}:
        raise CliError("--spec: expected an object with keys 'b' and 'm'")
    b, m = obj.get("b"), obj.get("m")
    if isinstance(b, list) and isinstance(m, list):
        return BlockSpec([int(v) for v in b], [int(v) for v in m])
    if isinstance(b, str):
        b_fn = _length_fn(b, "spec")
    elif isinstance(b, list):
        blist = [int(v) for v in b]
        b_fn = lambda j: blist[j - 1]
    else:
        raise CliError("--spec: 'b' must be a list or generator name")
    if isinstance(m, str):
        m_fn = _mult_fn(m, "spec", b_fn)
    elif isinstance(m, list):
        mlist = [int(v) for v in m]
        m_fn = lambda j: mlist[j - 1]
    else:
        raise CliError("--spec: 'm' must be a list or generator name")
    return BlockSpec(b_fn, m_fn)


def _multipliers(opts: dict, count: int) -> list[int]:
    if "n" in opts:
        values = _int_list(opts["n"], "n")
        if len(values) < count:
            raise CliError(f"--n: need at least {count} values")
        return values[:count]
    kind = opts.get("n-kind")
    if kind is None:
        raise CliError("need --n or --n-kind")
    name, _, arg = kind.partition(":")
    if name == "pow":
        base = int(arg or 2)
        return [base**k for k in range(1, count + 1)]
    if name == "squarepow":
        base = int(arg or 5)
        return [base ** (k * k) for k in range(1, count + 1)]
    raise CliError(f"--n-kind: unknown generator {name!r} (use pow:b or squarepow:b)")


def _points_source(opts: dict, count: int) -> list[Fraction]:
    kind = opts.get("x-kind", "rotation")
    if kind == "rotation":
        alpha = _rational(opts, "x-alpha")
        return [mod1(n * alpha) for n in range(1, count + 1)]
    if kind == "doubling":
        alpha = _rational(opts, "x-alpha")
        return doubling_orbit(alpha, count)
    raise CliError(f"--x-kind: unknown kind {kind!r} (use rotation or doubling)")


# ---------------------------------------------------------------------------
# subcommands


def _cmd_envelope(args) -> int:
    opts = _merge_config(args, "envelope")
    spec = _block_spec(opts)
    blocks = _int(opts, "blocks")
    grid = _int(opts, "grid", 101)
    if grid < 2:
        raise CliError("--grid: need at least 2 points")
    digits = _int(opts, "digits", 12)
    pi = pi_measure(spec, blocks)
    env = EnvelopeFunction(pi)
    table = env.table([Fraction(i, grid - 1) for i in range(grid)])
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(["t", "F", "t_exact", "F_exact"])
    for t, v in table:
        writer.writerow(
            [decimal_str(t, digits), decimal_str(v, digits),
             format_rational(t), format_rational(v)]
        )
    _write_text(out.getvalue(), opts.get("table-out"))
    report = check_admissible(spec, blocks)
    result = {
        "admissibility": {
            "horizon": report.horizon,
            "anchors": list(report.anchors),
            "b_tail_min": list(report.b_tail_min),
            "ratio_tail_max": [format_rational(r) for r in report.ratio_tail_max],
            "b_bounded_flag": report.b_bounded_flag,
            "ratio_stalled_flag": report.ratio_stalled_flag,
        },
        "pi": pi.to_json(),
        "rng": {"algorithm": ALGORITHM, "seed": _seed(opts)},
    }
    exit_code = 0
    if "mu" in opts:
        mu = MeasureVector(tuple(_rational_list(_require(opts, "mu"), "mu")))
        lam = MeasureVector(tuple(_rational_list(_require(opts, "lam"), "lam")))
        tol = _rational(opts, "tol", "0/1")
        verdict = envelope_dominates(
            mu, lam, pi, tol=tol, workers=_int(opts, "workers", 1), seed=_seed(opts)
        )
        cert = certs.envelope_certificate(mu, lam, pi, verdict, tol)
        result["certificate"] = cert
        if not certs.certificate_ok(cert):
            exit_code = CLAIM_ERROR
    _write_json(result, opts.get("out"))
    return exit_code


def _cmd_subspace(args) -> int:
    opts = _merge_config(args, "subspace")
    spec = _block_spec(opts)
    cuts = _rational_list(_require(opts, "cuts"), "cuts")
    partition = CellPartition(tuple(cuts))
    lam = partition.lebesgue_masses()
    mu = MeasureVector(tuple(_rational_list(_require(opts, "mu"), "mu")))
    eps = _rational(opts, "eps", "1/10")
    if "pi" in opts:
        try:
            pi = RatioMeasure.from_json(json.loads(opts["pi"]))
        except (json.JSONDecodeError, TypeError) as exc:
            raise CliError(f"--pi: expected JSON [[q, w], ...] pairs ({exc})")
    else:
        pi_blocks = _int(opts, "pi-blocks", _int(opts, "blocks", 64))
        pi = pi_measure(spec, pi_blocks)
    blocks = _int(opts, "blocks", 64)
    x = _points_source(opts, spec.a(blocks))
    target = ExtensionTarget(mu=mu, eps=eps, pi=pi)
    prefix = _int_list(opts.get("prefix", ""), "prefix") if opts.get("prefix") else []
    result = greedy_extension(
        prefix, spec, x, partition, lam, target, fixed_blocks=None, max_blocks=blocks
    )
    runs: list[list[int]] = []
    for n in result.indices:
        if runs and runs[-1][0] + runs[-1][1] == n:
            runs[-1][1] += 1
        else:
            runs.append([n, 1])
    trace_out = io.StringIO()
    writer = csv.writer(trace_out, lineterminator="\n")
    writer.writerow(["block", "M"] + [f"d_{i}" for i in range(partition.size)])
    for entry in result.trace:
        writer.writerow(
            [entry.block, entry.cumulative] + [format_rational(d) for d in entry.deviations]
        )
    _write_text(trace_out.getvalue(), opts.get("trace-out"))
    _write_json(
        {
            "indices_runlength": runs,
            "blocks": result.blocks,
            "achieved": result.achieved,
            "max_abs_deviation": format_rational(result.max_abs_dev),
            "total_abs_deviation": format_rational(result.total_abs_dev),
            "rng": {"algorithm": ALGORITHM, "seed": _seed(opts)},
        },
        opts.get("out"),
    )
    return 0


def _cmd_witness(args) -> int:
    opts = _merge_config(args, "witness")
    mode = _require(opts, "mode")
    if mode == "mixing":
        eps = _rational(opts, "eps")
        delta = _rational(opts, "delta")
        start = _interval(_require(opts, "start"), "start")
        targets = tuple(
            _interval(part, "targets") for part in _require(opts, "targets").split(";")
        )
        n = _multipliers(opts, len(targets))
        config = MixingConfig(
            multipliers=tuple(n), eps=eps, delta=delta, start=start, targets=targets
        )
        chain = mixing_chain(config)
        cert = certs.mixing_certificate(chain)
    elif mode in ("salat2", "hitfreq"):
        interval = _interval(_require(opts, "interval"), "interval")
        ratio = _rational(opts, "ratio")
        count = _int(opts, "count", 64)
        n = _multipliers(opts, count)
        plan = None
        if "plan-u" in opts:
            plan = WitnessPlan(
                ratio=ratio,
                u=_int(opts, "plan-u"),
                c=_int(opts, "plan-c"),
                repeats=_int(opts, "plan-repeats", 1),
            )
        witness = hit_frequency_witness(n, interval, ratio, plan=plan)
        cert = certs.hitfreq_certificate(witness, n)
    elif mode in ("salat3", "histogram"):
        weights = _int_list(_require(opts, "weights"), "weights")
        eta = _rational(opts, "eta")
        base = _int(opts, "base")
        n = _multipliers(opts, base * base)
        witness = histogram_witness(n, HistogramTarget(tuple(weights), eta), base)
        cert = certs.histogram_certificate(witness, n)
    elif mode == "avoid":
        alpha = _rational(opts, "alpha")
        eps = _rational(opts, "eps")
        horizon = _int(opts, "horizon", 10_000)
        prefix = _int_list(opts.get("prefix", "1"), "prefix") if opts.get("prefix") else [1]
        result = avoidance_sequence(alpha, eps, prefix=prefix, horizon=horizon)
        floor = _rational(opts, "discrepancy-floor", "0/1")
        cert = certs.avoidance_certificate(result, floor if floor > 0 else None)
    elif mode == "zeroblock":
        base = _rational(opts, "base")
        starts = _int_list(_require(opts, "starts"), "starts")
        point = zero_block_alpha(base, starts)
        cert = certs.zeroblock_certificate(point, base, starts)
    else:
        raise CliError(f"--mode: unknown witness mode {mode!r}")
    cert["rng"] = {"algorithm": ALGORITHM, "seed": _seed(opts)}
    _write_json(cert, opts.get("out"))
    return 0 if certs.certificate_ok(cert) else CLAIM_ERROR


def _cmd_doubling(args) -> int:
    opts = _merge_config(args, "doubling")
    mode = _require(opts, "mode")
    if mode == "orbit":
        alpha = _rational(opts, "alpha")
        steps = _int(opts, "steps")
        digits = _int(opts, "digits", 12)
        orbit = doubling_orbit(alpha, steps)
        out = io.StringIO()
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(["k", "value", "value_exact"])
        for k, v in enumerate(orbit, start=1):
            writer.writerow([k, decimal_str(v, digits), format_rational(v)])
        _write_text(out.getvalue(), opts.get("out"))
        return 0
    if mode == "invariance":
        alpha = _rational(opts, "alpha")
        pre, period = doubling_period(alpha)
        steps = _int(opts, "steps", pre + period)
        level = _int(opts, "level", 3)
        partition = CellPartition.dyadic(level)
        orbit = doubling_orbit(alpha, steps)
        defect = invariance_defect(orbit, partition)
        cert = certs.invariance_certificate(alpha, steps, partition, defect)
    elif mode == "fivesixth":
        alpha = _rational(opts, "alpha")
        pre, period = doubling_period(alpha)
        horizon = _int(opts, "horizon", pre + period)
        report = five_sixth_check(alpha, horizon)
        cert = certs.fivesixth_certificate(report, alpha)
    elif mode == "zeroblock":
        base = _rational(opts, "base")
        starts = _int_list(_require(opts, "starts"), "starts")
        point = zero_block_alpha(base, starts)
        windows = (
            _int_list(opts["windows"], "windows")
            if opts.get("windows")
            else [j * j for j in sorted(starts)]
        )
        densities = zero_block_density(point, windows)
        cert = certs.zeroblock_certificate(point, base, starts, densities)
    else:
        raise CliError(f"--mode: unknown doubling mode {mode!r}")
    cert["rng"] = {"algorithm": ALGORITHM, "seed": _seed(opts)}
    _write_json(cert, opts.get("out"))
    return 0 if certs.certificate_ok(cert) else CLAIM_ERROR


def _cmd_scan(args) -> int:
    opts = _merge_config(args, "scan")
    checkpoints = _int_list(_require(opts, "checkpoints"), "checkpoints")
    if "cuts" in opts:
        partition = CellPartition(tuple(_rational_list(opts["cuts"], "cuts")))
    else:
        partition = CellPartition.uniform(_int(opts, "cells", 10))
    points = _points_source(opts, max(checkpoints))
    scan = checkpoint_scan(points, partition, checkpoints)
    _write_text(scan_to_csv(scan, digits=_int(opts, "digits", 12)), opts.get("out"))
    return 0


def _cmd_verify(args) -> int:
    opts = _merge_config(args, "verify")
    if getattr(args, "certificate_path", None) and "certificate" not in opts:
        opts["certificate"] = args.certificate_path
    path = _require(opts, "certificate")
    try:
        with open(path, "r", encoding="utf-8") as fh:
            cert = json.load(fh)
    except OSError as exc:
        raise CliError(f"cannot read certificate: {exc}")
    except json.JSONDecodeError as exc:
        raise CliError(f"certificate is not valid JSON: {exc}")
    result = certs.verify_certificate(cert)
    ok = result.ok and certs.certificate_ok(cert)
    _write_json(
        {"ok": ok, "failures": list(result.failures)},
        opts.get("out"),
    )
    return 0 if ok else CLAIM_ERROR


# ---------------------------------------------------------------------------


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="maldist",
        description="Exact witnesses and envelope bounds for irregular distribution mod 1.",
    )
    subs = parser.add_subparsers(dest="command", required=True)

    def sub(name: str, help_text: str) -> argparse.ArgumentParser:
        p = subs.add_parser(name, help=help_text)
        p.add_argument("--config", default=None, help="key=value option file (flags win)")
        _SUBCOMMAND_KEYS.setdefault(name, set())
        return p

    p = sub("envelope", "ratio measure, envelope table and domination verdict")
    for name in ("spec", "blocks", "grid", "mu", "lam", "tol", "workers",
                 "digits", "seed", "out", "table-out"):
        _add_option(p, "envelope", name)

    p = sub("subspace", "greedy extension toward a target measure")
    for name in ("spec", "cuts", "mu", "eps", "pi", "pi-blocks", "blocks",
                 "prefix", "x-kind", "x-alpha", "seed", "out", "trace-out"):
        _add_option(p, "subspace", name)

    p = sub(
        "witness",
        "explicit irregularity witnesses (mixing|salat2|salat3|avoid|zeroblock; "
        "hitfreq/histogram alias the middle two)",
    )
    for name in ("mode", "n", "n-kind", "eps", "delta", "start", "targets",
                 "interval", "ratio", "count", "plan-u", "plan-c", "plan-repeats",
                 "weights", "eta", "base", "alpha", "horizon", "prefix",
                 "discrepancy-floor", "starts", "seed", "out"):
        _add_option(p, "witness", name)

    p = sub("doubling", "doubling-map orbits and hit reports (orbit|invariance|fivesixth|zeroblock)")
    for name in ("mode", "alpha", "steps", "level", "horizon", "base", "starts",
                 "windows", "digits", "seed", "out"):
        _add_option(p, "doubling", name)

    p = sub("scan", "checkpoint scan of a point sequence as CSV")
    for name in ("x-kind", "x-alpha", "cuts", "cells", "checkpoints", "digits",
                 "seed", "out"):
        _add_option(p, "scan", name)

    p = sub("verify", "re-check a certificate from its echoed inputs")
    p.add_argument("certificate_path", nargs="?", default=None,
                   help="certificate JSON file (alternative to --certificate)")
    for name in ("certificate", "seed", "out"):
        _add_option(p, "verify", name)

    return parser


_COMMANDS = {
    "envelope": _cmd_envelope,
    "subspace": _cmd_subspace,
    "witness": _cmd_witness,
    "doubling": _cmd_doubling,
    "scan": _cmd_scan,
    "verify": _cmd_verify,
}


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except CliError as exc:
        print(f"maldist {args.command}: {exc}", file=sys.stderr)
        return USAGE_ERROR
    except RationalParseError as exc:
        print(f"maldist {args.command}: {exc}", file=sys.stderr)
        return USAGE_ERROR
    except (ValueError, IndexError) as exc:
        print(f"maldist {args.command}: {exc}", file=sys.stderr)
        return USAGE_ERROR


if __name__ == "__main__":
    sys.exit(main())
