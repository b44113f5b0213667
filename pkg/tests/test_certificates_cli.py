import json
import subprocess
import sys
from fractions import Fraction as F

import pytest

from maldist import certificates as certs
from maldist.doubling import (
    doubling_orbit,
    five_sixth_check,
    invariance_defect,
    zero_block_density,
)
from maldist.empirical import CellPartition, MeasureVector
from maldist.envelope import RatioMeasure, envelope_dominates
from maldist.torus import TorusInterval
from maldist.witness import (
    HistogramTarget,
    MixingConfig,
    avoidance_sequence,
    histogram_witness,
    hit_frequency_witness,
    mixing_chain,
    zero_block_alpha,
)


def run_cli(*args):
    return subprocess.run(
        [sys.executable, "-m", "maldist.cli", *args],
        capture_output=True,
        text=True,
    )


# --- certificate round trips -------------------------------------------------


def all_certificates():
    chain = mixing_chain(
        MixingConfig(
            multipliers=(100, 10**4, 10**6),
            eps=F(1, 10),
            delta=F(1, 20),
            start=TorusInterval(F(3, 10), F(9, 25)),
            targets=tuple(TorusInterval(F(9, 20), F(11, 20)) for _ in range(3)),
        )
    )
    yield "mixing", certs.mixing_certificate(chain)

    n2 = [2**k for k in range(1, 20)]
    witness = hit_frequency_witness(
        n2, TorusInterval(F(1, 2), F(1, 2) + F(1, 64)), F(2)
    )
    yield "hitfreq", certs.hitfreq_certificate(witness, n2)

    n3 = [5 ** (k * k) for k in range(1, 65)]
    hist = histogram_witness(n3, HistogramTarget((3, 1), F(1, 10)), base=8)
    yield "histogram", certs.histogram_certificate(hist, n3)

    avoid = avoidance_sequence(F(5, 17), F(1, 5), prefix=(1,), horizon=500)
    yield "avoid", certs.avoidance_certificate(avoid, discrepancy_floor=F(19, 100))

    point = zero_block_alpha(F(2, 3), (4, 10))
    densities = zero_block_density(point, [16, 100])
    yield "zeroblock", certs.zeroblock_certificate(point, F(2, 3), (4, 10), densities)

    report = five_sixth_check(F(1, 17), 8)
    yield "fivesixth", certs.fivesixth_certificate(report, F(1, 17))

    partition = CellPartition.dyadic(3)
    orbit = doubling_orbit(F(1, 17), 8)
    defect = invariance_defect(orbit, partition)
    yield "invariance", certs.invariance_certificate(F(1, 17), 8, partition, defect)

    mu = MeasureVector((F(3, 5), F(2, 5)))
    lam = MeasureVector((F(1, 2), F(1, 2)))
    pi = RatioMeasure.point_mass(F(1, 2))
    res = envelope_dominates(mu, lam, pi)
    yield "envelope", certs.envelope_certificate(mu, lam, pi, res)


@pytest.mark.parametrize("kind,cert", list(all_certificates()))
def test_round_trip(kind, cert):
    assert cert["kind"] == kind
    assert certs.certificate_ok(cert)
    result = certs.verify_certificate(cert)
    assert result.ok, result.failures
    # JSON serialization round-trips losslessly.
    reparsed = json.loads(json.dumps(cert, sort_keys=True))
    assert certs.verify_certificate(reparsed).ok


def test_tampered_containment_fails():
    chain = mixing_chain(
        MixingConfig(
            multipliers=(100, 10**4),
            eps=F(1, 10),
            delta=F(1, 20),
            start=TorusInterval(F(3, 10), F(9, 25)),
            targets=tuple(TorusInterval(F(9, 20), F(11, 20)) for _ in range(2)),
        )
    )
    cert = json.loads(json.dumps(certs.mixing_certificate(chain)))
    for claim in cert["claims"]:
        if claim["id"] == "containment-2":
            claim["value"] = "1/3"
    result = certs.verify_certificate(cert)
    assert not result.ok
    assert any("containment-2" in f for f in result.failures)


def test_tampered_hit_count_fails():
    n2 = [2**k for k in range(1, 20)]
    witness = hit_frequency_witness(n2, TorusInterval(F(1, 2), F(33, 64)), F(2))
    cert = json.loads(json.dumps(certs.hitfreq_certificate(witness, n2)))
    for claim in cert["claims"]:
        if claim["id"] == "hit-frequency":
            claim["count"] = 0
            claim["verdict"] = False
    result = certs.verify_certificate(cert)
    assert not result.ok
    assert any("hit-frequency" in f for f in result.failures)


def test_horizon_beyond_inputs_rejected():
    avoid = avoidance_sequence(F(5, 17), F(1, 5), prefix=(1,), horizon=200)
    cert = json.loads(json.dumps(certs.avoidance_certificate(avoid)))
    cert["inputs"]["horizon"] = 9_999
    result = certs.verify_certificate(cert)
    assert not result.ok
    assert any("horizon" in f for f in result.failures)


def test_unknown_kind_rejected():
    result = certs.verify_certificate({"format": certs.FORMAT, "kind": "nope", "claims": []})
    assert not result.ok


def _tamper(cert):
    """One semantic edit per certificate kind; returns the edited copy."""
    cert = json.loads(json.dumps(cert))
    kind = cert["kind"]
    if kind == "mixing":
        cert["inputs"]["alpha"] = "1/7"
        for claim in cert["claims"]:
            if claim["kind"] == "point-in-interval":
                claim["alpha"] = "1/7"
    elif kind == "hitfreq":
        cert["inputs"]["plan"]["c"] += 1
    elif kind == "histogram":
        cert["claims"][0]["count"] += 1
    elif kind == "avoid":
        first = "2" if cert["inputs"]["gaps"][0] == "1" else "1"
        cert["inputs"]["gaps"] = first + cert["inputs"]["gaps"][1:]
    elif kind == "zeroblock":
        digits = cert["inputs"]["digits"]
        cert["inputs"]["digits"] = digits[:-1] + ("0" if digits[-1] == "1" else "1")
    elif kind == "fivesixth":
        cert["claims"][0]["hits"] += 1
    elif kind == "invariance":
        cert["claims"][0]["defect"] = "1/2"
    elif kind == "envelope":
        # identity envelope makes the echoed mu > lambda verdict wrong
        cert["inputs"]["pi"] = [["1/1", "1/1"]]
    return cert


@pytest.mark.parametrize("kind,cert", list(all_certificates()))
def test_every_kind_detects_tampering(kind, cert):
    edited = _tamper(cert)
    assert not certs.verify_certificate(edited).ok, kind


# --- CLI ---------------------------------------------------------------------


def test_cli_witness_salat2_and_verify(tmp_path):
    out = tmp_path / "cert.json"
    res = run_cli(
        "witness", "--mode", "salat2", "--n-kind", "pow:2", "--count", "30",
        "--interval", "1/2,33/64", "--ratio", "2", "--out", str(out),
    )
    assert res.returncode == 0, res.stderr
    check = run_cli("verify", str(out))
    assert check.returncode == 0, check.stdout
    payload = json.loads(check.stdout)
    assert payload["ok"] is True


def test_cli_verify_tampered_exits_one(tmp_path):
    out = tmp_path / "cert.json"
    run_cli(
        "witness", "--mode", "salat2", "--n-kind", "pow:2", "--count", "30",
        "--interval", "1/2,33/64", "--ratio", "2", "--out", str(out),
    )
    cert = json.loads(out.read_text())
    for claim in cert["claims"]:
        if claim["id"] == "hit-frequency":
            claim["count"] = 1
    out.write_text(json.dumps(cert))
    check = run_cli("verify", str(out))
    assert check.returncode == 1
    assert "hit-frequency" in check.stdout


def test_cli_byte_identical_reruns(tmp_path):
    args = (
        "witness", "--mode", "mixing", "--n", "100,10000,1000000",
        "--eps", "1/10", "--delta", "1/20", "--start", "3/10,9/25",
        "--targets", "9/20,11/20;9/20,11/20;9/20,11/20",
    )
    first = run_cli(*args)
    second = run_cli(*args)
    assert first.returncode == 0
    assert first.stdout == second.stdout


def test_cli_envelope_identity_table(tmp_path):
    table = tmp_path / "table.csv"
    res = run_cli(
        "envelope", "--spec", '{"b": [2, 2], "m": [2, 2]}', "--blocks", "2",
        "--grid", "11", "--table-out", str(table), "--out", str(tmp_path / "env.json"),
    )
    assert res.returncode == 0, res.stderr
    rows = table.read_text().strip().splitlines()[1:]
    assert len(rows) == 11
    for row in rows:
        t_dec, f_dec, t_exact, f_exact = row.split(",")
        assert t_dec == f_dec and t_exact == f_exact  # F = identity for pi = point mass at 1


def test_cli_envelope_domination_exit_code(tmp_path):
    res = run_cli(
        "envelope", "--spec", '{"b": [2, 2], "m": [2, 2]}', "--blocks", "2",
        "--mu", "3/5,2/5", "--lam", "1/2,1/2", "--out", str(tmp_path / "env.json"),
    )
    assert res.returncode == 1  # mu exceeds the identity envelope on cell 0
    payload = json.loads((tmp_path / "env.json").read_text())
    assert payload["certificate"]["claims"][0]["verdict"] is False


def test_cli_envelope_generator_names(tmp_path):
    res = run_cli(
        "envelope", "--spec", '{"b": "log", "m": "const:1"}', "--blocks", "20",
        "--grid", "5", "--table-out", str(tmp_path / "t.csv"),
        "--out", str(tmp_path / "e.json"),
    )
    assert res.returncode == 0, res.stderr
    payload = json.loads((tmp_path / "e.json").read_text())
    # log lengths over 20 blocks: ratios m/b land on 1, 1/2, 1/3, 1/4, 1/5
    locations = [atom[0] for atom in payload["pi"]]
    assert locations == ["1/5", "1/4", "1/3", "1/2", "1/1"]


def test_cli_config_file_flag_wins(tmp_path):
    config = tmp_path / "run.conf"
    config.write_text("mode = salat2\nn-kind = pow:2\ncount = 30\ninterval = 1/2,33/64\nratio = 2\n")
    out_a = tmp_path / "a.json"
    res = run_cli("witness", "--config", str(config), "--out", str(out_a))
    assert res.returncode == 0, res.stderr
    # Flag overrides the file's interval.
    out_b = tmp_path / "b.json"
    res = run_cli(
        "witness", "--config", str(config), "--interval", "1/4,17/64", "--out", str(out_b)
    )
    assert res.returncode == 0, res.stderr
    assert json.loads(out_a.read_text())["inputs"]["interval"]["left"] == "1/2"
    assert json.loads(out_b.read_text())["inputs"]["interval"]["left"] == "1/4"


def test_cli_config_unknown_key_rejected(tmp_path):
    config = tmp_path / "run.conf"
    config.write_text("mode = salat2\nbogus-key = 1\n")
    res = run_cli("witness", "--config", str(config))
    assert res.returncode == 2
    assert "bogus-key" in res.stderr


def test_cli_malformed_rational_rejected():
    res = run_cli(
        "witness", "--mode", "avoid", "--alpha", "5/17x", "--eps", "1/5",
        "--horizon", "100",
    )
    assert res.returncode == 2
    assert "position" in res.stderr


def test_cli_scan_csv():
    res = run_cli(
        "scan", "--x-kind", "rotation", "--x-alpha", "1/3", "--cells", "3",
        "--checkpoints", "3,6,9",
    )
    assert res.returncode == 0, res.stderr
    lines = res.stdout.strip().splitlines()
    assert lines[0].startswith("N,freq_0")
    for line in lines[1:]:
        assert line.split(",")[4:] == ["1/3", "1/3", "1/3"]


def test_cli_subspace_run(tmp_path):
    trace = tmp_path / "trace.csv"
    res = run_cli(
        "subspace", "--spec", '{"b": "linear:1", "m": "halfceil"}',
        "--cuts", "0,1/2,1", "--mu", "1/2,1/2", "--eps", "1/10",
        "--blocks", "12", "--x-alpha", "832040/1346269",
        "--trace-out", str(trace), "--out", str(tmp_path / "sub.json"),
    )
    assert res.returncode == 0, res.stderr
    payload = json.loads((tmp_path / "sub.json").read_text())
    assert payload["achieved"] is True
    assert trace.read_text().startswith("block,M,d_0,d_1")


def test_cli_witness_mode_aliases(tmp_path):
    a = run_cli(
        "witness", "--mode", "hitfreq", "--n-kind", "pow:2", "--count", "30",
        "--interval", "1/2,33/64", "--ratio", "2", "--out", str(tmp_path / "a.json"),
    )
    b = run_cli(
        "witness", "--mode", "salat2", "--n-kind", "pow:2", "--count", "30",
        "--interval", "1/2,33/64", "--ratio", "2", "--out", str(tmp_path / "b.json"),
    )
    assert a.returncode == b.returncode == 0
    assert (tmp_path / "a.json").read_text() == (tmp_path / "b.json").read_text()


def test_cli_envelope_workers(tmp_path):
    res = run_cli(
        "envelope", "--spec", '{"b": [2, 2, 2], "m": [1, 1, 1]}', "--blocks", "3",
        "--mu", "1/3,1/3,1/3", "--lam", "1/3,1/3,1/3", "--workers", "2",
        "--out", str(tmp_path / "env.json"),
    )
    assert res.returncode == 0, res.stderr
    payload = json.loads((tmp_path / "env.json").read_text())
    assert payload["certificate"]["claims"][0]["verdict"] is True


def test_cli_subspace_explicit_pi(tmp_path):
    res = run_cli(
        "subspace", "--spec", '{"b": "linear:1", "m": "halfceil"}',
        "--cuts", "0,1/2,1", "--mu", "1/2,1/2", "--eps", "1/10",
        "--blocks", "12", "--x-alpha", "832040/1346269",
        "--pi", '[["1/2", "1/1"]]',
        "--trace-out", str(tmp_path / "t.csv"), "--out", str(tmp_path / "s.json"),
    )
    assert res.returncode == 0, res.stderr
    bad = run_cli(
        "subspace", "--spec", '{"b": "linear:1", "m": "halfceil"}',
        "--cuts", "0,1/2,1", "--mu", "1/2,1/2", "--pi", "not json",
    )
    assert bad.returncode == 2


def test_cli_doubling_fivesixth_roundtrip(tmp_path):
    out = tmp_path / "five.json"
    res = run_cli("doubling", "--mode", "fivesixth", "--alpha", "1/17", "--out", str(out))
    assert res.returncode == 0, res.stderr
    check = run_cli("verify", "--certificate", str(out))
    assert check.returncode == 0


def test_cli_doubling_zeroblock_roundtrip(tmp_path):
    out = tmp_path / "zb.json"
    res = run_cli(
        "doubling", "--mode", "zeroblock", "--base", "2/3", "--starts", "4,10",
        "--out", str(out),
    )
    assert res.returncode == 0, res.stderr
    assert run_cli("verify", str(out)).returncode == 0


def test_cli_env_seed_echoed(tmp_path):
    out = tmp_path / "cert.json"
    res = subprocess.run(
        [sys.executable, "-m", "maldist.cli", "witness", "--mode", "avoid",
         "--alpha", "5/17", "--eps", "1/5", "--horizon", "50", "--out", str(out)],
        capture_output=True, text=True, env={"MALDIST_SEED": "42", "PATH": "/usr/bin:/bin"},
    )
    assert res.returncode == 0, res.stderr
    assert json.loads(out.read_text())["rng"]["seed"] == 42


def test_cli_unknown_flag_exits_two():
    res = run_cli("witness", "--mode", "avoid", "--no-such-flag", "1")
    assert res.returncode == 2
