"""Exit criteria for the whole package, one test per criterion.

Run ``pytest tests/test_acceptance.py`` to get a PASS/FAIL line per
criterion in the terminal summary.
"""

import math
import random
import subprocess
import sys
import time

import pytest

from mcescrow import bench, formats
from mcescrow.cli import main
from mcescrow.dlog import Algorithm, DlogInstance, dlog_bsgs, dlog_exhaustive, dlog_pollard_rho
from mcescrow.escrow import CHECK_CODES, EscrowPackage, Policy, create_escrow, recover_and_decrypt, recover_secret, verify_escrow
from mcescrow.keygen import PROFILES, PublicKey, Residue, SystemParams, generate_form_prime, generate_keypair, key_gen, rekey
from mcescrow.mccurley import Ciphertext, decrypt, encrypt

from hostile import CORPUS
from oracles import brute_crt, brute_inverse, linear_dlog, naive_pow


@pytest.mark.criterion(1, "toy worked example (p=11, q=23, S=7, k=3, m=100) in < 1 s")
def test_toy_worked_example():
    start = time.perf_counter()
    # independent oracles first
    y = naive_pow(16, 7, 253)
    u, t = naive_pow(16, 3, 253), 100 * naive_pow(y, 3, 253) % 253
    m = t * brute_inverse(naive_pow(u, 7, 253), 253) % 253
    e_p = linear_dlog(16 % 11, y % 11, 11, 5)
    e_q = linear_dlog(16 % 23, y % 23, 23, 11)
    s_rec = brute_crt(e_p, 5, e_q, 11)
    assert (y, u, t, m, e_p, e_q, s_rec) == (179, 48, 104, 100, 2, 7, 7)

    public, private = key_gen(11, 23, random.Random(0), s=7, witness_p=3, witness_q=3)
    assert (public.n, public.y) == (253, 179)
    ct = encrypt(public, 100, random.Random(0), k=3)
    assert ct == Ciphertext(48, 104)
    assert decrypt(private, public, ct) == 100
    pkg = create_escrow(private, public)
    assert (pkg.n, pkg.factor) == (253, 11)
    report = verify_escrow(pkg, public, Policy.STRICT, PROFILES["toy"])
    assert report.ok and [c.code for c in report.checks] == list(CHECK_CODES)
    for alg in Algorithm:
        got = recover_secret(pkg, public, alg)
        assert (got.s_mod_order, got.order) == (7, 55)
        assert recover_and_decrypt(pkg, public, ct, alg) == 100
    assert time.perf_counter() - start < 1.0


@pytest.mark.criterion(2, "1000 desk round trips, 100% pass, < 30 s")
def test_round_trip_desk():
    rng = random.Random(2)
    start = time.perf_counter()
    failures = 0
    for _ in range(1000):
        public, private = generate_keypair(PROFILES["desk"], rng)
        assert public.n.bit_length() == 64
        while True:
            m = rng.randrange(1, public.n)
            if math.gcd(m, public.n) == 1:
                break
        failures += decrypt(private, public, encrypt(public, m, rng)) != m
    elapsed = time.perf_counter() - start
    assert failures == 0
    assert elapsed < 30.0, f"took {elapsed:.1f} s"


@pytest.mark.criterion(3, "recovery = S mod p'q' for 100 toy/desk keys, all algorithms agree, < 2 min")
def test_recovery_correctness():
    rng = random.Random(3)
    start = time.perf_counter()
    for i in range(100):
        profile = "toy" if i % 2 == 0 else "desk"
        public, private = generate_keypair(PROFILES[profile], rng)
        pkg = create_escrow(private, public)
        expected = private.s % private.order
        algorithms = list(Algorithm) if profile == "toy" else [Algorithm.BSGS, Algorithm.RHO]
        results = {alg: recover_secret(pkg, public, alg, seed=i).s_mod_order for alg in algorithms}
        assert set(results.values()) == {expected}, (profile, results, expected)
    elapsed = time.perf_counter() - start
    assert elapsed < 120.0, f"took {elapsed:.1f} s"


@pytest.mark.criterion(4, "independency: 100 rekeys keep the deposit byte-identical and recoverable")
def test_independency():
    rng = random.Random(4)
    public, private = generate_keypair(PROFILES["desk"], rng)
    original = formats.dump_escrow(create_escrow(private, public))
    pkg = formats.load_escrow(original)
    seen = {private.s}
    for _ in range(100):
        public, private = rekey(private, rng)
        assert private.s not in seen
        seen.add(private.s)
        assert formats.dump_escrow(create_escrow(private, public)) == original
        assert verify_escrow(pkg, public, Policy.STRICT, PROFILES["desk"]).ok
        assert recover_secret(pkg, public, Algorithm.BSGS).s_mod_order == private.s % private.order


@pytest.mark.criterion(5, "exhaustive vs BSGS vs rho on 500 prime-order instances below 2^20")
def test_solver_oracle_equivalence():
    rng = random.Random(5)
    params = SystemParams(modulus_bits=16, strict_plus_form=False)
    checked = 0
    while checked < 500:
        bits = rng.randint(3, 19)
        residue = rng.choice(list(Residue))
        try:
            p = generate_form_prime(bits + 1, residue, params, rng)
        except Exception:
            continue  # no form prime of that size in this residue class
        order = (p - 1) // 2
        assert order < 2**20
        base = 1
        while base == 1:
            base = pow(rng.randrange(2, p - 1), 2, p)
        inst = DlogInstance(base, pow(base, rng.randrange(order), p), p, order)
        expected = dlog_exhaustive(inst)
        assert dlog_bsgs(inst) == expected
        assert dlog_pollard_rho(inst, random.Random(checked)) == expected
        checked += 1


@pytest.mark.criterion(6, "BSGS partiality curve over {16..32} bits: ops within 2x of 2^(b/2+1), time increasing")
def test_partiality_curve():
    start = time.perf_counter()
    records = bench.run_partiality([16, 20, 24, 28, 32], 7, Algorithm.BSGS, seed=6)
    assert len(records) == 35
    medians = bench.medians(records)
    for bits, (_, ops) in medians.items():
        ideal = 2 ** (bits / 2 + 1)
        assert ideal / 2 <= ops <= 2 * ideal, (bits, ops, ideal)
    times = [wall for wall, _ in medians.values()]
    assert all(a < b for a, b in zip(times, times[1:])), times
    assert time.perf_counter() - start < 600


@pytest.mark.criterion(7, "hostile deposits each fail exactly their intended check, exit 1")
def test_hostile_verification(tmp_path, capsys):
    assert len(CORPUS) >= 10
    for label, n, factor, y, threshold, bits, expected in CORPUS:
        y = pow(16, 5, n) if y is None else y
        formats.write_text(tmp_path / "pkg", formats.dump_escrow(EscrowPackage(n, factor)))
        formats.write_text(tmp_path / "pub", formats.dump_public(PublicKey(n, y)))
        code = main([
            "escrow-verify", "--package", str(tmp_path / "pkg"), "--key", str(tmp_path / "pub"),
            "--policy", "strict", "--bits", str(bits or n.bit_length()), "--threshold-bits", str(threshold),
        ])
        out = capsys.readouterr().out
        failed = [line.split()[1] for line in out.splitlines() if line.split()[2] == "FAIL"]
        assert (code, failed) == (1, expected), label


@pytest.mark.criterion(8, "keygen --seed 42 --profile desk is byte-identical across runs")
def test_determinism(tmp_path):
    for run in ("a", "b"):
        subprocess.run(
            [sys.executable, "-m", "mcescrow", "keygen", "--seed", "42", "--profile", "desk", "--out-dir", str(tmp_path / run)],
            check=True,
            capture_output=True,
        )
    for name in ("key.pub", "key.priv"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q"]))
