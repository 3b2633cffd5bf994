import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mcescrow import numtheory as nt
from mcescrow.errors import GenerationExhausted, InvalidInput, InvalidPrimeForm
from mcescrow.keygen import (
    PROFILES,
    PrivateKey,
    Residue,
    SystemParams,
    generate_form_prime,
    generate_form_prime_with_witness,
    generate_keypair,
    generate_modulus,
    is_form_prime,
    plus_form_witness,
    key_gen,
    rekey,
)

from oracles import multiplicative_order, naive_pow, smallest_form_prime


def test_profiles():
    assert PROFILES["toy"].modulus_bits == 8
    assert PROFILES["desk"].modulus_bits == 64
    assert PROFILES["bench"].modulus_bits == 96
    assert PROFILES["production"].modulus_bits == 768
    assert PROFILES["production"].factor_threshold_bits == 192
    assert PROFILES["toy"].factor_threshold_bits == 2
    with pytest.raises(InvalidInput):
        SystemParams(modulus_bits=7)
    with pytest.raises(InvalidInput):
        SystemParams.profile("huge")


class TestFormPrimes:
    def test_smallest_toy_primes(self, toy_params):
        # exhaustive scans fix the smallest admissible primes
        assert smallest_form_prime(3, 4, 2) == 11
        assert smallest_form_prime(7, 8, 2) == 23
        assert generate_form_prime(4, Residue.P3MOD8, toy_params, random.Random(0)) == 11
        assert generate_form_prime(5, Residue.Q7MOD8, toy_params, random.Random(0)) == 23

    def test_seven_is_rejected(self, toy_params):
        # 7 = 7 mod 8 and 3 is prime, but (7+1)/8 = 1 has no prime factor
        assert is_form_prime(7, Residue.Q7MOD8)
        assert plus_form_witness(7, Residue.Q7MOD8, toy_params) is None
        assert plus_form_witness(23, Residue.Q7MOD8, toy_params) == 3

    def test_no_four_bit_q(self, toy_params):
        # the only 4-bit candidate is 15
        with pytest.raises(GenerationExhausted):
            generate_form_prime(4, Residue.Q7MOD8, toy_params, random.Random(0))

    def test_too_few_bits(self, toy_params):
        with pytest.raises(InvalidInput):
            generate_form_prime(3, Residue.P3MOD8, toy_params, random.Random(0))

    @pytest.mark.parametrize("residue", list(Residue))
    @pytest.mark.parametrize("bits", [12, 24, 32, 40])
    def test_form_conditions(self, residue, bits):
        params = SystemParams.for_bits(2 * bits)
        r, witness = generate_form_prime_with_witness(bits, residue, params, random.Random(bits))
        assert r.bit_length() == bits
        assert r % 8 == residue.value
        assert nt.is_probable_prime(r) and nt.is_probable_prime((r - 1) // 2)
        cofactor = (r + 1) // residue.plus_divisor
        assert (r + 1) % residue.plus_divisor == 0
        assert witness == nt.largest_prime_factor(cofactor)
        assert witness.bit_length() >= params.factor_threshold_bits

    @pytest.mark.parametrize("residue", list(Residue))
    def test_constructed_primes_carry_witness(self, residue):
        params = SystemParams.for_bits(256)
        r, witness = generate_form_prime_with_witness(128 + 8, residue, params, random.Random(5))
        assert r.bit_length() == 136 and r % 8 == residue.value
        assert nt.is_probable_prime(r, 20, random.Random(0))
        assert nt.is_probable_prime((r - 1) // 2, 20, random.Random(0))
        assert ((r + 1) // residue.plus_divisor) % witness == 0
        assert witness.bit_length() == params.factor_threshold_bits

    def test_infeasible_threshold(self):
        params = SystemParams(modulus_bits=16, factor_threshold_bits=8, max_attempts=500)
        with pytest.raises(GenerationExhausted):
            generate_form_prime(8, Residue.P3MOD8, params, random.Random(0))


class TestModulus:
    def test_toy_is_253(self, toy_params):
        for seed in range(5):
            f = generate_modulus(toy_params, random.Random(seed))
            assert (f.p, f.q, f.n) == (11, 23, 253)

    @pytest.mark.parametrize("profile", ["toy", "desk", "bench"])
    def test_exact_size_and_balance(self, profile):
        params = PROFILES[profile]
        f = generate_modulus(params, random.Random(1))
        assert f.n.bit_length() == params.modulus_bits
        assert f.p != f.q
        assert f.p % 8 == 3 and f.q % 8 == 7
        for r in (f.p, f.q):
            assert abs(2 * r.bit_length() - params.modulus_bits) <= 2

    def test_production_size(self):
        f = generate_modulus(PROFILES["production"], random.Random(768))
        assert f.n.bit_length() == 768
        assert ((f.p + 1) // 4) % f.witness_p == 0
        assert ((f.q + 1) // 8) % f.witness_q == 0

    def test_reproducible(self):
        a = generate_modulus(PROFILES["desk"], random.Random(42))
        b = generate_modulus(PROFILES["desk"], random.Random(42))
        assert a == b


class TestKeyGen:
    def test_worked_example(self):
        assert naive_pow(16, 7, 253) == 179
        public, private = key_gen(11, 23, random.Random(0), s=7)
        assert (public.n, public.y) == (253, 179)
        assert private.order == 55

    def test_exponent_one(self):
        public, _ = key_gen(11, 23, random.Random(0), s=1)
        assert public.y == 16

    def test_order_of_16(self):
        assert multiplicative_order(16, 253) == 55

    @pytest.mark.parametrize("p, q", [(13, 23), (11, 31), (19, 23), (23, 11)])
    def test_rejects_bad_form(self, p, q):
        with pytest.raises(InvalidPrimeForm):
            key_gen(p, q, random.Random(0))

    def test_rejects_out_of_range_secret(self):
        with pytest.raises(InvalidInput):
            key_gen(11, 23, random.Random(0), s=55)

    @settings(max_examples=25, deadline=None)
    @given(st.integers(0, 2**32))
    def test_order_of_generator_is_full(self, seed):
        _, private = generate_keypair(SystemParams.for_bits(40), random.Random(seed))
        p, q, n = private.p, private.q, private.n
        pp, qq = (p - 1) // 2, (q - 1) // 2
        assert pow(16, pp * qq, n) == 1
        assert pow(16, qq, n) != 1  # (p'q')/p'
        assert pow(16, pp, n) != 1  # (p'q')/q'
        assert pow(16, pp, p) == 1 and 16 % p != 1
        assert pow(16, qq, q) == 1 and 16 % q != 1
        assert 1 <= private.s < pp * qq

    def test_secret_uses_full_range(self):
        rng = random.Random(3)
        secrets = [key_gen(11, 23, rng)[1].s for _ in range(2000)]
        assert min(secrets) == 1 and max(secrets) == 54


class TestRekey:
    def test_worked_example(self, toy_keys):
        public, private = toy_keys
        new_public, new_private = rekey(private, random.Random(0), s=12)
        assert naive_pow(16, 12, 253) == 223
        assert new_public.y == 223
        assert new_public.n == public.n == 253
        assert (new_private.p, new_private.q) == (11, 23)

    def test_same_secret_refused(self, toy_keys):
        with pytest.raises(InvalidInput):
            rekey(toy_keys[1], random.Random(0), s=7)

    def test_always_fresh(self, toy_keys):
        _, private = toy_keys
        rng = random.Random(9)
        for _ in range(500):
            _, fresh = rekey(private, rng)
            assert fresh.s != private.s
            assert (fresh.p, fresh.q, fresh.n) == (private.p, private.q, private.n)
            private = fresh

    def test_keeps_witnesses(self, desk_keys):
        _, private = desk_keys
        _, fresh = rekey(private, random.Random(1))
        assert (fresh.witness_p, fresh.witness_q) == (private.witness_p, private.witness_q)


def test_private_key_public_view():
    key = PrivateKey(11, 23, 7)
    assert key.n == 253
    assert key.public_key().y == 179
