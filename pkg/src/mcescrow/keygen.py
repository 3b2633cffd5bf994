"""McCurley-form primes, moduli and keypairs.

A modulus N = p*q uses primes of two shapes:

* p = 3 (mod 8), (p-1)/2 prime, (p+1)/4 has a large prime factor
* q = 7 (mod 8), (q-1)/2 prime, (q+1)/8 has a large prime factor

Under those conditions 16 has order p'*q' modulo N, with p' = (p-1)/2 and
q' = (q-1)/2. The secret S is independent of the factorization, so
:func:`rekey` can replace it without touching N.
"""

from __future__ import annotations

import enum
import itertools
import random
from dataclasses import dataclass, field, replace

from . import numtheory as nt
from .errors import GenerationExhausted, InvalidInput, InvalidPrimeForm, WorkBudgetExceeded

GENERATOR = 16

MIN_MODULUS_BITS = 8
# Above this many bits, (r+1)/4 is too big to factor; build primes around a known witness instead.
FACTORABLE_PRIME_BITS = 80
# Exhaustively enumerate candidate ranges at most this large instead of sampling.
ENUMERATE_LIMIT = 4096


class Residue(enum.Enum):
    P3MOD8 = 3
    Q7MOD8 = 7

    @property
    def plus_divisor(self) -> int:
        """Divisor d such that (r+1)/d must carry a large prime factor."""
        return 4 if self is Residue.P3MOD8 else 8


@dataclass(frozen=True)
class SystemParams:
    modulus_bits: int
    mr_rounds: int = 40
    factor_threshold_bits: int = 2
    strict_plus_form: bool = True
    max_attempts: int = 1_000_000
    factor_budget: int = nt.DEFAULT_RHO_BUDGET

    def __post_init__(self):
        if self.modulus_bits < MIN_MODULUS_BITS:
            raise InvalidInput(f"modulus_bits must be >= {MIN_MODULUS_BITS}, got {self.modulus_bits}")
        if self.mr_rounds < 1:
            raise InvalidInput("mr_rounds must be >= 1")
        if self.factor_threshold_bits < 1:
            raise InvalidInput("factor_threshold_bits must be >= 1")

    @classmethod
    def for_bits(cls, modulus_bits: int, **overrides) -> SystemParams:
        """Default parameters for an arbitrary modulus size."""
        threshold = max(2, modulus_bits // 4)
        if modulus_bits > 2 * FACTORABLE_PRIME_BITS:
            # plus-form checks rely on witnesses here; give up on factoring quickly
            overrides.setdefault("factor_budget", 1 << 12)
        return cls(modulus_bits=modulus_bits, factor_threshold_bits=threshold, **overrides)

    @classmethod
    def profile(cls, name: str) -> SystemParams:
        try:
            return PROFILES[name]
        except KeyError:
            raise InvalidInput(f"unknown profile {name!r}; choose from {sorted(PROFILES)}") from None


PROFILES = {
    "toy": SystemParams(modulus_bits=8, factor_threshold_bits=2),
    "desk": SystemParams.for_bits(64),
    "bench": SystemParams.for_bits(96),
    "production": SystemParams.for_bits(768),
}


@dataclass(frozen=True)
class PublicKey:
    n: int
    y: int


@dataclass(frozen=True)
class PrivateKey:
    p: int
    q: int
    s: int
    # prime witnesses that (p+1)/4 and (q+1)/8 have a large prime factor
    witness_p: int | None = field(default=None, compare=False)
    witness_q: int | None = field(default=None, compare=False)

    @property
    def n(self) -> int:
        return self.p * self.q

    @property
    def order(self) -> int:
        """Order of 16 modulo N."""
        return (self.p - 1) // 2 * ((self.q - 1) // 2)

    def public_key(self) -> PublicKey:
        return PublicKey(self.n, nt.mod_pow(GENERATOR, self.s, self.n))


@dataclass(frozen=True)
class ModulusFactors:
    p: int
    q: int
    witness_p: int | None = None
    witness_q: int | None = None

    @property
    def n(self) -> int:
        return self.p * self.q


def is_form_prime(r: int, residue: Residue, mr_rounds: int = 40, rng: random.Random | None = None) -> bool:
    """Residue class and safe-prime conditions (not the (r+1) condition)."""
    return (
        r % 8 == residue.value
        and nt.is_probable_prime(r, mr_rounds, rng)
        and nt.is_probable_prime((r - 1) // 2, mr_rounds, rng)
    )


def plus_form_witness(r: int, residue: Residue, params: SystemParams) -> int | None:
    """Largest prime factor of (r+1)/4 or (r+1)/8 if it meets the threshold, else None.

    Raises ``WorkBudgetExceeded`` when the cofactor cannot be factored in budget.
    """
    d = residue.plus_divisor
    if (r + 1) % d:
        return None
    cofactor = (r + 1) // d
    if cofactor < 2:
        return None
    largest = nt.largest_prime_factor(cofactor, params.factor_budget)
    return largest if largest.bit_length() >= params.factor_threshold_bits else None


def _sieved(n: int) -> bool:
    """Cheap pre-filter: False if n or (n-1)/2 has a small factor."""
    half = (n - 1) // 2
    for p in nt._SMALL_PRIMES[1:60]:
        if (n % p == 0 and n != p) or (half % p == 0 and half != p):
            return False
    return True


def _accept(r: int, residue: Residue, params: SystemParams, rng) -> tuple[bool, int | None]:
    if not _sieved(r) or not is_form_prime(r, residue, params.mr_rounds, rng):
        return False, None
    if not params.strict_plus_form:
        return True, None
    try:
        witness = plus_form_witness(r, residue, params)
    except WorkBudgetExceeded:
        return False, None
    return witness is not None, witness


def _sample_form_prime(bits: int, residue: Residue, params: SystemParams, rng) -> tuple[int, int | None]:
    lo = 1 << (bits - 1)
    first = lo + (residue.value - lo) % 8
    count = ((1 << bits) - 1 - first) // 8 + 1 if first < (1 << bits) else 0
    if count <= 0:
        raise GenerationExhausted(f"no {bits}-bit integers are {residue.value} mod 8")
    if count <= ENUMERATE_LIMIT:
        indices = iter(rng.sample(range(count), count))
    else:
        indices = (rng.randrange(count) for _ in itertools.count())
    for idx in itertools.islice(indices, params.max_attempts):
        candidate = first + 8 * idx
        ok, witness = _accept(candidate, residue, params, rng)
        if ok:
            return candidate, witness
    raise GenerationExhausted(
        f"no {bits}-bit {residue.name} prime with {params.factor_threshold_bits}-bit plus factor "
        f"after {min(count, params.max_attempts)} candidates"
    )


def _construct_form_prime(bits: int, residue: Residue, params: SystemParams, rng) -> tuple[int, int]:
    """Build r = d*w*j - 1 around a fresh prime witness w, so (r+1)/d has w as a factor."""
    d = residue.plus_divisor
    wbits = params.factor_threshold_bits
    if wbits + d.bit_length() + 1 > bits:
        raise GenerationExhausted(f"threshold of {wbits} bits does not fit a {bits}-bit prime")
    while True:
        w = rng.randrange(1 << (wbits - 1), 1 << wbits) | 1
        if w > 2 and nt.is_probable_prime(w, params.mr_rounds, rng):
            break
    step = d * w
    j_lo = -(-((1 << (bits - 1)) + 1) // step)
    j_hi = ((1 << bits)) // step
    if j_lo > j_hi:
        raise GenerationExhausted(f"no room for a {bits}-bit prime over a {wbits}-bit witness")
    for _ in range(params.max_attempts):
        j = rng.randint(j_lo, j_hi)
        if residue is Residue.P3MOD8 and j % 2 == 0:
            # (r+1)/4 must be odd for r = 3 (mod 8)
            continue
        candidate = step * j - 1
        if candidate.bit_length() != bits:
            continue
        if _sieved(candidate) and is_form_prime(candidate, residue, params.mr_rounds, rng):
            return candidate, w
    raise GenerationExhausted(f"no {bits}-bit {residue.name} prime after {params.max_attempts} attempts")


def generate_form_prime_with_witness(
    bits: int, residue: Residue, params: SystemParams, rng: random.Random
) -> tuple[int, int | None]:
    """Like :func:`generate_form_prime` but also returns the plus-form witness."""
    if bits < 4:
        raise InvalidInput(f"form primes need at least 4 bits, got {bits}")
    if params.strict_plus_form and bits > FACTORABLE_PRIME_BITS:
        return _construct_form_prime(bits, residue, params, rng)
    return _sample_form_prime(bits, residue, params, rng)


def generate_form_prime(bits: int, residue: Residue, params: SystemParams, rng: random.Random) -> int:
    """Random prime of exactly ``bits`` bits with McCurley form for ``residue``."""
    return generate_form_prime_with_witness(bits, residue, params, rng)[0]


def generate_modulus(params: SystemParams, rng: random.Random) -> ModulusFactors:
    """Primes p (3 mod 8) and q (7 mod 8) whose product has exactly ``modulus_bits`` bits.

    p gets half the bits; q gets half or half plus one, whichever lands N on
    the target length.
    """
    p_bits = params.modulus_bits // 2
    p, wp = generate_form_prime_with_witness(p_bits, Residue.P3MOD8, params, rng)
    half = params.modulus_bits - p_bits
    exhausted = set()
    for attempt in range(params.max_attempts):
        q_bits = half + attempt % 2
        if q_bits in exhausted:
            if len(exhausted) == 2:
                break
            continue
        try:
            q, wq = generate_form_prime_with_witness(q_bits, Residue.Q7MOD8, params, rng)
        except GenerationExhausted:
            exhausted.add(q_bits)
            continue
        if (p * q).bit_length() == params.modulus_bits:
            return ModulusFactors(p, q, wp, wq)
    raise GenerationExhausted(f"could not balance a {params.modulus_bits}-bit modulus around p = {p}")


def check_private_form(p: int, q: int, mr_rounds: int = 40) -> None:
    if not is_form_prime(p, Residue.P3MOD8, mr_rounds):
        raise InvalidPrimeForm(f"p = {p} is not a prime = 3 (mod 8) with (p-1)/2 prime")
    if not is_form_prime(q, Residue.Q7MOD8, mr_rounds):
        raise InvalidPrimeForm(f"q = {q} is not a prime = 7 (mod 8) with (q-1)/2 prime")


def _sample_secret(order: int, rng: random.Random, exclude: int | None = None) -> int:
    # full range [1, order); short exponents would make recovery cheap
    while True:
        s = rng.randrange(1, order)
        if s != exclude:
            return s


def key_gen(
    p: int,
    q: int,
    rng: random.Random,
    *,
    s: int | None = None,
    witness_p: int | None = None,
    witness_q: int | None = None,
) -> tuple[PublicKey, PrivateKey]:
    """Draw S uniformly from [1, p'q') and publish y = 16^S mod N.

    ``s`` pins the secret, for test vectors.
    """
    check_private_form(p, q)
    order = (p - 1) // 2 * ((q - 1) // 2)
    if s is None:
        s = _sample_secret(order, rng)
    elif not 1 <= s < order:
        raise InvalidInput(f"secret exponent must lie in [1, {order})")
    private = PrivateKey(p, q, s, witness_p, witness_q)
    return private.public_key(), private


def generate_keypair(params: SystemParams, rng: random.Random) -> tuple[PublicKey, PrivateKey]:
    factors = generate_modulus(params, rng)
    return key_gen(factors.p, factors.q, rng, witness_p=factors.witness_p, witness_q=factors.witness_q)


def rekey(private: PrivateKey, rng: random.Random, *, s: int | None = None) -> tuple[PublicKey, PrivateKey]:
    """Replace S with a fresh S' != S, keeping p, q and N."""
    order = private.order
    if order < 3:
        raise InvalidInput("subgroup too small to choose a different secret")
    if s is None:
        s = _sample_secret(order, rng, exclude=private.s)
    elif s == private.s or not 1 <= s < order:
        raise InvalidInput(f"new secret must differ from the old one and lie in [1, {order})")
    fresh = replace(private, s=s)
    return fresh.public_key(), fresh
