"""ElGamal-style encryption in the subgroup of Z_N^* generated by 16.

Textbook scheme, single block, no padding: a ciphertext is
``(u, t) = (16^k, m * y^k) mod N`` and decryption computes ``t * (u^S)^-1``.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass

from . import numtheory as nt
from .errors import (
    InvalidInput,
    MalformedCiphertext,
    MessageNotCoprime,
    MessageTooLarge,
    ZeroMessage,
)
from .keygen import GENERATOR, PrivateKey, PublicKey


@dataclass(frozen=True)
class Ciphertext:
    u: int
    t: int


def check_plaintext(m: int, n: int) -> int:
    if m == 0:
        raise ZeroMessage("message must be non-zero")
    if m >= n:
        raise MessageTooLarge(f"message ({m.bit_length()} bits) must be smaller than the modulus")
    g = math.gcd(m, n)
    if g != 1:
        raise MessageNotCoprime(g)
    return m


def encode_message(data: bytes, n: int) -> int:
    """Big-endian integer of ``data``, validated as a plaintext for modulus ``n``."""
    if not data:
        raise InvalidInput("message must be non-empty")
    return check_plaintext(int.from_bytes(data, "big"), n)


def decode_message(m: int) -> bytes:
    return m.to_bytes(max(1, (m.bit_length() + 7) // 8), "big")


def encrypt(public: PublicKey, m: int, rng: random.Random, *, k: int | None = None) -> Ciphertext:
    """Encrypt plaintext ``m``.

    The ephemeral exponent is drawn from the full modulus width: the sender
    cannot know the order of 16 without factoring N. ``k`` pins it for test
    vectors.
    """
    n = public.n
    check_plaintext(m, n)
    if k is None:
        k = rng.randrange(1, 1 << n.bit_length())
    elif k < 1:
        raise InvalidInput("ephemeral exponent must be positive")
    u = nt.mod_pow(GENERATOR, k, n)
    t = m * nt.mod_pow(public.y, k, n) % n
    return Ciphertext(u, t)


def decrypt_with_exponent(s: int, n: int, ct: Ciphertext) -> int:
    """Decrypt using only the secret exponent and the modulus."""
    if not (1 <= ct.u < n and 1 <= ct.t < n):
        raise MalformedCiphertext("ciphertext components must lie in [1, N)")
    for name, value in (("u", ct.u), ("t", ct.t)):
        g = math.gcd(value, n)
        if g != 1:
            raise MalformedCiphertext(f"{name} is not a unit mod N; gcd({name}, N) = {g} is a factor of N", gcd=g)
    mask_inv = nt.mod_inv(nt.mod_pow(ct.u, s, n), n)
    return ct.t * mask_inv % n


def decrypt(private: PrivateKey, public: PublicKey, ct: Ciphertext) -> int:
    return decrypt_with_exponent(private.s, public.n, ct)
