"""Discrete logarithms in prime-order subgroups of Z_p^*.

Three solvers share one contract: return the smallest ``e`` in ``[0, order)``
with ``base^e = target (mod prime_modulus)``, or raise ``NotInSubgroup``.

* :func:`dlog_exhaustive` -- linear scan, the oracle for the other two
* :func:`dlog_bsgs` -- baby-step giant-step, O(sqrt(order)) time and memory
* :func:`dlog_pollard_rho` -- r-adding walk with distinguished points,
  O(sqrt(order)) expected time and small memory

Every solver accepts an optional :class:`OpCounter` that records the number
of group multiplications performed, so cost can be measured independently
of machine speed.
"""

from __future__ import annotations

import enum
import math
import random
from dataclasses import dataclass

from . import numtheory as nt
from .errors import InvalidInput, MemoryBudgetExceeded, NotFormPrime, NotInSubgroup, WorkBudgetExceeded
from .keygen import GENERATOR, Residue

DEFAULT_BSGS_MEMORY = 1 << 28
DEFAULT_RHO_ITERATIONS = 1 << 40
DEFAULT_PARTITIONS = 32


class Algorithm(enum.Enum):
    EXHAUSTIVE = "exhaustive"
    BSGS = "bsgs"
    RHO = "rho"


@dataclass
class OpCounter:
    group_ops: int = 0


@dataclass(frozen=True)
class DlogInstance:
    base: int
    target: int
    prime_modulus: int
    order: int

    def __post_init__(self):
        if self.prime_modulus < 2 or self.order < 1:
            raise InvalidInput("instance needs prime_modulus >= 2 and order >= 1")
        if not 1 <= self.target < self.prime_modulus:
            raise InvalidInput(f"target must lie in [1, {self.prime_modulus})")
        if pow(self.base, self.order, self.prime_modulus) != 1:
            raise InvalidInput(f"base^order != 1 mod {self.prime_modulus}")


def subgroup_order(r: int, residue: Residue) -> int:
    """Order of 16 modulo a form prime ``r``, i.e. (r-1)/2."""
    if r % 8 != residue.value:
        raise NotFormPrime(f"{r} is not {residue.value} mod 8")
    half = (r - 1) // 2
    if not (nt.is_probable_prime(r) and nt.is_probable_prime(half)):
        raise NotFormPrime(f"{r} is not a safe prime")
    if pow(GENERATOR, half, r) != 1 or GENERATOR % r == 1:
        raise NotFormPrime(f"16 does not have order {half} modulo {r}")
    return half


def _checked(inst: DlogInstance, e: int) -> int:
    if pow(inst.base, e, inst.prime_modulus) != inst.target:
        raise AssertionError(f"solver returned {e}, which does not satisfy the instance")
    return e


def dlog_exhaustive(inst: DlogInstance, counter: OpCounter | None = None) -> int:
    p = inst.prime_modulus
    acc = 1 % p
    for e in range(inst.order):
        if acc == inst.target:
            if counter is not None:
                counter.group_ops += e
            return e
        acc = acc * inst.base % p
    if counter is not None:
        counter.group_ops += inst.order
    raise NotInSubgroup(f"{inst.target} is not a power of {inst.base} mod {p}")


def dlog_bsgs(
    inst: DlogInstance,
    counter: OpCounter | None = None,
    memory_budget: int = DEFAULT_BSGS_MEMORY,
) -> int:
    """Baby-step giant-step.

    The baby table keeps the smallest exponent per element and giant steps
    run in increasing order, so the first hit is the smallest solution.
    """
    p, g, n = inst.prime_modulus, inst.base % inst.prime_modulus, inst.order
    m = math.isqrt(n - 1) + 1 if n > 1 else 1
    if m > memory_budget:
        raise MemoryBudgetExceeded(f"BSGS table of {m} entries exceeds budget of {memory_budget}")
    table: dict[int, int] = {}
    acc = 1 % p
    for j in range(m):
        table.setdefault(acc, j)
        acc = acc * g % p
    ops = m
    # acc is now g^m; one extra exponentiation for its inverse
    stride = pow(acc, -1, p) if acc else 0
    ops += 1
    gamma = inst.target
    giant_steps = -(-n // m)
    for i in range(giant_steps):
        j = table.get(gamma)
        if j is not None:
            if counter is not None:
                counter.group_ops += ops
            return _checked(inst, i * m + j)
        gamma = gamma * stride % p
        ops += 1
    if counter is not None:
        counter.group_ops += ops
    raise NotInSubgroup(f"{inst.target} is not a power of {inst.base} mod {p}")


def _distinguished_mask(order: int) -> int:
    # about sqrt(order)/32 steps between distinguished points
    shift = max(0, order.bit_length() // 2 - 5)
    return (1 << shift) - 1


def dlog_pollard_rho(
    inst: DlogInstance,
    rng: random.Random | None = None,
    counter: OpCounter | None = None,
    max_iterations: int = DEFAULT_RHO_ITERATIONS,
    partitions: int = DEFAULT_PARTITIONS,
) -> int:
    """Pollard rho for logarithms with an r-adding walk and distinguished points.

    Each walk element is tracked as ``base^a * target^b``. Two representations
    of the same distinguished point give ``e = (a1 - a2) / (b2 - b1)`` modulo
    the (prime) order. Walks that run too long without meeting a
    distinguished point are abandoned; degenerate collisions restart with
    fresh multipliers.
    """
    p, g, h, n = inst.prime_modulus, inst.base % inst.prime_modulus, inst.target, inst.order
    if h == 1 % p:
        return 0
    if pow(h, n, p) != 1 or g == 1:
        raise NotInSubgroup(f"{h} is not in the subgroup of order {n} mod {p}")
    if not nt.is_probable_prime(n):
        raise InvalidInput("Pollard rho needs a prime subgroup order")
    if rng is None:
        rng = random.Random(0)

    mask = _distinguished_mask(n)
    walk_cap = 20 * (mask + 1) + 64
    ops = 0
    try:
        while True:
            coeffs = [(rng.randrange(n), rng.randrange(n)) for _ in range(partitions)]
            steps = [pow(g, a, p) * pow(h, b, p) % p for a, b in coeffs]
            ops += 2 * partitions
            seen: dict[int, tuple[int, int]] = {}
            degenerate = False
            while not degenerate:
                a, b = rng.randrange(n), rng.randrange(n)
                x = pow(g, a, p) * pow(h, b, p) % p
                ops += 2
                for _ in range(walk_cap):
                    if not (x // partitions) & mask:
                        prior = seen.get(x)
                        if prior is None:
                            seen[x] = (a, b)
                        elif prior == (a, b):
                            # same representation twice carries no information
                            degenerate = True
                            break
                        else:
                            # order is prime and g != 1, so equal b forces equal a
                            a2, b2 = prior
                            e = (a2 - a) * pow(b - b2, -1, n) % n
                            return _checked(inst, e)
                    i = x % partitions
                    da, db = coeffs[i]
                    x = x * steps[i] % p
                    a = (a + da) % n
                    b = (b + db) % n
                    ops += 1
                    if ops > max_iterations:
                        raise WorkBudgetExceeded(f"rho exceeded {max_iterations} group operations")
    finally:
        if counter is not None:
            counter.group_ops += ops


def solve(
    inst: DlogInstance,
    algorithm: Algorithm,
    rng: random.Random | None = None,
    counter: OpCounter | None = None,
    memory_budget: int = DEFAULT_BSGS_MEMORY,
    max_iterations: int = DEFAULT_RHO_ITERATIONS,
) -> int:
    if algorithm is Algorithm.EXHAUSTIVE:
        return dlog_exhaustive(inst, counter)
    if algorithm is Algorithm.BSGS:
        return dlog_bsgs(inst, counter, memory_budget)
    return dlog_pollard_rho(inst, rng, counter, max_iterations)
