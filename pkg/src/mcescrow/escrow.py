"""Escrow deposit, TTP-side verification, and secret recovery.

The user deposits one prime factor of N. The secret exponent S is never part
of the deposit, so recovering it still costs two discrete logarithms (one
modulo each prime), and the user may rekey at will without contacting the
escrow agent.
"""

from __future__ import annotations

import enum
import math
import random
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

from . import numtheory as nt
from .dlog import (
    DEFAULT_BSGS_MEMORY,
    DEFAULT_RHO_ITERATIONS,
    Algorithm,
    DlogInstance,
    OpCounter,
    solve,
    subgroup_order,
)
from .errors import (
    EscrowRejected,
    KeyMismatch,
    MalformedPublicValue,
    NotFormPrime,
    NotInSubgroup,
    WorkBudgetExceeded,
)
from .keygen import GENERATOR, PrivateKey, PublicKey, Residue, SystemParams
from .mccurley import Ciphertext, decrypt_with_exponent


class Policy(enum.Enum):
    BASIC = "basic"
    STRICT = "strict"


CHECK_CODES = (
    "FACTOR_NONTRIVIAL",
    "FACTOR_DIVIDES",
    "P_PRIME",
    "Q_PRIME",
    "P_RESIDUE",
    "Q_RESIDUE",
    "P_SAFE",
    "Q_SAFE",
    "P_PLUS_FORM",
    "Q_PLUS_FORM",
    "SIZE_BOUNDS",
    "Y_IN_SUBGROUP",
)
BASIC_CODES = CHECK_CODES[:4]


@dataclass(frozen=True)
class EscrowPackage:
    n: int
    factor: int
    witness_p: int | None = None
    witness_q: int | None = None


@dataclass(frozen=True)
class CheckResult:
    code: str
    passed: bool
    detail: str


@dataclass
class VerificationReport:
    policy: Policy
    checks: list[CheckResult] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        required = BASIC_CODES if self.policy is Policy.BASIC else CHECK_CODES
        ran = {c.code for c in self.checks}
        return all(c.passed for c in self.checks) and ran.issuperset(required)

    def failed_codes(self) -> list[str]:
        return [c.code for c in self.checks if not c.passed]

    def add(self, code: str, passed: bool, detail: str) -> bool:
        self.checks.append(CheckResult(code, passed, detail))
        return passed


@dataclass(frozen=True)
class RecoveredSecret:
    s_mod_order: int
    order: int
    # wall-clock seconds per prime-side logarithm, keyed "p" and "q"
    timings: dict = field(default_factory=dict, compare=False)


def create_escrow(private: PrivateKey, public: PublicKey) -> EscrowPackage:
    if private.p * private.q != public.n:
        raise KeyMismatch("p*q does not equal the public modulus")
    if nt.mod_pow(GENERATOR, private.s, public.n) != public.y:
        raise KeyMismatch("public value is not 16^S mod N")
    return EscrowPackage(public.n, private.p, private.witness_p, private.witness_q)


def _split(pkg: EscrowPackage) -> tuple[int, int]:
    """Return (p, q) with the deposited factor assigned by residue class."""
    p, q = pkg.factor, pkg.n // pkg.factor
    if p % 8 == Residue.Q7MOD8.value and q % 8 == Residue.P3MOD8.value:
        p, q = q, p
    return p, q


def _plus_form_check(r: int, residue: Residue, witness: int | None, params: SystemParams) -> tuple[bool, str]:
    d = residue.plus_divisor
    if (r + 1) % d:
        return False, f"{d} does not divide r+1"
    cofactor = (r + 1) // d
    need = params.factor_threshold_bits
    if witness is not None:
        if cofactor % witness or not nt.is_probable_prime(witness, params.mr_rounds):
            return False, f"witness {nt.to_hex(witness)} is not a prime factor of (r+1)/{d}"
        if witness.bit_length() < need:
            return False, f"witness has {witness.bit_length()} bits, need {need}"
        return True, f"witness prime of {witness.bit_length()} bits divides (r+1)/{d}"
    if cofactor < 2:
        return False, f"(r+1)/{d} = {cofactor} has no prime factor"
    try:
        largest = nt.largest_prime_factor(cofactor, params.factor_budget)
    except WorkBudgetExceeded:
        return False, f"SKIPPED: no witness and (r+1)/{d} is too large to factor"
    if largest.bit_length() < need:
        return False, f"largest prime factor of (r+1)/{d} has {largest.bit_length()} bits, need {need}"
    return True, f"largest prime factor of (r+1)/{d} has {largest.bit_length()} bits"


def verify_escrow(
    pkg: EscrowPackage,
    public: PublicKey,
    policy: Policy,
    params: SystemParams,
    rng: random.Random | None = None,
) -> VerificationReport:
    """Check a deposit against a public key.

    Never raises on hostile input: every problem becomes a failing check.
    Stops early only where later checks would be meaningless (no cofactor,
    or a composite prime).
    """
    report = VerificationReport(policy)
    n, factor = pkg.n, pkg.factor
    if not report.add("FACTOR_NONTRIVIAL", 1 < factor < n, f"factor has {factor.bit_length()} bits"):
        return report
    if pkg.n != public.n:
        report.add("FACTOR_DIVIDES", False, "package modulus differs from the public key")
        return report
    if not report.add("FACTOR_DIVIDES", n % factor == 0, "factor divides N" if n % factor == 0 else "factor does not divide N"):
        return report

    p, q = _split(pkg)
    rounds = params.mr_rounds
    p_ok = report.add("P_PRIME", nt.is_probable_prime(p, rounds, rng), f"p has {p.bit_length()} bits")
    q_ok = report.add("Q_PRIME", nt.is_probable_prime(q, rounds, rng), f"q = N/factor has {q.bit_length()} bits")
    if policy is Policy.BASIC or not (p_ok and q_ok):
        return report

    report.add("P_RESIDUE", p % 8 == 3, f"p = {p % 8} mod 8")
    report.add("Q_RESIDUE", q % 8 == 7, f"q = {q % 8} mod 8")
    report.add("P_SAFE", nt.is_probable_prime((p - 1) // 2, rounds, rng), "(p-1)/2 primality")
    report.add("Q_SAFE", nt.is_probable_prime((q - 1) // 2, rounds, rng), "(q-1)/2 primality")
    report.add("P_PLUS_FORM", *_plus_form_check(p, Residue.P3MOD8, pkg.witness_p, params))
    report.add("Q_PLUS_FORM", *_plus_form_check(q, Residue.Q7MOD8, pkg.witness_q, params))
    # each prime within one bit of half the modulus size
    sizes_ok = all(abs(2 * r.bit_length() - params.modulus_bits) <= 2 for r in (p, q))
    report.add(
        "SIZE_BOUNDS",
        sizes_ok,
        f"p has {p.bit_length()} bits, q has {q.bit_length()} bits, expected {params.modulus_bits / 2:g} +- 1",
    )
    order = (p - 1) // 2 * ((q - 1) // 2)
    in_subgroup = 0 < public.y < n and pow(public.y, order, n) == 1
    report.add("Y_IN_SUBGROUP", in_subgroup, "y^(p'q') = 1 mod N" if in_subgroup else "y^(p'q') != 1 mod N")
    return report


def _solve_side(
    r: int, residue: Residue, y: int, algorithm: Algorithm, seed: int, budgets: tuple[int, int]
) -> tuple[int, int, float]:
    order = subgroup_order(r, residue)
    target = y % r
    if target == 0:
        raise MalformedPublicValue("y is divisible by a prime factor of N")
    start = time.perf_counter()
    try:
        inst = DlogInstance(GENERATOR % r, target, r, order)
        e = solve(inst, algorithm, random.Random(seed), OpCounter(), *budgets)
    except NotInSubgroup as exc:
        raise MalformedPublicValue("y is not a power of 16 modulo N") from exc
    return e, order, time.perf_counter() - start


def recover_secret(
    pkg: EscrowPackage,
    public: PublicKey,
    algorithm: Algorithm,
    params: SystemParams | None = None,
    *,
    seed: int = 0,
    workers: int = 1,
    memory_budget: int = DEFAULT_BSGS_MEMORY,
    max_iterations: int = DEFAULT_RHO_ITERATIONS,
) -> RecoveredSecret:
    """Recover S mod p'q' from the deposit and the public key alone.

    Solves one logarithm modulo each prime and joins them with CRT. With
    ``workers > 1`` the two sides run in separate processes; the answer is
    the same either way.
    """
    if params is None:
        params = SystemParams.for_bits(max(public.n.bit_length(), 8))
    report = verify_escrow(pkg, public, Policy.BASIC, params)
    if not report.ok:
        raise EscrowRejected(report)
    p, q = _split(pkg)
    if math.gcd(public.y, public.n) != 1:
        raise MalformedPublicValue("y shares a factor with N")
    budgets = (memory_budget, max_iterations)
    jobs = [
        (p, Residue.P3MOD8, public.y, algorithm, seed, budgets),
        (q, Residue.Q7MOD8, public.y, algorithm, seed + 1, budgets),
    ]
    try:
        if workers > 1:
            with ProcessPoolExecutor(max_workers=2) as pool:
                (e_p, ord_p, t_p), (e_q, ord_q, t_q) = pool.map(_solve_side, *zip(*jobs))
        else:
            (e_p, ord_p, t_p), (e_q, ord_q, t_q) = (_solve_side(*job) for job in jobs)
    except NotFormPrime as exc:
        raise MalformedPublicValue(f"factor is not a McCurley-form prime: {exc}") from exc
    s = nt.crt_pair(e_p, ord_p, e_q, ord_q)
    if nt.mod_pow(GENERATOR, s, public.n) != public.y:
        raise AssertionError("recovered exponent does not reproduce y")
    return RecoveredSecret(s, ord_p * ord_q, {"p": t_p, "q": t_q})


def recover_and_decrypt(
    pkg: EscrowPackage,
    public: PublicKey,
    ct: Ciphertext,
    algorithm: Algorithm,
    params: SystemParams | None = None,
) -> int:
    recovered = recover_secret(pkg, public, algorithm, params)
    return decrypt_with_exponent(recovered.s_mod_order, public.n, ct)
