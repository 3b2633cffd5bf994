"""Command line interface.

Exit codes: 0 success, 1 verification failed, 2 bad input or file format,
3 work budget exhausted. Results go to stdout, diagnostics to stderr.
"""

from __future__ import annotations

import argparse
import dataclasses
import hashlib
import logging
import random
import sys
import time
from pathlib import Path
from typing import Sequence

from . import bench, formats
from . import numtheory as nt
from .dlog import DEFAULT_BSGS_MEMORY, DEFAULT_RHO_ITERATIONS, Algorithm
from .errors import BadInput, BudgetExceeded, EscrowError, VerificationFailed
from .escrow import Policy, create_escrow, recover_secret, verify_escrow
from .keygen import MIN_MODULUS_BITS, PROFILES, SystemParams, generate_keypair
from .mccurley import decode_message, decrypt, encode_message, encrypt

EXIT_OK = 0
EXIT_VERIFY_FAILED = 1
EXIT_BAD_INPUT = 2
EXIT_BUDGET = 3

log = logging.getLogger("mcescrow")


def _rng(seed: int | None) -> random.Random:
    return random.SystemRandom() if seed is None else random.Random(seed)


def fingerprint(n: int) -> str:
    return hashlib.sha256(nt.to_hex(n).encode("ascii")).hexdigest()[:8]


def _params(args: argparse.Namespace, fallback_bits: int | None = None) -> SystemParams:
    if getattr(args, "profile", None):
        params = SystemParams.profile(args.profile)
    elif getattr(args, "bits", None) is not None:
        params = SystemParams.for_bits(args.bits)
    else:
        params = SystemParams.for_bits(max(fallback_bits or MIN_MODULUS_BITS, MIN_MODULUS_BITS))
    threshold = getattr(args, "threshold_bits", None)
    if threshold is not None:
        params = dataclasses.replace(params, factor_threshold_bits=threshold)
    return params


def _bits_arg(text: str) -> int:
    value = int(text)
    if value < MIN_MODULUS_BITS:
        raise argparse.ArgumentTypeError(f"modulus needs at least {MIN_MODULUS_BITS} bits")
    return value


def _bits_list(text: str) -> list[int]:
    try:
        values = [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None
    if not values or any(v < 3 for v in values):
        raise argparse.ArgumentTypeError("subgroup sizes must be integers >= 3")
    return values


def cmd_keygen(args: argparse.Namespace) -> int:
    params = _params(args)
    public, private = generate_keypair(params, _rng(args.seed))
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    formats.write_text(out / f"{args.name}.pub", formats.dump_public(public))
    formats.write_text(out / f"{args.name}.priv", formats.dump_private(private))
    print(f"N_BITS = {public.n.bit_length()}")
    print(f"FINGERPRINT = {fingerprint(public.n)}")
    return EXIT_OK


def cmd_encrypt(args: argparse.Namespace) -> int:
    public = formats.load_public(formats.read_text(args.key))
    data = Path(args.input).read_bytes()
    if data[:1] == b"\x00":
        raise BadInput("message starts with a zero byte, which would not survive the round trip")
    m = encode_message(data, public.n)
    ct = encrypt(public, m, _rng(args.seed), k=args.k)
    formats.write_text(args.output, formats.dump_ciphertext(ct))
    return EXIT_OK


def cmd_decrypt(args: argparse.Namespace) -> int:
    private = formats.load_private(formats.read_text(args.key))
    ct = formats.load_ciphertext(formats.read_text(args.input))
    m = decrypt(private, private.public_key(), ct)
    Path(args.output).write_bytes(decode_message(m))
    return EXIT_OK


def cmd_escrow_create(args: argparse.Namespace) -> int:
    private = formats.load_private(formats.read_text(args.key))
    pkg = create_escrow(private, private.public_key())
    formats.write_text(args.output, formats.dump_escrow(pkg))
    print(f"FINGERPRINT = {fingerprint(pkg.n)}")
    return EXIT_OK


def cmd_escrow_verify(args: argparse.Namespace) -> int:
    pkg = formats.load_escrow(formats.read_text(args.package))
    public = formats.load_public(formats.read_text(args.key))
    params = _params(args, public.n.bit_length())
    report = verify_escrow(pkg, public, Policy(args.policy), params)
    for check in report.checks:
        print(f"CHECK {check.code} {'PASS' if check.passed else 'FAIL'} {check.detail}")
    return EXIT_OK if report.ok else EXIT_VERIFY_FAILED


def cmd_recover(args: argparse.Namespace) -> int:
    pkg = formats.load_escrow(formats.read_text(args.package))
    public = formats.load_public(formats.read_text(args.key))
    recovered = recover_secret(
        pkg,
        public,
        Algorithm(args.alg),
        seed=args.seed,
        workers=args.workers,
        memory_budget=args.memory_budget,
        max_iterations=args.max_iterations,
    )
    print(f"S_MOD_ORDER = {nt.to_hex(recovered.s_mod_order)}")
    print(f"ORDER = {nt.to_hex(recovered.order)}")
    for side in ("p", "q"):
        print(f"ELAPSED_{side.upper()}_MS = {recovered.timings[side] * 1000:.3f}")
    return EXIT_OK


def cmd_bench(args: argparse.Namespace) -> int:
    started = time.perf_counter()
    records = bench.run_partiality(args.bits, args.trials, Algorithm(args.alg), args.seed)
    text = bench.to_csv(records)
    if args.out == "-":
        sys.stdout.write(text)
    else:
        Path(args.out).write_text(text, encoding="ascii")
    for b, (wall, ops) in bench.medians(records).items():
        print(f"MEDIAN subgroup_bits={b} algorithm={args.alg} wall_time_ms={wall:.3f} group_ops={ops:g}")
    log.info("bench finished in %.1f s", time.perf_counter() - started)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="mcescrow", description="Verifiable partial key escrow over McCurley keys.")
    parser.add_argument("-v", "--verbose", action="store_true", help="log diagnostics to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    def size_options(p: argparse.ArgumentParser, required: bool) -> None:
        group = p.add_mutually_exclusive_group(required=required)
        group.add_argument("--profile", choices=sorted(PROFILES))
        group.add_argument("--bits", type=_bits_arg, help="modulus size in bits")

    p = sub.add_parser("keygen", help="generate a keypair")
    size_options(p, required=True)
    p.add_argument("--seed", type=int, help="deterministic generation (testing only)")
    p.add_argument("--out-dir", default=".")
    p.add_argument("--name", default="key", help="file stem for NAME.pub and NAME.priv")
    p.set_defaults(func=cmd_keygen)

    p = sub.add_parser("encrypt", help="encrypt a single-block message")
    p.add_argument("--key", required=True, help="public key file")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--out", dest="output", required=True)
    p.add_argument("--seed", type=int, help="seed for the ephemeral exponent (testing only)")
    p.add_argument("--k", type=int, help="fix the ephemeral exponent (testing only)")
    p.set_defaults(func=cmd_encrypt)

    p = sub.add_parser("decrypt", help="decrypt with a private key")
    p.add_argument("--key", required=True, help="private key file")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--out", dest="output", required=True)
    p.set_defaults(func=cmd_decrypt)

    p = sub.add_parser("escrow-create", help="build the escrow deposit from a private key")
    p.add_argument("--key", required=True, help="private key file")
    p.add_argument("--out", dest="output", required=True)
    p.set_defaults(func=cmd_escrow_create)

    p = sub.add_parser("escrow-verify", help="check a deposit against a public key")
    p.add_argument("--package", required=True)
    p.add_argument("--key", required=True, help="public key file")
    p.add_argument("--policy", choices=[x.value for x in Policy], default="strict")
    size_options(p, required=False)
    p.add_argument("--threshold-bits", type=int, help="override the plus-form factor threshold")
    p.set_defaults(func=cmd_escrow_verify)

    p = sub.add_parser("recover", help="recover S mod p'q' from a deposit")
    p.add_argument("--package", required=True)
    p.add_argument("--key", required=True, help="public key file")
    p.add_argument("--alg", choices=[a.value for a in Algorithm], default="bsgs")
    p.add_argument("--seed", type=int, default=0, help="seed for randomized solvers")
    p.add_argument("--workers", type=int, default=1, help="solve both sides in parallel when > 1")
    p.add_argument("--memory-budget", type=int, default=DEFAULT_BSGS_MEMORY, help="max BSGS table entries")
    p.add_argument("--max-iterations", type=int, default=DEFAULT_RHO_ITERATIONS, help="max rho group operations")
    p.set_defaults(func=cmd_recover)

    p = sub.add_parser("bench", help="time recovery across subgroup sizes")
    p.add_argument("--bits", type=_bits_list, required=True, help="comma-separated subgroup sizes")
    p.add_argument("--trials", type=int, default=5)
    p.add_argument("--alg", choices=[a.value for a in Algorithm], default="bsgs")
    p.add_argument("--seed", type=int)
    p.add_argument("--out", default="-", help="CSV path, '-' for stdout")
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        return args.func(args)
    except VerificationFailed as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VERIFY_FAILED
    except BudgetExceeded as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except (BadInput, EscrowError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BAD_INPUT


if __name__ == "__main__":
    sys.exit(main())
