"""Line-oriented ASCII file formats for keys, ciphertexts and escrow deposits.

Each file is a header line followed by ``name = <hex>`` lines, LF-terminated,
with values in lowercase big-endian hex without leading zeros. Field order is
fixed; optional fields may be omitted but not reordered.
"""

from __future__ import annotations

from pathlib import Path

from . import numtheory as nt
from .errors import FormatError, InvalidInput
from .escrow import EscrowPackage
from .keygen import PrivateKey, PublicKey
from .mccurley import Ciphertext

PUBLIC_HEADER = "MCCURLEY-PUBLIC-KEY v1"
PRIVATE_HEADER = "MCCURLEY-PRIVATE-KEY v1"
ESCROW_HEADER = "MCCURLEY-ESCROW v1"
CIPHERTEXT_HEADER = "MCCURLEY-CIPHERTEXT v1"

# header -> (required fields, optional trailing fields)
LAYOUTS = {
    PUBLIC_HEADER: (("n", "y"), ()),
    PRIVATE_HEADER: (("n", "p", "q", "s"), ("wp", "wq")),
    ESCROW_HEADER: (("n", "factor"), ("wp", "wq")),
    CIPHERTEXT_HEADER: (("u", "t"), ()),
}


def emit(header: str, fields: dict[str, int | None]) -> str:
    required, optional = LAYOUTS[header]
    lines = [header]
    for name in required + optional:
        value = fields.get(name)
        if value is None:
            if name in required:
                raise InvalidInput(f"missing required field {name!r}")
            continue
        lines.append(f"{name} = {nt.to_hex(value)}")
    return "\n".join(lines) + "\n"


def parse(text: str, header: str) -> dict[str, int]:
    if not text.endswith("\n"):
        raise FormatError("file must end with a newline (truncated?)")
    if "\r" in text:
        raise FormatError("CR characters are not allowed; use LF line endings")
    lines = text[:-1].split("\n")
    if lines[0] != header:
        raise FormatError(f"expected header {header!r}, got {lines[0][:40]!r}")
    required, optional = LAYOUTS[header]
    order = required + optional
    fields: dict[str, int] = {}
    position = 0
    for lineno, line in enumerate(lines[1:], start=2):
        name, sep, value = line.partition(" = ")
        if not sep:
            raise FormatError(f"line {lineno}: expected 'name = hex'")
        if name not in order:
            raise FormatError(f"line {lineno}: unknown field {name!r}")
        idx = order.index(name)
        if idx < position or name in fields:
            raise FormatError(f"line {lineno}: field {name!r} out of order or repeated")
        position = idx + 1
        try:
            fields[name] = nt.from_hex(value)
        except InvalidInput as exc:
            raise FormatError(f"line {lineno}: {exc}") from None
    missing = [name for name in required if name not in fields]
    if missing:
        raise FormatError(f"missing field(s): {', '.join(missing)}")
    return fields


def dump_public(key: PublicKey) -> str:
    return emit(PUBLIC_HEADER, {"n": key.n, "y": key.y})


def load_public(text: str) -> PublicKey:
    f = parse(text, PUBLIC_HEADER)
    return PublicKey(f["n"], f["y"])


def dump_private(key: PrivateKey) -> str:
    return emit(
        PRIVATE_HEADER,
        {"n": key.n, "p": key.p, "q": key.q, "s": key.s, "wp": key.witness_p, "wq": key.witness_q},
    )


def load_private(text: str) -> PrivateKey:
    f = parse(text, PRIVATE_HEADER)
    if f["p"] * f["q"] != f["n"]:
        raise FormatError("private key is inconsistent: n != p*q")
    return PrivateKey(f["p"], f["q"], f["s"], f.get("wp"), f.get("wq"))


def dump_escrow(pkg: EscrowPackage) -> str:
    return emit(ESCROW_HEADER, {"n": pkg.n, "factor": pkg.factor, "wp": pkg.witness_p, "wq": pkg.witness_q})


def load_escrow(text: str) -> EscrowPackage:
    f = parse(text, ESCROW_HEADER)
    return EscrowPackage(f["n"], f["factor"], f.get("wp"), f.get("wq"))


def dump_ciphertext(ct: Ciphertext) -> str:
    return emit(CIPHERTEXT_HEADER, {"u": ct.u, "t": ct.t})


def load_ciphertext(text: str) -> Ciphertext:
    f = parse(text, CIPHERTEXT_HEADER)
    return Ciphertext(f["u"], f["t"])


def read_text(path: str | Path) -> str:
    try:
        raw = Path(path).read_bytes()
    except OSError as exc:
        raise FormatError(f"cannot read {path}: {exc.strerror}") from None
    try:
        return raw.decode("ascii")
    except UnicodeDecodeError:
        raise FormatError(f"{path} is not ASCII") from None


def write_text(path: str | Path, text: str) -> None:
    Path(path).write_bytes(text.encode("ascii"))
