"""Verifiable partial key escrow on McCurley composite-modulus keys."""

from .dlog import Algorithm, DlogInstance, dlog_bsgs, dlog_exhaustive, dlog_pollard_rho
from .escrow import (
    EscrowPackage,
    Policy,
    RecoveredSecret,
    VerificationReport,
    create_escrow,
    recover_and_decrypt,
    recover_secret,
    verify_escrow,
)
from .keygen import PROFILES, PrivateKey, PublicKey, Residue, SystemParams, generate_keypair, key_gen, rekey
from .mccurley import Ciphertext, decode_message, decrypt, encode_message, encrypt

__version__ = "0.1.0"
