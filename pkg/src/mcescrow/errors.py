"""Exception hierarchy shared by every module.

The CLI maps these classes onto its exit codes, so the grouping below matters:
``BadInput`` -> 2, ``VerificationFailed`` -> 1, ``BudgetExceeded`` -> 3.
"""


class EscrowError(Exception):
    """Base class for all errors raised by this package."""


class BadInput(EscrowError, ValueError):
    """Caller supplied a value outside an operation's domain."""


class VerificationFailed(EscrowError):
    """An escrow deposit or public value failed an honesty check."""


class BudgetExceeded(EscrowError):
    """A configured work or memory cap was hit before an answer was found."""


class InvalidModulus(BadInput):
    pass


class InvalidInput(BadInput):
    pass


class NotCoprime(BadInput):
    def __init__(self, gcd: int, message: str | None = None):
        self.gcd = gcd
        super().__init__(message or f"not invertible: gcd = {gcd}")


class NotCoprimeModuli(BadInput):
    def __init__(self, gcd: int):
        self.gcd = gcd
        super().__init__(f"CRT moduli share a factor: gcd = {gcd}")


class WorkBudgetExceeded(BudgetExceeded):
    pass


class MemoryBudgetExceeded(BudgetExceeded):
    pass


class GenerationExhausted(BudgetExceeded):
    """No prime of the requested form was found within the attempt cap."""


class InvalidPrimeForm(BadInput):
    pass


class MessageTooLarge(BadInput):
    pass


class ZeroMessage(BadInput):
    pass


class MessageNotCoprime(NotCoprime):
    def __init__(self, gcd: int):
        super().__init__(gcd, f"message shares factor {gcd} with the modulus")


class MalformedCiphertext(BadInput):
    def __init__(self, message: str, gcd: int | None = None):
        self.gcd = gcd
        super().__init__(message)


class NotFormPrime(BadInput):
    pass


class NotInSubgroup(EscrowError):
    pass


class KeyMismatch(BadInput):
    pass


class MalformedPublicValue(VerificationFailed):
    pass


class EscrowRejected(VerificationFailed):
    """Recovery refused because the deposit failed basic verification."""

    def __init__(self, report):
        self.report = report
        failed = ", ".join(report.failed_codes()) or "unknown"
        super().__init__(f"escrow package failed verification: {failed}")


class FormatError(BadInput):
    """A key, ciphertext or escrow file could not be parsed."""
