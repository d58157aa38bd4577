"""Exception hierarchy shared by every protocol module."""


class EcashError(Exception):
    """Base class for all errors raised by this package."""


# arithmetic / primitives
class ZeroInverse(EcashError, ZeroDivisionError):
    pass


class DegenerateInput(EcashError, ValueError):
    """PRF evaluated where 1 + k + x == 0 mod p."""


class TooManyMessages(EcashError, ValueError):
    pass


class EntropyUnavailable(EcashError, RuntimeError):
    pass


# proofs and signatures
class WitnessMismatch(EcashError, ValueError):
    """The prover's witness does not satisfy the statement."""


class MalformedProof(EcashError, ValueError):
    pass


class OutOfRange(EcashError, ValueError):
    pass


class InvalidSignature(EcashError):
    pass


class InvalidRegistration(EcashError):
    pass


# wire format
class Malformed(EcashError, ValueError):
    pass


class NonCanonical(Malformed):
    pass


class UnknownTag(Malformed):
    pass


# bank
class DuplicateIdentity(EcashError):
    pass


class RateLimited(EcashError):
    pass


class UnknownATM(EcashError):
    pass


class InvalidAbortSignature(EcashError):
    pass


class VerificationFailed(EcashError):
    def __init__(self, reason, message=None):
        super().__init__(message or reason)
        self.reason = reason


class DetectionAbort(EcashError):
    """Double-spend/issue detection hit a degenerate branch (equal randomness)."""


class InconsistentRecovery(EcashError):
    pass


# atm
class InsufficientBalance(EcashError):
    pass


class OutOfStock(EcashError):
    pass


class InvalidUserProof(EcashError):
    pass


class InvalidReceipt(EcashError):
    pass


class UnknownSession(EcashError, KeyError):
    pass


class AlreadyCompleted(EcashError):
    pass


class KeyExhausted(EcashError):
    pass


# wallet
class PromiseInvalid(EcashError):
    pass


class AtmWithheldCoin(EcashError):
    def __init__(self, abort_record):
        super().__init__("ATM did not release the coin after receiving the receipt")
        self.abort_record = abort_record


class CoinMismatch(EcashError):
    def __init__(self, abort_record, message="coin does not match the promise"):
        super().__init__(message)
        self.abort_record = abort_record


class AlreadySpent(EcashError):
    pass


class NotInPurse(EcashError, KeyError):
    pass


# harness
class ScriptError(EcashError, ValueError):
    pass
