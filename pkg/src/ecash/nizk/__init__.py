"""Non-interactive zero-knowledge proofs (Fiat-Shamir, random-oracle model)."""

from .rangeproof import prove_range, verify_range
from .sigma import Equation, LinearStatement, Proof, extract
from .statements import (
    CompactVoucherStatement,
    CompactVoucherWitness,
    SpendStatement,
    SpendWitness,
    VoucherStatement,
    VoucherWitness,
    prove_key_registration,
    prove_spend,
    prove_voucher,
    prove_voucher_compact,
    verify_key_registration,
    verify_spend,
    verify_voucher,
    verify_voucher_compact,
)
