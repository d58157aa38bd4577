"""Fiat-Shamir compiled sigma protocols for linear relations.

A statement is a conjunction of equations

    lhs_j = prod_i base_ji ^ w_ji

over named secret witnesses. Witnesses that appear in several equations share
one response, which is what ties e.g. "the key inside this commitment" to
"the key used in this PRF evaluation". Everything in this package compiles to
that shape.

Response convention: z_w = k_w + c * w, and the verifier checks
prod base^z == T_j * lhs^c for every equation.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from ..errors import MalformedProof, WitnessMismatch
from ..group import Group, GroupElement
from ..primitives import concat


@dataclass(frozen=True)
class Equation:
    lhs: GroupElement
    terms: tuple  # ((base, witness_name), ...)


@dataclass(frozen=True)
class Proof:
    """tag identifies the statement family; elements are auxiliary public
    group elements the prover contributes to the statement (re-randomised
    signatures, helper commitments, bit commitments)."""

    tag: int
    elements: tuple
    commitments: tuple
    challenge: int
    responses: tuple


@dataclass
class LinearStatement:
    group: Group
    tag: int
    label: bytes
    equations: list
    context: bytes = b""
    elements: tuple = ()
    witness_names: list = field(init=False)

    def __post_init__(self):
        names = []
        for eq in self.equations:
            for _, w in eq.terms:
                if w not in names:
                    names.append(w)
        self.witness_names = names

    # -- transcript -------------------------------------------------------
    def transcript(self, commitments) -> bytes:
        parts = [bytes([self.tag]), self.label, self.context]
        parts += [bytes(e) for e in self.elements]
        for eq in self.equations:
            parts.append(bytes(eq.lhs))
            for base, w in eq.terms:
                parts += [bytes(base), w.encode()]
        parts += [bytes(t) for t in commitments]
        return concat(*parts)

    def challenge(self, commitments) -> int:
        return self.group.hash_to_scalar(b"fs/" + self.label, self.transcript(commitments))

    # -- interactive phases -------------------------------------------------
    def holds(self, witness: dict) -> bool:
        return all(
            self.group.multiexp([b for b, _ in eq.terms], [witness[w] for _, w in eq.terms]) == eq.lhs
            for eq in self.equations
        )

    def commit(self, rng):
        nonces = {w: self.group.random_scalar(rng) for w in self.witness_names}
        commitments = tuple(
            self.group.multiexp([b for b, _ in eq.terms], [nonces[w] for _, w in eq.terms])
            for eq in self.equations
        )
        return nonces, commitments

    def respond(self, witness: dict, nonces: dict, c: int) -> tuple:
        p = self.group.order
        return tuple((nonces[w] + c * witness[w]) % p for w in self.witness_names)

    def check(self, commitments, c: int, responses) -> bool:
        if len(commitments) != len(self.equations) or len(responses) != len(self.witness_names):
            raise MalformedProof("proof shape does not match the statement")
        z = dict(zip(self.witness_names, responses))
        for eq, t in zip(self.equations, commitments):
            lhs = self.group.multiexp([b for b, _ in eq.terms], [z[w] for _, w in eq.terms])
            if lhs != t * eq.lhs ** c:
                return False
        return True

    # -- non-interactive ----------------------------------------------------
    def prove(self, witness: dict, rng) -> Proof:
        missing = set(self.witness_names) - set(witness)
        if missing:
            raise WitnessMismatch(f"missing witnesses: {sorted(missing)}")
        if not self.holds(witness):
            raise WitnessMismatch(f"witness does not satisfy {self.label.decode()}")
        nonces, commitments = self.commit(rng)
        c = self.challenge(commitments)
        return Proof(self.tag, tuple(self.elements), commitments, c, self.respond(witness, nonces, c))

    def verify(self, proof: Proof) -> bool:
        if proof.tag != self.tag:
            raise MalformedProof(f"expected tag {self.tag}, got {proof.tag}")
        if tuple(proof.elements) != tuple(self.elements):
            return False
        if proof.challenge != self.challenge(proof.commitments):
            return False
        return self.check(proof.commitments, proof.challenge, proof.responses)

    def simulate(self, c: int, rng) -> Proof:
        """Transcript with a chosen challenge, built without the witness."""
        responses = tuple(self.group.random_scalar(rng) for _ in self.witness_names)
        z = dict(zip(self.witness_names, responses))
        commitments = tuple(
            self.group.multiexp([b for b, _ in eq.terms], [z[w] for _, w in eq.terms]) / eq.lhs ** c
            for eq in self.equations
        )
        return Proof(self.tag, tuple(self.elements), commitments, c, responses)


def extract(statement: LinearStatement, c1: int, z1, c2: int, z2) -> dict:
    """Special-soundness extractor from two accepting transcripts sharing
    their first message."""
    p = statement.group.order
    if (c1 - c2) % p == 0:
        raise ValueError("challenges must differ")
    inv = pow((c1 - c2) % p, -1, p)
    return {w: (a - b) * inv % p for w, a, b in zip(statement.witness_names, z1, z2)}
