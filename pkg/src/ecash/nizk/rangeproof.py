"""Range proof for a committed counter: J = g1^ctr * g'^b with 1 <= ctr <= n.

Bit decomposition. With v = ctr - 1 and L = ceil(log2 n), the prover commits
to the L bits of v, proves each bit is 0 or 1 with a CDS OR-proof, and proves
the weighted product of bit commitments matches J / g1 up to a g' power.
When n is not a power of two a second decomposition of v + 2^L - n covers the
upper bound. All sub-proofs share one Fiat-Shamir challenge.
"""

from __future__ import annotations

from dataclasses import dataclass

from ..errors import MalformedProof, OutOfRange
from ..params import Params
from ..primitives import concat
from .sigma import Proof
from .statements import TAG_RANGE


def bit_length(n: int) -> int:
    return max(1, (n - 1).bit_length())


def _targets(params: Params, J, n: int):
    """Commitments whose opening must lie in [0, 2^L)."""
    g1 = params.gens.gs[0]
    L = bit_length(n)
    base = J / g1
    out = [base]
    if (1 << L) != n:
        out.append(base * g1 ** ((1 << L) - n))
    return L, out


def _challenge(params: Params, J, n, bit_coms, commitments) -> int:
    parts = [b"range", params.group.encode_scalar(n), bytes(J)]
    parts += [bytes(b) for b in bit_coms] + [bytes(t) for t in commitments]
    return params.group.hash_to_scalar(b"fs/range", concat(*parts))


@dataclass
class _ProverState:
    bit_coms: list
    commitments: list
    bits: list
    bit_blinds: list
    sims: list  # per bit: (c_sim, z_sim, nonce of the real branch)
    lin_nonces: list
    lin_witness: list


def _commit_phase(params: Params, J, value: int, blinding: int, n: int, rng) -> _ProverState:
    """First move. Does not check the range; callers that care do."""
    grp, p = params.group, params.p
    g1, gp = params.gens.gs[0], params.gens.gprime
    L, targets = _targets(params, J, n)
    offsets = [0, (1 << L) - n][: len(targets)]
    st = _ProverState([], [], [], [], [], [], [])
    for off in offsets:
        u = (value - 1 + off) % (1 << L)
        weighted = 0
        for i in range(L):
            b = (u >> i) & 1
            r = grp.random_scalar(rng)
            B = g1 ** b * gp ** r
            k = grp.random_scalar(rng)
            c_sim = grp.random_scalar(rng)
            z_sim = grp.random_scalar(rng)
            sim_lhs = B if b == 1 else B / g1  # statement of the branch we fake
            t_real = gp ** k
            t_sim = gp ** z_sim / sim_lhs ** c_sim
            t0, t1 = (t_real, t_sim) if b == 0 else (t_sim, t_real)
            st.bit_coms.append(B)
            st.commitments += [t0, t1]
            st.bits.append(b)
            st.bit_blinds.append(r)
            st.sims.append((c_sim, z_sim, k))
            weighted = (weighted + (r << i)) % p
        delta = (blinding - weighted) % p
        kl = grp.random_scalar(rng)
        st.lin_nonces.append(kl)
        st.lin_witness.append(delta)
    st.commitments += [gp ** k for k in st.lin_nonces]
    return st


def _respond(params: Params, st: _ProverState, c: int) -> tuple:
    p = params.p
    responses = []
    for b, r, (c_sim, z_sim, k) in zip(st.bits, st.bit_blinds, st.sims):
        c_real = (c - c_sim) % p
        z_real = (k + c_real * r) % p
        c0, z0, z1 = (c_real, z_real, z_sim) if b == 0 else (c_sim, z_sim, z_real)
        responses += [c0, z0, z1]
    responses += [(k + c * d) % p for k, d in zip(st.lin_nonces, st.lin_witness)]
    return tuple(responses)


def _build(params: Params, J, ctr: int, blinding: int, n: int, rng) -> Proof:
    st = _commit_phase(params, J, ctr, blinding, n, rng)
    c = _challenge(params, J, n, st.bit_coms, st.commitments)
    return Proof(TAG_RANGE, tuple(st.bit_coms), tuple(st.commitments), c, _respond(params, st, c))


def prove_range(params: Params, J, ctr: int, blinding: int, n: int, rng) -> Proof:
    if not 1 <= ctr <= n:
        raise OutOfRange(f"counter {ctr} outside [1, {n}]")
    return _build(params, J, ctr, blinding, n, rng)


def check_range_transcript(params: Params, J, n: int, bit_coms, commitments, c: int, responses) -> bool:
    p = params.p
    g1, gp = params.gens.gs[0], params.gens.gprime
    L, targets = _targets(params, J, n)
    nbits = L * len(targets)
    if len(bit_coms) != nbits or len(commitments) != 2 * nbits + len(targets) or len(responses) != 3 * nbits + len(targets):
        raise MalformedProof("range proof shape does not match n")
    for idx, B in enumerate(bit_coms):
        t0, t1 = commitments[2 * idx], commitments[2 * idx + 1]
        c0, z0, z1 = responses[3 * idx : 3 * idx + 3]
        c1 = (c - c0) % p
        if gp ** z0 != t0 * B ** c0:
            return False
        if gp ** z1 != t1 * (B / g1) ** c1:
            return False
    for j, target in enumerate(targets):
        acc = target
        for i in range(L):
            acc = acc / bit_coms[j * L + i] ** (1 << i)
        t = commitments[2 * nbits + j]
        z = responses[3 * nbits + j]
        if gp ** z != t * acc ** c:
            return False
    return True


def verify_range(params: Params, J, n: int, proof: Proof) -> bool:
    if proof.tag != TAG_RANGE:
        raise MalformedProof("not a range proof")
    c = _challenge(params, J, n, proof.elements, proof.commitments)
    if c != proof.challenge:
        return False
    return check_range_transcript(params, J, n, proof.elements, proof.commitments, c, proof.responses)


class InteractiveRangeProver:
    """Two-move prover used by the rewinding extractor in tests."""

    def __init__(self, params: Params, J, ctr: int, blinding: int, n: int, rng):
        self.params, self.J, self.n = params, J, n
        self._state = _commit_phase(params, J, ctr, blinding, n, rng)
        self.bit_coms = tuple(self._state.bit_coms)
        self.commitments = tuple(self._state.commitments)

    def respond(self, c: int) -> tuple:
        return _respond(self.params, self._state, c)


def extract_range(params: Params, J, n: int, bit_coms, c1, z1, c2, z2):
    """Recover (ctr, blinding) from two accepting transcripts on one first move."""
    p = params.p
    L, targets = _targets(params, J, n)
    if (c1 - c2) % p == 0:
        raise ValueError("challenges must differ")
    bits, blinds = [], []
    for idx in range(L):
        a0, a_z0, a_z1 = z1[3 * idx : 3 * idx + 3]
        b0, b_z0, b_z1 = z2[3 * idx : 3 * idx + 3]
        if (a0 - b0) % p:
            bits.append(0)
            blinds.append((a_z0 - b_z0) * pow((a0 - b0) % p, -1, p) % p)
        else:
            a1, b1 = (c1 - a0) % p, (c2 - b0) % p
            bits.append(1)
            blinds.append((a_z1 - b_z1) * pow((a1 - b1) % p, -1, p) % p)
    nbits = L * len(targets)
    delta = (z1[3 * nbits] - z2[3 * nbits]) * pow((c1 - c2) % p, -1, p) % p
    v = sum(b << i for i, b in enumerate(bits))
    blinding = (delta + sum(r << i for i, r in enumerate(blinds))) % p
    return v + 1, blinding
