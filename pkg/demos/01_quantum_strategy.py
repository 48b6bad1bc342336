"""Why a shared GHZ state wins every round.

Each contestant phase-rotates their photon by i**(half-apples) and measures in
the +/- basis. The product of rotations maps GHZ to itself when the total is
even and to its orthogonal partner when it is odd, and those two states have
disjoint +/- outcome sets.
"""
import numpy as np

from gmn import protocol, qsim

ghz = protocol.ghz()
labels = ["".join("+-"[b] for b in qsim.index_to_bits(i, 3)) for i in range(8)]

# the two outcome sets
for name, state in [("GHZ", ghz), ("GHZ-perp", protocol.ghz_perp())]:
    probs = qsim.outcome_distribution(state, qsim.diagonal_basis(3))
    print(name, {lab: round(float(p), 3) for lab, p in zip(labels, probs) if p > 1e-12})

# every variation, rotated numerically, against the closed-form answer
for v in protocol.enumerate_valid_variations()[:6]:
    rotated = protocol.rotate_for_variation(ghz, v)
    same = qsim.equal_up_to_global_phase(rotated, protocol.ghz_transform_oracle(v))
    print(f"{str(v):18s} parity={protocol.parity(v)!s:4s} matches closed form: {same}")

# play a few rounds
rng = np.random.default_rng(0)
wins = 0
for v in protocol.enumerate_valid_variations():
    bits, answer = protocol.quantum_round(v, ghz, rng)
    wins += answer is protocol.parity(v)
print(f"won {wins}/32 rounds")

# the apparatus: each rotation is a stack of wave plates at 0 degrees
for h in range(4):
    n = protocol.AppleCount(h)
    stack = protocol.waveplate_stack(n)
    print(n, [p.kind.value for p in stack] or "nothing",
          protocol.unitaries_equal_up_to_phase(protocol.stack_matrix(stack), protocol.rotation(n)))
