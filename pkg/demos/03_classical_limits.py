"""What classical teams can and cannot do.

Without communication no deterministic team beats 3/4, and mixing strategies
with shared randomness cannot help. With messages to Charlie the picture
depends on who announces the answer.
"""
import numpy as np

from gmn import classical

best, argmax = classical.optimal_classical()
print(f"best local team: {best.wins}/32 = {best.probability}, {len(argmax)} optimal teams")
print("the three-player table 'say 1 on 0 or 1/2 apples, else 0' is optimal:",
      classical.REFERENCE_STRATEGY in argmax)

values = classical.random_mixtures(1000, np.random.default_rng(1), support=5)
print(f"best of 1000 random shared-randomness mixtures: {max(values):.4f}")

print("\none-bit messages to Charlie")
for rule in classical.ANSWER_RULES:
    for a, b in [(0, 0), (1, 0), (1, 1)]:
        value = classical.comm_search(a, b, answer_rule=rule)
        print(f"  rule={rule:7s} alice={a} bob={b}: {value.probability}")

value, proto = classical.best_comm_protocol(1, 1)
print("\nan optimal two-bit protocol:", {k: proto.to_dict()[k] for k in ("alice_msg", "bob_msg", "alice_out", "bob_out")})
