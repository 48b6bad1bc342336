"""Exact classical values of the game, with and without communication.

All values are exact fractions over the 32 equally weighted variations.
A local strategy is a 4-bit table: bit ``h`` of its index is the answer given
on receiving ``h`` half-apples.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Optional, Sequence

import numpy as np

from .errors import DomainError
from .protocol import AppleVariation, Parity, enumerate_valid_variations, parity

NUM_VARIATIONS = 32


@dataclass(frozen=True)
class LocalStrategy:
    table: tuple[int, int, int, int]

    def __post_init__(self):
        if len(self.table) != 4 or any(b not in (0, 1) for b in self.table):
            raise ValueError(f"table must be four bits, got {self.table!r}")

    @classmethod
    def from_index(cls, index: int) -> "LocalStrategy":
        return cls(tuple((index >> h) & 1 for h in range(4)))

    @property
    def index(self) -> int:
        return sum(b << h for h, b in enumerate(self.table))

    def __call__(self, half_units: int) -> int:
        return self.table[half_units]

    def flipped(self) -> "LocalStrategy":
        return LocalStrategy(tuple(1 - b for b in self.table))


@dataclass(frozen=True)
class TeamStrategy:
    alice: LocalStrategy
    bob: LocalStrategy
    charlie: LocalStrategy

    @property
    def players(self) -> tuple[LocalStrategy, LocalStrategy, LocalStrategy]:
        return (self.alice, self.bob, self.charlie)

    def answer(self, v: AppleVariation) -> Parity:
        a, b, c = v.half_units
        return Parity.from_bit(self.alice(a) ^ self.bob(b) ^ self.charlie(c))

    def to_dict(self) -> dict:
        return {
            name: {str(Fraction(h, 2)): s(h) for h in range(4)}
            for name, s in zip(("alice", "bob", "charlie"), self.players)
        }


@dataclass(frozen=True)
class StrategyValue:
    wins: int

    def __post_init__(self):
        if not 0 <= self.wins <= NUM_VARIATIONS:
            raise ValueError(f"wins must lie in 0..{NUM_VARIATIONS}")

    @property
    def probability(self) -> Fraction:
        return Fraction(self.wins, NUM_VARIATIONS)


# b = 1 for 0 or 1/2 apples, b = 0 for 1 or 3/2 apples
REFERENCE_LOCAL = LocalStrategy((1, 1, 0, 0))
REFERENCE_STRATEGY = TeamStrategy(REFERENCE_LOCAL, REFERENCE_LOCAL, REFERENCE_LOCAL)


@lru_cache(maxsize=None)
def _scored_variations() -> tuple[tuple[int, int, int, int], ...]:
    """(a, b, c, parity bit) for every variation."""
    return tuple((*v.half_units, parity(v).bit) for v in enumerate_valid_variations())


def evaluate(ts: TeamStrategy) -> StrategyValue:
    ta, tb, tc = ts.alice.table, ts.bob.table, ts.charlie.table
    return StrategyValue(sum((ta[a] ^ tb[b] ^ tc[c]) == p for a, b, c, p in _scored_variations()))


def all_team_strategies():
    locals_ = [LocalStrategy.from_index(i) for i in range(16)]
    for a, b, c in itertools.product(locals_, repeat=3):
        yield TeamStrategy(a, b, c)


@lru_cache(maxsize=None)
def _win_table() -> np.ndarray:
    """wins[i, j, k] for Alice, Bob, Charlie playing local strategies i, j, k."""
    return np.array([evaluate(ts).wins for ts in all_team_strategies()]).reshape(16, 16, 16)


def optimal_classical() -> tuple[StrategyValue, list[TeamStrategy]]:
    """Scan all 4096 deterministic team strategies; return the maximum and every maximizer."""
    best = -1
    argmax: list[TeamStrategy] = []
    for ts in all_team_strategies():
        wins = evaluate(ts).wins
        if wins > best:
            best, argmax = wins, [ts]
        elif wins == best:
            argmax.append(ts)
    return StrategyValue(best), argmax


def mixture_value(weights) -> Fraction:
    """Expected win probability of a shared-randomness mixture of team strategies.

    ``weights`` maps a 16x16x16 grid (Alice, Bob, Charlie strategy indices) to
    nonnegative weights; Fraction entries give an exact answer.
    """
    w = np.asarray(weights, dtype=object).reshape(16, 16, 16)
    total = sum(w.flat)
    if total == 0:
        raise DomainError("mixture weights sum to zero")
    wins = _win_table()
    num = sum(int(wins[idx]) * w[idx] for idx in np.ndindex(16, 16, 16) if w[idx])
    return Fraction(num) / (NUM_VARIATIONS * Fraction(total))


def random_mixtures(count: int, rng: np.random.Generator, support: Optional[int] = None) -> list[float]:
    """Values of ``count`` random mixtures over deterministic team strategies.

    With ``support`` set, each mixture covers that many randomly chosen
    strategies; otherwise every strategy gets a Dirichlet weight.
    """
    wins = _win_table().reshape(-1) / NUM_VARIATIONS
    out = []
    for _ in range(count):
        if support is None:
            w = rng.dirichlet(np.ones(wins.size))
            out.append(float(w @ wins))
        else:
            idx = rng.choice(wins.size, size=support, replace=False)
            w = rng.dirichlet(np.ones(support))
            out.append(float(w @ wins[idx]))
    return out


def shared_randomness_value() -> Fraction:
    """Best value with shared randomness; equals the deterministic optimum by convexity."""
    return optimal_classical()[0].probability


# -- communication ---------------------------------------------------------

SILENT = None
ANSWER_RULES = ("xor", "charlie")


@dataclass(frozen=True)
class CommProtocol:
    """Alice and Bob each send at most one bit to Charlie.

    ``alice_msg``/``bob_msg`` are 4-entry tables indexed by half-units, or
    None for a silent party. ``charlie_out`` maps (n_c half-units, alice bit or
    None, bob bit or None) to Charlie's announced bit. Under the ``"xor"``
    answer rule Alice and Bob also announce local bits (``alice_out``,
    ``bob_out``) and the team answer is the XOR of all three; under
    ``"charlie"`` the team answer is Charlie's bit alone.
    """

    alice_msg: Optional[tuple[int, ...]]
    bob_msg: Optional[tuple[int, ...]]
    charlie_out: dict
    alice_out: Optional[LocalStrategy] = None
    bob_out: Optional[LocalStrategy] = None

    @property
    def answer_rule(self) -> str:
        return "charlie" if self.alice_out is None else "xor"

    @property
    def bits_used(self) -> tuple[int, int]:
        return (int(self.alice_msg is not None), int(self.bob_msg is not None))

    def answer(self, v: AppleVariation) -> Parity:
        a, b, c = v.half_units
        ma = None if self.alice_msg is None else self.alice_msg[a]
        mb = None if self.bob_msg is None else self.bob_msg[b]
        bit = self.charlie_out[(c, ma, mb)]
        if self.alice_out is not None:
            bit ^= self.alice_out(a) ^ self.bob_out(b)
        return Parity.from_bit(bit)

    def to_dict(self) -> dict:
        def msg(m):
            return "silent" if m is None else {str(Fraction(h, 2)): m[h] for h in range(4)}

        def key(kv):
            (c, ma, mb), _ = kv
            return (c, -1 if ma is None else ma, -1 if mb is None else mb)

        out = {
            "topology": "alice->charlie, bob->charlie",
            "answer_rule": self.answer_rule,
            "alice_msg": msg(self.alice_msg),
            "bob_msg": msg(self.bob_msg),
            "charlie_out": [
                {"n_c": str(Fraction(c, 2)), "alice": ma, "bob": mb, "bit": bit}
                for (c, ma, mb), bit in sorted(self.charlie_out.items(), key=key)
            ],
        }
        if self.alice_out is not None:
            out["alice_out"] = msg(self.alice_out.table)
            out["bob_out"] = msg(self.bob_out.table)
        return out


def evaluate_protocol(proto: CommProtocol) -> StrategyValue:
    return StrategyValue(sum(proto.answer(v) is parity(v) for v in enumerate_valid_variations()))


def _message_tables(bits: int):
    if bits == 0:
        return [SILENT]
    return [tuple((i >> h) & 1 for h in range(4)) for i in range(16)]


def _best_charlie(alice_msg, bob_msg, alice_out=None, bob_out=None) -> tuple[int, dict]:
    """Optimal Charlie table for fixed messages (and fixed Alice/Bob answer bits).

    Each of Charlie's input cells is scored independently, so the majority bit
    per cell is optimal over all his tables.
    """
    tallies: dict = {}
    for v in enumerate_valid_variations():
        a, b, c = v.half_units
        key = (c, None if alice_msg is None else alice_msg[a], None if bob_msg is None else bob_msg[b])
        target = parity(v).bit
        if alice_out is not None:
            target ^= alice_out(a) ^ bob_out(b)
        tallies.setdefault(key, [0, 0])[target] += 1
    table, wins = {}, 0
    for key, (zeros, ones) in tallies.items():
        table[key] = 0 if zeros >= ones else 1
        wins += max(zeros, ones)
    # unreachable cells still need an entry for the table to be total
    ma_vals = [None] if alice_msg is None else [0, 1]
    mb_vals = [None] if bob_msg is None else [0, 1]
    for key in itertools.product(range(4), ma_vals, mb_vals):
        table.setdefault(key, 0)
    return wins, table


def _check_budget(name: str, bits: int) -> None:
    if bits not in (0, 1):
        raise DomainError(f"{name} must be 0 or 1, got {bits!r}")


def star_search(alice_bits: int, bob_bits: int, answer_rule: str = "xor") -> tuple[StrategyValue, CommProtocol]:
    """Best one-round protocol with Alice and Bob messaging Charlie, no delegation.

    Charlie's table is optimized cell by cell, which covers all of his
    ``2**(4 * 2**a * 2**b)`` tables for every choice of messages (and, under
    the xor rule, of Alice's and Bob's 16 local answer tables each).
    """
    _check_budget("alice_bits", alice_bits)
    _check_budget("bob_bits", bob_bits)
    if answer_rule not in ANSWER_RULES:
        raise DomainError(f"answer_rule must be one of {ANSWER_RULES}, got {answer_rule!r}")
    if answer_rule == "charlie":
        outs = [(None, None)]
    else:
        locals_ = [LocalStrategy.from_index(i) for i in range(16)]
        outs = list(itertools.product(locals_, repeat=2))
    best = None
    for xa, xb in outs:
        for am in _message_tables(alice_bits):
            for bm in _message_tables(bob_bits):
                wins, table = _best_charlie(am, bm, xa, xb)
                if best is None or wins > best[0]:
                    best = (wins, CommProtocol(am, bm, table, xa, xb))
                if wins == NUM_VARIATIONS:
                    return StrategyValue(wins), best[1]
    return StrategyValue(best[0]), best[1]


def best_comm_protocol(alice_bits: int, bob_bits: int, answer_rule: str = "xor"):
    """Value and an optimal witness for the given budgets.

    With no communication at all the witness is the best local team strategy,
    since every party may then answer for itself.
    """
    _check_budget("alice_bits", alice_bits)
    _check_budget("bob_bits", bob_bits)
    if alice_bits == 0 and bob_bits == 0:
        value, argmax = optimal_classical()
        return value, REFERENCE_STRATEGY if REFERENCE_STRATEGY in argmax else argmax[0]
    return star_search(alice_bits, bob_bits, answer_rule)


def comm_search(alice_bits: int, bob_bits: int, answer_rule: str = "xor") -> StrategyValue:
    return best_comm_protocol(alice_bits, bob_bits, answer_rule)[0]


def permute_players(ts: TeamStrategy, perm: Sequence[int]) -> TeamStrategy:
    p = ts.players
    return TeamStrategy(p[perm[0]], p[perm[1]], p[perm[2]])


def certificate(list_maximizers: bool = False, answer_rule: str = "xor") -> dict:
    """JSON-ready summary of the local bound and the communication costs."""
    best, argmax = optimal_classical()
    comm = {}
    for a, b in ((0, 0), (1, 0), (0, 1), (1, 1)):
        value, witness = best_comm_protocol(a, b, answer_rule)
        comm[f"{a}{b}"] = {
            "alice_bits": a,
            "bob_bits": b,
            "answer_rule": answer_rule,
            "probability": str(value.probability),
            "example": witness.to_dict(),
        }
    out = {
        "max_probability": str(best.probability),
        "num_maximizers": len(argmax),
        "example_maximizer": REFERENCE_STRATEGY.to_dict() if REFERENCE_STRATEGY in argmax else argmax[0].to_dict(),
        "shared_randomness_value": str(shared_randomness_value()),
        "comm_table": comm,
    }
    if list_maximizers:
        out["maximizers"] = [ts.to_dict() for ts in argmax]
    return out
