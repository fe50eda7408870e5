"""FPTAS wrapper: profit scaling around any exact pseudo-polynomial solver.

The exact solvers run in time polynomial in the largest total profit, so
dividing all profits by a factor K trades accuracy for speed.  The wrapper
guesses the optimum by halving from the trivial upper bound, picks K so that
the total rounding loss stays below half an epsilon-fraction of the guess,
solves the scaled instance exactly, and re-scores the returned coloring with
the original profits; the first guess whose witness certifies itself is
accepted.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

from .model import Coloring, ConflictInstance, Profile, max_total_profit, profile_of, satisfaction_level

# An exact solver takes an instance and returns (optimum, profile, witness).
ExactSolver = Callable[[ConflictInstance], tuple[int, Profile, Coloring]]


@dataclass(frozen=True)
class ScaledInstance:
    """An instance with profits floor-divided by an integer factor."""

    source: ConflictInstance
    factor: int
    instance: ConflictInstance


def scale_profits(inst: ConflictInstance, factor: int) -> ScaledInstance:
    """Floor-divide every profit by factor (factor 1 is the identity)."""
    if factor < 1:
        raise ValueError("scale factor must be a positive integer")
    if factor == 1:
        return ScaledInstance(source=inst, factor=1, instance=inst)
    scaled = ConflictInstance(
        n=inst.n,
        k=inst.k,
        edges=inst.edges,
        profits=tuple(tuple(p // factor for p in row) for row in inst.profits),
    )
    return ScaledInstance(source=inst, factor=factor, instance=scaled)


@dataclass
class FptasResult:
    value: int
    profile: Profile
    witness: Coloring
    epsilon: Fraction
    solver_calls: int


def fptas(
    inst: ConflictInstance,
    epsilon: Fraction | float | str,
    exact_solver: ExactSolver,
) -> FptasResult:
    """A coloring whose true satisfaction level is >= (1 - epsilon) * optimum.

    Guess-and-scale: for g = Q, ceil(Q/2), ..., 1 set K = max(1, floor(
    epsilon*g / (2n))), solve the scaled instance exactly, lift the witness,
    and accept as soon as its true satisfaction reaches (1 - epsilon) * g.
    Uses at most ceil(log2(Q+1)) + 1 exact-solver calls.
    """
    eps = Fraction(epsilon)
    if not (0 < eps < 1):
        raise ValueError(f"epsilon must lie strictly between 0 and 1, got {eps}")
    empty: Coloring = tuple(frozenset() for _ in range(inst.k))
    big_q = max_total_profit(inst)
    if big_q == 0:
        return FptasResult(
            value=0,
            profile=(0,) * inst.k,
            witness=empty,
            epsilon=eps,
            solver_calls=0,
        )

    best_value = 0
    best_witness = empty
    calls = 0
    guess = big_q
    while True:
        # big_q > 0 implies n >= 1 here
        factor = max(1, int(eps * guess / (2 * inst.n)))
        scaled = scale_profits(inst, factor)
        _, _, witness = exact_solver(scaled.instance)
        calls += 1
        true_profile = profile_of(inst, witness)
        value = satisfaction_level(true_profile)
        if value > best_value:
            best_value = value
            best_witness = witness
        if value >= (1 - eps) * guess:
            return FptasResult(
                value=value,
                profile=true_profile,
                witness=witness,
                epsilon=eps,
                solver_calls=calls,
            )
        if guess == 1:
            break
        guess = (guess + 1) // 2
    return FptasResult(
        value=best_value,
        profile=profile_of(inst, best_witness),
        witness=best_witness,
        epsilon=eps,
        solver_calls=calls,
    )
