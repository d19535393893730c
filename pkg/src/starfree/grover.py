"""Idealized amplitude-amplification search model with deterministic charges.

A single search over a domain of size N with promise threshold t0 charges
exactly ceil(c_g * c * sqrt(N / t0)) queries (c is the per-evaluation query
cost of the marked-element predicate).  When at least t0 elements are
marked it returns a uniformly random marked element with probability
p_succ; below the promise the success probability degrades linearly as
p_succ * |marked| / t0; with no marked element it always reports
not-found.  The charge never depends on the outcome.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

from .digraph import QueryLedger


@dataclass(frozen=True)
class GroverModel:
    """Cost model constants: charge multiplier, success probability, seed."""

    c_g: float = 3.0
    p_succ: float = 0.9
    seed: int = 0

    def __post_init__(self):
        if self.c_g < 1:
            raise ValueError("c_g must be >= 1")
        if not 0 < self.p_succ <= 1:
            raise ValueError("p_succ must lie in (0, 1]")


def grover_charge(model: GroverModel, domain_size: int, t0: int, eval_cost: int) -> int:
    """Deterministic charge of one search invocation."""
    if domain_size <= 0:
        return 0
    return math.ceil(model.c_g * eval_cost * math.sqrt(domain_size / t0))


def grover_sample(
    model: GroverModel,
    rng: random.Random,
    domain: Sequence[int],
    t0: int,
    predicate: Optional[Callable[[int], bool]] = None,
    eval_cost: int = 1,
    ledger: Optional[QueryLedger] = None,
    marked: Optional[Sequence[int]] = None,
):
    """One simulated search; returns a marked element or None.

    The simulator evaluates the predicate over the whole domain outside the
    ledger (callers may pass a precomputed ``marked`` list instead) and
    charges the modelled cost, so the ledger reflects the cost model rather
    than the simulation work.
    """
    n = len(domain)
    if n == 0:
        if ledger is not None:
            ledger.charge_grover(0)
        return None
    if not 1 <= t0 <= n:
        raise ValueError(f"t0={t0} outside [1, {n}]")
    if marked is None:
        if predicate is None:
            raise ValueError("need a predicate or a precomputed marked list")
        marked = sorted(x for x in domain if predicate(x))
    if ledger is not None:
        ledger.charge_grover(grover_charge(model, n, t0, eval_cost))
    u = rng.random()
    if not marked:
        return None
    if len(marked) >= t0:
        p = model.p_succ
    else:
        p = model.p_succ * len(marked) / t0
    if u < p:
        return marked[rng.randrange(len(marked))]
    return None


def _ceil_root_pow(n: int, p: int, q: int) -> int:
    """Smallest integer t >= 1 with t**q >= n**p (exact integer arithmetic)."""
    if n <= 1:
        return 1
    target = n**p
    t = max(1, int(round(target ** (1.0 / q))))
    while t**q >= target:
        t -= 1
    t += 1
    while t**q < target:
        t += 1
    return t


@dataclass(frozen=True)
class QuerySchedule:
    """Per-stage search targets t_1 >= t_2 >= ... >= t_k = 1."""

    k: int
    n: int
    t: tuple[int, ...]

    def __post_init__(self):
        if len(self.t) != self.k:
            raise ValueError("schedule length must equal k")
        if self.t[-1] != 1:
            raise ValueError("final stage target must be 1")
        if any(a < b for a, b in zip(self.t, self.t[1:])):
            raise ValueError("schedule must be non-increasing")


def make_schedule(k: int, n: int) -> QuerySchedule:
    """t_i = ceil(n^((2^(k-i)-1)/(2^k-1))) for i = 1..k-1, and t_k = 1.

    Exponents are evaluated in exact integer arithmetic so that powers of
    two land exactly (float pow would round 128^(3/7) past 8).
    """
    if k < 2:
        raise ValueError("k must be >= 2")
    if n < 2:
        raise ValueError("n must be >= 2")
    denom = 2**k - 1
    t = tuple(_ceil_root_pow(n, 2 ** (k - i) - 1, denom) for i in range(1, k)) + (1,)
    return QuerySchedule(k=k, n=n, t=t)
