"""GF(2) linear-system hardness instances.

Sparse systems with exactly three variables per equation: hard-matrix
search (every small row subset linearly independent), satisfiable /
far-from-satisfiable instance distributions, exact minimum-unsatisfied
fraction, restricted-marginal uniformity checks, and the exact optimal
query-bounded distinguishing game.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Iterable, Optional, Sequence

import numpy as np


class GF2Matrix:
    """Dense bitset-row matrix over GF(2)."""

    __slots__ = ("n_cols", "rows")

    def __init__(self, n_cols: int, rows: Iterable[int]):
        self.n_cols = n_cols
        self.rows = list(int(r) for r in rows)
        mask = (1 << n_cols) - 1
        if any(r & ~mask for r in self.rows):
            raise ValueError("row has bits beyond n_cols")

    def copy(self) -> "GF2Matrix":
        return GF2Matrix(self.n_cols, self.rows)

    def __len__(self) -> int:
        return len(self.rows)


def gf2_rank(m: GF2Matrix) -> int:
    """Row rank over GF(2) via elimination; the input is not modified."""
    work = list(m.rows)
    rank = 0
    row_idx = 0
    for col in range(m.n_cols):
        pivot = None
        for r in range(row_idx, len(work)):
            if (work[r] >> col) & 1:
                pivot = r
                break
        if pivot is None:
            continue
        work[row_idx], work[pivot] = work[pivot], work[row_idx]
        for r in range(len(work)):
            if r != row_idx and ((work[r] >> col) & 1):
                work[r] ^= work[row_idx]
        rank += 1
        row_idx += 1
        if row_idx == len(work):
            break
    return rank


def gf2_consistent(rows: Sequence[int], rhs: Sequence[int], n_cols: int) -> bool:
    """Whether the system {row . x = b} has a solution over GF(2)."""
    base = gf2_rank(GF2Matrix(n_cols, rows))
    augmented = GF2Matrix(
        n_cols + 1, [r | (b << n_cols) for r, b in zip(rows, rhs)]
    )
    return gf2_rank(augmented) == base


@dataclass(frozen=True)
class Lin2Matrix:
    """Sparse 3-per-row GF(2) matrix given as column-index triples."""

    n: int
    triples: tuple[tuple[int, int, int], ...]

    def __post_init__(self):
        for t in self.triples:
            if len(set(t)) != 3:
                raise ValueError(f"row {t} must have three distinct indices")
            if any(not 0 <= i < self.n for i in t):
                raise ValueError(f"row {t} out of range")

    @property
    def n_rows(self) -> int:
        return len(self.triples)

    def column_counts(self) -> list[int]:
        counts = [0] * self.n
        for t in self.triples:
            for i in t:
                counts[i] += 1
        return counts

    def row_masks(self) -> list[int]:
        return [(1 << i) | (1 << j) | (1 << l) for i, j, l in self.triples]

    def to_gf2(self) -> GF2Matrix:
        return GF2Matrix(self.n, self.row_masks())


@dataclass
class Lin2System:
    """A 3-sparse GF(2) system A x = y with row multiplier c = rows / n."""

    n: int
    rows: tuple[tuple[int, int, int], ...]
    y: tuple[int, ...]
    witness: Optional[tuple[int, ...]] = None

    def __post_init__(self):
        if len(self.y) != len(self.rows):
            raise ValueError("right-hand side length mismatch")
        if any(b not in (0, 1) for b in self.y):
            raise ValueError("right-hand side must be bits")
        Lin2Matrix(self.n, tuple(self.rows))

    @property
    def c(self) -> int:
        return (len(self.rows) + self.n - 1) // self.n

    def matrix(self) -> Lin2Matrix:
        return Lin2Matrix(self.n, tuple(self.rows))

    def unsat_count(self, x: int) -> int:
        """Number of violated equations under assignment bitmask x."""
        count = 0
        for (i, j, l), b in zip(self.rows, self.y):
            parity = ((x >> i) ^ (x >> j) ^ (x >> l)) & 1
            count += parity != b
        return count

    def to_text(self) -> str:
        lines = [f"{self.n} {self.c}"]
        for (i, j, l), b in zip(self.rows, self.y):
            lines.append(f"{i} {j} {l} {b}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "Lin2System":
        lines = [ln for ln in text.splitlines() if ln.strip()]
        n, _c = (int(tok) for tok in lines[0].split())
        rows = []
        y = []
        for ln in lines[1:]:
            i, j, l, b = (int(tok) for tok in ln.split())
            rows.append((i, j, l))
            y.append(b)
        return cls(n, tuple(rows), tuple(y))

    def to_json(self) -> str:
        return json.dumps(
            {"n": self.n, "rows": [list(r) for r in self.rows], "y": list(self.y)},
            sort_keys=True,
        )

    @classmethod
    def from_json(cls, text: str) -> "Lin2System":
        obj = json.loads(text)
        return cls(obj["n"], tuple(tuple(r) for r in obj["rows"]), tuple(obj["y"]))


# ---------------------------------------------------------------------------
# Matrix sampling and hard-matrix search
# ---------------------------------------------------------------------------


def sample_lin2_matrix(
    n: int,
    c: int,
    seed: int,
    *,
    exact_column_regular: bool = True,
    max_retries: int = 10_000,
) -> Lin2Matrix:
    """Random 3-sparse matrix with c*n rows.

    With ``exact_column_regular`` every column occurs in exactly 3c rows
    (configuration model with local swap repair); otherwise rows are drawn
    as uniform distinct triples with column occurrence capped at 3c.
    """
    if n < 3:
        raise ValueError("need at least 3 variables")
    rng = random.Random(seed)
    n_rows = c * n
    if exact_column_regular:
        slots = [col for col in range(n) for _ in range(3 * c)]
        rng.shuffle(slots)
        rows = [slots[3 * i : 3 * i + 3] for i in range(n_rows)]
        for _ in range(max_retries):
            bad = [i for i, row in enumerate(rows) if len(set(row)) != 3]
            if not bad:
                break
            i = bad[0]
            j = rng.randrange(n_rows)
            a = rng.randrange(3)
            b = rng.randrange(3)
            rows[i][a], rows[j][b] = rows[j][b], rows[i][a]
        else:
            raise ValueError("could not repair configuration sample; relax regularity")
        triples = tuple(tuple(sorted(row)) for row in rows)
    else:
        # Capacity-balanced greedy: take 3 columns of highest remaining
        # capacity with seeded tie-breaking.  Capacities stay within 1 of
        # each other, so the draw never wedges and the cap <= 3c holds.
        capacity = [3 * c] * n
        triples_list = []
        for _ in range(n_rows):
            order = sorted(range(n), key=lambda i: (-capacity[i], rng.random()))
            cand = tuple(sorted(order[:3]))
            if any(capacity[i] <= 0 for i in cand):
                raise ValueError("column cap too tight for sampling")
            for i in cand:
                capacity[i] -= 1
            triples_list.append(cand)
        triples = tuple(triples_list)
    return Lin2Matrix(n, triples)


@dataclass(frozen=True)
class HardMatrix:
    matrix: Lin2Matrix
    delta: Fraction
    subset_size: int
    attempts: int


def _all_subsets_independent(
    masks: Sequence[int], n: int, size: int, *, sample_budget: Optional[int], rng
) -> bool:
    if size <= 0:
        return True
    total = len(masks)
    if size > total:
        return False
    exhaustive = sample_budget is None
    if exhaustive:
        pool = combinations(range(total), size)
    else:
        pool = (tuple(rng.sample(range(total), size)) for _ in range(sample_budget))
    for subset in pool:
        sub = GF2Matrix(n, [masks[i] for i in subset])
        if gf2_rank(sub) < size:
            return False
    return True


def search_hard_matrix(
    n: int,
    c: int,
    delta,
    seed: int,
    max_attempts: int = 64,
    *,
    exact_column_regular: bool = True,
    exhaustive_limit: int = 14,
    sample_budget: int = 2000,
) -> Optional[HardMatrix]:
    """Rejection-sample a 3-sparse matrix whose every floor(delta*n)-row
    subset is linearly independent.

    Subsets are checked exhaustively when floor(delta*n) <= exhaustive_limit
    and the subset count is workable, by random sampling otherwise.  Returns
    None when max_attempts candidates all fail (the target is existential;
    unlucky parameters may not be reachable).
    """
    delta = Fraction(delta)
    size = int(delta * n)
    rng = random.Random(seed)
    for attempt in range(1, max_attempts + 1):
        try:
            mat = sample_lin2_matrix(
                n, c, seed + 7919 * attempt, exact_column_regular=exact_column_regular
            )
        except ValueError:
            continue
        masks = mat.row_masks()
        if len(set(masks)) != len(masks):
            continue
        use_sampling = size > exhaustive_limit
        ok = _all_subsets_independent(
            masks,
            n,
            size,
            sample_budget=sample_budget if use_sampling else None,
            rng=rng,
        )
        if ok:
            return HardMatrix(matrix=mat, delta=delta, subset_size=size, attempts=attempt)
    return None


# ---------------------------------------------------------------------------
# Instance distributions
# ---------------------------------------------------------------------------


def sample_yes(a: Lin2Matrix, seed: int) -> Lin2System:
    """Satisfiable instance: y = A z for a uniform hidden assignment z."""
    rng = random.Random(seed)
    z = rng.getrandbits(a.n)
    y = tuple(((z >> i) ^ (z >> j) ^ (z >> l)) & 1 for i, j, l in a.triples)
    witness = tuple((z >> i) & 1 for i in range(a.n))
    return Lin2System(a.n, a.triples, y, witness=witness)


def sample_no(a: Lin2Matrix, seed: int) -> Lin2System:
    """Right-hand side drawn uniformly; far from satisfiable w.h.p. at large c."""
    rng = random.Random(seed)
    y = tuple(rng.getrandbits(1) for _ in a.triples)
    return Lin2System(a.n, a.triples, y)


def min_unsat_fraction(sys: Lin2System, *, max_n: int = 24) -> Fraction:
    """min over assignments of (#unsatisfied rows) / (#rows), exact.

    Exhaustive over all 2^n assignments via a Walsh-Hadamard transform of
    the signed row spectrum, so it stays fast up to the n <= 24 guard.
    Beyond the guard use :func:`min_unsat_estimate`.
    """
    n = sys.n
    if n > max_n:
        raise ValueError(f"n={n} too large for exhaustion; use min_unsat_estimate")
    if not sys.rows:
        return Fraction(0)
    size = 1 << n
    spectrum = np.zeros(size, dtype=np.int64)
    for (i, j, l), b in zip(sys.rows, sys.y):
        mask = (1 << i) | (1 << j) | (1 << l)
        spectrum[mask] += 1 if b == 0 else -1
    # In-place Walsh-Hadamard: W[x] = sum_m spectrum[m] * (-1)^(popcount(m & x))
    h = 1
    while h < size:
        for start in range(0, size, h * 2):
            a_slice = spectrum[start : start + h]
            b_slice = spectrum[start + h : start + 2 * h]
            a_new = a_slice + b_slice
            b_new = a_slice - b_slice
            spectrum[start : start + h] = a_new
            spectrum[start + h : start + 2 * h] = b_new
        h *= 2
    # W[x] = #sat(x) - #unsat(x), so min unsat = (rows - max W) / 2.
    best = int(spectrum.max())
    m = len(sys.rows)
    return Fraction(m - best, 2 * m)


def min_unsat_estimate(sys: Lin2System, trials: int = 64, seed: int = 0) -> Fraction:
    """Upper-bound estimate by seeded greedy descent from random starts."""
    rng = random.Random(seed)
    m = len(sys.rows)
    best = m
    for _ in range(trials):
        x = rng.getrandbits(sys.n)
        improved = True
        current = sys.unsat_count(x)
        while improved:
            improved = False
            for i in range(sys.n):
                cand = x ^ (1 << i)
                cu = sys.unsat_count(cand)
                if cu < current:
                    x, current = cand, cu
                    improved = True
        best = min(best, current)
    return Fraction(best, m)


# ---------------------------------------------------------------------------
# k-wise independence checks
# ---------------------------------------------------------------------------


@dataclass
class KwiseReport:
    m: int
    k: int
    mode: str  # "exact" | "chi2"
    subsets_checked: int
    failures: list[tuple[int, ...]] = field(default_factory=list)

    @property
    def all_pass(self) -> bool:
        return not self.failures


def _chi2_threshold(dof: int, significance: float) -> float:
    """Wilson-Hilferty approximation of the chi^2 upper quantile."""
    from math import sqrt

    z = {0.01: 2.3263478740408408, 0.001: 3.090232306167813}.get(significance)
    if z is None:
        raise ValueError("supported significance levels: 0.01, 0.001")
    return dof * (1 - 2 / (9 * dof) + z * sqrt(2 / (9 * dof))) ** 3


def kwise_check(
    source,
    m: int,
    k: int,
    *,
    subset_budget: int = 200,
    seed: int = 0,
    trials: Optional[int] = None,
    significance: float = 0.01,
) -> KwiseReport:
    """Check that every size<=k restriction of a {0,1}^m distribution is uniform.

    ``source`` is either an iterable of equally likely outcome bitmasks
    (exact mode) or a callable rng -> bitmask sampled ``trials`` times and
    tested per subset with a chi-squared statistic at the given
    significance.  Up to ``subset_budget`` subsets are examined per size,
    smallest-first, deterministically seeded.
    """
    rng = random.Random(seed)
    report = KwiseReport(m=m, k=k, mode="exact" if not callable(source) else "chi2", subsets_checked=0)
    if callable(source):
        if trials is None:
            trials = 4096
        outcomes = [source(rng) for _ in range(trials)]
    else:
        outcomes = list(source)
    total = len(outcomes)
    if total == 0:
        raise ValueError("empty outcome source")
    for size in range(1, k + 1):
        all_subsets = list(combinations(range(m), size))
        if len(all_subsets) > subset_budget:
            all_subsets = [
                tuple(sorted(rng.sample(range(m), size))) for _ in range(subset_budget)
            ]
        for subset in all_subsets:
            report.subsets_checked += 1
            counts: dict[int, int] = {}
            for out in outcomes:
                key = 0
                for pos, idx in enumerate(subset):
                    key |= ((out >> idx) & 1) << pos
                counts[key] = counts.get(key, 0) + 1
            cells = 1 << size
            if report.mode == "exact":
                expected = Fraction(total, cells)
                if any(Fraction(counts.get(v, 0)) != expected for v in range(cells)):
                    report.failures.append(subset)
            else:
                expected = total / cells
                stat = sum(
                    (counts.get(v, 0) - expected) ** 2 / expected for v in range(cells)
                )
                if stat > _chi2_threshold(cells - 1, significance):
                    report.failures.append(subset)
    return report


def yes_marginal_outcomes(a: Lin2Matrix) -> list[int]:
    """All right-hand sides A z as bitmasks, z exhaustive (desk scale)."""
    if a.n > 20:
        raise ValueError("exhaustive enumeration limited to n <= 20")
    outs = []
    for z in range(1 << a.n):
        y = 0
        for r, (i, j, l) in enumerate(a.triples):
            y |= (((z >> i) ^ (z >> j) ^ (z >> l)) & 1) << r
        outs.append(y)
    return outs


# ---------------------------------------------------------------------------
# Exact query-bounded distinguishing game
# ---------------------------------------------------------------------------


def distinguishing_advantage(a: Lin2Matrix, q: int) -> Fraction:
    """Best advantage of any adaptive q-query tester reading y alone.

    Yes side: y = A z with z uniform; no side: y uniform.  The optimal
    advantage equals half the total variation over transcripts under the
    best adaptive query strategy, computed exactly by recursion over
    query sets (answer order does not matter for the value).
    """
    masks = a.row_masks()
    n_rows = len(masks)
    memo: dict[frozenset, Fraction] = {}

    def prob_yes(queries: tuple[int, ...], answers: tuple[int, ...]) -> Fraction:
        rows = [masks[i] for i in queries]
        if not gf2_consistent(rows, answers, a.n):
            return Fraction(0)
        rank = gf2_rank(GF2Matrix(a.n, rows))
        return Fraction(1, 1 << rank)

    def best(queries: tuple[int, ...], answers: tuple[int, ...], left: int) -> Fraction:
        if left == 0:
            return abs(prob_yes(queries, answers) - Fraction(1, 1 << len(queries)))
        key = (frozenset(zip(queries, answers)), left)
        if key in memo:
            return memo[key]
        value = abs(prob_yes(queries, answers) - Fraction(1, 1 << len(queries)))
        for i in range(n_rows):
            if i in queries:
                continue
            split = sum(
                best(queries + (i,), answers + (b,), left - 1) for b in (0, 1)
            )
            if split > value:
                value = split
        memo[key] = value
        return value

    if q <= 0:
        return Fraction(0)
    return best((), (), min(q, n_rows)) / 2


def reduce_to_3coloring(sys: Lin2System):
    """Interface stub for the equation-system-to-3-colorability reduction.

    The gadget construction lives outside this workbench; the hardness
    pipeline here stops at the linear system.
    """
    raise NotImplementedError(
        "not implemented - gadget construction external to this workbench"
    )
