"""Exact-rational dual-certificate construction and verification.

Everything here is exact: weight functions are stored as integer numerator
vectors over a single positive denominator, and every reported equality is
rational equality, never a float tolerance.  The objects live on the
hypercube {-1,1}^n with Hamming weight |x| = #{i : x_i = -1}; a symmetric
function is captured by its level masses w(t) (total mass at weight t),
with per-point values w(t) / C(n, t).

Sign convention: sgn(0) = +1, and -1 is the "true" value of Boolean
functions, so the threshold function THR_k(x) is -1 iff |x| >= k and the
plain OR is -1 iff some coordinate is -1.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import comb, exp, isqrt
from typing import Callable, Optional, Sequence


def _prod_tree(factors: Sequence[int]) -> int:
    """Balanced product to keep big-int multiplication subquadratic."""
    items = list(factors)
    if not items:
        return 1
    while len(items) > 1:
        items = [
            items[i] * items[i + 1] if i + 1 < len(items) else items[i]
            for i in range(0, len(items), 2)
        ]
    return items[0]


def _ceil_root(n: int, q: int) -> int:
    """Smallest integer t with t**q >= n."""
    if n <= 1:
        return 1
    t = max(1, int(round(n ** (1.0 / q))))
    while t**q >= n:
        t -= 1
    return t + 1


class SymmetricWeightFunction:
    """Exact symmetric function on {-1,1}^n stored by Hamming-weight level.

    ``nums[t] / den`` is the level mass w(t); the per-point value at weight
    t is w(t) / C(n, t).  Construction normalizes nothing; builders are
    responsible for the unit-l1 convention.
    """

    __slots__ = ("n", "nums", "den", "meta")

    def __init__(self, n: int, nums: Sequence[int], den: int, meta: Optional[dict] = None):
        if den <= 0:
            raise ValueError("denominator must be positive")
        if len(nums) != n + 1:
            raise ValueError("need one level mass per Hamming weight 0..n")
        self.n = n
        self.nums = tuple(int(x) for x in nums)
        self.den = int(den)
        self.meta = dict(meta) if meta else {}

    # -- level view ---------------------------------------------------------

    def level_mass(self, t: int) -> Fraction:
        return Fraction(self.nums[t], self.den)

    def level_masses(self) -> list[Fraction]:
        return [Fraction(x, self.den) for x in self.nums]

    def support(self) -> list[int]:
        return [t for t, x in enumerate(self.nums) if x != 0]

    def l1(self) -> Fraction:
        return Fraction(sum(abs(x) for x in self.nums), self.den)

    def total(self) -> Fraction:
        return Fraction(sum(self.nums), self.den)

    def sign(self, t: int) -> int:
        """Sign of the level (and of every point at that level); sgn(0) = +1."""
        return -1 if self.nums[t] < 0 else 1

    def positive_mass(self) -> Fraction:
        return Fraction(sum(x for x in self.nums if x > 0), self.den)

    def negative_mass(self) -> Fraction:
        return Fraction(sum(-x for x in self.nums if x < 0), self.den)

    # -- point view -----------------------------------------------------------

    def point_value(self, t: int) -> Fraction:
        return Fraction(self.nums[t], self.den * comb(self.n, t))

    def point_l1(self) -> Fraction:
        # sum over points of |value| = sum_t C(n,t) * |w(t)|/C(n,t) = level l1
        return self.l1()

    def __repr__(self) -> str:
        return f"SymmetricWeightFunction(n={self.n}, support={self.support()})"


def build_omega(n: int, k: int, t_cap: Optional[int] = None) -> SymmetricWeightFunction:
    """Level-mass dual witness for the weight-threshold function.

    With T = t_cap (default n), c = 2k * ceil(n^(1/k)) and
    m = floor(sqrt(T/c)), the support is S = {1..k} union {c*i^2 : 0<=i<=m};
    the signed masses come from an alternating binomial times the monic
    polynomial vanishing on [0..T] \\ S, normalized to unit l1.  The zero
    total (hence orthogonality to constants) is exact by the finite
    difference identity, not by normalization.
    """
    T = n if t_cap is None else t_cap
    if not k <= T <= n:
        raise ValueError(f"need k <= t_cap <= n, got k={k}, t_cap={T}, n={n}")
    if k < 1:
        raise ValueError("k must be >= 1")
    c = 2 * k * _ceil_root(n, k)
    m = isqrt(T // c) if T >= c else 0
    S = set(range(1, k + 1)) | {c * i * i for i in range(m + 1)}
    S = {t for t in S if t <= T}
    raw = [0] * (n + 1)
    outside = [r for r in range(T + 1) if r not in S]
    for t in sorted(S):
        factors = [t - r for r in outside]
        val = comb(T, t) * _prod_tree(factors)
        if (t + T - m + 1) % 2:
            val = -val
        raw[t] = val
    z = sum(abs(x) for x in raw)
    if z == 0:
        raise ValueError("degenerate parameters: zero witness")
    return SymmetricWeightFunction(
        n,
        raw,
        z,
        meta={"k": k, "T": T, "c": c, "m": m, "S": tuple(sorted(S))},
    )


def build_psi(omega: SymmetricWeightFunction) -> SymmetricWeightFunction:
    """Per-point view of a level-mass witness, validated exactly.

    Checks that the point-level l1 is exactly 1 and the total is exactly 0,
    then returns the same exact object (points are read through
    ``point_value``).
    """
    if omega.l1() != 1:
        raise ValueError("witness must have unit l1")
    if omega.total() != 0:
        raise ValueError("witness must sum to zero")
    return omega


def krawtchouk(s: int, w: int, n: int) -> int:
    """K_s(w; n) = sum_j (-1)^j C(w, j) C(n-w, s-j).

    Equals the sum of all degree-s parity characters evaluated at any point
    of Hamming weight w.
    """
    if not (0 <= s <= n and 0 <= w <= n):
        raise ValueError("need 0 <= s, w <= n")
    return sum((-1) ** j * comb(w, j) * comb(n - w, s - j) for j in range(min(s, w) + 1))


def _parity_level_correlation(psi: SymmetricWeightFunction, s: int) -> Fraction:
    """Sum over x of psi(x) * (sum of all degree-s parities at x), exact.

    For a symmetric function this vanishes iff the correlation with every
    single degree-s parity vanishes.  Integer arithmetic: the denominator
    never matters for the zero test.
    """
    n = psi.n
    total = sum(psi.nums[t] * krawtchouk(s, t, n) for t in psi.support())
    return Fraction(total, psi.den)


def phd_check(psi: SymmetricWeightFunction, delta: int) -> bool:
    """True when psi is orthogonal to every polynomial of degree < delta."""
    if delta < 0:
        raise ValueError("delta must be non-negative")
    return all(_parity_level_correlation(psi, s) == 0 for s in range(min(delta, psi.n + 1)))


def phd_measure(psi: SymmetricWeightFunction) -> int:
    """Largest verified pure high degree: first s with nonzero parity sum."""
    for s in range(psi.n + 1):
        if _parity_level_correlation(psi, s) != 0:
            return s
    return psi.n + 1


# ---------------------------------------------------------------------------
# Decay condition
# ---------------------------------------------------------------------------


def _exp_bounds(x: Fraction, terms: int = 32) -> tuple[Fraction, Fraction]:
    """Certified rational bounds lo <= e^x <= hi for x >= 0."""
    if x < 0:
        raise ValueError("need x >= 0")
    term = Fraction(1)
    lo = Fraction(1)
    for i in range(1, terms + 1):
        term *= x / i
        lo += term
    ratio = x / (terms + 1)
    while ratio >= 1:
        # widen until the geometric tail bound applies
        terms *= 2
        term = Fraction(1)
        lo = Fraction(1)
        for i in range(1, terms + 1):
            term *= x / i
            lo += term
        ratio = x / (terms + 1)
    tail = term * ratio / (1 - ratio)
    return lo, lo + tail


def decay_check(omega: SymmetricWeightFunction, alpha, beta) -> bool:
    """Verify zero total, unit l1, and |w(t)| <= alpha * e^(-beta*t) / t^2.

    ``alpha`` and ``beta`` are exact rationals; the transcendental side is
    bracketed by certified rational Taylor bounds, refined until the
    comparison is decided, so no floats touch the verdict.
    """
    alpha = Fraction(alpha)
    beta = Fraction(beta)
    if alpha <= 0 or beta < 0:
        raise ValueError("need alpha > 0 and beta >= 0")
    if omega.total() != 0 or omega.l1() != 1:
        return False
    for t in range(1, omega.n + 1):
        w = abs(omega.level_mass(t))
        if w == 0:
            continue
        terms = 32
        while True:
            lo, hi = _exp_bounds(beta * t, terms)
            # want: w <= alpha / (e^(beta t) * t^2)
            if w * lo * t * t > alpha:
                return False
            if w * hi * t * t <= alpha:
                break
            terms *= 2
    return True


def largest_decay_beta(omega: SymmetricWeightFunction, alpha, *, bits: int = 20) -> Fraction:
    """Binary-search the largest beta (to 2^-bits) passing the decay check."""
    alpha = Fraction(alpha)
    lo, hi = Fraction(0), Fraction(4)
    if not decay_check(omega, alpha, lo):
        return Fraction(-1)
    while decay_check(omega, alpha, hi):
        hi *= 2
        if hi > 2**16:
            return hi
    for _ in range(bits):
        mid = (lo + hi) / 2
        if decay_check(omega, alpha, mid):
            lo = mid
        else:
            hi = mid
    return lo


# ---------------------------------------------------------------------------
# Threshold-side masses and the two-point outer dual
# ---------------------------------------------------------------------------


def false_mass(psi: SymmetricWeightFunction, k: int) -> tuple[Fraction, Fraction]:
    """(false-positive mass, false-negative mass) of psi against THR_k.

    False positive: psi > 0 on a point of weight >= k (threshold true).
    False negative: psi < 0 on a point of weight < k (threshold false).
    """
    plus = sum((x for t, x in enumerate(psi.nums) if t >= k and x > 0), 0)
    minus = sum((-x for t, x in enumerate(psi.nums) if t < k and x < 0), 0)
    return Fraction(plus, psi.den), Fraction(minus, psi.den)


@dataclass(frozen=True)
class PointMassDual:
    """Two-point outer dual: mass -1/2 at the all-true point, +1/2 at all-false."""

    r: int
    value_at_all_true: Fraction = Fraction(-1, 2)
    value_at_all_false: Fraction = Fraction(1, 2)

    def __post_init__(self):
        if self.r < 1:
            raise ValueError("dimension must be >= 1")
        if abs(self.value_at_all_true) + abs(self.value_at_all_false) != 1:
            raise ValueError("l1 must equal 1")
        if self.value_at_all_true + self.value_at_all_false != 0:
            raise ValueError("values must sum to 0")

    def value(self, z: Sequence[int]) -> Fraction:
        if len(z) != self.r:
            raise ValueError("pattern length mismatch")
        if all(b == -1 for b in z):
            return self.value_at_all_true
        if all(b == 1 for b in z):
            return self.value_at_all_false
        return Fraction(0)

    def l1(self) -> Fraction:
        return abs(self.value_at_all_true) + abs(self.value_at_all_false)

    def total(self) -> Fraction:
        return self.value_at_all_true + self.value_at_all_false


def gapor_dual(r: int) -> PointMassDual:
    return PointMassDual(r)


# ---------------------------------------------------------------------------
# Block composition
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class BlockClassTable:
    """Per-sign/threshold aggregated masses of an inner witness.

    ``a[(sign, thr)]`` is the total level mass with the given psi sign and
    threshold value; the flip probabilities 2*a[...] drive every composed
    quantity (l1, identities, correlation) analytically.
    """

    n: int
    k: int
    a_pos_true: Fraction  # sign +1, THR = -1 (false positive)
    a_pos_false: Fraction  # sign +1, THR = +1
    a_neg_true: Fraction  # sign -1, THR = -1
    a_neg_false: Fraction  # sign -1, THR = +1 (false negative)

    @classmethod
    def from_witness(cls, psi: SymmetricWeightFunction, k: int) -> "BlockClassTable":
        cells = {(1, -1): 0, (1, 1): 0, (-1, -1): 0, (-1, 1): 0}
        for t, x in enumerate(psi.nums):
            if x == 0:
                continue
            sign = -1 if x < 0 else 1
            thr = -1 if t >= k else 1
            cells[(sign, thr)] += abs(x)
        den = psi.den
        return cls(
            n=psi.n,
            k=k,
            a_pos_true=Fraction(cells[(1, -1)], den),
            a_pos_false=Fraction(cells[(1, 1)], den),
            a_neg_true=Fraction(cells[(-1, -1)], den),
            a_neg_false=Fraction(cells[(-1, 1)], den),
        )

    @property
    def positive_mass(self) -> Fraction:
        return self.a_pos_true + self.a_pos_false

    @property
    def negative_mass(self) -> Fraction:
        return self.a_neg_true + self.a_neg_false

    def flip_probability(self, sign: int) -> Fraction:
        """P(THR disagrees with the block sign | block sign) = 2 * false mass."""
        if sign == 1:
            return 2 * self.a_pos_true
        if sign == -1:
            return 2 * self.a_neg_false
        raise ValueError("sign must be +1 or -1")


def _require_composable(phi: PointMassDual, psi: SymmetricWeightFunction) -> None:
    if phi.l1() != 1 or phi.total() != 0:
        raise ValueError("outer dual must have unit l1 and zero total")
    if psi.l1() != 1:
        raise ValueError("inner witness must have unit l1")
    if psi.total() != 0:
        raise ValueError("inner witness must have zero total")


def block_compose_eval(
    phi: PointMassDual, psi: SymmetricWeightFunction, blocks: Sequence[Sequence[int]]
) -> Fraction:
    """(phi * psi)(x) = 2^R phi(sgn psi(x_1),...,sgn psi(x_R)) prod |psi(x_i)|."""
    r = phi.r
    if len(blocks) != r:
        raise ValueError("block count mismatch")
    signs = []
    mag = Fraction(1)
    for block in blocks:
        if len(block) != psi.n:
            raise ValueError("block dimension mismatch")
        t = sum(1 for b in block if b == -1)
        v = psi.point_value(t)
        signs.append(-1 if v < 0 else 1)
        mag *= abs(v)
    return (2**r) * phi.value(signs) * mag


def block_l1(phi: PointMassDual, psi: SymmetricWeightFunction) -> Fraction:
    """l1 of the composed dual, computed analytically.

    Conditioning on the per-block sign pattern, l1 factorizes as
    2^R * [ |phi(-1^R)| * P(-)^R + |phi(1^R)| * P(+)^R ] where P(+-) are the
    sign masses of the inner witness; those masses are each exactly 1/2
    whenever the inner witness has zero total and unit l1.
    """
    _require_composable(phi, psi)
    table = BlockClassTable.from_witness(psi, k=1)
    r = phi.r
    return (2**r) * (
        abs(phi.value_at_all_true) * table.negative_mass**r
        + abs(phi.value_at_all_false) * table.positive_mass**r
    )


def _or_value(bits: Sequence[int]) -> int:
    """OR in the -1/+1 convention: -1 iff any input is -1."""
    return -1 if any(b == -1 for b in bits) else 1


def _thr_value(block: Sequence[int], k: int) -> int:
    return -1 if sum(1 for b in block if b == -1) >= k else 1


def block_identity_check(
    phi: PointMassDual,
    psi: SymmetricWeightFunction,
    s_predicate: Callable[[tuple], bool],
    g: Callable[[Sequence[int]], int],
    h: Callable[[Sequence[int]], int],
) -> tuple[tuple[Fraction, Fraction], tuple[Fraction, Fraction]]:
    """Exact evaluation of both composed-dual identities on tiny dimensions.

    Item 1: sum over x in S of |(phi*psi)(x)| against the conditional
    lambda-product form.  Item 2: the full correlation of (phi*psi) with
    g(h(...)) against the sign-flip expectation form.  Returns
    ((lhs1, rhs1), (lhs2, rhs2)); both pairs must match exactly for any
    inner witness with unit l1 and zero total.
    """
    _require_composable(phi, psi)
    n, r = psi.n, phi.r
    if n * r > 20:
        raise ValueError("enumeration limited to n*r <= 20")

    points = list(_hypercube(n))
    lam = {p: abs(psi.point_value(_weight(p))) for p in points}
    sgn = {p: (-1 if psi.point_value(_weight(p)) < 0 else 1) for p in points}

    lhs1 = Fraction(0)
    lhs2 = Fraction(0)
    joint: dict[tuple, Fraction] = {}
    for blocks in _hypercube_blocks(points, r):
        x = tuple(b for blk in blocks for b in blk)
        val = block_compose_eval(phi, psi, blocks)
        if s_predicate(x):
            lhs1 += abs(val)
        lhs2 += val * g([h(blk) for blk in blocks])
        pattern = tuple(sgn[blk] for blk in blocks)
        weight = Fraction(1)
        for blk in blocks:
            weight *= lam[blk]
        if s_predicate(x):
            key = pattern
            joint[key] = joint.get(key, Fraction(0)) + weight

    # Item 1 right-hand side: sum_z |phi(z)| P(x in S | pattern = z); the
    # pattern probability is exactly 2^-R by the half-half sign masses.
    rhs1 = Fraction(0)
    for z in ((-1,) * r, (1,) * r):
        rhs1 += abs(phi.value(z)) * joint.get(z, Fraction(0)) * (2**r)

    # Item 2 right-hand side: sum_z phi(z) E_{y ~ mu(z)}[g(y .* z)], where
    # the per-block flip probability mu^b(-1) = 2 * (mass where the sign of
    # psi is b but h disagrees) comes straight from the supplied h.
    flip_mass = {1: Fraction(0), -1: Fraction(0)}
    for p in points:
        v = psi.point_value(_weight(p))
        b = -1 if v < 0 else 1
        if h(p) != b:
            flip_mass[b] += abs(v)
    rhs2 = Fraction(0)
    for z in ((-1,) * r, (1,) * r):
        pz = phi.value(z)
        if pz == 0:
            continue
        expectation = Fraction(0)
        flip = [2 * flip_mass[zi] for zi in z]
        for ybits in _hypercube(r):
            wt = Fraction(1)
            for yi, fp in zip(ybits, flip):
                wt *= fp if yi == -1 else 1 - fp
            expectation += wt * g([yi * zi for yi, zi in zip(ybits, z)])
        rhs2 += pz * expectation
    return (lhs1, rhs1), (lhs2, rhs2)


def _weight(x: Sequence[int]) -> int:
    return sum(1 for b in x if b == -1)


def _hypercube(n: int):
    for mask in range(2**n):
        yield tuple(-1 if (mask >> i) & 1 else 1 for i in range(n))


def _hypercube_blocks(points: list, r: int):
    from itertools import product as _product

    return _product(points, repeat=r)


# ---------------------------------------------------------------------------
# Correlation with the gapped composition, exact and closed-form bound
# ---------------------------------------------------------------------------


def _ceil_fraction(x: Fraction) -> int:
    return -((-x.numerator) // x.denominator)


def _floor_fraction(x: Fraction) -> int:
    return x.numerator // x.denominator


def _binomial_pmf(r: int, p: Fraction) -> list[Fraction]:
    q = 1 - p
    pmf = []
    for j in range(r + 1):
        pmf.append(comb(r, j) * p**j * q ** (r - j))
    return pmf


def correlation(
    phi: PointMassDual, psi: SymmetricWeightFunction, k: int, gamma
) -> Fraction:
    """Exact correlation-minus-penalty of the composed dual.

    Computes  sum_{x in D} (phi*psi)(x) f(x) - sum_{x not in D} |(phi*psi)(x)|
    where f is the gapped-OR of per-block thresholds and D is its promise
    domain: the threshold pattern is either all-false or has at least
    gamma*R true blocks.  Everything reduces to two binomial mixtures via
    the class table: conditioned on the sign pattern, each block's
    threshold value disagrees with its sign independently with probability
    2 * (false mass).
    """
    gamma = Fraction(gamma)
    if not 0 < gamma < Fraction(1, 4 ** (k - 1)):
        raise ValueError("gamma must lie in (0, 4^-(k-1))")
    _require_composable(phi, psi)
    r = phi.r
    table = BlockClassTable.from_witness(psi, k)

    # Sign pattern all +1 (claimed all-false): J ~ Bin(R, p_fp) blocks are
    # actually true.  J = 0 lands in D with f = +1; J >= gamma R lands in D
    # with f = -1; 0 < J < gamma R falls outside D and is penalized.
    p_fp = table.flip_probability(1)
    pmf = _binomial_pmf(r, p_fp)
    j_hi = _ceil_fraction(gamma * r)  # smallest j with j >= gamma R
    p_zero = pmf[0]
    p_mid = sum(pmf[1:min(j_hi, r + 1)], Fraction(0))
    p_reject = sum(pmf[min(j_hi, r + 1):], Fraction(0))
    plus_side = phi.value_at_all_false * (p_zero - p_reject) - abs(
        phi.value_at_all_false
    ) * p_mid

    # Sign pattern all -1 (claimed all-true): J' ~ Bin(R, p_fn) blocks are
    # actually false.  The true-block count R - J' meets the gap when
    # J' <= R - gamma R; J' = R gives the all-false pattern (f = +1);
    # anything between falls outside D.
    p_fn = table.flip_probability(-1)
    pmf2 = _binomial_pmf(r, p_fn)
    j_lo = _floor_fraction(r - gamma * r)  # largest j' with R - j' >= gamma R
    p_gap = sum(pmf2[: j_lo + 1], Fraction(0))
    p_all_false = pmf2[r]
    p_mid2 = sum(pmf2[j_lo + 1 : r], Fraction(0))
    minus_side = (
        phi.value_at_all_true * (-p_gap + p_all_false)
        - abs(phi.value_at_all_true) * p_mid2
    )
    return plus_side + minus_side


def bound_formula(n: int, r: int, k: int, gamma) -> float:
    """Closed-form correlation lower bound 1 - R/(16N) - e^(-R/4^(k-1)) - e^(-2R(4^-(k-1)-gamma)^2)."""
    gamma = float(gamma)
    return (
        1.0
        - r / (16.0 * n)
        - exp(-r / 4.0 ** (k - 1))
        - exp(-2.0 * r * (1.0 / 4 ** (k - 1) - gamma) ** 2)
    )


def bound_terms(n: int, r: int, k: int, gamma) -> dict:
    """Individual terms of the closed-form bound, with both mass-term variants."""
    gamma = float(gamma)
    return {
        "false_positive_term_16": r / (16.0 * n),
        "false_positive_term_48": r / (48.0 * n),
        "gap_miss_term": exp(-r / 4.0 ** (k - 1)),
        "chernoff_term": exp(-2.0 * r * (1.0 / 4 ** (k - 1) - gamma) ** 2),
    }


def domain_membership(
    weights: Sequence[int],
    k: int,
    gamma,
    n: int,
    r: int,
    hamming_cap: Optional[int] = None,
) -> str:
    """Classify a per-block weight profile: 'in-D', 'out-D', or 'over-cap'.

    The profile is in the promise domain when the count of threshold-true
    blocks is 0 or at least gamma * R; the total weight must not exceed the
    cap (default N).
    """
    gamma = Fraction(gamma)
    if len(weights) != r:
        raise ValueError("need one weight per block")
    if any(not 0 <= w <= n for w in weights):
        raise ValueError("block weight out of range")
    cap = n if hamming_cap is None else hamming_cap
    if sum(weights) > cap:
        return "over-cap"
    true_blocks = sum(1 for w in weights if w >= k)
    if true_blocks == 0 or true_blocks >= gamma * r:
        return "in-D"
    return "out-D"


def weights_of_point(x: Sequence[int], n: int, r: int) -> list[int]:
    """Per-block Hamming weights of a flat point in {-1,1}^(n*r)."""
    if len(x) != n * r:
        raise ValueError("point dimension mismatch")
    return [sum(1 for b in x[i * n : (i + 1) * n] if b == -1) for i in range(r)]
