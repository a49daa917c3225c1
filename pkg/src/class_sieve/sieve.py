"""Exact second-moment (Chebyshev) sieve over a finite family.

A family of N items and a set of primes p <= z; each item either lies in
A_p or not. With densities delta_p, remainders are R_p = #A_p - delta_p N
and R_pq = #A_pq - delta_p delta_q N (R_pp = R_p). Everything is computed in
exact rationals so the mean and variance identities can be checked with ==.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from math import log
from typing import Callable, Mapping, Sequence

import numpy as np

from .arith import primes_up_to
from .densities import split_density


class UndefinedBound(ZeroDivisionError):
    """The sieve bound needs a positive mean."""


@dataclass(frozen=True)
class SieveInstance:
    membership: np.ndarray  # bool, shape (N, len(primes))
    primes: tuple[int, ...]
    densities: Mapping[int, Fraction]
    z: float
    items: Sequence | None = None

    def __post_init__(self):
        m = self.membership
        if m.ndim != 2 or m.shape[1] != len(self.primes):
            raise ValueError("membership must be N x len(primes)")
        if m.shape[0] == 0:
            raise ValueError("empty family")
        for p in self.primes:
            d = self.densities[p]
            if not 0 <= d < 1:
                raise ValueError(f"density for p={p} must lie in [0, 1), got {d}")

    @property
    def N(self) -> int:
        return self.membership.shape[0]

    @classmethod
    def from_oracle(cls, items: Sequence, member: Callable[[object, int], bool],
                    densities: Mapping[int, Fraction] | Callable[[int], Fraction], z: float):
        primes = tuple(primes_up_to(int(z)))
        dens = {p: Fraction(densities(p) if callable(densities) else densities[p]) for p in primes}
        m = np.array([[bool(member(a, p)) for p in primes] for a in items], dtype=bool)
        m = m.reshape(len(items), len(primes))
        return cls(m, primes, dens, z, items)

    @classmethod
    def from_matrix(cls, membership, primes, densities, z, items=None):
        dens = {p: Fraction(densities[p]) for p in primes}
        return cls(np.asarray(membership, dtype=bool), tuple(primes), dens, z, items)

    def item_counts(self) -> np.ndarray:
        """N(a): number of p <= z with a in A_p."""
        return self.membership.sum(axis=1)


@dataclass(frozen=True)
class SieveStats:
    N: int
    primes: tuple[int, ...]
    counts: dict[int, int]
    pair_counts: np.ndarray  # #A_pq, diagonal holds #A_p
    R: dict[int, Fraction]
    R_pair: dict[tuple[int, int], Fraction]
    U: Fraction
    M: Fraction
    variance: Fraction
    histogram: np.ndarray  # histogram[k] = #{a : N(a) = k}


def compute_stats(inst: SieveInstance) -> SieveStats:
    if inst.z < 2:
        raise ValueError("need z >= 2")
    N = inst.N
    A = inst.membership.astype(np.int64)
    pair = A.T @ A
    primes = inst.primes
    dens = inst.densities
    counts = {p: int(pair[i, i]) for i, p in enumerate(primes)}
    R = {p: counts[p] - dens[p] * N for p in primes}
    R_pair = {}
    for i, p in enumerate(primes):
        for j, q in enumerate(primes):
            R_pair[p, q] = R[p] if i == j else int(pair[i, j]) - dens[p] * dens[q] * N
    U = sum((dens[p] for p in primes), Fraction(0))
    M = Fraction(sum(counts.values()), N)
    hist = np.bincount(inst.item_counts(), minlength=len(primes) + 1)
    var = sum((int(h) * (k - M) ** 2 for k, h in enumerate(hist) if h), Fraction(0)) / N
    return SieveStats(N, primes, counts, pair, R, R_pair, U, M, var, hist)


def mean_identity_holds(stats: SieveStats) -> bool:
    return stats.M == stats.U + sum(stats.R.values(), Fraction(0)) / stats.N


def variance_rhs(stats: SieveStats, dens: Mapping[int, Fraction]) -> Fraction:
    N = stats.N
    r = sum(stats.R.values(), Fraction(0)) / N
    return (
        sum((dens[p] * (1 - dens[p]) for p in stats.primes), Fraction(0))
        + sum(stats.R_pair.values(), Fraction(0)) / N
        - 2 * stats.U * r
        - r * r
    )


@dataclass(frozen=True)
class IdentityReport:
    lhs: Fraction
    rhs: Fraction
    mean: Fraction
    mean_rhs: Fraction

    @property
    def holds(self) -> bool:
        return self.lhs == self.rhs and self.mean == self.mean_rhs


def variance_identity_check(inst: SieveInstance, stats: SieveStats | None = None) -> IdentityReport:
    stats = compute_stats(inst) if stats is None else stats
    # LHS from power sums of N(a), independent of the histogram used in compute_stats
    M, N = stats.M, stats.N
    na = inst.item_counts().astype(np.int64)
    s1, s2 = int(na.sum()), int((na * na).sum())
    lhs = (s2 - 2 * M * s1 + N * M * M) / N
    mean_rhs = stats.U + sum(stats.R.values(), Fraction(0)) / stats.N
    return IdentityReport(lhs, variance_rhs(stats, inst.densities), M, mean_rhs)


@dataclass(frozen=True)
class ExceptionalSet:
    threshold: Fraction
    members: np.ndarray  # item indices with N(a) <= threshold

    @property
    def E(self) -> int:
        return len(self.members)


def exceptional_set(inst: SieveInstance, threshold) -> ExceptionalSet:
    threshold = Fraction(threshold)
    counts = inst.item_counts()
    # N(a) is an integer, so N(a) <= t iff N(a) <= floor(t)
    members = np.flatnonzero(counts <= (threshold.numerator // threshold.denominator))
    return ExceptionalSet(threshold, members)


def lemma_rhs(stats: SieveStats) -> Fraction:
    if stats.M == 0:
        raise UndefinedBound("mean M(z) is zero")
    N = stats.N
    sR = sum((abs(r) for r in stats.R.values()), Fraction(0))
    sRR = sum((abs(r) for r in stats.R_pair.values()), Fraction(0))
    U = stats.U
    return 4 * N / stats.M**2 * (U + sRR / N + 2 * U / N * sR + (sR / N) ** 2)


@dataclass(frozen=True)
class Certificate:
    N: int
    z: float
    primes: tuple[int, ...]
    U: Fraction
    M: Fraction
    E: int
    RHS: Fraction
    holds: bool
    per_prime: list
    variance_identity: bool
    mean_identity: bool

    def to_json(self) -> str:
        return json.dumps(self.as_dict(), indent=2)

    def as_dict(self) -> dict:
        return {
            "N": self.N,
            "z": self.z,
            "primes": list(self.primes),
            "U": str(self.U),
            "M": str(self.M),
            "E": self.E,
            "RHS": str(self.RHS),
            "holds": self.holds,
            "per_prime": self.per_prime,
            "variance_identity": self.variance_identity,
            "mean_identity": self.mean_identity,
        }


def certify_lemma(inst: SieveInstance) -> Certificate:
    stats = compute_stats(inst)
    rhs = lemma_rhs(stats)
    E = exceptional_set(inst, stats.M / 2).E
    ident = variance_identity_check(inst, stats)
    per = [{"p": p, "count": stats.counts[p], "R_p": str(stats.R[p])} for p in stats.primes]
    return Certificate(stats.N, inst.z, stats.primes, stats.U, stats.M, E, rhs, E <= rhs, per,
                       ident.lhs == ident.rhs, ident.mean == ident.mean_rhs)


# ---- concrete families --------------------------------------------------------------

def synthetic_instance(rng: np.random.Generator, max_items: int = 10_000, zmax: int = 50,
                       planted: bool | None = None) -> SieveInstance:
    """Random memberships; densities either planted or the empirical frequencies."""
    N = int(rng.integers(1, max_items + 1))
    z = int(rng.integers(2, zmax + 1))
    primes = tuple(primes_up_to(z))
    probs = rng.uniform(0.0, 0.95, size=len(primes))
    m = rng.random((N, len(primes))) < probs
    if not m.any():
        m[0, 0] = True
    if planted is None:
        planted = bool(rng.integers(0, 2))
    dens = {}
    for i, p in enumerate(primes):
        if planted:
            dens[p] = Fraction(round(probs[i] * 1000), 1000)
        else:
            c = int(m[:, i].sum())
            dens[p] = Fraction(c, N) if c < N else Fraction(N - 1, N)
    return SieveInstance(m, primes, dens, float(z))


def quadratic_instance(X: int, delta, census=None) -> SieveInstance:
    """All quadratic fields with |D| <= X; A_p = fields where p splits; z = (X/2)^delta."""
    from .arith import kronecker_array
    from .quadratic import enumerate_quadratic

    census = enumerate_quadratic(X, "both") if census is None else census.restrict(X, "both")
    z = (X / 2) ** float(Fraction(delta))
    primes = tuple(primes_up_to(int(z)))
    D = census.discriminants
    m = np.column_stack([kronecker_array(D, p) == 1 for p in primes]) if primes else \
        np.zeros((len(D), 0), dtype=bool)
    return SieveInstance(m, primes, {p: split_density(2, p) for p in primes}, z)


def cubic_instance(X: int, delta, census=None) -> SieveInstance:
    from .cubic import enumerate_cubic, split_mask

    census = enumerate_cubic(X) if census is None else census.restrict(X)
    z = (X / 2) ** float(Fraction(delta))
    primes = tuple(primes_up_to(int(z)))
    m = np.column_stack([split_mask(census, p) for p in primes]) if primes else \
        np.zeros((len(census), 0), dtype=bool)
    return SieveInstance(m, primes, {p: split_density(3, p) for p in primes}, z)


# ---- size of U(z) -----------------------------------------------------------------

@dataclass(frozen=True)
class UBoundsReport:
    d: int
    z: float
    U: Fraction
    n_primes: int
    lower: Fraction  # split density at p = 2
    upper: Fraction  # 1/d!
    exact_holds: bool  # lower * pi(z) <= U <= upper * pi(z)
    ratio: float  # U / (z / log z)
    slack: float  # fitted constant K in units of z / log^2 z

    @property
    def within(self) -> bool:
        """Ratio inside [lower, upper] after the fitted slack."""
        w = self.slack / log(self.z)
        return float(self.lower) - w <= self.ratio <= float(self.upper) + w


_UPPER = {2: Fraction(1, 2), 3: Fraction(1, 6), 4: Fraction(1, 24), 5: Fraction(1, 120)}


def u_value(d: int, z: float) -> Fraction:
    return sum((split_density(d, p) for p in primes_up_to(int(z))), Fraction(0))


def u_bounds_check(d: int, z: float) -> UBoundsReport:
    if z < 10:
        raise ValueError("need z >= 10")
    primes = primes_up_to(int(z))
    U = sum((split_density(d, p) for p in primes), Fraction(0))
    lower, upper = split_density(d, 2), _UPPER[d]
    k = len(primes)
    exact = lower * k <= U <= upper * k
    L = log(z)
    ratio = float(U) / (z / L)
    # smallest K with lower - K/log z <= ratio <= upper + K/log z
    slack = max(0.0, (float(lower) - ratio) * L, (ratio - float(upper)) * L)
    return UBoundsReport(d, z, U, k, lower, upper, exact, ratio, slack)


def mean_window(stats: SieveStats, z: float) -> float:
    """M(z) / (z / log z)."""
    return float(stats.M) / (z / log(z))


def fit_window(ratios: Sequence[float]) -> tuple[float, float]:
    """Fitted (c0, c1) covering the measured M(z)/(z/log z) values."""
    vals = [r for r in ratios if r > 0]
    if not vals:
        raise ValueError("no positive mean ratios to fit")
    return min(vals), max(vals)
