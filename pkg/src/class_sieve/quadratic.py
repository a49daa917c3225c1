"""Quadratic fields by discriminant, and counts under local splitting conditions.

Two independent counting routes are provided: a direct scan of the census,
and an inclusion-exclusion over odd squares inside residue classes, split
into the D = 1 mod 4 branch and the D = 8, 12 mod 16 branch.
"""
from __future__ import annotations

import csv
import struct
from dataclasses import dataclass
from fractions import Fraction
from math import gcd, isqrt, pi
from pathlib import Path
from typing import Iterable, NamedTuple, Sequence

import numpy as np

from .arith import BoundExceeded, kronecker, kronecker_array, moebius, squarefree_range
from .densities import delta

SPLIT, INERT, RAMIFIED = "split", "inert", "ramified"
QUADRATIC_TYPES = (SPLIT, INERT, RAMIFIED)

MAX_X = 10**8
SEGMENT = 1 << 21

_SIGN_ALIASES = {"real": "real", "+": "real", "imaginary": "imaginary", "complex": "imaginary",
                 "-": "imaginary", "both": "both"}
_SIGN_CODE = {"both": 0, "real": 1, "imaginary": 2}


def normalize_sign(sign: str) -> str:
    try:
        return _SIGN_ALIASES[sign]
    except KeyError:
        raise ValueError(f"unknown sign {sign!r}") from None


def _signs(sign: str) -> tuple[int, ...]:
    sign = normalize_sign(sign)
    return {"real": (1,), "imaginary": (-1,), "both": (1, -1)}[sign]


class SplittingCondition(NamedTuple):
    p: int
    type: str


def conditions_from(pairs: Iterable) -> list[SplittingCondition]:
    conds = [SplittingCondition(int(p), str(t)) for p, t in pairs]
    ps = [c.p for c in conds]
    if len(set(ps)) != len(ps):
        raise ValueError("conditions must reference distinct primes")
    for c in conds:
        if c.type not in QUADRATIC_TYPES:
            raise ValueError(f"unknown quadratic splitting type {c.type!r}")
    return conds


@dataclass(frozen=True)
class QuadraticCensus:
    X: int
    sign: str
    discriminants: np.ndarray  # int64, ordered by (|D|, D)

    def __len__(self):
        return len(self.discriminants)

    def restrict(self, X: int, sign: str | None = None) -> "QuadraticCensus":
        D = self.discriminants
        keep = np.abs(D) <= X
        sign = self.sign if sign is None else normalize_sign(sign)
        if sign == "real":
            keep &= D > 0
        elif sign == "imaginary":
            keep &= D < 0
        if sign != self.sign and self.sign != "both":
            raise ValueError("cannot widen the sign of a census")
        if X > self.X:
            raise ValueError("cannot extend a census beyond its bound")
        return QuadraticCensus(X, sign, D[keep])


def _fundamental_mask(n: np.ndarray, oddsqf: np.ndarray, s: int) -> np.ndarray:
    """Which n make D = s*n fundamental, given n has no odd square factor."""
    D16 = (s * n) % 16
    ok = (D16 % 4 == 1) | (D16 == 8) | (D16 == 12)
    ok &= oddsqf
    if s == 1:
        ok &= n != 1
    return ok


def enumerate_quadratic(X: int, sign: str = "both", max_X: int = MAX_X) -> QuadraticCensus:
    if X < 1:
        raise ValueError("X must be >= 1")
    if X > max_X:
        raise BoundExceeded(f"X={X} exceeds the quadratic census bound {max_X}")
    sign = normalize_sign(sign)
    signs = _signs(sign)
    parts = []
    for lo in range(1, X + 1, SEGMENT):
        hi = min(lo + SEGMENT, X + 1)
        n = np.arange(lo, hi, dtype=np.int64)
        oddsqf = squarefree_range(lo, hi, odd_only=True)
        cols = []
        for s in signs:
            m = _fundamental_mask(n, oddsqf, s)
            cols.append((n[m], s))
        if len(cols) == 1:
            parts.append(cols[0][1] * cols[0][0])
        else:
            # order by (|D|, D): negative first at equal |D|
            keyed = np.concatenate([-cols[1][0], cols[0][0]])
            order = np.lexsort((keyed, np.abs(keyed)))
            parts.append(keyed[order])
    D = np.concatenate(parts) if parts else np.zeros(0, dtype=np.int64)
    return QuadraticCensus(X, sign, D.astype(np.int64))


def splitting_type_quadratic(D: int, p: int) -> str:
    k = kronecker(D, p)
    return RAMIFIED if k == 0 else (SPLIT if k == 1 else INERT)


def condition_mask(D: np.ndarray, conditions: Sequence[SplittingCondition]) -> np.ndarray:
    keep = np.ones(len(D), dtype=bool)
    want = {SPLIT: 1, INERT: -1, RAMIFIED: 0}
    for p, t in conditions:
        keep &= kronecker_array(D, p) == want[t]
    return keep


def count_with_conditions_direct(
    X: int, sign: str, conditions: Sequence = (), census: QuadraticCensus | None = None
) -> int:
    conds = conditions_from(conditions)
    if census is None:
        census = enumerate_quadratic(X, sign)
    else:
        census = census.restrict(X, sign)
    return int(condition_mask(census.discriminants, conds).sum())


# ---- inclusion-exclusion ----------------------------------------------------

def _two_adic(branch: str, cond2: str | None) -> tuple[int, tuple[int, ...]] | None:
    """Modulus 2^g and allowed residues of D for one branch, or None if empty."""
    if branch == "odd":
        if cond2 == RAMIFIED:
            return None
        if cond2 == SPLIT:
            return 8, (1,)
        if cond2 == INERT:
            return 8, (5,)
        return 4, (1,)
    if cond2 in (SPLIT, INERT):
        return None
    return 16, (8, 12)


class _Plan(NamedTuple):
    s: int
    m2: int
    allowed2: tuple[int, ...]
    e_res: tuple[tuple[int, int], ...]  # (p, +1 | -1) for split/inert odd primes
    e0: int  # product of odd ramified primes


def _residue_set(plan: _Plan, L: int) -> tuple[int, np.ndarray]:
    """Residues k mod m with n = L*k meeting the 2-adic and odd split/inert conditions."""
    m = plan.m2
    k = np.arange(plan.m2, dtype=np.int64)
    ok2 = np.isin((plan.s * L * k) % plan.m2, plan.allowed2)
    mask = ok2
    for p, want in plan.e_res:
        kp = np.arange(p, dtype=np.int64)
        okp = kronecker_array(plan.s * L * kp, p) == want
        # CRT product of the two residue systems
        mm = m * p
        r = np.arange(mm, dtype=np.int64)
        mask = mask[r % m] & okp[r % p]
        m = mm
    pref = np.concatenate([[0], np.cumsum(mask)]).astype(np.int64)
    return m, pref


def _count_upto(K, m, pref):
    """#{1 <= k <= K : k mod m in R}; residue 0 is never in R."""
    return ((K + 1) // m) * pref[-1] + pref[(K + 1) % m]


def _plans(sign: str, conditions: Sequence[SplittingCondition]):
    conds = conditions_from(conditions)
    cond2 = next((c.type for c in conds if c.p == 2), None)
    odd = [c for c in conds if c.p != 2]
    e_res = tuple((c.p, 1 if c.type == SPLIT else -1) for c in odd if c.type != RAMIFIED)
    e0 = 1
    for c in odd:
        if c.type == RAMIFIED:
            e0 *= c.p
    for s in _signs(sign):
        for branch in ("odd", "even"):
            ta = _two_adic(branch, cond2)
            if ta is None:
                continue
            yield branch, _Plan(s, ta[0], ta[1], e_res, e0), conds


def _squarefree_d(limit: int, coprime_to: int):
    """Odd squarefree d <= limit coprime to the given modulus, with mu(d)."""
    for d in range(1, limit + 1, 2):
        if gcd(d, coprime_to) != 1:
            continue
        mu = moebius(d)
        if mu:
            yield d, mu


def _spurious_one(s: int, conds: Sequence[SplittingCondition]) -> bool:
    # n = 1 with D = +1 passes every branch test when all conditions are "split"
    return s == 1 and all(c.type == SPLIT for c in conds)


def count_with_conditions_sieve(X: int, sign: str, conditions: Sequence = ()) -> int:
    if X < 1:
        raise ValueError("X must be >= 1")
    total = 0
    for branch, plan, conds in _plans(sign, conditions):
        e_split = 1
        for p, _ in plan.e_res:
            e_split *= p
        cache: dict = {}
        for d, mu in _squarefree_d(isqrt(X), e_split):
            L = d * d * plan.e0 // gcd(d, plan.e0)
            if L > X:
                continue
            K = X // L
            key = (L % plan.m2,) + tuple(kronecker(plan.s * L, p) for p, _ in plan.e_res)
            if key not in cache:
                cache[key] = _residue_set(plan, L)
            m, pref = cache[key]
            total += mu * int(_count_upto(K, m, pref))
        if branch == "odd" and _spurious_one(plan.s, conds):
            total -= 1
    return total


def sieve_counts_upto(Xmax: int, sign: str, conditions: Sequence = ()) -> np.ndarray:
    """Inclusion-exclusion counts for every X in 0..Xmax at once."""
    out = np.zeros(Xmax + 1, dtype=np.int64)
    for branch, plan, conds in _plans(sign, conditions):
        e_split = 1
        for p, _ in plan.e_res:
            e_split *= p
        cache: dict = {}
        for d, mu in _squarefree_d(isqrt(Xmax), e_split):
            L = d * d * plan.e0 // gcd(d, plan.e0)
            if L > Xmax:
                continue
            key = (L % plan.m2,) + tuple(kronecker(plan.s * L, p) for p, _ in plan.e_res)
            if key not in cache:
                cache[key] = _residue_set(plan, L)
            m, pref = cache[key]
            K = np.arange(Xmax // L + 1, dtype=np.int64)
            cnt = _count_upto(K, m, pref)
            out[K[1:] * L] += mu * np.diff(cnt)
        if branch == "odd" and _spurious_one(plan.s, conds) and Xmax >= 1:
            out[1] -= 1
    return np.cumsum(out)


def direct_counts_upto(Xmax: int, sign: str, conditions: Sequence = (),
                       census: QuadraticCensus | None = None) -> np.ndarray:
    conds = conditions_from(conditions)
    census = enumerate_quadratic(Xmax, sign) if census is None else census.restrict(Xmax, sign)
    D = census.discriminants
    hits = np.abs(D[condition_mask(D, conds)])
    return np.cumsum(np.bincount(hits, minlength=Xmax + 1)[: Xmax + 1])


# ---- predictions ------------------------------------------------------------

ZETA2 = pi * pi / 6


def density_prediction_quadratic(conditions: Sequence = ()) -> Fraction:
    out = Fraction(1)
    for p, t in conditions_from(conditions):
        out *= delta(2, t, p)
    return out


def main_term(X: float, sign: str, conditions: Sequence = ()) -> float:
    """delta_P * X / (2 zeta(2)) per sign."""
    return float(density_prediction_quadratic(conditions)) * len(_signs(sign)) * X / (2 * ZETA2)


def modulus(conditions: Sequence) -> int:
    e = 1
    for p, _ in conditions_from(conditions):
        e *= p
    return e


def fit_error_constant(counts: Iterable[tuple[int, str, Sequence, int]]) -> float:
    """Smallest C with |N(X;P) - main term| <= C e sqrt(X) over the given rows."""
    C = 0.0
    for X, sign, conds, n in counts:
        dev = abs(n - main_term(X, sign, conds))
        C = max(C, dev / (modulus(conds) * X**0.5))
    return C


# ---- persistence --------------------------------------------------------------

_QHEAD = struct.Struct("<4sIQB")


def write_census(path: str | Path, census: QuadraticCensus) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_suffix(path.suffix + ".tmp")
    with open(tmp, "wb") as fh:
        fh.write(_QHEAD.pack(b"QCEN", 1, census.X, _SIGN_CODE[census.sign]))
        fh.write(census.discriminants.astype("<i8").tobytes())
    tmp.replace(path)


def read_census(path: str | Path) -> QuadraticCensus:
    raw = Path(path).read_bytes()
    magic, version, X, code = _QHEAD.unpack_from(raw)
    if magic != b"QCEN" or version != 1:
        raise ValueError(f"{path}: not a quadratic census file")
    sign = {v: k for k, v in _SIGN_CODE.items()}[code]
    D = np.frombuffer(raw, dtype="<i8", offset=_QHEAD.size).astype(np.int64)
    return QuadraticCensus(int(X), sign, D)


def write_csv(path: str | Path, census: QuadraticCensus) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["D", "sign"])
        for D in census.discriminants.tolist():
            w.writerow([D, "real" if D > 0 else "imaginary"])
