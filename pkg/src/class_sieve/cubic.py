"""Cubic fields as classes of maximal irreducible binary cubic forms.

Negative discriminants: F = (x - t y) q(x, y) with q positive definite; F is
reduced when q is, i.e. 0 < b + a t < a < -d/t. Those are strict for
irreducible F, so each class has exactly one reduced form with a > 0.

Positive discriminants: reduce the Hessian H = (b^2 - 3ac, bc - 9ad, c^2 - 3bd)
to 0 <= Q <= P <= R. On the boundary of that domain several forms of one
class survive; the lexicographically largest one is kept.
"""
from __future__ import annotations

import csv
import struct
from dataclasses import dataclass
from math import isqrt
from pathlib import Path
from typing import NamedTuple

import numba
import numpy as np

from .arith import BoundExceeded, prime_sieve

MAX_X = 10**7

_SIGN_ALIASES = {"real": "real", "+": "real", "complex": "complex", "imaginary": "complex",
                 "-": "complex", "both": "both"}


def normalize_sign(sign: str) -> str:
    try:
        return _SIGN_ALIASES[sign]
    except KeyError:
        raise ValueError(f"unknown sign {sign!r}") from None


def cubic_disc(a: int, b: int, c: int, d: int) -> int:
    return b * b * c * c - 4 * a * c**3 - 4 * b**3 * d - 27 * a * a * d * d + 18 * a * b * c * d


class CubicForm(NamedTuple):
    a: int
    b: int
    c: int
    d: int

    @property
    def disc(self) -> int:
        return cubic_disc(*self)

    def __call__(self, x: int, y: int) -> int:
        a, b, c, d = self
        return a * x**3 + b * x * x * y + c * x * y * y + d * y**3

    def hessian(self) -> tuple[int, int, int]:
        a, b, c, d = self
        return b * b - 3 * a * c, b * c - 9 * a * d, c * c - 3 * b * d


# ---- compiled kernel -----------------------------------------------------------

@numba.njit(cache=True)
def _spf_table(n):
    spf = np.zeros(n + 1, dtype=np.int32)
    for i in range(2, n + 1):
        if spf[i] == 0:
            for j in range(i, n + 1, i):
                if spf[j] == 0:
                    spf[j] = i
    return spf


@numba.njit(cache=True)
def _disc(a, b, c, d):
    return b * b * c * c - 4 * a * c * c * c - 4 * b * b * b * d - 27 * a * a * d * d + 18 * a * b * c * d


@numba.njit(cache=True)
def _has_rational_root(a, b, c, d):
    if a == 0 or d == 0:
        return True
    ad = abs(d)
    aa = abs(a)
    for q in range(1, aa + 1):
        if aa % q:
            continue
        i = 1
        while i * i <= ad:
            if ad % i == 0:
                for p in (i, ad // i):
                    for s in (1, -1):
                        x = s * p
                        if a * x * x * x + b * x * x * q + c * x * q * q + d * q * q * q == 0:
                            return True
            i += 1
    return False


@numba.njit(cache=True)
def _maximal_at(a, b, c, d, p):
    if a % p == 0 and b % p == 0 and c % p == 0 and d % p == 0:
        return False
    p2 = p * p
    if a % p == 0 and b % p == 0:
        return a % p2 != 0
    for r in range(p):
        if (((a * r + b) * r + c) * r + d) % p == 0 and ((3 * a * r + 2 * b) * r + c) % p == 0:
            return (((a * r + b) * r + c) * r + d) % p2 != 0
    return True


@numba.njit(cache=True)
def _is_maximal(a, b, c, d, D, spf):
    n = abs(D)
    while n > 1:
        p = spf[n]
        e = 0
        while n % p == 0:
            n //= p
            e += 1
        if e >= 2 and not _maximal_at(a, b, c, d, p):
            return False
    return True


@numba.njit(cache=True)
def _transform(a, b, c, d, al, be, ga, de):
    """Coefficients of F(al x + be y, ga x + de y)."""
    A = a * al**3 + b * al**2 * ga + c * al * ga**2 + d * ga**3
    B = (3 * a * al**2 * be + b * (al**2 * de + 2 * al * be * ga)
         + c * (be * ga**2 + 2 * al * ga * de) + 3 * d * ga**2 * de)
    C = (3 * a * al * be**2 + b * (be**2 * ga + 2 * al * be * de)
         + c * (al * de**2 + 2 * be * ga * de) + 3 * d * ga * de**2)
    Dd = a * be**3 + b * be**2 * de + c * be * de**2 + d * de**3
    return A, B, C, Dd


@numba.njit(cache=True)
def _small_gl2():
    out = np.zeros((48, 4), dtype=np.int64)
    k = 0
    for al in range(-1, 2):
        for be in range(-1, 2):
            for ga in range(-1, 2):
                for de in range(-1, 2):
                    det = al * de - be * ga
                    if det == 1 or det == -1:
                        out[k, 0] = al
                        out[k, 1] = be
                        out[k, 2] = ga
                        out[k, 3] = de
                        k += 1
    return out[:k]


@numba.njit(cache=True)
def _lex_greater(A, B, C, D, a, b, c, d):
    if A != a:
        return A > a
    if B != b:
        return B > b
    if C != c:
        return C > c
    return D > d


@numba.njit(cache=True)
def _canonical_positive(a, b, c, d, gl2):
    for k in range(gl2.shape[0]):
        A, B, C, Dd = _transform(a, b, c, d, gl2[k, 0], gl2[k, 1], gl2[k, 2], gl2[k, 3])
        P = B * B - 3 * A * C
        Q = B * C - 9 * A * Dd
        R = C * C - 3 * B * Dd
        if not (0 <= Q and Q <= P and P <= R):
            continue
        for s in (1, -1):
            if _lex_greater(s * A, s * B, s * C, s * Dd, a, b, c, d):
                return False
    return True


@numba.njit(cache=True)
def _push(out, k, a, b, c, d, D):
    if k < out.shape[0]:
        out[k, 0] = a
        out[k, 1] = b
        out[k, 2] = c
        out[k, 3] = d
        out[k, 4] = D
    return k + 1


@numba.njit(cache=True)
def _enum_negative(X, spf, out, k):
    amax = 1
    while 27 * (amax + 1) ** 4 <= 16 * X:
        amax += 1
    for a in range(1, amax + 1):
        theta = (X / 3.0) ** 0.25 / a + 0.5
        cmax_q = ((16.0 * a * a * X) ** (1.0 / 3.0) + a * a) / (4.0 * a)
        blo = int(np.floor(-a * theta)) - 1
        bhi = int(np.ceil(a + a * theta)) + 1
        cb = int(np.ceil(cmax_q + a * theta)) + 1
        for b in range(blo, bhi + 1):
            for c in range(-cb, cb + 1):
                # bc - ad > 0 and (a-b)^2 + c(a-b) + ad > 0
                num_lo = -((a - b) * (a - b) + c * (a - b))
                dlo = num_lo // a + 1
                dhi = -((-(b * c)) // a) - 1 if (b * c) % a == 0 else (b * c) // a
                for d in range(dlo, dhi + 1):
                    if d * d - a * a + a * c - b * d <= 0:
                        continue
                    D = _disc(a, b, c, d)
                    if D >= 0 or -D > X:
                        continue
                    if _has_rational_root(a, b, c, d):
                        continue
                    if not _is_maximal(a, b, c, d, D, spf):
                        continue
                    k = _push(out, k, a, b, c, d, D)
    return k


def _b_bound(X: float) -> int:
    rmax = 0.75 * (4 / 27) ** (1 / 3) * X ** (2 / 3) + X**0.5 / 4

    def fmax(h):
        return 2 * h**1.5 / (27 * X) ** 0.5

    return int(fmax(rmax + 2 * X**0.5) + fmax(rmax)) + 2


@numba.njit(cache=True)
def _enum_positive(X, spf, out, k, bmax, gl2):
    sq = isqrt_nb(X)
    amax = 1
    while 729 * (amax + 1) ** 4 <= 16 * X:
        amax += 1
    for a in range(1, amax + 1):
        for b in range(-bmax, bmax + 1):
            b2 = b * b
            # 1 <= P = b^2 - 3ac <= sqrt(X)
            clo = -((-(b2 - sq)) // (3 * a))
            chi = (b2 - 1) // (3 * a)
            for c in range(clo, chi + 1):
                P = b2 - 3 * a * c
                bc = b * c
                # 0 <= Q = bc - 9ad <= P
                dlo = -((-(bc - P)) // (9 * a))
                dhi = bc // (9 * a)
                for d in range(dlo, dhi + 1):
                    R = c * c - 3 * b * d
                    if R < P:
                        continue
                    D = _disc(a, b, c, d)
                    if D <= 0 or D > X:
                        continue
                    Q = bc - 9 * a * d
                    if Q == 0 or Q == P or P == R:
                        if not _canonical_positive(a, b, c, d, gl2):
                            continue
                    if _has_rational_root(a, b, c, d):
                        continue
                    if not _is_maximal(a, b, c, d, D, spf):
                        continue
                    k = _push(out, k, a, b, c, d, D)
    return k


@numba.njit(cache=True)
def isqrt_nb(n):
    r = int(np.sqrt(n))
    while r * r > n:
        r -= 1
    while (r + 1) * (r + 1) <= n:
        r += 1
    return r


# ---- census -------------------------------------------------------------------

@dataclass(frozen=True)
class CubicCensus:
    X: int
    sign: str
    forms: np.ndarray  # (n, 4) int64 coefficients a, b, c, d
    disc: np.ndarray  # (n,) int64

    def __len__(self):
        return len(self.disc)

    def __iter__(self):
        for row in self.forms.tolist():
            yield CubicForm(*row)

    def restrict(self, X: int, sign: str | None = None) -> "CubicCensus":
        if X > self.X:
            raise ValueError("cannot extend a census beyond its bound")
        sign = self.sign if sign is None else normalize_sign(sign)
        if sign != self.sign and self.sign != "both":
            raise ValueError("cannot widen the sign of a census")
        keep = np.abs(self.disc) <= X
        if sign == "real":
            keep &= self.disc > 0
        elif sign == "complex":
            keep &= self.disc < 0
        return CubicCensus(X, sign, self.forms[keep], self.disc[keep])


def enumerate_cubic(X: int, sign: str = "both", max_X: int = MAX_X) -> CubicCensus:
    if X < 1:
        raise ValueError("X must be >= 1")
    if X > max_X:
        raise BoundExceeded(f"X={X} exceeds the cubic census bound {max_X}")
    sign = normalize_sign(sign)
    spf = _spf_table(X)
    cap = X // 4 + 1024
    while True:
        out = np.zeros((cap, 5), dtype=np.int64)
        k = 0
        if sign in ("complex", "both"):
            k = _enum_negative(X, spf, out, k)
        if sign in ("real", "both"):
            k = _enum_positive(X, spf, out, k, _b_bound(X), _small_gl2())
        if k <= cap:
            break
        cap = k + 1024
    out = out[:k]
    order = np.lexsort((out[:, 3], out[:, 2], out[:, 1], out[:, 0], out[:, 4], np.abs(out[:, 4])))
    out = out[order]
    return CubicCensus(X, sign, out[:, :4].copy(), out[:, 4].copy())


# ---- per-form tests --------------------------------------------------------------

def is_irreducible(F: CubicForm) -> bool:
    return not _has_rational_root(*map(int, F))


def is_maximal(F: CubicForm) -> bool:
    D = CubicForm(*F).disc
    if D == 0:
        return False
    from .arith import factorize

    return all(e < 2 or _maximal_at(*map(int, F), p) for p, e in factorize(D).items())


def projective_roots_mod(F: CubicForm, p: int) -> int:
    a, b, c, d = F
    n = 1 if a % p == 0 else 0
    n += sum(1 for r in range(p) if (((a * r + b) * r + c) * r + d) % p == 0)
    return n


def splitting_type_cubic(F: CubicForm, p: int) -> str:
    """'111', '12', '3' for unramified p, else 'ramified' (F assumed maximal)."""
    F = CubicForm(*F)
    if F.disc % p == 0:
        return "ramified"
    return {3: "111", 1: "12", 0: "3"}[projective_roots_mod(F, p)]


def root_counts(census: CubicCensus, p: int) -> np.ndarray:
    """Number of roots in P^1(F_p) of each census form."""
    a, b, c, d = (census.forms[:, i] % p for i in range(4))
    n = (a == 0).astype(np.int64)
    for r in range(p):
        n += ((((a * r + b) * r + c) * r + d) % p == 0)
    return n


def splitting_types(census: CubicCensus, p: int) -> np.ndarray:
    n = root_counts(census, p)
    out = np.where(n == 3, "111", np.where(n == 1, "12", "3")).astype(object)
    out[census.disc % p == 0] = "ramified"
    return out


def split_mask(census: CubicCensus, p: int) -> np.ndarray:
    return (root_counts(census, p) == 3) & (census.disc % p != 0)


def count_cubic_with_split(X: int, p: int, census: CubicCensus | None = None) -> int:
    census = enumerate_cubic(X) if census is None else census.restrict(X)
    return int(split_mask(census, p).sum())


# ---- persistence -----------------------------------------------------------------

_CHEAD = struct.Struct("<4sIQ")
_CSIGN = {"both": 0, "real": 1, "complex": 2}


def write_census(path: str | Path, census: CubicCensus) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    rows = np.column_stack([census.forms, census.disc]).astype("<i8")
    tmp = path.with_suffix(path.suffix + ".tmp")
    with open(tmp, "wb") as fh:
        fh.write(_CHEAD.pack(b"CCEN", 1, census.X))
        fh.write(rows.tobytes())
    tmp.replace(path)


def read_census(path: str | Path, sign: str = "both") -> CubicCensus:
    raw = Path(path).read_bytes()
    magic, version, X = _CHEAD.unpack_from(raw)
    if magic != b"CCEN" or version != 1:
        raise ValueError(f"{path}: not a cubic census file")
    rows = np.frombuffer(raw, dtype="<i8", offset=_CHEAD.size).reshape(-1, 5).astype(np.int64)
    return CubicCensus(int(X), normalize_sign(sign), rows[:, :4].copy(), rows[:, 4].copy())


def write_csv(path, census: CubicCensus) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["a", "b", "c", "d", "disc"])
        for row, D in zip(census.forms.tolist(), census.disc.tolist()):
            w.writerow(row + [D])
