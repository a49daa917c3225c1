"""Form class groups of quadratic discriminants.

The pure-Python path (QuadForm, reduce, compose, class_group) works for both
signs; imaginary_class_data is a compiled batch kernel over all imaginary
fundamental discriminants up to a bound, using a different composition
algorithm so the two can check each other.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass, field
from math import gcd, isqrt
from typing import NamedTuple

import numba
import numpy as np

from .arith import BoundExceeded

MAX_ABS_D = 10**7


class QuadForm(NamedTuple):
    a: int
    b: int
    c: int

    @property
    def disc(self) -> int:
        return self.b * self.b - 4 * self.a * self.c

    def inverse(self) -> "QuadForm":
        return QuadForm(self.a, -self.b, self.c)


class UnsupportedCase(ValueError):
    pass


def _is_square(n: int) -> bool:
    return n >= 0 and isqrt(n) ** 2 == n


def principal_form(D: int) -> QuadForm:
    if D % 4 == 0:
        f = QuadForm(1, 0, -D // 4)
    elif D % 4 == 1:
        f = QuadForm(1, 1, (1 - D) // 4)
    else:
        raise ValueError(f"{D} is not a discriminant")
    return reduce(f)


# ---- definite --------------------------------------------------------------

def _is_reduced_definite(f: QuadForm) -> bool:
    a, b, c = f
    return abs(b) <= a <= c and not (b < 0 and (abs(b) == a or a == c))


def _reduce_definite(f: QuadForm) -> QuadForm:
    a, b, c = f
    if a < 0:
        raise ValueError("negative definite forms are not handled")
    D = b * b - 4 * a * c
    while True:
        # normalize b into (-a, a]
        r = (a - b) // (2 * a)
        b += 2 * r * a
        c = (b * b - D) // (4 * a)
        if a > c:
            a, b, c = c, -b, a
            continue
        if b < 0 and (a == c or -b == a):
            b = -b
        return QuadForm(a, b, c)


# ---- indefinite --------------------------------------------------------------

def _lt_sqrt(t: int, D: int) -> bool:
    """t < sqrt(D) for non-square D > 0."""
    return t < 0 or t * t < D


def _is_reduced_indefinite(f: QuadForm) -> bool:
    a, b, c = f
    D = f.disc
    A = abs(a)
    # |sqrt(D) - 2|a|| < b < sqrt(D)
    return b > 0 and _lt_sqrt(b, D) and _lt_sqrt(2 * A - b, D) and not _lt_sqrt(2 * A + b, D)


def _normalize_indefinite(f: QuadForm) -> QuadForm:
    a, b, _ = f
    D = f.disc
    A = abs(a)
    s = isqrt(D)
    if not _lt_sqrt(A, D):
        lo = -A + 1  # b in (-|a|, |a|]
    else:
        lo = s + 1 - 2 * A  # b in (sqrt(D) - 2|a|, sqrt(D))
    b = (b - lo) % (2 * A) + lo
    return QuadForm(a, b, (b * b - D) // (4 * a))


def rho(f: QuadForm) -> QuadForm:
    """One step of the indefinite reduction operator."""
    return _normalize_indefinite(QuadForm(f.c, -f.b, f.a))


def _reduce_indefinite(f: QuadForm) -> QuadForm:
    f = _normalize_indefinite(f)
    while not _is_reduced_indefinite(f):
        f = rho(f)
    return f


def reduction_cycle(f: QuadForm) -> list[QuadForm]:
    f = _reduce_indefinite(f)
    cyc = [f]
    g = rho(f)
    while g != f:
        cyc.append(g)
        g = rho(g)
    return cyc


def reduce(f: QuadForm) -> QuadForm:
    f = QuadForm(*f)
    D = f.disc
    if _is_square(D):
        raise ValueError(f"degenerate form {tuple(f)}: discriminant {D} is a square")
    if D < 0:
        return _reduce_definite(f)
    return _reduce_indefinite(f)


def is_reduced(f: QuadForm) -> bool:
    f = QuadForm(*f)
    return _is_reduced_definite(f) if f.disc < 0 else _is_reduced_indefinite(f)


def canonical(f: QuadForm) -> QuadForm:
    """Class key: the reduced form (D < 0) or the least form on the cycle (D > 0)."""
    f = QuadForm(*f)
    if f.disc < 0:
        return _reduce_definite(f)
    return min(reduction_cycle(f))


# ---- composition -------------------------------------------------------------

def _solve_linmod(a: int, b: int, m: int) -> tuple[int, int]:
    """All k with a*k = b mod m, as k = mu + nu*n."""
    g = gcd(a, m)
    if b % g:
        raise ArithmeticError("no solution")
    m2 = m // g
    if m2 == 1:
        return 0, 1
    mu = (b // g) * pow(a // g, -1, m2) % m2
    return mu, m2


def compose(f: QuadForm, g: QuadForm) -> QuadForm:
    f, g = QuadForm(*f), QuadForm(*g)
    if f.disc != g.disc:
        raise ValueError("forms of different discriminants")
    a1, b1, c1 = f
    a2, b2, _ = g
    gg = (b1 + b2) // 2
    h = -(b1 - b2) // 2
    w = gcd(gcd(a1, a2), gg)
    j = w
    s, t, u = a1 // w, a2 // w, gg // w
    mu, nu = _solve_linmod(t * u, h * u + s * c1, s * t)
    lam, _ = _solve_linmod(t * nu, h - t * mu, s)
    k = mu + nu * lam
    l = (k * t - h) // s
    m = (t * u * k - h * u - c1 * s) // (s * t)
    a3 = s * t
    b3 = j * u - (k * t + l * s)
    c3 = k * l - j * m
    return reduce(QuadForm(a3, b3, c3))


def form_pow(f: QuadForm, n: int, identity: QuadForm | None = None) -> QuadForm:
    result = identity if identity is not None else principal_form(QuadForm(*f).disc)
    base = reduce(f)
    while n:
        if n & 1:
            result = compose(result, base)
        n >>= 1
        if n:
            base = compose(base, base)
    return result


# ---- groups -------------------------------------------------------------------

def _reduced_definite_forms(D: int) -> list[QuadForm]:
    out = []
    a = 1
    while 3 * a * a <= -D:
        for b in range(-a + 1, a + 1):
            if (b * b - D) % (4 * a):
                continue
            c = (b * b - D) // (4 * a)
            f = QuadForm(a, b, c)
            if c >= a and _is_reduced_definite(f) and gcd(gcd(a, b), c) == 1:
                out.append(f)
        a += 1
    return out


def _reduced_indefinite_forms(D: int) -> list[QuadForm]:
    out = []
    for b in range(1, isqrt(D) + 1):
        if (b * b - D) % 4:
            continue
        N = (D - b * b) // 4  # = -a*c > 0
        for A in range(1, N + 1):
            if N % A:
                continue
            if not (_lt_sqrt(2 * A - b, D) and not _lt_sqrt(2 * A + b, D)):
                continue
            C = N // A
            for f in (QuadForm(A, b, -C), QuadForm(-A, b, C)):
                if gcd(gcd(A, b), C) == 1:
                    out.append(f)
    return out


@dataclass(frozen=True)
class FormClassGroup:
    D: int
    classes: tuple[QuadForm, ...]
    _key: dict = field(repr=False, compare=False, default_factory=dict)

    @property
    def h(self) -> int:
        return len(self.classes)

    @property
    def identity(self) -> QuadForm:
        return self.key(principal_form(self.D))

    def key(self, f: QuadForm) -> QuadForm:
        f = reduce(f)
        return self._key[f] if self.D > 0 else f

    def mul(self, f: QuadForm, g: QuadForm) -> QuadForm:
        return self.key(compose(f, g))

    def inv(self, f: QuadForm) -> QuadForm:
        return self.key(QuadForm(*f).inverse())

    def pow(self, f: QuadForm, n: int) -> QuadForm:
        return self.key(form_pow(f, n))


def class_group(D: int, max_abs_D: int = MAX_ABS_D) -> FormClassGroup:
    if abs(D) > max_abs_D:
        raise BoundExceeded(f"|D|={abs(D)} exceeds class group bound {max_abs_D}")
    if D % 4 not in (0, 1) or _is_square(D):
        raise ValueError(f"{D} is not a non-square discriminant")
    if D < 0:
        return FormClassGroup(D, tuple(_reduced_definite_forms(D)))
    keys: dict = {}
    classes = []
    for f in _reduced_indefinite_forms(D):
        if f in keys:
            continue
        cyc = reduction_cycle(f)
        k = min(cyc)
        for g in cyc:
            keys[g] = k
        classes.append(k)
    classes.sort()
    return FormClassGroup(D, tuple(classes), keys)


@dataclass(frozen=True)
class TorsionCount:
    ell: int
    count: int


def torsion_count(G: FormClassGroup, ell: int) -> TorsionCount:
    if ell < 1:
        raise ValueError("ell must be positive")
    if G.D > 0 and ell % 2 == 0:
        raise UnsupportedCase("even ell for a real quadratic field: narrow and wide groups differ")
    e = G.identity
    n = sum(1 for g in G.classes if G.key(form_pow(g, ell, e)) == e)
    return TorsionCount(ell, n)


# ---- batch kernel for imaginary fields ---------------------------------------------

@numba.njit(cache=True)
def _xgcd(a, b):
    x0, x1, y0, y1 = 1, 0, 0, 1
    while b != 0:
        q = a // b
        a, b = b, a - q * b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    if a < 0:
        return -a, -x0, -y0
    return a, x0, y0


@numba.njit(cache=True)
def _nb_reduce(a, b, n):
    # forms of discriminant -n, positive definite
    while True:
        r = (a - b) // (2 * a)
        b += 2 * r * a
        c = (b * b + n) // (4 * a)
        if a > c:
            a, b = c, -b
            continue
        if b < 0 and (a == c or -b == a):
            b = -b
        return a, b


@numba.njit(cache=True)
def _nb_compose(a1, b1, a2, b2, n):
    """Composition in the style of Cohen's Algorithm 5.4.7, then reduction."""
    if a1 > a2:
        a1, b1, a2, b2 = a2, b2, a1, b1
    c2 = (b2 * b2 + n) // (4 * a2)
    s = (b1 + b2) // 2
    m = b2 - s
    if a2 % a1 == 0:
        y1 = 0
        d = a1
    else:
        d, u, v = _xgcd(a2, a1)
        y1 = u
    if s % d == 0:
        y2 = -1
        x2 = 0
        d1 = d
    else:
        d1, x2, y2 = _xgcd(s, d)
        y2 = -y2
    v1 = a1 // d1
    v2 = a2 // d1
    r = (y1 * y2 * m - x2 * c2) % v1
    b3 = b2 + 2 * v2 * r
    a3 = v1 * v2
    return _nb_reduce(a3, b3, n)


@numba.njit(cache=True)
def _nb_pow(a, b, e, n):
    ra, rb = 1, n % 2  # principal form, reduced
    while e > 0:
        if e & 1:
            ra, rb = _nb_compose(ra, rb, a, b, n)
        e >>= 1
        if e > 0:
            a, b = _nb_compose(a, b, a, b, n)
    return ra, rb


@numba.njit(cache=True)
def _gcd(a, b):
    while b:
        a, b = b, a % b
    return a


@numba.njit(cache=True)
def _block(n0, n1, fund, ell, h_out, t_out):
    """Class numbers and ell-torsion for fundamental -n with n0 <= n < n1."""
    width = n1 - n0
    counts = np.zeros(width + 1, dtype=np.int64)
    amax = 1
    while 3 * (amax + 1) * (amax + 1) < n1:
        amax += 1
    for pass_ in range(2):
        if pass_ == 1:
            offs = np.zeros(width + 1, dtype=np.int64)
            for i in range(width):
                offs[i + 1] = offs[i] + counts[i]
            fa = np.empty(offs[width], dtype=np.int64)
            fb = np.empty(offs[width], dtype=np.int64)
            fill = offs[:width].copy()
        for a in range(1, amax + 1):
            for b in range(-a + 1, a + 1):
                b2 = b * b
                cmin = (n0 + b2 + 4 * a - 1) // (4 * a)
                if cmin < a:
                    cmin = a
                if b < 0 and cmin == a:
                    cmin = a + 1
                cmax = (n1 - 1 + b2) // (4 * a)
                for c in range(cmin, cmax + 1):
                    nn = 4 * a * c - b2
                    if not fund[nn]:
                        continue
                    i = nn - n0
                    if pass_ == 0:
                        counts[i] += 1
                    else:
                        fa[fill[i]] = a
                        fb[fill[i]] = b
                        fill[i] += 1
    for i in range(width):
        h = counts[i]
        if h == 0:
            continue
        h_out[i] = h
        if _gcd(ell, h) == 1:
            t_out[i] = 1
            continue
        nn = n0 + i
        t = 0
        for j in range(offs[i], offs[i + 1]):
            ra, rb = _nb_pow(fa[j], fb[j], ell, nn)
            if ra == 1:
                t += 1
        t_out[i] = t


@dataclass(frozen=True)
class ImaginaryClassData:
    D: np.ndarray  # negative fundamental discriminants, ascending |D|
    h: np.ndarray
    torsion: np.ndarray
    ell: int


def imaginary_class_data(X: int, ell: int, block: int = 8192,
                         max_abs_D: int = MAX_ABS_D) -> ImaginaryClassData:
    """h(D) and |Cl(D)[ell]| for every imaginary fundamental D with |D| <= X."""
    from .quadratic import enumerate_quadratic

    if X > max_abs_D:
        raise BoundExceeded(f"X={X} exceeds class group bound {max_abs_D}")
    if ell < 1:
        raise ValueError("ell must be positive")
    D = enumerate_quadratic(X, "imaginary").discriminants if X >= 3 else np.zeros(0, np.int64)
    fund = np.zeros(X + 1, dtype=np.bool_)
    fund[-D] = True
    h = np.zeros(X + 1, dtype=np.int64)
    t = np.zeros(X + 1, dtype=np.int64)
    for n0 in range(3, X + 1, block):
        n1 = min(n0 + block, X + 1)
        _block(n0, n1, fund, ell, h[n0:n1], t[n0:n1])
    n = -D
    return ImaginaryClassData(D, h[n], t[n], ell)


def write_csv(path, rows) -> None:
    """rows: iterable of (D, h, ell, torsion_count)."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["D", "h", "ell", "torsion_count"])
        for r in rows:
            w.writerow([int(x) for x in r])
