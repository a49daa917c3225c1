"""Independent reference implementations used only by the tests."""
from __future__ import annotations

from fractions import Fraction
from math import isqrt

from sympy import Poly, ZZ, factorint, field_isomorphism, symbols
from sympy.polys.numberfields.basis import round_two

_x = symbols("x")


def cubic_fields_hunter(X: int) -> dict[int, list[tuple[int, int, int]]]:
    """Cubic fields with |disc| <= X found by a monic polynomial search.

    Every cubic field has an integral generator of trace 0 or 1 with
    sum |a_i|^2 <= T^2/3 + sqrt(4/3) * sqrt(X/3). Returns, per discriminant,
    one (T, e2, e3) triple for each isomorphism class.
    """
    out: dict[int, list[tuple[int, int, int]]] = {}
    for T in (0, 1):
        S = T * T / 3 + (4 / 3) ** 0.5 * (X / 3) ** 0.5
        e2max = int((T * T + S) / 2) + 1
        e3max = int((S / 3) ** 1.5) + 1
        for e2 in range(-e2max, e2max + 1):
            for e3 in range(-e3max, e3max + 1):
                poly = Poly(_x**3 - T * _x**2 + e2 * _x - e3, _x, domain=ZZ)
                if not poly.is_irreducible:
                    continue
                _, dK = round_two(poly)
                dK = int(dK)
                if abs(dK) > X:
                    continue
                reps = out.setdefault(dK, [])
                f = poly.as_expr()
                known = any(
                    field_isomorphism(f, _x**3 - t * _x**2 + u * _x - v) is not None
                    for t, u, v in reps
                )
                if not known:
                    reps.append((T, e2, e3))
    return out


def trial_primes(n: int) -> list[int]:
    return [p for p in range(2, n + 1) if all(p % q for q in range(2, isqrt(p) + 1))]


def sqrt_mod_exists(D: int, p: int) -> bool:
    return any((x * x - D) % p == 0 for x in range(p))


def class_number_analytic(D: int) -> int:
    """h(D) for D < -4 from h = -(1/|D|) sum_{n<|D|} (D/n) n."""
    from sympy.functions.combinatorial.numbers import jacobi_symbol

    def kron(D, n):
        v = 0
        while n % 2 == 0:
            n //= 2
            v += 1
        t = 1
        if v:
            if D % 2 == 0:
                return 0
            if v % 2 and D % 8 in (3, 5):
                t = -1
        return t * (jacobi_symbol(D % n, n) if n > 1 else 1)

    s = sum(kron(D, n) * n for n in range(1, -D))
    h = Fraction(-s, -D)
    assert h.denominator == 1
    return int(h)


def omega(n: int) -> int:
    return len(factorint(abs(n)))


def is_fundamental(D: int) -> bool:
    if D in (0, 1):
        return False
    f = factorint(abs(D))
    if D % 4 == 1:
        return all(e == 1 for e in f.values())
    if D % 4 == 0:
        m = D // 4
        fm = factorint(abs(m))
        return m % 4 in (2, 3) and all(e == 1 for e in fm.values())
    return False


def reduced_forms_bruteforce(D: int) -> list[tuple[int, int, int]]:
    """Reduced positive definite forms of discriminant D < 0, by exhaustive search."""
    out = []
    for a in range(1, isqrt(-D // 3) + 2):
        for b in range(-a + 1, a + 1):
            if (b * b - D) % (4 * a):
                continue
            c = (b * b - D) // (4 * a)
            if c < a or (b < 0 and (a == c)):
                continue
            out.append((a, b, c))
    return out
