"""Local splitting densities for fields of degree 2 to 5, as exact rationals.

Splitting types are written as partitions of the degree into inertia
degrees ("111" is totally split in a cubic field) plus ``"ramified"``.
For quadratic fields "split"/"inert" are the usual names for "11"/"2";
"split" is accepted as an alias for the totally split type in every degree.
"""
from __future__ import annotations

import csv
import io
from fractions import Fraction

RAMIFIED = "ramified"

# Unramified weights, i.e. 1/|centralizer| of the cycle type in S_d.
_UNRAMIFIED = {
    2: {"11": Fraction(1, 2), "2": Fraction(1, 2)},
    3: {"111": Fraction(1, 6), "12": Fraction(1, 2), "3": Fraction(1, 3)},
    4: {
        "1111": Fraction(1, 24),
        "112": Fraction(1, 4),
        "13": Fraction(1, 3),
        "22": Fraction(1, 8),
        "4": Fraction(1, 4),
    },
    5: {
        "11111": Fraction(1, 120),
        "1112": Fraction(1, 12),
        "122": Fraction(1, 8),
        "113": Fraction(1, 6),
        "23": Fraction(1, 6),
        "14": Fraction(1, 4),
        "5": Fraction(1, 5),
    },
}

# Coefficients of the normalizer 1 + a1 p^-1 + a2 p^-2 + ...
_NORMALIZER = {2: (1, 1), 3: (1, 1, 1), 4: (1, 1, 2, 1), 5: (1, 1, 2, 2, 1)}

_ALIASES = {
    2: {"split": "11", "inert": "2"},
    3: {"split": "111"},
    4: {"split": "1111"},
    5: {"split": "11111"},
}

_DELTA0 = {2: Fraction(1, 6), 3: Fraction(2, 25), 4: Fraction(1, 48), 5: Fraction(1, 200)}
_ELL_THRESHOLD = {2: 1, 3: 1, 4: 8, 5: 25}

# Counting exponents (sigma_d, tau_d, gamma) behind the delta0 table.
EXPONENTS = {
    2: (Fraction(1), Fraction(1, 2), None),
    3: (Fraction(8, 9), Fraction(7, 9), None),
    4: (Fraction(1, 2), Fraction(23, 24), None),
    5: (Fraction(1, 2), Fraction(79, 80), Fraction(199, 200)),
}


def _check_degree(d: int) -> None:
    if d not in _NORMALIZER:
        raise ValueError(f"degree must be 2..5, got {d}")


def splitting_types(d: int) -> list[str]:
    _check_degree(d)
    return list(_UNRAMIFIED[d]) + [RAMIFIED]


def canonical_type(d: int, kind: str) -> str:
    _check_degree(d)
    kind = _ALIASES[d].get(kind, kind)
    if kind != RAMIFIED and kind not in _UNRAMIFIED[d]:
        raise ValueError(f"unknown splitting type {kind!r} for degree {d}")
    return kind


def normalizer(d: int, p: int) -> Fraction:
    _check_degree(d)
    x = Fraction(1, p)
    return sum((c * x**k for k, c in enumerate(_NORMALIZER[d])), Fraction(0))


def delta(d: int, kind: str, p: int) -> Fraction:
    kind = canonical_type(d, kind)
    n = normalizer(d, p)
    if kind == RAMIFIED:
        return (n - 1) / n
    return _UNRAMIFIED[d][kind] / n


def density_table(d: int, p: int) -> dict[str, Fraction]:
    return {t: delta(d, t, p) for t in splitting_types(d)}


def split_density(d: int, p: int) -> Fraction:
    """Density of fields in which p splits completely."""
    return delta(d, "split", p)


def nu(d: int, p: int) -> Fraction:
    """Density of lattice points giving rings non-maximal at p (d = 4, 5)."""
    x = Fraction(1, p)
    if d == 4:
        coeffs = {2: 1, 3: 2, 4: 2, 5: -3, 6: -4, 7: -1, 8: 3, 9: 3, 10: -1, 11: -1}
        return sum((c * x**k for k, c in coeffs.items()), Fraction(0))
    if d == 5:
        num = (
            (p - 1) ** 8 * p**12 * (p + 1) ** 4 * (p * p + 1) ** 2
            * (p * p + p + 1) ** 2 * (p**4 + p**3 + p * p + p + 1)
            * (p**4 + p**3 + 2 * p * p + 2 * p + 1)
        )
        return 1 - Fraction(num, p**40)
    raise ValueError("nu is defined for d = 4, 5")


def delta0(d: int) -> Fraction:
    _check_degree(d)
    return _DELTA0[d]


def delta0_from_exponents(
    sigma: Fraction, tau: Fraction, gamma: Fraction | None = None, d: int = 2
) -> Fraction:
    sigma, tau = Fraction(sigma), Fraction(tau)
    if sigma <= 0 or not 0 < tau < 1:
        raise ValueError("need sigma > 0 and 0 < tau < 1")
    val = (1 - tau) / (1 + 2 * sigma)
    if d == 3:
        val = min(val, Fraction(1, 4))
    if d == 5:
        if gamma is None:
            raise ValueError("degree 5 needs gamma")
        val = min(val, 1 - Fraction(gamma))
    return val


def ell_threshold(d: int) -> int:
    _check_degree(d)
    return _ELL_THRESHOLD[d]


def density_csv(degrees, primes) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["d", "p", "type", "delta", "delta_float"])
    for d in degrees:
        for p in primes:
            for t, v in density_table(d, p).items():
                w.writerow([d, p, t, str(v), f"{float(v):.12g}"])
    return buf.getvalue()
