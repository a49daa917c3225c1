"""Split-prime profiles, bad sets, torsion bounds and average-torsion experiments."""
from __future__ import annotations

import json
from dataclasses import asdict, dataclass
from fractions import Fraction
from math import ceil, log, log2, pi

import numpy as np

from .arith import kronecker, kronecker_array, primes_up_to
from .classgroup import UnsupportedCase, class_group, imaginary_class_data, torsion_count
from .densities import delta0, ell_threshold
from .quadratic import QuadraticCensus, enumerate_quadratic, normalize_sign

ZETA2 = pi * pi / 6


# ---- split primes -----------------------------------------------------------------

@dataclass(frozen=True)
class SplitPrimeProfile:
    field: object  # discriminant, or (a, b, c, d) for a cubic form
    Y: float
    N: int


def _is_cubic(family) -> bool:
    return hasattr(family, "forms")


def split_counts(family, Y: float) -> np.ndarray:
    """N(K; Y) for every field in a quadratic or cubic census."""
    primes = primes_up_to(int(Y)) if Y >= 2 else ()
    if _is_cubic(family):
        from .cubic import split_mask

        out = np.zeros(len(family), dtype=np.int64)
        for p in primes:
            out += split_mask(family, p)
        return out
    D = family.discriminants
    out = np.zeros(len(D), dtype=np.int64)
    for p in primes:
        out += kronecker_array(D, p) == 1
    return out


def split_count(D: int, Y: float) -> int:
    return sum(1 for p in primes_up_to(int(Y)) if kronecker(D, p) == 1) if Y >= 2 else 0


def split_profile(family, Y: float) -> list[SplitPrimeProfile]:
    counts = split_counts(family, Y).tolist()
    if _is_cubic(family):
        ids = [tuple(r) for r in family.forms.tolist()]
    else:
        ids = family.discriminants.tolist()
    return [SplitPrimeProfile(i, Y, n) for i, n in zip(ids, counts)]


# ---- bad sets -----------------------------------------------------------------------

@dataclass(frozen=True)
class BadSetReport:
    d: int
    X: int
    Y: float
    M: float
    count: int
    size: int

    @property
    def fraction(self) -> float:
        return self.count / self.size if self.size else 0.0


def bad_set(family, Y: float, M: float, counts: np.ndarray | None = None) -> BadSetReport:
    counts = split_counts(family, Y) if counts is None else counts
    d = 3 if _is_cubic(family) else 2
    return BadSetReport(d, family.X, Y, M, int((counts <= M).sum()), len(counts))


def bad_set_parameters(d: int, X: int, c0: float, delta=None) -> tuple[float, float]:
    """Y = (X/2)^delta and M = c0/2 * Y / log Y."""
    dl = float(delta0(d) if delta is None else Fraction(delta))
    Y = (X / 2) ** dl
    return Y, 0.5 * c0 * Y / log(Y)


# ---- pointwise bound ----------------------------------------------------------------

class DeltaConstraint(ValueError):
    pass


def delta_limit(d: int, ell: int) -> Fraction:
    """Strict upper bound on delta for the split-prime torsion bound."""
    return Fraction(1, 2 * ell * (d - 1))


@dataclass(frozen=True)
class TorsionBound:
    D_K: int
    d: int
    ell: int
    delta: float
    epsilon: float
    M: int
    C: float
    bound: float
    delta_ok: bool


def ev_bound(D_K: int, d: int, ell: int, delta, epsilon: float = 0.05, M: int = 1,
             C: float = 1.0, strict: bool = True) -> TorsionBound:
    ok = Fraction(delta) < delta_limit(d, ell) if not isinstance(delta, float) else \
        delta < float(delta_limit(d, ell))
    if strict and not ok:
        raise DeltaConstraint(f"need delta < {delta_limit(d, ell)} for d={d}, ell={ell}")
    if M < 1:
        raise ZeroDivisionError("no split primes: bound undefined (field is bad)")
    D_K = abs(D_K)
    return TorsionBound(D_K, d, ell, float(delta), epsilon, M, C,
                        C * D_K ** (0.5 + epsilon) / M, ok)


# ---- averages -------------------------------------------------------------------------

def average_torsion(ell: int, X: int, sign: str = "imaginary",
                    census: QuadraticCensus | None = None) -> int:
    """Exact sum of |Cl[ell]| over quadratic fields with |D| <= X."""
    sign = normalize_sign(sign)
    if sign != "imaginary" and ell % 2 == 0:
        raise UnsupportedCase("even ell is not supported for real quadratic fields")
    total = 0
    if sign in ("imaginary", "both"):
        if census is None:
            total += int(imaginary_class_data(X, ell).torsion.sum()) if X >= 3 else 0
        else:
            D = census.restrict(X, "imaginary").discriminants
            total += sum(torsion_count(class_group(int(x)), ell).count for x in D)
    if sign in ("real", "both"):
        census = enumerate_quadratic(X, "real") if census is None else census
        D = census.restrict(X, "real").discriminants if X >= 5 else []
        total += sum(torsion_count(class_group(int(x)), ell).count for x in D)
    return total


def dh_prediction(sign: str) -> float:
    """Leading constant of sum |Cl[3]| / X by sign."""
    sign = normalize_sign(sign)
    return {"imaginary": 1 / ZETA2, "real": 2 / (3 * ZETA2), "both": 5 / (3 * ZETA2)}[sign]


# ---- exponents --------------------------------------------------------------------------

def saving(d: int, ell: int) -> Fraction:
    """Power saving in the average exponent for degree d and ell."""
    if ell >= ell_threshold(d):
        return delta_limit(d, ell)
    return delta0(d)


def stated_exponents(d: int, ell: int) -> dict[str, Fraction]:
    s = saving(d, ell)
    return {"pointwise": Fraction(1, 2) - s, "exceptional": 1 - s, "average": Fraction(3, 2) - s}


def _source(d: int, ell: int) -> str:
    if ell == 1:
        return "trivial"
    if d == 2 and ell == 2:
        return "genus theory"
    if d == 2 and ell == 3:
        return "Davenport-Heilbronn"
    if d == 3 and ell in (2, 3):
        return "external average result"
    return "sieve"


@dataclass(frozen=True)
class DyadicReport:
    d: int
    ell: int
    delta1: Fraction
    delta2: Fraction
    delta: Fraction
    exponent: Fraction
    stated: Fraction
    source: str
    ranges: list

    def as_dict(self) -> dict:
        out = asdict(self)
        for k in ("delta1", "delta2", "delta", "exponent", "stated"):
            out[k] = str(out[k])
        return out


def dyadic_average_bound(d: int, ell: int, delta1=None, delta2=None, X: int | None = None,
                         measured: tuple[np.ndarray, np.ndarray] | None = None) -> DyadicReport:
    """Exponent 3/2 - min(delta1, delta2) and the per-range terms of the dyadic sum.

    delta1 defaults to the supremum 1/(2 ell (d-1)) of admissible values, delta2
    to the bad-set saving delta0(d). ``measured`` is an optional pair
    (discriminants, torsion counts) summed per range for comparison.
    """
    d1 = delta_limit(d, ell) if delta1 is None else Fraction(delta1)
    d2 = delta0(d) if delta2 is None else Fraction(delta2)
    dl = min(d1, d2)
    ranges = []
    if X is not None:
        D = T = None
        if measured is not None:
            D, T = np.abs(np.asarray(measured[0])), np.asarray(measured[1])
        for j in range(0, ceil(log2(X)) + 1):
            lo, hi = 2 ** (j - 1), 2**j
            row = {
                "lo": lo,
                "hi": hi,
                "good_term": lo**1.5 * lo ** (-float(d1)) * log(hi) if j else 0.0,
                "bad_term": hi ** (1 - float(d2)) * lo**0.5,
            }
            if D is not None:
                sel = (D > lo) & (D <= hi) if j else (D <= 1)
                row["measured"] = int(T[sel].sum())
            ranges.append(row)
    return DyadicReport(d, ell, d1, d2, dl, Fraction(3, 2) - dl,
                        stated_exponents(d, ell)["average"], _source(d, ell), ranges)


# ---- experiments ------------------------------------------------------------------------

def ev_constants(D: np.ndarray, torsion: np.ndarray, delta: float, epsilon: float) -> np.ndarray:
    """|Cl[ell]| * N(K; |D|^delta) / |D|^(1/2+eps) for fields with at least one split prime."""
    n = np.abs(D).astype(np.float64)
    Ymax = n.max() ** delta if len(n) else 0
    N = np.zeros(len(D), dtype=np.int64)
    for p in primes_up_to(int(Ymax)):
        N += (kronecker_array(D, p) == 1) & (p <= n**delta)
    keep = N >= 1
    return torsion[keep] * N[keep] / n[keep] ** (0.5 + epsilon)


def ev_consistency(X_small: int, X_large: int, ell: int = 3, delta: float = 0.12,
                   epsilon: float = 0.05) -> dict:
    data = imaginary_class_data(X_large, ell)
    out = {}
    for X in (X_small, X_large):
        sel = np.abs(data.D) <= X
        c = ev_constants(data.D[sel], data.torsion[sel], delta, epsilon)
        out[X] = {"max": float(c.max()), "p99": float(np.percentile(c, 99)), "fields": int(len(c))}
    out["stable"] = out[X_large]["p99"] <= 1.1 * out[X_small]["p99"]
    return out


def bad_set_trend(d: int, scales, delta=None) -> dict:
    """Fit (c0, c1) from M(z)/(z/log z) over the scales, then measure bad fractions.

    Scales where (X/2)^delta < 2 have no primes; they enter the bad-set table
    but not the fit.
    """
    from .sieve import compute_stats, cubic_instance, fit_window, mean_window, quadratic_instance

    if d not in (2, 3):
        raise ValueError("bad-set measurements need a census, available for d = 2, 3")
    scales = sorted(scales)
    dl = delta0(d) if delta is None else Fraction(delta)
    if d == 2:
        census = enumerate_quadratic(scales[-1], "both")
        make = quadratic_instance
    else:
        from .cubic import enumerate_cubic

        census = enumerate_cubic(scales[-1])
        make = cubic_instance
    windows = {}
    for X in scales:
        inst = make(X, dl, census)
        if inst.primes:
            windows[X] = mean_window(compute_stats(inst), inst.z)
    c0, c1 = fit_window(list(windows.values()))
    rows = []
    for X in scales:
        Y, M = bad_set_parameters(d, X, c0, dl)
        rep = bad_set(census.restrict(X), Y, M)
        rows.append({"X": X, "Y": Y, "M": M, "bad": rep.count, "size": rep.size,
                     "bad_fraction": rep.fraction})
    return {"d": d, "delta": str(dl), "c0": c0, "c1": c1,
            "mean_windows": {str(k): v for k, v in windows.items()}, "per_scale": rows}


def torsion_experiment(scales, ell: int = 3, sign: str = "imaginary", delta=None) -> dict:
    """Sum of |Cl[ell]| over imaginary fields per scale, plus bad-set fractions."""
    from .sieve import fit_window, mean_window, compute_stats, quadratic_instance

    sign = normalize_sign(sign)
    if sign != "imaginary":
        raise UnsupportedCase("the batch experiment covers imaginary fields")
    scales = sorted(scales)
    dl = Fraction(delta) if delta is not None else delta0(2)
    data = imaginary_class_data(scales[-1], ell)
    census = enumerate_quadratic(scales[-1], "both")
    windows = {}
    for X in scales:
        inst = quadratic_instance(X, dl, census)
        if inst.primes:
            windows[X] = mean_window(compute_stats(inst), inst.z)
    c0, c1 = fit_window(list(windows.values()))
    per_scale = []
    for X in scales:
        sel = np.abs(data.D) <= X
        s = int(data.torsion[sel].sum())
        Y, M = bad_set_parameters(2, X, c0, dl)
        fam = census.restrict(X)
        rep = bad_set(fam, Y, M)
        per_scale.append({
            "X": X,
            "sum_torsion": s,
            "ratio_to_prediction": s / X / dh_prediction("imaginary") if ell == 3 else None,
            "bad_fraction": rep.fraction,
        })
    return {
        "parameters": {"ell": ell, "sign": sign, "delta": str(dl), "scales": scales},
        "fitted_constants": {"c0": c0, "c1": c1, "mean_windows": {str(k): v for k, v in windows.items()}},
        "per_scale": per_scale,
    }


def report_json(report: dict) -> str:
    return json.dumps(report, indent=2, sort_keys=True)
