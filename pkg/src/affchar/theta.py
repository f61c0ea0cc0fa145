"""Theta functions, Euler products, the affine eta function and the
reciprocal of the Jacobi triple product.

Conventions: every ``q_max`` argument here is an *absolute* q-exponent; the
returned series are exact for all q-exponents up to and including it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterator, Optional, Tuple

from .series import BiSeries, QSeries, Rational, mul


@dataclass(frozen=True)
class ThetaSpec:
    """Reduced theta function Θ_{n,m;ν} evaluated at z^{1/d}."""

    n: int
    m: int
    nu: int = 0
    d: int = 1

    def __post_init__(self):
        if self.m == 0:
            raise ValueError("theta index m must be nonzero")
        if self.d <= 0:
            raise ValueError("z rescale must be positive")

    def excluded(self) -> range:
        if self.nu < 0:
            return range(self.nu, 0)
        return range(1, self.nu + 1)

    def terms(self, q_max: Rational) -> Iterator[Tuple[Fraction, Fraction, int]]:
        """All (q-exp, z-exp, coeff) with q-exp <= q_max, reduced terms removed."""
        if self.m < 0:
            raise ValueError("theta with m < 0 is not a formal q-series")
        m, c = self.m, Fraction(self.n, 2 * self.m)
        q_max = Fraction(q_max)
        bound = math.isqrt(max(0, math.floor(q_max / m))) + 2
        skip = set(self.excluded())
        centre = -math.floor(c)
        for i in range(centre - bound - 1, centre + bound + 2):
            if i in skip:
                continue
            l = i + c
            qe = m * l * l
            if qe <= q_max:
                yield qe, -m * l / self.d, 1


def theta(spec: ThetaSpec, q_max: Rational, z_window: Optional[Tuple[Rational, Rational]] = None) -> BiSeries:
    """Θ_{n,m;ν}(q, z^{1/d}) truncated at q-exponent ``q_max``."""
    if Fraction(spec.m, spec.d).denominator != 1:
        raise ValueError("z-exponents would leave the integer lattice (need d | m)")
    c = Fraction(spec.n, 2 * spec.m)
    q_shift = _lattice_shift(spec.m * c * c)
    z_shift = -spec.m * c / spec.d
    lo, hi = (None, None) if z_window is None else z_window
    return BiSeries.from_terms(spec.terms(q_max), q_max, lo, hi, q_shift=q_shift, z_shift=z_shift)


def _lattice_shift(x: Fraction) -> Fraction:
    return x - math.floor(x)


def theta_specialized(spec: ThetaSpec, q_max: Rational) -> QSeries:
    """Θ_{n,m;ν}(q) = Θ_{n,m;ν}(q, 1), summed directly."""
    c = Fraction(spec.n, 2 * spec.m)
    acc = {}
    for qe, _, coeff in spec.terms(q_max):
        acc[qe] = acc.get(qe, 0) + coeff
    return QSeries.from_terms(acc, q_max, shift=_lattice_shift(spec.m * c * c))


# ---------------------------------------------------------------------------
# Euler products
# ---------------------------------------------------------------------------


def varphi(q_max: int) -> QSeries:
    """φ(q) = Π(1 - q^i) from the pentagonal-number sum."""
    return varphi_pow(1, q_max)


@lru_cache(maxsize=64)
def varphi_pow(k: int, q_max: int) -> QSeries:
    """φ(q)^k for k in {1, 2, 3} from closed-form sums (no multiplication)."""
    q_max = int(math.floor(q_max))
    out = [0] * (q_max + 1)
    if k == 1:
        l = 0
        while True:
            hit = False
            for ll in ((l,) if l == 0 else (l, -l)):
                e = (3 * ll * ll - ll) // 2
                if e <= q_max:
                    out[e] += (-1) ** (ll % 2)
                    hit = True
            if not hit:
                break
            l += 1
    elif k == 2:
        i = 0
        while i * (i + 1) // 2 <= q_max:
            j = 0
            while True:
                e = 2 * i * j + i * (i + 1) // 2 + j * (j + 1) // 2
                if e > q_max:
                    break
                sgn = (-1) ** ((i + j) % 2)
                out[e] += sgn
                e2 = e + 2 * (1 + i + j)
                if e2 <= q_max:
                    out[e2] -= sgn
                j += 1
            i += 1
    elif k == 3:
        l = 0
        while l * (l + 1) // 2 <= q_max:
            out[l * (l + 1) // 2] += (-1) ** l * (2 * l + 1)
            l += 1
    else:
        raise ValueError("varphi_pow supports k in {1, 2, 3}")
    return QSeries(0, out)


def varphi3_alt(q_max: int) -> QSeries:
    """φ(q)^3 = Σ_{l∈Z} (4l+1) q^{l(2l+1)}."""
    out = [0] * (q_max + 1)
    l = 0
    while True:
        hit = False
        for ll in ((0,) if l == 0 else (l, -l)):
            e = ll * (2 * ll + 1)
            if e <= q_max:
                out[e] += 4 * ll + 1
                hit = True
        if not hit:
            break
        l += 1
    return QSeries(0, out)


def eta(q_max: Rational) -> QSeries:
    """Dedekind eta η(q) = q^{1/24} φ(q), exact to q-exponent ``q_max``."""
    return varphi(math.floor(Fraction(q_max) - Fraction(1, 24))).mul_monomial(Fraction(1, 24))


def eta_inverse(q_max: Rational) -> QSeries:
    """1/η(q), exact to q-exponent ``q_max``."""
    n = math.floor(Fraction(q_max) + Fraction(1, 24))
    return varphi(n).inverse().mul_monomial(Fraction(-1, 24))


def eta_cubed_inverse(q_max: Rational) -> QSeries:
    n = math.floor(Fraction(q_max) + Fraction(1, 8))
    return varphi_pow(3, n).inverse().mul_monomial(Fraction(-1, 8))


def varphi_qz(q_max: Rational) -> BiSeries:
    """Jacobi triple product φ(q,z) = Σ (-1)^l q^{l(l-1)/2} z^l (closed window)."""
    terms = []
    l = 1
    q_max = Fraction(q_max)
    while True:
        hit = False
        for ll in (l, 1 - l):
            e = ll * (ll - 1) // 2
            if e <= q_max:
                terms.append((e, ll, (-1) ** (ll % 2)))
                hit = True
        if not hit:
            break
        l += 1
    return BiSeries.from_terms(terms, q_max, q_shift=0, z_shift=0)


def eta_affine(q_max: Rational, z_window: Optional[Tuple[Rational, Rational]] = None) -> BiSeries:
    """η(q,z) = q^{1/8} z^{-1/2} φ(q,z)."""
    s = varphi_qz(Fraction(q_max) - Fraction(1, 8)).mul_monomial(Fraction(1, 8), Fraction(-1, 2))
    if z_window is not None:
        s = s.restrict(None, *z_window)
    return s


# ---------------------------------------------------------------------------
# reciprocal of the triple product
# ---------------------------------------------------------------------------


@lru_cache(maxsize=4096)
def fm(m: int, q_max: int) -> QSeries:
    """f_m(q) from its defining sum; depends on |m| only."""
    a = abs(m)
    out = [0] * (q_max + 1)
    l = 1
    while l * (l - 1 + 2 * a) // 2 <= q_max:
        sgn = (-1) ** (l % 2)
        e1 = l * (l + 1 + 2 * a) // 2
        e2 = l * (l - 1 + 2 * a) // 2
        if e1 <= q_max:
            out[e1] += sgn
        out[e2] -= sgn
        l += 1
    return QSeries(0, out)


def Fn(n: Optional[int], q_max: int) -> QSeries:
    """F_n(q) = Σ_{l=0}^{n} (-1)^l q^{l(l+1)/2}; ``n=None`` means n = ∞."""
    out = [0] * (q_max + 1)
    l = 0
    while l * (l + 1) // 2 <= q_max and (n is None or l <= n):
        out[l * (l + 1) // 2] += (-1) ** l
        l += 1
    return QSeries(0, out)


def fm_alt(m: int, q_max: int) -> QSeries:
    """f_m via q^{|m|} + (-1)^m q^{-m²/2}(q^{m/2}+q^{-m/2})(F_∞ - F_{|m|})."""
    a = abs(m)
    tail = Fn(None, q_max + a * a) - Fn(a, q_max + a * a)
    half = Fraction(a * a, 2)
    # the m/2 factor is symmetric in m, so |m| can be used throughout
    part = tail.mul_monomial(-half + Fraction(a, 2)) + tail.mul_monomial(-half - Fraction(a, 2))
    part = part.scale((-1) ** (a % 2))
    mono = QSeries.from_terms({a: 1}, q_max, shift=0)
    return (mono + part).truncate(q_max)


def R_ell_defining(ell: int, q_max: int) -> QSeries:
    """R_ℓ from Σ_m (-1)^{ℓ-m} f_m q^{(ℓ-m)(ℓ-m-1)/2}, summed over all m that
    can contribute below ``q_max``."""
    acc = QSeries.zero(q_max)
    for m in range(-q_max - abs(ell) - 2, q_max + abs(ell) + 3):
        e = (ell - m) * (ell - m - 1) // 2
        if e + abs(m) > q_max:
            continue
        acc = acc + fm(m, q_max - e).mul_monomial(e, (-1) ** ((ell - m) % 2))
    return acc.truncate(q_max)


def R_ell(ell: int, q_max: int) -> QSeries:
    """R_ℓ(q) from the rearranged single sum (finite per q-order)."""
    out = {}
    base = ell * (ell - 1) // 2
    n = 1
    while True:
        exps = []
        # (q^n - q^{ℓn}) Σ q^{-ℓm} + (q^{ℓn} - 1) Σ q^{-(ℓ-1)m}
        pre = base + n * (n - 1) // 2
        sgn = (-1) ** ((ell + n) % 2)
        for mm in range(n):
            exps.append((pre + n - ell * mm, sgn))
            exps.append((pre + ell * n - ell * mm, -sgn))
            exps.append((pre + ell * n - (ell - 1) * mm, sgn))
            exps.append((pre - (ell - 1) * mm, -sgn))
        low = min(e for e, _ in exps)
        for e, c in exps:
            if e <= q_max:
                out[e] = out.get(e, 0) + c
        # the minimal exponent is quadratic in n with positive leading term
        if low > q_max and n > 2 * abs(ell) + 2:
            break
        n += 1
    if out and min(out) < 0 and any(out[e] for e in out if e < 0):
        raise ArithmeticError("negative powers survived in R_ell")
    out = {e: c for e, c in out.items() if e >= 0}
    return QSeries.from_terms(out, q_max, shift=0)


def sum_fm(q_max: int) -> QSeries:
    """Σ_{m∈Z} f_m(q); only |m| <= q_max contribute."""
    acc = fm(0, q_max)
    for m in range(1, q_max + 1):
        acc = acc + fm(m, q_max).scale(2)
    return acc


def reciprocal_varphi_qz(q_max: int, z_window: Tuple[int, int]) -> BiSeries:
    """1/φ(q,z) = (1/φ³(q)) (1/(1-z)) Σ_m f_m(q) z^m, with 1/(1-z) expanded
    in non-negative powers of z.  The coefficient of z^Z is the prefix sum
    Σ_{m<=Z} f_m(q) divided by φ³(q)."""
    q_max = int(math.floor(q_max))
    z_lo, z_hi = int(z_window[0]), int(z_window[1])
    inv3 = varphi_pow(3, q_max).inverse()
    rows: dict = {}
    prefix = QSeries.zero(q_max)
    for m in range(-q_max, z_hi + 1):
        if abs(m) <= q_max:
            prefix = prefix + fm(m, q_max)
        if m < z_lo:
            continue
        col = prefix * inv3
        for dq, c in enumerate(col.coeffs):
            if c:
                rows.setdefault(dq, {})[m] = c
    lo_closed = z_lo <= -q_max
    return BiSeries(0, 0, q_max, z_lo, z_hi, rows, lo_closed, False)


def eta_affine_inverse(q_max: Rational, z_window: Tuple[Rational, Rational]) -> BiSeries:
    """1/η(q,z) = q^{-1/8} z^{1/2}/φ(q,z); window and order are absolute."""
    lo, hi = Fraction(z_window[0]), Fraction(z_window[1])
    n = math.floor(Fraction(q_max) + Fraction(1, 8))
    r = reciprocal_varphi_qz(n, (math.ceil(lo - Fraction(1, 2)), math.floor(hi - Fraction(1, 2))))
    return r.mul_monomial(Fraction(-1, 8), Fraction(1, 2))


# ---------------------------------------------------------------------------
# Kac-Peterson product formula
# ---------------------------------------------------------------------------


def kac_peterson_sides(n: int, m: int, n2: int, m2: int, q_max: Rational):
    lhs = mul(theta(ThetaSpec(n, m), q_max), theta(ThetaSpec(n2, m2), q_max))
    rhs = None
    M = m + m2
    for ell in range(M):
        a = theta_specialized(ThetaSpec(n * m2 - n2 * m + 2 * ell * m * m2, m * m2 * M), q_max)
        b = theta(ThetaSpec(n + n2 + 2 * ell * m, M), q_max)
        term = mul(BiSeries.from_qseries(a), b)
        rhs = term if rhs is None else rhs + term
    return lhs, rhs


def kac_peterson_check(n: int, m: int, n2: int, m2: int, q_max: Rational) -> dict:
    """Expand both sides of the Kac-Peterson formula and compare exactly."""
    if m == 0 or m2 == 0 or m + m2 == 0:
        raise ValueError("m, m' and m+m' must be nonzero")
    lhs, rhs = kac_peterson_sides(n, m, n2, m2, q_max)
    q_top = min(lhs.q_top, rhs.q_top)
    diff = lhs.restrict(q_top).first_difference(rhs.restrict(q_top))
    return {"equal": diff is None, "first_discrepancy": diff, "q_max": q_top}
