"""Affine, Virasoro and superconformal characters.

Every affine builder returns a :class:`ClosedFormCharacter`, a finite
numerator (monomials, theta functions and small polynomial factors) over
η(q,z) or η(q).  ``expand`` turns it into a :class:`BiSeries`; residues are
taken on the closed form.  Builder ``q_max`` arguments count grades above
the character's leading exponent; ``q_top`` arguments are absolute.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from .series import BiSeries, QSeries, Rational, WindowError, mul
from .structure import Label, StaggeredDescriptor
from .theta import (ThetaSpec, eta_affine_inverse, eta_cubed_inverse, eta_inverse,
                    theta_specialized, varphi)
from .weights import Level, check_label, ell_split, j_rs

DEFAULT_Z_WINDOW = (-10, 10)

Poly = Tuple[Tuple[Fraction, Fraction, Fraction], ...]  # (coeff, q-exp, z-exp)


@dataclass(frozen=True)
class CFTerm:
    """coeff · q^q_exp · z^z_exp · Θ(spec) · extra."""

    coeff: Fraction
    q_exp: Fraction
    z_exp: Fraction = Fraction(0)
    theta: Optional[ThetaSpec] = None
    extra: Poly = ()

    def _extra(self) -> Poly:
        return self.extra or ((Fraction(1), Fraction(0), Fraction(0)),)

    def monomials(self, q_top: Fraction) -> Iterable[Tuple[Fraction, Fraction, Fraction]]:
        """All numerator monomials with q-exponent <= q_top."""
        ex = self._extra()
        emin = min(e[1] for e in ex)
        if self.theta is None:
            base = [(Fraction(0), Fraction(0), 1)]
        else:
            base = self.theta.terms(q_top - self.q_exp - emin)
        for tq, tz, tc in base:
            for c, eq, ez in ex:
                qe = self.q_exp + tq + eq
                if qe <= q_top:
                    yield qe, self.z_exp + tz + ez, self.coeff * tc * c

    def at_z1(self, q_top: Fraction) -> Dict[Fraction, Fraction]:
        """Numerator monomials summed at z = 1 (thetas summed directly)."""
        ex = self._extra()
        emin = min(e[1] for e in ex)
        out: Dict[Fraction, Fraction] = {}
        if self.theta is None:
            base = {Fraction(0): 1}
        else:
            ts = theta_specialized(self.theta, q_top - self.q_exp - emin)
            base = dict(ts.terms())
        for tq, tc in base.items():
            for c, eq, _ in ex:
                qe = self.q_exp + tq + eq
                if qe <= q_top:
                    out[qe] = out.get(qe, 0) + self.coeff * tc * c
        return out

    def flipped(self) -> "CFTerm":
        th = None
        if self.theta is not None:
            th = ThetaSpec(-self.theta.n, self.theta.m, -self.theta.nu, self.theta.d)
        ex = tuple((c, a, -b) for c, a, b in self.extra)
        return CFTerm(self.coeff, self.q_exp, -self.z_exp, th, ex)

    def lowest(self) -> Fraction:
        """Lower bound on the q-exponents of the term."""
        emin = min(e[1] for e in self._extra())
        lo = Fraction(0)
        if self.theta is not None:
            m = self.theta.m
            c = Fraction(self.theta.n, 2 * m)
            # min over the non-excluded lattice points
            skip = set(self.theta.excluded())
            best = None
            centre = -math.floor(c)
            for i in range(centre - len(skip) - 3, centre + len(skip) + 4):
                if i in skip:
                    continue
                v = m * (i + c) ** 2
                best = v if best is None else min(best, v)
            lo = best
        return self.q_exp + lo + emin


@dataclass(frozen=True)
class ClosedFormCharacter:
    terms: Tuple[CFTerm, ...]
    denominator: str = "eta_qz"
    name: str = ""

    def __post_init__(self):
        if self.denominator not in ("eta_qz", "eta_q"):
            raise ValueError(f"unsupported denominator {self.denominator!r}")

    # algebra ----------------------------------------------------------
    def __add__(self, other: "ClosedFormCharacter") -> "ClosedFormCharacter":
        if other == 0:
            return self
        if self.denominator != other.denominator:
            raise ValueError("cannot add characters over different denominators")
        return ClosedFormCharacter(self.terms + other.terms, self.denominator,
                                   f"{self.name} + {other.name}")

    __radd__ = __add__

    def scale(self, c: Rational) -> "ClosedFormCharacter":
        c = Fraction(c)
        return ClosedFormCharacter(tuple(CFTerm(t.coeff * c, t.q_exp, t.z_exp, t.theta, t.extra)
                                         for t in self.terms), self.denominator,
                                   f"{c}*({self.name})")

    def __neg__(self):
        return self.scale(-1)

    def __sub__(self, other):
        return self + (-other)

    def flip_z(self) -> "ClosedFormCharacter":
        """χ(q, 1/z); η(q,1/z) = -η(q,z) supplies an overall sign."""
        terms = tuple(t.flipped() for t in self.terms)
        out = ClosedFormCharacter(terms, self.denominator, f"flip({self.name})")
        return out.scale(-1) if self.denominator == "eta_qz" else out

    # data -------------------------------------------------------------
    @property
    def denominator_lead(self) -> Fraction:
        return Fraction(1, 8) if self.denominator == "eta_qz" else Fraction(1, 24)

    def lowest(self) -> Fraction:
        """Lower bound for the lowest q-exponent of the expansion."""
        if not self.terms:
            return Fraction(0)
        return min(t.lowest() for t in self.terms) - self.denominator_lead

    def numerator(self, q_top: Rational) -> BiSeries:
        q_top = Fraction(q_top)
        mons = [m for t in self.terms for m in t.monomials(q_top)]
        if not mons:
            return BiSeries(0, 0, 0, 0, 0, {}, True, True) if not self.terms else \
                BiSeries.from_terms([], q_top, q_shift=min(t.q_exp for t in self.terms))
        return BiSeries.from_terms(mons, q_top)

    def numerator_z1(self, q_top: Rational) -> QSeries:
        q_top = Fraction(q_top)
        acc: Dict[Fraction, Fraction] = {}
        for t in self.terms:
            for e, c in t.at_z1(q_top).items():
                acc[e] = acc.get(e, 0) + c
        shift = min((t.q_exp for t in self.terms), default=Fraction(0))
        return QSeries.from_terms(acc, q_top, shift=_lattice_floor(shift, acc))

    # expansion --------------------------------------------------------
    def expand(self, q_top: Rational, z_window: Tuple[Rational, Rational] = DEFAULT_Z_WINDOW) -> BiSeries:
        """Series in non-negative powers of z (1/η(q,z) expanded about z = 0),
        exact for q-exponents <= q_top and z in z_window."""
        if self.denominator != "eta_qz":
            raise ValueError("expand() needs an η(q,z) denominator; use expand_q()")
        q_top = Fraction(q_top)
        zlo, zhi = Fraction(z_window[0]), Fraction(z_window[1])
        num = self.numerator(q_top + Fraction(1, 8))
        nlo, nhi = num.z_support()
        if nlo is None:
            return BiSeries.from_terms([], q_top, zlo, zhi, q_shift=num.q_shift)
        num_lo_abs = num.z_shift + nlo
        num_hi_abs = num.z_shift + nhi
        qlow = num.q_shift + num.q_low()
        inv = _inv_eta(q_top - qlow, zlo - num_hi_abs, zhi - num_lo_abs)
        return mul(num, inv).restrict(q_top, zlo, zhi)

    def expand_q(self, q_top: Rational) -> QSeries:
        """Expansion of a z-free character over η(q)."""
        if self.denominator != "eta_q":
            raise ValueError("expand_q() needs an η(q) denominator")
        q_top = Fraction(q_top)
        num = self.numerator_z1(q_top + Fraction(1, 24))
        if num.is_zero():
            return QSeries.zero(q_top, num.shift - Fraction(1, 24))
        return _cap(num * eta_inverse(q_top - num.shift - num.low() + 1), q_top)

    def to_json(self) -> dict:
        def r(x):
            return f"{Fraction(x).numerator}/{Fraction(x).denominator}"
        return {
            "name": self.name,
            "denominator": self.denominator,
            "terms": [{
                "coeff": r(t.coeff), "q_exp": r(t.q_exp), "z_exp": r(t.z_exp),
                "theta": None if t.theta is None else
                [t.theta.n, t.theta.m, t.theta.nu, t.theta.d],
                "extra": [[r(c), r(a), r(b)] for c, a, b in t.extra],
            } for t in self.terms],
        }


def _cap(s: QSeries, q_top: Fraction) -> QSeries:
    """Truncate to the last lattice point <= q_top, which must be exact."""
    last = s.shift + math.floor(Fraction(q_top) - s.shift)
    if last > s.top:
        raise WindowError(f"series exact only to {s.top}, need {last}")
    return s.truncate(last)


def _lattice_floor(shift: Fraction, acc) -> Fraction:
    if acc:
        return min(min(acc), shift) if all((e - shift).denominator == 1 for e in acc) else min(acc)
    return shift


@lru_cache(maxsize=256)
def _inv_eta(q_top: Fraction, lo: Fraction, hi: Fraction) -> BiSeries:
    return eta_affine_inverse(q_top, (lo, hi))


ZERO_AFFINE = ClosedFormCharacter((), "eta_qz", "0")


def _kac_factor(r: int, s: int) -> Poly:
    return ((Fraction(1), Fraction(0), Fraction(0)), (Fraction(-1), Fraction(r * s), Fraction(r)))


# ---------------------------------------------------------------------------
# Verma and Kac characters
# ---------------------------------------------------------------------------


def verma_closed(level: Level, j: Rational) -> ClosedFormCharacter:
    j = Fraction(j)
    x = j + Fraction(1, 2)
    return ClosedFormCharacter((CFTerm(Fraction(1), x * x / level.t, -x),), "eta_qz", f"chi_V[{j}]")


def leading_exponent(level: Level, j: Rational) -> Fraction:
    """h_j - c/24 = (j+1/2)²/t - 1/8."""
    x = Fraction(j) + Fraction(1, 2)
    return x * x / level.t - Fraction(1, 8)


def verma_char(level: Level, j: Rational, q_max: int = 10,
               z_window: Tuple[Rational, Rational] = DEFAULT_Z_WINDOW) -> BiSeries:
    cf = verma_closed(level, j)
    return cf.expand(leading_exponent(level, j) + q_max, z_window)


def kac_closed(level: Level, r: int, s: int) -> ClosedFormCharacter:
    check_label(r, s)
    p, pp = level.p, level.pp
    x = Fraction(r * pp - s * p)
    return ClosedFormCharacter((CFTerm(Fraction(1), x * x / (4 * p * pp), -x / (2 * pp), None,
                                       _kac_factor(r, s)),), "eta_qz", f"chiK[{r},{s}]")


def kac_char(level: Level, r: int, s: int, q_max: int = 10,
             z_window: Tuple[Rational, Rational] = DEFAULT_Z_WINDOW) -> BiSeries:
    return kac_closed(level, r, s).expand(leading_exponent(level, j_rs(level, r, s)) + q_max, z_window)


def kac_char_from_vermas(level: Level, r: int, s: int, q_top: Rational,
                         z_window: Tuple[Rational, Rational] = DEFAULT_Z_WINDOW) -> BiSeries:
    """χ_{j_{r,s}} - χ_{j_{-r,s}}, the defining difference."""
    return verma_closed(level, j_rs(level, r, s)).expand(q_top, z_window) - \
        verma_closed(level, j_rs(level, -r, s)).expand(q_top, z_window)


# ---------------------------------------------------------------------------
# irreducible characters
# ---------------------------------------------------------------------------


def lam(level: Level, r0: int, s0: int) -> Tuple[int, int]:
    """(λ⁺, λ⁻) = (r0 p' - p s0, -r0 p' - p s0)."""
    return r0 * level.pp - level.p * s0, -r0 * level.pp - level.p * s0


def _theta_pair(level: Level, n1: int, nu1: int, n2: int, nu2: int) -> Tuple[CFTerm, CFTerm]:
    m = level.p * level.pp
    return (CFTerm(Fraction(1), Fraction(0), Fraction(0), ThetaSpec(n1, m, nu1, level.pp)),
            CFTerm(Fraction(-1), Fraction(0), Fraction(0), ThetaSpec(n2, m, nu2, level.pp)))


def admissible_closed(level: Level, r0: int, s0: int) -> ClosedFormCharacter:
    if not (1 <= r0 <= level.p - 1 and 0 <= s0 <= level.pp - 1):
        raise ValueError(f"({r0},{s0}) is not an admissible label at {level}")
    lp, lm = lam(level, r0, s0)
    return ClosedFormCharacter(_theta_pair(level, lp, 0, lm, 0), "eta_qz", f"ch_adm[{r0},{s0}]")


def _monomial_irr(level: Level, X: int, sign: int, a: int, b: int, name: str) -> ClosedFormCharacter:
    """q^{pX²/(4p')} z^{-sign·pX/(2p')} (1 - q^a z^b)/η(q,z)."""
    p, pp = level.p, level.pp
    ex = ((Fraction(1), Fraction(0), Fraction(0)), (Fraction(-1), Fraction(a), Fraction(b)))
    return ClosedFormCharacter((CFTerm(Fraction(1), Fraction(p * X * X, 4 * pp),
                                       Fraction(-sign * p * X, 2 * pp), None, ex),), "eta_qz", name)


def irr_closed(level: Level, r: int, s: int) -> ClosedFormCharacter:
    """Irreducible character of weight j_{r,s} from the general formulas,
    selected by whether r lies in pZ."""
    check_label(r, s)
    p, pp = level.p, level.pp
    rh0, sh0, ell, ellp = ell_split(level, r, s)
    name = f"ch[{r},{s}]"
    if rh0 != 0:
        lp, lm = lam(level, rh0, sh0)
        d = ellp - ell
        return ClosedFormCharacter(_theta_pair(level, lp - d * p * pp, d, lm - abs(d) * p * pp, abs(d)),
                                   "eta_qz", name)
    X = (ell - ellp) * pp - sh0
    if ell > ellp:
        return _monomial_irr(level, X, 1, (ell - ellp) * p * sh0, (ell - ellp) * p, name)
    return _monomial_irr(level, X, 1, (ell - ellp - 1) * p * (sh0 - pp), (ell - ellp - 1) * p, name)


def canonical_label(level: Level, r: int, s: int) -> Label:
    """Distinct-weight representative: r >= 1 with 0 <= s <= p'-1, or
    r <= -p with -p' <= s <= -1."""
    p, pp = level.p, level.pp
    k = s // pp
    r1, s1 = r - k * p, s - k * pp
    if r1 >= 1:
        return r1, s1
    return r1 - p, s1 - pp


def irr_branch(level: Level, r: int, s: int) -> Tuple[str, Dict[str, int]]:
    """Which of the four canonical families the weight j_{r,s} belongs to.

    'upper' and 'upper_edge' have canonical s >= 0, 'lower' and 'lower_edge'
    have s < 0; the edge families are those with p | r."""
    p, pp = level.p, level.pp
    rc, sc = canonical_label(level, r, s)
    if sc >= 0:
        if rc % p:
            return "upper", {"r0": rc % p, "s0": sc, "ell": rc // p}
        return "upper_edge", {"s0": sc, "ell": rc // p - 1}
    s0 = sc + pp
    if rc % p:
        r0 = rc % p
        return "lower", {"r0": r0, "s0": s0, "ell": (r0 - rc) // p - 2}
    return "lower_edge", {"s0": s0, "ell": -rc // p - 1}


def irr_closed_canonical(level: Level, r: int, s: int) -> ClosedFormCharacter:
    """The same character from the four canonical families."""
    p, pp = level.p, level.pp
    br, a = irr_branch(level, r, s)
    name = f"ch[{r},{s}]:{br}"
    ell, s0 = a["ell"], a["s0"]
    if br == "upper":
        r0 = a["r0"]
        return ClosedFormCharacter(_theta_pair(level, r0 * pp - p * s0 + ell * p * pp, -ell,
                                               -r0 * pp - p * s0 - ell * p * pp, ell), "eta_qz", name)
    if br == "upper_edge":
        return _monomial_irr(level, (ell + 1) * pp - s0, 1, (ell + 1) * p * s0, (ell + 1) * p, name)
    if br == "lower":
        r0 = a["r0"]
        return ClosedFormCharacter(_theta_pair(level, r0 * pp - p * s0 - (ell + 1) * p * pp, ell + 1,
                                               -r0 * pp - p * s0 - (ell + 1) * p * pp, ell + 1),
                                   "eta_qz", name)
    return _monomial_irr(level, ell * pp + s0, -1, (ell + 1) * p * (pp - s0), -(ell + 1) * p, name)


def irr_char(level: Level, r: int, s: int, q_max: int = 10,
             z_window: Tuple[Rational, Rational] = DEFAULT_Z_WINDOW) -> BiSeries:
    return irr_closed(level, r, s).expand(leading_exponent(level, j_rs(level, r, s)) + q_max, z_window)


def irr_from_vermas(level: Level, r: int, s: int, q_top: Rational,
                    z_window: Tuple[Rational, Rational] = DEFAULT_Z_WINDOW) -> BiSeries:
    """Verma characters combined over the submodule diagram of V_{j_{r,s}}:
    the alternating sum over a braid, χ_top - χ_next along a chain."""
    from .structure import verma_loewy
    q_top = Fraction(q_top)
    if verma_loewy(level, r, s, 1).kind == "chain":
        d = verma_loewy(level, r, s, 1)
        top, nxt = d.nodes[0], d.nodes[1]
        return (verma_closed(level, top.j) - verma_closed(level, nxt.j)).expand(q_top, z_window)
    depth = 1
    while True:
        d = verma_loewy(level, r, s, depth)
        last = [n for n in d.nodes if n.layer == depth]
        if all(leading_exponent(level, n.j) > q_top for n in last):
            break
        depth += 1
    acc = None
    for n in d.nodes:
        if leading_exponent(level, n.j) > q_top:
            continue
        term = verma_closed(level, n.j).scale((-1) ** n.layer)
        acc = term if acc is None else acc + term
    return acc.expand(q_top, z_window)


# ---------------------------------------------------------------------------
# Kac decompositions
# ---------------------------------------------------------------------------


def kac_decompose(level: Level, r: int, s: int) -> List[Tuple[Label, int]]:
    """Irreducible composition factors of the affine Kac module A_{r,s}."""
    check_label(r, s)
    p, pp = level.p, level.pp
    rh0, sh0, ell, ellp = ell_split(level, r, s)
    out: List[Label] = []
    if rh0 != 0:
        out.append((r, s))
        for i in range(abs(ell - ellp) + 1, abs(ell + ellp + 1)):
            e = (-1) ** ((i + ell + ellp) % 2)
            s_i = sh0 - (1 - e) * pp // 2
            out.append((e * rh0 + i * p, s_i))
            out.append((e * rh0 - i * p, s_i))
        out.append((-r + 2 * (ell + ellp + 1) * p, s))
    elif ell > 0:
        for i in range(min(2 * ell - 1, 2 * ellp) + 1):
            e = (-1) ** i
            out.append((e * (ell + ellp - i) * p, sh0 - (1 - e) * pp // 2))
    else:
        for i in range(min(-2 * ell - 1, -2 * ellp - 2) + 1):
            e = (-1) ** i
            out.append((e * (ell + ellp + 2 + i) * p, sh0 - (1 - e) * pp // 2))
    return [(lab, 1) for lab in out]


def decomposition_closed(level: Level, r: int, s: int) -> ClosedFormCharacter:
    acc = None
    for (a, b), m in kac_decompose(level, r, s):
        # decomposition labels need not be module labels; use the weight
        term = irr_closed(level, *canonical_label(level, a, b)).scale(m)
        acc = term if acc is None else acc + term
    return acc


# ---------------------------------------------------------------------------
# staggered characters
# ---------------------------------------------------------------------------


def staggered_closed(level: Level, desc: StaggeredDescriptor) -> ClosedFormCharacter:
    acc = None
    for lab, m in desc.character_terms:
        term = irr_closed(level, *canonical_label(level, *lab)).scale(m)
        acc = term if acc is None else acc + term
    return ClosedFormCharacter(acc.terms, "eta_qz", f"chi[{desc.name}]")


def staggered_char(level: Level, desc: StaggeredDescriptor, q_top: Rational,
                   z_window: Tuple[Rational, Rational] = DEFAULT_Z_WINDOW) -> BiSeries:
    return staggered_closed(level, desc).expand(q_top, z_window)


# ---------------------------------------------------------------------------
# integer level: string functions and admissible characters
# ---------------------------------------------------------------------------


def canonical_string_key(n: int, l: int, m: int) -> Tuple[int, int]:
    """Reduce (l, m) to the fundamental domain 0 <= m <= l <= n."""
    if n < 1:
        raise ValueError("n must be a positive integer")
    if (l - m) % 2:
        raise ValueError(f"string function c^{l}_{m} needs l - m even")
    if not 0 <= l <= n:
        raise ValueError(f"l = {l} outside 0..{n}")
    m %= 2 * n
    if m > n:
        m = 2 * n - m
    if m > l:
        l, m = n - l, n - m
    return l, m


def string_lead(n: int, l: int, m: int) -> Fraction:
    return Fraction((l + 1) ** 2, 4 * (n + 2)) - Fraction(m * m, 4 * n) - Fraction(1, 8)


@lru_cache(maxsize=4096)
def _string_numerator(n: int, l: int, m: int, N: int) -> QSeries:
    """Σ_{i,l'>=0} (-1)^{i+l'} q^{E}(1 - q^{D}) truncated at q^N."""
    out = [0] * (N + 1)
    # E >= (i²+l'²)/2 and D >= -(n-1)(i+1); loop until both exceed N
    B = 1
    while B * B / 2 - (n - 1) * (B + 1) - (n - 1) ** 2 / 2 - (n - 1) <= N:
        B += 1
    for i in range(B + 1):
        for k in range(B + 1):
            E = i * k * (n + 1) + i * (i + 1 + l + m) // 2 + k * (k + 1 + l - m) // 2
            D = (i + k + 1) * (n + 1 - l) - (i - k) * m
            sgn = (-1) ** ((i + k) % 2)
            if 0 <= E <= N:
                out[E] += sgn
            if 0 <= E + D <= N:
                out[E + D] -= sgn
            elif E + D < 0:
                raise ArithmeticError("negative exponent in string-function sum")
    return QSeries(0, out)


def string_function(n: int, l: int, m: int, q_max: Optional[int] = None,
                    q_top: Optional[Rational] = None) -> QSeries:
    """c^l_m(q) at level n, from the fundamental domain.

    ``q_max`` counts grades above the leading exponent; ``q_top`` is absolute.
    """
    l, m = canonical_string_key(n, l, m)
    pre = Fraction((l + 1) ** 2, 4 * (n + 2)) - Fraction(m * m, 4 * n)
    if q_top is None:
        q_top = string_lead(n, l, m) + (10 if q_max is None else q_max)
    q_top = Fraction(q_top)
    N = math.floor(q_top - pre + Fraction(1, 8)) + 1
    if N < 1:
        return QSeries.zero(q_top, pre - Fraction(1, 8))
    num = _string_numerator(n, l, m, N).mul_monomial(pre)
    return _cap(num * eta_cubed_inverse(q_top - pre + 1), q_top)


def string_function_raw(n: int, l: int, m: int, q_top: Rational) -> QSeries:
    """The double sum evaluated at (l, m) without canonicalisation (only
    meaningful where all exponents are non-negative)."""
    pre = Fraction((l + 1) ** 2, 4 * (n + 2)) - Fraction(m * m, 4 * n)
    N = math.floor(Fraction(q_top) - pre + Fraction(1, 8)) + 1
    num = _string_numerator(n, l, m, N).mul_monomial(pre)
    return _cap(num * eta_cubed_inverse(Fraction(q_top) - pre + 1), q_top)


def string_function_from_character(n: int, l: int, m: int, q_top: Rational) -> QSeries:
    """c^l_m read off the theta expansion of ch^{n+2,1}_{l+1,0}: the
    coefficient of z^{-m/2} is c^l_m(q) q^{m²/4n}.  Works for any m with
    l - m even, without passing through the fundamental domain."""
    if (l - m) % 2:
        raise ValueError(f"string function c^{l}_{m} needs l - m even")
    q_top = Fraction(q_top)
    e = Fraction(m * m, 4 * n)
    ze = Fraction(-m, 2)
    ch = integer_level_closed(n, l + 1).expand(q_top + e, (ze, ze))
    terms = [(qe - e, c) for qe, zz, c in ch.terms() if zz == ze]
    return QSeries.from_terms(terms, q_top, shift=ch.q_shift - e)


def _odd_product(N: int) -> List[int]:
    """Coefficients of Π_{i>=1}(1 + x^{2i-1}) up to x^N."""
    out = [1] + [0] * N
    for a in range(1, N + 1, 2):
        for d in range(N, a - 1, -1):
            out[d] += out[d - a]
    return out


def n2_product_form(l: int, m: int, q_top: Rational) -> QSeries:
    """The three fundamental n = 2 string functions from their infinite
    products: c⁰₀ and c⁰₂ via Π(1 ± q^{i-1/2}), c¹₁ via Π(1 + q^i).

    1/(q^{1/48} η(q)) = q^{-1/16}/φ(q) and q^{1/24}/η(q) = 1/φ(q)."""
    q_top = Fraction(q_top)
    key = (l, m)
    if key in ((0, 0), (2, 2), (2, 0), (0, 2)):
        lead = Fraction(-1, 16)
        N = max(0, math.floor(q_top - lead))
        A = _odd_product(2 * N + 1)
        even = key in ((0, 0), (2, 2))
        # ½(A(x) ± A(-x)) keeps the even / odd powers of x = q^{1/2}
        half = [A[d] for d in range(0 if even else 1, 2 * N + 2, 2)]
        shift = lead + (0 if even else Fraction(1, 2))
        prod = QSeries(0, half[:N + 1])
        return _cap((prod * varphi(N).inverse()).mul_monomial(shift), q_top)
    if key == (1, 1):
        N = max(0, math.floor(q_top))
        P = [1] + [0] * N
        for a in range(1, N + 1):
            for d in range(N, a - 1, -1):
                P[d] += P[d - a]
        return _cap(QSeries(0, P) * varphi(N).inverse(), q_top)
    raise ValueError(f"(l, m) = {key} is not a fundamental n = 2 string function")


def integer_level_closed(n: int, rho: int) -> ClosedFormCharacter:
    """ch^{n+2,1}_{rho,0} = (Θ_{ρ,n+2} - Θ_{-ρ,n+2})/η(q,z)."""
    if not 1 <= rho <= n + 1:
        raise ValueError(f"rho must lie in 1..{n + 1}")
    return ClosedFormCharacter((CFTerm(Fraction(1), Fraction(0), Fraction(0), ThetaSpec(rho, n + 2)),
                                CFTerm(Fraction(-1), Fraction(0), Fraction(0), ThetaSpec(-rho, n + 2))),
                               "eta_qz", f"ch^[{n + 2},1][{rho},0]")


def integer_level_char(n: int, rho: int, q_max: int = 10,
                       z_window: Tuple[Rational, Rational] = DEFAULT_Z_WINDOW) -> BiSeries:
    lead = Fraction(rho * rho, 4 * (n + 2)) - Fraction(1, 8)
    return integer_level_closed(n, rho).expand(lead + q_max, z_window)


def integer_level_from_strings(n: int, rho: int, q_top: Rational,
                               z_window: Tuple[Rational, Rational] = DEFAULT_Z_WINDOW) -> BiSeries:
    """Σ_l c^{ρ-1}_{2l}(q) q^{l²/n} z^{-l}, l ∈ Z + (ρ-1)/2, on the window."""
    q_top = Fraction(q_top)
    zlo, zhi = Fraction(z_window[0]), Fraction(z_window[1])
    terms = []
    half = Fraction(rho - 1, 2)
    lo = math.ceil(-zhi - half)
    hi = math.floor(-zlo - half)
    for k in range(lo, hi + 1):
        l = k + half
        e = l * l / n
        if e + string_lead(n, rho - 1, int(2 * l)) > q_top:
            continue
        c = string_function(n, rho - 1, int(2 * l), q_top=q_top - e)
        for qe, cc in c.terms():
            terms.append((qe + e, -l, cc))
    q_shift = Fraction(rho * rho, 4 * (n + 2)) - Fraction(1, 8)
    return BiSeries.from_terms(terms, q_top, zlo, zhi, q_shift=q_shift,
                               z_shift=-half, lo_closed=False, hi_closed=False)


# ---------------------------------------------------------------------------
# Virasoro and superconformal Kac characters
# ---------------------------------------------------------------------------


def virasoro_kac_closed(p: int, pp: int, r: int, s: int) -> ClosedFormCharacter:
    """q^{h̄-c̄/24}(1-q^{rs})/φ(q) written over η(q)."""
    if r < 1 or s < 1:
        raise ValueError("Virasoro Kac characters need r, s >= 1")
    t = Fraction(p, pp)
    x = r - s * t
    ex = ((Fraction(1), Fraction(0), Fraction(0)), (Fraction(-1), Fraction(r * s), Fraction(0)))
    return ClosedFormCharacter((CFTerm(Fraction(1), x * x / (4 * t), Fraction(0), None, ex),),
                               "eta_q", f"chiVir[{r},{s}]^({p},{pp})")


def virasoro_lead(p: int, pp: int, r: int, s: int) -> Fraction:
    t = Fraction(p, pp)
    return (r - s * t) ** 2 / (4 * t) - Fraction(1, 24)


def virasoro_kac_char(p: int, pp: int, r: int, s: int, q_max: int = 10,
                      q_top: Optional[Rational] = None) -> QSeries:
    if q_top is None:
        q_top = virasoro_lead(p, pp, r, s) + q_max
    return virasoro_kac_closed(p, pp, r, s).expand_q(q_top)


def minimal_model_closed(p: int, pp: int, r0: int, s0: int) -> ClosedFormCharacter:
    """(Θ_{λ⁺,pp'}(q) - Θ_{λ⁻,pp'}(q))/η(q)."""
    lp, lm = r0 * pp - p * s0, -r0 * pp - p * s0
    return ClosedFormCharacter((CFTerm(Fraction(1), Fraction(0), Fraction(0), ThetaSpec(lp, p * pp)),
                                CFTerm(Fraction(-1), Fraction(0), Fraction(0), ThetaSpec(lm, p * pp))),
                               "eta_q", f"chVir[{r0},{s0}]^({p},{pp})")


@dataclass(frozen=True)
class SuperChar:
    """A superconformal character split by the parity projections P_0, P_1.

    ``parts[δ]`` is a QSeries; in the Neveu-Schwarz sector the two parts sit
    on q-lattices offset by 1/2, in the Ramond sector they coincide.
    """

    kappa: Fraction
    parts: Tuple[QSeries, QSeries]

    @property
    def sector(self) -> str:
        return "NS" if self.kappa else "R"

    def P(self, delta: int) -> QSeries:
        return self.parts[delta % 2]

    def full(self):
        """Full character: a QSeries in the Ramond sector, the pair of
        lattice components in the Neveu-Schwarz sector."""
        if self.kappa == 0:
            return self.parts[0] + self.parts[1]
        return self.parts


def _ns_product(N2: int) -> List[int]:
    """Coefficients in x = q^{1/2} of Π(1+x^{2i-1})/(1-x^{2i}) to x^{N2}."""
    a = [0] * (N2 + 1)
    a[0] = 1
    for i in range(1, N2 + 1):
        e = 2 * i - 1
        if e > N2:
            break
        for d in range(N2, e - 1, -1):
            a[d] += a[d - e]
    for i in range(1, N2 // 2 + 1):
        e = 2 * i
        for d in range(e, N2 + 1):
            a[d] += a[d - e]
    return a


def _r_product(N: int) -> List[int]:
    """Coefficients of Π(1+q^i)/(1-q^i) to q^N."""
    a = [0] * (N + 1)
    a[0] = 1
    for i in range(1, N + 1):
        for d in range(N, i - 1, -1):
            a[d] += a[d - i]
    for i in range(1, N + 1):
        for d in range(i, N + 1):
            a[d] += a[d - i]
    return a


def super_lead(p: int, pp: int, r: int, s: int) -> Fraction:
    t = Fraction(p, pp)
    return (r - s * t) ** 2 / (8 * t) - Fraction(1, 16) + Fraction(1 - (-1) ** ((r + s) % 2), 32)


def superconformal_kac_char(p: int, pp: int, r: int, s: int, q_max: int = 10,
                            q_top: Optional[Rational] = None) -> SuperChar:
    """2(1-κ) q^{ĥ-ĉ/24} Π(1+q^{i-κ})/(1-q^i) (1-q^{rs/2}), κ = 1/2 iff r+s even."""
    if r < 1 or s < 1:
        raise ValueError("superconformal Kac characters need r, s >= 1")
    lead = super_lead(p, pp, r, s)
    if q_top is None:
        q_top = lead + q_max
    q_top = Fraction(q_top)
    kappa = Fraction(1, 2) if (r + s) % 2 == 0 else Fraction(0)
    # work in x = q^{1/2}
    N2 = max(0, math.floor(2 * (q_top - lead)))
    if kappa:
        prod = _ns_product(N2)
    else:
        base = _r_product(N2 // 2)
        prod = [0] * (N2 + 1)
        for i, c in enumerate(base):
            prod[2 * i] = c
    rs = r * s
    x = [prod[d] - (prod[d - rs] if d >= rs else 0) for d in range(N2 + 1)]
    x = [2 * (1 - kappa) * c for c in x]
    if kappa:
        even = QSeries(lead, [x[d] for d in range(0, N2 + 1, 2)])
        odd_c = [x[d] for d in range(1, N2 + 1, 2)]
        odd = QSeries(lead + Fraction(1, 2), odd_c or [0])
        if not odd_c:
            odd = QSeries.zero(q_top, lead + Fraction(1, 2))
        parts = (even.truncate(min(even.top, q_top)), odd)
        return SuperChar(kappa, parts)
    full = QSeries(lead, [x[d] for d in range(0, N2 + 1, 2)])
    half = full.scale(Fraction(1, 2))
    return SuperChar(kappa, (half, half))
