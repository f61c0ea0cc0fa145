"""Exact truncated formal series in q and in (q, z).

Every series carries a single rational exponent shift per variable; stored
degrees are integers relative to that shift.  Coefficients are exact
rationals (``int`` where integral, ``Fraction`` otherwise).

A series is only known on a window.  For :class:`QSeries` the window is the
relative q-degrees ``0..q_max``.  For :class:`BiSeries` it is the rectangle
``0..q_max`` by ``z_min..z_max``; each z-edge may additionally be *closed*,
meaning the represented function has no support beyond that edge for the
q-degrees in the window.  Closed edges are what make products of
two-sided Laurent data well defined.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Dict, Iterable, Iterator, Mapping, Optional, Tuple, Union

Rational = Union[int, Fraction]
Number = Union[int, Fraction]


class WindowError(ValueError):
    """Raised when an operation leaves no provably exact coefficients."""


class NotAUnit(ValueError):
    """Raised when inverting a series whose leading coefficient vanishes."""


def frac(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, str):
        return Fraction(x)
    return Fraction(x)


def _norm(c: Number) -> Number:
    """Store integral rationals as ``int`` (much faster arithmetic)."""
    if isinstance(c, Fraction) and c.denominator == 1:
        return c.numerator
    return c


def _is_int(x: Fraction) -> bool:
    return Fraction(x).denominator == 1


def rat_str(x: Number) -> str:
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}"


# ---------------------------------------------------------------------------
# one variable
# ---------------------------------------------------------------------------


class QSeries:
    """``q^shift * sum_{d=0}^{q_max} c_d q^d + O(q^{shift+q_max+1})``."""

    __slots__ = ("shift", "coeffs")

    def __init__(self, shift: Rational, coeffs: Iterable[Number]):
        self.shift = Fraction(shift)
        self.coeffs = tuple(_norm(c) for c in coeffs)
        if not self.coeffs:
            raise WindowError("empty QSeries window")

    # construction -----------------------------------------------------
    @classmethod
    def from_terms(cls, terms: Mapping[Rational, Number] | Iterable[Tuple[Rational, Number]],
                   top: Rational, shift: Optional[Rational] = None) -> "QSeries":
        """Build from absolute exponents; exact up to absolute exponent ``top``.

        ``shift`` fixes the lattice when there are no terms.
        """
        items = terms.items() if isinstance(terms, Mapping) else terms
        acc: Dict[Fraction, Number] = {}
        for e, c in items:
            e = Fraction(e)
            if e <= top and c:
                acc[e] = acc.get(e, 0) + c
        acc = {e: c for e, c in acc.items() if c}
        top = Fraction(top)
        if shift is None:
            shift = min(acc) if acc else top
        shift = Fraction(shift)
        if acc:
            shift = min(shift, min(acc))
        if top < shift:
            # empty window: move down the lattice so nothing above top is claimed
            shift -= math.ceil(shift - top)
        q_max = math.floor(top - shift)
        coeffs = [0] * (q_max + 1)
        for e, c in acc.items():
            d = e - shift
            if d.denominator != 1:
                raise ValueError("q-exponents off the series lattice")
            coeffs[int(d)] += c
        return cls(shift, coeffs)

    @classmethod
    def one(cls, q_max: int) -> "QSeries":
        return cls(0, [1] + [0] * q_max)

    @classmethod
    def zero(cls, top: Rational, shift: Rational = 0) -> "QSeries":
        shift, top = Fraction(shift), Fraction(top)
        if top < shift:
            # keep the lattice but never claim exactness beyond top
            shift -= math.ceil(shift - top)
        return cls(shift, [0] * (math.floor(top - shift) + 1))

    # basic data -------------------------------------------------------
    @property
    def q_max(self) -> int:
        return len(self.coeffs) - 1

    @property
    def top(self) -> Fraction:
        """Largest absolute exponent known exactly."""
        return self.shift + self.q_max

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def low(self) -> Optional[int]:
        for i, c in enumerate(self.coeffs):
            if c:
                return i
        return None

    def coeff(self, e: Rational) -> Fraction:
        d = Fraction(e) - self.shift
        if d > self.q_max:
            raise WindowError(f"exponent {e} beyond truncation {self.top}")
        if d < 0 or d.denominator != 1:
            return Fraction(0)
        return Fraction(self.coeffs[int(d)])

    def terms(self) -> Iterator[Tuple[Fraction, Number]]:
        for i, c in enumerate(self.coeffs):
            if c:
                yield self.shift + i, c

    def normalized(self) -> "QSeries":
        lo = self.low()
        if lo is None or lo == 0:
            return self
        return QSeries(self.shift + lo, self.coeffs[lo:])

    def truncate(self, top: Rational) -> "QSeries":
        top = Fraction(top)
        if top > self.top:
            raise WindowError("cannot extend truncation")
        n = math.floor(top - self.shift)
        if n < 0:
            return QSeries.zero(top, self.shift)
        return QSeries(self.shift, self.coeffs[: n + 1])

    # arithmetic -------------------------------------------------------
    def _aligned(self, other: "QSeries"):
        d = other.shift - self.shift
        if d.denominator != 1:
            if other.is_zero():
                return self, QSeries.zero(other.top, self.shift)
            if self.is_zero():
                return QSeries.zero(self.top, other.shift), other
            raise ValueError("adding series on different q-lattices")
        return self, other

    def __add__(self, other):
        if not isinstance(other, QSeries):
            if other == 0:
                return self
            return self + QSeries(0, [other]).extend_const(self)
        a, b = self._aligned(other)
        shift = min(a.shift, b.shift)
        top = min(a.top, b.top)
        n = math.floor(top - shift)
        if n < 0:
            return QSeries.zero(top, shift)
        out = [0] * (n + 1)
        for s in (a, b):
            off = int(s.shift - shift)
            for i, c in enumerate(s.coeffs):
                k = i + off
                if k > n:
                    break
                if c:
                    out[k] += c
        return QSeries(shift, out)

    def extend_const(self, like: "QSeries") -> "QSeries":
        """Constant series padded to the truncation of ``like``."""
        c = self.coeffs[0]
        n = max(0, math.floor(like.top))
        return QSeries(0, [c] + [0] * n)

    __radd__ = __add__

    def __neg__(self):
        return QSeries(self.shift, [-c for c in self.coeffs])

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c: Number) -> "QSeries":
        c = _norm(Fraction(c)) if isinstance(c, Fraction) else c
        return QSeries(self.shift, [c * x for x in self.coeffs])

    def mul_monomial(self, e: Rational, c: Number = 1) -> "QSeries":
        """Multiply by ``c q^e``."""
        return QSeries(self.shift + Fraction(e), [c * x for x in self.coeffs])

    def __mul__(self, other):
        if not isinstance(other, QSeries):
            return self.scale(other)
        la, lb = self.low(), other.low()
        shift = self.shift + other.shift
        la_ = self.q_max + 1 if la is None else la
        lb_ = other.q_max + 1 if lb is None else lb
        n = min(self.q_max + lb_, other.q_max + la_)
        if la is None or lb is None:
            return QSeries(shift, [0] * (n + 1))
        a, b = self.coeffs, other.coeffs
        out = [0] * (n + 1)
        for i in range(la, min(len(a), n + 1)):
            ai = a[i]
            if not ai:
                continue
            for k in range(lb, min(len(b), n + 1 - i)):
                bk = b[k]
                if bk:
                    out[i + k] += ai * bk
        return QSeries(shift, out)

    __rmul__ = __mul__

    def __pow__(self, k: int) -> "QSeries":
        if k < 0:
            return self.inverse() ** (-k)
        out = QSeries.one(self.q_max)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def inverse(self) -> "QSeries":
        """Multiplicative inverse; the window is kept at the same length."""
        s = self.normalized()
        if s.is_zero():
            raise NotAUnit("zero series is not invertible")
        a = s.coeffs
        n = s.q_max
        a0 = Fraction(a[0])
        inv0 = 1 / a0
        b = [0] * (n + 1)
        b[0] = _norm(inv0)
        for d in range(1, n + 1):
            acc = 0
            for i in range(1, d + 1):
                if a[i]:
                    acc += a[i] * b[d - i]
            b[d] = _norm(-acc * inv0) if acc else 0
        return QSeries(-s.shift, b)

    def __truediv__(self, other):
        if isinstance(other, QSeries):
            return self * other.inverse()
        return self.scale(Fraction(1) / Fraction(other))

    def subs_power(self, k: int) -> "QSeries":
        """q -> q^k for positive integer k."""
        if k <= 0:
            raise ValueError("k must be positive")
        out = [0] * (self.q_max * k + 1)
        for i, c in enumerate(self.coeffs):
            out[i * k] = c
        return QSeries(self.shift * k, out)

    # comparison -------------------------------------------------------
    def first_difference(self, other: "QSeries") -> Optional[Tuple[Fraction, Fraction, Fraction]]:
        """First absolute exponent on the common window where the series differ."""
        top = min(self.top, other.top)
        d = self - other if (other.shift - self.shift).denominator == 1 else None
        if d is None:
            for e, c in sorted(list(self.terms()) + [(e, -c) for e, c in other.terms()]):
                if e <= top:
                    return e, self.coeff(e), other.coeff(e)
            return None
        for e, c in d.terms():
            if e <= top:
                return e, self.coeff(e), other.coeff(e)
        return None

    def agrees(self, other: "QSeries") -> bool:
        return self.first_difference(other) is None

    def __eq__(self, other) -> bool:
        if not isinstance(other, QSeries):
            return NotImplemented
        return self.agrees(other)

    __hash__ = None  # type: ignore[assignment]

    def __repr__(self) -> str:
        body = " + ".join(f"{Fraction(c)}*q^{e}" for e, c in list(self.terms())[:8])
        return f"QSeries({body or '0'} + O(q^{self.top + 1}))"

    def to_json(self) -> dict:
        return {
            "q_shift": rat_str(self.shift),
            "q_max": self.q_max,
            "coeffs": [[i, rat_str(c)] for i, c in enumerate(self.coeffs) if c],
        }


# ---------------------------------------------------------------------------
# two variables
# ---------------------------------------------------------------------------

Row = Dict[int, Number]


def _frac_part(x: Fraction) -> Fraction:
    return x - math.floor(x)


class BiSeries:
    """Truncated series in (q, z) with exact window bookkeeping.

    ``rows[dq][dz]`` is the coefficient of ``q^(q_shift+dq) z^(z_shift+dz)``.
    The z-shift is kept in ``[0, 1)`` so that relative z-degrees equal the
    floor of absolute exponents.
    """

    __slots__ = ("q_shift", "z_shift", "q_max", "z_min", "z_max", "rows",
                 "lo_closed", "hi_closed")

    def __init__(self, q_shift: Rational, z_shift: Rational, q_max: int,
                 z_min: int, z_max: int, rows: Mapping[int, Mapping[int, Number]],
                 lo_closed: bool = False, hi_closed: bool = False):
        q_shift, z_shift = Fraction(q_shift), Fraction(z_shift)
        k = math.floor(z_shift)
        if k:
            z_shift -= k
            z_min -= k
            z_max -= k
            rows = {dq: {dz + k: c for dz, c in row.items()} for dq, row in rows.items()}
        if q_max < 0 or z_min > z_max:
            raise WindowError("window underflow")
        self.q_shift = q_shift
        self.z_shift = z_shift
        self.q_max = int(q_max)
        self.z_min = int(z_min)
        self.z_max = int(z_max)
        clean: Dict[int, Row] = {}
        for dq, row in rows.items():
            if dq < 0 or dq > q_max:
                continue
            r = {dz: _norm(c) for dz, c in row.items() if c and z_min <= dz <= z_max}
            if r:
                clean[dq] = r
        self.rows = clean
        self.lo_closed = lo_closed
        self.hi_closed = hi_closed

    # construction -----------------------------------------------------
    @classmethod
    def from_terms(cls, terms: Iterable[Tuple[Rational, Rational, Number]], q_top: Rational,
                   z_lo: Optional[Rational] = None, z_hi: Optional[Rational] = None,
                   q_shift: Optional[Rational] = None, z_shift: Optional[Rational] = None,
                   lo_closed: Optional[bool] = None, hi_closed: Optional[bool] = None) -> "BiSeries":
        """Build from absolute (q-exponent, z-exponent, coeff) triples.

        ``terms`` must list every term with q-exponent <= ``q_top``.  Terms
        with z outside ``[z_lo, z_hi]`` are dropped and the corresponding edge
        is marked open.  With no z-bounds the window is the bounding box of
        the support and both edges are closed.
        """
        acc: Dict[Tuple[Fraction, Fraction], Number] = {}
        for qe, ze, c in terms:
            qe = Fraction(qe)
            if qe > q_top or not c:
                continue
            key = (qe, Fraction(ze))
            acc[key] = acc.get(key, 0) + c
        acc = {k: v for k, v in acc.items() if v}
        q_top = Fraction(q_top)
        if q_shift is None:
            q_shift = min((k[0] for k in acc), default=q_top)
        q_shift = Fraction(q_shift)
        if acc:
            q_shift = min(q_shift, min(k[0] for k in acc))
        if z_shift is None:
            z_shift = _frac_part(next(iter(acc))[1]) if acc else Fraction(0)
        z_shift = _frac_part(Fraction(z_shift))
        zs_all = [k[1] for k in acc]
        lo_out = hi_out = False
        if z_lo is None:
            zmin = math.floor(min(zs_all) - z_shift) if zs_all else 0
        else:
            zmin = math.ceil(Fraction(z_lo) - z_shift)
        if z_hi is None:
            zmax = math.floor(max(zs_all) - z_shift) if zs_all else 0
        else:
            zmax = math.floor(Fraction(z_hi) - z_shift)
        rows: Dict[int, Dict[int, Number]] = {}
        for (qe, ze), c in acc.items():
            dq = qe - q_shift
            dz = ze - z_shift
            if dq.denominator != 1 or dz.denominator != 1:
                raise ValueError("exponents off the series lattice")
            dq, dz = int(dq), int(dz)
            if dz < zmin:
                lo_out = True
                continue
            if dz > zmax:
                hi_out = True
                continue
            row = rows.setdefault(dq, {})
            row[dz] = row.get(dz, 0) + c
        q_max = max(0, math.floor(q_top - q_shift))
        return cls(q_shift, z_shift, q_max, zmin, zmax, rows,
                   (not lo_out) if lo_closed is None else lo_closed,
                   (not hi_out) if hi_closed is None else hi_closed)

    @classmethod
    def monomial(cls, q_exp: Rational = 0, z_exp: Rational = 0, coeff: Number = 1,
                 q_max: int = 0) -> "BiSeries":
        return cls.from_terms([(q_exp, z_exp, coeff)], Fraction(q_exp) + q_max,
                              q_shift=q_exp, z_shift=z_exp)

    @classmethod
    def polynomial(cls, terms: Iterable[Tuple[Rational, Rational, Number]], q_max_abs: Rational) -> "BiSeries":
        """Exact finite polynomial, known to absolute q-order ``q_max_abs``."""
        return cls.from_terms(terms, q_max_abs)

    @classmethod
    def from_qseries(cls, s: QSeries, z_exp: Rational = 0) -> "BiSeries":
        z_exp = Fraction(z_exp)
        zs = _frac_part(z_exp)
        dz = int(z_exp - zs)
        rows = {i: {dz: c} for i, c in enumerate(s.coeffs) if c}
        return cls(s.shift, zs, s.q_max, dz, dz, rows, True, True)

    # data -------------------------------------------------------------
    @property
    def q_top(self) -> Fraction:
        return self.q_shift + self.q_max

    @property
    def z_lo(self) -> Fraction:
        return self.z_shift + self.z_min

    @property
    def z_hi(self) -> Fraction:
        return self.z_shift + self.z_max

    def is_zero(self) -> bool:
        return not self.rows

    def coeff(self, q_exp: Rational, z_exp: Rational) -> Fraction:
        dq = Fraction(q_exp) - self.q_shift
        dz = Fraction(z_exp) - self.z_shift
        if dq > self.q_max or dz < self.z_min or dz > self.z_max:
            if dq <= self.q_max and ((dz < self.z_min and self.lo_closed) or (dz > self.z_max and self.hi_closed)):
                return Fraction(0)
            raise WindowError(f"(q^{q_exp}, z^{z_exp}) outside the known window")
        if dq < 0 or dq.denominator != 1 or dz.denominator != 1:
            return Fraction(0)
        return Fraction(self.rows.get(int(dq), {}).get(int(dz), 0))

    def terms(self) -> Iterator[Tuple[Fraction, Fraction, Number]]:
        for dq in sorted(self.rows):
            row = self.rows[dq]
            for dz in sorted(row):
                yield self.q_shift + dq, self.z_shift + dz, row[dz]

    def q_low(self) -> Optional[int]:
        return min(self.rows) if self.rows else None

    def z_support(self) -> Tuple[Optional[int], Optional[int]]:
        lo = hi = None
        for row in self.rows.values():
            a, b = min(row), max(row)
            lo = a if lo is None else min(lo, a)
            hi = b if hi is None else max(hi, b)
        return lo, hi

    def normalized(self) -> "BiSeries":
        lo = self.q_low()
        if not lo:
            return self
        return BiSeries(self.q_shift + lo, self.z_shift, self.q_max - lo, self.z_min, self.z_max,
                        {dq - lo: r for dq, r in self.rows.items()}, self.lo_closed, self.hi_closed)

    def restrict(self, q_top: Optional[Rational] = None, z_lo: Optional[Rational] = None,
                 z_hi: Optional[Rational] = None) -> "BiSeries":
        """Shrink the window (absolute bounds)."""
        q_max = self.q_max if q_top is None else math.floor(Fraction(q_top) - self.q_shift)
        if q_max > self.q_max:
            raise WindowError("cannot extend q truncation")
        zmin = self.z_min if z_lo is None else math.ceil(Fraction(z_lo) - self.z_shift)
        zmax = self.z_max if z_hi is None else math.floor(Fraction(z_hi) - self.z_shift)
        if zmin < self.z_min and not self.lo_closed:
            raise WindowError("cannot extend open lower z edge")
        if zmax > self.z_max and not self.hi_closed:
            raise WindowError("cannot extend open upper z edge")
        lo_c, hi_c = self.lo_closed, self.hi_closed
        rows = {}
        for dq, row in self.rows.items():
            if dq > q_max:
                continue
            r = {}
            for dz, c in row.items():
                if dz < zmin:
                    lo_c = False
                elif dz > zmax:
                    hi_c = False
                else:
                    r[dz] = c
            if r:
                rows[dq] = r
        if zmin > self.z_min:
            lo_c = lo_c and all(min(r) >= zmin for dq, r in self.rows.items() if dq <= q_max)
        if zmax < self.z_max:
            hi_c = hi_c and all(max(r) <= zmax for dq, r in self.rows.items() if dq <= q_max)
        return BiSeries(self.q_shift, self.z_shift, q_max, zmin, zmax, rows, lo_c, hi_c)

    # arithmetic -------------------------------------------------------
    def __add__(self, other):
        if not isinstance(other, BiSeries):
            if other == 0:
                return self
            raise TypeError("BiSeries + scalar is ambiguous; build a monomial")
        if other.is_zero() and (other.q_shift - self.q_shift).denominator != 1:
            other = BiSeries(self.q_shift, self.z_shift, math.floor(other.q_top - self.q_shift),
                             math.ceil(other.z_lo - self.z_shift), math.floor(other.z_hi - self.z_shift),
                             {}, other.lo_closed, other.hi_closed)
        if self.is_zero() and (other.q_shift - self.q_shift).denominator != 1:
            return other + self
        if (self.q_shift - other.q_shift).denominator != 1:
            raise ValueError("adding BiSeries on different q-lattices")
        if self.z_shift != other.z_shift:
            if other.is_zero():
                other = BiSeries(other.q_shift, self.z_shift, other.q_max, math.ceil(other.z_lo - self.z_shift),
                                 math.floor(other.z_hi - self.z_shift), {}, other.lo_closed, other.hi_closed)
            elif self.is_zero():
                return other + self
            else:
                raise ValueError("adding BiSeries on different z-lattices")
        q_shift = min(self.q_shift, other.q_shift)
        q_top = min(self.q_top, other.q_top)
        # window in z: intersection, except a closed edge admits extension
        def lo_edge(s):
            if s.lo_closed:
                return None
            return s.z_min

        def hi_edge(s):
            if s.hi_closed:
                return None
            return s.z_max
        los = [e for e in (lo_edge(self), lo_edge(other)) if e is not None]
        his = [e for e in (hi_edge(self), hi_edge(other)) if e is not None]
        zmin = max(los) if los else min(self.z_min, other.z_min)
        zmax = min(his) if his else max(self.z_max, other.z_max)
        if zmin > zmax:
            raise WindowError("window underflow in addition")
        q_max = math.floor(q_top - q_shift)
        if q_max < 0:
            raise WindowError("window underflow in addition")
        rows: Dict[int, Dict[int, Number]] = {}
        lo_c = not los
        hi_c = not his
        for s in (self, other):
            off = int(s.q_shift - q_shift)
            for dq, row in s.rows.items():
                k = dq + off
                if k > q_max:
                    continue
                tgt = rows.setdefault(k, {})
                for dz, c in row.items():
                    if dz < zmin:
                        lo_c = False
                        continue
                    if dz > zmax:
                        hi_c = False
                        continue
                    tgt[dz] = tgt.get(dz, 0) + c
        return BiSeries(q_shift, self.z_shift, q_max, zmin, zmax, rows, lo_c, hi_c)

    __radd__ = __add__

    def __neg__(self):
        return self.scale(-1)

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c: Number) -> "BiSeries":
        if isinstance(c, Fraction):
            c = _norm(c)
        return BiSeries(self.q_shift, self.z_shift, self.q_max, self.z_min, self.z_max,
                        {dq: {dz: c * v for dz, v in row.items()} for dq, row in self.rows.items()},
                        self.lo_closed, self.hi_closed)

    def mul_monomial(self, q_exp: Rational = 0, z_exp: Rational = 0, coeff: Number = 1) -> "BiSeries":
        """Multiply by ``coeff q^q_exp z^z_exp``; exact, window shifts along."""
        z_exp = Fraction(z_exp)
        nz = self.z_shift + z_exp
        k = math.floor(nz)
        if isinstance(coeff, Fraction):
            coeff = _norm(coeff)
        rows = {dq: {dz + k: coeff * v for dz, v in row.items()} for dq, row in self.rows.items()}
        return BiSeries(self.q_shift + Fraction(q_exp), nz - k, self.q_max, self.z_min + k,
                        self.z_max + k, rows, self.lo_closed, self.hi_closed)

    def __mul__(self, other):
        if isinstance(other, QSeries):
            other = BiSeries.from_qseries(other)
        if not isinstance(other, BiSeries):
            return self.scale(other)
        return mul(self, other)

    __rmul__ = __mul__

    def flip_z(self) -> "BiSeries":
        return flip_z(self)

    def specialize_z1(self) -> QSeries:
        return specialize_z1(self)

    def inverse(self) -> "BiSeries":
        return invert_unit(self)

    def first_difference(self, other: "BiSeries"):
        """First window point where ``self`` and ``other`` differ, or None."""
        q_top = min(self.q_top, other.q_top)
        lo = max(self.z_lo if not self.lo_closed else -math.inf,
                 other.z_lo if not other.lo_closed else -math.inf)
        hi = min(self.z_hi if not self.hi_closed else math.inf,
                 other.z_hi if not other.hi_closed else math.inf)
        keys = set()
        for s in (self, other):
            for qe, ze, c in s.terms():
                if qe <= q_top and lo <= ze <= hi:
                    keys.add((qe, ze))
        for qe, ze in sorted(keys):
            a = _safe_coeff(self, qe, ze)
            b = _safe_coeff(other, qe, ze)
            if a != b:
                return qe, ze, a, b
        return None

    def agrees(self, other: "BiSeries") -> bool:
        return self.first_difference(other) is None

    def __eq__(self, other) -> bool:
        if not isinstance(other, BiSeries):
            return NotImplemented
        return self.agrees(other)

    __hash__ = None  # type: ignore[assignment]

    def __repr__(self) -> str:
        t = list(self.terms())[:6]
        body = " + ".join(f"{Fraction(c)}*q^{qe}*z^{ze}" for qe, ze, c in t)
        return (f"BiSeries({body or '0'} ...; q<={self.q_top}, "
                f"z in [{self.z_lo},{self.z_hi}])")

    def to_json(self) -> dict:
        return {
            "q_shift": rat_str(self.q_shift),
            "z_shift": rat_str(self.z_shift),
            "q_max": self.q_max,
            "z_min": self.z_min,
            "z_max": self.z_max,
            "rows": [[dq, [[dz, rat_str(c)] for dz, c in sorted(self.rows[dq].items())]]
                     for dq in sorted(self.rows)],
        }

    @classmethod
    def from_json(cls, data: Mapping) -> "BiSeries":
        rows = {int(dq): {int(dz): Fraction(c) for dz, c in r} for dq, r in data["rows"]}
        return cls(Fraction(data["q_shift"]), Fraction(data["z_shift"]), int(data["q_max"]),
                   int(data["z_min"]), int(data["z_max"]), rows)


def _safe_coeff(s: BiSeries, qe, ze) -> Fraction:
    try:
        return s.coeff(qe, ze)
    except WindowError:
        raise


def mul(a: BiSeries, b: BiSeries) -> BiSeries:
    """Product, narrowed to the rectangle on which it is provably exact."""
    q_shift = a.q_shift + b.q_shift
    zs = a.z_shift + b.z_shift
    carry = math.floor(zs)
    zs -= carry
    la, lb = a.q_low(), b.q_low()
    la_ = a.q_max + 1 if la is None else la
    lb_ = b.q_max + 1 if lb is None else lb
    q_max = min(a.q_max + lb_, b.q_max + la_)
    alo, ahi = a.z_support()
    blo, bhi = b.z_support()
    if alo is None or blo is None:
        zmin = a.z_min + b.z_min + carry
        zmax = a.z_max + b.z_max + carry
        return BiSeries(q_shift, zs, q_max, zmin, zmax, {}, a.lo_closed and b.lo_closed,
                        a.hi_closed and b.hi_closed)
    if (not a.hi_closed and not b.lo_closed) or (not a.lo_closed and not b.hi_closed):
        raise WindowError("product of series open in opposite z-directions is ill-defined")
    # valid Z range (relative, before carry)
    zmax = math.inf
    zmin = -math.inf
    if not a.hi_closed:
        zmax = min(zmax, a.z_max + blo)
    if not b.hi_closed:
        zmax = min(zmax, b.z_max + alo)
    if not a.lo_closed:
        zmin = max(zmin, a.z_min + bhi)
    if not b.lo_closed:
        zmin = max(zmin, b.z_min + ahi)
    hi_closed = zmax == math.inf
    lo_closed = zmin == -math.inf
    if hi_closed:
        zmax = ahi + bhi
    if lo_closed:
        zmin = alo + blo
    if zmin > zmax or q_max < 0:
        raise WindowError("window underflow")
    rows: Dict[int, Dict[int, Number]] = {}
    for i, ra in a.rows.items():
        if i > q_max:
            continue
        for k, rb in b.rows.items():
            d = i + k
            if d > q_max:
                continue
            tgt = rows.setdefault(d, {})
            for za, ca in ra.items():
                for zb, cb in rb.items():
                    z = za + zb
                    if zmin <= z <= zmax:
                        tgt[z] = tgt.get(z, 0) + ca * cb
    rows = {d: {z + carry: c for z, c in r.items()} for d, r in rows.items()}
    return BiSeries(q_shift, zs, q_max, int(zmin) + carry, int(zmax) + carry, rows, lo_closed, hi_closed)


def flip_z(a: BiSeries) -> BiSeries:
    """``a(q, 1/z)``."""
    zs = -a.z_shift
    k = math.floor(zs)
    rows = {dq: {-dz + k: c for dz, c in row.items()} for dq, row in a.rows.items()}
    # absolute exponent -(zs_old + dz) = (zs - k) + (-dz + k) with zs = -zs_old
    return BiSeries(a.q_shift, zs - k, a.q_max, -a.z_max + k, -a.z_min + k, rows,
                    a.hi_closed, a.lo_closed)


def specialize_z1(a: BiSeries) -> QSeries:
    """Set z = 1.  Correct only when every q-row has finite z-support
    inside the window (e.g. theta numerators); the caller vouches for this."""
    coeffs = [0] * (a.q_max + 1)
    for dq, row in a.rows.items():
        coeffs[dq] = sum(row.values())
    return QSeries(a.q_shift, coeffs)


def invert_unit(a, z_hi: Optional[Rational] = None):
    """Inverse of a unit.  For BiSeries, 1/(lowest q-row) is expanded in
    increasing powers of z from its lowest monomial; ``z_hi`` (absolute)
    asks for the result to be exact at least up to that z-exponent."""
    if isinstance(a, QSeries):
        return a.inverse()
    if not (a.lo_closed and a.hi_closed):
        raise WindowError("inversion needs a z-closed series")
    a = a.normalized()
    if a.is_zero() or 0 not in a.rows:
        raise NotAUnit("leading coefficient vanishes")
    a0 = a.rows[0]
    z0 = min(a0)
    c0 = Fraction(a0[z0])
    inv0 = 1 / c0
    # shift so that the leading monomial is q^0 z^0
    rows_a = {dq: {dz - z0: c for dz, c in row.items()} for dq, row in a.rows.items()}
    n = a.q_max
    mono = len(a0) == 1
    ext = 0
    for dq, row in rows_a.items():
        if dq:
            ext = max(ext, -min(row))
    if mono:
        z_cap = None
    else:
        want = 20 if z_hi is None else math.ceil(Fraction(z_hi) + a.z_shift + z0) + 1
        z_cap = max(want, 0) + ext * n + max(rows_a[0])
    b: Dict[int, Dict[int, Number]] = {}
    b_low: Dict[int, int] = {}
    for d in range(n + 1):
        rhs: Dict[int, Number] = {0: 1} if d == 0 else {}
        for i in range(1, d + 1):
            ra = rows_a.get(i)
            rb = b.get(d - i)
            if not ra or not rb:
                continue
            for za, ca in ra.items():
                for zb, cb in rb.items():
                    z = za + zb
                    rhs[z] = rhs.get(z, 0) - ca * cb
        rhs = {z: c for z, c in rhs.items() if c}
        row: Dict[int, Number] = {}
        if rhs:
            lo = min(rhs)
            hi = (max(rhs) + max(rows_a[0])) if mono else z_cap
            # solve a0 * row = rhs as power series in z
            work = dict(rhs)
            for z in range(lo, (hi if hi is not None else lo) + 1):
                c = work.get(z, 0)
                if not c:
                    continue
                v = _norm(c * inv0)
                row[z] = v
                for za, ca in rows_a[0].items():
                    if za:
                        work[z + za] = work.get(z + za, 0) - ca * v
        if row:
            b[d] = row
            b_low[d] = min(row)
    # window: the rows are exact for z <= z_cap - (lag); the truncation of the
    # power series in z at z_cap propagates through the recursion, shrinking
    # the exact region by ext per q-step.
    if mono:
        zlo = min(b_low.values()) if b_low else 0
        zhi = max(max(r) for r in b.values()) if b else 0
        out = BiSeries(0, 0, n, zlo, zhi, b, True, True)
    else:
        zlo = min(b_low.values()) if b_low else 0
        zhi = z_cap - ext * n - (max(rows_a[0]))
        out = BiSeries(0, 0, n, zlo, zhi, b, True, False)
    return out.mul_monomial(-a.q_shift, -(a.z_shift + z0), 1).scale(1)
