"""Levels, weights, central charges and label bookkeeping."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from .series import Rational


@dataclass(frozen=True)
class Level:
    """Fractional level t = p/p' (k = t - 2)."""

    p: int
    pp: int

    def __post_init__(self):
        if self.p <= 0 or self.pp <= 0:
            raise ValueError("p and p' must be positive")
        if math.gcd(self.p, self.pp) != 1:
            raise ValueError("p and p' must be coprime")

    @property
    def t(self) -> Fraction:
        return Fraction(self.p, self.pp)

    @property
    def k(self) -> Fraction:
        return self.t - 2

    def __str__(self) -> str:
        return f"(p,p')=({self.p},{self.pp})"


@dataclass(frozen=True)
class WeightData:
    j: Fraction
    h: Fraction
    hbar: Fraction
    hhat: Fraction


def valid_label(r: int, s: int) -> bool:
    return r * s > 0 or (r > 0 and s == 0)


def check_label(r: int, s: int) -> None:
    if not valid_label(r, s):
        raise ValueError(f"({r},{s}) is not a module label: need rs > 0, or r > 0 with s = 0")


def j_rs(level: Level, r: int, s: int) -> Fraction:
    return (r - s * level.t - 1) / 2


def h_of_j(level: Level, j: Rational) -> Fraction:
    j = Fraction(j)
    return j * (j + 1) / level.t


def hbar_rs(t: Fraction, r: int, s: int) -> Fraction:
    return ((r - s * t) ** 2 - (1 - t) ** 2) / (4 * t)


def hbar_of_j(level: Level, j: Rational) -> Fraction:
    """Virasoro weight attached to an affine weight: ((2j+1)² - (1-t)²)/(4t)."""
    t = level.t
    return ((2 * Fraction(j) + 1) ** 2 - (1 - t) ** 2) / (4 * t)


def hhat_rs(t: Fraction, r: int, s: int) -> Fraction:
    return ((r - s * t) ** 2 - (1 - t) ** 2) / (8 * t) + Fraction(1 - (-1) ** ((r + s) % 2), 32)


def weight(level: Level, r: int, s: int) -> WeightData:
    t = level.t
    x = r - s * t
    return WeightData(
        j=(x - 1) / 2,
        h=(x * x - 1) / (4 * t),
        hbar=hbar_rs(t, r, s),
        hhat=hhat_rs(t, r, s),
    )


def c_affine(t: Rational) -> Fraction:
    t = Fraction(t)
    return 3 * (t - 2) / t


def c_virasoro(t: Rational) -> Fraction:
    t = Fraction(t)
    return 1 - 6 * (1 - t) ** 2 / t


def c_super(t: Rational) -> Fraction:
    t = Fraction(t)
    return Fraction(3, 2) - 3 * (1 - t) ** 2 / t


def c_coset(t: Rational, n: int) -> Fraction:
    """Central charge of the coset at affine level t-2 and integer level n."""
    t = Fraction(t)
    return Fraction(3 * n, n + 2) - Fraction(6 * n) / (t * (t + n))


def c_n(t: Rational, n: int) -> Fraction:
    t = Fraction(t)
    return Fraction(3 * n, n + 2) - 6 * (1 - t) ** 2 / (n * t)


def central_charges(level: Level) -> Dict[str, Fraction]:
    t = level.t
    return {"c": c_affine(t), "cbar": c_virasoro(t), "chat": c_super(t)}


# ---------------------------------------------------------------------------
# label decompositions
# ---------------------------------------------------------------------------


def ell_split(level: Level, r: int, s: int) -> Tuple[int, int, int, int]:
    """(r0_hat, s0_hat, ell, ell') with r = r0_hat + ell p, s = s0_hat + ell' p'."""
    ell = r // level.p
    ellp = s // level.pp
    return r - ell * level.p, s - ellp * level.pp, ell, ellp


def admissible_labels(level: Level) -> List[Tuple[int, int]]:
    return [(r0, s0) for r0 in range(1, level.p) for s0 in range(level.pp)]


def label_of_weight(level: Level, j: Rational) -> Optional[Tuple[int, int]]:
    """Some (r, s) with 2j+1 = r - st, or None when j is off the Kac lattice."""
    x = (2 * Fraction(j) + 1) * level.pp
    if x.denominator != 1:
        return None
    x = int(x)
    # r p' - s p = x
    inv = pow(level.pp, -1, level.p)
    r = (x * inv) % level.p
    s = (r * level.pp - x) // level.p
    return r, s


# ---------------------------------------------------------------------------
# orbits and embeddings
# ---------------------------------------------------------------------------


def orbit(level: Level, j: Rational, bound: int) -> Dict[str, List[Fraction]]:
    """Weight orbit O_j (|n| <= bound) and the integral sub-orbit."""
    j = Fraction(j)
    t = level.t
    full = sorted({j + n * t for n in range(-bound, bound + 1)}
                  | {n * t - j - 1 for n in range(-bound, bound + 1)})
    lab = label_of_weight(level, j)
    sub = {j + n * level.p for n in range(-bound, bound + 1)}
    if lab is not None:
        sub |= {j - lab[0] + n * level.p for n in range(-bound, bound + 1)}
    sub = sorted(sub)
    return {"orbit": full, "sub_orbit": sub}


def in_orbit(level: Level, j: Rational, jp: Rational) -> bool:
    j, jp = Fraction(j), Fraction(jp)
    t = level.t
    return ((jp - j) / t).denominator == 1 or ((jp + j + 1) / t).denominator == 1


def in_sub_orbit(level: Level, j: Rational, jp: Rational) -> bool:
    return in_orbit(level, j, jp) and (Fraction(jp) - Fraction(j)).denominator == 1


def embedding_condition(level: Level, j: Rational, jp: Rational) -> bool:
    """True iff V_{j'} is a submodule of V_j (j' in the sub-orbit of j)."""
    j, jp = Fraction(j), Fraction(jp)
    if not in_sub_orbit(level, j, jp):
        raise ValueError(f"{jp} is not in the sub-orbit of {j}")
    dh = h_of_j(level, jp) - h_of_j(level, j)
    if dh < max(jp - j, 0):
        return False
    forbidden = {2 * j_rs(level, r0, s0) for r0 in range(1, level.p) for s0 in range(level.pp)}
    return (j + jp) not in forbidden


# ---------------------------------------------------------------------------
# classification and Kac tables
# ---------------------------------------------------------------------------


def in_S_irr(level: Level, r: int, s: int) -> bool:
    p, pp = level.p, level.pp
    if r > 0 and r % p == 0 and 0 <= s <= pp - 1:
        return True
    return r < 0 and r % p == 0 and -pp <= s <= -1


def in_S_quo(level: Level, r: int, s: int) -> bool:
    return -level.p <= r <= level.p or -level.pp <= s <= level.pp - 1


def quasi_integrable(j: Rational) -> bool:
    x = 2 * Fraction(j)
    return x.denominator == 1 and x >= 0


def classify(level: Level, r: int, s: int) -> Dict[str, bool]:
    check_label(r, s)
    return {
        "in_S_irr": in_S_irr(level, r, s),
        "in_S_quo": in_S_quo(level, r, s),
        "quasi_integrable": quasi_integrable(j_rs(level, r, s)),
    }


@dataclass(frozen=True)
class KacEntry:
    r: int
    s: int
    j: Fraction
    h: Fraction
    irreducible: bool
    admissible: bool


def kac_table(level: Level, r_values: Sequence[int], s_values: Sequence[int]) -> List[KacEntry]:
    """Entries of the extended affine Kac table for valid labels in the ranges."""
    out = []
    for s in s_values:
        for r in r_values:
            if not valid_label(r, s):
                continue
            w = weight(level, r, s)
            out.append(KacEntry(r, s, w.j, w.h, in_S_irr(level, r, s),
                                1 <= r <= level.p - 1 and 0 <= s <= level.pp - 1))
    return out


def kac_quadrants(level: Level, rmax: int = 6, smin: int = -5, smax: int = 5):
    upper = kac_table(level, range(1, rmax + 1), range(0, smax + 1))
    lower = kac_table(level, range(-rmax, 0), range(-1, smin - 1, -1))
    return upper, lower


def _fmt(x: Fraction) -> str:
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def render_kac_table(level: Level, rmax: int = 6, smin: int = -5, smax: int = 5) -> str:
    """Aligned text: rows by s (top row largest s); '*' marks irreducible
    affine Kac modules, brackets mark the admissible subtable."""
    upper, lower = kac_quadrants(level, rmax, smin, smax)
    cells: Dict[Tuple[int, int], str] = {}
    for e in upper + lower:
        txt = _fmt(e.j) + ("*" if e.irreducible else "")
        if e.admissible:
            txt = f"[{txt}]"
        cells[(e.r, e.s)] = txt
    width = max((len(v) for v in cells.values()), default=4) + 1
    k = level.k
    lines = [f"k = {_fmt(k)}   {level}   entries j_(r,s)"]
    rs_all = list(range(-rmax, 0)) + list(range(1, rmax + 1))
    header = "s\\r".rjust(5) + "".join(str(r).rjust(width) for r in rs_all)
    lines.append(header)
    for s in range(smax, smin - 1, -1):
        row = str(s).rjust(5)
        for r in rs_all:
            row += cells.get((r, s), "").rjust(width)
        lines.append(row)
    return "\n".join(lines)
