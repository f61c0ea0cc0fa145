"""Sparse exact linear algebra over the rationals.

Rows are dicts ``column -> value``.  Elimination is carried out fraction-free
on integer rows (cross-multiplication followed by division by the row
content); rationals only reappear when a solution is read off.
"""

from __future__ import annotations

from fractions import Fraction
from functools import reduce
from math import gcd, lcm
from typing import Dict, Hashable, Iterable, List, Optional, Sequence, Tuple

Row = Dict[Hashable, Fraction]
IntRow = Dict[Hashable, int]


def _intify(row: Row) -> IntRow:
    vals = [Fraction(v) for v in row.values() if v]
    if not vals:
        return {}
    den = reduce(lcm, (v.denominator for v in vals), 1)
    out = {c: int(Fraction(v) * den) for c, v in row.items() if v}
    return _primitive(out)


def _primitive(row: IntRow) -> IntRow:
    if not row:
        return row
    g = 0
    for v in row.values():
        g = gcd(g, v)
        if g == 1:
            break
    if g > 1:
        row = {c: v // g for c, v in row.items()}
    return row


def _eliminate(row: IntRow, prow: IntRow, col) -> IntRow:
    """row <- a*row - b*prow so that ``col`` vanishes, then make primitive."""
    b = row.get(col, 0)
    if not b:
        return row
    a = prow[col]
    g = gcd(a, b)
    a, b = a // g, b // g
    out = {c: a * v for c, v in row.items()}
    for c, v in prow.items():
        nv = out.get(c, 0) - b * v
        if nv:
            out[c] = nv
        else:
            out.pop(c, None)
    return _primitive(out)


class Echelon:
    """Incrementally maintained reduced row echelon form.

    ``order`` fixes the column preference for pivots (earlier = preferred);
    columns absent from it are ordered after all listed ones, by ``repr``.
    """

    def __init__(self, order: Optional[Sequence[Hashable]] = None):
        self._rank_of = {c: i for i, c in enumerate(order)} if order is not None else None
        self.rows: Dict[Hashable, IntRow] = {}

    def _key(self, c):
        if self._rank_of is not None and c in self._rank_of:
            return (0, self._rank_of[c], "")
        return (1, 0, repr(c)) if self._rank_of is not None else (0, 0, c)

    def reduce_int(self, row: IntRow) -> IntRow:
        for c in [c for c in row if c in self.rows]:
            row = _eliminate(row, self.rows[c], c)
        return row

    def add(self, row: Row) -> bool:
        """Insert a row; returns True if the rank grew."""
        r = self.reduce_int(_intify(row))
        if not r:
            return False
        piv = min(r, key=self._key)
        if r[piv] < 0:
            r = {c: -v for c, v in r.items()}
        for c, other in list(self.rows.items()):
            if piv in other:
                self.rows[c] = _eliminate(other, r, piv)
        self.rows[piv] = r
        return True

    @property
    def rank(self) -> int:
        return len(self.rows)

    @property
    def pivots(self) -> List[Hashable]:
        return sorted(self.rows, key=self._key)

    def normalized(self, col) -> Row:
        r = self.rows[col]
        a = r[col]
        return {c: Fraction(v, a) for c, v in r.items()}

    def reduce(self, row: Row) -> Row:
        """Remainder of ``row`` modulo the row space (pivot entries cleared)."""
        out = {c: Fraction(v) for c, v in row.items() if v}
        for c in [c for c in out if c in self.rows]:
            x = out.get(c)
            if not x:
                continue
            r = self.rows[c]
            a = r[c]
            for cc, v in r.items():
                nv = out.get(cc, 0) - x * Fraction(v, a)
                if nv:
                    out[cc] = nv
                else:
                    out.pop(cc, None)
        return out


def rref(rows: Iterable[Row], order: Optional[Sequence[Hashable]] = None) -> Echelon:
    e = Echelon(order)
    for r in rows:
        e.add(r)
    return e


def nullspace(rows: Iterable[Row], columns: Sequence[Hashable]) -> List[Row]:
    """Basis of {x : row·x = 0 for all rows}, one vector per free column."""
    e = rref(rows, columns)
    out = []
    for f in columns:
        if f in e.rows:
            continue
        vec: Row = {f: Fraction(1)}
        for c, r in e.rows.items():
            v = r.get(f)
            if v:
                vec[c] = Fraction(-v, r[c])
        out.append(vec)
    return out


RHS = "__rhs__"


def solve_affine(rows: Iterable[Tuple[Row, Fraction]], columns: Sequence[Hashable]
                 ) -> Optional[Tuple[Row, List[Row]]]:
    """Solve row·x = b.  Returns (particular solution, nullspace basis) or None."""
    e = Echelon(list(columns) + [RHS])
    for row, b in rows:
        r = dict(row)
        if b:
            r[RHS] = Fraction(b)
        e.add(r)
    if RHS in e.rows:
        return None
    part: Row = {}
    for c, r in e.rows.items():
        v = r.get(RHS)
        if v:
            part[c] = Fraction(v, r[c])
    null = []
    for f in columns:
        if f in e.rows:
            continue
        vec: Row = {f: Fraction(1)}
        for c, r in e.rows.items():
            v = r.get(f)
            if v:
                vec[c] = Fraction(-v, r[c])
        null.append(vec)
    return part, null
