"""Universal enveloping algebra of affine sl(2) at fixed level.

Generators are encoded as sortable triples ``(zone, block, mode)``:

* zone 0: the lowering algebra n_-  = {J3_n (n<0), J+_n (n<0), J-_n (n<=0)}
* zone 1: J3_0
* zone 2: the raising algebra n_+  = {J3_n (n>0), J+_n (n>=0), J-_n (n>0)}

and block 0/1/2 stands for J3/J+/J-.  Tuple order is therefore the PBW order:
lowering part first (J3 block, then J+, then J-, most negative mode first),
then J3_0, then the raising part.  A PBW word is a sorted tuple of generators.
The central element K is replaced by the level k throughout.
"""

from __future__ import annotations

import re
from collections import defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from . import linalg
from .series import Rational, rat_str
from .weights import Level, h_of_j

Gen = Tuple[int, int, int]
Word = Tuple[Gen, ...]
Vector = Dict[Word, Fraction]

KINDS = ("3", "+", "-")
_BLOCK = {"3": 0, "+": 1, "-": 2}
_CHARGE = (0, 1, -1)


def gen(kind: str, n: int) -> Gen:
    if kind == "3":
        zone = 0 if n < 0 else (1 if n == 0 else 2)
    elif kind == "+":
        zone = 0 if n < 0 else 2
    elif kind == "-":
        zone = 0 if n <= 0 else 2
    else:
        raise ValueError(f"unknown generator kind {kind!r}")
    return (zone, _BLOCK[kind], n)


def kind_of(g: Gen) -> str:
    return KINDS[g[1]]


def charge(g: Gen) -> int:
    return _CHARGE[g[1]]


def word_charge(w: Word) -> int:
    return sum(_CHARGE[g[1]] for g in w)


def word_grade(w: Word) -> int:
    return -sum(g[2] for g in w)


def is_lowering(g: Gen) -> bool:
    return g[0] == 0


def gen_str(g: Gen) -> str:
    return f"J{kind_of(g)}_{{{g[2]}}}"


def word_str(w: Word) -> str:
    if not w:
        return "1"
    parts = []
    i = 0
    while i < len(w):
        e = 1
        while i + e < len(w) and w[i + e] == w[i]:
            e += 1
        parts.append(gen_str(w[i]) + (f"^{e}" if e > 1 else ""))
        i += e
    return " ".join(parts)


_TOKEN = re.compile(r"J([+\-3])_\{?(-?\d+)\}?(?:\^(\d+))?")


def parse_word(text: str) -> List[Gen]:
    """Parse 'J-_{-1} J3_{-1}^2 J+_{0}' into a generator list (order kept)."""
    out: List[Gen] = []
    pos = 0
    text = text.strip()
    for m in _TOKEN.finditer(text):
        if text[pos:m.start()].strip():
            raise ValueError(f"cannot parse {text!r}")
        pos = m.end()
        out.extend([gen(m.group(1), int(m.group(2)))] * int(m.group(3) or 1))
    if text[pos:].strip():
        raise ValueError(f"cannot parse {text!r}")
    return out


def dagger_gen(g: Gen) -> Gen:
    k = kind_of(g)
    return gen({"+": "-", "-": "+", "3": "3"}[k], -g[2])


def commutator(a: Gen, b: Gen, k: Fraction) -> Tuple[Tuple[Tuple[Gen, Fraction], ...], Fraction]:
    """[a, b] as (generator terms, scalar)."""
    ka, na = kind_of(a), a[2]
    kb, nb = kind_of(b), b[2]
    zero = Fraction(0)
    if ka == "3" and kb == "3":
        return (), (Fraction(na) * k / 2 if na + nb == 0 else zero)
    if ka == "3":
        return ((gen(kb, na + nb), Fraction(_CHARGE[b[1]])),), zero
    if kb == "3":
        return ((gen(ka, na + nb), Fraction(-_CHARGE[a[1]])),), zero
    if ka == kb:
        return (), zero
    if ka == "+":  # [J+_a, J-_b] = 2 J3_{a+b} + a k delta
        return ((gen("3", na + nb), Fraction(2)),), (na * k if na + nb == 0 else zero)
    return ((gen("3", na + nb), Fraction(-2)),), (-nb * k if na + nb == 0 else zero)


# ---------------------------------------------------------------------------
# normal ordering in U(g)
# ---------------------------------------------------------------------------


def _accumulate(acc, items, c):
    for w, d in items:
        acc[w] += c * d


def _pack(acc) -> Tuple[Tuple[Word, Fraction], ...]:
    return tuple((w, c) for w, c in acc.items() if c)


@lru_cache(maxsize=None)
def _rmul(word: Word, g: Gen, k: Fraction):
    """Normal form of word·g."""
    if not word or word[-1] <= g:
        return ((word + (g,), Fraction(1)),)
    a, w = word[-1], word[:-1]
    acc = defaultdict(Fraction)
    for u, c in _rmul(w, g, k):
        _accumulate(acc, _rmul(u, a, k), c)
    gens, scal = commutator(a, g, k)
    for g2, c in gens:
        _accumulate(acc, _rmul(w, g2, k), c)
    if scal:
        acc[w] += scal
    return _pack(acc)


@dataclass
class UEAElement:
    """Normal-ordered element of U(g) with K = k."""

    terms: Dict[Word, Fraction]
    k: Fraction

    @classmethod
    def from_products(cls, products: Iterable[Tuple[Rational, Sequence[Gen]]], k: Rational) -> "UEAElement":
        k = Fraction(k)
        acc: Dict[Word, Fraction] = defaultdict(Fraction)
        for coeff, gens in products:
            cur = {(): Fraction(coeff)}
            for g in gens:
                nxt = defaultdict(Fraction)
                for w, c in cur.items():
                    _accumulate(nxt, _rmul(w, g, k), c)
                cur = nxt
            for w, c in cur.items():
                acc[w] += c
        return cls({w: c for w, c in acc.items() if c}, k)

    @classmethod
    def parse(cls, text: str, k: Rational) -> "UEAElement":
        """Parse 'c1 * word1 + c2 * word2 ...' where words use J±3_{n} tokens."""
        prods = []
        for part in re.split(r"\s*;\s*", text.strip()):
            if not part:
                continue
            if "*" in part:
                c, w = part.split("*", 1)
                prods.append((Fraction(c.strip()), parse_word(w)))
            else:
                prods.append((Fraction(1), parse_word(part)))
        return cls.from_products(prods, k)

    def __add__(self, other: "UEAElement") -> "UEAElement":
        acc = defaultdict(Fraction, self.terms)
        for w, c in other.terms.items():
            acc[w] += c
        return UEAElement({w: c for w, c in acc.items() if c}, self.k)

    def scale(self, c: Rational) -> "UEAElement":
        c = Fraction(c)
        return UEAElement({w: v * c for w, v in self.terms.items() if v * c}, self.k)

    def __sub__(self, other: "UEAElement") -> "UEAElement":
        return self + other.scale(-1)

    def __mul__(self, other: "UEAElement") -> "UEAElement":
        acc: Dict[Word, Fraction] = defaultdict(Fraction)
        for w2, c2 in other.terms.items():
            cur = {w: c * c2 for w, c in self.terms.items()}
            for g in w2:
                nxt = defaultdict(Fraction)
                for w, c in cur.items():
                    _accumulate(nxt, _rmul(w, g, self.k), c)
                cur = nxt
            for w, c in cur.items():
                acc[w] += c
        return UEAElement({w: c for w, c in acc.items() if c}, self.k)

    def dagger(self) -> "UEAElement":
        prods = [(c, [dagger_gen(g) for g in reversed(w)]) for w, c in self.terms.items()]
        return UEAElement.from_products(prods, self.k)

    def is_zero(self) -> bool:
        return not self.terms

    def __eq__(self, other) -> bool:
        return isinstance(other, UEAElement) and self.k == other.k and self.terms == other.terms

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        return " + ".join(f"({rat_str(c)}) {word_str(w)}" for w, c in sorted(self.terms.items()))


def normal_order(products: Iterable[Tuple[Rational, Sequence[Gen]]], k: Rational) -> UEAElement:
    return UEAElement.from_products(products, k)


def normal_order_random(gens: Sequence[Gen], k: Rational, rng) -> UEAElement:
    """Normal form of a product computed by resolving random adjacent inversions.

    Independent of ``_rmul``: used to test confluence of the rewriting."""
    k = Fraction(k)
    todo = [(Fraction(1), tuple(gens))]
    acc: Dict[Word, Fraction] = defaultdict(Fraction)
    while todo:
        c, w = todo.pop()
        inv = [i for i in range(len(w) - 1) if w[i] > w[i + 1]]
        if not inv:
            acc[w] += c
            continue
        i = rng.choice(inv)
        a, b = w[i], w[i + 1]
        todo.append((c, w[:i] + (b, a) + w[i + 2:]))
        gens2, scal = commutator(a, b, k)
        for g2, d in gens2:
            todo.append((c * d, w[:i] + (g2,) + w[i + 2:]))
        if scal:
            todo.append((c * scal, w[:i] + w[i + 2:]))
    return UEAElement({w: v for w, v in acc.items() if v}, k)


# ---------------------------------------------------------------------------
# Verma modules
# ---------------------------------------------------------------------------


@lru_cache(maxsize=None)
def _act(g: Gen, word: Word, j: Fraction, k: Fraction):
    """g·(word|j>) expressed in the PBW basis of V_j."""
    zone = g[0]
    if zone == 1:
        c = j + word_charge(word)
        return ((word, c),) if c else ()
    if zone == 0 and (not word or g <= word[0]):
        return (((g,) + word, Fraction(1)),)
    if not word:
        return ()
    m0, rest = word[0], word[1:]
    acc = defaultdict(Fraction)
    for w, c in _act(g, rest, j, k):
        _accumulate(acc, _act(m0, w, j, k), c)
    gens, scal = commutator(g, m0, k)
    for g2, c in gens:
        _accumulate(acc, _act(g2, rest, j, k), c)
    if scal:
        acc[rest] += scal
    return _pack(acc)


def vec_add(a: Vector, b: Vector, c: Rational = 1) -> Vector:
    out = dict(a)
    for w, v in b.items():
        nv = out.get(w, 0) + c * v
        if nv:
            out[w] = nv
        else:
            out.pop(w, None)
    return out


def vec_scale(a: Vector, c: Rational) -> Vector:
    c = Fraction(c)
    return {w: v * c for w, v in a.items()} if c else {}


def vec_weight(a: Vector) -> Optional[Tuple[int, int]]:
    if not a:
        return None
    ws = {(word_charge(w), word_grade(w)) for w in a}
    if len(ws) != 1:
        raise ValueError("vector is not homogeneous")
    return ws.pop()


def vec_str(a: Vector) -> str:
    if not a:
        return "0"
    return " + ".join(f"({rat_str(c)}) {word_str(w)}" for w, c in sorted(a.items()))


@lru_cache(maxsize=None)
def weight_space_basis(Q: int, N: int) -> Tuple[Word, ...]:
    """All PBW monomials of charge Q and grade N (independent of j), sorted."""
    if N < 0:
        return ()
    gens: List[Gen] = []
    for n in range(1, N + 1):
        gens += [gen("3", -n), gen("+", -n), gen("-", -n)]
    gens.sort()
    out: List[Word] = []

    def rec(i: int, grade_left: int, cur: List[Gen]):
        if grade_left == 0:
            e = sum(_CHARGE[g[1]] for g in cur) - Q
            if e >= 0:
                out.append(tuple(sorted(cur + [gen("-", 0)] * e)))
            return
        for idx in range(i, len(gens)):
            g = gens[idx]
            if -g[2] <= grade_left:
                cur.append(g)
                rec(idx, grade_left + g[2], cur)
                cur.pop()

    rec(0, N, [])
    return tuple(sorted(out))


class Module:
    """A Verma module V_j modulo the submodule generated by given vectors.

    Each generator must be singular modulo the previous ones, so that the
    submodule it generates is U(n_-) applied to it."""

    def __init__(self, level: Level, j: Rational, relations: Sequence[Vector] = ()):
        self.level = level
        self.j = Fraction(j)
        self.k = Fraction(level.k)
        self.relations: List[Vector] = []
        self._spaces: Dict[Tuple[int, int], linalg.Echelon] = {}
        for rel in relations:
            self.add_relation(rel)

    def add_relation(self, vec: Vector) -> None:
        self.relations.append(dict(vec))
        self._spaces.clear()

    def apply(self, g: Gen, vec: Vector, reduce: bool = True) -> Vector:
        acc = defaultdict(Fraction)
        for w, c in vec.items():
            _accumulate(acc, _act(g, w, self.j, self.k), c)
        out = {w: c for w, c in acc.items() if c}
        return self.reduce(out) if reduce else out

    def apply_word(self, gens: Sequence[Gen], vec: Vector, reduce: bool = True) -> Vector:
        for g in reversed(gens):
            vec = self.apply(g, vec, reduce=False)
            if not vec:
                return {}
        return self.reduce(vec) if reduce else vec

    def apply_element(self, x: UEAElement, vec: Vector) -> Vector:
        acc: Vector = {}
        for w, c in x.terms.items():
            acc = vec_add(acc, self.apply_word(w, vec, reduce=False), c)
        return self.reduce(acc)

    def submodule_space(self, Q: int, N: int) -> linalg.Echelon:
        key = (Q, N)
        if key not in self._spaces:
            basis = weight_space_basis(Q, N)
            e = linalg.Echelon(basis)
            for rel in self.relations:
                wt = vec_weight(rel)
                if wt is None:
                    continue
                for m in weight_space_basis(Q - wt[0], N - wt[1]):
                    e.add(self.apply_word(m, rel, reduce=False))
            self._spaces[key] = e
        return self._spaces[key]

    def reduce(self, vec: Vector) -> Vector:
        if not vec or not self.relations:
            return vec
        Q, N = vec_weight(vec)
        return self.submodule_space(Q, N).reduce(vec)

    def basis(self, Q: int, N: int) -> List[Word]:
        """Monomials spanning the quotient weight space (non-pivot monomials)."""
        full = weight_space_basis(Q, N)
        if not self.relations:
            return list(full)
        piv = self.submodule_space(Q, N).rows
        return [w for w in full if w not in piv]

    def dim(self, Q: int, N: int) -> int:
        return len(self.basis(Q, N))

    def sugawara_words(self, grade: int) -> List[Tuple[Fraction, List[Gen]]]:
        """Terms of t·L_0 relevant on vectors of grade <= ``grade``."""
        one = Fraction(1)
        terms = [(one, [gen("3", 0), gen("3", 0)]), (one, [gen("3", 0)])]
        for m in range(0, grade + 1):
            terms.append((one, [gen("-", -m), gen("+", m)]))
        for m in range(1, grade + 1):
            terms.append((one, [gen("+", -m), gen("-", m)]))
            terms.append((Fraction(2), [gen("3", -m), gen("3", m)]))
        return terms

    def sugawara_l0(self, vec: Vector) -> Vector:
        if not vec:
            return {}
        _, N = vec_weight(vec)
        acc: Vector = {}
        for c, ws in self.sugawara_words(N):
            acc = vec_add(acc, self.apply_word(ws, vec, reduce=False), c)
        return self.reduce(vec_scale(acc, 1 / self.level.t))


def hw() -> Vector:
    """The highest-weight vector |j>."""
    return {(): Fraction(1)}


# ---------------------------------------------------------------------------
# singular vectors
# ---------------------------------------------------------------------------

J_MINUS_1 = gen("-", 1)
J_PLUS_0 = gen("+", 0)


def find_singular(level: Level, j: Rational, Q: int, N: int,
                  relations: Sequence[Vector] = (), module: Optional[Module] = None) -> List[Vector]:
    """Kernel of J-_1 and J+_0 on the (quotient) weight space at (Q, N)."""
    mod = module if module is not None else Module(level, j, relations)
    basis = mod.basis(Q, N)
    if not basis:
        return []
    rows: Dict[Tuple, Dict[Word, Fraction]] = defaultdict(dict)
    for b in basis:
        for tag, g in (("m", J_MINUS_1), ("p", J_PLUS_0)):
            img = mod.apply(g, {b: Fraction(1)})
            for w, c in img.items():
                rows[(tag, w)][b] = c
    null = linalg.nullspace(rows.values(), basis)
    return [{w: c for w, c in v.items() if c} for v in null]


def sfa_exponents(level: Level, j: Rational, jp: Rational) -> Tuple[Fraction, Fraction]:
    """Exponents (a, b) of the leading monomial (J-_0)^a (J+_{-1})^b of S_{j',j}."""
    dh = h_of_j(level, jp) - h_of_j(level, j)
    return dh - (Fraction(jp) - Fraction(j)), dh


def sfa_word(a: int, b: int) -> Word:
    return tuple(sorted([gen("-", 0)] * a + [gen("+", -1)] * b))


def normalize(vec: Vector, how: str = "pbw", level: Optional[Level] = None,
              j: Optional[Rational] = None, jp: Optional[Rational] = None) -> Vector:
    """Scale a vector: 'pbw' = unit coefficient on the PBW-largest monomial,
    'sfa' = unit coefficient on the leading monomial of S_{j',j}."""
    if not vec:
        return vec
    if how == "pbw":
        c = vec[max(vec)]
    elif how == "sfa":
        a, b = sfa_exponents(level, j, jp)
        if a.denominator != 1 or b.denominator != 1:
            raise ValueError("non-integer leading exponents")
        c = vec.get(sfa_word(int(a), int(b)), 0)
        if not c:
            raise ValueError("leading monomial absent")
    else:
        raise ValueError(how)
    return vec_scale(vec, 1 / c)


def singular_vector(level: Level, j: Rational, jp: Rational, module: Optional[Module] = None,
                    how: str = "sfa") -> Vector:
    """The (unique) singular vector of weight j' in V_j or a quotient of it."""
    j, jp = Fraction(j), Fraction(jp)
    Q = jp - j
    N = h_of_j(level, jp) - h_of_j(level, j)
    if Q.denominator != 1 or N.denominator != 1 or N < 0:
        raise ValueError(f"{jp} is not at an integral (charge, grade) of V_{j}")
    sol = find_singular(level, j, int(Q), int(N), module=module)
    if len(sol) != 1:
        raise ValueError(f"expected a unique singular vector, found {len(sol)}")
    vec = sol[0]
    if how == "sfa":
        try:
            full = find_singular(level, j, int(Q), int(N)) if module is not None and module.relations else [vec]
            if len(full) == 1:
                red = normalize(full[0], "sfa", level, j, jp)
                if module is not None:
                    red = module.reduce(red)
                if red:
                    return red
        except ValueError:
            pass
        how = "pbw"
    return normalize(vec, how)


def fuchs_astashkevich_leading(level: Level, j: Rational, jp: Rational) -> Dict[str, object]:
    from .weights import embedding_condition, in_sub_orbit
    if not in_sub_orbit(level, j, jp):
        raise ValueError(f"{jp} is not in the sub-orbit of {j}")
    a, b = sfa_exponents(level, j, jp)
    out: Dict[str, object] = {"J-_0": a, "J+_-1": b}
    if embedding_condition(level, j, jp) and a.denominator == 1 and b.denominator == 1:
        vec = singular_vector(level, j, jp, how="pbw")
        out["leading_coefficient_nonzero"] = bool(vec.get(sfa_word(int(a), int(b))))
    return out


def mff_vector(level: Level, r: int, s: int, variant: int = 0) -> Dict[str, object]:
    """MFF product for the singular vectors at (-r, rs) or (p-r, (p-r)(p'-s))."""
    t = level.t
    if variant == 0:
        exps = [r + (s - i) * t for i in range(2 * s + 1)]
        kinds = ["-" if i % 2 == 0 else "+" for i in range(len(exps))]
        target = (-r, r * s)
    else:
        m = level.pp - s
        exps = [level.p - r + (m - 1 - i) * t for i in range(2 * m - 1)]
        kinds = ["+" if i % 2 == 0 else "-" for i in range(len(exps))]
        target = (level.p - r, (level.p - r) * m)
    factors = [(kd, e) for kd, e in zip(kinds, exps)]
    explicit = all(e.denominator == 1 and e >= 0 for _, e in factors)
    out: Dict[str, object] = {"factors": factors, "target": target, "formal": not explicit}
    if explicit:
        gens: List[Gen] = []
        for kd, e in factors:
            gens += [gen(kd, 0 if kd == "-" else -1)] * int(e)
        el = UEAElement.from_products([(1, gens)], level.k)
        out["element"] = el
    return out


# ---------------------------------------------------------------------------
# displayed vectors and operator identities
# ---------------------------------------------------------------------------

# Singular vectors of V_{-2/3} at level (2,3), written as products acting on
# |j> in the order printed (rightmost factor acts first).
DISPLAYED_VECTORS: Dict[str, Dict[str, object]] = {
    "verma(-1,2)": {
        "level": (2, 3), "j": Fraction(-2, 3), "weight": (-1, 2), "quotient": [],
        "scale": Fraction(-4, 81),
        "text": "2 * J-_{-2}; 6 * J-_{-1} J3_{-1}; 3 * J-_{0} J3_{-2}; 9 * J-_{0} J3_{-1}^2;"
                " 9 * J-_{0}^2 J+_{-2};"
                " -9/2 * J-_{-1} J-_{0} J+_{-1}; -81/2 * J-_{0}^2 J3_{-1} J+_{-1};"
                " -81/4 * J-_{0}^3 J+_{-1} J+_{-1}",
    },
    "quotient(-1,2)": {
        "level": (2, 3), "j": Fraction(-2, 3), "weight": (-1, 2), "quotient": [Fraction(1, 3)],
        "scale": Fraction(-4, 81),
        "text": "2 * J-_{-2}; 6 * J-_{-1} J3_{-1}; 3 * J-_{0} J3_{-2}; 9 * J-_{0} J3_{-1}^2;"
                " 9 * J-_{0}^2 J+_{-2}",
    },
    "P": {
        "level": (2, 3), "j": Fraction(1, 3), "weight": (1, 4), "quotient": [],
        "scale": Fraction(-4, 81),
        "text": "420 * J+_{-4}; -1260 * J3_{-1} J+_{-3}; -630 * J3_{-2} J+_{-2};"
                " -420 * J3_{-3} J+_{-1}; -700 * J-_{-2} J+_{-1}^2;"
                " 1890 * J3_{-2} J3_{-1} J+_{-1}; -1260 * J-_{-1} J+_{-2} J+_{-1};"
                " 1680 * J-_{-1} J3_{-1} J+_{-1}^2; -1170 * J-_{0} J+_{-3} J+_{-1};"
                " 705 * J-_{0} J3_{-2} J+_{-1}^2; 1890 * J3_{-1}^2 J+_{-2};"
                " -540 * J-_{0} J+_{-2}^2; -1890 * J3_{-1}^3 J+_{-1};"
                " 2970 * J-_{0} J3_{-1} J+_{-2} J+_{-1}; -1935 * J-_{0} J3_{-1}^2 J+_{-1}^2;"
                " 495 * J-_{0}^2 J+_{-2} J+_{-1}^2; 360 * J-_{-1} J-_{0} J+_{-1}^3;"
                " -405 * J-_{0}^2 J3_{-1} J+_{-1}^3; -81/4 * J-_{0}^3 J+_{-1}^4",
    },
}

# Identities in U(n_+): name -> (lhs, rhs), both in the product syntax of
# UEAElement.parse.
OPERATOR_IDENTITIES: Dict[str, Tuple[str, str]] = {
    "reorder": ("J+_{0}^3 J-_{1}",
           "J-_{1} J+_{0}^3; 6 * J3_{1} J+_{0}^2; -6 * J+_{1} J+_{0}"),
    "J1+": ("J+_{1}",
            "-1/2 * J+_{0}^2 J-_{1}; J3_{1} J+_{0}; 1/2 * J+_{0} J-_{1} J+_{0}"),
    "J2+": ("J+_{2}",
            "-1/2 * J3_{1} J+_{0} J+_{0} J-_{1}; -1/2 * J+_{1} J+_{0} J-_{1};"
            " J3_{1}^2 J+_{0}; 1/2 * J3_{1} J+_{0} J-_{1} J+_{0}; 1/2 * J+_{1} J-_{1} J+_{0}"),
    "J2-": ("J-_{2}",
            "1/2 * J-_{1} J+_{0} J-_{1}; -1 * J3_{1} J-_{1}; -1/2 * J-_{1}^2 J+_{0}"),
    "J13": ("J3_{1}",
            "1/2 * J+_{0} J-_{1}; -1/2 * J-_{1} J+_{0}"),
    "J23": ("J3_{2}",
            "1/4 * J+_{0} J-_{1} J+_{0} J-_{1}; -1/2 * J+_{0} J3_{1} J-_{1};"
            " -1/4 * J+_{0} J-_{1}^2 J+_{0}; -1/2 * J-_{2} J+_{0}"),
}


def check_identity(name: str, k: Rational = 0) -> bool:
    lhs, rhs = OPERATOR_IDENTITIES[name]
    return (UEAElement.parse(lhs, k) - UEAElement.parse(rhs, k)).is_zero()


def proportionality(a: Vector, b: Vector) -> Optional[Fraction]:
    """The scalar c with a = c·b, or None."""
    if not a or not b or set(a) != set(b):
        return None
    w0 = next(iter(b))
    c = a[w0] / b[w0]
    return c if all(a[w] == c * b[w] for w in b) else None


def displayed_module(name: str) -> Module:
    d = DISPLAYED_VECTORS[name]
    lev = Level(*d["level"])
    mod = Module(lev, d["j"])
    for jq in d["quotient"]:
        mod.add_relation(singular_vector(lev, d["j"], jq, module=mod, how="pbw"))
    return mod


def displayed_vector(name: str) -> Vector:
    """A displayed vector acting on |j>, expanded in the PBW basis of the (quotient) module."""
    d = DISPLAYED_VECTORS[name]
    mod = displayed_module(name)
    el = UEAElement.parse(d["text"], mod.k).scale(d["scale"])
    return mod.apply_element(el, hw())


def compare_displayed(name: str) -> Dict[str, object]:
    """Match a displayed vector against the kernel search at its weight.

    ``ratio`` is the scalar with displayed = ratio·kernel (kernel normalized
    to a unit PBW-largest coefficient)."""
    d = DISPLAYED_VECTORS[name]
    mod = displayed_module(name)
    Q, N = d["weight"]
    ker = find_singular(mod.level, mod.j, Q, N, module=mod)
    vec = displayed_vector(name)
    ratio = proportionality(vec, normalize(ker[0])) if len(ker) == 1 else None
    singular = not mod.apply(J_MINUS_1, vec) and not mod.apply(J_PLUS_0, vec)
    return {"name": name, "kernel_dim": len(ker), "singular": singular,
            "ratio": ratio, "match": len(ker) == 1 and ratio is not None}


# ---------------------------------------------------------------------------
# staggered modules
# ---------------------------------------------------------------------------


@dataclass
class StaggeredExample:
    """Input data of a staggered module computation.

    ``j`` is the top weight of the left module M^L = V_j / <relations>, where
    the relations are the singular vectors of the weights in ``quotient``
    (taken in order, each in the quotient by the previous ones).  ``j_S`` is
    the weight of the singular vector S|j> in M^L (j_S = j for triangular
    modules, S = 1) and ``j_P`` the weight of the singular vector P of
    V_{j_S} that is set to zero in the right module."""

    name: str
    level: Level
    j: Fraction
    quotient: List[Fraction]
    j_S: Fraction
    j_P: Fraction
    description: str = ""

    @classmethod
    def from_dict(cls, d: dict) -> "StaggeredExample":
        return cls(
            name=d.get("name", "custom"),
            level=Level(int(d["p"]), int(d["pp"])),
            j=Fraction(d["j"]),
            quotient=[Fraction(x) for x in d.get("quotient", [])],
            j_S=Fraction(d["j_S"]),
            j_P=Fraction(d["j_P"]),
            description=d.get("description", ""),
        )


EXAMPLES = {
    "I": StaggeredExample(
        "I", Level(2, 3), Fraction(-2, 3), [Fraction(1, 3)], Fraction(-5, 3), Fraction(4, 3),
        "S^{1,0;-}_{2,2}: 0 -> Q_{-1,-1} -> S -> Q_{-3,-1} -> 0 at k=-4/3"),
    "II": StaggeredExample(
        "II", Level(2, 3), Fraction(-2, 3), [Fraction(-5, 3)], Fraction(1, 3), Fraction(4, 3),
        "S^{0,1;+}_{1,3}: 0 -> Q_{1,2} -> S -> Q_{-1,-4} -> 0 at k=-4/3"),
    "conj3": StaggeredExample(
        "conj3", Level(3, 2), Fraction(-5, 4), [Fraction(7, 4)], Fraction(-5, 4), Fraction(-17, 4),
        "S^{0,1;-}_{3,2} (triangular): 0 -> Q_{-3,-1} -> S -> Q_{3,3} -> 0 at k=-1/2"),
}


class _LogEvaluator:
    """Action of U(g) on the span of U(n_-)|R> and M^L for fixed data.

    States are pairs (rpart, lvec): rpart maps lowering words w to the
    coefficient of w|R>, lvec is a vector of M^L."""

    def __init__(self, mod: Module, S: Vector, jR: Fraction, eta: Fraction, D: Vector, E: Vector):
        self.mod, self.S, self.jR, self.eta = mod, S, jR, Fraction(eta)
        self.D, self.E = D, E
        self.k = mod.k
        self._pos: Dict[Gen, Vector] = {}
        self._memo: Dict[Tuple[Gen, Word], Tuple[Dict[Word, Fraction], Vector]] = {}

    def pos_on_R(self, g: Gen) -> Vector:
        if g in self._pos:
            return self._pos[g]
        kd, n = kind_of(g), g[2]
        ap = self.mod.apply
        if g == J_MINUS_1:
            out = self.D
        elif g == J_PLUS_0:
            out = self.E
        elif kd == "3":
            # J3_n = 1/2 [J+_{n-1}, J-_1]
            gp = gen("+", n - 1)
            out = vec_scale(vec_add(ap(gp, self.D), ap(J_MINUS_1, self.pos_on_R(gp)), -1), Fraction(1, 2))
        elif kd == "+":
            # J+_n = [J3_n, J+_0]
            g3 = gen("3", n)
            out = vec_add(ap(g3, self.E), ap(J_PLUS_0, self.pos_on_R(g3)), -1)
        else:
            # J-_n = -[J3_{n-1}, J-_1]
            g3 = gen("3", n - 1)
            out = vec_add(ap(J_MINUS_1, self.pos_on_R(g3)), ap(g3, self.D), -1)
        self._pos[g] = out
        return out

    def _act_R(self, g: Gen, w: Word):
        key = (g, w)
        if key in self._memo:
            return self._memo[key]
        zone = g[0]
        if zone == 0:
            res = (dict(_act(g, w, Fraction(0), self.k)), {})
        elif zone == 1:
            c = self.jR + word_charge(w)
            rp = {w: c} if c else {}
            lv = vec_scale(self.mod.apply_word(w, self.S), self.eta) if self.eta else {}
            res = (rp, lv)
        elif not w:
            res = ({}, self.pos_on_R(g))
        else:
            m0, rest = w[0], w[1:]
            rp, lv = self._act_R(g, rest)
            rp_acc: Dict[Word, Fraction] = defaultdict(Fraction)
            lv_acc = self.mod.apply(m0, lv)
            for u, c in rp.items():
                r2, l2 = self._act_R(m0, u)
                _accumulate(rp_acc, r2.items(), c)
                lv_acc = vec_add(lv_acc, l2, c)
            gens, scal = commutator(g, m0, self.k)
            for g2, c in gens:
                r2, l2 = self._act_R(g2, rest)
                _accumulate(rp_acc, r2.items(), c)
                lv_acc = vec_add(lv_acc, l2, c)
            if scal:
                rp_acc[rest] += scal
            res = ({u: c for u, c in rp_acc.items() if c}, lv_acc)
        self._memo[key] = res
        return res

    def apply(self, g: Gen, state):
        rp, lv = state
        out_rp: Dict[Word, Fraction] = defaultdict(Fraction)
        out_lv = self.mod.apply(g, lv) if lv else {}
        for w, c in rp.items():
            r2, l2 = self._act_R(g, w)
            _accumulate(out_rp, r2.items(), c)
            out_lv = vec_add(out_lv, l2, c)
        return ({u: c for u, c in out_rp.items() if c}, out_lv)

    def apply_word(self, gens: Sequence[Gen], state):
        for g in reversed(gens):
            state = self.apply(g, state)
        return state


R_STATE = ({(): Fraction(1)}, {})


@dataclass
class StaggeredResult:
    example: StaggeredExample
    consistent: bool
    eta: Optional[Fraction] = None
    mu: Optional[Fraction] = None
    beta: Optional[Fraction] = None
    beta_defined: bool = True
    normalization: str = ""
    D: Vector = field(default_factory=dict)
    E: Vector = field(default_factory=dict)
    D_basis: List[Word] = field(default_factory=list)
    E_basis: List[Word] = field(default_factory=list)
    free_dims: int = 0
    eta_unique: bool = True
    beta_unique: bool = True
    S: Vector = field(default_factory=dict)
    P: Vector = field(default_factory=dict)
    l0_check: bool = True
    message: str = ""

    def to_json(self) -> dict:
        def r(x):
            return None if x is None else rat_str(x)
        return {
            "example": self.example.name,
            "consistent": self.consistent,
            "eta": r(self.eta),
            "mu": r(self.mu),
            "beta": r(self.beta) if self.beta_defined else "undefined (S = 1)",
            "normalization": self.normalization,
            "J-_1 R": vec_str(self.D),
            "J+_0 R": vec_str(self.E),
            "S": vec_str(self.S),
            "free_parameters": self.free_dims,
            "eta_unique": self.eta_unique,
            "beta_unique": self.beta_unique,
            "l0_identity": self.l0_check,
            "message": self.message,
        }


def _positive_gens(N: int) -> List[Gen]:
    out = [gen("+", n) for n in range(0, N + 1)]
    out += [gen("3", n) for n in range(1, N + 1)]
    out += [gen("-", n) for n in range(1, N + 1)]
    return out


def staggered_solve(example: StaggeredExample) -> StaggeredResult:
    """Solve for (eta, mu, J-_1 R, J+_0 R, L) and extract beta.

    Unknowns enter linearly; each unknown is probed with a unit value and the
    resulting constraint vectors are assembled into one exact linear system."""
    lev = example.level
    k = lev.k
    j = Fraction(example.j)
    mod = Module(lev, j)
    for jq in example.quotient:
        mod.add_relation(singular_vector(lev, j, jq, module=mod, how="pbw"))

    QS = example.j_S - j
    NS = h_of_j(lev, example.j_S) - h_of_j(lev, j)
    if QS.denominator != 1 or NS.denominator != 1:
        raise ValueError("S is not at an integral weight")
    QS, NS = int(QS), int(NS)
    if (QS, NS) == (0, 0):
        S = {(): Fraction(1)}
        beta_defined = False
        norm = "S = 1 (triangular)"
    else:
        S = singular_vector(lev, j, example.j_S, module=mod, how="sfa")
        beta_defined = True
        norm = "S, P normalized to unit coefficient on (J-_0)^a (J+_-1)^b, a = dh - dj, b = dh"
    if not S:
        raise ValueError("S vanishes in M^L")
    jR = example.j_S
    P = singular_vector(lev, jR, example.j_P, how="sfa")
    QP = int(example.j_P - jR)
    NP = int(h_of_j(lev, example.j_P) - h_of_j(lev, jR))

    D_basis = mod.basis(QS - 1, NS - 1)
    E_basis = mod.basis(QS + 1, NS)
    L_basis = mod.basis(QS + QP, NS + NP)

    # unknown labels
    U_ETA, U_MU = ("eta",), ("mu",)
    probes = [(U_ETA, Fraction(1), {}, {})]
    probes += [(("D", w), Fraction(0), {w: Fraction(1)}, {}) for w in D_basis]
    probes += [(("E", w), Fraction(0), {}, {w: Fraction(1)}) for w in E_basis]
    columns = [U_ETA, U_MU] + [p[0] for p in probes[1:]] + [("L", w) for w in L_basis]

    eqs: Dict[Tuple, Dict[Tuple, Fraction]] = defaultdict(dict)
    beta_form: Dict[Tuple, Fraction] = {}
    off_forms: Dict[Tuple, Dict[Tuple, Fraction]] = defaultdict(dict)
    Sdag = UEAElement({w: c for w, c in S.items()}, k).dagger() if beta_defined else None
    pos = _positive_gens(NS)
    hR = h_of_j(lev, jR)
    t = lev.t

    def put(prefix, vec, col, sign=1):
        for w, c in vec.items():
            eqs[(prefix, w)][col] = eqs[(prefix, w)].get(col, 0) + sign * c

    for col, eta, D, E in probes:
        ev = _LogEvaluator(mod, S, jR, eta, D, E)
        # 1) n_+ relations on R: X(YR) - Y(XR) - [X,Y]R = 0
        for a_i, X in enumerate(pos):
            for Y in pos[a_i + 1:]:
                xy = ev.apply(X, ev.apply(Y, R_STATE))
                yx = ev.apply(Y, ev.apply(X, R_STATE))
                diff = vec_add(xy[1], yx[1], -1)
                gens, scal = commutator(X, Y, k)
                for g2, c in gens:
                    diff = vec_add(diff, ev.apply(g2, R_STATE)[1], -c)
                put(("rel", X, Y), diff, col)
        # 2) Sugawara: (t L_0 - t h_R) R = t mu S
        acc_l: Vector = {}
        acc_off: Vector = {}
        for c, ws in mod.sugawara_words(NS):
            rp, lv = ev.apply_word(ws, R_STATE)
            acc_l = vec_add(acc_l, lv, c)
            if len(ws) == 2 and ws[0] == gen("3", 0) and ws[1] == gen("3", 0):
                continue
            if len(ws) == 1:
                continue
            acc_off = vec_add(acc_off, lv, c)
        put(("L0",), acc_l, col)
        for w, c in acc_off.items():
            off_forms[w][col] = off_forms[w].get(col, 0) + c
        # 3) the log singular vector P R + L
        for tag, g in (("m", J_MINUS_1), ("p", J_PLUS_0)):
            rp, lv = ev.apply(g, (dict(P), {}))
            if rp:
                raise ValueError("P is not singular in V_{j_R}")
            put(("PRL", tag), lv, col)
        # 4) beta
        if beta_defined:
            rp, lv = ev.apply_word([], R_STATE)
            acc_b: Vector = {}
            for w, c in Sdag.terms.items():
                rp2, lv2 = ev.apply_word(w, R_STATE)
                if rp2:
                    raise ValueError("S^dagger R has an R-component")
                acc_b = vec_add(acc_b, lv2, c)
            extra = [w for w in acc_b if w]
            if extra:
                raise ValueError("S^dagger R is not proportional to the top vector")
            beta_form[col] = acc_b.get((), Fraction(0))
    # mu enters the Sugawara equation as -t mu S
    put(("L0",), vec_scale(S, -t), U_MU)
    # L enters the log singular vector equations
    for w in L_basis:
        for tag, g in (("m", J_MINUS_1), ("p", J_PLUS_0)):
            put(("PRL", tag), mod.apply(g, {w: Fraction(1)}), ("L", w))

    rows = [(r, Fraction(0)) for r in eqs.values() if any(r.values())]

    def attempt(fix):
        return linalg.solve_affine(rows + [({fix: Fraction(1)}, Fraction(1))], columns)

    sol = attempt(U_MU)
    normalization = "mu = 1"
    if sol is None:
        sol = attempt(U_ETA)
        normalization = "eta = 1"
    res = StaggeredResult(example, sol is not None, beta_defined=beta_defined, S=S, P=P,
                          D_basis=D_basis, E_basis=E_basis)
    if sol is None:
        res.message = "no staggered module with this data"
        return res
    part, null = sol
    res.normalization = f"{norm}; {normalization}"
    res.eta = part.get(U_ETA, Fraction(0))
    res.mu = part.get(U_MU, Fraction(0))
    res.eta_unique = all(not v.get(U_ETA) for v in null)
    res.free_dims = len(null)
    res.D = {w: part[("D", w)] for w in D_basis if part.get(("D", w))}
    res.E = {w: part[("E", w)] for w in E_basis if part.get(("E", w))}
    if beta_defined:
        def beta_of(x):
            return sum((beta_form.get(c, 0) * x.get(c, 0) for c in beta_form), Fraction(0))
        res.beta = beta_of(part)
        res.beta_unique = all(beta_of(v) == 0 for v in null)
    # L0 consistency on R: (L0 - J3(J3+1)/t) R = (mu - eta (2 jR + 1)/t) S
    lhs: Vector = {}
    for w, form in off_forms.items():
        v = sum((c * part.get(col, 0) for col, c in form.items()), Fraction(0)) / t
        if v:
            lhs[w] = v
    rhs = vec_scale(S, res.mu - res.eta * (2 * jR + 1) / t)
    res.l0_check = mod.reduce(vec_add(lhs, rhs, -1)) == {}
    if res.eta == 0 and res.mu == 0:
        res.consistent = False
        res.message = "only eta = mu = 0"
    return res
