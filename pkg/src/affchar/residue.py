"""The residue map φ = -η²(q) Res_{z=1} and the functor Φ on Loewy diagrams.

On a closed form N(q,z)/η(q,z), lim_{z→1}(1-z)/η(q,z) = 1/η³(q) gives
φ = N(q,1)/η(q).  Φ deletes quasi-integrable nodes (j ∈ ½N₀) and reads the
remaining labels as Virasoro labels at central charge c̄(t).

Virasoro irreducible characters used on the Φ side are built independently
from the Kac determinant: the Verma embedding poset is generated from the
weights h̄_{r,s} alone and the character is the Möbius sum over it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from fractions import Fraction
from functools import lru_cache
from typing import Dict, List, Optional, Sequence, Tuple

from .characters import (CFTerm, ClosedFormCharacter, _cap, canonical_label, irr_branch,
                         irr_closed, kac_closed, kac_decompose, minimal_model_closed,
                         staggered_closed, virasoro_kac_char)
from .series import BiSeries, QSeries, Rational, mul
from .structure import (BLACK, GREY, WHITE, Label, LoewyDiagram, Node, StaggeredDescriptor,
                        _with_depth_shades, kac_loewy, render_text, staggered_loewy)
from .theta import ThetaSpec, eta_affine, eta_inverse, theta_specialized, varphi
from .weights import Level, check_label, h_of_j, j_rs, quasi_integrable

# ---------------------------------------------------------------------------
# φ on characters
# ---------------------------------------------------------------------------


def phi_closed(cf: ClosedFormCharacter) -> ClosedFormCharacter:
    """φ on a closed form: numerator at z = 1 over η(q)."""
    if cf.denominator == "eta_q":
        return cf
    if cf.denominator != "eta_qz":
        raise ValueError(f"φ is undefined on denominator {cf.denominator!r}")
    terms = tuple(CFTerm(t.coeff, t.q_exp, Fraction(0),
                         None if t.theta is None else t.theta,
                         tuple((c, a, Fraction(0)) for c, a, _ in t.extra))
                  for t in cf.terms)
    # thetas keep their spec; numerator_z1 specialises them at z = 1
    return ClosedFormCharacter(terms, "eta_q", f"phi[{cf.name}]")


def phi_char(cf: ClosedFormCharacter, q_max: Optional[int] = None,
             q_top: Optional[Rational] = None) -> QSeries:
    """φ(cf) as a q-series.  ``q_max`` counts grades above the lowest
    exponent bound of the image, ``q_top`` is absolute."""
    img = phi_closed(cf)
    if q_top is None:
        q_top = img.lowest() + (12 if q_max is None else q_max)
    if not img.terms:
        return QSeries.zero(Fraction(q_top), 0)
    return img.expand_q(q_top)


def phi_series_check(cf: ClosedFormCharacter, q_top: Rational, z_window=(-12, 12)) -> bool:
    """Second route to φ: expand the character in z, multiply back by
    η(q,z) on the window, specialise at z = 1 and divide by η(q).

    Only meaningful when the window contains the full numerator support up to
    q_top, which is checked."""
    q_top = Fraction(q_top)
    num = cf.numerator(q_top + 1)
    zs = num.z_support()
    if zs[0] is None:
        return phi_char(cf, q_top=q_top).is_zero()
    zlo, zhi = num.z_shift + zs[0], num.z_shift + zs[1]
    if zlo < z_window[0] or zhi > z_window[1]:
        raise ValueError("window does not contain the numerator support")
    e = eta_affine(q_top + 2)
    ez = e.z_support()
    elo, ehi = e.z_shift + ez[0], e.z_shift + ez[1]
    nlow = num.q_shift + num.q_low()
    ch = cf.expand(q_top + 1 - Fraction(1, 8), (zlo - ehi - 1, zhi - elo + 1))
    back = mul(ch, e.restrict(q_top + 1 - nlow)).restrict(q_top, zlo, zhi)
    lhs = QSeries.from_terms([(qe, c) for qe, _, c in back.terms()], q_top,
                             shift=back.q_shift)
    N1 = cf.numerator_z1(q_top + 1)
    rhs = _cap(N1, q_top)
    if not lhs.agrees(rhs):
        return False
    direct = phi_char(cf, q_top=q_top - Fraction(1, 24) - 1)
    via = _cap(lhs * eta_inverse(q_top - nlow + 1), q_top - Fraction(1, 24) - 1)
    return direct.agrees(via)


# ---------------------------------------------------------------------------
# the table of images of irreducible characters
# ---------------------------------------------------------------------------


def _pair_q(level: Level, n1: int, nu1: int, n2: int, nu2: int, name: str) -> ClosedFormCharacter:
    m = level.p * level.pp
    return ClosedFormCharacter((CFTerm(Fraction(1), Fraction(0), Fraction(0), ThetaSpec(n1, m, nu1)),
                                CFTerm(Fraction(-1), Fraction(0), Fraction(0), ThetaSpec(n2, m, nu2))),
                               "eta_q", name)


def _mono_q(level: Level, X: int, a: int, name: str) -> ClosedFormCharacter:
    p, pp = level.p, level.pp
    ex = ((Fraction(1), Fraction(0), Fraction(0)), (Fraction(-1), Fraction(a), Fraction(0)))
    return ClosedFormCharacter((CFTerm(Fraction(1), Fraction(p * X * X, 4 * pp), Fraction(0), None, ex),),
                               "eta_q", name)


def phi_irr_closed(level: Level, r: int, s: int) -> Tuple[str, ClosedFormCharacter]:
    """The image of ch_{r,s} as listed family by family."""
    p, pp = level.p, level.pp
    br, a = irr_branch(level, r, s)
    ell, s0 = a["ell"], a["s0"]
    name = f"phi[ch[{r},{s}]]:{br}"
    if br == "upper":
        r0 = a["r0"]
        return br, _pair_q(level, -r0 * pp + p * s0 - ell * p * pp, ell,
                           -r0 * pp - p * s0 - ell * p * pp, ell, name)
    if br == "upper_edge":
        return br, _mono_q(level, (ell + 1) * pp - s0, (ell + 1) * p * s0, name)
    if br == "lower":
        r0 = a["r0"]
        return br, _pair_q(level, r0 * pp - p * s0 - (ell + 1) * p * pp, ell + 1,
                           -r0 * pp - p * s0 - (ell + 1) * p * pp, ell + 1, name)
    return br, _mono_q(level, ell * pp + s0, (ell + 1) * p * (pp - s0), name)


def phi_irr_table(level: Level, r: int, s: int, q_max: int = 12,
                  q_top: Optional[Rational] = None) -> QSeries:
    br, cf = phi_irr_closed(level, r, s)
    if q_top is None:
        q_top = cf.lowest() + q_max
    return cf.expand_q(q_top)


def virasoro_irr_label(level: Level, r: int, s: int) -> Optional[Label]:
    """Virasoro label of φ[ch_{r,s}] after the relabelling; None for 0."""
    p, pp = level.p, level.pp
    br, a = irr_branch(level, r, s)
    ell, s0 = a["ell"], a["s0"]
    if br == "upper":
        return (a["r0"] + ell * p, s0) if s0 else None
    if br == "upper_edge":
        return ((ell + 1) * p, s0) if s0 else None
    if br == "lower":
        return (p - a["r0"] + (ell + 1) * p, pp - s0)
    return ((ell + 1) * p, pp - s0)


# ---------------------------------------------------------------------------
# Virasoro data
# ---------------------------------------------------------------------------


def hbar_rs(t: Fraction, r: int, s: int) -> Fraction:
    return ((r - s * t) ** 2 - (1 - t) ** 2) / (4 * t)


def hbar_of_j(t: Fraction, j: Rational) -> Fraction:
    return ((2 * Fraction(j) + 1) ** 2 - (1 - t) ** 2) / (4 * t)


def cbar(t: Fraction) -> Fraction:
    return 1 - 6 * (1 - t) ** 2 / t


def _singular_children(t: Fraction, h: Fraction, grade_limit: int) -> List[Fraction]:
    """Weights h + rs of singular vectors in the Virasoro Verma module V_h,
    one for every r, s >= 1 with h̄_{r,s} = h and rs <= grade_limit."""
    x2 = 4 * t * h + (1 - t) ** 2  # (r - st)²
    num, den = x2.numerator, x2.denominator
    rn, rd = math.isqrt(num), math.isqrt(den)
    if rn * rn != num or rd * rd != den:
        return []
    x = Fraction(rn, rd)
    out = set()
    for s in range(1, grade_limit + 1):
        for sg in (1, -1):
            r = sg * x + s * t
            if r.denominator == 1 and r >= 1 and r * s <= grade_limit:
                out.add(h + r * s)
    return sorted(out)


@lru_cache(maxsize=4096)
def virasoro_embedding_poset(t: Fraction, h: Fraction, grade_limit: int
                             ) -> Tuple[Tuple[Fraction, ...], Dict[Fraction, Tuple[Fraction, ...]]]:
    """Weights of all Verma submodules of V_h within grade_limit, with the
    direct embedding relation."""
    top = h + grade_limit
    nodes = [h]
    children: Dict[Fraction, Tuple[Fraction, ...]] = {}
    queue = [h]
    while queue:
        x = queue.pop()
        if x in children:
            continue
        ch = tuple(c for c in _singular_children(t, x, math.floor(top - x)) if c <= top)
        children[x] = ch
        for c in ch:
            if c not in children:
                nodes.append(c)
                queue.append(c)
    return tuple(sorted(set(nodes))), children


def virasoro_irr_mobius(t: Fraction, h: Fraction, grade_limit: int) -> Dict[Fraction, int]:
    """Möbius coefficients μ(h, x): ch L_h = Σ_x μ(h,x) ch V_x."""
    nodes, children = virasoro_embedding_poset(t, h, grade_limit)
    below: Dict[Fraction, set] = {}
    for x in sorted(nodes, reverse=True):
        s = set()
        for c in children[x]:
            s.add(c)
            s |= below[c]
        below[x] = s
    mu: Dict[Fraction, int] = {h: 1}
    for x in nodes:
        if x == h:
            continue
        mu[x] = -sum(mu[y] for y in nodes if y != x and y in mu and x in below[y]
                     and (y == h or y in below[h]))
    return {x: m for x, m in mu.items() if m}


def virasoro_irr_char(t: Rational, h: Rational, q_top: Rational) -> QSeries:
    """Character of the irreducible Virasoro module of weight h at c̄(t)."""
    t, h, q_top = Fraction(t), Fraction(h), Fraction(q_top)
    lead = h - cbar(t) / 24
    G = math.floor(q_top - lead) + 1
    if G < 0:
        return QSeries.zero(q_top, lead)
    mu = virasoro_irr_mobius(t, h, G)
    acc = {}
    for x, m in mu.items():
        acc[x - h] = acc.get(x - h, 0) + m
    num = QSeries.from_terms(acc, G, shift=0)
    return _cap((num * varphi(G).inverse()).mul_monomial(lead), q_top)


def virasoro_verma_char(t: Rational, h: Rational, q_top: Rational) -> QSeries:
    t, h = Fraction(t), Fraction(h)
    lead = h - cbar(t) / 24
    G = max(0, math.floor(Fraction(q_top) - lead)) + 1
    return _cap(varphi(G).inverse().mul_monomial(lead), q_top)


# ---------------------------------------------------------------------------
# Φ on modules
# ---------------------------------------------------------------------------


@dataclass
class VirasoroModuleDescriptor:
    kind: str  # irreducible | kac | staggered-R | zero
    labels: Tuple[int, ...]
    loewy: LoewyDiagram
    shape: Optional[str] = None
    deleted: Tuple[str, ...] = ()
    source: Optional[LoewyDiagram] = None

    def __post_init__(self):
        if self.kind not in ("irreducible", "kac", "staggered-R", "zero"):
            raise ValueError(f"unknown kind {self.kind!r}")
        if self.kind == "zero" and len(self.loewy):
            raise ValueError("zero module must have an empty diagram")
        if self.kind == "staggered-R" and self.shape not in ("quadrangular", "triangular"):
            raise ValueError("staggered-R needs a shape")

    def character(self, level: Level, q_top: Rational) -> QSeries:
        """Σ over nodes of independently built Virasoro irreducible characters."""
        t = level.t
        lead = -cbar(t) / 24
        acc = QSeries.zero(Fraction(q_top), lead)
        for n in self.loewy.nodes:
            if n.h + lead > q_top:
                # nothing below q_top, and its zero series would sit on another lattice
                continue
            acc = acc + virasoro_irr_char(t, n.h, q_top)
        return _cap(acc, q_top) if self.loewy.nodes else acc

    def to_json(self) -> dict:
        return {"kind": self.kind, "labels": list(self.labels), "shape": self.shape,
                "deleted": list(self.deleted), "loewy": self.loewy.to_json()}

    def render(self) -> str:
        """Text picture of the source diagram with deleted nodes shown as ×."""
        lines = [f"Phi image: {self.kind} {tuple(self.labels)}" + (f" ({self.shape})" if self.shape else "")]
        if self.source is not None:
            for n in self.source.nodes:
                mark = "×" if n.name in self.deleted else "·"
                lines.append(f"  {mark} {n.name} {list(n.label) if n.label else ''} j={n.j}")
        if len(self.loewy):
            lines.append(render_text(self.loewy))
        return "\n".join(lines)


def virasoro_label(level: Level, label: Label) -> Label:
    """Representative of a Virasoro label under (r,s) ≡ (r+p,s+p') ≡ (-r,-s)
    with r, s >= 0 when possible (Kac labels are kept if already positive)."""
    r, s = label
    if r < 0 or (r == 0 and s < 0):
        r, s = -r, -s
    return r, s


def _phi_diagram(level: Level, d: LoewyDiagram, title: str) -> Tuple[LoewyDiagram, Tuple[str, ...]]:
    t = level.t
    keep = [i for i, n in enumerate(d.nodes) if not quasi_integrable(n.j)]
    deleted = tuple(d.nodes[i].name for i in range(len(d.nodes)) if i not in keep)
    idx = {old: new for new, old in enumerate(keep)}
    edges = [(idx[a], idx[b]) for a, b in d.edges if a in idx and b in idx]
    nodes = [Node(d.nodes[i].name, virasoro_label(level, d.nodes[i].label), d.nodes[i].j,
                  hbar_of_j(t, d.nodes[i].j), None, Fraction(0), d.nodes[i].grade, 0, d.nodes[i].pos)
             for i in keep]
    nodes = _with_depth_shades(nodes, edges)
    kind = d.kind if nodes else "zero"
    return LoewyDiagram(kind, tuple(nodes), tuple(sorted(edges)), d.truncated, title=title), deleted


def phi_irreducible(level: Level, r: int, s: int) -> VirasoroModuleDescriptor:
    check_label(r, s)
    j = j_rs(level, r, s)
    src = LoewyDiagram("irreducible", (Node("top", (r, s), j, h_of_j(level, j), BLACK),), (),
                       title=f"L[{r},{s}]")
    d, deleted = _phi_diagram(level, src, f"Phi(L[{r},{s}])")
    if not len(d):
        return VirasoroModuleDescriptor("zero", (), d, None, deleted, src)
    return VirasoroModuleDescriptor("irreducible", tuple(d.nodes[0].label), d, None, deleted, src)


def phi_kac(level: Level, r: int, s: int) -> VirasoroModuleDescriptor:
    """Φ(A_{r,s}) = K_{|r|,|s|} for rs > 0 and 0 for s = 0."""
    src = kac_loewy(level, r, s)
    d, deleted = _phi_diagram(level, src, f"Phi(A[{r},{s}]) = K[{abs(r)},{abs(s)}]")
    if not len(d):
        return VirasoroModuleDescriptor("zero", (), d, None, deleted, src)
    return VirasoroModuleDescriptor("kac", (abs(r), abs(s)), d, None, deleted, src)


def staggered_image_labels(level: Level, desc: StaggeredDescriptor) -> Tuple[int, int, int, int]:
    """(x, y, a, b) of the Virasoro module R^{a,b}_{x,y} expected as the image."""
    p, pp = level.p, level.pp
    P = desc.params
    if desc.conjecture == 1:
        a, s0, ell = P
        return (ell * p, s0 if desc.sign == "+" else pp - s0, a, 0)
    if desc.conjecture == 2:
        r0, b, ell = P
        return (r0, ell * pp, 0, b)
    b, ell = P
    return (p, ell * pp, 0, b)


def phi_staggered(level: Level, desc: StaggeredDescriptor) -> VirasoroModuleDescriptor:
    p, pp = level.p, level.pp
    src = staggered_loewy(level, desc)
    labels = staggered_image_labels(level, desc)
    d, deleted = _phi_diagram(level, src, f"Phi({desc.name}) = R^{{{labels[2]},{labels[3]}}}_{{{labels[0]},{labels[1]}}}")
    if not len(d):
        return VirasoroModuleDescriptor("zero", (), d, None, deleted, src)
    shape = "quadrangular" if len(d) == 4 else "triangular"
    if len(d) not in (3, 4):
        raise ArithmeticError(f"unexpected Φ-image with {len(d)} nodes for {desc.name}")
    return VirasoroModuleDescriptor("staggered-R", labels, replace(d, kind=shape), shape, deleted, src)


def phi_functor(obj, level: Optional[Level] = None) -> VirasoroModuleDescriptor:
    """Dispatch on a staggered descriptor, a LoewyDiagram or an (r, s) label
    (irreducible) ."""
    if isinstance(obj, StaggeredDescriptor):
        return phi_staggered(level, obj)
    if isinstance(obj, LoewyDiagram):
        d, deleted = _phi_diagram(level, obj, f"Phi({obj.title})")
        kind = "zero" if not len(d) else ("irreducible" if len(d) == 1 else "kac")
        labels = () if not len(d) else tuple(d.nodes[0].label)
        return VirasoroModuleDescriptor(kind, labels, d, None, deleted, obj)
    r, s = obj
    return phi_irreducible(level, r, s)


# ---------------------------------------------------------------------------
# characters of the images of φ on staggered modules
# ---------------------------------------------------------------------------


def r_char_closed(level: Level, labels: Tuple[int, int, int, int]) -> ClosedFormCharacter:
    """χ[R^{a,b}_{x,y}] as a sum of Virasoro Kac closed forms at (p,p')."""
    from .characters import virasoro_kac_closed
    x, y, a, b = labels
    p, pp = level.p, level.pp
    if a:
        parts = ((x - a, y), (x + a, y))
    else:
        parts = ((x, y - b), (x, y + b))
    out = None
    for u, v in parts:
        c = virasoro_kac_closed(p, pp, u, v)
        out = c if out is None else out + c
    return out


def phi_staggered_expected(level: Level, desc: StaggeredDescriptor) -> Optional[ClosedFormCharacter]:
    """The R-character the staggered character should map to (None means 0)."""
    if desc.conjecture == 1 and desc.sign == "+" and desc.params[1] == 0:
        return None
    return r_char_closed(level, staggered_image_labels(level, desc))


# ---------------------------------------------------------------------------
# the commutative square and exactness
# ---------------------------------------------------------------------------


@dataclass
class SquareReport:
    ok: bool
    name: str
    q_top: Fraction
    image: str
    first_difference: Optional[tuple] = None

    def to_json(self) -> dict:
        f = lambda x: f"{Fraction(x).numerator}/{Fraction(x).denominator}"  # noqa: E731
        return {"ok": self.ok, "module": self.name, "q_top": f(self.q_top), "image": self.image,
                "first_difference": None if self.first_difference is None
                else [f(x) for x in self.first_difference]}


def _square(level: Level, cf: ClosedFormCharacter, img: VirasoroModuleDescriptor, name: str,
            q_max: int) -> SquareReport:
    lead = -cbar(level.t) / 24
    q_top = lead + q_max
    a = phi_char(cf, q_top=q_top)
    b = img.character(level, q_top)
    diff = a.first_difference(b)
    return SquareReport(diff is None, name, q_top, img.kind, diff)


def square_kac(level: Level, r: int, s: int, q_max: int = 12) -> SquareReport:
    return _square(level, kac_closed(level, r, s), phi_kac(level, r, s), f"A[{r},{s}]", q_max)


def square_irr(level: Level, r: int, s: int, q_max: int = 12) -> SquareReport:
    return _square(level, irr_closed(level, r, s), phi_irreducible(level, r, s), f"L[{r},{s}]", q_max)


def square_staggered(level: Level, desc: StaggeredDescriptor, q_max: int = 12) -> SquareReport:
    return _square(level, staggered_closed(level, desc), phi_staggered(level, desc), desc.name, q_max)


def exactness_witness(level: Level, r: int, s: int, q_max: int = 12) -> Dict[str, bool]:
    """For A_{r,s} in S_quo with two composition factors, Φ applied to
    0 → I_sub → A_{r,s} → I → 0 is checked node-wise and on characters."""
    d = kac_loewy(level, r, s)
    out: Dict[str, bool] = {}
    img = phi_kac(level, r, s)
    parts = [phi_irreducible(level, *n.label) for n in d.nodes]
    kept = sorted(n.name for n in img.loewy.nodes)
    from_parts = sorted(d.nodes[i].name for i, p_ in enumerate(parts) if p_.kind != "zero")
    out["nodes"] = kept == from_parts
    lead = -cbar(level.t) / 24
    q_top = lead + q_max
    total = img.character(level, q_top)
    acc = QSeries.zero(q_top, lead)
    for p_ in parts:
        acc = acc + p_.character(level, q_top)
    out["characters"] = total.agrees(acc)
    return out
