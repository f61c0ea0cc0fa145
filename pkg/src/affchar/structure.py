"""Loewy diagrams: Verma modules, affine Kac modules and staggered modules.

Arrows point from a node to the nodes it generates, so sources sit in the
head and sinks in the socle.  Nodes are identified by (label, grade, charge)
rather than by weight alone, since chain diagrams revisit weights.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from .weights import Level, check_label, ell_split, h_of_j, j_rs, valid_label

Label = Tuple[int, int]

BLACK, GREY, WHITE = "black", "grey", "white"
_SHADE_BY_DEPTH = {0: BLACK, 1: GREY, 2: WHITE}

KINDS = ("braid", "chain", "kac-braid", "kac-chain-I", "kac-chain-II",
         "quadrangular", "triangular", "islands")


def _fmt(x: Fraction) -> str:
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


@dataclass(frozen=True)
class Node:
    name: str
    label: Optional[Label]
    j: Optional[Fraction]
    h: Optional[Fraction]
    shade: Optional[str] = None
    charge: Fraction = Fraction(0)
    grade: Fraction = Fraction(0)
    layer: int = 0
    pos: Optional[Tuple[float, float]] = None

    @property
    def key(self):
        return (self.label, self.grade, self.charge)

    def to_json(self) -> dict:
        d = {
            "name": self.name,
            "label": list(self.label) if self.label is not None else None,
            "j": _fmt(self.j) if self.j is not None else None,
            "h": _fmt(self.h) if self.h is not None else None,
            "shade": self.shade,
            "charge": _fmt(self.charge),
            "grade": _fmt(self.grade),
            "layer": self.layer,
        }
        if self.pos is not None:
            d["pos"] = list(self.pos)
        return d


@dataclass(frozen=True)
class LoewyDiagram:
    kind: str
    nodes: Tuple[Node, ...]
    edges: Tuple[Tuple[int, int], ...]
    truncated: bool = False
    title: str = ""
    meta: Dict[str, object] = field(default_factory=dict, compare=False)

    def __len__(self) -> int:
        return len(self.nodes)

    def index(self, name: str) -> int:
        for i, n in enumerate(self.nodes):
            if n.name == name:
                return i
        raise KeyError(name)

    def node(self, name: str) -> Node:
        return self.nodes[self.index(name)]

    def successors(self, i: int) -> List[int]:
        return [b for a, b in self.edges if a == i]

    def predecessors(self, i: int) -> List[int]:
        return [a for a, b in self.edges if b == i]

    @property
    def weights(self) -> List[Fraction]:
        return [n.j for n in self.nodes]

    def sources(self) -> List[int]:
        targets = {b for _, b in self.edges}
        return [i for i in range(len(self.nodes)) if i not in targets]

    def sinks(self) -> List[int]:
        heads = {a for a, _ in self.edges}
        return [i for i in range(len(self.nodes)) if i not in heads]

    def edge_names(self) -> List[Tuple[str, str]]:
        return [(self.nodes[a].name, self.nodes[b].name) for a, b in self.edges]

    def to_json(self) -> dict:
        return {
            "kind": self.kind,
            "title": self.title,
            "truncated": self.truncated,
            "nodes": [n.to_json() for n in self.nodes],
            "edges": [list(e) for e in self.edges],
        }

    def to_json_str(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True)

    def render(self) -> str:
        return render_text(self)


def _with_depth_shades(nodes: List[Node], edges: Sequence[Tuple[int, int]]) -> List[Node]:
    """Shade by the length of the longest path to a sink: black, grey, white."""
    succ: Dict[int, List[int]] = {i: [] for i in range(len(nodes))}
    for a, b in edges:
        succ[a].append(b)
    memo: Dict[int, int] = {}

    def depth(i: int) -> int:
        if i not in memo:
            memo[i] = 1 + max((depth(b) for b in succ[i]), default=-1)
        return memo[i]

    return [replace(n, shade=_SHADE_BY_DEPTH.get(depth(i), WHITE), layer=depth(i))
            for i, n in enumerate(nodes)]


# ---------------------------------------------------------------------------
# Verma modules
# ---------------------------------------------------------------------------


def alpha(level: Level, r0: int, s0: int, i: int) -> Label:
    return (r0 + 2 * i * level.p, s0)


def beta(level: Level, r0: int, s0: int, i: int) -> Label:
    return (-r0 + 2 * i * level.p, s0)


def gamma(level: Level, delta: int, s0: int, i: int) -> Label:
    if i < 1:
        raise ValueError("gamma_i is defined for i >= 1")
    sign = -1 if (i + delta) % 2 else 1
    return (delta * level.p + 2 * sign * (i // 2) * level.p, s0)


def _braid_layer(layer: int) -> List[Tuple[str, int]]:
    """Ambient braid positions at a given layer, top strand first."""
    if layer == 0:
        return [("alpha", 0)]
    if layer % 2 == 0:
        m = layer // 2
        return [("alpha", -m), ("alpha", m)]
    m = (layer - 1) // 2
    return [("beta", -m), ("beta", m + 1)]


def braid_layer_of(strand: str, i: int) -> int:
    if strand == "alpha":
        return 2 * abs(i)
    return 2 * i - 1 if i >= 1 else -2 * i + 1


def locate_in_ambient(level: Level, r: int, s: int) -> Dict[str, object]:
    """Ambient Verma module containing V_{j_{r,s}} and the position inside it.

    The ambient modules are V_{j_{rho,s0}}, 0 <= rho <= p, 0 <= s0 <= p'-1;
    rho = 0 is reported through its equivalent label (-p, s0 - p').
    """
    check_label(r, s)
    p, pp = level.p, level.pp
    rh0, sh0, ell, ellp = ell_split(level, r, s)
    d = ell - ellp
    if rh0 != 0:
        if d % 2 == 0:
            amb_r, strand, idx = rh0, "alpha", d // 2
        else:
            amb_r, strand, idx = p - rh0, "beta", (d + 1) // 2
        ambient = (amb_r, sh0)
        layer = braid_layer_of(strand, idx)
        pos_label = alpha(level, amb_r, sh0, idx) if strand == "alpha" else beta(level, amb_r, sh0, idx)
        rho = amb_r
    else:
        idx = d if d >= 1 else 1 - d  # |d - 1/2| + 1/2
        if d % 2 == 0:
            delta, ambient = 0, (-p, sh0 - pp)
        else:
            delta, ambient = 1, (p, sh0)
        strand = "gamma"
        layer = idx - 1
        pos_label = gamma(level, delta, sh0, idx)
        rho = delta * p
    out = {
        "label": (r, s),
        "ambient": ambient,
        "ambient_rho": (rho, sh0),
        "ambient_j": j_rs(level, *ambient),
        "strand": strand,
        "index": idx,
        "layer": layer,
        "position_label": pos_label,
    }
    assert j_rs(level, *pos_label) == j_rs(level, r, s)
    return out


def ambient_labels(level: Level) -> List[Tuple[int, int]]:
    """The (p+1)p' ambient labels (rho, s0)."""
    return [(rho, s0) for rho in range(level.p + 1) for s0 in range(level.pp)]


def _verma_from(level: Level, rho: int, s0: int, start: Tuple[str, int], depth: int) -> LoewyDiagram:
    p = level.p
    nodes: List[Node] = []
    edges: List[Tuple[int, int]] = []
    if 0 < rho < p:
        kind = "braid"
        lab = (lambda st, i: alpha(level, rho, s0, i) if st == "alpha" else beta(level, rho, s0, i))
        top_layer = braid_layer_of(*start)
        layers = [[start]] + [_braid_layer(top_layer + d) for d in range(1, depth + 1)]
    else:
        kind = "chain"
        delta = rho // p
        lab = (lambda st, i: gamma(level, delta, s0, i))
        layers = [[("gamma", start[1] + d)] for d in range(depth + 1)]
    j0 = j_rs(level, *lab(*start))
    h0 = h_of_j(level, j0)
    prev: List[int] = []
    for d, layer in enumerate(layers):
        cur = []
        for st, i in layer:
            r_, s_ = lab(st, i)
            jj = j_rs(level, r_, s_)
            hh = h_of_j(level, jj)
            nodes.append(Node(f"{st}_{i}", (r_, s_), jj, hh, None, jj - j0, hh - h0, d))
            cur.append(len(nodes) - 1)
        for a in prev:
            for b in cur:
                edges.append((a, b))
        prev = cur
    return LoewyDiagram(kind, tuple(nodes), tuple(edges), truncated=True,
                        title=f"V_{{{_fmt(j0)}}} at {level}",
                        meta={"ambient": (rho, s0), "start": start})


def verma_loewy(level: Level, r: int, s: int, depth: int = 3) -> LoewyDiagram:
    """Loewy diagram of V_{j_{r,s}} down to ``depth`` layers below its head.

    The diagram is always infinite, so the result is flagged as truncated.
    Shades are left unset.
    """
    if depth < 1:
        raise ValueError("depth must be >= 1")
    loc = locate_in_ambient(level, r, s)
    rho, s0 = loc["ambient_rho"]
    return _verma_from(level, rho, s0, (loc["strand"], loc["index"]), depth)


def ambient_loewy(level: Level, rho: int, s0: int, depth: int = 3) -> LoewyDiagram:
    """Diagram of one of the ambient modules V_{j_{rho,s0}}."""
    if not (0 <= rho <= level.p and 0 <= s0 < level.pp):
        raise ValueError("need 0 <= rho <= p and 0 <= s0 <= p'-1")
    start = ("alpha", 0) if 0 < rho < level.p else ("gamma", 1)
    return _verma_from(level, rho, s0, start, depth)


# ---------------------------------------------------------------------------
# affine Kac modules
# ---------------------------------------------------------------------------


def _kac_nodes(level: Level, named: List[Tuple[str, Label]], edges_by_name, kind: str,
               r: int, s: int) -> LoewyDiagram:
    j0 = j_rs(level, r, s)
    h0 = h_of_j(level, j0)
    nodes = []
    for name, lab in named:
        jj = j_rs(level, *lab)
        hh = h_of_j(level, jj)
        nodes.append(Node(name, lab, jj, hh, None, jj - j0, hh - h0))
    idx = {n.name: i for i, n in enumerate(nodes)}
    edges = [(idx[a], idx[b]) for a, b in edges_by_name]
    nodes = _with_depth_shades(nodes, edges)
    return LoewyDiagram(kind, tuple(nodes), tuple(edges), False, title=f"A_{{{r},{s}}} at {level}")


def kac_loewy(level: Level, r: int, s: int) -> LoewyDiagram:
    """Loewy diagram of the affine Kac module A_{r,s}."""
    check_label(r, s)
    p = level.p
    rh0, sh0, ell, ellp = ell_split(level, r, s)
    if rh0 != 0:
        m = min(abs(2 * ell + 1), abs(2 * ellp + 1)) // 2
        if ell >= 0:
            u = {2 * i: (-r + 2 * i * p, s) for i in range(m + 1)}
            u.update({2 * i - 1: (r - 2 * (ell + 1 - i) * p, s) for i in range(1, m + 1)})
            v = {2 * i: (-r + 2 * (ell + ellp + 1 - i) * p, s) for i in range(m + 1)}
            v.update({2 * i - 1: (r + 2 * (ellp + 1 - i) * p, s) for i in range(1, m + 1)})
        else:
            u = {2 * i: (-r - 2 * i * p, s) for i in range(m + 1)}
            u.update({2 * i - 1: (r - 2 * (ell + i) * p, s) for i in range(1, m + 1)})
            v = {2 * i: (-r + 2 * (ell + ellp + 1 + i) * p, s) for i in range(m + 1)}
            v.update({2 * i - 1: (r + 2 * (ellp + i) * p, s) for i in range(1, m + 1)})
        named = [("j", (r, s))]
        named += [(f"u_{i}", u[i]) for i in range(2 * m, 0, -1)]
        named += [(f"v_{i}", v[i]) for i in range(2 * m, -1, -1)]
        edges = [("j", f"v_{2 * m}")]
        if m > 0:
            edges.append((f"u_{2 * m}", "j"))
        for i in range(2 * m, 0, -1):
            # horizontal arrows between columns i and i-1
            if i % 2 == 0:
                if i - 1 >= 1:
                    edges.append((f"u_{i}", f"u_{i - 1}"))
                edges.append((f"v_{i - 1}", f"v_{i}"))
                edges.append((f"u_{i}", f"v_{i - 1}"))
                if i - 1 >= 1:
                    edges.append((f"u_{i - 1}", f"v_{i}"))
            else:
                if i - 1 >= 1:
                    edges.append((f"u_{i - 1}", f"u_{i}"))
                edges.append((f"v_{i}", f"v_{i - 1}"))
                if i - 1 >= 1:
                    edges.append((f"u_{i - 1}", f"v_{i}"))
                edges.append((f"u_{i}", f"v_{i - 1}"))
        diag = _kac_nodes(level, named, edges, "kac-braid", r, s)
        return replace(diag, meta={"m": m, "u": u, "v": v})
    # r in p Z^x
    m = min(abs(ell) - 1, abs(2 * ellp + 1) // 2)
    if ellp >= ell > 0:
        typ = "I"
        w = {2 * i: (r + 2 * (ellp - i) * p, s) for i in range(m + 1)}
        w.update({2 * i - 1: (-r + 2 * i * p, s) for i in range(1, m + 1)})
    elif ell > ellp >= 0:
        typ = "II"
        w = {2 * i: (-r + 2 * i * p, s) for i in range(1, m + 1)}
        w.update({2 * i - 1: (r + 2 * (ellp + 1 - i) * p, s) for i in range(1, m + 1)})
    elif ellp < ell < 0:
        typ = "I"
        w = {2 * i: (r + 2 * (ellp + 1 + i) * p, s) for i in range(m + 1)}
        w.update({2 * i - 1: (-r - 2 * i * p, s) for i in range(1, m + 1)})
    else:  # ell <= ellp < 0
        typ = "II"
        w = {2 * i: (-r - 2 * i * p, s) for i in range(1, m + 1)}
        w.update({2 * i - 1: (r + 2 * (ellp + i) * p, s) for i in range(1, m + 1)})
    lo = 0 if typ == "I" else 1
    order = list(range(2 * m, lo - 1, -1))
    named = [("j", (r, s))] + [(f"w_{i}", w[i]) for i in order]
    chain = ["j"] + [f"w_{i}" for i in order]
    # grey nodes point to their neighbours: j and odd w in type I, even w in type II
    grey = {"j"} | {f"w_{i}" for i in order if i % 2 == 1} if typ == "I" \
        else {f"w_{i}" for i in order if i % 2 == 0}
    edges = [(a, b) if a in grey else (b, a) for a, b in zip(chain, chain[1:])]
    diag = _kac_nodes(level, named, edges, f"kac-chain-{typ}", r, s)
    return replace(diag, meta={"m": m, "w": w, "type": typ})


def kac_type(level: Level, r: int, s: int) -> Optional[str]:
    """'I' or 'II' for r in pZ^x, None otherwise."""
    rh0, _, ell, ellp = ell_split(level, r, s)
    if rh0 != 0:
        return None
    return "I" if (ellp >= ell > 0 or ellp < ell < 0) else "II"


# ---------------------------------------------------------------------------
# staggered modules
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class StaggeredDescriptor:
    name: str
    conjecture: int
    sign: str
    params: Tuple[int, ...]
    left: Label
    right: Label
    shape: str
    character_terms: Tuple[Tuple[Label, int], ...]

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "conjecture": self.conjecture,
            "sign": self.sign,
            "params": list(self.params),
            "left": list(self.left),
            "right": list(self.right),
            "shape": self.shape,
            "character_terms": [[list(l), m] for l, m in self.character_terms],
        }

    def ses(self) -> str:
        return f"0 -> Q_{{{self.left[0]},{self.left[1]}}} -> {self.name} -> Q_{{{self.right[0]},{self.right[1]}}} -> 0"


PARAM_NAMES = {1: ("a", "s0", "ell"), 2: ("r0", "b", "ell"), 3: ("b", "ell")}


def _check_params(level: Level, conjecture: int, params: Sequence[int]) -> None:
    p, pp = level.p, level.pp
    if conjecture not in PARAM_NAMES:
        raise ValueError("conjecture must be 1, 2 or 3")
    if len(params) != len(PARAM_NAMES[conjecture]):
        raise ValueError(f"expected parameters {PARAM_NAMES[conjecture]}")
    ell = params[-1]
    ok = ell >= 1
    if conjecture == 1:
        a, s0, _ = params
        ok = ok and 1 <= a <= p - 1 and 0 <= s0 <= pp - 1
    elif conjecture == 2:
        r0, b, _ = params
        ok = ok and 1 <= r0 <= p - 1 and 1 <= b <= pp - 1
    else:
        b, _ = params
        ok = ok and 1 <= b <= pp - 1
    if not ok:
        raise ValueError(f"parameters {tuple(params)} out of range for conjecture {conjecture} at {level}")


def staggered_descriptor(level: Level, conjecture: int, params: Sequence[int]
                         ) -> Tuple[StaggeredDescriptor, StaggeredDescriptor]:
    """The (+, -) pair of conjectured staggered modules."""
    params = tuple(int(x) for x in params)
    _check_params(level, conjecture, params)
    p, pp = level.p, level.pp
    out = []
    for sign in "+-":
        e = 1 if sign == "+" else -1
        if conjecture == 1:
            a, s0, ell = params
            name = f"S^{{{a},0;{sign}}}_{{{ell * p},{s0}}}"
            if sign == "+":
                left, right, last = (ell * p - a, s0), (ell * p + a, s0), ((ell + 2) * p - a, s0)
            else:
                left, right, last = ((-ell * p + a, s0 - pp), (-ell * p - a, s0 - pp),
                                     (-(ell + 2) * p + a, s0 - pp))
            first = True
        else:
            if conjecture == 2:
                r0, b, ell = params
            else:
                b, ell = params
                r0 = p
            name = f"S^{{0,{b};{sign}}}_{{{r0},{ell * pp}}}"
            left = (e * r0, e * (ell * pp - b))
            right = (-e * r0, -e * (ell * pp + b))
            last = (e * r0, e * ((ell + 2) * pp - b))
            first = not (conjecture == 3 and ell == 1)
        terms = ([(left, 1)] if first else []) + [(right, 2), (last, 1)]
        out.append(StaggeredDescriptor(name, conjecture, sign, params, left, right,
                                       "quadrangular" if first else "triangular", tuple(terms)))
    return out[0], out[1]


def staggered_loewy(level: Level, desc: StaggeredDescriptor) -> LoewyDiagram:
    """Quadrangular or triangular diagram assembled from the two quotient modules.

    Positions follow the usual picture: the left column holds M^L, the right
    column M^R, and the horizontal arrow joins the two copies of the middle
    factor.
    """
    L = kac_loewy(level, *desc.left)
    R = kac_loewy(level, *desc.right)
    if len(R) != 2 or len(L) not in (1, 2):
        raise ValueError("quotient modules are expected to have at most two composition factors")

    def head_socle(d: LoewyDiagram):
        if len(d) == 1:
            return None, d.nodes[0]
        a, b = d.edges[0]
        return d.nodes[a], d.nodes[b]

    lh, ls = head_socle(L)
    rh, rs = head_socle(R)
    if ls.j != rh.j:
        raise ValueError("socle of M^L and head of M^R must agree")
    jt = (lh or ls).j
    ht = h_of_j(level, jt)

    def mk(name, src: Node, pos):
        return Node(name, src.label, src.j, src.h, None, src.j - jt, src.h - ht, 0, pos)

    nodes = [mk("L_socle", ls, (0.0, 1.1)), mk("R_head", rh, (1.2, 1.1)), mk("R_socle", rs, (1.2, 0.0))]
    edges = [("R_head", "L_socle"), ("R_head", "R_socle"), ("R_socle", "L_socle")]
    if lh is not None:
        nodes.insert(0, mk("L_head", lh, (0.0, 2.2)))
        edges += [("R_head", "L_head"), ("L_head", "L_socle")]
    idx = {n.name: i for i, n in enumerate(nodes)}
    e = [(idx[a], idx[b]) for a, b in edges]
    nodes = _with_depth_shades(nodes, e)
    kind = "quadrangular" if lh is not None else "triangular"
    return LoewyDiagram(kind, tuple(nodes), tuple(sorted(e)), False, title=f"{desc.name} at {level}")


# ---------------------------------------------------------------------------
# Wakimoto display (no algebraic content)
# ---------------------------------------------------------------------------


def wakimoto_display(level: Level, r: int, s: int, columns: int = 6) -> Dict[str, LoewyDiagram]:
    """Unlabelled Wakimoto diagram patterns for display only.

    For r outside pZ a single braid pattern is returned.  For r in pZ^x both
    string patterns are returned, keyed "I" and "II"; which one applies is
    not decided here.
    """
    check_label(r, s)
    if r % level.p:
        nodes = [Node("j", None, None, None, GREY, layer=1)]
        edges = []
        for c in range(columns):
            nodes.append(Node(f"top_{c}", None, None, None, WHITE if c % 2 == 0 else GREY, layer=2 - c % 2))
            nodes.append(Node(f"bot_{c}", None, None, None, BLACK if c % 2 == 0 else GREY, layer=c % 2))
        idx = {n.name: i for i, n in enumerate(nodes)}
        edges.append((idx["top_0"], idx["j"]))
        edges.append((idx["j"], idx["bot_0"]))
        for c in range(columns - 1):
            a, b = (c, c + 1) if c % 2 == 0 else (c + 1, c)
            edges.append((idx[f"top_{a}"], idx[f"top_{b}"]))
            edges.append((idx[f"bot_{b}"], idx[f"bot_{a}"]))
            edges.append((idx[f"top_{c}"], idx[f"bot_{c + 1}"]) if c % 2 == 0
                         else (idx[f"top_{c + 1}"], idx[f"bot_{c}"]))
            edges.append((idx[f"top_{c + 1}"], idx[f"bot_{c}"]) if c % 2 == 0
                         else (idx[f"top_{c}"], idx[f"bot_{c + 1}"]))
        return {"braid": LoewyDiagram("braid", tuple(nodes), tuple(edges), True, "Wakimoto (display)")}
    out = {}
    for typ, first in (("I", GREY), ("II", BLACK)):
        nodes, edges = [], []
        for c in range(columns + 1):
            grey = (c % 2 == 0) == (first == GREY)
            nodes.append(Node(f"n_{c}", None, None, None, GREY if grey else BLACK, layer=int(grey)))
            if c:
                a, b = (c - 1, c) if nodes[c - 1].shade == GREY else (c, c - 1)
                edges.append((a, b))
        out[typ] = LoewyDiagram("chain", tuple(nodes), tuple(edges), True, f"Wakimoto type {typ} (display)")
    return out


# ---------------------------------------------------------------------------
# text rendering
# ---------------------------------------------------------------------------

_SHADE_MARK = {BLACK: "(*)", GREY: "(+)", WHITE: "( )", None: ""}


def _node_str(n: Node) -> str:
    if n.j is None:
        return f"{n.name}{_SHADE_MARK[n.shade]}"
    return f"{n.name}{_SHADE_MARK[n.shade]} [{_fmt(n.j)},{_fmt(n.h)}]"


def render_text(d: LoewyDiagram) -> str:
    """Layered text picture followed by the arrow list.

    Shades are marked (*) black, (+) grey, ( ) white.
    """
    lines = [f"{d.title}  kind={d.kind}" + ("  (truncated)" if d.truncated else "")]
    by_layer: Dict[int, List[Node]] = {}
    for n in d.nodes:
        by_layer.setdefault(n.layer, []).append(n)
    # Verma layers run downwards from the head; socle-depth layers run upwards
    keys = sorted(by_layer) if d.kind in ("braid", "chain") and d.nodes and d.nodes[0].shade is None \
        else sorted(by_layer, reverse=True)
    for k in keys:
        lines.append(f"  L{k}: " + "   ".join(_node_str(n) for n in by_layer[k]))
    if d.edges:
        lines.append("  arrows: " + ", ".join(f"{a}->{b}" for a, b in d.edge_names()))
    return "\n".join(lines)
