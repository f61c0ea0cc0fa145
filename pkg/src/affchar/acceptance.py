"""The reproduction harness: nine exact checks with their time budgets.

Each ``criterion_N`` returns ``(ok, detail)``; :func:`run` times them and
collects :class:`CriterionResult` records for the CLI and the test suite.
"""

from __future__ import annotations

import random
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Dict, List, Optional, Sequence, Tuple

from . import reference
from .branching import (BranchingKey, branching_alt, branching_function, superconformal_branch,
                        verify_branching)
from .characters import (admissible_closed, canonical_string_key, minimal_model_closed,
                         n2_product_form, string_function, string_function_from_character,
                         string_lead, verma_char)
from .residue import cbar, phi_char, square_irr, square_kac, square_staggered
from .series import BiSeries, QSeries, mul
from .structure import staggered_descriptor
from .theta import R_ell, eta, reciprocal_varphi_qz, sum_fm, varphi_pow, varphi_qz
from .uea import (EXAMPLES, OPERATOR_IDENTITIES, check_identity, compare_displayed,
                  staggered_solve, weight_space_basis)
from .weights import Level, kac_quadrants, valid_label

Check = Tuple[bool, str]
LEVELS = (Level(2, 3), Level(3, 2))


@dataclass
class CriterionResult:
    number: int
    title: str
    ok: bool
    seconds: float
    budget: float
    detail: str

    @property
    def in_budget(self) -> bool:
        return self.seconds < self.budget

    @property
    def passed(self) -> bool:
        return self.ok and self.in_budget

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        note = "" if self.in_budget else f" (over budget {self.budget:g}s)"
        return f"{status} criterion {self.number}: {self.title} [{self.seconds:.2f}s]{note} {self.detail}"

    def to_json(self) -> dict:
        return {"criterion": self.number, "title": self.title, "pass": self.passed,
                "exact": self.ok, "seconds": round(self.seconds, 3), "budget": self.budget,
                "detail": self.detail}


def _fail_list(bad: Sequence, limit: int = 5) -> str:
    return "" if not bad else f"failures: {list(bad)[:limit]}"


# ---------------------------------------------------------------------------
# 1. Kac tables
# ---------------------------------------------------------------------------


def criterion_1() -> Check:
    bad = []
    cells = 0
    for lev in LEVELS:
        ref = reference.FIGURE1[(lev.p, lev.pp)]
        upper, lower = kac_quadrants(lev, 6, -5, 5)
        got = {(e.r, e.s): e for e in upper + lower}
        for s, row in ref["upper"].items():
            for r, j in zip(range(1, 7), row):
                cells += 1
                if got[(r, s)].j != j:
                    bad.append((lev.p, lev.pp, r, s, "j"))
        for s, row in ref["lower"].items():
            for r, j in zip(range(-6, 0), row):
                cells += 1
                if got[(r, s)].j != j:
                    bad.append((lev.p, lev.pp, r, s, "j"))
        for (r, s), e in got.items():
            if e.irreducible != ((r, s) in ref["irreducible"]):
                bad.append((lev.p, lev.pp, r, s, "marker"))
            if e.admissible != ((r, s) in ref["admissible"]):
                bad.append((lev.p, lev.pp, r, s, "frame"))
    return not bad, f"{cells} cells compared. {_fail_list(bad)}".strip()


# ---------------------------------------------------------------------------
# 2. staggered couplings
# ---------------------------------------------------------------------------


def criterion_2() -> Check:
    ref = reference.STAGGERED_EXAMPLES
    one = staggered_solve(EXAMPLES["I"])
    ok1 = (one.consistent and one.eta == ref["I"]["eta"] and one.mu != 0
           and one.beta == ref["I"]["beta"] and one.beta_unique and one.l0_check)
    two = staggered_solve(EXAMPLES["II"])
    delta = two.D.get((), Fraction(0))
    ok2 = (two.consistent and two.mu != 0 and two.eta == ref["II"]["eta_over_mu"] * two.mu
           and delta == ref["II"]["delta_over_mu"] * two.mu and set(two.D) <= {()}
           and two.beta == ref["II"]["beta"] and two.beta_unique and two.l0_check)
    return ok1 and ok2, (f"I: eta={one.eta} mu={one.mu} beta={one.beta}; "
                         f"II: eta={two.eta} mu={two.mu} delta={delta} beta={two.beta}")


# ---------------------------------------------------------------------------
# 3. triple product identities
# ---------------------------------------------------------------------------


def criterion_3() -> Check:
    N = 30
    ok_sum = sum_fm(N).agrees(QSeries.one(N)) and sum_fm(N).q_max >= N
    phi3 = varphi_pow(3, N)
    bad_R = []
    for ell in range(1, 7):
        want = -phi3 if ell == 1 else QSeries.zero(N)
        got = R_ell(ell, N)
        if not (got.q_max >= N and got.agrees(want)):
            bad_R.append(ell)
    Q, Z = 20, 15
    pad = 8  # z-reach of φ(q,z) at q-order 20 is 6
    prod = mul(varphi_qz(Q), reciprocal_varphi_qz(Q, (-Z - pad, Z + pad)))
    prod = prod.restrict(Q, -Z, Z)
    one = BiSeries.from_terms([(0, 0, 1)], Q, -Z, Z)
    ok_rec = prod.z_min <= -Z and prod.z_max >= Z and prod.q_max >= Q and prod.agrees(one)
    ok = ok_sum and not bad_R and ok_rec
    return ok, f"sum f_m = 1: {ok_sum}; R_l bad: {bad_R}; reciprocal: {ok_rec}"


# ---------------------------------------------------------------------------
# 4. branching rule
# ---------------------------------------------------------------------------


def _branching_cases() -> List[Tuple[Level, int, int, int, int]]:
    out = []
    for lev in LEVELS:
        for n in (1, 2):
            for r in range(1, 5):
                for s in range(0, 4):
                    for rho in range(1, n + 2):
                        out.append((lev, n, r, s, rho))
                        if s > 0:
                            out.append((lev, n, -r, -s, rho))
    return out


def random_branching_keys(count: int = 20, seed: int = 20240601) -> List[BranchingKey]:
    rng = random.Random(seed)
    keys = []
    while len(keys) < count:
        lev = rng.choice(LEVELS)
        n = rng.choice((1, 2))
        r = rng.randint(1, 4)
        s = rng.randint(0, 3)
        rho = rng.randint(1, n + 1)
        sigma = rng.randint(1, 6)
        if (sigma - r - n * s - rho + 1) % 2:
            sigma += 1
        keys.append(BranchingKey(lev, n, r, s, rho, sigma))
    return keys


def criterion_4(q_max: int = 10) -> Check:
    bad = []
    cases = _branching_cases()
    for lev, n, r, s, rho in cases:
        rep = verify_branching(lev, n, r, s, rho, q_max)
        if not rep.ok:
            bad.append((lev.p, lev.pp, n, r, s, rho))
    bad_alt = []
    for key in random_branching_keys():
        T = key.lead() + q_max
        if not branching_function(key, q_top=T).agrees(branching_alt(key, q_top=T)):
            bad_alt.append(key.to_json())
    return not bad and not bad_alt, (f"{len(cases)} branching identities, 20 dual-route keys. "
                                     f"{_fail_list(bad + bad_alt)}").strip()


# ---------------------------------------------------------------------------
# 5. residues and the functor
# ---------------------------------------------------------------------------


def criterion_5(q_max: int = 12, mp_order: int = 20) -> Check:
    bad = []
    n_kac = n_stag = n_mp = 0
    for lev in LEVELS:
        p, pp = lev.p, lev.pp
        top = -cbar(lev.t) / 24 + mp_order
        for r0 in range(1, p):
            for s0 in range(0, pp):
                n_mp += 1
                got = phi_char(admissible_closed(lev, r0, s0), q_top=top)
                if s0 == 0:
                    if not (got.is_zero() and got.top >= top - 1):
                        bad.append(("s0=0 nonzero", p, pp, r0))
                else:
                    want = minimal_model_closed(p, pp, r0, s0).expand_q(top)
                    if not (got.agrees(want) and min(got.top, want.top) > top - 1):
                        bad.append(("minimal model", p, pp, r0, s0))
        for r in range(-3 * p, 3 * p + 1):
            for s in range(-3 * pp, 3 * pp + 1):
                if not valid_label(r, s):
                    continue
                n_kac += 1
                if not square_kac(lev, r, s, q_max).ok:
                    bad.append(("kac", p, pp, r, s))
                if not square_irr(lev, r, s, q_max).ok:
                    bad.append(("irr", p, pp, r, s))
        for desc in staggered_descriptors(lev, ell_max=2):
            n_stag += 1
            if not square_staggered(lev, desc, q_max).ok:
                bad.append(("staggered", p, pp, desc.name))
    return not bad, (f"{n_mp} admissible residues, {n_kac} Kac and irreducible squares, "
                     f"{n_stag} staggered squares. {_fail_list(bad)}").strip()


def staggered_descriptors(level: Level, ell_max: int = 2):
    p, pp = level.p, level.pp
    for ell in range(1, ell_max + 1):
        for a in range(1, p):
            for s0 in range(0, pp):
                yield from staggered_descriptor(level, 1, (a, s0, ell))
        for r0 in range(1, p):
            for b in range(1, pp):
                yield from staggered_descriptor(level, 2, (r0, b, ell))
        for b in range(1, pp):
            yield from staggered_descriptor(level, 3, (b, ell))


# ---------------------------------------------------------------------------
# 6. dimension oracle
# ---------------------------------------------------------------------------


def criterion_6(bound: int = 6, js=(Fraction(-2, 3), Fraction(5, 7))) -> Check:
    lev = Level(2, 3)
    bad = []
    for j in js:
        ch = verma_char(lev, j, q_max=bound, z_window=(-j - bound, -j + bound))
        lead = ch.q_shift
        for N in range(bound + 1):
            for Q in range(-bound, bound + 1):
                want = ch.coeff(lead + N, -j - Q)
                if len(weight_space_basis(Q, N)) != want:
                    bad.append((str(j), Q, N))
    return not bad, f"{len(js) * (bound + 1) * (2 * bound + 1)} weight spaces. {_fail_list(bad)}".strip()


# ---------------------------------------------------------------------------
# 7. singular vectors and identities
# ---------------------------------------------------------------------------


def criterion_7() -> Check:
    out = {name: compare_displayed(name) for name in ("verma(-1,2)", "quotient(-1,2)")}
    vec_ok = all(d["match"] and d["singular"] and d["kernel_dim"] == 1 for d in out.values())
    ids = {name: check_identity(name, Level(2, 3).k) for name in OPERATOR_IDENTITIES}
    detail = "; ".join(f"{k}: ratio {v['ratio']}" for k, v in out.items())
    return vec_ok and all(ids.values()), f"{detail}; identities {sorted(k for k, v in ids.items() if v)}"


# ---------------------------------------------------------------------------
# 8. string functions
# ---------------------------------------------------------------------------


def criterion_8() -> Check:
    c = string_function(1, 0, 0, q_max=40)
    e = eta(Fraction(1, 24) + 40)
    prod = c * e
    ok_eta = prod.agrees(QSeries.one(40)) and prod.top >= 40
    bad_n2 = []
    for l, m in ((0, 0), (2, 2), (2, 0), (0, 2), (1, 1)):
        T = string_lead(2, *canonical_string_key(2, l, m)) + 20
        a, b = n2_product_form(l, m, T), string_function(2, l, m, q_top=T)
        if not (a.agrees(b) and min(a.top, b.top) >= T - 1):
            bad_n2.append((l, m))
    bad_sym = []
    for n in range(1, 5):
        for l in range(n + 1):
            for m in range(-2 * n, 2 * n + 1):
                if (l - m) % 2:
                    continue
                T = string_lead(n, *canonical_string_key(n, l, m)) + 8
                direct = string_function_from_character(n, l, m, T)
                images = [(l, -m), (l, 2 * n - m), (n - l, n - m)]
                if not all(direct.agrees(string_function_from_character(n, a, b, T)) for a, b in images):
                    bad_sym.append((n, l, m))
                if not direct.agrees(string_function(n, l, m, q_top=T)):
                    bad_sym.append((n, l, m, "double sum"))
    ok = ok_eta and not bad_n2 and not bad_sym
    return ok, f"c00 eta = 1: {ok_eta}; n=2 products bad: {bad_n2}; symmetry bad: {bad_sym[:5]}"


# ---------------------------------------------------------------------------
# 9. superconformal
# ---------------------------------------------------------------------------


def criterion_9(q_max: int = 10) -> Check:
    lev = Level(3, 2)
    bad = []
    count = 0
    for r in range(1, 5):
        for s in range(0, 4):
            for rho in (1, 2, 3):
                for sigma in range(1, 5):
                    if (sigma - r - 2 * s - rho + 1) % 2:
                        continue
                    count += 1
                    res = superconformal_branch(lev, r, s, rho, sigma, q_max)
                    if not res.ok:
                        bad.append((r, s, rho, sigma, res.checks))
    return not bad, f"{count} keys. {_fail_list(bad)}".strip()


# ---------------------------------------------------------------------------
# harness
# ---------------------------------------------------------------------------


CRITERIA: Dict[int, Tuple[str, float, Callable[[], Check]]] = {
    1: ("affine Kac tables", 1.0, criterion_1),
    2: ("staggered couplings", 30.0, criterion_2),
    3: ("reciprocal of the triple product", 10.0, criterion_3),
    4: ("branching rule and dual route", 120.0, criterion_4),
    5: ("residues and the functor square", 120.0, criterion_5),
    6: ("PBW dimension oracle", 30.0, criterion_6),
    7: ("singular vectors and identities", 30.0, criterion_7),
    8: ("string functions", 20.0, criterion_8),
    9: ("superconformal sum rule", 30.0, criterion_9),
}


def run_one(number: int) -> CriterionResult:
    title, budget, fn = CRITERIA[number]
    t0 = time.perf_counter()
    try:
        ok, detail = fn()
    except Exception as exc:  # a crash is a failure, reported as such
        ok, detail = False, f"error: {type(exc).__name__}: {exc}"
    return CriterionResult(number, title, ok, time.perf_counter() - t0, budget, detail)


def run(numbers: Optional[Sequence[int]] = None, jobs: int = 1) -> List[CriterionResult]:
    numbers = sorted(CRITERIA) if numbers is None else sorted(numbers)
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            return list(ex.map(run_one, numbers))
    return [run_one(n) for n in numbers]
