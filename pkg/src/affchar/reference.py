"""Published values transcribed by hand, used as fixed references by the
acceptance checks.  Nothing here is computed."""

from fractions import Fraction
from typing import Dict, List, Tuple


def _rows(text: str) -> Dict[int, List[Fraction]]:
    out = {}
    for line in text.strip().splitlines():
        s, rest = line.split(":")
        out[int(s)] = [Fraction(x) for x in rest.split()]
    return out


# Extended affine Kac tables of j_{r,s}.  Upper quadrant: r = 1..6 left to
# right, rows s = 0..5.  Lower quadrant: r = -6..-1 left to right, rows
# s = -1..-5.
FIGURE1: Dict[Tuple[int, int], Dict[str, object]] = {
    (2, 3): {
        "upper": _rows("""
            0: 0 1/2 1 3/2 2 5/2
            1: -1/3 1/6 2/3 7/6 5/3 13/6
            2: -2/3 -1/6 1/3 5/6 4/3 11/6
            3: -1 -1/2 0 1/2 1 3/2
            4: -4/3 -5/6 -1/3 1/6 2/3 7/6
            5: -5/3 -7/6 -2/3 -1/6 1/3 5/6
        """),
        "lower": _rows("""
            -1: -19/6 -8/3 -13/6 -5/3 -7/6 -2/3
            -2: -17/6 -7/3 -11/6 -4/3 -5/6 -1/3
            -3: -5/2 -2 -3/2 -1 -1/2 0
            -4: -13/6 -5/3 -7/6 -2/3 -1/6 1/3
            -5: -11/6 -4/3 -5/6 -1/3 1/6 2/3
        """),
        # shaded quadrants (irreducible affine Kac modules)
        "irreducible": {(r, s) for r in (2, 4, 6) for s in (0, 1, 2)}
                       | {(r, s) for r in (-2, -4, -6) for s in (-1, -2, -3)},
        # thick frame
        "admissible": {(1, 0), (1, 1), (1, 2)},
    },
    (3, 2): {
        "upper": _rows("""
            0: 0 1/2 1 3/2 2 5/2
            1: -3/4 -1/4 1/4 3/4 5/4 7/4
            2: -3/2 -1 -1/2 0 1/2 1
            3: -9/4 -7/4 -5/4 -3/4 -1/4 1/4
            4: -3 -5/2 -2 -3/2 -1 -1/2
            5: -15/4 -13/4 -11/4 -9/4 -7/4 -5/4
        """),
        "lower": _rows("""
            -1: -11/4 -9/4 -7/4 -5/4 -3/4 -1/4
            -2: -2 -3/2 -1 -1/2 0 1/2
            -3: -5/4 -3/4 -1/4 1/4 3/4 5/4
            -4: -1/2 0 1/2 1 3/2 2
            -5: 1/4 3/4 5/4 7/4 9/4 11/4
        """),
        "irreducible": {(r, s) for r in (3, 6) for s in (0, 1)}
                       | {(r, s) for r in (-3, -6) for s in (-1, -2)},
        "admissible": {(1, 0), (1, 1), (2, 0), (2, 1)},
    },
}

# Logarithmic couplings of the two worked staggered examples.
STAGGERED_EXAMPLES = {
    "I": {"eta": Fraction(0), "beta": Fraction(-4480, 19683)},
    "II": {"eta_over_mu": Fraction(1), "delta_over_mu": Fraction(-1), "beta": Fraction(-1)},
}
