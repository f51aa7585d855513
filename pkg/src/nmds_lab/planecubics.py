"""Plane cubic curves, their trisecants, and trisecant-free point sets.

A ternary cubic is stored as 10 coefficients indexed by the monomials of
degree 3 in graded-lexicographic order on the exponent triples:

    X1^3, X1^2 X2, X1^2 X3, X1 X2^2, X1 X2 X3, X1 X3^2,
    X2^3, X2^2 X3, X2 X3^2, X3^3.

``a_set`` is the brute-force object: the points of PG(2, q) lying on no
line meeting the curve in exactly three points (a line not contained in
a cubic meets it in at most three points, so "at least three" and
"exactly three" agree, and any line with four or more forces a line
component).  Seven named singular-cubic families D1..D7 come with the
coordinate formulas for their trisecant-free sets, so the brute-force
set can be compared against the closed form case by case.

In the D6 family the X2^3 coefficient is lam + 1; that reading was
cross-checked by projecting the twisted cubic from the matching point
and fitting the (unique) cubic through the image points.
"""

from __future__ import annotations

from dataclasses import dataclass

from .projgeom import PointSet, projective_space

__all__ = [
    "MONOMIALS",
    "CubicForm",
    "make_curve",
    "trisecant_lines",
    "a_set",
    "verify_lemma_plane",
    "expected_a_set",
    "SideConditionViolated",
    "WrongCongruenceClass",
    "CurveContainsLine",
]

MONOMIALS = (
    (3, 0, 0),
    (2, 1, 0),
    (2, 0, 1),
    (1, 2, 0),
    (1, 1, 1),
    (1, 0, 2),
    (0, 3, 0),
    (0, 2, 1),
    (0, 1, 2),
    (0, 0, 3),
)
_MONOMIAL_INDEX = {m: i for i, m in enumerate(MONOMIALS)}


class SideConditionViolated(ValueError):
    pass


class WrongCongruenceClass(ValueError):
    pass


class CurveContainsLine(ValueError):
    pass


@dataclass
class CubicForm:
    field: object
    which: str
    coeffs: tuple  # 10 field elements in MONOMIALS order
    params: dict

    def evaluate(self, coords):
        f = self.field
        x1, x2, x3 = coords
        acc = 0
        for (e1, e2, e3), c in zip(MONOMIALS, self.coeffs):
            if not c:
                continue
            v = c
            for base, e in ((x1, e1), (x2, e2), (x3, e3)):
                for _ in range(e):
                    v = f.mul(v, base)
            acc = f.add(acc, v)
        return acc

    def curve_points(self):
        space = projective_space(2, self.field)
        out = PointSet(space)
        for i in range(space.size):
            if self.evaluate(space.point(i)) == 0:
                out.add(i, by_index=True)
        return out

    def describe(self):
        return {
            "curve": self.which,
            "q": self.field.q,
            "coeffs": [int(c) for c in self.coeffs],
            "params": {
                k: (int(v) if isinstance(v, int) else v)
                for k, v in self.params.items()
            },
        }


def _coeffs(field, terms):
    out = [0] * 10
    for mono, c in terms.items():
        out[_MONOMIAL_INDEX[mono]] = c
    return tuple(out)


def _root_of_cubic(field, c2, c1, c0):
    f = field
    for t in range(f.q):
        v = f.add(
            f.add(f.mul(t, f.mul(t, t)), f.mul(c2, f.mul(t, t))),
            f.add(f.mul(c1, t), c0),
        )
        if v == 0:
            return t
    return None


def congruence(q):
    """q mod 3 as one of 1, -1, 0."""
    r = q % 3
    return -1 if r == 2 else r


# ----------------------------------------------------------------------
# The named curves
# ----------------------------------------------------------------------

def make_curve(which, field, **params):
    """Build one of the curves D1..D7 with validated side conditions.

    Unset parameters resolve deterministically to the smallest field
    encodings satisfying the relevant side condition; everything used
    ends up in ``CubicForm.params``.
    """
    builder = {
        "D1": _build_d1,
        "D2": _build_d2,
        "D3": _build_d3,
        "D4": _build_d4,
        "D5": _build_d5,
        "D6": _build_d6,
        "D7": _build_d7,
    }.get(which)
    if builder is None:
        raise ValueError(f"unknown curve {which!r}")
    return builder(field, params)


def _build_d1(f, params):
    # X1 X3^2 - X2^3
    terms = {(1, 0, 2): 1, (0, 3, 0): f.neg(1)}
    return CubicForm(f, "D1", _coeffs(f, terms), {})


def _d2_family_lambda_xi(f, s, lam, xi):
    """Validate (lam, xi) for F(T) = T^3 + 3 lam T^2 + 3 s T + lam s."""
    three = f.scalar(3)
    c2, c1, c0 = f.mul(three, lam), f.mul(three, s), f.mul(lam, s)
    v = f.add(
        f.add(f.mul(xi, f.mul(xi, xi)), f.mul(c2, f.mul(xi, xi))),
        f.add(f.mul(c1, xi), c0),
    )
    if v != 0:
        raise SideConditionViolated("xi is not a root of the resolvent cubic")


def _resolve_d2_params(f, params):
    three = f.scalar(3)
    if "s" in params:
        s = params["s"] % f.q
    elif congruence(f.q) == -1:
        s = f.neg(three)
    else:
        s = f.pick_nonsquare()
    if f.is_square(s):
        raise SideConditionViolated("s must be a non-square")
    lam = params.get("lambda")
    xi = params.get("xi")
    if lam is None:
        for cand in range(f.q):
            root = _root_of_cubic(f, f.mul(three, cand), f.mul(three, s), f.mul(cand, s))
            if root is not None:
                lam, xi = cand, root if xi is None else xi
                break
        else:
            raise SideConditionViolated("no lambda with a reducible resolvent")
    elif xi is None:
        xi = _root_of_cubic(f, f.mul(three, lam), f.mul(three, s), f.mul(lam, s))
        if xi is None:
            raise SideConditionViolated("resolvent cubic has no root for this lambda")
    _d2_family_lambda_xi(f, s, lam, xi)
    return s, lam, xi


def _build_d2(f, params):
    # X2^2 (X3 - lam X2) - X1 (s X1 - X3)^2
    if f.p == 2:
        raise WrongCongruenceClass("D2 needs odd q")
    s, lam, xi = _resolve_d2_params(f, params)
    two = f.scalar(2)
    terms = {
        (0, 2, 1): 1,
        (0, 3, 0): f.neg(lam),
        (3, 0, 0): f.neg(f.mul(s, s)),
        (2, 0, 1): f.mul(two, s),
        (1, 0, 2): f.neg(1),
    }
    return CubicForm(f, "D2", _coeffs(f, terms), {"s": s, "lambda": lam, "xi": xi})


def _build_d3(f, params):
    # X2^2 (X3 - lam X2) - X1 (3 X1 + X3)^2, resolvent irreducible
    if f.p == 2 or congruence(f.q) != -1:
        raise WrongCongruenceClass("D3 needs odd q = -1 mod 3")
    three, nine, six = f.scalar(3), f.scalar(9), f.scalar(6)
    lam = params.get("lambda")
    if lam is None:
        for cand in range(f.q):
            if _root_of_cubic(
                f, f.mul(three, cand), f.neg(nine), f.neg(f.mul(three, cand))
            ) is None:
                lam = cand
                break
        else:
            raise SideConditionViolated("no lambda with irreducible resolvent")
    else:
        if _root_of_cubic(f, f.mul(three, lam), f.neg(nine), f.neg(f.mul(three, lam))) is not None:
            raise SideConditionViolated("resolvent cubic is reducible for this lambda")
    terms = {
        (0, 2, 1): 1,
        (0, 3, 0): f.neg(lam),
        (3, 0, 0): f.neg(nine),
        (2, 0, 1): f.neg(six),
        (1, 0, 2): f.neg(1),
    }
    return CubicForm(f, "D3", _coeffs(f, terms), {"lambda": lam})


def d4_valid_lambdas(f, count):
    """First ``count`` admissible lambdas for D4 (lambda not in {1, 1/2})."""
    bad = {1 % f.q, f.inv(f.scalar(2))}
    out = []
    for lam in range(f.q):
        if lam not in bad:
            out.append(lam)
        if len(out) == count:
            return out
    raise SideConditionViolated("field too small")


def _build_d4(f, params):
    if f.p == 2 or congruence(f.q) != -1:
        raise WrongCongruenceClass("D4 needs odd q = -1 mod 3")
    lam = params.get("lambda")
    if lam is None:
        lam = d4_valid_lambdas(f, 1)[0]
    if lam == 1 % f.q or lam == f.inv(f.scalar(2)):
        raise SideConditionViolated("lambda must avoid 1 and 1/2")
    lm1 = f.sub(lam, 1)
    lm1_2 = f.mul(lm1, lm1)
    lm1_3 = f.mul(lm1_2, lm1)
    lam2 = f.mul(lam, lam)
    a = f.add(f.sub(f.mul(f.scalar(3), lam2), f.mul(f.scalar(3), lam)), 1)  # 3l^2-3l+1
    b = f.add(f.sub(f.mul(f.scalar(2), lam2), f.mul(f.scalar(2), lam)), 1)  # 2l^2-2l+1
    terms = {
        (0, 3, 0): 1,
        (2, 0, 1): f.neg(f.mul(f.scalar(27), lm1_3)),
        (1, 0, 2): f.neg(a),
        (1, 1, 1): f.neg(f.mul(f.scalar(9), f.mul(lm1, b))),
        (0, 2, 1): f.neg(f.mul(lam, a)),
    }
    return CubicForm(f, "D4", _coeffs(f, terms), {"lambda": lam})


def _build_d5(f, params):
    # X2^3 + d(d+1) X1^2 X2 + d X1^2 X3 + X1 X3^2 + X1 X2 X3
    if f.p != 2:
        raise WrongCongruenceClass("D5 needs even q")
    delta = params.get("delta", f.pick_delta())
    if f.trace(delta) != 1:
        raise SideConditionViolated("delta must have trace 1")
    terms = {
        (0, 3, 0): 1,
        (2, 1, 0): f.mul(delta, f.add(delta, 1)),
        (2, 0, 1): delta,
        (1, 0, 2): 1,
        (1, 1, 1): 1,
    }
    return CubicForm(f, "D5", _coeffs(f, terms), {"delta": delta})


def _build_d6(f, params):
    # (d^2+d+lam) X1^3 + (lam+1) X2^3 + (d+lam) X1^2 X2 + lam X1 X2^2
    #   + X1 X3^2 + X1 X2 X3 + X2^2 X3
    if f.p != 2:
        raise WrongCongruenceClass("D6 needs even q")
    cong = congruence(f.q)
    mode = params.get("mode")
    if cong == -1:
        delta = params.get("delta", 1)
        if delta != 1:
            raise SideConditionViolated("this congruence class uses delta = 1")
        if mode not in ("reducible", "irreducible"):
            raise SideConditionViolated("mode must be 'reducible' or 'irreducible'")
        lam = params.get("lambda")
        xi = None
        if lam is None:
            for cand in range(f.q):
                root = _root_of_cubic(f, cand, f.add(cand, 1), 1)
                if (root is not None) == (mode == "reducible"):
                    lam = cand
                    xi = root
                    break
            else:
                raise SideConditionViolated(f"no lambda with {mode} cubic")
        else:
            xi = _root_of_cubic(f, lam, f.add(lam, 1), 1)
            if (xi is not None) != (mode == "reducible"):
                raise SideConditionViolated(f"lambda does not give a {mode} cubic")
        pars = {"delta": delta, "lambda": lam, "mode": mode}
        if mode == "reducible":
            pars["xi"] = xi
    else:
        delta = params.get("delta", f.pick_delta())
        if f.trace(delta) != 1:
            raise SideConditionViolated("delta must have trace 1")
        lam = params.get("lambda")
        xi = params.get("xi")
        if lam is None:
            for cand in range(f.q):
                root = _root_of_cubic(
                    f,
                    f.add(cand, 1),
                    f.add(f.add(delta, cand), 1),
                    f.add(f.add(f.mul(delta, cand), cand), 1),
                )
                if root is not None:
                    lam, xi = cand, root
                    break
            else:
                raise SideConditionViolated("no lambda with a root")
        elif xi is None:
            xi = _root_of_cubic(
                f,
                f.add(lam, 1),
                f.add(f.add(delta, lam), 1),
                f.add(f.add(f.mul(delta, lam), lam), 1),
            )
            if xi is None:
                raise SideConditionViolated("cubic has no root for this lambda")
        pars = {"delta": delta, "lambda": lam, "xi": xi, "mode": "root"}
    terms = {
        (3, 0, 0): f.add(f.add(f.mul(delta, delta), delta), lam),
        (0, 3, 0): f.add(lam, 1),
        (2, 1, 0): f.add(delta, lam),
        (1, 2, 0): lam,
        (1, 0, 2): 1,
        (1, 1, 1): 1,
        (0, 2, 1): 1,
    }
    return CubicForm(f, "D6", _coeffs(f, terms), pars)


def _build_d7(f, params):
    # X2^3 + X1 X3^2 + mu^3 X1^2 X3 + mu X1 X2 X3,  mu = (lam+1)/lam
    if f.p != 2 or congruence(f.q) != -1:
        raise WrongCongruenceClass("D7 needs even q = -1 mod 3")
    lam = params.get("lambda")
    if lam is None:
        lam = next(x for x in range(f.q) if x not in (0, 1))
    if lam in (0, 1):
        raise SideConditionViolated("lambda must avoid 0 and 1")
    mu = f.div(f.add(lam, 1), lam)
    terms = {
        (0, 3, 0): 1,
        (1, 0, 2): 1,
        (2, 0, 1): f.mul(mu, f.mul(mu, mu)),
        (1, 1, 1): mu,
    }
    return CubicForm(f, "D7", _coeffs(f, terms), {"lambda": lam, "mu": mu})


# ----------------------------------------------------------------------
# Trisecants and the trisecant-free set
# ----------------------------------------------------------------------

def trisecant_lines(curve):
    """Dual vectors of all lines meeting the curve in exactly 3 points.

    A line with 4 or more curve points would be a component of the
    cubic; that raises CurveContainsLine.
    """
    space = projective_space(2, curve.field)
    pts = curve.curve_points()
    counts = space.incidence_counts(space.points(), pts.coord_array())
    if (counts > 3).any():
        raise CurveContainsLine("the cubic contains a full line")
    import numpy as np

    return [tuple(int(c) for c in space.points()[i]) for i in np.nonzero(counts == 3)[0]]


def a_set(curve):
    """All points of PG(2, q) lying on no trisecant of the curve."""
    import numpy as np

    space = projective_space(2, curve.field)
    marked = np.zeros(space.size, dtype=bool)
    for dual in trisecant_lines(curve):
        marked[space.hyperplane_points(dual)] = True
    free = np.nonzero(~marked)[0]
    return PointSet(space, [int(i) for i in free], by_index=True)


# ----------------------------------------------------------------------
# Closed-form trisecant-free sets, case by case
# ----------------------------------------------------------------------

def expected_a_set(curve):
    """The closed-form point list for the curve's congruence case.

    Returns (PointSet, case-label, notes).
    """
    f = curve.field
    space = projective_space(2, f)
    cong = congruence(f.q)
    which = curve.which
    p = curve.params
    notes = []
    if which == "D1":
        if cong == 1:
            pts, case = [(1, 0, 0)], "q = 1 mod 3"
        elif cong == -1:
            pts, case = [(1, 0, 0), (0, 1, 0)], "q = -1 mod 3"
        else:
            pts = [(1, 0, 0)] + [
                (a, 1, 0) for a in range(f.q) if a == 0 or not f.is_square(a)
            ]
            case = "q = 0 mod 3"
    elif which == "D2":
        s, xi = p["s"], p["xi"]
        three, nine = f.scalar(3), f.scalar(9)
        xi2 = f.mul(xi, xi)
        if cong != -1:
            den = f.add(f.mul(three, xi2), s)
            pts = [
                (
                    1,
                    f.neg(f.div(f.mul(f.scalar(8), f.mul(s, xi)), den)),
                    f.div(f.mul(f.mul(three, s), f.add(xi2, f.mul(three, s))), den),
                ),
                (1, 0, s),
            ]
            case = "q != -1 mod 3"
        else:
            if s != f.neg(three):
                raise SideConditionViolated("this case needs s = -3")
            den = f.sub(xi2, 1)
            pts = [
                (
                    1,
                    f.div(f.mul(f.scalar(8), xi), den),
                    f.div(f.mul(three, f.sub(nine, xi2)), den),
                ),
                (1, 0, f.neg(three)),
            ]
            for sign in (1, -1):
                up, dn = f.scalar(sign), f.scalar(-sign)
                # ((xi -+ 3)(1 +- xi)/(1 -+ xi), 3 xi (xi +- 3)/(1 -+ xi))
                num2 = f.mul(
                    f.add(xi, f.mul(dn, three)), f.add(1, f.mul(up, xi))
                )
                den2 = f.add(1, f.mul(dn, xi))
                num3 = f.mul(f.mul(three, xi), f.add(xi, f.mul(up, three)))
                pts.append((1, f.div(num2, den2), f.div(num3, den2)))
            case = "q = -1 mod 3, s = -3"
    elif which == "D3":
        pts, case = [(1, 0, f.neg(f.scalar(3)))], "irreducible resolvent"
    elif which == "D4":
        lam = p["lambda"]
        lm1 = f.sub(lam, 1)
        lm1_2, lam2 = f.mul(lm1, lm1), f.mul(lam, lam)
        lm1_3 = f.mul(lm1_2, lm1)
        a = f.add(f.sub(f.mul(f.scalar(3), lam2), f.mul(f.scalar(3), lam)), 1)
        pts = [
            (
                f.mul(a, a),
                f.neg(f.mul(f.scalar(9), f.mul(lm1_2, a))),
                f.mul(f.scalar(27), lm1_3),
            ),
            (1, f.neg(f.scalar(3)), 0),
            (
                lam2,
                f.neg(f.mul(f.scalar(3), f.add(f.sub(lam2, lam), 1))),
                f.mul(f.scalar(27), lm1),
            ),
            (lam2, f.neg(f.mul(f.scalar(3), lm1_2)), 0),
        ]
        case = "generic lambda"
    elif which == "D5":
        d = p["delta"]
        if cong == 1:
            pts, case = [(1, d, f.add(d, 1)), (1, d, d)], "q = 1 mod 3"
            notes.append("this congruence case is stated for q >= 64")
        else:
            b = next(
                (
                    x
                    for x in range(f.q)
                    if f.add(f.add(f.mul(x, x), x), f.add(d, 1)) == 0
                ),
                None,
            )
            if b is None:
                raise SideConditionViolated("no b with b^2 + b + delta + 1 = 0")
            pts = [(0, 1, b), (0, 1, f.add(b, 1)), (1, d, f.add(d, 1)), (1, d, d)]
            case = "q = -1 mod 3"
    elif which == "D6":
        lam = p["lambda"]
        d = p["delta"]
        if cong == -1 and p["mode"] == "irreducible":
            pts, case = [(1, 1, 0)], "q = -1 mod 3, irreducible"
        elif cong == -1:
            xi = p["xi"]
            xi2 = f.mul(xi, xi)
            xp1 = f.add(xi, 1)
            s1 = f.add(f.add(xi2, xi), 1)
            pts = [
                (
                    1,
                    f.div(s1, f.mul(xi, xp1)),
                    f.div(
                        f.add(f.add(f.mul(xi2, lam), f.mul(xi, lam)), 1),
                        f.mul(xi2, f.add(xi2, 1)),
                    ),
                ),
                (
                    1,
                    f.div(s1, xi),
                    f.div(
                        f.mul(f.add(xi2, 1), f.add(f.add(xi2, f.mul(xi, lam)), 1)),
                        xi2,
                    ),
                ),
                (
                    1,
                    f.div(s1, xp1),
                    f.div(
                        f.mul(xi2, f.add(f.add(xi2, f.mul(xi, lam)), lam)),
                        f.add(xi2, 1),
                    ),
                ),
                (1, 1, 0),
            ]
            case = "q = -1 mod 3, reducible"
        else:
            xi = p["xi"]
            xi2 = f.mul(xi, xi)
            # tail term is delta^2 + 1: cross-checked by brute force over
            # many (delta, lambda) instances; equals delta + 1 iff delta = 1
            pts = [
                (
                    f.add(f.add(f.add(xi2, xi), d), 1),
                    f.add(f.add(xi2, xi), d),
                    f.add(
                        f.add(f.mul(f.add(d, 1), xi2), f.mul(d, xi)),
                        f.add(f.mul(d, d), 1),
                    ),
                ),
                (1, 1, f.add(d, 1)),
            ]
            case = "q = 1 mod 3"
            notes.append("this congruence case is stated for q >= 64")
    elif which == "D7":
        mu = p["mu"]
        mu2 = f.mul(mu, mu)
        pts = [
            (0, 1, 0),
            (1, mu2, 0),
            (0, 1, mu),
            (1, mu2, f.mul(mu, mu2)),
        ]
        case = "generic lambda"
    else:
        raise ValueError(f"unknown curve {which!r}")
    out = PointSet(space, pts)
    return out, case, notes


def verify_lemma_plane(field, which, **params):
    """Brute-force trisecant-free set vs the closed form for one curve.

    Returns a dict with the curve description, both point lists (sorted
    canonical coordinates), and the match flag.
    """
    curve = make_curve(which, field, **params)
    computed = a_set(curve)
    expected, case, notes = expected_a_set(curve)
    return {
        "curve": curve.describe(),
        "case": case,
        "notes": notes,
        "expected": expected.to_json(),
        "computed": computed.to_json(),
        "expected_size": len(expected),
        "computed_size": len(computed),
        "match": expected == computed,
    }
