"""The twisted cubic of PG(3, q) and its chord/tangent structure.

The curve is {(1, t, t^2, t^3) : t in GF(q)} together with (0, 0, 0, 1).
Through every point off the curve passes exactly one of: a real chord
(joining two curve points), a tangent, or an imaginary chord (a line
rational over GF(q) whose contact points are conjugate over GF(q^2)).
``classify_all`` materializes that partition exhaustively and complains
loudly if any point has zero or two witnesses.
"""

from __future__ import annotations

from dataclasses import dataclass

from .gf import extension_embed, quadratic_extension
from .projgeom import PointSet, projective_space

__all__ = [
    "TwistedCubic",
    "ChordClassification",
    "twisted_cubic",
    "stabilizer_element",
    "FieldTooSmall",
    "SingularParameters",
    "ConditionUnsatisfied",
    "ClassificationError",
]


class FieldTooSmall(ValueError):
    pass


class SingularParameters(ValueError):
    pass


class ConditionUnsatisfied(ValueError):
    pass


class ClassificationError(RuntimeError):
    pass


@dataclass
class ChordClassification:
    kind: str  # "on_curve" | "real_chord" | "tangent" | "imaginary_chord"
    line: tuple  # sorted point indices of the witness line (or the curve point)
    contact: tuple  # curve parameters involved


def cubic_has_root(field, c2, c1, c0):
    """Whether T^3 + c2 T^2 + c1 T + c0 has a root in the field."""
    return smallest_cubic_root(field, c2, c1, c0) is not None


def smallest_cubic_root(field, c2, c1, c0):
    f = field
    for t in range(f.q):
        v = f.add(f.add(f.mul(t, f.mul(t, t)), f.mul(c2, f.mul(t, t))), f.add(f.mul(c1, t), c0))
        if v == 0:
            return t
    return None


class TwistedCubic:
    def __init__(self, field):
        if field.q < 5:
            raise FieldTooSmall("the stabilizer facts need q >= 5")
        self.field = field
        self.q = field.q
        self.space = projective_space(3, field)
        f = field
        self.points = PointSet(self.space)
        self.param_of_index = {}
        for t in range(self.q):
            idx = self.points.add((1, t, f.mul(t, t), f.mul(t, f.mul(t, t))))
            self.param_of_index[idx] = t
        idx = self.points.add((0, 0, 0, 1))
        self.param_of_index[idx] = None  # the point at infinity
        self._tangents = None
        self._real = None
        self._imaginary = None
        self._classification = None

    # -- attached structures ----------------------------------------------

    def point_of(self, t):
        f = self.field
        if t is None:
            return (0, 0, 0, 1)
        return (1, t, f.mul(t, t), f.mul(t, f.mul(t, t)))

    def tangent_direction(self, t):
        f = self.field
        if t is None:
            return (0, 0, 1, 0)
        return (0, 1, f.mul(f.scalar(2), t), f.mul(f.scalar(3), f.mul(t, t)))

    def tangent_lines(self):
        """(contact parameter, sorted index tuple) for each curve point."""
        if self._tangents is None:
            out = []
            for t in list(range(self.q)) + [None]:
                P = self.point_of(t)
                line = self.space.line_points(P, self.tangent_direction(t))
                key = tuple(sorted(self.space.point_index(x) for x in line))
                out.append((t, key))
            self._tangents = out
        return self._tangents

    def osculating_dual(self, t):
        """Dual of the osculating plane: t^3 X1 - 3t^2 X2 + 3t X3 - X4 = 0,
        and X1 = 0 at the infinite point."""
        f = self.field
        if t is None:
            return (1, 0, 0, 0)
        three = f.scalar(3)
        return self.space.normalize(
            (
                f.mul(t, f.mul(t, t)),
                f.neg(f.mul(three, f.mul(t, t))),
                f.mul(three, t),
                f.neg(1),
            )
        )

    def osculating_duals(self):
        return [(t, self.osculating_dual(t)) for t in list(range(self.q)) + [None]]

    def osculating_count(self, coords):
        """Number of osculating planes through a point."""
        P = self.space.normalize(coords)
        return sum(1 for _, h in self.osculating_duals() if self.field.dot(P, h) == 0)

    # -- chords -------------------------------------------------------------

    def real_chords(self):
        """(param pair, sorted index tuple); q(q+1)/2 lines."""
        if self._real is None:
            params = list(range(self.q)) + [None]
            out = []
            for i in range(len(params)):
                for j in range(i + 1, len(params)):
                    P = self.point_of(params[i])
                    Q = self.point_of(params[j])
                    line = self.space.line_points(P, Q)
                    key = tuple(sorted(self.space.point_index(x) for x in line))
                    out.append(((params[i], params[j]), key))
            self._real = out
        return self._real

    def imaginary_chords(self):
        """(extension parameter, sorted index tuple); q(q-1)/2 lines.

        The chord with contact parameters {t, t^q}, t in GF(q^2)\\GF(q),
        is rational: it is spanned by P_t + P_(t^q) and t*P_t + t^q*P_(t^q),
        whose coordinates are symmetric in the conjugate pair.
        """
        if self._imaginary is None:
            ext = quadratic_extension(self.field)
            emb = extension_embed(self.field, ext)
            out = []
            seen = set()
            for t in range(ext.q):
                tc = emb.conj(t)
                if tc == t or (tc, t) in seen:
                    continue
                seen.add((t, tc))
                pt = (1, t, ext.mul(t, t), ext.mul(t, ext.mul(t, t)))
                pc = (1, tc, ext.mul(tc, tc), ext.mul(tc, ext.mul(tc, tc)))
                r1 = tuple(ext.add(a, b) for a, b in zip(pt, pc))
                r2 = tuple(ext.add(ext.mul(t, a), ext.mul(tc, b)) for a, b in zip(pt, pc))
                R1 = tuple(emb.preimage(c) for c in r1)
                R2 = tuple(emb.preimage(c) for c in r2)
                line = self.space.line_points(R1, R2)
                key = tuple(sorted(self.space.point_index(x) for x in line))
                out.append((t, key))
            self._imaginary = out
        return self._imaginary

    # -- the chord/tangent partition ----------------------------------------

    def classify_all(self):
        """Witness (kind, line, contact) for every point, checked exhaustively.

        Raises ClassificationError unless every point off the curve lies
        on exactly one chord or tangent.
        """
        if self._classification is not None:
            return self._classification
        size = self.space.size
        witness = [None] * size
        clashes = []

        def mark(idx, record):
            if idx in self.points.index_set:
                return
            if witness[idx] is not None:
                clashes.append((idx, witness[idx], record))
            witness[idx] = record

        for contacts, key in self.real_chords():
            for idx in key:
                mark(idx, ChordClassification("real_chord", key, contacts))
        for t, key in self.tangent_lines():
            for idx in key:
                mark(idx, ChordClassification("tangent", key, (t,)))
        for t, key in self.imaginary_chords():
            for idx in key:
                mark(idx, ChordClassification("imaginary_chord", key, (t,)))
        for idx in self.points.index_set:
            witness[idx] = ChordClassification("on_curve", (idx,), (self.param_of_index[idx],))
        if clashes:
            raise ClassificationError(f"{len(clashes)} points with two witnesses")
        missing = [i for i, w in enumerate(witness) if w is None]
        if missing:
            raise ClassificationError(f"{len(missing)} points with no witness")
        self._classification = witness
        return witness

    def classify_point(self, coords):
        idx = self.space.point_index(coords)
        return self.classify_all()[idx]

    # -- distinguished points and parameters ----------------------------------

    def resolve_s(self):
        """The non-square used for the odd-q distinguished points: -3 when
        q = -1 mod 3 (then -3 is a non-square), else the smallest one."""
        f = self.field
        if f.p == 2:
            raise ConditionUnsatisfied("s is an odd-q parameter")
        if f.q % 3 == 2:
            s = f.neg(f.scalar(3))
            if f.is_square(s):
                raise ConditionUnsatisfied("-3 should be a non-square here")
            return s
        return f.pick_nonsquare()

    def resolve_delta(self):
        f = self.field
        if f.p != 2:
            raise ConditionUnsatisfied("delta is an even-q parameter")
        return f.pick_delta()

    def resolve_irreducible_lambda(self):
        """Smallest lam making the distinguished cubic irreducible:
        T^3 - 3 lam T^2 - 9 T + 3 lam (odd q), or
        T^3 + lam T^2 + (lam+1) T + 1 (even q)."""
        f = self.field
        if f.q % 3 != 2:
            raise ConditionUnsatisfied("needs q = -1 mod 3")
        for lam in range(f.q):
            if f.p == 2:
                ok = not cubic_has_root(f, lam, f.add(lam, 1), 1)
            else:
                three = f.scalar(3)
                ok = not cubic_has_root(
                    f, f.neg(f.mul(three, lam)), f.neg(f.scalar(9)), f.mul(three, lam)
                )
            if ok:
                return lam
        raise ConditionUnsatisfied("no irreducible parameter found")

    def named_point(self, kind):
        """Distinguished added points; returns (coords, params dict)."""
        f = self.field
        three = f.scalar(3)
        if kind == "U2":
            return (0, 1, 0, 0), {}
        if kind == "U1-U2":
            return (1, f.neg(1), 0, 0), {}
        if kind in ("Q", "Q1", "Q2", "Q5", "Q6"):
            s = self.resolve_s()
            pts = {
                "Q": (1, 0, s, 0),
                "Q1": (0, 1, 0, s),
                "Q2": (0, 1, 0, f.mul(f.scalar(9), s)),
                "Q5": (0, 1, three, 0),
                "Q6": (0, 1, f.neg(three), 0),
            }
            return pts[kind], {"s": s}
        if kind in ("S", "S1", "S2", "S4", "S5"):
            d = self.resolve_delta()
            pts = {
                "S": (1, 0, d, d),
                "S1": (0, 1, 1, f.add(d, 1)),
                "S2": (1, 0, d, f.add(d, 1)),
                "S4": (0, 0, 1, 1),
                "S5": (0, 0, 1, 0),
            }
            return pts[kind], {"delta": d}
        if kind == "R":
            lam = self.resolve_irreducible_lambda()
            if f.p == 2:
                return (1, lam, f.add(lam, 1), 1), {"lambda": lam}
            s = f.neg(three)
            return (1, lam, s, f.mul(lam, s)), {"lambda": lam, "s": s}
        raise ValueError(f"unknown point kind {kind!r}")


def twisted_cubic(field):
    return TwistedCubic(field)


def stabilizer_element(field, a, b, c, d):
    """The 4x4 matrix (acting on columns) induced by t -> (c + d t)/(a + b t).

    Sends (1, t, t^2, t^3) to the curve point with the mapped parameter;
    requires ad - bc != 0.
    """
    f = field
    if f.sub(f.mul(a, d), f.mul(b, c)) == 0:
        raise SingularParameters("ad - bc = 0")
    two, three = f.scalar(2), f.scalar(3)

    def m(*terms):
        acc = 0
        for t_ in terms:
            acc = f.add(acc, t_)
        return acc

    a2, b2, c2, d2 = (f.mul(x, x) for x in (a, b, c, d))
    a3, b3, c3, d3 = (f.mul(x, y) for x, y in ((a2, a), (b2, b), (c2, c), (d2, d)))
    return (
        (a3, f.mul(three, f.mul(a2, b)), f.mul(three, f.mul(a, b2)), b3),
        (
            f.mul(a2, c),
            m(f.mul(a2, d), f.mul(two, f.mul(a, f.mul(b, c)))),
            m(f.mul(b2, c), f.mul(two, f.mul(a, f.mul(b, d)))),
            f.mul(b2, d),
        ),
        (
            f.mul(a, c2),
            m(f.mul(b, c2), f.mul(two, f.mul(a, f.mul(c, d)))),
            m(f.mul(a, d2), f.mul(two, f.mul(b, f.mul(c, d)))),
            f.mul(b, d2),
        ),
        (c3, f.mul(three, f.mul(c2, d)), f.mul(three, f.mul(c, d2)), d3),
    )


def order3_line_cycler(field):
    """The printed order-3 stabilizer element cycling the three extension
    lines through the distinguished imaginary-chord point (q = -1 mod 3)."""
    f = field
    if f.p == 2:
        rows = ((0, 0, 0, 1), (0, 0, 1, 1), (0, 1, 0, 1), (1, 1, 1, 1))
        return tuple(tuple(f.scalar(x) for x in row) for row in rows)
    rows = (
        (1, 3, 3, 1),
        (-3, -5, -1, 1),
        (9, 3, -5, 1),
        (-27, 27, -9, 1),
    )
    return tuple(tuple(f.scalar(x) for x in row) for row in rows)


def apply_matrix(field, M, coords):
    return tuple(field.dot(M[i], coords) for i in range(len(M)))
