"""The symplectic space W(3, q), its ovoids, and the parabolic quadric Q(4, q).

W(3, q) is PG(3, q) equipped with the alternating form

    B(x, y) = x1*y4 + x4*y1 + x2*y3 + x3*y2;

its generators are the totally isotropic lines.  An ovoid is a set of
q^2 + 1 points met by every generator exactly once.  Since through each
point pass q + 1 generators and there are (q+1)(q^2+1) of them, a set
of q^2 + 1 points is an ovoid iff no two of its points are conjugate
(B = 0): counting incidences then forces every generator to be hit.

Q(4, q) is the quadric X1*X5 + X2*X4 + X3^2 = 0 of PG(4, q).  For q
even it has nucleus U3, and projecting from U3 onto the hyperplane
X3 = 0 maps its points and lines bijectively onto the points and
generators of a W(3, q) in the retained coordinates.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

import numpy as np

from .gf import NotSuzukiField
from .projgeom import PointSet, projective_space

__all__ = [
    "SymplecticSpace",
    "ParabolicQuadric",
    "Ovoid",
    "symplectic_space",
    "parabolic_quadric",
    "intersect_ovoids",
    "build_cap",
    "cap_from_seed",
    "AmbientMismatch",
    "ProjectingNucleus",
]


class AmbientMismatch(ValueError):
    pass


class ProjectingNucleus(ValueError):
    pass


@dataclass
class Ovoid:
    kind: str  # "elliptic" or "suzuki_tits"
    points: PointSet
    ambient: str  # "W" or "Q4"
    params: dict

    def __len__(self):
        return len(self.points)


class SymplecticSpace:
    """W(3, q) with the fixed alternating form above."""

    def __init__(self, field):
        self.field = field
        self.q = field.q
        self.space = projective_space(3, field)
        # form(x, y) = x . J y with J the permutation 1<->4, 2<->3
        self.J = ((0, 0, 0, 1), (0, 0, 1, 0), (0, 1, 0, 0), (1, 0, 0, 0))
        self._generators = None
        self._suzuki = None
        self._elliptic = {}

    def form(self, x, y):
        f = self.field
        return f.add(
            f.add(f.mul(x[0], y[3]), f.mul(x[3], y[0])),
            f.add(f.mul(x[1], y[2]), f.mul(x[2], y[1])),
        )

    def polar_plane(self, P):
        """Dual vector of the polar plane of P; P always lies on it."""
        P = self.space.normalize(P)
        return self.space.normalize((P[3], P[2], P[1], P[0]))

    # -- generators -------------------------------------------------------

    def generators(self):
        """All totally isotropic lines, as sorted point-index tuples."""
        if self._generators is not None:
            return self._generators
        space = self.space
        f = self.field
        seen = set()
        out = []
        for i in range(space.size):
            P = space.point(i)
            h = self.polar_plane(P)
            # a basis of the polar plane: e_j - (h_j / h_k) e_k for j != k
            k = next(j for j, c in enumerate(h) if c)
            basis = []
            for j in range(4):
                if j == k:
                    continue
                v = [0, 0, 0, 0]
                v[j] = 1
                v[k] = f.neg(f.div(h[j], h[k]))
                basis.append(tuple(v))
            # two basis vectors independent of P span the directions
            w = None
            for a in range(3):
                for b in range(a + 1, 3):
                    if space.rank([P, basis[a], basis[b]]) == 3:
                        w = (basis[a], basis[b])
                        break
                if w:
                    break
            w1, w2 = w
            dirs = [w2] + [
                tuple(f.add(x, f.mul(c, y)) for x, y in zip(w1, w2))
                for c in range(self.q)
            ]
            for d in dirs:
                line = space.line_points(P, space.normalize(d))
                key = tuple(sorted(space.point_index(pt) for pt in line))
                if key not in seen:
                    seen.add(key)
                    out.append(key)
        out.sort()
        self._generators = out
        return out

    # -- ovoids -----------------------------------------------------------

    def is_ovoid(self, ps):
        """Ovoid test via the pairwise-conjugacy criterion (see module doc)."""
        if len(ps) != self.q * self.q + 1:
            return False
        coords = ps.coords()
        for i in range(len(coords)):
            for j in range(i + 1, len(coords)):
                if self.form(coords[i], coords[j]) == 0:
                    return False
        return True

    def is_ovoid_by_generators(self, ps):
        """Literal definition: every generator meets the set exactly once."""
        return all(
            sum(1 for i in g if i in ps.index_set) == 1 for g in self.generators()
        )

    def suzuki_ovoid(self):
        """The Suzuki-Tits ovoid x2*x3 + x2^(sigma+2) + x3^sigma + x4 = 0, with U4."""
        if self._suzuki is not None:
            return self._suzuki
        f = self.field
        if f.r is None or f.r < 1:
            raise NotSuzukiField(f"GF({f.q}) is not GF(2^(2r+1)) with r >= 1")
        pts = PointSet(self.space)
        for x2 in range(self.q):
            s2 = f.suzuki_sigma(x2)
            x2_s2 = f.mul(s2, f.mul(x2, x2))  # x2^(sigma+2)
            for x3 in range(self.q):
                x4 = f.add(f.add(f.mul(x2, x3), x2_s2), f.suzuki_sigma(x3))
                pts.add((1, x2, x3, x4))
        pts.add((0, 0, 0, 1))
        ov = Ovoid("suzuki_tits", pts, "W", {"q": self.q})
        assert self.is_ovoid(pts), "construction is broken"
        self._suzuki = ov
        return ov

    def elliptic_ovoid(self, delta=None):
        """Zero set of x1*x4 + x2^2 + x2*x3 + delta*x3^2, Tr(delta) = 1.

        The polar form of this quadric is exactly the symplectic form of
        the space, so its q^2 + 1 points form an ovoid of W(3, q); that
        is checked, not assumed.
        """
        f = self.field
        if f.p != 2:
            raise NotSuzukiField("the elliptic ovoid construction here is for even q")
        if delta is None:
            delta = f.pick_delta()
        if f.trace(delta) != 1:
            raise ValueError("delta must have absolute trace 1")
        if delta in self._elliptic:
            return self._elliptic[delta]
        pts = PointSet(self.space)
        # x1 = 0: x2^2 + x2 x3 + delta x3^2 irreducible => x2 = x3 = 0: U4.
        pts.add((0, 0, 0, 1))
        for x2 in range(self.q):
            for x3 in range(self.q):
                x4 = f.add(
                    f.add(f.mul(x2, x2), f.mul(x2, x3)),
                    f.mul(delta, f.mul(x3, x3)),
                )
                pts.add((1, x2, x3, x4))
        ov = Ovoid("elliptic", pts, "W", {"q": self.q, "delta": delta})
        if not self.is_ovoid(pts):
            raise RuntimeError("elliptic construction did not yield an ovoid")
        self._elliptic[delta] = ov
        return ov

    # -- symplectic transformations ----------------------------------------

    def transvection_matrix(self, v, c):
        """I + c * outer(v, Jv): the symplectic transvection along v."""
        f = self.field
        Jv = [self.form_row(v)[j] for j in range(4)]
        M = [[f.mul(c, f.mul(v[i], Jv[j])) for j in range(4)] for i in range(4)]
        for i in range(4):
            M[i][i] = f.add(M[i][i], 1)
        return tuple(tuple(row) for row in M)

    def form_row(self, v):
        """J v, so that form(x, v) = sum_i x_i (Jv)_i."""
        return (v[3], v[2], v[1], v[0])

    def preserves_form(self, M):
        """Exact matrix check M^T J M = J."""
        f = self.field
        JM = [
            [f.dot(self.J[i], [M[k][j] for k in range(4)]) for j in range(4)]
            for i in range(4)
        ]
        MtJM = [
            [f.dot([M[k][i] for k in range(4)], [JM[k][j] for k in range(4)]) for j in range(4)]
            for i in range(4)
        ]
        return MtJM == [list(r) for r in self.J]

    def apply_matrix(self, M, coords):
        f = self.field
        return tuple(f.dot(M[i], coords) for i in range(4))

    def mat_mul(self, A, B):
        f = self.field
        return tuple(
            tuple(f.dot(A[i], [B[k][j] for k in range(4)]) for j in range(4))
            for i in range(4)
        )

    def random_symplectic_matrix(self, seed, rounds=12):
        """Seeded product of symplectic transvections; exactly form-preserving."""
        f = self.field
        rng = random.Random(seed)
        M = tuple(tuple(1 if i == j else 0 for j in range(4)) for i in range(4))
        for _ in range(rounds):
            v = (0, 0, 0, 0)
            while not any(v):
                v = tuple(rng.randrange(self.q) for _ in range(4))
            c = rng.randrange(1, self.q)
            M = self.mat_mul(self.transvection_matrix(v, c), M)
        if not self.preserves_form(M):
            raise RuntimeError("transvection product lost the form")
        return M

    def random_symplectic_image(self, ovoid, seed):
        """Image of an ovoid under a seeded symplectic collineation."""
        M = self.random_symplectic_matrix(seed)
        pts = PointSet(self.space)
        for P in ovoid.points.coords():
            pts.add(self.apply_matrix(M, P))
        params = dict(ovoid.params)
        params["seed"] = seed
        return Ovoid(ovoid.kind, pts, "W", params)


def intersect_ovoids(a, b):
    if a.ambient != b.ambient or a.points.space is not b.points.space:
        raise AmbientMismatch("ovoids live in different spaces")
    return a.points.intersection(b.points)


class ParabolicQuadric:
    """Q(4, q): X1*X5 + X2*X4 + X3^2 = 0 in PG(4, q), nucleus U3 (q even)."""

    def __init__(self, field):
        self.field = field
        self.q = field.q
        self.space = projective_space(4, field)
        self.nucleus = self.space.point_index((0, 0, 1, 0, 0))
        self._point_mask = None
        self._points = None

    def gram_value(self, x):
        f = self.field
        return f.add(
            f.add(f.mul(x[0], x[4]), f.mul(x[1], x[3])), f.mul(x[2], x[2])
        )

    def polar_form(self, x, y):
        """Q(x+y) - Q(x) - Q(y); two quadric points are collinear on the
        quadric iff this vanishes."""
        f = self.field
        acc = f.add(f.mul(x[0], y[4]), f.mul(x[4], y[0]))
        acc = f.add(acc, f.add(f.mul(x[1], y[3]), f.mul(x[3], y[1])))
        two = f.scalar(2)
        if two:
            acc = f.add(acc, f.mul(two, f.mul(x[2], y[2])))
        return acc

    def point_mask(self):
        if self._point_mask is None:
            t = self.field.np_tables()
            pts = self.space.points()
            MUL, ADD = t["MUL"], t["ADD"]
            val = ADD[
                ADD[MUL[pts[:, 0], pts[:, 4]], MUL[pts[:, 1], pts[:, 3]]],
                MUL[pts[:, 2], pts[:, 2]],
            ]
            self._point_mask = val == 0
        return self._point_mask

    def points(self):
        """PointSet of the quadric, in index order."""
        if self._points is None:
            idx = np.nonzero(self.point_mask())[0]
            self._points = PointSet(self.space, [int(i) for i in idx], by_index=True)
        return self._points

    def on_quadric(self, coords):
        return self.gram_value(self.space.normalize(coords)) == 0

    # -- nucleus projection onto X3 = 0 ------------------------------------

    def project_point(self, coords):
        """Projection from the nucleus onto X3 = 0, as a PG(3, q) point."""
        c = self.space.normalize(coords)
        out = (c[0], c[1], c[3], c[4])
        if not any(out):
            raise ProjectingNucleus("cannot project the nucleus")
        return out

    def lift_w_point(self, coords):
        """Inverse of the projection, restricted to the quadric (q even)."""
        f = self.field
        z1, z2, z3, z4 = coords
        y = f.sqrt(f.add(f.mul(z1, z4), f.mul(z2, z3)))
        return (z1, z2, y, z3, z4)

    def w_space(self):
        return symplectic_space(self.field)

    def project_ovoid(self, ovoid):
        w = self.w_space()
        pts = PointSet(w.space)
        for P in ovoid.points.coords():
            pts.add(self.project_point(P))
        return Ovoid(ovoid.kind, pts, "W", dict(ovoid.params))

    def lift_ovoid(self, w_ovoid):
        pts = PointSet(self.space)
        for P in w_ovoid.points.coords():
            pts.add(self.lift_w_point(P))
        ov = Ovoid(w_ovoid.kind, pts, "Q4", dict(w_ovoid.params))
        if not self.is_ovoid(ov.points):
            raise RuntimeError("lift of a W-ovoid must be a Q4-ovoid")
        return ov

    # -- ovoids -------------------------------------------------------------

    def is_ovoid(self, ps):
        """q^2+1 points of the quadric, no two collinear on the quadric."""
        if len(ps) != self.q * self.q + 1:
            return False
        coords = ps.coords()
        for c in coords:
            if self.gram_value(c) != 0:
                return False
        for i in range(len(coords)):
            for j in range(i + 1, len(coords)):
                if self.polar_form(coords[i], coords[j]) == 0:
                    return False
        return True

    def generators(self):
        """All lines of the quadric (feasible for small q)."""
        space = self.space
        qpts = self.points()
        idx = list(qpts.indices)
        coords = qpts.coords()
        seen = set()
        out = []
        for i in range(len(idx)):
            for j in range(i + 1, len(idx)):
                if self.polar_form(coords[i], coords[j]) == 0:
                    key = tuple(
                        sorted(
                            space.point_index(p)
                            for p in space.line_points(coords[i], coords[j])
                        )
                    )
                    if key not in seen:
                        seen.add(key)
                        out.append(key)
        out.sort()
        return out

    def suzuki_ovoid(self):
        """x4 = x2^(sigma+1) + x3^sigma, x5 = x2*x3^sigma + x2^(sigma+2) + x3^2,
        together with U5."""
        f = self.field
        if f.r is None or f.r < 1:
            raise NotSuzukiField(f"GF({f.q}) is not GF(2^(2r+1)) with r >= 1")
        pts = PointSet(self.space)
        for x2 in range(self.q):
            s2 = f.suzuki_sigma(x2)
            for x3 in range(self.q):
                s3 = f.suzuki_sigma(x3)
                x4 = f.add(f.mul(s2, x2), s3)
                x5 = f.add(
                    f.add(f.mul(x2, s3), f.mul(s2, f.mul(x2, x2))),
                    f.mul(x3, x3),
                )
                P = (1, x2, x3, x4, x5)
                assert self.gram_value(P) == 0
                pts.add(P)
        pts.add((0, 0, 0, 0, 1))
        ov = Ovoid("suzuki_tits", pts, "Q4", {"q": self.q})
        assert self.is_ovoid(pts), "construction is broken"
        return ov

    def elliptic_section(self):
        """First hyperplane (in enumeration order) cutting the quadric in
        q^2 + 1 points; returns (Ovoid, dual-vector)."""
        space = self.space
        qarr = self.points().coord_array()
        target = self.q * self.q + 1
        duals = space.points()
        step = 4096
        for lo in range(0, space.size, step):
            counts = space.incidence_counts(duals[lo : lo + step], qarr)
            hits = np.nonzero(counts == target)[0]
            if len(hits):
                dual = tuple(int(c) for c in duals[lo + hits[0]])
                pts = PointSet(self.space)
                mask = self.point_mask()
                on = space.hyperplane_points(dual)
                for i in on:
                    if mask[i]:
                        pts.add(int(i), by_index=True)
                ov = Ovoid("elliptic", pts, "Q4", {"q": self.q, "hyperplane": list(dual)})
                if not self.is_ovoid(pts):
                    raise RuntimeError("elliptic section is not an ovoid")
                return ov, dual
        raise RuntimeError("no elliptic hyperplane section found")

    def hyperplane_section_sizes(self):
        """Histogram of |H ∩ Q| over all hyperplanes (small q only)."""
        space = self.space
        qarr = self.points().coord_array()
        if space.size * len(qarr) > 300_000_000:
            raise ValueError("section-size scan too large")
        hist = {}
        step = max(1, 20_000_000 // len(qarr))
        duals = space.points()
        for lo in range(0, space.size, step):
            counts = space.incidence_counts(duals[lo : lo + step], qarr)
            vals, freq = np.unique(counts, return_counts=True)
            for v, f_ in zip(vals, freq):
                hist[int(v)] = hist.get(int(v), 0) + int(f_)
        return hist

    def secant_profile(self, ovoid):
        """Per-point count of secant lines to the ovoid, classified.

        Counts, for every point of PG(4, q) off the quadric and distinct
        from the nucleus, the number of lines through it meeting the
        ovoid in exactly 2 points; computed by marking the points of the
        q^2(q^2+1)/2 secants.
        """
        from .verify import secant_cover

        if ovoid.ambient != "Q4":
            raise AmbientMismatch("need a Q4 ovoid")
        counts = secant_cover(ovoid.points, counts=True)
        mask = ~self.point_mask()
        mask[self.nucleus] = False
        profile = {}
        vals, freq = np.unique(counts[mask], return_counts=True)
        for v, f_ in zip(vals, freq):
            profile[int(v)] = int(f_)
        return profile


_W_SPACES = {}
_QUADRICS = {}


def symplectic_space(field):
    if field not in _W_SPACES:
        _W_SPACES[field] = SymplecticSpace(field)
    return _W_SPACES[field]


def parabolic_quadric(field):
    if field not in _QUADRICS:
        _QUADRICS[field] = ParabolicQuadric(field)
    return _QUADRICS[field]


def build_cap(e_prime, t_prime, quadric):
    """The union of two Q(4, q) ovoids and the nucleus."""
    if e_prime.ambient != "Q4" or t_prime.ambient != "Q4":
        raise AmbientMismatch("cap construction needs two Q4 ovoids")
    if e_prime.points.space is not t_prime.points.space:
        raise AmbientMismatch("ovoids live in different spaces")
    cap = e_prime.points.union(t_prime.points)
    cap.add(quadric.nucleus, by_index=True)
    return cap


def cap_from_seed(field, seed):
    """Cap built from the fixed Suzuki-Tits ovoid and a seeded elliptic one.

    The elliptic ovoid of W(3, q) is moved by a seeded symplectic
    collineation and lifted onto the quadric, where it spans a
    hyperplane; the cap is its union with the fixed Suzuki-Tits ovoid
    and the nucleus.
    """
    quad = parabolic_quadric(field)
    w = symplectic_space(field)
    ell = w.elliptic_ovoid()
    if seed is not None:
        ell = w.random_symplectic_image(ell, seed)
    e_prime = quad.lift_ovoid(ell)
    t_prime = quad.suzuki_ovoid()
    cap = build_cap(e_prime, t_prime, quad)
    meta = {
        "q": field.q,
        "seed": seed,
        "elliptic_delta": ell.params.get("delta"),
        "intersection": len(intersect_ovoids(e_prime, t_prime)),
        "size": len(cap),
    }
    return cap, quad, meta
