"""Points, lines, hyperplanes and rank in PG(n, q), n in {2, 3, 4}.

Points are canonical homogeneous coordinate tuples: field elements as
integers, scaled so the first nonzero coordinate is 1.  Every canonical
point has an integer encoding (base-q digits, first coordinate most
significant) and enumeration is by increasing encoding, which gives a
closed-form bijection between points and indices in [0, |PG(n, q)|).
That bijection is what the coverage bitmaps in :mod:`nmds_lab.verify`
are keyed on.

Dual vectors (hyperplanes) use the same canonical form; P lies on H iff
sum_i P_i * H_i = 0 in the field.
"""

from __future__ import annotations

import numpy as np

__all__ = [
    "ProjectiveSpace",
    "PointSet",
    "projective_space",
    "TooLarge",
    "DegenerateSpan",
]

MAX_POINTS = 2_200_000


class TooLarge(ValueError):
    pass


class DegenerateSpan(ValueError):
    pass


def num_points(n, q):
    return (q ** (n + 1) - 1) // (q - 1)


def num_lines(n, q):
    """Gaussian binomial [n+1 choose 2]_q."""
    return ((q ** (n + 1) - 1) * (q ** n - 1)) // ((q * q - 1) * (q - 1))


class ProjectiveSpace:
    """PG(n, q) over a :class:`~nmds_lab.gf.FiniteField`."""

    def __init__(self, n, field):
        if n not in (2, 3, 4):
            raise ValueError("only PG(2..4, q) is supported")
        N = num_points(n, field.q)
        if N > MAX_POINTS:
            raise TooLarge(f"PG({n}, {field.q}) has {N} points")
        self.n = n
        self.field = field
        self.q = field.q
        self.size = N
        q = field.q
        # index(P) = offset[lead] + encoding(P), lead = position of the
        # first nonzero coordinate.
        self._pow = [q ** (n - i) for i in range(n + 1)]
        self._offset = [
            (q ** (n - i) - 1) // (q - 1) - q ** (n - i) for i in range(n + 1)
        ]
        self._points = None
        self._np_offset = np.asarray(self._offset, dtype=np.int64)
        self._np_pow = np.asarray(self._pow, dtype=np.int64)

    # -- canonical form and indexing -------------------------------------

    def normalize(self, coords):
        """Scale so the first nonzero coordinate is 1."""
        coords = tuple(coords)
        for c in coords:
            if c:
                if c == 1:
                    return coords
                inv = self.field.inv(c)
                return tuple(self.field.mul(inv, x) for x in coords)
        raise ValueError("zero vector is not a projective point")

    def encode(self, coords):
        v = 0
        for c in coords:
            v = v * self.q + c
        return v

    def point_index(self, coords):
        coords = self.normalize(coords)
        for i, c in enumerate(coords):
            if c:
                return self._offset[i] + self.encode(coords)
        raise ValueError("zero vector")

    def point(self, index):
        return tuple(int(c) for c in self.points()[index])

    def points(self):
        """All canonical points, shape (size, n+1) int32, in index order."""
        if self._points is None:
            q, n = self.q, self.n
            blocks = []
            for lead in range(n, -1, -1):
                tail = n - lead
                block = np.zeros((q ** tail, n + 1), dtype=np.int32)
                block[:, lead] = 1
                ar = np.arange(q ** tail, dtype=np.int64)
                for j in range(tail):
                    block[:, lead + 1 + j] = (ar // (q ** (tail - 1 - j))) % q
                blocks.append(block)
            self._points = np.concatenate(blocks, axis=0)
        return self._points

    # -- vectorized canonicalization --------------------------------------

    def np_normalize(self, coords):
        """Canonicalize rows of an int array of shape (..., n+1) in place-ish."""
        t = self.field.np_tables()
        nz = coords != 0
        lead = np.argmax(nz, axis=-1)
        leadval = np.take_along_axis(coords, lead[..., None], axis=-1)[..., 0]
        scale = t["INV"][leadval]
        return t["MUL"][scale[..., None], coords], lead

    def np_index(self, coords):
        """Indices of (unnormalized, nonzero) coordinate rows."""
        canon, lead = self.np_normalize(coords)
        enc = (canon.astype(np.int64) * self._np_pow).sum(axis=-1)
        return self._np_offset[lead] + enc

    # -- incidence and spans ----------------------------------------------

    def incidence(self, point, dual):
        return self.field.dot(point, dual) == 0

    def line_points(self, P, Q):
        """The q+1 points of the line through distinct points P and Q."""
        f = self.field
        P = self.normalize(P)
        Q = self.normalize(Q)
        if P == Q:
            raise DegenerateSpan("line through equal points")
        pts = [Q]
        for lam in range(self.q):
            pts.append(
                self.normalize(
                    tuple(f.add(a, f.mul(lam, b)) for a, b in zip(P, Q))
                )
            )
        return pts

    def line_indices(self, i, j):
        pts = self.line_points(self.point(i), self.point(j))
        return tuple(sorted(self.point_index(p) for p in pts))

    def rank(self, vectors):
        """Rank over the field of a list of coordinate vectors."""
        f = self.field
        rows = [list(v) for v in vectors]
        ncols = self.n + 1
        rank = 0
        for col in range(ncols):
            piv = None
            for r in range(rank, len(rows)):
                if rows[r][col]:
                    piv = r
                    break
            if piv is None:
                continue
            rows[rank], rows[piv] = rows[piv], rows[rank]
            inv = f.inv(rows[rank][col])
            rows[rank] = [f.mul(inv, x) for x in rows[rank]]
            for r in range(len(rows)):
                if r != rank and rows[r][col]:
                    c = rows[r][col]
                    rows[r] = [
                        f.sub(x, f.mul(c, y)) for x, y in zip(rows[r], rows[rank])
                    ]
            rank += 1
            if rank == len(rows):
                break
        return rank

    def span_dual(self, points):
        """The dual vector of the hyperplane spanned by n points.

        Raises DegenerateSpan when the points do not span a hyperplane.
        """
        f = self.field
        rows = [list(p) for p in points]
        if len(rows) != self.n:
            raise DegenerateSpan(f"need exactly {self.n} points")
        ncols = self.n + 1
        # Solve rows . h = 0 by elimination; nullity must be 1.
        mat = [row[:] for row in rows]
        pivots = []
        rank = 0
        for col in range(ncols):
            piv = None
            for r in range(rank, len(mat)):
                if mat[r][col]:
                    piv = r
                    break
            if piv is None:
                continue
            mat[rank], mat[piv] = mat[piv], mat[rank]
            inv = f.inv(mat[rank][col])
            mat[rank] = [f.mul(inv, x) for x in mat[rank]]
            for r in range(len(mat)):
                if r != rank and mat[r][col]:
                    c = mat[r][col]
                    mat[r] = [f.sub(x, f.mul(c, y)) for x, y in zip(mat[r], mat[rank])]
            pivots.append(col)
            rank += 1
        if rank != self.n:
            raise DegenerateSpan("points do not span a hyperplane")
        free = [c for c in range(ncols) if c not in pivots][0]
        h = [0] * ncols
        h[free] = 1
        for r, col in enumerate(pivots):
            h[col] = f.neg(mat[r][free])
        return self.normalize(h)

    def hyperplane_points(self, dual):
        """Indices of the points on a hyperplane, via incidence scan."""
        t = self.field.np_tables()
        pts = self.points()
        acc = np.zeros(self.size, dtype=np.int32)
        for i, c in enumerate(self.normalize(dual)):
            acc = t["ADD"][acc, t["MUL"][c, pts[:, i]]]
        return np.nonzero(acc == 0)[0]

    def incidence_counts(self, duals, point_rows):
        """For each dual row, how many of the point rows lie on it."""
        t = self.field.np_tables()
        duals = np.asarray(duals, dtype=np.int32)
        pts = np.asarray(point_rows, dtype=np.int32)
        counts = np.zeros(len(duals), dtype=np.int64)
        acc = np.zeros((len(duals), len(pts)), dtype=np.int32)
        for i in range(self.n + 1):
            acc = t["ADD"][acc, t["MUL"][np.ix_(duals[:, i], pts[:, i])]]
        counts = (acc == 0).sum(axis=1)
        return counts

    def __repr__(self):
        return f"PG({self.n}, {self.q})"


_SPACES = {}


def projective_space(n, field):
    key = (n, field)
    if key not in _SPACES:
        _SPACES[key] = ProjectiveSpace(n, field)
    return _SPACES[key]


class PointSet:
    """Ordered, deduplicated set of points of one PG(n, q).

    Stores point indices; coordinate tuples are recovered on demand.
    """

    def __init__(self, space, items=(), by_index=False):
        self.space = space
        self._indices = []
        self._seen = set()
        for it in items:
            self.add(it, by_index=by_index)

    def add(self, item, by_index=False):
        idx = item if by_index else self.space.point_index(item)
        if idx not in self._seen:
            self._seen.add(idx)
            self._indices.append(idx)
        return idx

    @property
    def indices(self):
        return tuple(self._indices)

    @property
    def index_set(self):
        return self._seen

    def coords(self):
        return [self.space.point(i) for i in self._indices]

    def coord_array(self):
        return self.space.points()[np.asarray(self._indices, dtype=np.int64)]

    def __contains__(self, item):
        if isinstance(item, int):
            return item in self._seen
        return self.space.point_index(item) in self._seen

    def __len__(self):
        return len(self._indices)

    def __iter__(self):
        return iter(self._indices)

    def __eq__(self, other):
        return (
            isinstance(other, PointSet)
            and self.space is other.space
            and self._seen == other._seen
        )

    def intersection(self, other):
        out = PointSet(self.space)
        for i in self._indices:
            if i in other._seen:
                out.add(i, by_index=True)
        return out

    def union(self, other):
        out = PointSet(self.space)
        for i in self._indices:
            out.add(i, by_index=True)
        for i in other._indices:
            out.add(i, by_index=True)
        return out

    def sorted_coords(self):
        return [self.space.point(i) for i in sorted(self._indices)]

    def to_json(self):
        return [list(map(int, self.space.point(i))) for i in sorted(self._indices)]

    def __repr__(self):
        return f"PointSet({self.space!r}, {len(self)} points)"
