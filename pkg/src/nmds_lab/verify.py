"""Predicates and search: caps, NMDS-sets, spectra, extendability, codes.

The performance core is a coverage bitmap keyed by point index: secant
lines (and, for the NMDS property, planes meeting the set in exactly
four points) mark bits, and a point is addable exactly when its bit is
clear.  All bulk marking is vectorized through the field lookup tables.

An NMDS-set of PG(3, q) is a point set such that every 3 points span a
plane, some 4 points are coplanar, and no 5 points are coplanar; its
canonical coordinates, read as generator-matrix columns, give a linear
code whose Singleton defect and dual Singleton defect are both one.
"""

from __future__ import annotations

import itertools
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .projgeom import PointSet, num_lines

__all__ = [
    "SpectrumReport",
    "ExtensionReport",
    "is_cap",
    "is_nmds",
    "line_spectrum",
    "plane_spectrum",
    "addable_points",
    "extension_search",
    "export_code_matrices",
    "secant_cover",
    "PropertyViolatedByInput",
    "DoesNotSpan",
]

MAX_CODEWORDS = 1 << 24


class PropertyViolatedByInput(ValueError):
    pass


class DoesNotSpan(ValueError):
    pass


@dataclass
class SpectrumReport:
    kind: str  # "hyperplanes" or "lines"
    histogram: dict
    max_size: int
    total: int

    def to_json(self):
        return {
            "kind": self.kind,
            "histogram": {str(k): int(v) for k, v in sorted(self.histogram.items())},
            "max_size": int(self.max_size),
            "total": int(self.total),
        }


@dataclass
class ExtensionReport:
    addable: PointSet
    complete: bool
    witness_extensions: list = field(default_factory=list)
    depth: int = 0
    depth_capped: bool = False
    budget_exceeded: bool = False

    def to_json(self):
        space = self.addable.space
        return {
            "complete": self.complete,
            "addable": self.addable.to_json(),
            "witness_extensions": [
                [list(map(int, space.point(i))) for i in ext]
                for ext in self.witness_extensions
            ],
            "depth": self.depth,
            "depth_capped": self.depth_capped,
            "budget_exceeded": self.budget_exceeded,
        }


# ----------------------------------------------------------------------
# Bulk marking engines
# ----------------------------------------------------------------------

_CHUNK = 200_000


def _mark_third_points(space, coords, bitmap, counts=None, jobs=1):
    """Mark (or count) every point P + lam*Q, lam != 0, over all pairs.

    For each unordered pair of the given coordinate rows this touches the
    q-1 points of their line other than the two spanning points.
    """
    m = len(coords)
    if m < 2:
        return
    t = space.field.np_tables()
    MUL, ADD = t["MUL"], t["ADD"]
    ii, jj = np.triu_indices(m, k=1)

    def work(lo, hi, bm, cnt):
        A = coords[ii[lo:hi]]
        B = coords[jj[lo:hi]]
        for lam in range(1, space.q):
            idx = space.np_index(ADD[A, MUL[lam, B]])
            if cnt is not None:
                np.add.at(cnt, idx, 1)
            else:
                bm[idx] = True

    spans = [(lo, min(lo + _CHUNK, len(ii))) for lo in range(0, len(ii), _CHUNK)]
    if jobs > 1 and len(spans) > 1:
        parts = []

        def task(span):
            bm = np.zeros(space.size, dtype=bool) if counts is None else None
            cnt = np.zeros(space.size, dtype=np.int32) if counts is not None else None
            work(span[0], span[1], bm, cnt)
            return bm, cnt

        with ThreadPoolExecutor(max_workers=jobs) as pool:
            parts = list(pool.map(task, spans))
        for bm, cnt in parts:
            if counts is not None:
                counts += cnt
            else:
                bitmap |= bm
    else:
        for lo, hi in spans:
            work(lo, hi, bitmap, counts)


def secant_cover(ps, counts=False, jobs=1):
    """Coverage of the union of secant lines of a point set.

    Returns a boolean bitmap over the ambient points (the two defining
    points of each secant are marked too, by membership), or an int32
    array of per-point secant counts when ``counts`` is set.  For sets
    with no 3 collinear the count array is exactly "number of secants
    through the point" for points off the set.
    """
    space = ps.space
    coords = ps.coord_array()
    if counts:
        cnt = np.zeros(space.size, dtype=np.int32)
        _mark_third_points(space, coords, None, counts=cnt, jobs=jobs)
        return cnt
    bitmap = np.zeros(space.size, dtype=bool)
    _mark_third_points(space, coords, bitmap, jobs=jobs)
    bitmap[np.asarray(ps.indices, dtype=np.int64)] = True
    return bitmap


def _np_det3(t, a, b, c, cols):
    """Batched 3x3 determinant over the field; a, b, c are (..., w) arrays."""
    MUL, ADD, NEG = t["MUL"], t["ADD"], t["NEG"]
    i, j, k = cols

    def minor(r, s):
        return ADD[MUL[b[..., r], c[..., s]], NEG[MUL[b[..., s], c[..., r]]]]

    term = MUL[a[..., i], minor(j, k)]
    term = ADD[term, NEG[MUL[a[..., j], minor(i, k)]]]
    return ADD[term, MUL[a[..., k], minor(i, j)]]


def plane_duals_of_triples(space, A, B, C):
    """Dual vectors of the planes spanned by coordinate-row triples (PG(3))."""
    t = space.field.np_tables()
    NEG = t["NEG"]
    d0 = _np_det3(t, A, B, C, (1, 2, 3))
    d1 = NEG[_np_det3(t, A, B, C, (0, 2, 3))]
    d2 = _np_det3(t, A, B, C, (0, 1, 3))
    d3 = NEG[_np_det3(t, A, B, C, (0, 1, 2))]
    duals = np.stack([d0, d1, d2, d3], axis=-1)
    degenerate = ~duals.any(axis=-1)
    return duals, degenerate


def _mark_plane_points(space, A, B, C, bitmap):
    """Mark every point of the planes spanned by the (non-collinear) triples."""
    t = space.field.np_tables()
    MUL, ADD = t["MUL"], t["ADD"]
    q = space.q
    lam = np.arange(q, dtype=np.int64)
    step = max(1, _CHUNK // (q * 4))
    for lo in range(0, len(A), step):
        a, b, c = A[lo : lo + step], B[lo : lo + step], C[lo : lo + step]
        ab = ADD[a[:, None, :], MUL[lam[None, :, None], b[:, None, :]]]
        for g in range(q):
            pts = ADD[ab, MUL[g, c][:, None, :]]
            bitmap[space.np_index(pts).ravel()] = True
        bc = ADD[b[:, None, :], MUL[lam[None, :, None], c[:, None, :]]]
        bitmap[space.np_index(bc).ravel()] = True
        bitmap[space.np_index(c)] = True


# ----------------------------------------------------------------------
# Cap and NMDS predicates
# ----------------------------------------------------------------------

def is_cap(ps, jobs=1):
    """No three points collinear."""
    if len(ps) < 3:
        return True
    space = ps.space
    coords = ps.coord_array()
    bitmap = np.zeros(space.size, dtype=bool)
    _mark_third_points(space, coords, bitmap, jobs=jobs)
    return not bitmap[np.asarray(ps.indices, dtype=np.int64)].any()


def _collinear_witness(ps):
    """Some collinear triple of the set (slow path, used only on failure)."""
    space = ps.space
    idx = list(ps.indices)
    for a, b in itertools.combinations(range(len(idx)), 2):
        line = set(space.line_indices(idx[a], idx[b]))
        hit = [i for i in idx if i in line]
        if len(hit) >= 3:
            return hit[:3]
    return None


def _nmds_planes(ps):
    """Unique planes through point triples of the set, with their set-counts.

    Returns (duals, counts, first_triple_rows, collinear_flag).
    """
    space = ps.space
    coords = ps.coord_array()
    m = len(coords)
    triples = np.asarray(
        list(itertools.combinations(range(m), 3)), dtype=np.int64
    )
    A, B, C = (coords[triples[:, k]] for k in range(3))
    duals, degenerate = plane_duals_of_triples(space, A, B, C)
    if degenerate.any():
        return None, None, None, True
    keys = space.np_index(duals)
    _, first, inverse = np.unique(keys, return_index=True, return_inverse=True)
    uduals = duals[first]
    counts = space.incidence_counts(uduals, coords)
    return uduals, counts, triples[first], False


def is_nmds(ps, jobs=1, witness=False):
    """NMDS predicate in PG(3, q); optionally return a violation witness.

    True iff no 3 points collinear, some plane meets the set in exactly
    4 points, and no plane meets it in 5 or more.
    """
    space = ps.space
    if space.n != 3:
        raise ValueError("the NMDS predicate is defined for PG(3, q) here")
    if len(ps) < 5:
        raise ValueError("need at least 5 points")

    def done(ok, why):
        return (ok, why) if witness else ok

    if not is_cap(ps, jobs=jobs):
        return done(False, {"bullet": 1, "collinear": _collinear_witness(ps)})
    duals, counts, _, collinear = _nmds_planes(ps)
    if collinear:
        return done(False, {"bullet": 1, "collinear": _collinear_witness(ps)})
    worst = int(counts.max())
    if worst >= 5:
        bad = duals[int(np.argmax(counts))]
        return done(False, {"bullet": 3, "plane": [int(x) for x in bad], "count": worst})
    if worst < 4:
        return done(False, {"bullet": 2, "max_plane_count": worst})
    return done(True, None)


# ----------------------------------------------------------------------
# Spectra
# ----------------------------------------------------------------------

def line_spectrum(ps):
    """Histogram of |line ∩ S| over all lines of the ambient space.

    Lines through at least 2 points of S are enumerated exactly via the
    pairs of S; the 1-point and 0-point classes follow by counting.
    """
    space = ps.space
    q = space.q
    idx = list(ps.indices)
    m = len(idx)
    seen = {}
    for a in range(m):
        for b in range(a + 1, m):
            key = space.line_indices(idx[a], idx[b])
            if key not in seen:
                seen[key] = sum(1 for i in key if i in ps.index_set)
    hist = {}
    for cnt in seen.values():
        hist[cnt] = hist.get(cnt, 0) + 1
    lines_through_point = (q ** space.n - 1) // (q - 1)
    covered = sum(cnt * n for cnt, n in hist.items())
    ones = m * lines_through_point - covered
    if ones:
        hist[1] = ones
    total = num_lines(space.n, q)
    rest = total - sum(hist.values())
    if rest:
        hist[0] = rest
    return SpectrumReport("lines", hist, max(hist), total)


def plane_spectrum(ps):
    """Histogram of |H ∩ S| over all hyperplanes H of the ambient space."""
    space = ps.space
    coords = ps.coord_array()
    duals = space.points()  # hyperplanes are dual points
    if len(duals) * max(len(coords), 1) > 300_000_000:
        raise ValueError("hyperplane spectrum too large for this ambient space")
    hist = {}
    step = max(1, 40_000_000 // max(len(coords), 1))
    for lo in range(0, len(duals), step):
        counts = space.incidence_counts(duals[lo : lo + step], coords)
        vals, freq = np.unique(counts, return_counts=True)
        for v, f in zip(vals, freq):
            hist[int(v)] = hist.get(int(v), 0) + int(f)
    return SpectrumReport("hyperplanes", hist, max(hist), space.size)


# ----------------------------------------------------------------------
# Extendability
# ----------------------------------------------------------------------

def addable_points(ps, prop, jobs=1, _analysis=None):
    """Points whose addition preserves the property ("cap" or "nmds").

    cap:  the complement of the union of all secant lines.
    nmds: points off all secants and off all planes meeting S in 4 points.
    """
    space = ps.space
    if prop == "cap":
        coords = ps.coord_array()
        bitmap = np.zeros(space.size, dtype=bool)
        _mark_third_points(space, coords, bitmap, jobs=jobs)
        if bitmap[np.asarray(ps.indices, dtype=np.int64)].any():
            raise PropertyViolatedByInput("input set is not a cap")
        bitmap[np.asarray(ps.indices, dtype=np.int64)] = True
    elif prop == "nmds":
        coords = ps.coord_array()
        bitmap = np.zeros(space.size, dtype=bool)
        _mark_third_points(space, coords, bitmap, jobs=jobs)
        if bitmap[np.asarray(ps.indices, dtype=np.int64)].any():
            raise PropertyViolatedByInput("input set has 3 collinear points")
        bitmap[np.asarray(ps.indices, dtype=np.int64)] = True
        duals, counts, triples, collinear = _analysis or _nmds_planes(ps)
        if collinear:
            raise PropertyViolatedByInput("input set has 3 collinear points")
        if int(counts.max()) >= 5:
            raise PropertyViolatedByInput("input set has 5 coplanar points")
        if int(counts.max()) < 4:
            raise PropertyViolatedByInput("input set has no 4 coplanar points")
        sel = counts == 4
        tri = triples[sel]
        coords_all = ps.coord_array()
        _mark_plane_points(
            space,
            coords_all[tri[:, 0]],
            coords_all[tri[:, 1]],
            coords_all[tri[:, 2]],
            bitmap,
        )
    else:
        raise ValueError(f"unknown property {prop!r}")
    free = np.nonzero(~bitmap)[0]
    addable = PointSet(space, [int(i) for i in free], by_index=True)
    return ExtensionReport(addable=addable, complete=len(addable) == 0)


def extension_search(ps, prop, depth, jobs=1, budget_ms=None):
    """Depth-bounded exhaustive extension search above a valid set.

    Explores index-increasing chains of addable points (each subset is
    visited once); records every extension tuple whose own addable set
    is empty.  ``depth_capped`` reports open nodes at the depth limit.
    """
    space = ps.space
    t0 = time.monotonic()
    root = addable_points(ps, prop, jobs=jobs)
    report = ExtensionReport(
        addable=root.addable, complete=root.complete, depth=depth
    )
    if depth == 0 or root.complete:
        return report
    seen_exts = set()

    def over_budget():
        return budget_ms is not None and (time.monotonic() - t0) * 1000 > budget_ms

    def descend(current, added, level, addable_now):
        if over_budget():
            report.budget_exceeded = True
            return
        for p in addable_now.indices:
            if added and p <= added[-1]:
                continue
            nxt = PointSet(space, list(current.indices) + [p], by_index=True)
            sub = addable_points(nxt, prop, jobs=jobs)
            ext = added + (p,)
            if sub.complete:
                if ext not in seen_exts:
                    seen_exts.add(ext)
                    report.witness_extensions.append(ext)
            elif level + 1 < depth:
                descend(nxt, ext, level + 1, sub.addable)
            else:
                report.depth_capped = True
            if over_budget():
                report.budget_exceeded = True
                return

    descend(ps, (), 0, root.addable)
    report.witness_extensions.sort()
    return report


# ----------------------------------------------------------------------
# Code matrices
# ----------------------------------------------------------------------

def min_weight_exhaustive(space, columns):
    """Minimum Hamming weight over all nonzero codewords of the row space
    of the (n+1) x N matrix whose columns are the given coordinate rows."""
    f = space.field
    t = f.np_tables()
    MUL, ADD = t["MUL"], t["ADD"]
    q = f.q
    k = space.n + 1
    N = len(columns)
    if q ** k > MAX_CODEWORDS:
        return None
    G = np.asarray(columns, dtype=np.int32).T  # (k, N)
    best = N
    step = max(1, 4_000_000 // max(N, 1))
    total = q ** k
    for lo in range(0, total, step):
        ms = np.arange(lo, min(lo + step, total), dtype=np.int64)
        if lo == 0:
            ms = ms[1:]  # skip the zero message
        acc = np.zeros((len(ms), N), dtype=np.int32)
        rem = ms.copy()
        for i in range(k):
            digit = (rem % q).astype(np.int64)
            rem //= q
            acc = ADD[acc, MUL[digit[:, None], G[i][None, :]]]
        w = (acc != 0).sum(axis=1)
        best = min(best, int(w.min()))
    return best


def export_code_matrices(ps, role="generator"):
    """Coordinate-column matrix of the set plus code metadata.

    role="generator": the rows of the returned matrix generate the code;
    d is found by exhaustive codeword enumeration when q^k is within
    budget, otherwise reported as not computed.  d_dual is the smallest
    number of linearly dependent columns, derived from the line/plane
    structure of the set (PG(3) only).
    """
    space = ps.space
    cols = ps.coords()
    k = space.n + 1
    if role not in ("generator", "parity_check"):
        raise ValueError("role must be 'generator' or 'parity_check'")
    if role == "generator" and space.rank(cols) != k:
        raise DoesNotSpan("the set does not span the ambient space")
    matrix = [[col[i] for col in cols] for i in range(k)]
    meta = {"N": len(cols), "k": k, "q": space.q, "role": role}
    if role == "generator":
        d = min_weight_exhaustive(space, cols)
        meta["d"] = d
        meta["d_method"] = "exhaustive" if d is not None else "not computed"
        if space.n == 3:
            lines = line_spectrum(ps)
            if lines.max_size >= 3:
                meta["d_dual"] = 3
            else:
                _, counts, _, collinear = _nmds_planes(ps)
                meta["d_dual"] = 4 if (not collinear and counts.max() >= 4) else 5
            meta["d_dual_method"] = "dependent-columns"
    return matrix, meta
