"""Exact rational polytope engine for two-party behaviors and correlations.

Behaviors live in the 8-dimensional (marginals, correlations) parametrization

    (mA0, mA1, mB0, mB1, c00, c01, c10, c11),

in which the sixteen joint probabilities are

    P(A_i=a, B_j=b) = (1 + a*mA_i + b*mB_j + a*b*c_ij) / 4 ,

so normalization and no-signaling hold identically and the only nontrivial
constraints are the sixteen positivity inequalities.  The module provides:

* the deterministic behaviors (vertices of the local behavior polytope),
* joint probability tables and conversions to/from behaviors,
* the two canonical extremal tables (perfectly correlated no-signaling box,
  one-sided signaling box),
* exact vertex and facet enumeration for rational polytopes by exhaustive
  basis enumeration (choose d constraints or d points, solve exactly, verify),
* exact volume of full-dimensional rational polytopes of dimension <= 4 by a
  centroid-fan triangulation.

All geometry is exact: coordinates are ``fractions.Fraction``, determinants
are computed with fraction-free integer elimination (vectorized with numpy
int64 when a Hadamard bound certifies no overflow, otherwise with Python's
arbitrary-precision integers).
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator, Sequence

import numpy as np

from .regions import CorrelationPoint

Vector = tuple[Fraction, ...]

_PM = (-1, 1)
_SETTINGS = ((0, 0), (0, 1), (1, 0), (1, 1))

# Practical ceiling for exhaustive subset enumeration; C(24, 8) is the
# largest instance this package needs.
_DET_CHUNK = 50_000
_INT64_SAFE = 2 ** 62


class PolytopeError(Exception):
    """Base class for polytope engine failures."""


class NoSignalingViolation(PolytopeError):
    """A joint probability table whose marginals depend on the far setting."""

    def __init__(self, message, max_discrepancy: Fraction):
        super().__init__(message)
        self.max_discrepancy = max_discrepancy


class UnboundedPolytope(PolytopeError):
    """A recession direction was detected during vertex enumeration."""


class DegeneratePolytope(PolytopeError):
    """The polytope is not full-dimensional in its ambient space."""


# --------------------------------------------------------------------------
# behaviors and probability tables
# --------------------------------------------------------------------------

def _frac(x) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)


@dataclass(frozen=True)
class Behavior:
    """Four marginal expectations and four correlations, all rational.

    Construction validates that every derived joint probability is
    nonnegative (normalization and no-signaling are automatic in this
    parametrization).
    """

    mA0: Fraction
    mA1: Fraction
    mB0: Fraction
    mB1: Fraction
    c00: Fraction
    c01: Fraction
    c10: Fraction
    c11: Fraction

    def __post_init__(self):
        for name in self.__dataclass_fields__:
            object.__setattr__(self, name, _frac(getattr(self, name)))
        for (i, j), a, b in itertools.product(_SETTINGS, _PM, _PM):
            p = self.probability(i, j, a, b)
            if p < 0:
                raise ValueError(
                    f"P(A{i}={a:+d}, B{j}={b:+d}) = {p} is negative")

    def marginal_a(self, i: int) -> Fraction:
        return (self.mA0, self.mA1)[i]

    def marginal_b(self, j: int) -> Fraction:
        return (self.mB0, self.mB1)[j]

    def correlation(self, i: int, j: int) -> Fraction:
        return (self.c00, self.c01, self.c10, self.c11)[2 * i + j]

    def probability(self, i: int, j: int, a: int, b: int) -> Fraction:
        return (1 + a * self.marginal_a(i) + b * self.marginal_b(j)
                + a * b * self.correlation(i, j)) / 4

    def as_vector(self) -> Vector:
        return (self.mA0, self.mA1, self.mB0, self.mB1,
                self.c00, self.c01, self.c10, self.c11)


def _table_index(i: int, j: int, a: int, b: int) -> int:
    return 8 * i + 4 * j + (0 if a == 1 else 1) * 2 + (0 if b == 1 else 1)


@dataclass(frozen=True)
class JointProbabilityTable:
    """Sixteen rational entries P(A_i=a, B_j=b), a, b in {-1, +1}.

    Entries must be nonnegative and each setting block (i, j) must sum to 1.
    """

    entries: tuple[Fraction, ...]

    def __post_init__(self):
        if len(self.entries) != 16:
            raise ValueError(f"need 16 entries, got {len(self.entries)}")
        object.__setattr__(self, "entries", tuple(_frac(e) for e in self.entries))
        for (i, j), a, b in itertools.product(_SETTINGS, _PM, _PM):
            if self.entry(i, j, a, b) < 0:
                raise ValueError(
                    f"P(A{i}={a:+d}, B{j}={b:+d}) = {self.entry(i, j, a, b)}"
                    " is negative")
        for i, j in _SETTINGS:
            s = sum(self.entry(i, j, a, b) for a in _PM for b in _PM)
            if s != 1:
                raise ValueError(f"block (i={i}, j={j}) sums to {s}, not 1")

    @classmethod
    def from_function(cls, f) -> "JointProbabilityTable":
        """Build from a callable f(i, j, a, b) -> probability."""
        entries = [Fraction(0)] * 16
        for (i, j), a, b in itertools.product(_SETTINGS, _PM, _PM):
            entries[_table_index(i, j, a, b)] = _frac(f(i, j, a, b))
        return cls(tuple(entries))

    def entry(self, i: int, j: int, a: int, b: int) -> Fraction:
        return self.entries[_table_index(i, j, a, b)]


def deterministic_behaviors() -> list[Behavior]:
    """The 16 behaviors with deterministic outcomes a_i, b_j = +/-1.

    Ordered by the assignment tuple (a0, a1, b0, b1) ascending over
    {-1, +1}^4; correlations are c_ij = a_i * b_j.
    """
    out = []
    for a0, a1, b0, b1 in itertools.product(_PM, repeat=4):
        out.append(Behavior(
            mA0=Fraction(a0), mA1=Fraction(a1),
            mB0=Fraction(b0), mB1=Fraction(b1),
            c00=Fraction(a0 * b0), c01=Fraction(a0 * b1),
            c10=Fraction(a1 * b0), c11=Fraction(a1 * b1)))
    return out


def table_from_behavior(b: Behavior) -> JointProbabilityTable:
    """Expand a behavior into its sixteen joint probabilities."""
    return JointProbabilityTable.from_function(b.probability)


def check_no_signaling(t: JointProbabilityTable) -> tuple[bool, Fraction]:
    """Check the eight marginal equalities exactly.

    Returns (all hold, maximal probability discrepancy).  The discrepancy
    for party A is max over (i, a) of |P(A_i=a | B_0 side) - P(A_i=a | B_1
    side)| and symmetrically for B.
    """
    worst = Fraction(0)
    for i in (0, 1):
        for a in _PM:
            pj = [sum(t.entry(i, j, a, b) for b in _PM) for j in (0, 1)]
            worst = max(worst, abs(pj[0] - pj[1]))
    for j in (0, 1):
        for b in _PM:
            pi = [sum(t.entry(i, j, a, b) for a in _PM) for i in (0, 1)]
            worst = max(worst, abs(pi[0] - pi[1]))
    return worst == 0, worst


def behavior_from_table(t: JointProbabilityTable) -> Behavior:
    """Invert :func:`table_from_behavior`.

    Raises :class:`NoSignalingViolation` (carrying the maximal marginal
    discrepancy) when the table's marginals depend on the far setting, in
    which case no behavior reproduces it.
    """
    ok, worst = check_no_signaling(t)
    if not ok:
        raise NoSignalingViolation(
            f"table violates no-signaling (max marginal discrepancy {worst})",
            worst)

    def expect_a(i, j):
        return sum(a * t.entry(i, j, a, b) for a in _PM for b in _PM)

    def expect_b(i, j):
        return sum(b * t.entry(i, j, a, b) for a in _PM for b in _PM)

    def expect_ab(i, j):
        return sum(a * b * t.entry(i, j, a, b) for a in _PM for b in _PM)

    return Behavior(
        mA0=expect_a(0, 0), mA1=expect_a(1, 0),
        mB0=expect_b(0, 0), mB1=expect_b(0, 1),
        c00=expect_ab(0, 0), c01=expect_ab(0, 1),
        c10=expect_ab(1, 0), c11=expect_ab(1, 1))


def project_to_correlations(b: Behavior) -> CorrelationPoint:
    """Drop the marginals: the 4D correlation image of a behavior."""
    return CorrelationPoint(float(b.c00), float(b.c01), float(b.c10), float(b.c11))


def pr_box() -> JointProbabilityTable:
    """The no-signaling table with perfect (anti)correlations.

    Outcomes agree for the setting pairs (0,0), (0,1), (1,0) and disagree
    for (1,1), each with probability 1/2; its correlation image (1, 1, 1, -1)
    gives the CHSH functional the algebraic maximum 4.
    """
    half = Fraction(1, 2)

    def f(i, j, a, b):
        if (i, j) == (1, 1):
            return half if a != b else Fraction(0)
        return half if a == b else Fraction(0)

    return JointProbabilityTable.from_function(f)


def signaling_example() -> JointProbabilityTable:
    """A table whose A-marginal flips with B's setting choice.

    A's outcome is +1 whenever B measures setting 0 and -1 whenever B
    measures setting 1 (B's outcome is a fair coin), so the A marginals
    signal B's choice; all four correlations vanish, which satisfies every
    CHSH inequality.
    """
    half = Fraction(1, 2)

    def f(i, j, a, b):
        forced = 1 if j == 0 else -1
        return half if a == forced else Fraction(0)

    return JointProbabilityTable.from_function(f)


# --------------------------------------------------------------------------
# rational polytopes
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class Halfspace:
    """Inequality normal . x <= offset with a primitive integer normal."""

    normal: tuple[int, ...]
    offset: Fraction

    @classmethod
    def normalized(cls, normal: Sequence, offset) -> "Halfspace":
        """Scale by a positive rational so the normal is primitive integers."""
        normal = [_frac(v) for v in normal]
        offset = _frac(offset)
        if all(v == 0 for v in normal):
            raise ValueError("halfspace normal must be nonzero")
        scale = Fraction(math.lcm(*(v.denominator for v in normal)))
        ints = [int(v * scale) for v in normal]
        g = math.gcd(*(abs(v) for v in ints))
        ints = [v // g for v in ints]
        return cls(tuple(ints), offset * scale / g)

    def evaluate(self, x: Sequence[Fraction]) -> Fraction:
        return sum(n * xi for n, xi in zip(self.normal, x))

    def slack(self, x: Sequence[Fraction]) -> Fraction:
        return self.offset - self.evaluate(x)


@dataclass(frozen=True)
class RationalPolytope:
    """A polytope with exact rational V- and/or H-representation."""

    dim: int
    vertices: tuple[Vector, ...] | None = None
    halfspaces: tuple[Halfspace, ...] | None = None
    equalities: tuple[Halfspace, ...] | None = None

    def __post_init__(self):
        if self.vertices is not None:
            verts = tuple(tuple(_frac(x) for x in v) for v in self.vertices)
            for v in verts:
                if len(v) != self.dim:
                    raise ValueError(f"vertex {v} has wrong dimension")
            if len(set(verts)) != len(verts):
                raise ValueError("vertices must be pairwise distinct")
            object.__setattr__(self, "vertices", verts)
        if self.halfspaces is not None:
            hs = tuple(self.halfspaces)
            for h in hs:
                if len(h.normal) != self.dim:
                    raise ValueError(f"halfspace {h} has wrong dimension")
            object.__setattr__(self, "halfspaces", hs)

    # -- serialization ------------------------------------------------------

    def to_text(self, which: str | None = None) -> str:
        """Serialize one representation: header ``<kind> <dim> <count>``,
        then one line per vertex (d rationals) or halfspace (d rationals for
        the normal, then the offset), rationals in p/q form."""
        if which is None:
            which = "V" if self.vertices is not None else "H"
        if which == "V":
            if self.vertices is None:
                raise ValueError("no vertex representation to serialize")
            lines = [f"V {self.dim} {len(self.vertices)}"]
            lines += [" ".join(str(x) for x in v) for v in self.vertices]
        elif which == "H":
            if self.halfspaces is None:
                raise ValueError("no halfspace representation to serialize")
            lines = [f"H {self.dim} {len(self.halfspaces)}"]
            lines += [" ".join([*(str(n) for n in h.normal), str(h.offset)])
                      for h in self.halfspaces]
        else:
            raise ValueError(f"unknown representation kind {which!r}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "RationalPolytope":
        rows = [ln for ln in (s.strip() for s in text.splitlines()) if ln]
        kind, dim, count = rows[0].split()
        dim, count = int(dim), int(count)
        body = rows[1:1 + count]
        if len(body) != count:
            raise ValueError(f"expected {count} rows, found {len(body)}")
        if kind == "V":
            verts = tuple(tuple(Fraction(tok) for tok in ln.split()) for ln in body)
            return cls(dim=dim, vertices=verts)
        if kind == "H":
            hs = []
            for ln in body:
                toks = [Fraction(t) for t in ln.split()]
                hs.append(Halfspace.normalized(toks[:-1], toks[-1]))
            return cls(dim=dim, halfspaces=tuple(hs))
        raise ValueError(f"unknown representation kind {kind!r}")


def ns_polytope_h() -> RationalPolytope:
    """H-representation of the no-signaling behavior polytope (8D).

    Facets are the sixteen positivity constraints in the scaled form
    1 + a*mA_i + b*mB_j + a*b*c_ij >= 0 (i.e. four times the probability),
    so the slack of the zero behavior is exactly 1 on every facet.
    """
    hs = []
    for (i, j), a, b in itertools.product(_SETTINGS, _PM, _PM):
        normal = [0] * 8
        normal[i] = -a
        normal[2 + j] = -b
        normal[4 + 2 * i + j] = -a * b
        hs.append(Halfspace.normalized(normal, 1))
    hs.sort(key=lambda h: (h.normal, h.offset))
    return RationalPolytope(dim=8, halfspaces=tuple(hs))


def local_polytope_v() -> RationalPolytope:
    """V-representation of the local behavior polytope: the 16 deterministic
    behaviors as points of the 8D (marginals, correlations) space."""
    verts = sorted(b.as_vector() for b in deterministic_behaviors())
    return RationalPolytope(dim=8, vertices=tuple(verts))


def correlation_polytope_C() -> RationalPolytope:
    """V-representation of the 4D correlation image of the local polytope.

    Projecting the 16 deterministic behaviors yields 8 distinct points
    (flipping both parties' outcomes fixes every correlation), each of the
    form (a0*b0, a0*b1, a1*b0, a1*b1) with entries +/-1 of product +1.
    """
    pts = {tuple(b.as_vector()[4:]) for b in deterministic_behaviors()}
    return RationalPolytope(dim=4, vertices=tuple(sorted(pts)))


def cube_polytope_h(dim: int) -> RationalPolytope:
    """H-representation of the cube [-1, 1]^dim."""
    hs = []
    for k in range(dim):
        for s in (1, -1):
            normal = [0] * dim
            normal[k] = s
            hs.append(Halfspace.normalized(normal, 1))
    hs.sort(key=lambda h: (h.normal, h.offset))
    return RationalPolytope(dim=dim, halfspaces=tuple(hs))


# --------------------------------------------------------------------------
# exact integer linear algebra
# --------------------------------------------------------------------------

def _det_int_py(rows: list[list[int]]) -> int:
    """Fraction-free (Bareiss) determinant on Python integers."""
    m = [list(r) for r in rows]
    n = len(m)
    if n == 0:
        return 1
    sign = 1
    prev = 1
    for k in range(n - 1):
        if m[k][k] == 0:
            for r in range(k + 1, n):
                if m[r][k] != 0:
                    m[k], m[r] = m[r], m[k]
                    sign = -sign
                    break
            else:
                return 0
        piv = m[k][k]
        for r in range(k + 1, n):
            for c in range(k + 1, n):
                m[r][c] = (m[r][c] * piv - m[r][k] * m[k][c]) // prev
            m[r][k] = 0
        prev = piv
    return sign * m[n - 1][n - 1]


def _batch_det_int64(mats: np.ndarray) -> np.ndarray:
    """Exact determinants of a stack of small int64 matrices via Bareiss.

    Caller must guarantee (e.g. by a Hadamard bound) that all intermediate
    minors fit into int64.
    """
    m = np.array(mats, dtype=np.int64, copy=True)
    nmat, n, n2 = m.shape
    if n != n2:
        raise ValueError("matrices must be square")
    if n == 0:
        return np.ones(nmat, dtype=np.int64)
    sign = np.ones(nmat, dtype=np.int64)
    live = np.ones(nmat, dtype=bool)
    prev = np.ones(nmat, dtype=np.int64)
    ar = np.arange(nmat)
    for k in range(n - 1):
        idx = np.abs(m[:, k:, k]).argmax(axis=1)
        piv_row = k + idx
        live &= m[ar, piv_row, k] != 0
        do_swap = live & (idx > 0)
        if do_swap.any():
            w = np.where(do_swap)[0]
            rows = piv_row[w]
            tmp = m[w, k, :].copy()
            m[w, k, :] = m[w, rows, :]
            m[w, rows, :] = tmp
            sign[w] = -sign[w]
        piv = np.where(live, m[:, k, k], 1)
        div = np.where(prev == 0, 1, prev)
        block = m[:, k + 1:, k + 1:]
        m[:, k + 1:, k + 1:] = (
            block * piv[:, None, None]
            - m[:, k + 1:, k:k + 1] * m[:, k:k + 1, k + 1:]
        ) // div[:, None, None]
        prev = piv
    det = sign * m[:, n - 1, n - 1]
    det[~live] = 0
    return det


def _hadamard_fits_int64(max_abs: int, n: int) -> bool:
    if max_abs == 0:
        return True
    bound = (math.sqrt(n) * max_abs) ** n
    return bound < _INT64_SAFE


def _batch_dets(mats, max_abs: int) -> np.ndarray:
    """Dispatch between the vectorized int64 path and Python big integers."""
    nmat = len(mats)
    n = len(mats[0]) if nmat else 0
    if _hadamard_fits_int64(max_abs, n):
        return _batch_det_int64(np.asarray(mats, dtype=np.int64))
    return np.array([_det_int_py([list(r) for r in mat]) for mat in mats],
                    dtype=object)


def _integerize_rows(rows: Iterable[Sequence[Fraction]]) -> tuple[list[list[int]], int]:
    """Scale each row by a positive integer so all entries are integers.

    Row scaling preserves halfspaces and homogeneous point rows, which is
    all the scans below need.  Returns the rows and the max |entry|.
    """
    out = []
    max_abs = 0
    for row in rows:
        fr = [_frac(x) for x in row]
        scale = math.lcm(*(f.denominator for f in fr)) if fr else 1
        ints = [int(f * scale) for f in fr]
        g = math.gcd(*(abs(v) for v in ints)) if any(ints) else 1
        ints = [v // (g or 1) for v in ints]
        max_abs = max(max_abs, max((abs(v) for v in ints), default=0))
        out.append(ints)
    return out, max_abs


def _frac_rank(rows: list[Sequence[Fraction]]) -> int:
    """Exact rank by Gaussian elimination over Fractions."""
    m = [[_frac(x) for x in r] for r in rows]
    rank = 0
    ncols = len(m[0]) if m else 0
    row = 0
    for col in range(ncols):
        piv = next((r for r in range(row, len(m)) if m[r][col] != 0), None)
        if piv is None:
            continue
        m[row], m[piv] = m[piv], m[row]
        inv = m[row][col]
        for r in range(row + 1, len(m)):
            if m[r][col] != 0:
                f = m[r][col] / inv
                m[r] = [x - f * y for x, y in zip(m[r], m[row])]
        row += 1
        rank += 1
        if row == len(m):
            break
    return rank


def _pivot_columns(rows: list[Sequence[Fraction]]) -> list[int]:
    """Column indices of pivots under exact Gaussian elimination."""
    m = [[_frac(x) for x in r] for r in rows]
    pivots = []
    row = 0
    ncols = len(m[0]) if m else 0
    for col in range(ncols):
        piv = next((r for r in range(row, len(m)) if m[r][col] != 0), None)
        if piv is None:
            continue
        m[row], m[piv] = m[piv], m[row]
        inv = m[row][col]
        for r in range(row + 1, len(m)):
            if m[r][col] != 0:
                f = m[r][col] / inv
                m[r] = [x - f * y for x, y in zip(m[r], m[row])]
        pivots.append(col)
        row += 1
        if row == len(m):
            break
    return pivots


def _iter_subset_chunks(n: int, k: int, chunk: int) -> Iterator[np.ndarray]:
    it = itertools.combinations(range(n), k)
    while True:
        block = list(itertools.islice(it, chunk))
        if not block:
            return
        yield np.array(block, dtype=np.intp)


# --------------------------------------------------------------------------
# vertex and facet scans (exhaustive basis enumeration)
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class _FacetData:
    normal: tuple[int, ...]
    offset: Fraction
    incident: tuple[int, ...]


def _facet_scan(points: Sequence[Vector], dim: int) -> list[_FacetData]:
    """All facets of the convex hull of full-dimensional ``points``.

    Exhaustive over d-subsets: each affinely independent subset spans a
    hyperplane (found via the d+1 signed maximal minors of the homogeneous
    matrix); a hyperplane with every point on one side is a facet, and any
    facet contains d affinely independent vertices, so the scan is complete.
    """
    npts = len(points)
    if npts < dim + 1:
        raise DegeneratePolytope(f"{npts} points cannot span dimension {dim}")
    hom_rows, max_abs = _integerize_rows([(*p, Fraction(1)) for p in points])
    width = dim + 1
    found: dict[tuple, _FacetData] = {}
    use_int64 = _hadamard_fits_int64(max_abs, dim) and \
        (math.sqrt(dim) * max_abs) ** dim * max_abs * width < _INT64_SAFE
    hom_num = np.array(hom_rows, dtype=np.int64 if use_int64 else object)

    for subsets in _iter_subset_chunks(npts, dim, _DET_CHUNK):
        mats = hom_num[subsets]                       # (B, dim, dim+1)
        minors = []
        for drop in range(width):
            keep = [c for c in range(width) if c != drop]
            minors.append(_batch_dets(mats[:, :, keep], max_abs))
        nullvecs = np.stack(
            [((-1) ** j) * minors[j] for j in range(width)], axis=1)
        nz = np.any(nullvecs != 0, axis=1)
        if not nz.any():
            continue
        cand = nullvecs[nz]
        # orientation: evaluate every homogeneous point row against the
        # candidate hyperplane; row scaling keeps the sign
        vals = hom_num @ cand.T                        # (npts, B)
        le = (vals <= 0).all(axis=0)
        ge = (vals >= 0).all(axis=0)
        for b in np.where(le | ge)[0]:
            v = cand[b]
            if ge[b] and not le[b]:
                v = -v
            ints = [int(x) for x in v]
            g = math.gcd(*(abs(x) for x in ints))
            ints = [x // g for x in ints]
            key = tuple(ints)
            if key in found:
                continue
            incident = tuple(int(i) for i in np.where(vals[:, b] == 0)[0])
            found[key] = _FacetData(
                normal=tuple(ints[:dim]),
                offset=Fraction(-ints[dim]),
                incident=incident)
    facets = sorted(found.values(), key=lambda f: (f.normal, f.offset))
    if not facets:
        raise DegeneratePolytope("point set is not full-dimensional")
    return facets


def _vertex_scan(halfspaces: Sequence[Halfspace], dim: int) -> list[Vector]:
    """All vertices of a (bounded) H-polytope, exhaustively.

    Every vertex lies on d linearly independent facets, so solving each
    d-subset exactly (Cramer) and keeping the feasible solutions finds all
    of them.
    """
    rows = [(*h.normal, h.offset) for h in halfspaces]
    int_rows, max_abs = _integerize_rows(rows)
    m = len(int_rows)
    if m < dim:
        raise UnboundedPolytope(f"{m} halfspaces cannot bound dimension {dim}")
    a_all = [r[:dim] for r in int_rows]
    c_all = [r[dim] for r in int_rows]
    use_int64 = _hadamard_fits_int64(max_abs, dim) and \
        (math.sqrt(dim) * max_abs) ** dim * max_abs * dim * 4 < _INT64_SAFE
    dtype = np.int64 if use_int64 else object
    a_np = np.array(a_all, dtype=dtype)
    c_np = np.array(c_all, dtype=dtype)

    seen: set[Vector] = set()
    for subsets in _iter_subset_chunks(m, dim, _DET_CHUNK):
        mats = a_np[subsets]                          # (B, dim, dim)
        det0 = _batch_dets(mats, max_abs)
        keep = det0 != 0
        if not keep.any():
            continue
        idx = np.where(keep)[0]
        mats = mats[idx]
        rhs = c_np[subsets[idx]]                      # (B, dim)
        det0 = det0[idx]
        nums = []
        for j in range(dim):
            mj = mats.copy()
            mj[:, :, j] = rhs
            nums.append(_batch_dets(mj, max_abs * max(1, int(np.abs(rhs).max() if len(rhs) else 1))))
        nums = np.stack(nums, axis=1)                # (B, dim)
        negd = det0 < 0
        nums[negd] = -nums[negd]
        dens = np.where(negd, -det0, det0)
        # feasibility: a_i . num <= c_i * den for every halfspace
        lhs = a_np @ nums.T                           # (m, B)
        rhsv = c_np[:, None] * dens[None, :]
        feas = (lhs <= rhsv).all(axis=0)
        for b in np.where(feas)[0]:
            den = int(dens[b])
            vert = tuple(Fraction(int(nums[b, j]), den) for j in range(dim))
            seen.add(vert)
    return sorted(seen)


def _detect_recession(halfspaces: Sequence[Halfspace], dim: int) -> None:
    """Raise :class:`UnboundedPolytope` if the recession cone is nontrivial.

    A nontrivial pointed cone has an extreme ray tight on d-1 independent
    constraints; a non-pointed cone means rank(A) < d.  Both cases are
    covered by an exact rank check plus a scan over (d-1)-subsets.
    """
    a_rows = [[_frac(n) for n in h.normal] for h in halfspaces]
    if _frac_rank(a_rows) < dim:
        raise UnboundedPolytope("constraint normals do not span the space")
    int_rows, max_abs = _integerize_rows(a_rows)
    use_int64 = _hadamard_fits_int64(max_abs, dim) and \
        (math.sqrt(dim) * max_abs) ** dim * max_abs * dim < _INT64_SAFE
    a_num = np.array(int_rows, dtype=np.int64 if use_int64 else object)
    m = len(int_rows)
    k = dim - 1
    for subsets in _iter_subset_chunks(m, k, _DET_CHUNK):
        mats = a_num[subsets]                         # (B, k, dim)
        minors = []
        for drop in range(dim):
            keepc = [c for c in range(dim) if c != drop]
            minors.append(_batch_dets(mats[:, :, keepc], max_abs))
        rays = np.stack([((-1) ** j) * minors[j] for j in range(dim)], axis=1)
        nz = np.any(rays != 0, axis=1)
        if not nz.any():
            continue
        vals = a_num @ rays[nz].T                     # (m, B)
        bad = (vals <= 0).all(axis=0) | (vals >= 0).all(axis=0)
        if bad.any():
            b = int(np.where(bad)[0][0])
            ray = tuple(int(x) for x in rays[nz][b])
            raise UnboundedPolytope(f"recession direction {ray}")


def enumerate_vertices(h: RationalPolytope) -> RationalPolytope:
    """Vertex enumeration of a bounded H-polytope (exact, exhaustive).

    Returns a polytope carrying both representations; vertices are sorted
    canonically.  Raises :class:`UnboundedPolytope` when a recession
    direction exists.
    """
    if h.halfspaces is None:
        raise ValueError("input polytope has no halfspace representation")
    _detect_recession(h.halfspaces, h.dim)
    verts = _vertex_scan(h.halfspaces, h.dim)
    return RationalPolytope(dim=h.dim, vertices=tuple(verts),
                            halfspaces=h.halfspaces)


def enumerate_facets(v: RationalPolytope) -> RationalPolytope:
    """Facet enumeration of a full-dimensional V-polytope (exact, exhaustive).

    Facet inequalities are normalized to primitive integer normals and
    sorted canonically.  Raises :class:`DegeneratePolytope` when the points
    do not span the ambient space.
    """
    if v.vertices is None:
        raise ValueError("input polytope has no vertex representation")
    base = v.vertices[0]
    diffs = [[x - b for x, b in zip(p, base)] for p in v.vertices[1:]]
    if _frac_rank(diffs) < v.dim:
        raise DegeneratePolytope("vertex set is not full-dimensional")
    facets = _facet_scan(v.vertices, v.dim)
    hs = tuple(Halfspace(f.normal, f.offset) for f in facets)
    return RationalPolytope(dim=v.dim, vertices=v.vertices, halfspaces=hs)


# --------------------------------------------------------------------------
# exact volume by centroid-fan triangulation
# --------------------------------------------------------------------------

def _centroid(points: Sequence[Vector]) -> Vector:
    n = len(points)
    return tuple(sum(col) / n for col in zip(*points))


def _det_frac(rows: list[Sequence[Fraction]]) -> Fraction:
    ints, _ = _integerize_rows(rows)
    scale = Fraction(1)
    for orig, scaled in zip(rows, ints):
        # recover per-row scale factor exactly from any nonzero entry
        nz = next((k for k, x in enumerate(scaled) if x != 0), None)
        if nz is None:
            return Fraction(0)
        scale *= Fraction(scaled[nz]) / _frac(orig[nz])
    return Fraction(_det_int_py(ints)) / scale


def _affine_projection(points: Sequence[Vector], g: int) -> list[Vector]:
    """Project to g pivot coordinates; an affine bijection on the hull,
    so the face lattice (all the triangulation needs) is preserved."""
    base = points[0]
    diffs = [[x - b for x, b in zip(p, base)] for p in points[1:]]
    pivots = _pivot_columns(diffs)
    if len(pivots) < g:
        raise DegeneratePolytope("face has lower dimension than expected")
    cols = pivots[:g]
    return [tuple(p[c] for c in cols) for p in points]


def _triangulate(points: list[Vector], g: int) -> Iterator[tuple[Vector, ...]]:
    """Decompose the g-dimensional polytope conv(points) into g-simplices,
    fanning from the vertex centroid over recursively triangulated facets."""
    if len(points) == g + 1:
        yield tuple(points)
        return
    if g == 1:
        ordered = sorted(points)
        yield (ordered[0], ordered[-1])
        return
    proj = _affine_projection(points, g)
    z = _centroid(points)
    for face in _facet_scan(proj, g):
        face_pts = [points[i] for i in face.incident]
        for simplex in _triangulate(face_pts, g - 1):
            yield (z, *simplex)


def exact_volume(p: RationalPolytope) -> Fraction:
    """Exact volume of a full-dimensional rational V-polytope, dim <= 4.

    Triangulates by fanning from the vertex centroid over facet
    triangulations; each simplex contributes |det| / d!.
    """
    if p.vertices is None:
        raise ValueError("exact_volume needs a vertex representation")
    d = p.dim
    if d > 4:
        raise ValueError("exact_volume supports dimension <= 4")
    verts = list(p.vertices)
    if len(verts) < d + 1:
        raise DegeneratePolytope("too few vertices to be full-dimensional")
    base = verts[0]
    diffs = [[x - b for x, b in zip(v, base)] for v in verts[1:]]
    if _frac_rank(diffs) < d:
        raise DegeneratePolytope("polytope is not full-dimensional")
    factorial = math.factorial(d)
    if len(verts) == d + 1:
        rows = [[x - b for x, b in zip(v, base)] for v in verts[1:]]
        return abs(_det_frac(rows)) / factorial
    z = _centroid(verts)
    total = Fraction(0)
    for facet in _facet_scan(verts, d):
        face_pts = [verts[i] for i in facet.incident]
        for simplex in _triangulate(face_pts, d - 1):
            rows = [[x - zi for x, zi in zip(s, z)] for s in simplex]
            total += abs(_det_frac(rows))
    return total / factorial
