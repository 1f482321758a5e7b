"""Windows of the cut-and-project description of the Kolakoski-(3,1) tiling.

The internal plane carries an iterated function system whose attractor is the
combined window of the A and B tiles; the three letter windows are affine
images of it.  Everything algebraic (map identities, junction points) is done
exactly in Q(t) + i*Im(b)*Q(t); everything geometric (rhombus separation,
membership, areas, box dimension) is double precision with explicit margins.

Map registry, with b the contracting conjugate root:

    f1: z -> b z               f2: z -> b^3 z + b^3     f3: z -> b z + b^2 - b
    f0: z -> b z + b^2         f4: z -> b^2 z + b^2
    g1: z -> -b^2 z - b        g2: z -> (2 b^2+1) z + b^2 + 1
    g3: z -> -b^2 z - b^2
    tau:   z -> -z - b         (inversion through the window center)
    kappa: z -> -z - b + 1     (inversion through the right-edge midpoint)

The combined window W satisfies W = f1(W) u f2(W) u f3(W); the letter windows
are A = f1(W), B = f2(W) u f3(W), C = f4(W); the fractal right edge is the
attractor of {g1, g2, g3}.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np
from scipy.spatial import cKDTree

from .cubic import (
    CONSTANTS,
    CubicNumber,
    InternalPoint,
    T,
    embed_internal,
    internal_decompose,
)
from .errors import ResourceCapError
from .geometry import (
    as_xy,
    containment_margin,
    convex_hull,
    depth_in_convex,
    is_ccw_convex,
    separation_margin,
    winding_number,
)

MAX_FULL_DEPTH = 25
MAX_RANDOM_SAMPLES = 10**8
MAX_MEMBERSHIP_DEPTH = 40


@dataclass(frozen=True)
class AffineSimilarity:
    """Exact affine map z -> mult*z + off on the internal plane."""

    mult: InternalPoint
    off: InternalPoint

    def __call__(self, z: InternalPoint) -> InternalPoint:
        return self.mult * z + self.off

    def compose(self, other: "AffineSimilarity") -> "AffineSimilarity":
        """self after other: (self.compose(other))(z) = self(other(z))."""
        return AffineSimilarity(
            self.mult * other.mult, self.mult * other.off + self.off
        )

    def numeric(self) -> tuple[complex, complex]:
        return embed_internal(self.mult), embed_internal(self.off)


def map_compose(a: AffineSimilarity, b: AffineSimilarity) -> AffineSimilarity:
    return a.compose(b)


def _star(c0, c1, c2) -> InternalPoint:
    return internal_decompose(CubicNumber.of(c0, c1, c2))


def _half(c0: int, c1: int, c2: int) -> InternalPoint:
    """Internal point (c0 + c1 b + c2 b^2)/2."""
    return _star(Fraction(c0, 2), Fraction(c1, 2), Fraction(c2, 2))


_B = _star(0, 1, 0)       # b
_B2 = _star(0, 0, 1)      # b^2
_B3 = _star(1, 0, 2)      # b^3 = 2 b^2 + 1
_ONE = _star(1, 0, 0)
_ZERO = InternalPoint.of(0, 0)

IDENTITY = AffineSimilarity(_ONE, _ZERO)

#: window-system maps (contraction exponents 1, 1, 3, 1, 2 powers of |b|)
WINDOW_MAPS = {
    "f0": AffineSimilarity(_B, _B2),
    "f1": AffineSimilarity(_B, _ZERO),
    "f2": AffineSimilarity(_B3, _B3),
    "f3": AffineSimilarity(_B, _B2 - _B),
    "f4": AffineSimilarity(_B2, _B2),
}

#: right-edge maps (contraction exponents 2, 3, 2)
EDGE_MAPS = {
    "g1": AffineSimilarity(-_B2, -_B),
    "g2": AffineSimilarity(_B3, _B2 + _ONE),
    "g3": AffineSimilarity(-_B2, -_B2),
}

#: inversion through the window center (-b/2)
CENTER_FLIP = AffineSimilarity(-_ONE, -_B)
#: inversion through the right-edge midpoint ((1-b)/2)
EDGE_FLIP = AffineSimilarity(-_ONE, _ONE - _B)

#: |b|-exponent of each map's contraction ratio
MAP_WEIGHT = {"f1": 1, "f2": 3, "f3": 1, "f0": 1, "f4": 2, "g1": 2, "g2": 3, "g3": 2}


def _build_points() -> dict:
    """Junction points of the window boundary.

    P1 is the fixed point of the four-map edge cycle; the others follow from
    map images and midpoints.  Closed forms are re-derived independently in
    verify_point_identities.
    """
    f1, f2, f3 = WINDOW_MAPS["f1"], WINDOW_MAPS["f2"], WINDOW_MAPS["f3"]
    g1, g2, g3 = EDGE_MAPS["g1"], EDGE_MAPS["g2"], EDGE_MAPS["g3"]
    cycle = f3.compose(f1).compose(f1).compose(f3)
    p1 = (_ONE - cycle.mult).inverse() * cycle.off
    p = {1: p1, 2: f3(p1)}
    p[3] = f1(p[2])
    p[4] = f1(p[3])
    p[5] = (p[1] + p[3]).scale(Fraction(1, 2))
    p[6] = f3(p[3])
    p[7] = f1(p[4])
    p[8] = f2(p[3])
    p[9] = f1(p[1])
    p[10] = (p[2] + p[3]).scale(Fraction(1, 2))
    p[11] = g2(g1(p[3]))
    p[12] = g1(g2(p[2]))
    p[13] = g1(g3(p[2]))
    p[14] = g1(g3(p[10]))
    return p


POINTS = _build_points()

#: Table of closed forms (c0 + c1 b + c2 b^2)/2 for the junction points
POINT_CLOSED_FORMS = {
    1: (-1, -3, 1),
    2: (1, -3, 1),
    3: (1, 1, -1),
    4: (-1, 1, -1),
    5: (0, -1, 0),
    6: (-1, -1, 1),
    7: (-1, -1, -1),
    8: (1, -1, 1),
    9: (1, -1, -1),
    10: (1, -1, 0),
    11: (5, 1, 9),
    12: (-1, -3, -3),
    13: (3, -1, 5),
    14: (2, -1, 3),
}


def rhombus_corners() -> np.ndarray:
    """Corners of the rhombus that confines the fractal right edge, as
    complex numbers in counterclockwise order.

    The diagonal along the chord from P2 to P3 is stretched by 2/5 beyond
    each endpoint; the perpendicular half-diagonal is 2/5 of the chord.
    """
    p2 = embed_internal(POINTS[2])
    p3 = embed_internal(POINTS[3])
    p10 = embed_internal(POINTS[10])
    chord = embed_internal(POINTS[2] - POINTS[3])  # b^2 - 2 b
    e = Fraction(2, 5)
    e1 = p10 - 1j * float(e) * chord
    e2 = p2 + float(e) * chord
    e3 = p10 + 1j * float(e) * chord
    e4 = p3 - float(e) * chord
    corners = np.array([e1, e2, e3, e4])
    quad = as_xy(corners)
    if not is_ccw_convex(quad):
        quad = quad[::-1]
    if not is_ccw_convex(quad):
        raise ValueError("degenerate rhombus")
    return quad[:, 0] + 1j * quad[:, 1]


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    margin: float | None = None
    info: str = ""


def _map_eq(a: AffineSimilarity, b: AffineSimilarity) -> bool:
    return a.mult == b.mult and a.off == b.off


def verify_map_identities() -> list[CheckResult]:
    """Exact identities among the registry maps (zero tolerance)."""
    f0, f1, f2, f3, f4 = (WINDOW_MAPS[k] for k in ("f0", "f1", "f2", "f3", "f4"))
    g1, g2, g3 = (EDGE_MAPS[k] for k in ("g1", "g2", "g3"))
    tau, kap = CENTER_FLIP, EDGE_FLIP
    c = lambda *ms: ms[0] if len(ms) == 1 else ms[0].compose(c(*ms[1:]))
    cases = [
        ("f1.tau == tau.f3", c(f1, tau), c(tau, f3)),
        ("f2.tau == tau.f2", c(f2, tau), c(tau, f2)),
        ("f3.tau == tau.f1", c(f3, tau), c(tau, f1)),
        ("g1.kappa == kappa.g3", c(g1, kap), c(kap, g3)),
        ("g2.kappa == kappa.g2", c(g2, kap), c(kap, g2)),
        ("g3.kappa == kappa.g1", c(g3, kap), c(kap, g1)),
        ("f2.tau.f1 == f3.kappa.g2", c(f2, tau, f1), c(f3, kap, g2)),
        ("f2 == f3.kappa.g3", f2, c(f3, kap, g3)),
        ("g1 == f3.tau.f1", g1, c(f3, tau, f1)),
        ("g3 == f1.tau.f1", g3, c(f1, tau, f1)),
        ("g2 == f1.tau.f1.tau.f1", g2, c(f1, tau, f1, tau, f1)),
        ("f1.f4 == f2", c(f1, f4), f2),
        ("f0.f1 == f4", c(f0, f1), f4),
        ("identity.f3 == f3", c(IDENTITY, f3), f3),
    ]
    return [CheckResult(name, _map_eq(a, b)) for name, a, b in cases]


def verify_point_identities() -> list[CheckResult]:
    """Exact relations among the junction points, including closed forms."""
    p = POINTS
    f1, f2, f3 = WINDOW_MAPS["f1"], WINDOW_MAPS["f2"], WINDOW_MAPS["f3"]
    g1, g2, g3 = EDGE_MAPS["g1"], EDGE_MAPS["g2"], EDGE_MAPS["g3"]
    tau, kap = CENTER_FLIP, EDGE_FLIP
    half = Fraction(1, 2)
    cycle = f3.compose(f1).compose(f1).compose(f3)
    cases = [
        ("P2 == f3(P1)", p[2] == f3(p[1])),
        ("P3 == f1(P2)", p[3] == f1(p[2])),
        ("P4 == f1(P3)", p[4] == f1(p[3])),
        ("P1 == f3(P4)", p[1] == f3(p[4])),
        ("edge cycle mult == b^4", cycle.mult == _star(2, 1, 4)),
        ("edge cycle off == 6 b^2 + 2", cycle.off == _star(2, 0, 6)),
        ("cycle fixes P1", cycle(p[1]) == p[1]),
        ("P5 == (P1+P3)/2", p[5] == (p[1] + p[3]).scale(half)),
        ("P5 == (P2+P4)/2", p[5] == (p[2] + p[4]).scale(half)),
        ("P5 == (P6+P9)/2", p[5] == (p[6] + p[9]).scale(half)),
        ("P5 == (P7+P8)/2", p[5] == (p[7] + p[8]).scale(half)),
        ("P6 == f3(P3)", p[6] == f3(p[3])),
        ("P7 == f1(P4)", p[7] == f1(p[4])),
        ("P7 == f2(P1)", p[7] == f2(p[1])),
        ("P7 == f3(P9)", p[7] == f3(p[9])),
        ("P8 == f2(P3)", p[8] == f2(p[3])),
        ("P8 == f1(P6)", p[8] == f1(p[6])),
        ("P8 == f3(P2)", p[8] == f3(p[2])),
        ("P8 == kappa(P9)", p[8] == kap(p[9])),
        ("P9 == f1(P1)", p[9] == f1(p[1])),
        ("P10 == (P2+P3)/2", p[10] == (p[2] + p[3]).scale(half)),
        ("P10 == (P8+P9)/2", p[10] == (p[8] + p[9]).scale(half)),
        ("P1 == tau(P3)", p[1] == tau(p[3])),
        ("P2 == tau(P4)", p[2] == tau(p[4])),
        ("P2 == kappa(P3)", p[2] == kap(p[3])),
        ("P6 == tau(P9)", p[6] == tau(p[9])),
        ("P7 == tau(P8)", p[7] == tau(p[8])),
        # orientation of the edge subdivision (determined by evaluation)
        ("g1: P2 -> P2", g1(p[2]) == p[2]),
        ("g1: P3 -> P8", g1(p[3]) == p[8]),
        ("g2: P2 -> P8", g2(p[2]) == p[8]),
        ("g2: P3 -> P9", g2(p[3]) == p[9]),
        ("g3: P2 -> P9", g3(p[2]) == p[9]),
        ("g3: P3 -> P3", g3(p[3]) == p[3]),
    ]
    for idx, (c0, c1, c2) in POINT_CLOSED_FORMS.items():
        cases.append((f"P{idx} closed form", p[idx] == _half(c0, c1, c2)))
    return [CheckResult(name, ok) for name, ok in cases]


# ---------------------------------------------------------------------------
# numeric map tables

def _numeric_maps(names, registry=None):
    reg = {**WINDOW_MAPS, **EDGE_MAPS} if registry is None else registry
    ms, os_ = [], []
    for n in names:
        m, o = reg[n].numeric()
        ms.append(m)
        os_.append(o)
    return np.array(ms), np.array(os_)


_WIN_NAMES = ("f1", "f2", "f3")
_WIN_M, _WIN_O = _numeric_maps(_WIN_NAMES)
_EDGE_NAMES = ("g1", "g2", "g3")
_EDGE_M, _EDGE_O = _numeric_maps(_EDGE_NAMES)
_LABEL_MAPS = {
    "A": ("f1",),
    "B": ("f2", "f3"),
    "C": ("f4",),
    "Omega": ("f1", "f2", "f3", "f4"),
    "AB": (),
}

_SEED = embed_internal(POINTS[5])

#: exact squared contraction ratios of f1, f2, f3 (sum to one)
BRANCH_PROBS_EXACT = (T.inverse(), (T ** 3).inverse(), T.inverse())


@dataclass
class PointCloud:
    label: str
    points: np.ndarray
    mode: str
    depth: int | None = None
    samples: int | None = None
    seed: int | None = None


def _full_depth_leaf_maps(names, weights, depth: int, start=None):
    """Vectorized enumeration of all composition words whose contraction
    exponent reaches ``depth`` exactly; returns (mult, off) arrays."""
    m0, o0 = (np.array([1 + 0j]), np.array([0j])) if start is None else start
    ms, os_ = _numeric_maps(names)
    ws = [MAP_WEIGHT[n] for n in names] if weights is None else list(weights)
    buckets_m = [[] for _ in range(depth + 1)]
    buckets_o = [[] for _ in range(depth + 1)]
    buckets_m[0].append(m0)
    buckets_o[0].append(o0)
    for w in range(depth):
        if not buckets_m[w]:
            continue
        m = np.concatenate(buckets_m[w])
        o = np.concatenate(buckets_o[w])
        buckets_m[w] = [m]
        buckets_o[w] = [o]
        for mj, oj, wj in zip(ms, os_, ws):
            if w + wj <= depth:
                buckets_m[w + wj].append(m * mj)
                buckets_o[w + wj].append(m * oj + o)
    return np.concatenate(buckets_m[depth]), np.concatenate(buckets_o[depth])


def attractor_cloud(
    label: str = "AB",
    depth: int | None = None,
    samples: int | None = None,
    seed: int | None = None,
) -> PointCloud:
    """Points of a letter window, either by exhaustive address enumeration to
    a contraction depth, or by random addresses with the squared-ratio branch
    probabilities (asymptotically area-uniform)."""
    if label not in _LABEL_MAPS:
        raise ValueError(f"unknown window label {label!r}")
    if depth is not None:
        if depth > MAX_FULL_DEPTH:
            raise ResourceCapError(f"depth {depth} exceeds cap {MAX_FULL_DEPTH}")
        if depth < 0:
            raise ValueError("depth must be nonnegative")
        m, o = _full_depth_leaf_maps(_WIN_NAMES, None, depth)
        base = m * _SEED + o
        mode = "full_depth"
    else:
        if samples is None:
            raise ValueError("need depth or samples")
        if samples > MAX_RANDOM_SAMPLES:
            raise ResourceCapError(f"samples {samples} exceeds cap {MAX_RANDOM_SAMPLES}")
        rng = np.random.default_rng(seed)
        base = sample_window("AB", samples, rng)
        mode = "random"
    pts = base
    names = _LABEL_MAPS[label]
    if names:
        ms, os_ = _numeric_maps(names)
        pts = np.concatenate([mj * base + oj for mj, oj in zip(ms, os_)])
    return PointCloud(label=label, points=pts, mode=mode, depth=depth, samples=samples, seed=seed)


def sample_window(
    label: str,
    n: int,
    rng: np.random.Generator,
    steps: int = 40,
    fast: bool = True,
) -> np.ndarray:
    """Area-uniform random points of a letter window.

    Addresses are drawn with branch probabilities equal to the squared
    contraction ratios (1/t, 1/t**3, 1/t), which sum to one exactly; a
    truncated address of ``steps`` contraction units biases each sample by at
    most |b|**steps times the window diameter.
    """
    if n > MAX_RANDOM_SAMPLES:
        raise ResourceCapError(f"samples {n} exceeds cap {MAX_RANDOM_SAMPLES}")
    alpha = CONSTANTS.root
    p1 = 1.0 / alpha
    p2 = p1 / (alpha * alpha)
    c1, c2 = p1, p1 + p2
    fdtype = np.float32 if fast else np.float64
    cdtype = np.complex64 if fast else np.complex128
    mult = _WIN_M.astype(cdtype)
    off = _WIN_O.astype(cdtype)
    u = rng.random((steps, n), dtype=fdtype)
    z = np.full(n, _SEED, dtype=cdtype)
    for t in range(steps):
        idx = (u[t] > c1).view(np.int8) + (u[t] > c2).view(np.int8)
        z = np.take(mult, idx) * z + np.take(off, idx)
    names = _LABEL_MAPS[label]
    if not names:
        return z.astype(np.complex128)
    ms, os_ = _numeric_maps(names)
    # component probabilities proportional to sub-window areas |m|^2
    weights = np.array([abs(m) ** 2 for m in ms])
    cum = np.cumsum(weights / weights.sum())
    comp = np.searchsorted(cum, rng.random(n, dtype=fdtype)).clip(0, len(names) - 1)
    z = np.take(ms.astype(cdtype), comp) * z + np.take(os_.astype(cdtype), comp)
    return z.astype(np.complex128)


def edge_polyline(depth: int) -> np.ndarray:
    """Ordered points along the fractal right edge at contraction depth
    ``depth``: leaf images of the edge start point, finishing at the end
    point.  Consecutive entries bound a piece of diameter at most
    |b|**(depth-1) times the edge diameter."""
    if depth > MAX_FULL_DEPTH:
        raise ResourceCapError(f"depth {depth} exceeds cap {MAX_FULL_DEPTH}")
    p2 = embed_internal(POINTS[2])
    p3 = embed_internal(POINTS[3])
    ms, os_ = _EDGE_M, _EDGE_O
    ws = [MAP_WEIGHT[n] for n in _EDGE_NAMES]
    out: list[complex] = []

    # depth-first in address order keeps the points ordered along the curve
    def rec(m, o, w):
        if w + min(ws) > depth:
            out.append(m * p2 + o)
            return
        for mj, oj, wj in zip(ms, os_, ws):
            if w + wj <= depth:
                rec(m * mj, m * oj + o, w + wj)
            else:
                # cannot refine this branch further within the budget
                out.append((m * mj) * p2 + (m * oj + o))
    rec(np.complex128(1), np.complex128(0), 0)
    out.append(p3)
    return np.array(out)


def edge_cloud_points(depth: int) -> np.ndarray:
    """Edge points as a set: every leaf start point plus the final endpoint.
    Consecutive leaves share endpoints, so the set is exactly symmetric under
    the edge inversion."""
    return edge_polyline(depth)


def closed_boundary_polyline(depth: int) -> np.ndarray:
    """Closed boundary of the combined window as an ordered polyline:
    right edge, then its images under f1, the center inversion, and both,
    traversed consistently; first point repeated at the end."""
    edge = edge_polyline(depth)
    f1m, f1o = WINDOW_MAPS["f1"].numeric()
    tm, to = CENTER_FLIP.numeric()
    part1 = edge                      # P2 -> P3
    part2 = f1m * edge + f1o          # P3 -> P4
    part3 = tm * part1 + to           # P4 -> P1
    part4 = tm * part2 + to           # P1 -> P2
    closed = np.concatenate([part1[:-1], part2[:-1], part3[:-1], part4[:-1], part1[:1]])
    return closed


def boundary_cloud(depth: int, scope: str = "window") -> PointCloud:
    """Boundary points: the right edge (scope="edge"), all four edges of the
    combined window (scope="window"), or the boundaries of all letter windows
    (scope="full", the images of the window boundary under f1..f4)."""
    if scope == "edge":
        pts = edge_polyline(depth)
    else:
        pts = closed_boundary_polyline(depth)[:-1]
        if scope == "full":
            ms, os_ = _numeric_maps(("f1", "f2", "f3", "f4"))
            pts = np.concatenate([m * pts + o for m, o in zip(ms, os_)])
        elif scope != "window":
            raise ValueError(f"unknown scope {scope!r}")
    return PointCloud(label=f"boundary:{scope}", points=pts, mode="full_depth", depth=depth)


_EDGE_DIAM = None


def _edge_diameter_bound() -> float:
    """Upper bound for the diameter of the fractal edge: the long diagonal of
    its confining rhombus."""
    global _EDGE_DIAM
    if _EDGE_DIAM is None:
        q = rhombus_corners()
        _EDGE_DIAM = float(max(abs(q[0] - q[2]), abs(q[1] - q[3])))
    return _EDGE_DIAM


def piece_diameter_bound(depth: int) -> float:
    """Diameter bound for one leaf piece of the edge at the given depth."""
    return abs(embed_internal(_B)) ** (depth - 1) * _edge_diameter_bound()


class WindowOracle:
    """Membership engine for the combined window.

    Certificates, all with explicit slack:
      * outside the convex hull of the four edge-confining rhombi -> Outside;
      * further than twice the piece-diameter bound from the boundary
        polyline -> decided by winding number (the true boundary stays within
        one piece diameter of the polyline, so the parity is that of the true
        Jordan curve);
      * otherwise descend through the inverse maps and retry, which magnifies
        the neighborhood by 1/|b| per level.
    """

    def __init__(self, polyline_depth: int = 16):
        self.polyline_depth = polyline_depth
        closed = closed_boundary_polyline(polyline_depth)
        self.polyline = as_xy(closed)
        self.tree = cKDTree(self.polyline[:-1])
        self.delta = piece_diameter_bound(polyline_depth)
        self.threshold = 2.0 * self.delta + 1e-12
        quads = [rhombus_corners()]
        for name in ("f1",):
            m, o = WINDOW_MAPS[name].numeric()
            quads.append(m * quads[0] + o)
        tm, to = CENTER_FLIP.numeric()
        quads.append(tm * quads[0] + to)
        quads.append(tm * quads[1] + to)
        self.hull = convex_hull(np.concatenate(quads))
        # inverse maps of f1, f2, f3
        self.inv = [(1.0 / m, -o / m) for m, o in zip(_WIN_M, _WIN_O)]

    def _certify(self, z: np.ndarray) -> np.ndarray:
        """+1 inside / -1 outside / 0 unresolved at this scale."""
        out = np.zeros(len(z), dtype=np.int8)
        xy = as_xy(z)
        hull_depth = depth_in_convex(self.hull, xy)
        out[hull_depth < -1e-9] = -1
        todo = out == 0
        if np.any(todo):
            d, _ = self.tree.query(xy[todo])
            far = d > self.threshold
            idx = np.flatnonzero(todo)
            if np.any(far):
                w = winding_number(self.polyline, xy[idx[far]])
                val = np.where(w != 0, 1, -1).astype(np.int8)
                out[idx[far]] = val
        return out

    def decide(self, points, max_depth: int = 30) -> np.ndarray:
        """Vectorized verdicts for points of the internal plane:
        +1 Inside, -1 Outside, 0 Undecided at this depth."""
        if max_depth > MAX_MEMBERSHIP_DEPTH:
            raise ResourceCapError(
                f"max_depth {max_depth} exceeds cap {MAX_MEMBERSHIP_DEPTH}"
            )
        z0 = np.asarray(points, dtype=np.complex128).ravel()
        n = len(z0)
        verdict = np.zeros(n, dtype=np.int8)
        ids = np.arange(n)
        cand = z0.copy()
        live = np.ones(n, dtype=np.int64)
        for level in range(max_depth + 1):
            if len(cand) == 0:
                break
            cert = self._certify(cand)
            ins = cert == 1
            if np.any(ins):
                verdict[ids[ins]] = 1
            undecided_pt = verdict[ids] == 0
            dead = (cert == -1) & undecided_pt
            if np.any(dead):
                np.subtract.at(live, ids[dead], 1)
                verdict[(live == 0) & (verdict == 0)] = -1
            keep = (cert == 0) & (verdict[ids] == 0)
            ids, cand = ids[keep], cand[keep]
            if level == max_depth or len(cand) == 0:
                break
            # spawn the three inverse-map children
            child_ids = np.repeat(ids, 3)
            child = np.empty(len(cand) * 3, dtype=np.complex128)
            for j, (im, io) in enumerate(self.inv):
                child[j::3] = cand * im + io
            # fold child bookkeeping into live counts: replace 1 by (kept)
            xy = as_xy(child)
            inside_hull = depth_in_convex(self.hull, xy) >= -1e-9
            # deduplicate identical candidates per id (map fixed points)
            key_r = np.round(child.real, 12)
            key_i = np.round(child.imag, 12)
            order = np.lexsort((key_i, key_r, child_ids))
            dup = np.zeros(len(child), dtype=bool)
            so = order[1:]
            po = order[:-1]
            dup[so] = (
                (child_ids[so] == child_ids[po])
                & (key_r[so] == key_r[po])
                & (key_i[so] == key_i[po])
            )
            keep_child = inside_hull & ~dup
            delta_counts = np.bincount(
                child_ids[keep_child], minlength=n
            ) - np.bincount(ids, minlength=n)
            live += delta_counts
            verdict[(live == 0) & (verdict == 0)] = -1
            ids, cand = child_ids[keep_child], child[keep_child]
            alive = verdict[ids] == 0
            ids, cand = ids[alive], cand[alive]
        return verdict


@lru_cache(maxsize=2)
def window_oracle(polyline_depth: int = 16) -> WindowOracle:
    return WindowOracle(polyline_depth)


_VERDICT = {1: "Inside", -1: "Outside", 0: "Undecided"}


def decide_window(label: str, points, max_depth: int = 30) -> np.ndarray:
    """Verdicts (+1/-1/0) for membership of points in a letter window."""
    z = np.asarray(points, dtype=np.complex128).ravel()
    names = _LABEL_MAPS[label]
    oracle = window_oracle()
    if not names:
        return oracle.decide(z, max_depth)
    verdicts = []
    for name in names:
        m, o = WINDOW_MAPS[name].numeric()
        verdicts.append(oracle.decide((z - o) / m, max_depth))
    v = np.stack(verdicts)
    out = np.zeros(len(z), dtype=np.int8)
    out[np.any(v == 1, axis=0)] = 1
    out[np.all(v == -1, axis=0)] = -1
    return out


def membership(z: complex, max_depth: int = 30, label: str = "AB") -> str:
    """Inside / Outside / Undecided verdict for a single point."""
    return _VERDICT[int(decide_window(label, [z], max_depth)[0])]


def rhombus_verify() -> list[CheckResult]:
    """Geometric separation conditions that make the edge subdivision
    non-self-intersecting; margins are signed distances (positive = condition
    holds strictly)."""
    r = rhombus_corners()

    def image(names):
        q = r
        for name in reversed(names):
            m, o = EDGE_MAPS[name].numeric()
            q = m * q + o
        return q

    g = {name: image([name]) for name in ("g1", "g2", "g3")}
    results = []
    for name in ("g1", "g2", "g3"):
        margin = containment_margin(as_xy(g[name]), as_xy(r))
        results.append(CheckResult(f"{name}(R) inside R", margin > 1e-6, margin))
    margin = separation_margin(as_xy(g["g1"]), as_xy(g["g3"]))
    results.append(CheckResult("g1(R) disjoint g3(R)", margin > 1e-6, margin))

    families = [
        ("g1", "g2", 1),  # g1(R) vs g2(gi(R)) intersects only for i = 1
        ("g2", "g1", 3),
        ("g2", "g3", 1),
        ("g3", "g2", 3),
    ]
    for outer, mid, meet in families:
        for i in (1, 2, 3):
            q = image([mid, f"g{i}"])
            margin = separation_margin(as_xy(g[outer]), as_xy(q))
            name = f"{outer}(R) vs {mid}(g{i}(R))"
            if i == meet:
                results.append(
                    CheckResult(name + " [neighbours intersect]", margin < -1e-6, margin)
                )
            else:
                results.append(CheckResult(name + " disjoint", margin > 1e-6, margin))
    return results


def inner_point_check(depth: int = 18, threshold: float = 0.01) -> list[CheckResult]:
    """The two seeds of the physical iteration project to interior points:
    0 in the A window and -b in the f3 part of the B window."""
    edge = closed_boundary_polyline(depth)[:-1]
    results = []
    for name, z in (("f1", 0j), ("f3", embed_internal(-T))):
        m, o = WINDOW_MAPS[name].numeric()
        cloud = m * edge + o
        dist = float(np.min(np.abs(cloud - z)))
        verdict = membership(z, max_depth=30, label="AB")
        results.append(
            CheckResult(
                f"dist({z:.4g}, boundary of {name}(W)) > {threshold}",
                dist > threshold and verdict == "Inside",
                dist,
                info=f"membership={verdict}",
            )
        )
    far = membership(10 + 0j, max_depth=5)
    results.append(CheckResult("far point is Outside", far == "Outside", info=far))
    return results


def area_estimate(
    label: str = "Omega",
    samples: int = 40_000,
    seed: int = 0,
    max_depth: int = 30,
) -> tuple[float, float, float]:
    """Monte Carlo area of a letter window from membership verdicts on a
    bounding box; returns (area, standard error, undecided fraction)."""
    if samples < 10**4:
        raise ValueError("need at least 1e4 samples")
    oracle = window_oracle()
    hull = oracle.hull
    corners = []
    if label == "AB":
        corners.append(hull)
    else:
        for name in _LABEL_MAPS[label]:
            m, o = WINDOW_MAPS[name].numeric()
            corners.append(m * (hull[:, 0] + 1j * hull[:, 1]) + o)
    pts = np.concatenate([as_xy(c) for c in corners])
    lo = pts.min(axis=0)
    hi = pts.max(axis=0)
    box_area = float(np.prod(hi - lo))
    rng = np.random.default_rng(seed)
    xy = lo + rng.random((samples, 2)) * (hi - lo)
    z = xy[:, 0] + 1j * xy[:, 1]
    v = decide_window(label, z, max_depth)
    p_in = float(np.mean(v == 1))
    undecided = float(np.mean(v == 0))
    area = box_area * p_in
    stderr = box_area * math.sqrt(max(p_in * (1 - p_in), 1e-12) / samples)
    return area, stderr, undecided


def boundary_dimension(
    depth: int = 16, octaves: tuple[int, ...] = (3, 4, 5, 6, 7)
) -> tuple[float, float]:
    """Box-counting dimension estimate of the window boundary cloud and the
    exact similarity-dimension target -log(golden ratio)/log|b|."""
    if depth < 12:
        raise ValueError("need depth >= 12 for a stable count")
    pts = as_xy(closed_boundary_polyline(depth)[:-1])
    est = box_counting_slope(pts, octaves)
    phi = (1 + math.sqrt(5)) / 2
    target = -math.log(phi) / math.log(abs(embed_internal(T)))
    return est, target


def box_counting_slope(pts_xy: np.ndarray, octaves=(3, 4, 5, 6, 7)) -> float:
    """Least-squares slope of log N(eps) against log(1/eps) over dyadic box
    sizes eps = extent / 2**k."""
    lo = pts_xy.min(axis=0)
    extent = float(np.max(pts_xy.max(axis=0) - lo))
    logs_n, logs_inv = [], []
    for k in octaves:
        eps = extent / 2**k
        cells = np.floor((pts_xy - lo) / eps).astype(np.int64)
        count = len(np.unique(cells[:, 0] + (cells[:, 1] << 32)))
        logs_n.append(math.log(count))
        logs_inv.append(math.log(1.0 / eps))
    slope = np.polyfit(logs_inv, logs_n, 1)[0]
    return float(slope)


def segment_control_dimension(n: int = 50_000, octaves=(4, 5, 6, 7, 8)) -> float:
    """Estimator sanity: a straight segment must come out near dimension 1.

    Finer octaves than for the fractal cloud: a line hits about c*2**k + 1
    boxes and the +1 biases the slope low at coarse scales.
    """
    t = np.linspace(0.0, 1.0, n)
    pts = np.column_stack([t, 0.5 * t])
    return box_counting_slope(pts, octaves)


#: lattice of window translations: the window tiles the plane by these two
TILING_BASIS = (internal_decompose(CubicNumber.of(1, -1, 0)),
                internal_decompose(CubicNumber.of(0, -2, 1)))


def tiling_translates() -> list[complex]:
    """Translates that can reach the centered fundamental cell, found from
    bounding boxes of the window and the cell (a superset of what is needed,
    so missing covers cannot go unnoticed)."""
    t1 = embed_internal(TILING_BASIS[0])
    t2 = embed_internal(TILING_BASIS[1])
    hull = window_oracle().hull
    hz = hull[:, 0] + 1j * hull[:, 1]
    win = np.concatenate(
        [m * hz + o for m, o in zip(*_numeric_maps(("f1", "f2", "f3", "f4")))]
    )
    wlo, whi = as_xy(win).min(axis=0), as_xy(win).max(axis=0)
    cell = np.array(
        [a * t1 + b * t2 for a in (-0.5, 0.5) for b in (-0.5, 0.5)]
    )
    clo, chi = as_xy(cell).min(axis=0), as_xy(cell).max(axis=0)
    out = []
    for i in range(-3, 4):
        for j in range(-3, 4):
            t = i * t1 + j * t2
            # cell - t must meet the window bounding box to matter
            if (
                clo[0] - t.real <= whi[0]
                and chi[0] - t.real >= wlo[0]
                and clo[1] - t.imag <= whi[1]
                and chi[1] - t.imag >= wlo[1]
            ):
                out.append(t)
    return out


@dataclass(frozen=True)
class TilingReport:
    samples: int
    decided: int
    covered_once: int
    multi_covered: int
    uncovered: int
    translates: int
    seed: int

    @property
    def ok(self) -> bool:
        return (
            self.decided >= 0.99 * self.samples
            and self.multi_covered == 0
            and self.uncovered == 0
        )


def tiling_check(samples: int = 10_000, seed: int = 0, max_depth: int = 30) -> TilingReport:
    """Sample the centered fundamental cell of the tiling lattice and verify
    that every decided sample lies in exactly one window translate."""
    if samples > 10**6:
        raise ResourceCapError("samples exceed cap 1e6")
    rng = np.random.default_rng(seed)
    t1 = embed_internal(TILING_BASIS[0])
    t2 = embed_internal(TILING_BASIS[1])
    ab = rng.random((samples, 2)) - 0.5
    z = ab[:, 0] * t1 + ab[:, 1] * t2
    translates = tiling_translates()
    counts = np.zeros(samples, dtype=np.int64)
    any_undecided = np.zeros(samples, dtype=bool)
    for t in translates:
        v = decide_window("Omega", z - t, max_depth)
        counts += v == 1
        any_undecided |= v == 0
    decided = ~any_undecided
    covered_once = int(np.sum(decided & (counts == 1)))
    multi = int(np.sum(decided & (counts > 1)))
    uncovered = int(np.sum(decided & (counts == 0)))
    return TilingReport(
        samples=samples,
        decided=int(np.sum(decided)),
        covered_once=covered_once,
        multi_covered=multi,
        uncovered=uncovered,
        translates=len(translates),
        seed=seed,
    )


def _hausdorff(a: np.ndarray, b: np.ndarray) -> float:
    ta, tb = cKDTree(as_xy(a)), cKDTree(as_xy(b))
    d1, _ = tb.query(as_xy(a))
    d2, _ = ta.query(as_xy(b))
    return float(max(d1.max(), d2.max()))


def ifs_consistency(depth: int = 14) -> list[CheckResult]:
    """Set-level self-consistency of the window system at finite depth:
    Hausdorff distance between each window cloud and the union of its
    defining images."""
    if depth > 20:
        raise ResourceCapError("depth exceeds cap 20")
    cloud = {lab: attractor_cloud(lab, depth=depth).points for lab in ("A", "B", "C", "AB")}
    num = {k: WINDOW_MAPS[k].numeric() for k in WINDOW_MAPS}

    def img(name, pts):
        m, o = num[name]
        return m * pts + o

    tol = 1e-2
    cases = [
        (
            "W == f1(W) u f2(W) u f3(W)",
            cloud["AB"],
            np.concatenate([img("f1", cloud["AB"]), img("f2", cloud["AB"]), img("f3", cloud["AB"])]),
        ),
        (
            "A == f1(A) u f1(B)",
            cloud["A"],
            np.concatenate([img("f1", cloud["A"]), img("f1", cloud["B"])]),
        ),
        (
            "B == f3(A) u f3(B) u f1(C)",
            cloud["B"],
            np.concatenate([img("f3", cloud["A"]), img("f3", cloud["B"]), img("f1", cloud["C"])]),
        ),
        ("C == f0(A)", cloud["C"], img("f0", cloud["A"])),
    ]
    out = []
    for name, a, b in cases:
        d = _hausdorff(a, b)
        out.append(CheckResult(name, d <= tol, d))
    return out
