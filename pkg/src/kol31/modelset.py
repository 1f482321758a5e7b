"""The cut-and-project scheme: lattice, star map, and the tiling point set.

Physical space is the real line, internal space the plane of the conjugate
embedding.  The lattice is spanned by the three vectors (tile length, star of
tile length); its physical projection is Z[t].  Site positions are exact
integer triples over the power basis {1, t, t**2}, built from the two-sided
block word, and all subset / symmetry / density / coset statements are probed
with exact positions plus the window membership oracle.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy.spatial import cKDTree

from .cubic import (
    CONSTANTS,
    CubicNumber,
    InternalPoint,
    MEAN_TILE_LEN,
    T,
    T2,
    TILE_LEN,
    embed_internal,
    embed_real,
    internal_decompose,
)
from .errors import ResourceCapError
from .sequences import block_fixed_point_biinfinite
from .windows import boundary_cloud, decide_window

MAX_SITES = 10**7


def star(x: CubicNumber) -> InternalPoint:
    """Galois conjugation t -> b, the star map of the scheme."""
    return internal_decompose(x)


@dataclass(frozen=True)
class LatticeBasis:
    """Basis vectors (physical, internal) of the embedding lattice plus the
    numeric 3x3 matrix with one column per letter."""

    physical: dict
    internal: dict
    matrix: np.ndarray
    covolume: float


def lattice_basis() -> LatticeBasis:
    """Construct and verify the lattice basis.

    The covolume is checked numerically against sqrt(59)/2 and exactly via
    covolume**2 = Im(b)**2 * (3 t**2 - 4 t)**2 = 59/4 in Q(t).
    """
    phys = {L: TILE_LEN[L] for L in "ABC"}
    intl = {L: star(TILE_LEN[L]) for L in "ABC"}
    cols = []
    for L in "ABC":
        z = embed_internal(intl[L])
        cols.append([embed_real(phys[L]), z.real, z.imag])
    matrix = np.array(cols).T
    det = abs(float(np.linalg.det(matrix)))
    target = 0.5 * math.sqrt(59)
    if abs(det - target) > 1e-9:
        raise AssertionError(f"covolume {det} != sqrt(59)/2")
    from .cubic import IM_CONJ_SQ

    sq = IM_CONJ_SQ * (3 * T2 - 4 * T) ** 2
    if sq != CubicNumber.of(Fraction(59, 4)):
        raise AssertionError("exact covolume identity failed")
    return LatticeBasis(physical=phys, internal=intl, matrix=matrix, covolume=det)


@dataclass(frozen=True)
class SitePoint:
    """Left endpoint of one tile: exact position in Z[t] and its letter."""

    index: int
    letter: str
    pos: CubicNumber


class SiteSet:
    """Two-sided tiling sites around the seam, in array form.

    ``triples[i]`` are the integer coordinates of the i-th position over
    {1, t, t**2}, sorted by position; ``letters[i]`` is the tile starting
    there; index 0 is the seam tile A at position 0.
    """

    def __init__(self, n_right: int, n_left: int):
        if n_right + n_left > MAX_SITES:
            raise ResourceCapError(f"{n_right + n_left} sites exceed cap {MAX_SITES}")
        iterations = 1
        left, right = block_fixed_point_biinfinite(iterations)
        while len(left) < n_left + 1 or len(right) < n_right + 1:
            iterations += 1
            left, right = block_fixed_point_biinfinite(iterations)
        len_vec = {"A": (0, -1, 1), "B": (0, 1, 0), "C": (1, 0, 0)}
        letters = []
        triples = []
        pos = (0, 0, 0)
        for ch in right[:n_right]:
            letters.append(ch)
            triples.append(pos)
            dv = len_vec[ch]
            pos = (pos[0] + dv[0], pos[1] + dv[1], pos[2] + dv[2])
        right_letters, right_triples = letters, triples
        letters = []
        triples = []
        pos = (0, 0, 0)
        for ch in reversed(left[-(n_left):] if n_left else ""):
            dv = len_vec[ch]
            pos = (pos[0] - dv[0], pos[1] - dv[1], pos[2] - dv[2])
            letters.append(ch)
            triples.append(pos)
        letters.reverse()
        triples.reverse()
        self.offset = len(letters)  # array index of the seam site
        self.letters = np.array(letters + right_letters)
        self.triples = np.array(triples + right_triples, dtype=np.int64)
        a = CONSTANTS.root
        self.positions = (
            self.triples[:, 0] + a * self.triples[:, 1] + a * a * self.triples[:, 2]
        )

    def __len__(self) -> int:
        return len(self.letters)

    def star_values(self) -> np.ndarray:
        """Numeric internal images of all positions."""
        b = complex(CONSTANTS.conj_re, CONSTANTS.conj_im)
        return self.triples[:, 0] + b * self.triples[:, 1] + b * b * self.triples[:, 2]

    def site(self, index: int) -> SitePoint:
        """Site by tiling index (0 = seam tile)."""
        i = index + self.offset
        c = self.triples[i]
        return SitePoint(
            index=index,
            letter=str(self.letters[i]),
            pos=CubicNumber.of(int(c[0]), int(c[1]), int(c[2])),
        )

    def sites(self) -> list[SitePoint]:
        return [self.site(i - self.offset) for i in range(len(self))]


def sigma_kol_sites(n_right: int, n_left: int) -> list[SitePoint]:
    """Left endpoints of the two-sided tiling from the seam: ``n_right``
    tiles rightward starting with the seam tile A at 0, ``n_left`` leftward
    (the first left tile is B with left endpoint -t)."""
    return SiteSet(n_right, n_left).sites()


def sites_for_interval(radius: float) -> SiteSet:
    """SiteSet guaranteed to cover [-radius, radius]."""
    mean_len = embed_real(MEAN_TILE_LEN)
    n = int(radius / mean_len * 1.1) + 8
    s = SiteSet(n, n)
    assert s.positions[0] < -radius and s.positions[-1] > radius
    return s


@dataclass(frozen=True)
class SubsetReport:
    checked: int
    inside: int
    undecided: int
    outside: int
    letter_mismatch: int

    @property
    def ok(self) -> bool:
        return (
            self.outside == 0
            and self.letter_mismatch == 0
            and self.inside >= 0.99 * self.checked
        )


def verify_window_subset(n: int = 10_000, max_depth: int = 30) -> SubsetReport:
    """Star images of the first ``n`` sites (split between both sides of the
    seam) must land inside their letter's window, never outside."""
    if n > 10**5:
        raise ResourceCapError("n exceeds cap 1e5")
    half = n // 2
    s = SiteSet(n - half, half)
    stars = s.star_values()
    inside = undecided = outside = 0
    for letter in "ABC":
        mask = s.letters == letter
        if not np.any(mask):
            continue
        v = decide_window(letter, stars[mask], max_depth)
        inside += int(np.sum(v == 1))
        undecided += int(np.sum(v == 0))
        outside += int(np.sum(v == -1))
    _, mismatch = letter_partition_check(min(n, 2000), max_depth)
    return SubsetReport(
        checked=len(s),
        inside=inside,
        undecided=undecided,
        outside=outside,
        letter_mismatch=mismatch,
    )


def letter_partition_check(n: int = 2_000, max_depth: int = 30) -> tuple[int, int]:
    """Count sites whose star image is decided in every letter window and
    lies inside exactly one; returns (fully decided, violations)."""
    half = n // 2
    s = SiteSet(n - half, half)
    stars = s.star_values()
    verdicts = np.stack([decide_window(L, stars, max_depth) for L in "ABC"])
    decided = np.all(verdicts != 0, axis=0)
    once = np.sum(verdicts == 1, axis=0) == 1
    return int(np.sum(decided)), int(np.sum(decided & ~once))


def density_empirical(radius: float) -> float:
    """Number of sites per unit length on [-radius, radius]."""
    if radius < 100:
        raise ValueError("radius too small for a stable density")
    s = sites_for_interval(radius)
    count = int(np.sum(np.abs(s.positions) <= radius))
    return count / (2 * radius)


@dataclass(frozen=True)
class GenericityReport:
    sites: int
    depth: int
    min_distance: float
    histogram: tuple
    bin_edges: tuple


def genericity_probe(n: int = 10_000, depth: int = 18) -> GenericityReport:
    """Minimum distance from ``n`` site star images to the full window
    boundary cloud; strictly positive distances are the finite-scale shadow
    of the boundary avoiding the projected lattice entirely."""
    if n > 10**5:
        raise ResourceCapError("n exceeds cap 1e5")
    half = n // 2
    s = SiteSet(n - half, half)
    stars = s.star_values()
    cloud = boundary_cloud(depth, scope="full").points
    tree = cKDTree(np.column_stack([cloud.real, cloud.imag]))
    d, _ = tree.query(np.column_stack([stars.real, stars.imag]))
    hist, edges = np.histogram(d, bins=10)
    return GenericityReport(
        sites=len(s),
        depth=depth,
        min_distance=float(d.min()),
        histogram=tuple(int(h) for h in hist),
        bin_edges=tuple(float(e) for e in edges),
    )


def inversion_symmetry_check(window: float = 1_000.0) -> tuple[bool, int]:
    """The A/B sites in a window centered at -t/2 form a point set that is
    exactly symmetric under x -> -t - x.  Returns (ok, pairs checked)."""
    center = -CONSTANTS.root / 2
    s = sites_for_interval(window + 4.0)
    ab = (s.letters == "A") | (s.letters == "B")
    triples = s.triples[ab]
    pos = s.positions[ab]
    have = {tuple(tr) for tr in triples.tolist()}
    sel = np.abs(pos - center) <= window
    checked = 0
    for tr in triples[sel].tolist():
        refl = (-tr[0], -1 - tr[1], -tr[2])
        if refl not in have:
            return False, checked
        checked += 1
    return True, checked


def bond_gap_letters(n: int = 5_000) -> bool:
    """Consecutive site gaps are exactly the tile length of the left site."""
    s = SiteSet(n, n)
    len_vec = {"A": (0, -1, 1), "B": (0, 1, 0), "C": (1, 0, 0)}
    diffs = np.diff(s.triples, axis=0)
    expect = np.array([len_vec[ch] for ch in s.letters[:-1]], dtype=np.int64)
    return bool(np.array_equal(diffs, expect))


def min_positive_gap(radius: float = 300.0) -> float:
    """Smallest positive difference between any two sites of the window
    [-radius, radius] (finite-scale uniform discreteness of the difference
    set restricted to (0, 1]).

    Differences between sites k apart grow by at least the minimal tile
    length per extra step, so only small k can contribute values <= 1.
    """
    s = sites_for_interval(radius)
    pos = np.sort(s.positions[np.abs(s.positions) <= radius])
    best = math.inf
    for k in range(1, len(pos)):
        d = pos[k:] - pos[:-k]
        m = float(d.min())
        if m > 1.0:
            break
        best = min(best, m)
    return best


#: generators of the translation group that tiles Z[t] by copies of the site
#: set: 1 - t and t**2 - 2 t (the two tile-length differences)
COSET_GENERATORS = (CubicNumber.of(1, -1, 0), CubicNumber.of(0, -2, 1))


def coset_locate(
    x: CubicNumber, radius: int = 6, max_depth: int = 30
) -> tuple[int, int]:
    """Find the unique (m, n) with x - m*(1-t) - n*(t**2-2t) in the site set,
    by testing star images against the combined window over a shell of
    translates.  Raises LookupError if the bounded search finds nothing."""
    if not (x.c0.denominator == x.c1.denominator == x.c2.denominator == 1):
        raise ValueError("coset search needs integer coordinates")
    u, v = COSET_GENERATORS
    cand = []
    for m in range(-radius, radius + 1):
        for n in range(-radius, radius + 1):
            cand.append((m, n))
    xs = embed_internal(x)
    us, vs = embed_internal(u), embed_internal(v)
    zs = np.array([xs - m * us - n * vs for m, n in cand])
    verdicts = decide_window("Omega", zs, max_depth)
    hits = [mn for mn, vv in zip(cand, verdicts) if vv == 1]
    undecided = int(np.sum(verdicts == 0))
    if len(hits) == 1:
        return hits[0]
    if not hits:
        raise LookupError(
            f"no representative within radius {radius} "
            f"({undecided} undecided; enlarge radius or depth)"
        )
    raise RuntimeError(f"coset representative not unique: {hits}")


@dataclass(frozen=True)
class WindowSpec:
    label: str = "Omega"
    shift: complex = 0j


def cut_and_project(
    spec: WindowSpec, radius: float, max_depth: int = 30
) -> tuple[np.ndarray, np.ndarray, int]:
    """Enumerate x = m0 + m1 t + m2 t**2 with |x| <= radius whose star image
    lies inside the (possibly shifted) window.

    Returns (triples, positions, undecided) sorted by position.  The integer
    search box comes from interval bounds on the inverse basis matrix with a
    10 percent safety dilation.
    """
    if radius > 10**4:
        raise ResourceCapError("radius exceeds cap 1e4")
    a = CONSTANTS.root
    b = complex(CONSTANTS.conj_re, CONSTANTS.conj_im)
    b2 = b * b
    # bounding box of the shifted window in internal space
    cloud = boundary_cloud(10, scope="full").points + spec.shift
    pad = 0.05
    y1lo, y1hi = cloud.real.min() - pad, cloud.real.max() + pad
    y2lo, y2hi = cloud.imag.min() - pad, cloud.imag.max() + pad
    # m1 range via the inverse of the embedding matrix
    mat = np.array(
        [[1.0, a, a * a], [1.0, b.real, b2.real], [0.0, b.imag, b2.imag]]
    )
    inv = np.linalg.inv(mat)
    corners = [
        np.array([p, y1, y2])
        for p in (-radius, radius)
        for y1 in (y1lo, y1hi)
        for y2 in (y2lo, y2hi)
    ]
    coords = np.array([inv @ c for c in corners])
    m1_lo = int(math.floor(coords[:, 1].min() * 1.1)) - 1
    m1_hi = int(math.ceil(coords[:, 1].max() * 1.1)) + 1
    triples = []
    for m1 in range(m1_lo, m1_hi + 1):
        # strip of m2 allowed by the imaginary part (Im b2 < 0)
        lo = (y2hi - m1 * b.imag) / b2.imag
        hi = (y2lo - m1 * b.imag) / b2.imag
        for m2 in range(int(math.floor(min(lo, hi))), int(math.ceil(max(lo, hi))) + 1):
            re_part = m1 * b.real + m2 * b2.real
            for m0 in range(
                int(math.floor(y1lo - re_part)), int(math.ceil(y1hi - re_part)) + 1
            ):
                if abs(m0 + m1 * a + m2 * a * a) <= radius:
                    triples.append((m0, m1, m2))
    triples = np.array(triples, dtype=np.int64).reshape(-1, 3)
    stars = triples[:, 0] + b * triples[:, 1] + b2 * triples[:, 2] - spec.shift
    verdicts = decide_window(spec.label, stars, max_depth)
    hit = verdicts == 1
    undecided = int(np.sum(verdicts == 0))
    out = triples[hit]
    pos = out[:, 0] + a * out[:, 1] + a * a * out[:, 2]
    order = np.argsort(pos)
    return out[order], pos[order], undecided
