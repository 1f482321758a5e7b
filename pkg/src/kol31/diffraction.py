"""Dual lattice, Fourier-Bohr amplitudes, and the two bond-length
deformations.

Peak positions live in Q(t): the dual basis vectors project to rho_i/l on
the physical line.  Amplitudes are computed two independent ways: a Monte
Carlo integral of the plane wave over the window (the amplitude of a peak of
a deformed model set equals the window average of
exp(-2*pi*i*(k*phi(y) - kstar.y)) times the site density), and a direct
exponential sum over the sites of a finite patch.  Deformed positions stay in
Q(t) because the shear coefficient on the second internal coordinate carries
one factor Im(b) whose square is in the field.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .cubic import (
    CONSTANTS,
    CubicNumber,
    IM_CONJ_SQ,
    MEAN_TILE_LEN,
    T,
    T2,
    TILE_FREQ,
    TILE_LEN,
    embed_real,
    internal_decompose,
)
from .errors import ResourceCapError
from .modelset import SiteSet, sites_for_interval
from .windows import sample_window

MAX_INDEX_BOUND = 10


def _inv3(rows):
    """Exact inverse of a 3x3 matrix over Q(t) by the adjugate."""
    a, b, c = rows[0]
    d, e, f = rows[1]
    g, h, i = rows[2]
    co = [
        [e * i - f * h, -(b * i - c * h), b * f - c * e],
        [-(d * i - f * g), a * i - c * g, -(a * f - c * d)],
        [d * h - e * g, -(a * h - b * g), a * e - b * d],
    ]
    det = a * co[0][0] + d * co[0][1] + g * co[0][2]
    idet = det.inverse()
    return [[co[r][s] * idet for s in range(3)] for r in range(3)]


@dataclass(frozen=True)
class DualBasis:
    """Dual lattice data: exact physical projections rho_i/l of the dual
    vectors, their exact inverse-matrix rows, and the numeric matrix with the
    dual vectors as columns (ordered A, B, C)."""

    projections: dict
    exact_rows: tuple  # rows of the exact inverse (third column carries 1/Im(b))
    matrix: np.ndarray
    internal: dict  # numeric internal companions per letter


def dual_basis() -> DualBasis:
    letters = "ABC"
    # exact basis matrix: columns (length, re of star, im-cofactor of star)
    stars = {L: internal_decompose(TILE_LEN[L]) for L in letters}
    rows = [
        [TILE_LEN[L] for L in letters],
        [stars[L].re for L in letters],
        [stars[L].im_s for L in letters],
    ]
    inv = _inv3(rows)
    inv_l = MEAN_TILE_LEN.inverse()
    projections = {}
    for i, L in enumerate(letters):
        pi = inv[i][0]
        if pi != TILE_FREQ[L] * inv_l:
            raise AssertionError(f"dual projection of {L} is not rho/l")
        projections[L] = pi
    if projections["B"] != (T - 1) * projections["A"]:
        raise AssertionError("projection ratio B/A != t - 1")
    if sum((projections[L] for L in letters), CubicNumber.of(0)) != inv_l:
        raise AssertionError("projections do not sum to 1/l")
    im = CONSTANTS.conj_im
    numeric = np.zeros((3, 3))
    internal = {}
    for i, L in enumerate(letters):
        w = (
            embed_real(inv[i][0]),
            embed_real(inv[i][1]),
            embed_real(inv[i][2]) / im,
        )
        numeric[:, i] = w
        internal[L] = complex(w[1], w[2])
    # numeric duality against the primal basis
    from .modelset import lattice_basis

    primal = lattice_basis().matrix
    if not np.allclose(primal.T @ numeric, np.eye(3), atol=1e-9):
        raise AssertionError("numeric duality violated")
    return DualBasis(
        projections=projections,
        exact_rows=tuple(tuple(r) for r in inv),
        matrix=numeric,
        internal=internal,
    )


_DUAL = None


def get_dual() -> DualBasis:
    global _DUAL
    if _DUAL is None:
        _DUAL = dual_basis()
    return _DUAL


PeakIndex = tuple[int, int, int]


def peak_position(index: PeakIndex) -> tuple[CubicNumber, float, complex]:
    """Exact and numeric peak position with its numeric internal companion."""
    dual = get_dual()
    na, nb, nc = index
    k_exact = (
        dual.projections["A"] * na
        + dual.projections["B"] * nb
        + dual.projections["C"] * nc
    )
    kstar = na * dual.internal["A"] + nb * dual.internal["B"] + nc * dual.internal["C"]
    return k_exact, embed_real(k_exact), kstar


@dataclass(frozen=True)
class DeformationParams:
    """Linear internal shear x -> x + a*y1 + b*y2 with b = Im(b)*cofactor.

    ``targets`` maps each letter to its exact deformed tile length; the
    defining linear system is verified exactly at construction.
    """

    name: str
    shear_re: CubicNumber          # a
    shear_im_cofactor: CubicNumber  # b / Im(b)
    targets: dict
    a_num: float
    b_num: float

    def phi(self, y: np.ndarray) -> np.ndarray:
        """Numeric displacement of internal points (complex array)."""
        return self.a_num * y.real + self.b_num * y.imag

    def basis_images(self) -> tuple[CubicNumber, CubicNumber, CubicNumber]:
        """Exact deformed values of the basis 1, t, t**2."""
        c = self.shear_im_cofactor * IM_CONJ_SQ
        out = []
        for e in (CubicNumber.of(1), T, T2):
            s = internal_decompose(e)
            out.append(e + self.shear_re * s.re + c * s.im_s)
        return tuple(out)


_HALF = Fraction(1, 2)


def deformation_params(name: str) -> DeformationParams:
    """The three supported parameter sets: none, equal bond lengths, integer
    (6:4:2) bond lengths."""
    l_mean = MEAN_TILE_LEN
    if name == "none":
        a = CubicNumber.of(0)
        cof = CubicNumber.of(0)
        targets = dict(TILE_LEN)
    elif name == "equal_lengths":
        a = l_mean - 1
        # cofactor (t**2 + 17 t - 31)/59: the unique solution of the
        # over-determined length system with the Im(b) > 0 branch
        cof = CubicNumber.of(Fraction(-31, 59), Fraction(17, 59), Fraction(1, 59))
        targets = {L: l_mean for L in "ABC"}
    elif name == "integer_lengths":
        l_unit = CubicNumber.of(Fraction(1, 4), Fraction(-15, 4), Fraction(7, 4))
        a = CubicNumber.of(-_HALF, Fraction(-15, 2), Fraction(7, 2))
        cof = CubicNumber.of(Fraction(3, 59), Fraction(379, 59), Fraction(-179, 59))
        targets = {"A": l_unit * 6, "B": l_unit * 4, "C": l_unit * 2}
    else:
        raise ValueError(f"unknown deformation {name!r}")
    params = DeformationParams(
        name=name,
        shear_re=a,
        shear_im_cofactor=cof,
        targets=targets,
        a_num=embed_real(a),
        b_num=CONSTANTS.conj_im * embed_real(cof),
    )
    # the defining linear system must hold exactly for every letter
    c = cof * IM_CONJ_SQ
    for L in "ABC":
        s = internal_decompose(TILE_LEN[L])
        deformed = TILE_LEN[L] + a * s.re + c * s.im_s
        if deformed != targets[L]:
            raise AssertionError(f"deformation system violated for {L}")
    return params


def deform_value(x: CubicNumber, params: DeformationParams) -> CubicNumber:
    """Exact deformed position x + a*y1(x) + b*y2(x)."""
    s = internal_decompose(x)
    return x + params.shear_re * s.re + params.shear_im_cofactor * IM_CONJ_SQ * s.im_s


def deform_sites(sites: SiteSet, params: DeformationParams) -> list[CubicNumber]:
    """Exact deformed positions of every site, order preserved."""
    d0, d1, d2 = params.basis_images()
    out = []
    for m0, m1, m2 in sites.triples.tolist():
        out.append(d0 * m0 + d1 * m1 + d2 * m2)
    return out


def _peak_rng(seed: int, index: PeakIndex) -> np.random.Generator:
    off = 1 << 16
    na, nb, nc = index
    return np.random.default_rng(
        np.random.SeedSequence((seed, na + off, nb + off, nc + off))
    )


def max_workers() -> int:
    """Worker cap for per-peak parallel evaluation (KOL_MAX_THREADS env)."""
    cap = os.environ.get("KOL_MAX_THREADS")
    hw = os.cpu_count() or 1
    if cap:
        return max(1, min(int(cap), hw))
    return hw


def fb_window(
    index: PeakIndex,
    params: DeformationParams,
    samples: int = 10**6,
    seed: int = 0,
    batches: int = 20,
) -> tuple[complex, float]:
    """Monte Carlo Fourier-Bohr amplitude from area-uniform window samples.

    The integrand exp(-2*pi*i*(k*phi(y) - kstar.y)) is averaged over the
    window and scaled by the density 1/l; the error is a batch-mean standard
    error over ``batches`` batches.  The random stream is derived from
    (seed, index), so peaks can be evaluated in any order or in parallel.
    """
    if samples < 10**4:
        raise ValueError("need at least 1e4 samples")
    _, k, kstar = peak_position(index)
    u1 = kstar.real - k * params.a_num
    u2 = kstar.imag - k * params.b_num
    rng = _peak_rng(seed, index)
    y = sample_window("Omega", samples, rng, steps=34, fast=True)
    phase = (2 * math.pi) * (u1 * y.real + u2 * y.imag)
    vals = np.cos(phase) + 1j * np.sin(phase)
    dens = embed_real(MEAN_TILE_LEN.inverse())
    m = batches * (samples // batches)
    bm = vals[:m].reshape(batches, -1).mean(axis=1, dtype=np.complex128)
    mean = bm.mean()
    var = bm.real.var(ddof=1) + bm.imag.var(ddof=1)
    stderr = dens * math.sqrt(var / batches)
    return dens * complex(mean), stderr


def fb_sum(
    index: PeakIndex,
    params: DeformationParams,
    radius: float = 5 * 10**4,
    sites: SiteSet | None = None,
) -> complex:
    """Fourier-Bohr amplitude as the normalized exponential sum over the
    (deformed) sites with positions in [-radius, radius]."""
    if radius < 10**3:
        raise ValueError("radius too small for a stable amplitude")
    if sites is None:
        sites = sites_for_interval(radius)
    _, k, _ = peak_position(index)
    stars = sites.star_values()
    x = sites.positions + params.a_num * stars.real + params.b_num * stars.imag
    sel = np.abs(sites.positions) <= radius
    phase = (-2 * math.pi * k) * x[sel]
    return complex((np.cos(phase) + 1j * np.sin(phase)).sum() / (2 * radius))


@dataclass(frozen=True)
class SpectrumEntry:
    index: PeakIndex
    k: float
    amplitude: complex
    intensity: float
    method: str
    stderr: float | None = None


def spectrum_table(
    index_bound: int,
    params: DeformationParams,
    method: str = "sum",
    samples: int = 10**5,
    radius: float = 2 * 10**4,
    seed: int = 0,
) -> list[SpectrumEntry]:
    """All peaks with index components bounded by ``index_bound``, sorted by
    peak position; methods: "window", "sum", or "both"."""
    if index_bound > MAX_INDEX_BOUND:
        raise ResourceCapError(f"index bound exceeds cap {MAX_INDEX_BOUND}")
    if method not in ("window", "sum", "both"):
        raise ValueError(f"unknown method {method!r}")
    indices = [
        (na, nb, nc)
        for na in range(-index_bound, index_bound + 1)
        for nb in range(-index_bound, index_bound + 1)
        for nc in range(-index_bound, index_bound + 1)
    ]
    indices.sort(key=lambda n: peak_position(n)[1])
    sites = sites_for_interval(radius) if method in ("sum", "both") else None
    out = []
    for n in indices:
        _, k, _ = peak_position(n)
        if method in ("sum", "both"):
            c = fb_sum(n, params, radius, sites)
            out.append(SpectrumEntry(n, k, c, abs(c) ** 2, "sum"))
        if method in ("window", "both"):
            c, se = fb_window(n, params, samples, seed)
            out.append(SpectrumEntry(n, k, c, abs(c) ** 2, "window", se))
    return out


@dataclass(frozen=True)
class CrossCheckReport:
    bound: int
    samples: int
    radius: float
    seed: int
    max_abs_diff: float
    worst_index: PeakIndex
    diffs: dict

    @property
    def ok(self) -> bool:
        return self.max_abs_diff <= 0.01


def cross_validate(
    bound: int = 3,
    params: DeformationParams | None = None,
    samples: int = 10**6,
    radius: float = 5 * 10**4,
    seed: int = 0,
    workers: int | None = None,
) -> CrossCheckReport:
    """|fb_window - fb_sum| over every peak with index components bounded by
    ``bound``.  Peaks are independent work units with derived seeds, so the
    thread pool does not affect the values."""
    if params is None:
        params = deformation_params("none")
    if bound > MAX_INDEX_BOUND:
        raise ResourceCapError(f"index bound exceeds cap {MAX_INDEX_BOUND}")
    sites = sites_for_interval(radius)
    indices = [
        (na, nb, nc)
        for na in range(-bound, bound + 1)
        for nb in range(-bound, bound + 1)
        for nc in range(-bound, bound + 1)
    ]

    def one(n):
        cw, _ = fb_window(n, params, samples, seed)
        cs = fb_sum(n, params, radius, sites)
        return n, abs(cw - cs)

    nw = workers if workers is not None else max_workers()
    if nw > 1:
        with ThreadPoolExecutor(max_workers=nw) as pool:
            results = list(pool.map(one, indices))
    else:
        results = [one(n) for n in indices]
    diffs = {n: d for n, d in results}
    worst = max(diffs, key=diffs.get)
    return CrossCheckReport(
        bound=bound,
        samples=samples,
        radius=radius,
        seed=seed,
        max_abs_diff=diffs[worst],
        worst_index=worst,
        diffs=diffs,
    )


@dataclass(frozen=True)
class PeriodicityReport:
    params: str
    period_index: PeakIndex
    bracket_re_zero: bool
    bracket_im_zero: bool
    pairs: list
    max_diff: float


#: peaks used for the numeric periodicity comparison
PERIODICITY_PEAKS = [
    (0, 0, 0),
    (1, 0, 0),
    (0, 1, 0),
    (0, 0, 1),
    (1, 1, 0),
    (1, 0, 1),
    (0, 1, 1),
    (1, 1, 1),
    (2, 0, 0),
    (0, 0, 2),
]


def periodicity_check(
    params: DeformationParams,
    radius: float = 5 * 10**4,
    shift_n: int = 1,
    peaks: list[PeakIndex] | None = None,
) -> PeriodicityReport:
    """Spectrum periodicity of a deformed set.

    Exact part: the two bracket terms a/L - (internal dual sum)_1 and
    b/L - (internal dual sum)_2 vanish identically in Q(t), where L is the
    deformed lattice constant and the dual sum is weighted (1,1,1) for equal
    lengths and (6,4,2) for integer lengths.  Numeric part: amplitudes at k
    and k + shift_n/L agree for every test peak (they need not for the
    undeformed set)."""
    if params.name == "equal_lengths":
        weights = (1, 1, 1)
        period = MEAN_TILE_LEN
    elif params.name == "integer_lengths":
        weights = (6, 4, 2)
        period = params.targets["C"] * _HALF  # the unit length
    elif params.name == "none":
        weights = (1, 1, 1)
        period = MEAN_TILE_LEN
    else:
        raise ValueError(params.name)
    dual = get_dual()
    rows = dual.exact_rows
    sum1 = sum(
        (rows[i][1] * w for i, w in enumerate(weights)), CubicNumber.of(0)
    )
    sum2 = sum(
        (rows[i][2] * w for i, w in enumerate(weights)), CubicNumber.of(0)
    )
    inv_period = period.inverse()
    bracket_re = params.shear_re * inv_period - sum1
    bracket_im = IM_CONJ_SQ * params.shear_im_cofactor * inv_period - sum2
    shift_vec = tuple(shift_n * w for w in weights)
    sites = sites_for_interval(radius)
    pairs = []
    max_diff = 0.0
    for n in peaks or PERIODICITY_PEAKS:
        n2 = (n[0] + shift_vec[0], n[1] + shift_vec[1], n[2] + shift_vec[2])
        c1 = fb_sum(n, params, radius, sites)
        c2 = fb_sum(n2, params, radius, sites)
        diff = abs(c1 - c2)
        max_diff = max(max_diff, diff)
        pairs.append((n, n2, c1, c2, diff))
    return PeriodicityReport(
        params=params.name,
        period_index=shift_vec,
        bracket_re_zero=bracket_re.is_zero(),
        bracket_im_zero=bracket_im.is_zero(),
        pairs=pairs,
        max_diff=max_diff,
    )
