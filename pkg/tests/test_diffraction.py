"""Dual basis, amplitudes, deformations, and spectrum periodicity."""

import numpy as np
import pytest

from kol31.cubic import (
    CubicNumber,
    IM_CONJ_SQ,
    MEAN_TILE_LEN,
    T,
    embed_real,
)
from kol31.diffraction import (
    PERIODICITY_PEAKS,
    cross_validate,
    deform_sites,
    deform_value,
    deformation_params,
    dual_basis,
    fb_sum,
    fb_window,
    peak_position,
    periodicity_check,
    spectrum_table,
)
from kol31.modelset import SiteSet, sites_for_interval


def test_dual_basis_exact_and_numeric():
    d = dual_basis()
    inv_l = MEAN_TILE_LEN.inverse()
    total = CubicNumber.of(0)
    for L in "ABC":
        total = total + d.projections[L]
    assert total == inv_l
    assert d.projections["B"] == (T - 1) * d.projections["A"]
    # duality of the numeric matrices is asserted inside dual_basis()


def test_peak_positions():
    k_exact, k, kstar = peak_position((0, 0, 0))
    assert k == 0.0 and kstar == 0j
    k_exact, k, _ = peak_position((1, 1, 1))
    assert k_exact == MEAN_TILE_LEN.inverse()
    assert abs(k - 0.4607198419686708) < 1e-12
    _, k100, _ = peak_position((1, 0, 0))
    assert abs(k100 - 0.1732702315504081) < 1e-12


def test_deformation_parameter_values():
    pe = deformation_params("equal_lengths")
    assert pe.shear_re == MEAN_TILE_LEN - 1
    assert abs(pe.a_num - 1.170516459041503) < 1e-12
    assert abs(pe.b_num - 0.1281198270948305) < 1e-12
    pi_ = deformation_params("integer_lengths")
    assert abs(embed_real(pi_.targets["C"]) / 2 - 0.4920535325535593) < 1e-12
    assert abs(pi_.a_num - (-0.01589293489288135)) < 1e-12
    assert abs(pi_.b_num - (-0.35913495314610644)) < 1e-12
    with pytest.raises(ValueError):
        deformation_params("bogus")


def test_cofactor_closed_form_identities():
    # the 1/sqrt(59)^3 closed forms of the shear coefficients, as product
    # identities between field elements
    imb_form = CubicNumber.of(-6, 25, -8)  # 2*sqrt(59)*Im(b)
    assert imb_form * CubicNumber.of(31, -17, -1) == CubicNumber.of(-59, 885, -413)
    assert imb_form * CubicNumber.of(3, 379, -179) == CubicNumber.of(-4661, -767, 1239)


def test_deformation_system_overdetermined():
    # three equations, two unknowns: the solution satisfies all letters
    for name in ("equal_lengths", "integer_lengths"):
        p = deformation_params(name)
        c = p.shear_im_cofactor * IM_CONJ_SQ
        from kol31.cubic import TILE_LEN, internal_decompose

        for L in "ABC":
            s = internal_decompose(TILE_LEN[L])
            assert TILE_LEN[L] + p.shear_re * s.re + c * s.im_s == p.targets[L]


def test_equal_deformation_exact_lattice():
    s = SiteSet(400, 400)
    pe = deformation_params("equal_lengths")
    dev = deform_sites(s, pe)
    inv_l = MEAN_TILE_LEN.inverse()
    ks = [x * inv_l for x in dev]
    assert all(v.is_integer() for v in ks)
    ints = [int(v.c0) for v in ks]
    assert ints == list(range(ints[0], ints[0] + len(ints)))


def test_integer_deformation_exact_gaps():
    s = SiteSet(400, 400)
    pi_ = deformation_params("integer_lengths")
    dev = deform_sites(s, pi_)
    for i in range(len(dev) - 1):
        assert dev[i + 1] - dev[i] == pi_.targets[str(s.letters[i])]


def test_deformation_identity_and_monotonicity():
    p0 = deformation_params("none")
    x = CubicNumber.of(3, -2, 1)
    assert deform_value(x, p0) == x
    s = SiteSet(150, 150)
    for name in ("equal_lengths", "integer_lengths"):
        dev = deform_sites(s, deformation_params(name))
        vals = [embed_real(v) for v in dev]
        assert all(b > a for a, b in zip(vals, vals[1:]))


def test_fb_sum_density_and_comb():
    p0 = deformation_params("none")
    sites = sites_for_interval(5_000)
    c0 = fb_sum((0, 0, 0), p0, 5_000, sites)
    target = embed_real(MEAN_TILE_LEN.inverse())
    assert abs(c0 - target) < 1e-3
    # estimator sanity on the periodic comb (mean-length spacing): the
    # amplitude of the comb at its own reciprocal spacing is the density
    L = 5_000.0
    l_mean = embed_real(MEAN_TILE_LEN)
    comb = np.arange(-int(L / l_mean), int(L / l_mean) + 1) * l_mean
    k = 1.0 / l_mean
    amp = np.exp(-2j * np.pi * k * comb).sum() / (2 * L)
    assert abs(amp - 1 / l_mean) < 1e-3


def test_fb_window_density_and_conjugation():
    p0 = deformation_params("none")
    c0, se = fb_window((0, 0, 0), p0, samples=10**5, seed=0)
    target = embed_real(MEAN_TILE_LEN.inverse())
    assert abs(c0 - target) < 1e-3
    c1, se1 = fb_window((1, 0, 1), p0, samples=2 * 10**5, seed=0)
    c2, se2 = fb_window((-1, 0, -1), p0, samples=2 * 10**5, seed=0)
    assert abs(c1 - np.conj(c2)) < 2 * (se1 + se2) + 1e-3


def test_cross_method_single_peak():
    p0 = deformation_params("none")
    sites = sites_for_interval(2 * 10**4)
    cw, se = fb_window((1, 1, 1), p0, samples=4 * 10**5, seed=0)
    cs = fb_sum((1, 1, 1), p0, 2 * 10**4, sites)
    assert abs(cw - cs) < 0.01


def test_cross_validate_small():
    rep = cross_validate(bound=1, samples=2 * 10**5, radius=2 * 10**4, seed=0, workers=2)
    assert rep.ok
    assert rep.max_abs_diff < 0.01


def test_spectrum_table():
    p0 = deformation_params("none")
    entries = spectrum_table(1, p0, method="sum", radius=10**4)
    target = embed_real(MEAN_TILE_LEN.inverse())
    by_index = {e.index: e for e in entries}
    e0 = by_index[(0, 0, 0)]
    assert abs(e0.intensity - target**2) < 1e-3
    for e in entries:
        mirror = by_index[(-e.index[0], -e.index[1], -e.index[2])]
        assert abs(e.intensity - mirror.intensity) < 1e-9
        assert abs(e.amplitude - np.conj(mirror.amplitude)) < 1e-9
    ks = [e.k for e in entries]
    assert ks == sorted(ks)


def test_periodicity_brackets_and_amplitudes():
    for name in ("equal_lengths", "integer_lengths"):
        rep = periodicity_check(deformation_params(name), radius=2 * 10**4)
        assert rep.bracket_re_zero and rep.bracket_im_zero
        assert rep.max_diff <= 0.01
    rep0 = periodicity_check(deformation_params("none"), radius=2 * 10**4)
    assert not (rep0.bracket_re_zero and rep0.bracket_im_zero)
    assert rep0.max_diff > 0.01  # the undeformed spectrum is not periodic


def test_periodicity_peak_list_has_ten_entries():
    assert len(PERIODICITY_PEAKS) == 10
