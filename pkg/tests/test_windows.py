"""Window IFS: exact identities, membership, clouds, and the edge geometry."""

import numpy as np
import pytest
from scipy.spatial import cKDTree

from kol31.cubic import CONSTANTS, CubicNumber, T, T2, embed_internal, embed_real
from kol31.errors import ResourceCapError
from kol31.windows import (
    BRANCH_PROBS_EXACT,
    CENTER_FLIP,
    EDGE_FLIP,
    EDGE_MAPS,
    POINTS,
    WINDOW_MAPS,
    area_estimate,
    attractor_cloud,
    boundary_dimension,
    decide_window,
    edge_polyline,
    ifs_consistency,
    inner_point_check,
    map_compose,
    membership,
    rhombus_verify,
    sample_window,
    segment_control_dimension,
    tiling_check,
    verify_map_identities,
    verify_point_identities,
)


def test_map_identities_all_exact():
    results = verify_map_identities()
    assert len(results) >= 13
    assert all(c.passed for c in results), [c.name for c in results if not c.passed]


def test_point_identities_all_exact():
    results = verify_point_identities()
    assert len(results) >= 40
    assert all(c.passed for c in results), [c.name for c in results if not c.passed]


def test_compose_examples():
    f1, f2, f4, f0 = (WINDOW_MAPS[k] for k in ("f1", "f2", "f4", "f0"))
    c = map_compose(f1, f4)
    assert c.mult == f2.mult and c.off == f2.off
    c2 = map_compose(f0, f1)
    assert c2.mult == f4.mult and c2.off == f4.off


def test_edge_endpoint_exchange():
    g1 = EDGE_MAPS["g1"]
    images = {g1(POINTS[2]), g1(POINTS[3])}
    assert images == {POINTS[2], POINTS[8]}


def test_branch_probabilities_sum_to_one_exactly():
    total = CubicNumber.of(0)
    for p in BRANCH_PROBS_EXACT:
        total = total + p
    assert total == CubicNumber.of(1)


def test_attractor_cloud_depth0_and_caps():
    pc = attractor_cloud("AB", depth=0)
    assert len(pc.points) == 1
    assert abs(pc.points[0] - embed_internal(POINTS[5])) < 1e-12
    with pytest.raises(ResourceCapError):
        attractor_cloud("AB", depth=26)
    with pytest.raises(ValueError):
        attractor_cloud("XYZ", depth=3)


def test_cloud_bbox_contains_corners():
    pts = attractor_cloud("AB", depth=18).points
    lo = complex(pts.real.min(), pts.imag.min())
    hi = complex(pts.real.max(), pts.imag.max())
    for idx in (1, 2, 3, 4):
        z = embed_internal(POINTS[idx])
        assert lo.real - 1e-3 <= z.real <= hi.real + 1e-3
        assert lo.imag - 1e-3 <= z.imag <= hi.imag + 1e-3


def test_cloud_center_symmetry():
    pts = attractor_cloud("AB", depth=14).points
    tm, to = CENTER_FLIP.numeric()
    flipped = tm * pts + to
    tree = cKDTree(np.column_stack([pts.real, pts.imag]))
    d, _ = tree.query(np.column_stack([flipped.real, flipped.imag]))
    assert d.max() < 1e-9


def test_boundary_cloud_flip_symmetry_and_orientation():
    pts = edge_polyline(14)
    km, ko = EDGE_FLIP.numeric()
    flipped = km * pts + ko
    tree = cKDTree(np.column_stack([pts.real, pts.imag]))
    d, _ = tree.query(np.column_stack([flipped.real, flipped.imag]))
    assert d.max() < 1e-9
    # ordered polyline runs between the two edge endpoints
    assert abs(pts[0] - embed_internal(POINTS[2])) < 1e-12
    assert abs(pts[-1] - embed_internal(POINTS[3])) < 1e-12


def test_boundary_depth0_is_endpoints():
    pts = edge_polyline(0)
    assert len(pts) == 2
    assert abs(pts[0] - embed_internal(POINTS[2])) < 1e-12
    assert abs(pts[1] - embed_internal(POINTS[3])) < 1e-12


def test_edge_translation_relation():
    # right edge shifted by -1 lies on the left edge (exact translation)
    e = edge_polyline(12)
    tm, to = CENTER_FLIP.numeric()
    left = tm * e + to
    tree = cKDTree(np.column_stack([left.real, left.imag]))
    d, _ = tree.query(np.column_stack([(e - 1).real, (e - 1).imag]))
    assert d.max() < 1e-9


def test_rhombus_conditions():
    results = rhombus_verify()
    disjoint = [c for c in results if "intersect" not in c.name]
    meets = [c for c in results if "intersect" in c.name]
    assert len(disjoint) == 12
    assert len(meets) == 4
    assert all(c.passed for c in results), [c.name for c in results if not c.passed]
    assert all(c.margin > 1e-6 for c in disjoint)
    assert all(c.margin < -1e-6 for c in meets)


def test_membership_examples():
    assert membership(embed_internal(POINTS[5])) == "Inside"
    assert membership(10 + 0j, max_depth=1) == "Outside"
    # boundary points stay undecided at any depth
    assert membership(embed_internal(POINTS[2]), max_depth=35) == "Undecided"
    assert membership(0j, label="A") == "Inside"
    assert membership(embed_internal(-T), label="B") == "Inside"
    assert membership(embed_internal(-T), label="A") == "Outside"
    with pytest.raises(ResourceCapError):
        membership(0j, max_depth=41)


def test_membership_monotone_in_depth():
    rng = np.random.default_rng(3)
    z = sample_window("Omega", 200, rng)
    v_shallow = decide_window("Omega", z, max_depth=12)
    v_deep = decide_window("Omega", z, max_depth=30)
    decided = v_shallow != 0
    assert np.array_equal(v_shallow[decided], v_deep[decided])


def test_inner_points():
    results = inner_point_check(depth=18)
    assert all(c.passed for c in results)
    dists = [c.margin for c in results if c.margin is not None]
    assert all(d > 0.01 for d in dists)


def test_area_estimates():
    area, se, und = area_estimate("Omega", samples=20_000, seed=0)
    exact = CONSTANTS.conj_im * embed_real(T2 - T)
    assert und < 0.005
    assert abs(area - exact) < max(4 * se, 0.02 * exact)
    parts = 0.0
    err = 0.0
    for lab in "ABC":
        a, s, u = area_estimate(lab, samples=15_000, seed=1)
        parts += a
        err += s
        assert u < 0.005
    assert abs(parts - exact) < 4 * err + 0.01


def test_window_area_exact_values():
    im = CONSTANTS.conj_im
    assert abs(im * embed_real(T2 - T) - 1.7694275) < 1e-6
    # letter window areas: im, im*(t-1), im*(t^2-2t); they sum to the total
    total = (
        im * 1.0
        + im * embed_real(T - CubicNumber.of(1))
        + im * embed_real(T2 - 2 * T)
    )
    assert abs(total - im * embed_real(T2 - T)) < 1e-12


def test_boundary_dimension_and_control():
    est, target = boundary_dimension(depth=16)
    assert abs(target - 1.2167404) < 1e-6
    assert 1.12 <= est <= 1.32
    seg = segment_control_dimension()
    assert abs(seg - 1.0) <= 0.05


def test_tiling_check_small():
    rep = tiling_check(samples=1_500, seed=0)
    assert rep.ok
    assert rep.uncovered == 0 and rep.multi_covered == 0
    assert rep.decided >= 0.99 * rep.samples


def test_tiling_vectors_match_point_differences():
    from kol31.windows import TILING_BASIS

    assert TILING_BASIS[0] == POINTS[2] - POINTS[6]
    assert TILING_BASIS[1] == POINTS[2] - POINTS[3]


def test_ifs_consistency():
    results = ifs_consistency(depth=14)
    assert all(c.passed for c in results), [(c.name, c.margin) for c in results]
    assert all(c.margin <= 1e-2 for c in results)


def test_sampler_matches_membership():
    # random window samples should be (almost surely) inside
    rng = np.random.default_rng(11)
    z = sample_window("AB", 400, rng)
    v = decide_window("AB", z, max_depth=30)
    assert np.sum(v == -1) == 0
    assert np.mean(v == 1) > 0.97
