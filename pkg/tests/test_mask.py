import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from PIL import Image

from amodalpaint import (
    BinaryMask,
    PixelPoint,
    ShapeMismatchError,
    ValidationError,
    area,
    complement,
    default_dilation_radius,
    difference,
    dilate,
    foreground_points,
    intersect,
    read_mask_png,
    resample_nearest,
    union,
    write_mask_png,
)
from oracles import brute_force_dilate


def random_mask(seed, w=32, h=32, density=0.3):
    rng = np.random.default_rng(seed)
    return BinaryMask(rng.random((h, w)) < density)


mask_seeds = st.integers(min_value=0, max_value=2**32 - 1)


# ---------------------------------------------------------------- set algebra


def test_union_identity_and_complement():
    m = random_mask(1)
    empty = BinaryMask.zeros(32, 32)
    assert union(m, empty) == m
    assert union(m, complement(m)) == BinaryMask.full(32, 32)


def test_intersect_idempotent_and_absorbing():
    m = random_mask(2)
    assert intersect(m, m) == m
    assert intersect(m, BinaryMask.zeros(32, 32)) == BinaryMask.zeros(32, 32)


def test_difference_trivials():
    m = random_mask(3)
    empty = BinaryMask.zeros(32, 32)
    assert difference(m, empty) == m
    assert difference(m, m) == empty


def test_setops_match_per_pixel_oracle():
    a, b = random_mask(10), random_mask(11)
    for y in range(32):
        for x in range(32):
            assert union(a, b).data[y, x] == (a.data[y, x] or b.data[y, x])
            assert intersect(a, b).data[y, x] == (a.data[y, x] and b.data[y, x])
            assert difference(a, b).data[y, x] == (a.data[y, x] and not b.data[y, x])


@given(mask_seeds, mask_seeds)
@settings(max_examples=50, deadline=None)
def test_set_algebra_properties(s1, s2):
    a, b = random_mask(s1), random_mask(s2)
    assert union(a, b) == union(b, a)
    assert intersect(a, b) == intersect(b, a)
    assert difference(a, b) == intersect(a, complement(b))
    # De Morgan
    assert complement(union(a, b)) == intersect(complement(a), complement(b))
    assert complement(intersect(a, b)) == union(complement(a), complement(b))
    # inclusion-exclusion on areas
    assert area(union(a, b)) + area(intersect(a, b)) == area(a) + area(b)


@given(mask_seeds, mask_seeds, mask_seeds)
@settings(max_examples=25, deadline=None)
def test_set_algebra_associativity(s1, s2, s3):
    a, b, c = random_mask(s1), random_mask(s2), random_mask(s3)
    assert union(union(a, b), c) == union(a, union(b, c))
    assert intersect(intersect(a, b), c) == intersect(a, intersect(b, c))


def test_difference_union_recovers_left_operand():
    a, b = random_mask(20), random_mask(21)
    assert union(difference(a, b), intersect(a, b)) == a


def test_shape_mismatch_rejected():
    a = BinaryMask.zeros(8, 8)
    b = BinaryMask.zeros(9, 8)
    for op in (union, intersect, difference):
        with pytest.raises(ShapeMismatchError):
            op(a, b)


def test_mask_validation():
    with pytest.raises(ValidationError):
        BinaryMask(np.zeros((0, 4), dtype=bool))
    with pytest.raises(ValidationError):
        BinaryMask(np.zeros((4, 4, 2), dtype=bool))


def test_mask_data_is_read_only():
    m = random_mask(5)
    with pytest.raises(ValueError):
        m.data[0, 0] = True


# ----------------------------------------------------------------- morphology


def test_dilate_single_pixel_gives_block():
    grid = np.zeros((11, 11), dtype=bool)
    grid[5, 5] = True
    out = dilate(BinaryMask(grid), 1)
    expected = np.zeros((11, 11), dtype=bool)
    expected[4:7, 4:7] = True
    assert np.array_equal(out.data, expected)


def test_dilate_empty_and_identity():
    empty = BinaryMask.zeros(16, 16)
    assert dilate(empty, 3) == empty
    m = random_mask(6)
    assert dilate(m, 0) == m


def test_dilate_matches_brute_force_oracle():
    rng = np.random.default_rng(7)
    grid = rng.random((48, 48)) < 0.1
    out = dilate(BinaryMask(grid), 2)
    assert np.array_equal(out.data, brute_force_dilate(grid, 2))


@given(mask_seeds, mask_seeds, st.integers(0, 3), st.integers(0, 3))
@settings(max_examples=25, deadline=None)
def test_dilate_monotone_and_additive(s1, s2, r1, r2):
    a = random_mask(s1, density=0.1)
    b = union(a, random_mask(s2, density=0.1))  # a subset of b
    da, db = dilate(a, r1), dilate(b, r1)
    assert not np.any(da.data & ~db.data)  # A ⊆ B ⇒ dilate(A) ⊆ dilate(B)
    assert not np.any(a.data & ~da.data)  # dilation only grows
    # square structuring element composes exactly
    assert dilate(dilate(a, r1), r2) == dilate(a, r1 + r2)


def test_dilate_negative_radius_rejected():
    with pytest.raises(ValidationError):
        dilate(random_mask(1), -1)


# ----------------------------------------------------------- area and points


def test_area_trivials():
    assert area(BinaryMask.zeros(10, 10)) == 0
    assert area(BinaryMask.full(10, 10)) == 100


def test_area_matches_loop_count():
    m = random_mask(8)
    assert area(m) == sum(
        1 for y in range(32) for x in range(32) if m.data[y, x]
    )


def test_foreground_points_trivials():
    assert foreground_points(BinaryMask.zeros(5, 5)) == []
    grid = np.zeros((10, 10), dtype=bool)
    grid[7, 3] = True
    assert foreground_points(BinaryMask(grid)) == [PixelPoint(3, 7)]


def test_foreground_points_roundtrip_and_order():
    m = random_mask(9)
    pts = foreground_points(m)
    assert len(pts) == area(m)
    assert pts == sorted(pts, key=lambda p: (p.y, p.x))  # row-major
    assert pts == foreground_points(m)  # stable across calls
    rebuilt = np.zeros((32, 32), dtype=bool)
    for p in pts:
        rebuilt[p.y, p.x] = True
    assert BinaryMask(rebuilt) == m


# ----------------------------------------------------------------- resampling


def test_resample_identity():
    m = random_mask(12)
    assert resample_nearest(m, 32, 32) == m


def test_resample_checkerboard_upsample():
    checker = BinaryMask(np.array([[True, False], [False, True]]))
    up = resample_nearest(checker, 4, 4)
    expected = np.array(
        [
            [True, True, False, False],
            [True, True, False, False],
            [False, False, True, True],
            [False, False, True, True],
        ]
    )
    assert np.array_equal(up.data, expected)


def test_resample_grid_aligned_rectangle_roundtrip():
    grid = np.zeros((16, 16), dtype=bool)
    grid[4:12, 8:16] = True  # aligned to the 2x downsample grid
    m = BinaryMask(grid)
    down = resample_nearest(m, 8, 8)
    up = resample_nearest(down, 16, 16)
    assert up == m


def test_resample_validation():
    with pytest.raises(ValidationError):
        resample_nearest(random_mask(1), 0, 8)


def test_default_dilation_radius_scaling():
    assert default_dilation_radius(512) == 3
    assert default_dilation_radius(64) == 1
    assert default_dilation_radius(1024) == 6


# ------------------------------------------------------------------- file IO


def test_mask_png_roundtrip(tmp_path):
    m = random_mask(13)
    path = tmp_path / "m.png"
    write_mask_png(m, path)
    assert read_mask_png(path) == m
    raw = np.asarray(Image.open(path))
    assert set(np.unique(raw)) <= {0, 255}


def test_mask_png_nonzero_reads_as_foreground(tmp_path):
    arr = np.zeros((6, 6), dtype=np.uint8)
    arr[2, 3] = 7  # anti-aliased-ish faint value
    path = tmp_path / "faint.png"
    Image.fromarray(arr, mode="L").save(path)
    m = read_mask_png(path)
    assert area(m) == 1 and m.data[2, 3]
