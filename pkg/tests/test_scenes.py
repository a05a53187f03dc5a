import numpy as np
import pytest

from amodalpaint import (
    ValidationError,
    amodal_mask_from_image,
    area,
    difference,
    generate_scene,
    generate_suite,
    identify_regions,
    intersect,
    selection_filter,
    union,
)


def test_fixed_seed_is_bitwise_deterministic():
    a = generate_scene(42, 0.4, 64)
    b = generate_scene(42, 0.4, 64)
    assert np.array_equal(a.image.data, b.image.data)
    assert np.array_equal(a.ground_truth_image.data, b.ground_truth_image.data)
    assert a.scene_masks.human == b.scene_masks.human
    assert a.scene_masks.obj == b.scene_masks.obj
    assert a.scene_masks.contact == b.scene_masks.contact
    assert a.full_object_mask == b.full_object_mask
    assert a.params == b.params


def test_realized_ratio_within_tolerance():
    for seed, target in [(0, 0.15), (1, 0.4), (2, 0.6), (3, 0.75)]:
        sc = generate_scene(seed, target, 64)
        realized = area(
            intersect(sc.full_object_mask, sc.scene_masks.human)
        ) / area(sc.full_object_mask)
        assert abs(realized - target) <= 0.02
        assert sc.params.realized_occlusion == pytest.approx(realized)


def test_visible_object_is_full_minus_occluder():
    sc = generate_scene(7, 0.5, 64)
    assert sc.scene_masks.obj == difference(
        sc.full_object_mask, sc.scene_masks.human
    )


def test_ground_truth_restricted_to_object():
    sc = generate_scene(8, 0.3, 64)
    inside = sc.full_object_mask.data
    obj_color = np.asarray(sc.params.object_color)
    assert np.all(sc.ground_truth_image.data[inside] == obj_color)
    bg_color = np.asarray(sc.params.background_color)
    assert np.all(sc.ground_truth_image.data[~inside] == bg_color)
    # input image shows only the visible part
    visible = sc.scene_masks.obj.data
    assert np.all(sc.image.data[visible] == obj_color)
    assert np.all(sc.image.data[~visible] == bg_color)


def test_contact_points_on_occluder_boundary():
    sc = generate_scene(9, 0.45, 64)
    assert 1 <= len(sc.params.contact_points) <= 3
    human = sc.scene_masks.human.data
    for x, y in sc.params.contact_points:
        assert human[y, x]
        window = human[max(0, y - 1) : y + 2, max(0, x - 1) : x + 2]
        assert not window.all()  # boundary pixel, not interior


def test_scene_yields_nondegenerate_regions():
    for seed in range(10):
        sc = generate_scene(seed, 0.2 + (seed % 4) * 0.15, 64)
        pair = identify_regions(sc.scene_masks)
        assert not pair.degenerate_fallback
        assert union(pair.primary, pair.secondary) == sc.scene_masks.human


def test_amodal_mask_extraction_is_exact_on_ground_truth():
    sc = generate_scene(10, 0.35, 64)
    extracted = amodal_mask_from_image(
        sc.ground_truth_image, sc.params.object_color, sc.params.background_color
    )
    assert extracted == sc.full_object_mask


def test_near_zero_target_leaves_object_visible():
    sc = generate_scene(11, 0.01, 64)
    realized = sc.params.realized_occlusion
    assert realized <= 0.03
    if realized == 0.0:
        assert sc.scene_masks.obj == sc.full_object_mask


def test_suite_singleton_matches_generate_scene():
    suite = generate_suite(1, seed=5, occlusion_range=(0.3, 0.5))
    single = generate_scene(5, 0.3, 64)
    assert suite[0].params == single.params
    assert np.array_equal(suite[0].image.data, single.image.data)


def test_suite_covers_requested_range():
    suite = generate_suite(12, seed=0, occlusion_range=(0.10, 0.40))
    realized = [sc.params.realized_occlusion for sc in suite]
    assert all(0.08 <= r <= 0.42 for r in realized)
    assert min(realized) < 0.2 and max(realized) > 0.3


def test_suite_passes_selection_filter_in_safe_range():
    suite = generate_suite(12, seed=3, occlusion_range=(0.12, 0.68))
    for sc in suite:
        rec = selection_filter(
            sc.full_object_mask, sc.scene_masks.obj, sc.scene_masks.human
        )
        assert rec.accepted, rec


def test_scene_validation():
    with pytest.raises(ValidationError):
        generate_scene(0, 0.0)
    with pytest.raises(ValidationError):
        generate_scene(0, 0.95)
    with pytest.raises(ValidationError):
        generate_scene(0, 0.4, canvas=16)
    with pytest.raises(ValidationError):
        generate_suite(0, seed=1)
    with pytest.raises(ValidationError):
        generate_suite(2, seed=1, occlusion_range=(0.5, 0.2))


def test_larger_canvas():
    sc = generate_scene(12, 0.4, 128)
    assert sc.image.width == 128
    assert abs(sc.params.realized_occlusion - 0.4) <= 0.02
