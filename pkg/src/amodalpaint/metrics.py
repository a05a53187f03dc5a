"""Metrics and dataset-selection logic.

Covers mean IoU between predicted and ground-truth amodal masks, the
occluded-pixel ratio of a region, the occlusion-based selection filter,
and batch region statistics.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

from .errors import ValidationError
from .mask import BinaryMask, area, intersect, union
from .regions import SceneMasks, identify_regions


@dataclass(frozen=True)
class OcclusionRecord:
    """Selection-filter verdict for one scene."""

    occlusion_ratio: float
    visible_object_area: int
    human_area: int
    accepted: bool


def miou(predicted: Sequence[BinaryMask], truth: Sequence[BinaryMask]) -> float:
    """Mean over pairs of |A ∩ B| / |A ∪ B|; an all-empty pair scores 1.0."""
    if len(predicted) == 0 or len(predicted) != len(truth):
        raise ValidationError(
            f"need equally many predictions and truths (>= 1), "
            f"got {len(predicted)} and {len(truth)}"
        )
    total = 0.0
    for pred, true in zip(predicted, truth):
        u = area(union(pred, true))
        total += 1.0 if u == 0 else area(intersect(pred, true)) / u
    return total / len(predicted)


def occluded_pixel_ratio(full_object: BinaryMask, region: BinaryMask) -> float:
    """Fraction of the region covered by the full (amodal) object mask."""
    denom = area(region)
    if denom == 0:
        raise ValidationError("occluded-pixel ratio undefined for an empty region")
    return area(intersect(full_object, region)) / denom


def selection_filter(
    full_object: BinaryMask, visible_object: BinaryMask, human: BinaryMask
) -> OcclusionRecord:
    """Accept scenes with occlusion in [0.10, 0.70] and enough visible object.

    Both occlusion bounds are inclusive, as is the visible-area floor of 5%
    of the human mask. The comparisons are done in integer arithmetic so
    the boundary cases are exact.
    """
    full_area = area(full_object)
    if full_area == 0:
        raise ValidationError("full-object mask is empty")
    visible_area = area(visible_object)
    human_area = area(human)
    occluded = full_area - visible_area
    occ_ok = 10 * occluded >= full_area and 10 * occluded <= 7 * full_area
    vis_ok = 20 * visible_area >= human_area
    return OcclusionRecord(
        occlusion_ratio=occluded / full_area,
        visible_object_area=visible_area,
        human_area=human_area,
        accepted=occ_ok and vis_ok,
    )


def region_report(
    scenes: Sequence[tuple[SceneMasks, BinaryMask]], radius: Optional[int] = None
) -> dict:
    """Identify regions per scene and average their occluded-pixel ratios.

    ``scenes`` pairs each SceneMasks with the full (amodal) object mask.
    Scenes whose secondary region is empty contribute no secondary ratio.
    """
    if len(scenes) == 0:
        raise ValidationError("region report needs at least one scene")
    records = []
    primary_ratios = []
    secondary_ratios = []
    for idx, (scene, full_object) in enumerate(scenes):
        try:
            pair = identify_regions(scene, radius)
            p_ratio = occluded_pixel_ratio(full_object, pair.primary)
            s_ratio = (
                occluded_pixel_ratio(full_object, pair.secondary)
                if area(pair.secondary) > 0
                else None
            )
        except Exception as exc:
            raise ValidationError(f"scene {idx}: {exc}") from exc
        primary_ratios.append(p_ratio)
        if s_ratio is not None:
            secondary_ratios.append(s_ratio)
        records.append(
            {
                "scene": idx,
                "primary_occluded_ratio": p_ratio,
                "secondary_occluded_ratio": s_ratio,
                "primary_area": area(pair.primary),
                "secondary_area": area(pair.secondary),
                "degenerate_fallback": pair.degenerate_fallback,
            }
        )
    return {
        "n": len(scenes),
        "primary_occluded_ratio_mean": sum(primary_ratios) / len(primary_ratios),
        "secondary_occluded_ratio_mean": (
            sum(secondary_ratios) / len(secondary_ratios) if secondary_ratios else None
        ),
        "records": records,
    }
