"""Contact-aware occluded-region identification and multi-regional inpainting.

The library splits an occluder mask into a primary region (convex hull of
the human-object proximity band plus contact points, intersected with the
occluder) and a secondary region (the rest), then runs a deterministic
DDIM inpainting loop that denoises the primary region first and widens to
both regions at a strength-controlled switch step.
"""

from .diffusion import (
    ImageBuffer,
    InpaintConfig,
    InpaintSession,
    NoiseSchedule,
    TimestepPlan,
    ddim_step,
    make_schedule,
    make_timestep_plan,
    multiregional_inpaint,
    oracle_denoiser,
    q_sample,
    read_image_png,
    resample_image_nearest,
    single_mask_inpaint,
    strength_to_switch_step,
    write_image_png,
    zero_denoiser,
)
from .errors import (
    GenerationError,
    ManifestError,
    ShapeMismatchError,
    ValidationError,
)
from .hull import ConvexPolygon, contains, convex_hull, rasterize_hull
from .mask import (
    BinaryMask,
    PixelPoint,
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
from .metrics import (
    OcclusionRecord,
    miou,
    occluded_pixel_ratio,
    region_report,
    selection_filter,
)
from .regions import (
    RegionPair,
    SceneMasks,
    contact_mask_from_points,
    default_contact_radius,
    human_primary_region,
    human_repaint_region,
    identify_regions,
    occlusion_boundary,
)
from .scenes import (
    SceneParams,
    SyntheticScene,
    amodal_mask_from_image,
    generate_scene,
    generate_suite,
    write_scene,
)

__version__ = "0.1.0"

__all__ = [
    "BinaryMask",
    "ConvexPolygon",
    "GenerationError",
    "ImageBuffer",
    "InpaintConfig",
    "InpaintSession",
    "ManifestError",
    "NoiseSchedule",
    "OcclusionRecord",
    "PixelPoint",
    "RegionPair",
    "SceneMasks",
    "SceneParams",
    "ShapeMismatchError",
    "SyntheticScene",
    "TimestepPlan",
    "ValidationError",
    "amodal_mask_from_image",
    "area",
    "complement",
    "contact_mask_from_points",
    "contains",
    "convex_hull",
    "ddim_step",
    "default_contact_radius",
    "default_dilation_radius",
    "difference",
    "dilate",
    "foreground_points",
    "generate_scene",
    "generate_suite",
    "human_primary_region",
    "human_repaint_region",
    "identify_regions",
    "intersect",
    "make_schedule",
    "make_timestep_plan",
    "miou",
    "multiregional_inpaint",
    "occluded_pixel_ratio",
    "occlusion_boundary",
    "oracle_denoiser",
    "q_sample",
    "rasterize_hull",
    "read_image_png",
    "read_mask_png",
    "region_report",
    "resample_image_nearest",
    "resample_nearest",
    "selection_filter",
    "single_mask_inpaint",
    "strength_to_switch_step",
    "union",
    "write_image_png",
    "write_mask_png",
    "write_scene",
    "zero_denoiser",
]
