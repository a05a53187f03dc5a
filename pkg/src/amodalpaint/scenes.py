"""Procedural occlusion scenes with exact mask ground truth.

Each scene renders a flat-shaded object partially covered by an
articulated human-like silhouette. Flat shading keeps the ground-truth
image and the amodal object mask exact by construction, so the full
pipeline can be scored without any real dataset.
"""
from __future__ import annotations

import json
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np
from scipy import ndimage

from .diffusion import ImageBuffer, write_image_png
from .errors import GenerationError, ValidationError
from .mask import BinaryMask, write_mask_png
from .regions import SceneMasks, contact_mask_from_points

BACKGROUND_COLOR = (-0.85, -0.85, -0.80)

OBJECT_PALETTE = (
    (0.75, 0.45, -0.45),
    (-0.35, 0.65, 0.45),
    (0.55, -0.25, 0.70),
    (0.80, 0.75, -0.20),
)

OBJECT_KINDS = ("box", "ellipse", "duo")

_MAX_ATTEMPTS = 20
_RATIO_TOLERANCE = 0.02


@dataclass(frozen=True)
class SceneParams:
    """Generator parameters recorded with each scene."""

    seed: int
    canvas: int
    occlusion_target: float
    realized_occlusion: float
    object_kind: str
    object_color: tuple[float, float, float]
    background_color: tuple[float, float, float]
    human_offset: tuple[int, int]
    contact_points: tuple[tuple[int, int], ...]


@dataclass(frozen=True)
class SyntheticScene:
    """One generated scene: inputs, ground truth, and provenance."""

    image: ImageBuffer
    scene_masks: SceneMasks
    full_object_mask: BinaryMask
    ground_truth_image: ImageBuffer
    params: SceneParams


def _render_object(rng: np.random.Generator, c: int) -> tuple[np.ndarray, str]:
    kind = OBJECT_KINDS[rng.integers(0, len(OBJECT_KINDS))]
    ys, xs = np.ogrid[:c, :c]
    cx = c / 2 + rng.uniform(-0.08, 0.08) * c
    cy = c / 2 + rng.uniform(-0.08, 0.08) * c
    ax = rng.uniform(0.07, 0.12) * c
    ay = rng.uniform(0.06, 0.11) * c
    if kind == "box":
        grid = (np.abs(xs - cx) <= ax) & (np.abs(ys - cy) <= ay)
    elif kind == "ellipse":
        grid = ((xs - cx) / ax) ** 2 + ((ys - cy) / ay) ** 2 <= 1.0
    else:
        # two overlapping boxes, offset by less than a half-size to stay connected
        ox = rng.uniform(-0.8, 0.8) * ax
        oy = rng.uniform(-0.8, 0.8) * ay
        first = (np.abs(xs - cx) <= ax) & (np.abs(ys - cy) <= 0.7 * ay)
        second = (np.abs(xs - cx - ox) <= 0.7 * ax) & (np.abs(ys - cy - oy) <= ay)
        grid = first | second
    return grid, kind


def _render_silhouette(rng: np.random.Generator, c: int) -> np.ndarray:
    """Torso, head, one or two arms, optional legs, at a reference position."""
    ys, xs = np.ogrid[:c, :c]
    tx = c / 2
    tw = rng.uniform(0.14, 0.22) * c / 2
    ty0 = rng.uniform(0.15, 0.28) * c
    th = rng.uniform(0.42, 0.56) * c
    torso = (np.abs(xs - tx) <= tw) & (ys >= ty0) & (ys <= ty0 + th)
    hr = rng.uniform(0.05, 0.08) * c
    head = (xs - tx) ** 2 + (ys - (ty0 - hr * 0.8)) ** 2 <= hr * hr
    grid = torso | head
    sides = [1, -1] if rng.random() < 0.5 else [int(rng.choice((-1, 1)))]
    for side in sides:
        arm_len = rng.uniform(0.16, 0.28) * c
        arm_th = rng.uniform(0.05, 0.08) * c / 2
        arm_y = ty0 + rng.uniform(0.08, 0.3) * th
        x0 = tx + side * tw
        arm = (
            (ys >= arm_y - arm_th)
            & (ys <= arm_y + arm_th)
            & (np.minimum(x0, x0 + side * arm_len) <= xs)
            & (xs <= np.maximum(x0, x0 + side * arm_len))
        )
        grid = grid | arm
    if rng.random() < 0.7:
        leg_h = rng.uniform(0.12, 0.2) * c
        leg_w = rng.uniform(0.04, 0.06) * c
        for side in (-1, 1):
            lx = tx + side * tw * 0.5
            leg = (
                (np.abs(xs - lx) <= leg_w)
                & (ys >= ty0 + th)
                & (ys <= ty0 + th + leg_h)
            )
            grid = grid | leg
    return grid


def _shift(mask: np.ndarray, dy: int, dx: int) -> np.ndarray:
    h, w = mask.shape
    out = np.zeros_like(mask)
    ys0, ys1 = max(0, -dy), min(h, h - dy)
    xs0, xs1 = max(0, -dx), min(w, w - dx)
    if ys0 < ys1 and xs0 < xs1:
        out[ys0 + dy : ys1 + dy, xs0 + dx : xs1 + dx] = mask[ys0:ys1, xs0:xs1]
    return out


def _shift_overlap(mask: np.ndarray, other: np.ndarray, dy: int, dx: int) -> int:
    h, w = mask.shape
    ys0, ys1 = max(0, -dy), min(h, h - dy)
    xs0, xs1 = max(0, -dx), min(w, w - dx)
    if ys0 >= ys1 or xs0 >= xs1:
        return 0
    return int(
        np.count_nonzero(
            mask[ys0:ys1, xs0:xs1] & other[ys0 + dy : ys1 + dy, xs0 + dx : xs1 + dx]
        )
    )


def _best_offset(
    human0: np.ndarray, full_obj: np.ndarray, target: float
) -> tuple[int, int, int]:
    """Scan placements of the silhouette for the closest occlusion ratio.

    Ties on ratio error are broken toward the placement nearest the object
    so zero-overlap scenes still leave the subjects adjacent.
    """
    c = human0.shape[0]
    ys, xs = np.nonzero(human0)
    y0, y1, x0, x1 = ys.min(), ys.max(), xs.min(), xs.max()
    oys, oxs = np.nonzero(full_obj)
    ocy, ocx = oys.mean(), oxs.mean()
    hcy, hcx = (y0 + y1) / 2, (x0 + x1) / 2
    full_area = int(full_obj.sum())
    step = max(1, c // 64)

    def scan(dys, dxs):
        best = None
        for dy in dys:
            for dx in dxs:
                overlap = _shift_overlap(human0, full_obj, dy, dx)
                err = abs(overlap / full_area - target)
                dist = abs(hcy + dy - ocy) + abs(hcx + dx - ocx)
                key = (err, dist, dy, dx)
                if best is None or key < best:
                    best = key
        return best

    best = scan(range(-y0, c - y1, step), range(-x0, c - x1, step))
    if step > 1:
        _, _, by, bx = best
        best = scan(
            range(max(-y0, by - step), min(c - y1, by + step + 1)),
            range(max(-x0, bx - step), min(c - x1, bx + step + 1)),
        )
    _, _, dy, dx = best
    return dy, dx, _shift_overlap(human0, full_obj, dy, dx)


def _contact_points(
    rng: np.random.Generator, human: np.ndarray, visible: np.ndarray
) -> list[tuple[int, int]]:
    boundary = human & ~ndimage.binary_erosion(human, np.ones((3, 3), dtype=bool))
    near_object = ndimage.binary_dilation(visible, np.ones((5, 5), dtype=bool))
    cand_ys, cand_xs = np.nonzero(boundary & near_object)
    if cand_ys.size == 0:
        return []
    k = min(int(rng.integers(1, 4)), cand_ys.size)
    picks = rng.choice(cand_ys.size, size=k, replace=False)
    return [(int(cand_xs[i]), int(cand_ys[i])) for i in sorted(picks)]


def _paint(base: np.ndarray, mask: np.ndarray, color) -> np.ndarray:
    out = base.copy()
    out[mask] = color
    return out


def generate_scene(
    seed: int, occlusion_target: float = 0.4, canvas: int = 64
) -> SyntheticScene:
    """Render one occlusion scene whose realized ratio is within 0.02 of target."""
    if not 0.0 < occlusion_target < 0.9:
        raise ValidationError(
            f"occlusion_target must lie in (0, 0.9), got {occlusion_target}"
        )
    if canvas < 32:
        raise ValidationError(f"canvas must be >= 32, got {canvas}")
    rng = np.random.default_rng(seed)
    best_err = None
    for _ in range(_MAX_ATTEMPTS):
        full_obj, kind = _render_object(rng, canvas)
        human0 = _render_silhouette(rng, canvas)
        dy, dx, overlap = _best_offset(human0, full_obj, occlusion_target)
        realized = overlap / int(full_obj.sum())
        err = abs(realized - occlusion_target)
        if best_err is None or err < best_err:
            best_err = err
        if err > _RATIO_TOLERANCE:
            continue

        human = _shift(human0, dy, dx)
        visible = full_obj & ~human
        points = _contact_points(rng, human, visible)
        contact = (
            contact_mask_from_points(points, canvas, canvas)
            if points
            else BinaryMask.zeros(canvas, canvas)
        )
        smpl = BinaryMask(
            ndimage.binary_dilation(human, np.ones((3, 3), dtype=bool))
        )
        color = OBJECT_PALETTE[int(rng.integers(0, len(OBJECT_PALETTE)))]
        base = np.empty((canvas, canvas, 3), dtype=np.float64)
        base[:, :] = BACKGROUND_COLOR
        image = ImageBuffer(_paint(base, visible, color))
        ground_truth = ImageBuffer(_paint(base, full_obj, color))
        masks = SceneMasks(
            human=BinaryMask(human),
            obj=BinaryMask(visible),
            contact=contact,
            smpl=smpl,
            occluder_is_human=True,
        )
        params = SceneParams(
            seed=seed,
            canvas=canvas,
            occlusion_target=float(occlusion_target),
            realized_occlusion=float(realized),
            object_kind=kind,
            object_color=color,
            background_color=BACKGROUND_COLOR,
            human_offset=(int(dy), int(dx)),
            contact_points=tuple(points),
        )
        return SyntheticScene(
            image=image,
            scene_masks=masks,
            full_object_mask=BinaryMask(full_obj),
            ground_truth_image=ground_truth,
            params=params,
        )
    raise GenerationError(
        f"could not realize occlusion {occlusion_target:.3f} within "
        f"{_RATIO_TOLERANCE} after {_MAX_ATTEMPTS} attempts "
        f"(best error {best_err:.3f}, canvas {canvas})"
    )


def generate_suite(
    count: int,
    seed: int,
    occlusion_range: tuple[float, float] = (0.1, 0.7),
    canvas: int = 64,
) -> list[SyntheticScene]:
    """Scenes with occlusion targets uniformly covering the range."""
    if count < 1:
        raise ValidationError(f"count must be >= 1, got {count}")
    lo, hi = occlusion_range
    if not (0.0 < lo <= hi < 0.9):
        raise ValidationError(f"occlusion_range must satisfy 0 < lo <= hi < 0.9, got {occlusion_range}")
    targets = np.linspace(lo, hi, count)
    return [generate_scene(seed + i, float(t), canvas) for i, t in enumerate(targets)]


def amodal_mask_from_image(
    image: ImageBuffer, object_color, background_color
) -> BinaryMask:
    """Classify each pixel to the nearer of the object/background colors."""
    obj = np.asarray(object_color, dtype=np.float64)
    bg = np.asarray(background_color, dtype=np.float64)
    d_obj = ((image.data - obj) ** 2).sum(axis=2)
    d_bg = ((image.data - bg) ** 2).sum(axis=2)
    return BinaryMask(d_obj < d_bg)


def write_scene(scene: SyntheticScene, directory) -> Path:
    """Write a scene directory with a manifest the CLI subcommands consume."""
    out = Path(directory)
    out.mkdir(parents=True, exist_ok=True)
    write_image_png(scene.image, out / "image.png")
    write_image_png(scene.ground_truth_image, out / "ground_truth.png")
    write_mask_png(scene.scene_masks.human, out / "human_mask.png")
    write_mask_png(scene.scene_masks.obj, out / "object_mask.png")
    write_mask_png(scene.scene_masks.contact, out / "contact_mask.png")
    if scene.scene_masks.smpl is not None:
        write_mask_png(scene.scene_masks.smpl, out / "smpl_mask.png")
    write_mask_png(scene.full_object_mask, out / "full_object_mask.png")
    manifest = {
        "image": "image.png",
        "human_mask": "human_mask.png",
        "object_mask": "object_mask.png",
        "contact_mask": "contact_mask.png",
        "contact_points": [list(p) for p in scene.params.contact_points],
        "smpl_mask": "smpl_mask.png" if scene.scene_masks.smpl is not None else None,
        "occluder": "human" if scene.scene_masks.occluder_is_human else "object",
        "prompt": f"a {scene.params.object_kind} partially hidden behind a person",
        "full_object_mask": "full_object_mask.png",
        "ground_truth_image": "ground_truth.png",
        "target_image": "ground_truth.png",
        "generator": asdict(scene.params),
    }
    path = out / "manifest.json"
    with open(path, "w", encoding="utf-8") as f:
        json.dump(manifest, f, indent=2)
        f.write("\n")
    return path
