"""Command-line front end for the occlusion-region inpainting pipeline.

Subcommands: generate (synthetic scenes), identify (region split),
inpaint (multi-regional completion), sweep (strength ablation), filter
(occlusion-based dataset selection), report (region statistics).

Exit codes: 0 success, 2 manifest/IO errors, 3 validation errors.
"""
from __future__ import annotations

import argparse
import csv
import json
import sys
from dataclasses import replace
from pathlib import Path

from . import figures
from .diffusion import (
    ImageBuffer,
    InpaintConfig,
    InpaintSession,
    make_schedule,
    oracle_denoiser,
    read_image_png,
    resample_image_nearest,
    write_image_png,
    zero_denoiser,
)
from .errors import GenerationError, ManifestError, ValidationError
from .mask import (
    BinaryMask,
    area,
    read_mask_png,
    resample_nearest,
    write_mask_png,
)
from .metrics import miou, region_report, selection_filter
from .regions import (
    SceneMasks,
    contact_mask_from_points,
    human_primary_region,
    human_repaint_region,
    identify_regions,
)
from .scenes import amodal_mask_from_image, generate_suite, write_scene

LIGHT_BIN = "light(10-40%)"
HEAVY_BIN = "heavy(40-70%)"
OTHER_BIN = "other"


def _load_json(path: Path) -> dict:
    try:
        with open(path, encoding="utf-8") as f:
            return json.load(f)
    except FileNotFoundError:
        raise ManifestError(f"manifest not found: {path}") from None
    except json.JSONDecodeError as exc:
        raise ManifestError(f"manifest {path}: invalid JSON ({exc})") from exc


def _read_mask(base: Path, manifest: dict, field: str, required: bool):
    rel = manifest.get(field)
    if rel is None:
        if required:
            raise ManifestError(f"manifest missing field '{field}'")
        return None
    path = base / rel
    try:
        return read_mask_png(path)
    except FileNotFoundError:
        raise ManifestError(f"{field}: file not found: {path}") from None
    except OSError as exc:
        raise ManifestError(f"{field}: cannot read {path}: {exc}") from exc


def _read_image(base: Path, manifest: dict, field: str) -> ImageBuffer:
    rel = manifest.get(field)
    if rel is None:
        raise ManifestError(f"manifest missing field '{field}'")
    path = base / rel
    try:
        return read_image_png(path)
    except FileNotFoundError:
        raise ManifestError(f"{field}: file not found: {path}") from None
    except OSError as exc:
        raise ManifestError(f"{field}: cannot read {path}: {exc}") from exc


def _scene_masks(base: Path, manifest: dict) -> SceneMasks:
    human = _read_mask(base, manifest, "human_mask", required=True)
    obj = _read_mask(base, manifest, "object_mask", required=True)
    occluder = manifest.get("occluder")
    if occluder not in ("human", "object"):
        raise ManifestError(
            f"manifest field 'occluder' must be 'human' or 'object', got {occluder!r}"
        )
    contact = _read_mask(base, manifest, "contact_mask", required=False)
    if contact is None:
        points = manifest.get("contact_points")
        if points:
            contact = contact_mask_from_points(
                [(int(p[0]), int(p[1])) for p in points], human.width, human.height
            )
        else:
            contact = BinaryMask.zeros(human.width, human.height)
    smpl = _read_mask(base, manifest, "smpl_mask", required=False)
    return SceneMasks(
        human=human,
        obj=obj,
        contact=contact,
        smpl=smpl,
        occluder_is_human=(occluder == "human"),
    )


def _find_manifests(dataset: Path) -> list[Path]:
    found = sorted(dataset.glob("*/manifest.json"))
    direct = dataset / "manifest.json"
    if direct.is_file():
        found.insert(0, direct)
    return found


def _write_json(payload, path: Path) -> None:
    with open(path, "w", encoding="utf-8") as f:
        json.dump(payload, f, indent=2)
        f.write("\n")


def cmd_generate(args) -> int:
    lo, hi = args.occlusion
    suite = generate_suite(args.count, args.seed, (lo, hi), args.canvas)
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    for i, scene in enumerate(suite):
        write_scene(scene, out / f"scene_{i:04d}")
    print(f"wrote {len(suite)} scenes to {out}")
    return 0


def cmd_identify(args) -> int:
    manifest_path = Path(args.manifest)
    manifest = _load_json(manifest_path)
    scene = _scene_masks(manifest_path.parent, manifest)
    out = Path(args.out_dir)

    if args.mode == "human":
        if scene.smpl is None:
            raise ValidationError("--mode human requires an 'smpl_mask' in the manifest")
        if args.completed_object_mask:
            completed = read_mask_png(args.completed_object_mask)
            region = human_repaint_region(scene.smpl, completed)
        else:
            region = human_primary_region(scene.smpl, scene.obj)
        primary = region
        secondary = BinaryMask.zeros(region.width, region.height)
        record = {
            "mode": "human",
            "degenerate_fallback": False,
            "primary_area": area(primary),
            "secondary_area": 0,
            "contact_present": area(scene.contact) > 0,
        }
    else:
        pair = identify_regions(scene, args.radius)
        primary, secondary = pair.primary, pair.secondary
        record = {
            "mode": "object",
            "degenerate_fallback": pair.degenerate_fallback,
            "primary_area": area(primary),
            "secondary_area": area(secondary),
            "contact_present": area(scene.contact) > 0,
        }

    out.mkdir(parents=True, exist_ok=True)
    write_mask_png(primary, out / "M_p.png")
    write_mask_png(secondary, out / "M_s.png")
    _write_json(record, out / "regions.json")
    return 0


def _make_denoiser(choice: str, base: Path, manifest: dict, resolution: int, sched):
    if choice == "noise-free":
        return zero_denoiser()
    target = _read_image(base, manifest, "target_image")
    target = resample_image_nearest(target, resolution, resolution)
    return oracle_denoiser(target, sched)


def cmd_inpaint(args) -> int:
    # validates the numeric flags before any file is touched
    cfg = InpaintConfig(
        inference_steps=args.steps,
        strength=args.strength,
        seed=args.seed,
        working_resolution=args.resolution,
    )
    manifest_path = Path(args.manifest)
    manifest = _load_json(manifest_path)
    base = manifest_path.parent
    scene = _scene_masks(base, manifest)
    image = _read_image(base, manifest, "image")
    if image.data.shape[:2] != scene.human.data.shape:
        raise ValidationError(
            f"image is {image.width}x{image.height} but masks are "
            f"{scene.human.width}x{scene.human.height}"
        )
    pair = identify_regions(scene, args.radius)

    res = args.resolution
    sched = make_schedule()
    denoiser = _make_denoiser(args.denoiser, base, manifest, res, sched)
    cfg = replace(cfg, conditioning=manifest.get("prompt"))
    session = InpaintSession(
        resample_image_nearest(image, res, res),
        resample_nearest(pair.primary, res, res),
        resample_nearest(pair.secondary, res, res),
        cfg,
        denoiser,
        sched,
    )
    session.run()
    completed = session.result()

    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    write_image_png(completed, out / "completed.png")
    _write_json(
        {
            "seed": args.seed,
            "strength": args.strength,
            "inference_steps": args.steps,
            "switch_step": session.plan.switch_step,
            "denoiser": args.denoiser,
            "resolution": res,
            "degenerate_fallback": pair.degenerate_fallback,
            "steps": session.audit,
        },
        out / "run.json",
    )
    return 0


def _occlusion_bin(ratio: float) -> str:
    if 0.10 <= ratio < 0.40:
        return LIGHT_BIN
    if 0.40 <= ratio <= 0.70:
        return HEAVY_BIN
    return OTHER_BIN


def _generator_colors(manifest: dict) -> tuple[tuple, tuple]:
    gen = manifest.get("generator") or {}
    obj_color = gen.get("object_color")
    bg_color = gen.get("background_color")
    if obj_color is None or bg_color is None:
        raise ManifestError(
            "sweep scoring needs generator 'object_color'/'background_color' "
            "in the manifest (synthetic scene directories provide them)"
        )
    return tuple(obj_color), tuple(bg_color)


def cmd_sweep(args) -> int:
    strengths = [s for s in (p.strip() for p in args.strengths.split(",")) if s]
    if not strengths:
        raise ValidationError("--strengths must name at least one value")
    values = []
    for s in strengths:
        try:
            v = float(s)
        except ValueError:
            raise ValidationError(f"--strengths entry {s!r} is not a number") from None
        if not 0.0 <= v <= 1.0:
            raise ValidationError(f"strength {v} outside [0, 1]")
        values.append(v)

    manifests = _find_manifests(Path(args.dataset))
    if not manifests:
        raise ValidationError(f"no scene manifests found under {args.dataset}")

    res = args.resolution
    sched = make_schedule()
    per_scene = []
    for manifest_path in manifests:
        manifest = _load_json(manifest_path)
        base = manifest_path.parent
        scene = _scene_masks(base, manifest)
        full = _read_mask(base, manifest, "full_object_mask", required=True)
        image = _read_image(base, manifest, "image")
        obj_color, bg_color = _generator_colors(manifest)
        occ = (area(full) - area(scene.obj)) / area(full)
        pair = identify_regions(scene, args.radius)
        image_r = resample_image_nearest(image, res, res)
        primary_r = resample_nearest(pair.primary, res, res)
        secondary_r = resample_nearest(pair.secondary, res, res)
        truth_r = resample_nearest(full, res, res)
        denoiser = _make_denoiser(args.denoiser, base, manifest, res, sched)
        ious = {}
        for v in values:
            cfg = InpaintConfig(
                inference_steps=args.steps,
                strength=v,
                seed=args.seed,
                conditioning=manifest.get("prompt"),
                working_resolution=res,
            )
            session = InpaintSession(
                image_r, primary_r, secondary_r, cfg, denoiser, sched
            )
            session.run()
            predicted = amodal_mask_from_image(session.result(), obj_color, bg_color)
            ious[v] = miou([predicted], [truth_r])
        per_scene.append(
            {
                "manifest": str(manifest_path),
                "occlusion": occ,
                "bin": _occlusion_bin(occ),
                "iou": {f"{v}": ious[v] for v in values},
            }
        )

    groups = []
    for v in values:
        for name in (LIGHT_BIN, HEAVY_BIN):
            rows = [s for s in per_scene if s["bin"] == name]
            if rows:
                groups.append(
                    {
                        "strength": v,
                        "bin": name,
                        "n": len(rows),
                        "miou": sum(r["iou"][f"{v}"] for r in rows) / len(rows),
                    }
                )

    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    with open(out / "sweep.csv", "w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f)
        writer.writerow(["strength", "bin", "n", "miou"])
        for g in groups:
            writer.writerow([g["strength"], g["bin"], g["n"], f"{g['miou']:.6f}"])
    _write_json(
        {
            "steps": args.steps,
            "seed": args.seed,
            "resolution": res,
            "strengths": values,
            "groups": groups,
            "scenes": per_scene,
        },
        out / "sweep.json",
    )
    if groups:
        figures.save_sweep_figure(groups, out / "sweep.png")
    return 0


def cmd_filter(args) -> int:
    manifests = _find_manifests(Path(args.dataset))
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    if not manifests:
        print(f"warning: no scene manifests under {args.dataset}", file=sys.stderr)
        _write_json([], out / "accepted.json")
        _write_json([], out / "records.json")
        return 0
    records = []
    accepted = []
    for manifest_path in manifests:
        manifest = _load_json(manifest_path)
        base = manifest_path.parent
        scene = _scene_masks(base, manifest)
        full = _read_mask(base, manifest, "full_object_mask", required=True)
        rec = selection_filter(full, scene.obj, scene.human)
        records.append(
            {
                "manifest": str(manifest_path),
                "occlusion_ratio": rec.occlusion_ratio,
                "visible_object_area": rec.visible_object_area,
                "human_area": rec.human_area,
                "accepted": rec.accepted,
            }
        )
        if rec.accepted:
            accepted.append(str(manifest_path))
    _write_json(accepted, out / "accepted.json")
    _write_json(records, out / "records.json")
    print(f"accepted {len(accepted)} of {len(records)} scenes")
    return 0


def cmd_report(args) -> int:
    manifests = _find_manifests(Path(args.dataset))
    if not manifests:
        raise ValidationError(f"no scene manifests found under {args.dataset}")
    scenes = []
    accepted_count = 0
    for manifest_path in manifests:
        manifest = _load_json(manifest_path)
        base = manifest_path.parent
        scene = _scene_masks(base, manifest)
        full = _read_mask(base, manifest, "full_object_mask", required=True)
        if selection_filter(full, scene.obj, scene.human).accepted:
            accepted_count += 1
        scenes.append((scene, full))
    rep = region_report(scenes, args.radius)
    for rec, manifest_path in zip(rep["records"], manifests):
        rec["manifest"] = str(manifest_path)
    report = {
        "n": rep["n"],
        "miou": None,
        "clip_score": None,
        "primary_occluded_ratio_mean": rep["primary_occluded_ratio_mean"],
        "secondary_occluded_ratio_mean": rep["secondary_occluded_ratio_mean"],
        "accepted_count": accepted_count,
        "records": rep["records"],
    }
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    _write_json(report, out / "report.json")
    with open(out / "report.csv", "w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f)
        writer.writerow(
            [
                "scene",
                "manifest",
                "primary_occluded_ratio",
                "secondary_occluded_ratio",
                "primary_area",
                "secondary_area",
                "degenerate_fallback",
            ]
        )
        for rec in rep["records"]:
            writer.writerow(
                [
                    rec["scene"],
                    rec["manifest"],
                    f"{rec['primary_occluded_ratio']:.6f}",
                    ""
                    if rec["secondary_occluded_ratio"] is None
                    else f"{rec['secondary_occluded_ratio']:.6f}",
                    rec["primary_area"],
                    rec["secondary_area"],
                    rec["degenerate_fallback"],
                ]
            )
    figures.save_report_figure(report, out / "report.png")
    print(
        f"report over {report['n']} scenes: primary mean "
        f"{report['primary_occluded_ratio_mean']:.4f}, secondary mean "
        f"{report['secondary_occluded_ratio_mean']}"
    )
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="amodalpaint",
        description="Contact-aware occlusion regions + multi-regional inpainting",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="write a synthetic scene dataset")
    p.add_argument("out_dir", help="output dataset directory")
    p.add_argument("--count", type=int, default=20)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument(
        "--occlusion",
        type=float,
        nargs=2,
        default=(0.1, 0.7),
        metavar=("LO", "HI"),
        help="occlusion-ratio range covered uniformly",
    )
    p.add_argument("--canvas", type=int, default=64)
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("identify", help="split the occluder into regions")
    p.add_argument("manifest", help="scene manifest JSON")
    p.add_argument("out_dir", help="output directory for M_p.png/M_s.png/regions.json")
    p.add_argument("--radius", type=int, default=None, help="boundary dilation radius")
    p.add_argument("--mode", choices=("object", "human"), default="object")
    p.add_argument(
        "--completed-object-mask",
        default=None,
        help="with --mode human: repaint region against this completed-object mask",
    )
    p.set_defaults(func=cmd_identify)

    p = sub.add_parser("inpaint", help="multi-regional inpainting of one scene")
    p.add_argument("manifest")
    p.add_argument("out_dir")
    p.add_argument("--strength", "-r", type=float, default=0.5)
    p.add_argument("--steps", "-T", type=int, default=50)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--radius", type=int, default=None)
    p.add_argument("--resolution", type=int, default=64)
    p.add_argument("--denoiser", choices=("oracle", "noise-free"), default="oracle")
    p.set_defaults(func=cmd_inpaint)

    p = sub.add_parser("sweep", help="strength ablation over a scene dataset")
    p.add_argument("dataset")
    p.add_argument("out_dir")
    p.add_argument("--strengths", default="0.0,0.1,0.5,0.9,1.0", help="comma list")
    p.add_argument("--steps", "-T", type=int, default=50)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--radius", type=int, default=None)
    p.add_argument("--resolution", type=int, default=64)
    p.add_argument("--denoiser", choices=("oracle", "noise-free"), default="oracle")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("filter", help="occlusion-based dataset selection")
    p.add_argument("dataset")
    p.add_argument("out_dir")
    p.set_defaults(func=cmd_filter)

    p = sub.add_parser("report", help="region statistics over a scene dataset")
    p.add_argument("dataset")
    p.add_argument("out_dir")
    p.add_argument("--radius", type=int, default=None)
    p.set_defaults(func=cmd_report)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ManifestError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ValidationError, GenerationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def entrypoint() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
