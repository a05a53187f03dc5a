"""Deterministic DDIM inpainting loop with a two-phase region schedule.

Denoising runs in pixel space over a pluggable denoiser. The loop starts
from pure seeded noise and denoises the primary region first; once the
remaining-step count drops to the strength-derived switch step, the active
mask widens to primary ∪ secondary. Pixels outside the active mask are
re-injected each step as forward-noised input (replacement conditioning),
and pixels outside the full union are copied from the input bit-exactly at
the end.

Image files: 8-bit RGB or grayscale PNG, mapped linearly to [-1, 1] on
load and inverted on save.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Any, Callable, Optional, Protocol

import numpy as np
from PIL import Image

from .errors import ShapeMismatchError, ValidationError
from .mask import BinaryMask
from .regions import RegionPair

DEFAULT_TRAINING_STEPS = 1000
DEFAULT_BETA_START = 0.00085
DEFAULT_BETA_END = 0.012


@dataclass(frozen=True, eq=False)
class ImageBuffer:
    """Float image in (height, width, channels) layout, 1 or 3 channels.

    Clean images live in [-1, 1]; noisy intermediates are unbounded.
    """

    data: np.ndarray

    def __post_init__(self) -> None:
        arr = np.array(self.data, dtype=np.float64)
        if arr.ndim == 2:
            arr = arr[:, :, None]
        if arr.ndim != 3:
            raise ValidationError(f"image data must be 2-D or 3-D, got {arr.ndim}-D")
        if arr.shape[2] not in (1, 3):
            raise ValidationError(f"channels must be 1 or 3, got {arr.shape[2]}")
        if arr.shape[0] < 1 or arr.shape[1] < 1:
            raise ValidationError(f"image dimensions must be >= 1, got {arr.shape}")
        arr.setflags(write=False)
        object.__setattr__(self, "data", arr)

    @property
    def height(self) -> int:
        return self.data.shape[0]

    @property
    def width(self) -> int:
        return self.data.shape[1]

    @property
    def channels(self) -> int:
        return self.data.shape[2]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ImageBuffer):
            return NotImplemented
        return self.data.shape == other.data.shape and bool(
            np.array_equal(self.data, other.data)
        )


@dataclass(frozen=True)
class NoiseSchedule:
    """Forward-diffusion coefficients: betas and cumulative alpha products."""

    betas: np.ndarray
    alphas_cumprod: np.ndarray

    def __post_init__(self) -> None:
        betas = np.array(self.betas, dtype=np.float64)
        abar = np.array(self.alphas_cumprod, dtype=np.float64)
        if betas.ndim != 1 or abar.shape != betas.shape or betas.size < 2:
            raise ValidationError("schedule arrays must be 1-D, equal length >= 2")
        if np.any(betas <= 0.0) or np.any(betas >= 1.0):
            raise ValidationError("betas must lie strictly in (0, 1)")
        if np.any(np.diff(betas) < 0.0):
            raise ValidationError("betas must be non-decreasing")
        if np.any(np.diff(abar) >= 0.0):
            raise ValidationError("cumulative alphas must be strictly decreasing")
        betas.setflags(write=False)
        abar.setflags(write=False)
        object.__setattr__(self, "betas", betas)
        object.__setattr__(self, "alphas_cumprod", abar)

    @property
    def training_steps(self) -> int:
        return int(self.betas.shape[0])

    def alpha_bar(self, t: int) -> float:
        """Cumulative alpha at training step t; t = -1 is the clean level (1.0)."""
        if t == -1:
            return 1.0
        if not 0 <= t < self.training_steps:
            raise IndexError(f"timestep {t} outside [0, {self.training_steps})")
        return float(self.alphas_cumprod[t])


def make_schedule(
    training_steps: int = DEFAULT_TRAINING_STEPS,
    beta_start: float = DEFAULT_BETA_START,
    beta_end: float = DEFAULT_BETA_END,
) -> NoiseSchedule:
    """Scaled-linear beta schedule (linear in sqrt(beta)) with cumulative alphas."""
    if training_steps < 2:
        raise ValidationError(f"training_steps must be >= 2, got {training_steps}")
    betas = np.linspace(beta_start**0.5, beta_end**0.5, training_steps) ** 2
    return NoiseSchedule(betas, np.cumprod(1.0 - betas))


def strength_to_switch_step(inference_steps: int, strength: float) -> int:
    """Switch step floor(T * r): the number of steps the secondary region gets."""
    if inference_steps < 1:
        raise ValidationError(f"inference_steps must be >= 1, got {inference_steps}")
    if not 0.0 <= strength <= 1.0:
        raise ValidationError(f"strength must lie in [0, 1], got {strength}")
    # tiny epsilon so decimal strengths like 0.3 floor to the intended integer
    return int(math.floor(inference_steps * strength + 1e-9))


@dataclass(frozen=True)
class TimestepPlan:
    """Descending inference timesteps plus the phase-switch step."""

    inference_steps: int
    switch_step: int
    timesteps: tuple[int, ...]
    strength: float

    def __post_init__(self) -> None:
        if not 0 <= self.switch_step <= self.inference_steps:
            raise ValidationError("switch_step outside [0, inference_steps]")
        if len(self.timesteps) != self.inference_steps:
            raise ValidationError("timestep count must equal inference_steps")
        if any(a <= b for a, b in zip(self.timesteps, self.timesteps[1:])):
            raise ValidationError("timesteps must be strictly descending")


def make_timestep_plan(
    training_steps: int, inference_steps: int, strength: float
) -> TimestepPlan:
    """Evenly spaced descending timesteps t_i = (N // T) * i, i = T-1 .. 0."""
    if inference_steps < 1:
        raise ValidationError(f"inference_steps must be >= 1, got {inference_steps}")
    if inference_steps > training_steps:
        raise ValidationError(
            f"inference_steps {inference_steps} exceeds training_steps {training_steps}"
        )
    stride = training_steps // inference_steps
    ts = tuple(stride * i for i in range(inference_steps - 1, -1, -1))
    return TimestepPlan(
        inference_steps=inference_steps,
        switch_step=strength_to_switch_step(inference_steps, strength),
        timesteps=ts,
        strength=float(strength),
    )


class Denoiser(Protocol):
    """Noise predictor slot of the sampling loop.

    Receives the noisy image, the training timestep, the active mask and
    the input with the active region zeroed, plus an opaque conditioning
    payload, and returns a predicted noise field of the same shape.
    Implementations must be deterministic for fixed inputs.
    """

    def __call__(
        self,
        x_t: ImageBuffer,
        t: int,
        active_mask: BinaryMask,
        masked_input: ImageBuffer,
        conditioning: Any,
    ) -> ImageBuffer: ...


def _require_same_image_shape(a: ImageBuffer, b: ImageBuffer, what: str) -> None:
    if a.data.shape != b.data.shape:
        raise ShapeMismatchError(
            f"{what}: image shapes differ, {a.data.shape} vs {b.data.shape}"
        )


def q_sample(
    x0: ImageBuffer, t: int, noise: ImageBuffer, sched: NoiseSchedule
) -> ImageBuffer:
    """Forward diffusion: sqrt(abar_t) * x0 + sqrt(1 - abar_t) * noise.

    t = -1 is the clean level and returns x0 exactly (no rounding through
    the identity coefficients).
    """
    _require_same_image_shape(x0, noise, "q_sample")
    if t == -1:
        return x0
    abar = sched.alpha_bar(t)
    return ImageBuffer(math.sqrt(abar) * x0.data + math.sqrt(1.0 - abar) * noise.data)


def ddim_step(
    x_t: ImageBuffer, eps_hat: ImageBuffer, t: int, t_prev: int, sched: NoiseSchedule
) -> ImageBuffer:
    """One deterministic DDIM update from training step t down to t_prev.

    Predicts the clean image from the noise estimate and re-noises it to
    level t_prev; t_prev = -1 returns the clean prediction itself.
    """
    _require_same_image_shape(x_t, eps_hat, "ddim_step")
    if t_prev < -1 or t_prev >= t:
        raise ValidationError(f"need t > t_prev >= -1, got t={t}, t_prev={t_prev}")
    abar_t = sched.alpha_bar(t)
    abar_prev = sched.alpha_bar(t_prev)
    x0_pred = (x_t.data - math.sqrt(1.0 - abar_t) * eps_hat.data) / math.sqrt(abar_t)
    if t_prev == -1:
        return ImageBuffer(x0_pred)
    return ImageBuffer(
        math.sqrt(abar_prev) * x0_pred + math.sqrt(1.0 - abar_prev) * eps_hat.data
    )


def oracle_denoiser(
    target: ImageBuffer, sched: Optional[NoiseSchedule] = None
) -> Callable[..., ImageBuffer]:
    """Denoiser whose noise prediction drives DDIM exactly onto ``target``.

    Computes eps = (x_t - sqrt(abar_t) * target) / sqrt(1 - abar_t), the
    unique prediction consistent with the target being the clean image at
    level t. Ignores mask and conditioning. Stands in for a trained
    inpainting model in closed-loop tests. ``sched`` must match the
    schedule used by the sampling loop; None means the default schedule.
    """
    schedule = sched if sched is not None else make_schedule()

    def denoise(
        x_t: ImageBuffer,
        t: int,
        active_mask: BinaryMask,
        masked_input: ImageBuffer,
        conditioning: Any = None,
    ) -> ImageBuffer:
        _require_same_image_shape(x_t, target, "oracle denoiser")
        abar = schedule.alpha_bar(t)
        eps = (x_t.data - math.sqrt(abar) * target.data) / math.sqrt(1.0 - abar)
        return ImageBuffer(eps)

    return denoise


def zero_denoiser() -> Callable[..., ImageBuffer]:
    """Denoiser predicting zero noise everywhere (trivial noise-free model)."""

    def denoise(
        x_t: ImageBuffer,
        t: int,
        active_mask: BinaryMask,
        masked_input: ImageBuffer,
        conditioning: Any = None,
    ) -> ImageBuffer:
        return ImageBuffer(np.zeros_like(x_t.data))

    return denoise


@dataclass(frozen=True)
class InpaintConfig:
    """Sampling parameters; ``conditioning`` (e.g. a text prompt) is opaque."""

    inference_steps: int = 50
    strength: float = 0.5
    seed: int = 0
    conditioning: Any = None
    working_resolution: int = 64

    def __post_init__(self) -> None:
        if self.inference_steps < 1:
            raise ValidationError(
                f"inference_steps must be >= 1, got {self.inference_steps}"
            )
        if not 0.0 <= self.strength <= 1.0:
            raise ValidationError(f"strength must lie in [0, 1], got {self.strength}")
        if self.working_resolution < 1:
            raise ValidationError(
                f"working_resolution must be >= 1, got {self.working_resolution}"
            )


class InpaintSession:
    """Stepwise inpainting engine supporting pause/resume.

    Running to step k, then resuming to the end, is bit-identical to an
    uninterrupted run: the seeded generator is part of the session state
    and noise is drawn in a fixed order (initial latent, then one field
    per step).
    """

    def __init__(
        self,
        image: ImageBuffer,
        primary: BinaryMask,
        secondary: BinaryMask,
        cfg: InpaintConfig,
        denoiser: Denoiser,
        sched: NoiseSchedule,
    ) -> None:
        if primary.data.shape != secondary.data.shape:
            raise ShapeMismatchError("primary/secondary mask shapes differ")
        if primary.data.shape != image.data.shape[:2]:
            raise ShapeMismatchError(
                f"mask {primary.data.shape} does not match image "
                f"{image.data.shape[:2]}"
            )
        self.cfg = cfg
        self.denoiser = denoiser
        self.sched = sched
        self.plan = make_timestep_plan(
            sched.training_steps, cfg.inference_steps, cfg.strength
        )
        self.audit: list[dict] = []
        self._input = image
        self._primary = primary.data
        self._union = primary.data | secondary.data
        self._rng = np.random.default_rng(cfg.seed)
        self._x = self._rng.standard_normal(image.data.shape)
        self._step = 0

    @property
    def steps_completed(self) -> int:
        return self._step

    @property
    def finished(self) -> bool:
        return self._step >= self.plan.inference_steps

    def _active(self, i: int) -> tuple[np.ndarray, str]:
        if (self.plan.inference_steps - i) > self.plan.switch_step:
            return self._primary, "primary"
        return self._union, "union"

    def run(self, until: Optional[int] = None) -> "InpaintSession":
        """Advance to step ``until`` (exclusive), default to the end."""
        total = self.plan.inference_steps
        stop = total if until is None else until
        if not self._step <= stop <= total:
            raise ValidationError(
                f"until must lie in [{self._step}, {total}], got {stop}"
            )
        ts = self.plan.timesteps
        while self._step < stop:
            i = self._step
            t = ts[i]
            t_prev = ts[i + 1] if i + 1 < total else -1
            active, label = self._active(i)
            mask3 = active[:, :, None]
            masked_input = ImageBuffer(np.where(mask3, 0.0, self._input.data))
            eps = self.denoiser(
                ImageBuffer(self._x), t, BinaryMask(active), masked_input,
                self.cfg.conditioning,
            )
            if eps.data.shape != self._x.shape:
                raise ShapeMismatchError(
                    f"denoiser returned shape {eps.data.shape}, "
                    f"expected {self._x.shape}"
                )
            stepped = ddim_step(ImageBuffer(self._x), eps, t, t_prev, self.sched)
            noise = self._rng.standard_normal(self._x.shape)
            known = q_sample(self._input, t_prev, ImageBuffer(noise), self.sched)
            self._x = np.where(mask3, stepped.data, known.data)
            self.audit.append({"t": int(t), "active_mask": label})
            self._step += 1
        return self

    def result(self) -> ImageBuffer:
        """Clamp, then restore everything outside the union mask bit-exactly."""
        if not self.finished:
            raise ValidationError(
                f"inpainting not finished: {self._step}/{self.plan.inference_steps}"
            )
        clamped = np.clip(self._x, -1.0, 1.0)
        out = np.where(self._union[:, :, None], clamped, self._input.data)
        return ImageBuffer(out)


def multiregional_inpaint(
    image: ImageBuffer,
    regions: RegionPair,
    cfg: InpaintConfig,
    denoiser: Denoiser,
    sched: NoiseSchedule,
    audit: Optional[list] = None,
) -> ImageBuffer:
    """Denoise the primary region first, widening to the union at the switch step."""
    session = InpaintSession(
        image, regions.primary, regions.secondary, cfg, denoiser, sched
    )
    session.run()
    if audit is not None:
        audit.extend(session.audit)
    return session.result()


def single_mask_inpaint(
    image: ImageBuffer,
    mask: BinaryMask,
    cfg: InpaintConfig,
    denoiser: Denoiser,
    sched: NoiseSchedule,
    audit: Optional[list] = None,
) -> ImageBuffer:
    """The loop degenerated to one phase: the active mask never changes."""
    empty = BinaryMask(np.zeros_like(mask.data))
    session = InpaintSession(image, mask, empty, cfg, denoiser, sched)
    session.run()
    if audit is not None:
        audit.extend(session.audit)
    return session.result()


def resample_image_nearest(
    img: ImageBuffer, new_width: int, new_height: int
) -> ImageBuffer:
    """Nearest-neighbor image resampling at destination pixel centers."""
    if new_width < 1 or new_height < 1:
        raise ValidationError(
            f"target dimensions must be >= 1, got {new_width}x{new_height}"
        )
    if new_width == img.width and new_height == img.height:
        return img
    rows = _nearest_indices(img.height, new_height)
    cols = _nearest_indices(img.width, new_width)
    return ImageBuffer(img.data[np.ix_(rows, cols)])


def _nearest_indices(src: int, dst: int) -> np.ndarray:
    idx = ((np.arange(dst) + 0.5) * (src / dst)).astype(np.int64)
    return np.minimum(idx, src - 1)


def read_image_png(path) -> ImageBuffer:
    """Load an 8-bit grayscale or RGB PNG, mapped linearly to [-1, 1]."""
    with Image.open(path) as img:
        if img.mode == "L":
            arr = np.asarray(img)[:, :, None]
        else:
            arr = np.asarray(img.convert("RGB"))
    return ImageBuffer(arr.astype(np.float64) / 127.5 - 1.0)


def write_image_png(img: ImageBuffer, path) -> None:
    """Save to 8-bit PNG via the inverse of the load mapping."""
    arr = np.clip(np.round((img.data + 1.0) * 127.5), 0, 255).astype(np.uint8)
    if img.channels == 1:
        Image.fromarray(arr[:, :, 0], mode="L").save(path, format="PNG")
    else:
        Image.fromarray(arr, mode="RGB").save(path, format="PNG")
