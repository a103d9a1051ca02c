"""Underwater image degradation models, metrics, losses and parameter fitting.

Thin wrapper over the compiled extension; all operations take numpy arrays
((H, W, 3) images in [0, 1], (H, W) depth maps in meters).
"""

from ._uwsim import (  # noqa: F401
    batch_mean_weight,
    blend_turbidity,
    compose_scattered,
    degrade_classic,
    delta_accuracy,
    depth_transform,
    downsample_half,
    evaluate_pair,
    fit_water_profile,
    gauss_kernel_value,
    jerlov_preset,
    jerlov_presets,
    l1_mean,
    log10_error,
    pair_loss_fixed,
    pair_loss_weighted,
    particle_layer,
    rel_error,
    residual_compose,
    rms_error,
    rng_uniform,
    scatter_likelihood,
    scattered_radiance,
    ssim,
    ssim_loss,
    total_technique1,
    total_technique2,
    total_technique3,
    total_variant2,
    transmission,
)

__all__ = [
    "batch_mean_weight",
    "blend_turbidity",
    "compose_scattered",
    "degrade_classic",
    "delta_accuracy",
    "depth_transform",
    "downsample_half",
    "evaluate_pair",
    "fit_water_profile",
    "gauss_kernel_value",
    "jerlov_preset",
    "jerlov_presets",
    "l1_mean",
    "log10_error",
    "pair_loss_fixed",
    "pair_loss_weighted",
    "particle_layer",
    "rel_error",
    "residual_compose",
    "rms_error",
    "rng_uniform",
    "scatter_likelihood",
    "scattered_radiance",
    "ssim",
    "ssim_loss",
    "total_technique1",
    "total_technique2",
    "total_technique3",
    "total_variant2",
    "transmission",
]

__version__ = "0.1.0"
