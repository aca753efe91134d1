"""Inpainting of band-limited random fields on the sphere.

Thin wrapper over the compiled extension: spherical-harmonic synthesis and
analysis on Gauss-Legendre product grids, masked discretization, the smoothing
penalty solver with its nonmonotone proximal gradient inner loop, first-order
diagnostics, and recovery metrics.
"""

from ._core import (  # noqa: F401
    ConfigError,
    IoError,
    CoefficientVector,
    SphereGrid,
    Mask,
    DegreeWeights,
    DiscreteModel,
    NpgConfig,
    PenaltyConfig,
    SolveResult,
    KktReport,
    RecoveryReport,
    ExperimentArtifacts,
    analyze,
    build_grid,
    build_mask,
    build_model,
    coeff_dim,
    constraint_g,
    default_support_threshold,
    degree_weights,
    flat_index,
    gen_noise,
    gen_true_coeffs,
    kkt_report,
    load_model,
    normalize_config,
    observe,
    penalty_solve,
    penalty_value,
    phi_value,
    preset_mask,
    preset_mask_names,
    read_coeffs_csv,
    recovery_report,
    recovery_report_table_header,
    region_area,
    rel_err,
    render_equirect,
    run_experiment,
    save_model,
    scalar_prox,
    snr_db,
    support,
    synthesize,
    write_coeffs_csv,
    ylm,
)

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
