//! Group-invariant hypersurfaces `G(L)` from Weyl-invariant profiles `L` in a
//! section: general sweeps, rotation and multi-rotational hypersurfaces, and
//! rotation realizations of warped products.

mod blocks;
mod profile;
mod sweep;
mod warped;

pub use blocks::{
    block_chart, block_section, chamber_walls, multi_rotational, prepare_profile, rotation_chart,
    rotation_hypersurface, BlockHypersurface, BlockOptions, Completion, PreparedProfile, WallContact,
};
pub use profile::{
    boundary_smoothness_check, check_weyl_invariance, graph_evenness, scalar_graph_evenness, EvennessOptions,
    EvennessReport, ProfileHypersurface, ProfileSample, WeylInvarianceReport,
};
pub use sweep::{
    equivariance_check, point_set_equivariance, sample_group, section_slice_check, sweep, transversality_check,
    weyl_representatives, EquivarianceReport, SliceReport, SweepOptions, SweptHypersurface, SweptSample,
    TransversalityReport,
};
pub use warped::{
    metric_report, warped_metric_eval, warped_to_rotation, MetricOptions, MetricReport, WarpedProductSpec,
    WarpedRotation,
};
