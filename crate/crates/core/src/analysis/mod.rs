//! Finite-difference diagnostics of sampled hypersurfaces: fundamental
//! forms, relative nullity, position tangency, totally geodesic points and
//! orbit-based tests for rotation structure.

mod forms;
mod orbits;

pub use forms::{
    fundamental_forms, intrinsic_curvature_2d, nullity_report, position_tangency, relative_nullity, stencil_nodes,
    strictly_convex_nodes, totally_geodesic_points, CurvatureSample, GeodesicScan, NullityReport, Tangency,
};
pub use orbits::{
    orbit_sectional_curvatures, orbit_umbilicity, rotation_structure_report, ConditionResult, OrbitUmbilicity,
    RotationCondition, RotationOptions, RotationStructureReport, DEFAULT_UMBILIC_TOL,
};
