//! Certified parallel-set areas of the planar lattice Cantor dusts `C^r`.
//!
//! `C^r` is the attractor of four homotheties with ratio `1/r` fixing the
//! corners of the unit square. The crate provides
//!
//! * the system itself and its construction geometry ([`ifs`]),
//! * interval enclosures of the distance to `C^r` ([`distance`]),
//! * quadtree enclosures of `λ²(C^r_eps ∩ region)` ([`volume`]),
//! * closed-form bounds along null sequences of radii ([`bounds`]),
//! * verification campaigns built from the above ([`analysis`]).

pub mod analysis;
pub mod bounds;
pub mod distance;
pub mod error;
pub mod ifs;
pub mod interval;
pub mod volume;

pub use analysis::{
    oscillation_scan, pluriphase_polynomial_solve, pluriphase_recursion_check, scan_inequality,
    FamilyPair, OscillationReport, PolynomialSolution, Precision, RecursionVariant, ScanReport,
    Verdict,
};
pub use distance::{classify_cell, distance_to_attractor, CellClass, DistanceOracle, DistanceResult};
pub use error::{Error, Result};
pub use ifs::{build_cantor_dust, minkowski_dimension, CantorDustParams, SelfSimilarSystem, Similarity, Square, Word};
pub use interval::IntervalValue;
pub use volume::{decompose_volume, normalized_volume, volume, Region, RegionKind, VolumeResult};
