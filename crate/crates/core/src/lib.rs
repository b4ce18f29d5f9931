//! Finite-energy realizations of unitary lowest-weight Virasoro
//! representations, smeared stress-energy operators for nonsmooth vector
//! fields on the circle, and experiments estimating the constants in their
//! energy bounds.

pub mod bounds;
pub mod error;
pub mod fields;
pub mod format;
pub mod linalg;
pub mod params;
pub mod partition;
pub mod piecewise;
pub mod quadrature;
pub mod rep;
pub mod scalar;
pub mod smear;
pub mod verma;

pub use bounds::{BoundReport, Verdict};
pub use error::{Error, Result};
pub use fields::{FourierField, FourierSource, MollifierFamily, NormReport};
pub use params::{CentralCharge, LowestWeight};
pub use rep::{GradedVector, Mode, RepOptions, SafeWindow, TruncatedRep};
pub use piecewise::{build_piecewise_mobius, Corner, PiecewiseMobiusField};
pub use partition::{enumerate_partitions, partition_count, Partition};
pub use scalar::{ComplexRational, Rational};
pub use smear::{fm_sup, heat_commutator, smear, vacuum_norm, CheckRecord, HeatCommutator, SmearedOperator};
pub use verma::{GramMatrix, LevelRank, VermaModule, VermaVector};
