//! Lorentz-lattice geometry of elliptic K3 Picard lattices and the
//! Néron–Tate pairing on the fibers.
//!
//! Lattice code is generic over [`Scalar`]; the aliases below fix the exact
//! rational instantiation used for identity checks and the `f64` one used for
//! charts and rendering.

pub mod curve;
pub mod error;
pub mod frame;
pub mod heights;
pub mod hyperbolic;
pub mod involution;
pub mod lattice;
pub mod linalg;
pub mod render;
pub mod scalar;
pub mod translation;

pub use curve::{CurveQ, HeightConfig, Pencil, PointQ};
pub use error::{Error, Result};
pub use frame::{frame_from_json, Decomposition, FibrationFrame, ValidationReport};
pub use heights::{FiberPoint, SyntheticFibration};
pub use hyperbolic::{BallChart, BoundaryClass, EuclideanChart};
pub use involution::{sigma0_pullback, sigma_i_pullback, tau_pushforward};
pub use lattice::{form_from_json, DualBasis, IntersectionForm, LatticeVector, Signature};
pub use linalg::Matrix;
pub use render::{Model, RenderOptions, WallCircle};
pub use scalar::{Rational, Scalar};
pub use translation::{section_translate, translation, Isometry};

pub type Form = IntersectionForm<Rational>;
pub type Vector = LatticeVector<Rational>;
pub type Frame = FibrationFrame<Rational>;
pub type ExactIsometry = Isometry<Rational>;
pub type FormF64 = IntersectionForm<f64>;
pub type VectorF64 = LatticeVector<f64>;
pub type FrameF64 = FibrationFrame<f64>;
pub type Synthetic = SyntheticFibration<Rational>;
