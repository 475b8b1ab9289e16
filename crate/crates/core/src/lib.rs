//! Finite-layer Iwasawa algebra calculus.
//!
//! Everything is exact arithmetic in `Λ_n^{(M)} = (Z/p^M)[X]/((1+X)^{p^n} − 1)`:
//! theta towers and their p-stabilization, ideal equalities decided through
//! Howell normal forms, and initial Fitting ideals of presented modules. Ideal
//! statements are certified modulo `p^M` only.

pub mod arith;
pub mod cli;
pub mod error;
pub mod fitting;
pub mod formats;
pub mod ideal;
pub mod layer;
pub mod linalg;
pub mod padic;
pub mod theta;

pub use error::{Error, Result};
pub use fitting::PresentationMatrix;
pub use ideal::IdealHandle;
pub use layer::LayerElement;
pub use linalg::{howell, HowellBasis, ZModMatrix};
pub use padic::{PadicContext, PadicScalar};
pub use theta::{StabilizedTower, ThetaTower};
