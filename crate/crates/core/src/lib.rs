pub mod config;
pub mod error;
pub mod field;
pub mod hensel;
mod linalg;
pub mod pp;
pub mod scenarios;
pub mod series;
pub mod skew;
pub mod text;

pub use config::Config;
pub use error::{Error, Result};
pub use field::{FieldElem, Tower};
pub use hensel::{AnnSet, Embedding, Eta, Solver};
pub use pp::{MatrixOverR, PPFormula, TheoryDescriptor, Triangularization, Verdict};
pub use scenarios::{Certificate, HullWitness};
pub use series::{Decomposition, SeriesElem, SeriesModel, Value};
pub use skew::{Factorization, SkewPoly, SkewRing};
