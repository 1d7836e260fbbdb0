//! Zeta values over function fields: ramified series, curve expansions,
//! shtuka functions, Drinfeld modules and special functions.

pub mod error;
pub mod curve;
pub mod drinfeld;
pub mod field;
pub mod ideal;
pub mod linalg;
pub mod loc;
pub mod series;
pub mod shtuka;
pub mod special;
pub mod tate;
pub mod zeta;

pub use error::{Error, FieldError, Result, SeriesError};
pub use curve::{AElem, CurveDatum, KElem};
pub use field::{Fq, FqElem};
pub use ideal::IdealHandle;
pub use series::{Exp, Prec, RamSeries};
pub use tate::TateSeries;
