pub mod decompose;
pub mod error;
pub mod families;
pub mod flows;
pub mod kernels;
pub mod measure_space;
pub mod modular;
pub mod stable;
pub mod mode;

pub use error::{Error, Result};
pub use mode::FieldMode;
