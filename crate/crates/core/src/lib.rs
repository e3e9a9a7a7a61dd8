pub mod bayes;
pub mod discrimination;
pub mod error;
pub mod interferometry;
pub mod linalg;
pub mod measurement;
pub mod state;
pub mod weak;

pub use error::{Error, Result};
