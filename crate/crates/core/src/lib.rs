pub mod checks;
pub mod error;
pub mod group;
pub mod instrument;
pub mod io;
pub mod linalg;
pub mod resources;
pub mod states;
pub mod twirl;
pub mod verify;

pub use error::{Result, SsrError};
