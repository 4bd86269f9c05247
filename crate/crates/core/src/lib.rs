//! Surface-code memory simulation and resource estimation for a 2.5D architecture
//! in which a 2D transmon grid sits on top of multi-mode cavity memories.

pub mod cli;
pub mod cnot_verify;
pub mod decoder;
pub mod dem;
pub mod error;
pub mod experiments;
pub mod hardware;
pub mod layout;
pub mod montecarlo;
pub mod pauli;
pub mod resources;
pub mod schedule;
pub mod tableau;

pub use error::{Error, Result};
