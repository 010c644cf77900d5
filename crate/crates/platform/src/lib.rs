//! Std side of the casino platform: configuration, the hash-chained event
//! journal, the journaled service and its HTTP routes, and the Monte-Carlo
//! simulator.

pub mod config;
pub mod error;
pub mod http;
pub mod journal;
pub mod seal;
pub mod service;
pub mod sim;

pub use config::Config;
pub use error::{ApiError, StartupError};
pub use service::{Request, Service};
