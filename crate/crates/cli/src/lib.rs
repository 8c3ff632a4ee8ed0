//! Stream replay, oracle checking and benchmarking for the `dynlcs` command.

pub mod bench;
pub mod replay;
pub mod stream;
