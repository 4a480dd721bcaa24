pub mod bound;
pub mod cli;
pub mod error;
pub mod group;
pub mod metric;
pub mod rational;
pub mod sample;
pub mod stable_norm;
pub mod verify;
pub mod words;
