//! Polarity-based semantics and correspondence for substructural logics.

pub mod acceptance;
pub mod bitset;
pub mod correspondence;
pub mod frame;
pub mod limits;
pub mod order;
pub mod duality;
pub mod report;
pub mod sample;
pub mod semantics;
pub mod syntax;
