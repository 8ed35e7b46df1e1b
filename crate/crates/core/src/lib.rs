//! Proof nets for unbounded-arity multiplicative linear logic, their parallel
//! normalization, and the two-way correspondence with Boolean circuits.

pub mod circuits;
pub mod gen;
pub mod netcore;
pub mod netsim;
pub mod pieces;
pub mod rewrite;
pub mod translate;
pub mod typing;
