pub mod arith;
pub mod cli;
pub mod covers;
pub mod dynamics;
pub mod json;
pub mod limits;
pub mod moduli;
pub mod plumbing;
pub mod trees;
