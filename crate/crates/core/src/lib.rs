pub mod casework;
pub mod cli;
pub mod domain;
pub mod dominance;
pub mod error;
pub mod expr;
pub mod func;
pub mod master;
pub mod num;
pub mod omap;
pub mod parse;
pub mod preorder;
pub mod proofcheck;
pub mod properties;
