pub mod cfexpr;
pub mod data;
pub mod scm;
pub mod decomp;
pub mod estimate;
pub mod infer;
pub mod cli;
