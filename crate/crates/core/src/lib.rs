pub mod bench;
pub mod cli;
pub mod count;
pub mod ff;
pub mod kronecker;
pub mod linalg;
pub mod mpoly;
pub mod progequiv;
pub mod zeta;
