pub mod cli;
pub mod exactla;
pub mod hopf;
pub mod hopfomod;
pub mod kzero;
pub mod hmod;
pub mod modalg;
pub mod resolve_derived;
pub mod sample;
