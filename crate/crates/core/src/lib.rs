pub mod error;
pub mod estimators;
pub mod risk;
pub mod rng;
pub mod subspace;
pub mod sweep;
pub mod curve_csv;
pub mod powerlaw;
pub mod plot;
pub mod cli;
