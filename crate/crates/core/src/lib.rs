pub mod analysis;
pub mod benchgen;
pub mod chase;
pub mod cli;
pub mod model;
pub mod parser;
pub mod query;
