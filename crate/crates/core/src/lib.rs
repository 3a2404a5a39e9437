pub mod abstraction;
pub mod ag;
pub mod bdd;
pub mod encode;
pub mod explicit;
pub mod fixtures;
pub mod game;
pub mod model;
pub mod monitor;
pub mod resolve;
