pub mod evolve;
pub mod green;
pub mod kernel;
pub mod report;
pub mod verify;
