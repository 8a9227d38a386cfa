pub mod coarse;
pub mod models;
pub mod surgery;
pub mod track;
