//! File formats: binary PGM images and CSV tables.

pub mod pgm;
pub mod table;
