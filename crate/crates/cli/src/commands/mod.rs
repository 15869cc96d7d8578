pub mod eval;
pub mod gradcheck;
pub mod landscape;
pub mod optimize;
pub mod slabs;
