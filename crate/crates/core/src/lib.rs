pub mod plan;
pub mod symbolic;
pub mod topography;
pub mod transport;
pub mod tree;
pub mod weight;
