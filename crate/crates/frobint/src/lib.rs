pub mod density;
pub mod ffield;
pub mod linalg;
pub mod parser;
pub mod localint;
pub mod pseries;
pub mod sslocus;
pub mod surface;
pub mod verify;
