pub mod classical;
pub mod error;
pub mod gf;
pub mod linalg;
pub mod poly;
pub mod ael;
pub mod css;
pub mod pauli;
pub mod aqecc;
pub mod sim;
pub mod io;
