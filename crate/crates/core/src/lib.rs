pub mod algebra;
pub mod distributions;
pub mod frontend;
pub mod engine;
pub mod solver;
pub mod invariants;
pub mod bench;
pub mod corpus;
pub mod validator;
