pub mod acceptance;
pub mod exact;
pub mod exponents;
pub mod latticeflow;
pub mod scanner;
pub mod slopes;
