pub mod attack;
pub mod devs;
pub mod effects;
pub mod expr;
pub mod lexer;
pub mod process;
pub mod report;
pub mod scenario;
pub mod time;
pub mod value;

/// Exact rational simulation time.
pub type Time = num_rational::Ratio<i64>;
