pub mod algebra;
pub mod commprob;
pub mod constructions;
pub mod egyptian;
pub mod exec;
pub mod rational;
pub mod survey;

pub use rational::Rational;
