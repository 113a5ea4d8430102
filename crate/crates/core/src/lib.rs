pub mod acceptance;
pub mod checker;
pub mod corpus;
pub mod infer;
pub mod json;
pub mod parse;
pub mod pseudo;
pub mod reduce;
pub mod term;
pub mod types;
pub mod unify;

#[cfg(test)]
mod testing;
