pub mod checker;
pub mod cli;
pub mod corpus;
pub mod error;
pub mod level;
pub mod meta;
pub mod nbe;
pub mod parser;
pub mod pretty;
pub mod rewrite;
pub mod rgph;
pub mod signature;
pub mod syntax;
