//! The command language: preprocessing, lexing, parsing, and the AST.

pub mod ast;
pub mod lexer;
pub mod parser;
pub mod preprocess;

pub use ast::Statement;
pub use parser::{parse, parse_statement, ParseError};
pub use preprocess::{load_script, preprocess, PreprocessError, ScriptSource};
