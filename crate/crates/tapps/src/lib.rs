//! TAPPS: a SQL-flavored command shell for slicing rectangular data frames
//! and feeding them to analysis plugins.
//!
//! The pipeline: script or prompt lines are preprocessed (`@include`),
//! parsed into statements, compiled to bytecodes, and executed by a small
//! virtual machine that owns the session (frames, parameter sets, plugins)
//! and the environment (cwd, separator, display flags).

pub mod bytecode;
pub mod dataframe;
pub mod language;
pub mod persistence;
pub mod plugin;
pub mod shell;
pub mod value;
pub mod vm;
