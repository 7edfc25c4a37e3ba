//! Library side of the `tscalc` command: the expression language, its
//! evaluation on a time scale, and the command verbs.

pub mod app;
pub mod bind;
pub mod expr;
