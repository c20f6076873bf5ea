//! File formats, SVG renderers and the `ghsom` command-line tool built on
//! [`ghsom_core`].

pub mod cli;
pub mod error;
pub mod fsx;
pub mod json;
pub mod render;
pub mod table;
