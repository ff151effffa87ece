//! Configuration, CSV and SVG emitters, and the command-line driver.

pub mod cli;
pub mod config;
pub mod plot;
pub mod table;

pub use config::{parse_config, RunConfig};
pub use plot::{emit_flow_svg, render_flow_svg};
pub use table::{emit_flow_csv, read_flow_csv, write_flow_csv, FLOW_CSV_HEADER};
