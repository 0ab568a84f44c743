//! Pipeline orchestration and report rendering behind the `vecmkit` binary.

pub mod config;
pub mod num;
pub mod pipeline;
pub mod plot;
pub mod report;

pub use config::{ConfigError, PipelineConfig};
pub use pipeline::{run_pipeline, write_outputs, RunOptions, OUTPUT_FILES};
pub use plot::{plot_trends, PlotError};
pub use report::{render_report, Format, Report};
