//! File formats: game documents, trajectory CSV, report envelopes and plot data.

pub mod csv;
pub mod game_file;
pub mod plot;
pub mod report;

pub use csv::{read_trajectory_csv, trajectory_csv, write_trajectory_csv, CsvRow};
pub use game_file::{load_game, load_potential, parse_game, parse_potential, save_game, save_potential, GameDocument, Nested, PotentialDocument};
pub use plot::{circle_polyline, emit_plot_data, PlotFiles, CIRCLE_SEGMENTS};
pub use report::{read_report, write_json, write_report, ReportEnvelope, ARTIFACT_VERSION};
