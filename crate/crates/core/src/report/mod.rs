//! CSV results, complexity gains and SVG charts.

mod csv_io;
mod gains;
mod svg;

pub use csv_io::{parse_csv, read_csv, render_csv, rows_from_records, write_csv, CsvRow, CSV_HEADER};
pub use gains::{compute_gains, GainPoint, GainSummary};
pub use svg::{emit_svg, render_svg, Metric};

/// Renders `v` with six significant digits in the shortest form that parses
/// back to the same rounded value.
pub fn fmt_sig6(v: f64) -> String {
    if v == 0.0 {
        return "0".to_string();
    }
    let rounded: f64 = format!("{v:.5e}").parse().expect("formatted float parses");
    format!("{rounded}")
}
