use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::report::fmt_sig6;
use crate::sim::TrialRecord;

pub const CSV_HEADER: &str = "snr_db,decoder,modulation,n,avg_mults,avg_adds,avg_visited,avg_restarts,ser,ver,trials,preprocessing_mults_per_burst";

/// One `(SNR, decoder)` line of the results file.
#[derive(Debug, Clone, PartialEq)]
pub struct CsvRow {
    pub snr_db: f64,
    pub decoder: String,
    pub modulation: usize,
    pub n: usize,
    pub avg_mults: f64,
    pub avg_adds: f64,
    pub avg_visited: f64,
    pub avg_restarts: f64,
    pub ser: f64,
    pub ver: f64,
    pub trials: u64,
    pub preprocessing_mults_per_burst: f64,
}

pub fn rows_from_records(records: &[TrialRecord]) -> Vec<CsvRow> {
    records
        .iter()
        .flat_map(|rec| {
            rec.tallies.iter().map(move |t| CsvRow {
                snr_db: rec.snr_db,
                decoder: t.kind.name().to_string(),
                modulation: rec.modulation,
                n: rec.n,
                avg_mults: t.avg_mults(),
                avg_adds: t.avg_adds(),
                avg_visited: t.avg_visited(),
                avg_restarts: t.avg_restarts(),
                ser: t.ser(),
                ver: t.ver(),
                trials: t.decodes,
                preprocessing_mults_per_burst: t.preprocessing_mults_per_burst(),
            })
        })
        .collect()
}

fn sorted(rows: &[CsvRow]) -> Vec<&CsvRow> {
    let mut out: Vec<&CsvRow> = rows.iter().collect();
    out.sort_by(|a, b| {
        a.snr_db
            .total_cmp(&b.snr_db)
            .then_with(|| a.decoder.cmp(&b.decoder))
    });
    out
}

/// Header plus one LF-terminated line per row, sorted by `(snr_db, decoder)`.
pub fn render_csv(rows: &[CsvRow]) -> Result<String> {
    if rows.is_empty() {
        return Err(Error::EmptyRecords);
    }
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in sorted(rows) {
        let fields = [
            fmt_sig6(r.snr_db),
            r.decoder.clone(),
            r.modulation.to_string(),
            r.n.to_string(),
            fmt_sig6(r.avg_mults),
            fmt_sig6(r.avg_adds),
            fmt_sig6(r.avg_visited),
            fmt_sig6(r.avg_restarts),
            fmt_sig6(r.ser),
            fmt_sig6(r.ver),
            r.trials.to_string(),
            fmt_sig6(r.preprocessing_mults_per_burst),
        ];
        out.push_str(&fields.join(","));
        out.push('\n');
    }
    Ok(out)
}

pub fn write_csv(rows: &[CsvRow], path: impl AsRef<Path>) -> Result<()> {
    let text = render_csv(rows)?;
    fs::write(path, text)?;
    Ok(())
}

pub fn parse_csv(text: &str) -> Result<Vec<CsvRow>> {
    let mut reader = csv::ReaderBuilder::new().from_reader(text.as_bytes());
    let header: Vec<&str> = reader.headers()?.iter().collect::<Vec<_>>();
    if header.join(",") != CSV_HEADER {
        return Err(Error::Parse(format!("unexpected header `{}`", header.join(","))));
    }
    let mut rows = Vec::new();
    for (line, rec) in reader.records().enumerate() {
        let rec = rec?;
        let field = |i: usize| rec.get(i).unwrap_or_default();
        let float = |i: usize| -> Result<f64> {
            field(i)
                .parse()
                .map_err(|_| Error::Parse(format!("row {}: bad number `{}`", line + 1, field(i))))
        };
        let int = |i: usize| -> Result<u64> {
            field(i)
                .parse()
                .map_err(|_| Error::Parse(format!("row {}: bad integer `{}`", line + 1, field(i))))
        };
        rows.push(CsvRow {
            snr_db: float(0)?,
            decoder: field(1).to_string(),
            modulation: int(2)? as usize,
            n: int(3)? as usize,
            avg_mults: float(4)?,
            avg_adds: float(5)?,
            avg_visited: float(6)?,
            avg_restarts: float(7)?,
            ser: float(8)?,
            ver: float(9)?,
            trials: int(10)?,
            preprocessing_mults_per_burst: float(11)?,
        });
    }
    Ok(rows)
}

pub fn read_csv(path: impl AsRef<Path>) -> Result<Vec<CsvRow>> {
    parse_csv(&fs::read_to_string(path)?)
}
