use crate::error::{Error, Result};
use crate::report::CsvRow;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GainPoint {
    pub snr_db: f64,
    /// `1 − proposed/conventional` average multiplications; `None` when the
    /// conventional count is zero.
    pub mult_gain: Option<f64>,
    pub add_gain: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct GainSummary {
    pub points: Vec<GainPoint>,
}

impl GainSummary {
    /// Gains of the `proposed` rows over the `conventional` rows of one
    /// results table.
    pub fn from_rows(rows: &[CsvRow]) -> Result<Self> {
        let pick = |name: &str| -> Vec<CsvRow> {
            let mut v: Vec<CsvRow> = rows.iter().filter(|r| r.decoder == name).cloned().collect();
            v.sort_by(|a, b| a.snr_db.total_cmp(&b.snr_db));
            v
        };
        compute_gains(&pick("conventional"), &pick("proposed"))
    }
}

fn gain(proposed: f64, conventional: f64) -> Option<f64> {
    (conventional > 0.0).then(|| 1.0 - proposed / conventional)
}

/// Pointwise gains; both slices must cover the same SNR grid in the same
/// order.
pub fn compute_gains(conventional: &[CsvRow], proposed: &[CsvRow]) -> Result<GainSummary> {
    if conventional.len() != proposed.len()
        || conventional
            .iter()
            .zip(proposed)
            .any(|(c, p)| c.snr_db != p.snr_db)
    {
        return Err(Error::GridMismatch);
    }
    let points = conventional
        .iter()
        .zip(proposed)
        .map(|(c, p)| GainPoint {
            snr_db: c.snr_db,
            mult_gain: gain(p.avg_mults, c.avg_mults),
            add_gain: gain(p.avg_adds, c.avg_adds),
        })
        .collect();
    Ok(GainSummary { points })
}
