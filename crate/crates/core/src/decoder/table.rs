use crate::decoder::OpCount;
use crate::lattice::{Constellation, QrFactors};

/// Precomputed products `r(i,j)·x` for every nonzero upper-triangular entry
/// of `R` and every `x` in the negative half of the alphabet.
///
/// Products for positive symbols are served by negating the mirrored entry.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckTable {
    dim: usize,
    size: usize,
    half: usize,
    /// Start of the `half` products for `(i, j)` in `values`, row-major.
    offsets: Vec<Option<usize>>,
    values: Vec<f64>,
}

impl CheckTable {
    pub fn build(qr: &QrFactors, c: &Constellation) -> Self {
        let dim = qr.dim();
        let half = c.half();
        let mut offsets = vec![None; dim * dim];
        let mut values = Vec::with_capacity(qr.n_nonzero * half);
        for i in 0..dim {
            for j in i..dim {
                if qr.is_zero(i, j) {
                    continue;
                }
                offsets[i * dim + j] = Some(values.len());
                let rij = qr.r[(i, j)];
                values.extend(c.omega_neg().iter().map(|x| rij * x));
            }
        }
        Self {
            dim,
            size: c.size(),
            half,
            offsets,
            values,
        }
    }

    /// `|T| = N_R·|Ω|/2`.
    pub fn n_entries(&self) -> usize {
        self.values.len()
    }

    /// One multiplication per stored product.
    pub fn build_cost(&self) -> OpCount {
        OpCount {
            real_mults: self.n_entries() as u64,
            ..OpCount::default()
        }
    }

    pub fn contains(&self, i: usize, j: usize) -> bool {
        self.offsets[i * self.dim + j].is_some()
    }

    /// `r(i,j)·omega[symbol]`, or `None` if `r(i,j)` is zero.
    #[inline]
    pub fn lookup(&self, i: usize, j: usize, symbol: usize) -> Option<f64> {
        let base = self.offsets[i * self.dim + j]?;
        Some(if symbol < self.half {
            self.values[base + symbol]
        } else {
            -self.values[base + self.size - 1 - symbol]
        })
    }
}
