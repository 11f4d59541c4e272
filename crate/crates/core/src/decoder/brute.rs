use crate::decoder::{DecodeResult, OpCount};
use crate::error::{Error, Result};
use crate::lattice::{Constellation, RealLattice};

/// Exhaustive search is refused at or beyond this many candidates.
pub const BRUTE_FORCE_CAP: u128 = 1 << 24;

/// `|Ω|^{2N}`.
pub fn brute_force_candidates(n: usize, c: &Constellation) -> u128 {
    (c.size() as u128).saturating_pow(2 * n as u32)
}

pub fn check_brute_force(n: usize, c: &Constellation) -> Result<()> {
    let candidates = brute_force_candidates(n, c);
    if candidates >= BRUTE_FORCE_CAP {
        return Err(Error::SearchSpaceTooLarge {
            candidates,
            cap: BRUTE_FORCE_CAP,
        });
    }
    Ok(())
}

/// Minimizes `‖y − H̄·x‖²` over every `x ∈ Ω^{2N}` by enumeration.
///
/// Works on the unrotated lattice, so it shares no code path with the tree
/// search. Ties keep the lexicographically smallest candidate (dimension 0
/// most significant, alphabet order ascending).
pub fn ml_brute_force(lat: &RealLattice, c: &Constellation) -> Result<DecodeResult> {
    let dim = lat.dim();
    check_brute_force(dim / 2, c)?;
    let omega = c.omega();
    let q = omega.len();

    let mut idx = vec![0usize; dim];
    let mut best = idx.clone();
    let mut best_w = f64::INFINITY;
    let mut candidates = 0u64;
    loop {
        candidates += 1;
        let mut w = 0.0;
        for i in 0..dim {
            let mut e = lat.y[i];
            for k in 0..dim {
                e -= lat.hbar[(i, k)] * omega[idx[k]];
            }
            w += e * e;
        }
        if w < best_w {
            best_w = w;
            best.copy_from_slice(&idx);
        }

        // odometer, last dimension fastest
        let mut pos = dim;
        loop {
            if pos == 0 {
                let d = dim as u64;
                let ops = OpCount {
                    real_mults: candidates * (d * d + d),
                    real_adds: candidates * (d * d + d - 1),
                    visited_nodes: candidates,
                    restarts: 0,
                };
                return Ok(DecodeResult {
                    xhat: best.iter().map(|&s| omega[s]).collect(),
                    symbols: best,
                    weight: best_w,
                    ops,
                });
            }
            pos -= 1;
            idx[pos] += 1;
            if idx[pos] < q {
                break;
            }
            idx[pos] = 0;
        }
    }
}
