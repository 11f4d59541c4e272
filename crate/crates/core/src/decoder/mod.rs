//! Depth-first sphere decoding and the exhaustive ML reference.
//!
//! Layers are indexed from `0` (leaf) to `2N-1` (first decided symbol), so
//! layer `i` here is layer `i+1` in the usual 1-based tree notation. Odd
//! 1-based layers are the even indices.
//!
//! # Counting contract
//!
//! Expanding a parent at layer `i+1` visits all `|Ω|` children at layer `i`.
//! Let `t` be the number of off-diagonal terms of row `i` that enter the
//! evaluation: every `k > i` without the check-table, only the nonzero ones
//! with it.
//!
//! | variant            | per parent          | per child                               |
//! |--------------------|---------------------|-----------------------------------------|
//! | direct             | –                   | `t+2` mults, `t+1` adds                 |
//! | table              | –                   | `1` mult, `t+1` adds                    |
//! | mcache             | `t` mults, `t` adds | `2` mults, `1` add                      |
//! | table + mcache     | `t` adds            | `1` mult, `1` add                       |
//!
//! With sibling reuse, a layer whose `r(i,i+1)` is a structural zero computes
//! its child partial weights once per grandparent; later parents under the same
//! grandparent replay them at no cost.
//!
//! `real_adds` covers partial-weight arithmetic only. Accumulating a child's
//! weight onto its parent's costs one more addition per visited node, so the
//! total including it is `real_adds + visited_nodes`.

mod brute;
mod count;
mod search;
mod table;

use std::fmt;
use std::str::FromStr;

pub use brute::{brute_force_candidates, check_brute_force, ml_brute_force, BRUTE_FORCE_CAP};
pub use count::OpCount;
pub use search::SearchContext;
pub use table::CheckTable;

use crate::error::{Error, Result};

/// Complexity-reduction techniques applied by a [`SearchContext`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Features {
    /// Resolve `r(i,j)·x` through a [`CheckTable`].
    pub table: bool,
    /// Compute the child-independent residual once per parent.
    pub mcache: bool,
    /// Replay sibling partial weights across parents at layers whose
    /// `r(i,i+1)` is a structural zero.
    pub reuse: bool,
}

impl Features {
    pub const NONE: Features = Features {
        table: false,
        mcache: false,
        reuse: false,
    };

    pub const ALL: Features = Features {
        table: true,
        mcache: true,
        reuse: true,
    };
}

impl FromStr for Features {
    type Err = Error;

    /// Comma-separated subset of `table,mcache,reuse`, or `all` / `none`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        match s {
            "all" => return Ok(Features::ALL),
            "none" | "" => return Ok(Features::NONE),
            _ => {}
        }
        let mut f = Features::NONE;
        for part in s.split(',').map(str::trim) {
            match part {
                "table" => f.table = true,
                "mcache" => f.mcache = true,
                "reuse" => f.reuse = true,
                other => {
                    return Err(Error::InvalidConfig(format!(
                        "unknown feature `{other}` (expected table, mcache or reuse)"
                    )))
                }
            }
        }
        Ok(f)
    }
}

impl fmt::Display for Features {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<&str> = [
            (self.table, "table"),
            (self.mcache, "mcache"),
            (self.reuse, "reuse"),
        ]
        .iter()
        .filter(|(on, _)| *on)
        .map(|(_, n)| *n)
        .collect();
        if names.is_empty() {
            f.write_str("none")
        } else {
            f.write_str(&names.join(","))
        }
    }
}

/// Outcome of one decode.
#[derive(Debug, Clone, PartialEq)]
pub struct DecodeResult {
    /// Alphabet index of each real dimension, in the lattice's ordering.
    pub symbols: Vec<usize>,
    /// `omega[symbols[i]]`.
    pub xhat: Vec<f64>,
    /// Squared distance of the returned point.
    pub weight: f64,
    pub ops: OpCount,
}
