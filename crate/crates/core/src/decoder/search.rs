use crate::decoder::{CheckTable, DecodeResult, Features, OpCount};
use crate::lattice::{Constellation, QrFactors};

/// Per-channel search state for depth-first sphere decoding.
///
/// Built once per channel realization (the check-table is part of it) and
/// reused for every symbol of the burst. Exclusively owned during a decode.
#[derive(Debug, Clone)]
pub struct SearchContext<'a> {
    qr: &'a QrFactors,
    omega: Vec<f64>,
    table: Option<CheckTable>,
    features: Features,
    dim: usize,
    /// Row-major copy of `R`.
    r: Vec<f64>,
    /// Off-diagonal columns of each row that enter the evaluation.
    terms: Vec<Vec<usize>>,
    /// Layers whose children do not depend on the parent's symbol.
    reusable: Vec<bool>,
    ybar: Vec<f64>,
    radius_sq: f64,
    path: Vec<usize>,
    m_stack: Vec<f64>,
    /// Child partial weights from the last evaluation at each layer. For
    /// reusable layers this doubles as the sibling cache.
    partial: Vec<f64>,
    cumulative: Vec<f64>,
    next: Vec<usize>,
    /// Stamp of the current symbol at each layer; `epoch[dim]` is the root.
    epoch: Vec<u64>,
    /// Grandparent stamp the cached partial weights at each layer belong to.
    sibling_epoch: Vec<u64>,
    clock: u64,
    ops: OpCount,
}

impl<'a> SearchContext<'a> {
    pub fn new(qr: &'a QrFactors, c: &Constellation, features: Features) -> Self {
        let dim = qr.dim();
        let q = c.size();
        let table = features.table.then(|| CheckTable::build(qr, c));
        let r: Vec<f64> = (0..dim)
            .flat_map(|i| (0..dim).map(move |j| (i, j)))
            .map(|(i, j)| qr.r[(i, j)])
            .collect();
        let terms = (0..dim)
            .map(|i| {
                (i + 1..dim)
                    .filter(|&k| !features.table || !qr.is_zero(i, k))
                    .collect()
            })
            .collect();
        let reusable = (0..dim)
            .map(|i| i + 2 <= dim && qr.is_zero(i, i + 1))
            .collect();
        Self {
            qr,
            omega: c.omega().to_vec(),
            table,
            features,
            dim,
            r,
            terms,
            reusable,
            ybar: vec![0.0; dim],
            radius_sq: 0.0,
            path: vec![0; dim],
            m_stack: vec![0.0; dim],
            partial: vec![0.0; dim * q],
            cumulative: vec![0.0; dim * q],
            next: vec![0; dim],
            epoch: vec![0; dim + 1],
            sibling_epoch: vec![0; dim],
            clock: 0,
            ops: OpCount::default(),
        }
    }

    pub fn qr(&self) -> &QrFactors {
        self.qr
    }

    pub fn features(&self) -> Features {
        self.features
    }

    pub fn table(&self) -> Option<&CheckTable> {
        self.table.as_ref()
    }

    /// Per-burst cost of building the check-table (zero without one).
    pub fn preprocessing_cost(&self) -> OpCount {
        self.table
            .as_ref()
            .map(CheckTable::build_cost)
            .unwrap_or_default()
    }

    pub fn radius_sq(&self) -> f64 {
        self.radius_sq
    }

    /// Running totals over every expansion performed by this context.
    pub fn ops(&self) -> OpCount {
        self.ops
    }

    /// Whether children at `layer` are computed once per grandparent.
    pub fn reuses_siblings(&self, layer: usize) -> bool {
        self.features.reuse && self.reusable[layer]
    }

    /// Residual `ȳ_i − Σ_{k>i} r(i,k)·x_k` from the last cached evaluation at
    /// `layer`; only meaningful with `mcache`.
    pub fn m_value(&self, layer: usize) -> f64 {
        self.m_stack[layer]
    }

    /// Child partial weights from the last expansion at `layer`.
    pub fn partial_weights(&self, layer: usize) -> &[f64] {
        let q = self.omega.len();
        &self.partial[layer * q..(layer + 1) * q]
    }

    /// Starts a fresh search pass: loads `ybar`, sets the radius and
    /// invalidates every cache.
    pub fn begin(&mut self, ybar: &[f64], radius_sq: f64) {
        assert_eq!(ybar.len(), self.dim, "observation has the wrong dimension");
        self.ybar.copy_from_slice(ybar);
        self.radius_sq = radius_sq;
        for e in self.epoch.iter_mut() {
            self.clock += 1;
            *e = self.clock;
        }
    }

    /// Fixes the symbol at `layer` on the current path.
    #[inline]
    pub fn set_symbol(&mut self, layer: usize, symbol: usize) {
        self.path[layer] = symbol;
        self.clock += 1;
        self.epoch[layer] = self.clock;
    }

    /// Visits every child at `layer` of the current parent (whose path is
    /// fixed on layers above) and returns their cumulative weights in
    /// ascending alphabet order.
    pub fn expand_children(&mut self, layer: usize, parent_weight: f64) -> &[f64] {
        let q = self.omega.len();
        self.ops.visited_nodes += q as u64;

        let reuse = self.reuses_siblings(layer);
        if !(reuse && self.sibling_epoch[layer] == self.epoch[layer + 2]) {
            self.evaluate_partials(layer);
            if reuse {
                self.sibling_epoch[layer] = self.epoch[layer + 2];
            }
        }

        let base = layer * q;
        for s in 0..q {
            self.cumulative[base + s] = parent_weight + self.partial[base + s];
        }
        &self.cumulative[base..base + q]
    }

    #[inline]
    fn product(&self, i: usize, k: usize, symbol: usize) -> f64 {
        match &self.table {
            Some(t) => t
                .lookup(i, k, symbol)
                .expect("check-table has no entry for a consumed product"),
            None => self.r[i * self.dim + k] * self.omega[symbol],
        }
    }

    fn evaluate_partials(&mut self, layer: usize) {
        let q = self.omega.len();
        let base = layer * q;
        let t = self.terms[layer].len() as u64;
        let direct = self.table.is_none();

        if self.features.mcache {
            let mut m = self.ybar[layer];
            for &k in &self.terms[layer] {
                m -= self.product(layer, k, self.path[k]);
            }
            self.m_stack[layer] = m;
            for s in 0..q {
                let d = m - self.product(layer, layer, s);
                self.partial[base + s] = d * d;
            }
            self.ops.real_adds += t + q as u64;
            self.ops.real_mults += if direct { t + 2 * q as u64 } else { q as u64 };
        } else {
            for s in 0..q {
                let mut d = self.ybar[layer];
                for &k in &self.terms[layer] {
                    d -= self.product(layer, k, self.path[k]);
                }
                d -= self.product(layer, layer, s);
                self.partial[base + s] = d * d;
            }
            let q = q as u64;
            self.ops.real_adds += q * (t + 1);
            self.ops.real_mults += if direct { q * (t + 2) } else { q };
        }
    }

    /// Depth-first search for the minimizer of `‖ȳ − R·x‖²`.
    ///
    /// Children are tried in ascending alphabet order; a node is pruned when
    /// its weight reaches the current radius. Each leaf inside the sphere
    /// shrinks the radius to its weight. If a pass finds nothing the radius
    /// is doubled and the search restarts, with all work accumulated.
    pub fn decode(&mut self, ybar: &[f64], radius_sq: f64) -> DecodeResult {
        assert!(radius_sq > 0.0, "initial radius must be positive");
        let start = self.ops;
        let q = self.omega.len();
        let top = self.dim - 1;
        let mut best = vec![0; self.dim];
        let mut radius = radius_sq;

        loop {
            self.begin(ybar, radius);
            let mut found = false;
            self.expand_children(top, 0.0);
            self.next[top] = 0;
            let mut layer = top;
            loop {
                let s = self.next[layer];
                if s == q {
                    if layer == top {
                        break;
                    }
                    layer += 1;
                    continue;
                }
                self.next[layer] += 1;
                let w = self.cumulative[layer * q + s];
                if w >= self.radius_sq {
                    continue;
                }
                self.set_symbol(layer, s);
                if layer == 0 {
                    self.radius_sq = w;
                    best.copy_from_slice(&self.path);
                    found = true;
                    continue;
                }
                layer -= 1;
                self.expand_children(layer, w);
                self.next[layer] = 0;
            }
            if found {
                break;
            }
            radius *= 2.0;
            self.ops.restarts += 1;
        }

        DecodeResult {
            xhat: best.iter().map(|&s| self.omega[s]).collect(),
            symbols: best,
            weight: self.radius_sq,
            ops: self.ops - start,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{make_constellation, qr_factor, to_interleaved_real, ComplexChannel, C64};

    fn fixture(n: usize) -> QrFactors {
        let data: Vec<C64> = (0..n * n)
            .map(|k| C64::new((k as f64 * 0.9 + 0.3).sin(), (k as f64 * 1.7).cos()))
            .collect();
        let ch = ComplexChannel::from_row_slice(n, &data).unwrap();
        qr_factor(&to_interleaved_real(&ch, &vec![C64::new(0.0, 0.0); n]).unwrap()).unwrap()
    }

    #[test]
    fn single_layer_unit_example() {
        // r = I (N=1 interleaved with h = 1), ȳ = 0: |0 − 1·x|² = 1 for x = ±1
        let ch = ComplexChannel::from_row_slice(1, &[C64::new(1.0, 0.0)]).unwrap();
        let qr = qr_factor(&to_interleaved_real(&ch, &[C64::new(0.0, 0.0)]).unwrap()).unwrap();
        let c = make_constellation(4).unwrap();
        let mut ctx = SearchContext::new(&qr, &c, Features::ALL);
        ctx.begin(&[0.0, 0.0], 10.0);
        let w = ctx.expand_children(1, 0.0).to_vec();
        assert_eq!(w, vec![1.0, 1.0]);
        assert_eq!(ctx.m_value(1), 0.0);
    }

    #[test]
    fn noiseless_decode_is_exact() {
        let qr = fixture(2);
        let c = make_constellation(16).unwrap();
        let x_idx = [0, 3, 1, 2];
        let x: Vec<f64> = x_idx.iter().map(|&i| c.omega()[i]).collect();
        let ybar: Vec<f64> = (0..4)
            .map(|i| (0..4).map(|k| qr.r[(i, k)] * x[k]).sum())
            .collect();
        for f in [Features::NONE, Features::ALL] {
            let mut ctx = SearchContext::new(&qr, &c, f);
            let res = ctx.decode(&ybar, 1.0);
            assert_eq!(res.symbols, x_idx);
            assert_eq!(res.xhat, x);
            assert!(res.weight < 1e-20);
            assert_eq!(res.ops.restarts, 0);
            // every visited node on the true path has zero partial weight
            for (layer, &s) in x_idx.iter().enumerate() {
                assert!(ctx.partial_weights(layer)[s] < 1e-20);
            }
        }
    }

    #[test]
    fn tiny_radius_restarts_until_a_point_is_found() {
        let qr = fixture(2);
        let c = make_constellation(4).unwrap();
        let ybar = vec![10.0, -3.0, 4.0, 7.0];
        let mut ctx = SearchContext::new(&qr, &c, Features::ALL);
        let res = ctx.decode(&ybar, 1e-6);
        assert!(res.ops.restarts > 0);
        assert!(res.weight < 1e-6 * 2f64.powi(res.ops.restarts as i32));
        let mut plain = SearchContext::new(&qr, &c, Features::NONE);
        let again = plain.decode(&ybar, 1e-6);
        assert_eq!(again.symbols, res.symbols);
        assert_eq!(again.ops.restarts, res.ops.restarts);
    }

    #[test]
    fn reuse_only_on_structural_zero_layers() {
        let qr = fixture(2);
        let c = make_constellation(4).unwrap();
        let ctx = SearchContext::new(&qr, &c, Features::ALL);
        assert_eq!(
            (0..4).map(|l| ctx.reuses_siblings(l)).collect::<Vec<_>>(),
            vec![true, false, true, false]
        );
        let off = SearchContext::new(&qr, &c, Features::NONE);
        assert!((0..4).all(|l| !off.reuses_siblings(l)));
        assert_eq!(off.preprocessing_cost(), OpCount::default());
        assert_eq!(ctx.preprocessing_cost().real_mults, 8);
    }
}
