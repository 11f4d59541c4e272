//! Square-QAM constellations, the complex-to-real lattice transforms and the
//! QR factorization the tree search runs on.

use nalgebra::{DMatrix, DVector};

use crate::decoder::OpCount;
use crate::error::{Error, Result};

pub type C64 = nalgebra::Complex<f64>;

/// Relative threshold below which an entry of `R` is treated as a structural
/// zero.
pub const ZERO_SNAP_TOL: f64 = 1e-10;

/// Relative threshold on `|r(i,i)|` below which the channel is rejected.
pub const RANK_TOL: f64 = 1e-12;

/// Per-dimension PAM alphabet of a square QAM constellation.
///
/// `omega` holds the odd-integer amplitudes `-(√M-1), …, -1, 1, …, √M-1` in
/// ascending order. No energy normalization is applied.
#[derive(Debug, Clone, PartialEq)]
pub struct Constellation {
    order: usize,
    omega: Vec<f64>,
    symbol_energy: f64,
}

impl Constellation {
    pub fn new(order: usize) -> Result<Self> {
        let side = match order {
            4 => 2,
            16 => 4,
            64 => 8,
            other => return Err(Error::UnsupportedModulation(other)),
        };
        let omega: Vec<f64> = (0..side)
            .map(|i| (2 * i as i64 - (side as i64 - 1)) as f64)
            .collect();
        let pos = &omega[side / 2..];
        let symbol_energy = 2.0 * pos.iter().map(|a| a * a).sum::<f64>() / pos.len() as f64;
        Ok(Self {
            order,
            omega,
            symbol_energy,
        })
    }

    /// Modulation order `M`.
    pub fn order(&self) -> usize {
        self.order
    }

    pub fn omega(&self) -> &[f64] {
        &self.omega
    }

    /// Negative half of the alphabet, ascending.
    pub fn omega_neg(&self) -> &[f64] {
        &self.omega[..self.half()]
    }

    /// Positive half of the alphabet, ascending.
    pub fn omega_pos(&self) -> &[f64] {
        &self.omega[self.half()..]
    }

    /// `|Ω| = √M`.
    pub fn size(&self) -> usize {
        self.omega.len()
    }

    pub fn half(&self) -> usize {
        self.omega.len() / 2
    }

    /// Mean `|s|²` over the full complex alphabet.
    pub fn symbol_energy(&self) -> f64 {
        self.symbol_energy
    }

    /// Complex symbol built from a pair of alphabet indices.
    pub fn symbol(&self, re: usize, im: usize) -> C64 {
        C64::new(self.omega[re], self.omega[im])
    }
}

/// Builds the alphabet for modulation order `order` (4, 16 or 64).
pub fn make_constellation(order: usize) -> Result<Constellation> {
    Constellation::new(order)
}

/// An `N x N` flat-fading channel.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexChannel {
    entries: DMatrix<C64>,
}

impl ComplexChannel {
    pub fn new(entries: DMatrix<C64>) -> Result<Self> {
        if entries.nrows() != entries.ncols() {
            return Err(Error::NotSquare {
                rows: entries.nrows(),
                cols: entries.ncols(),
            });
        }
        if entries.iter().any(|h| !h.re.is_finite() || !h.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self { entries })
    }

    pub fn from_row_slice(n: usize, data: &[C64]) -> Result<Self> {
        if data.len() != n * n {
            return Err(Error::DimensionMismatch {
                expected: n * n,
                actual: data.len(),
            });
        }
        Self::new(DMatrix::from_row_slice(n, n, data))
    }

    /// Number of antennas on each side.
    pub fn n(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entries(&self) -> &DMatrix<C64> {
        &self.entries
    }

    /// `H·s`.
    pub fn apply(&self, s: &[C64]) -> Result<Vec<C64>> {
        if s.len() != self.n() {
            return Err(Error::DimensionMismatch {
                expected: self.n(),
                actual: s.len(),
            });
        }
        let v = &self.entries * DVector::from_column_slice(s);
        Ok(v.iter().copied().collect())
    }
}

/// Ordering of real and imaginary parts in the real-valued model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Representation {
    /// `[Re v; Im v]`.
    Stacked,
    /// `[Re v₁, Im v₁, …, Re v_N, Im v_N]`.
    Interleaved,
}

impl Representation {
    /// Position of the real (`imag = false`) or imaginary part of complex
    /// entry `k` in a real vector of length `2n`.
    #[inline]
    pub fn real_index(self, n: usize, k: usize, imag: bool) -> usize {
        match self {
            Representation::Stacked => k + if imag { n } else { 0 },
            Representation::Interleaved => 2 * k + usize::from(imag),
        }
    }

    pub fn to_real(self, v: &[C64]) -> Vec<f64> {
        let n = v.len();
        let mut out = vec![0.0; 2 * n];
        for (k, z) in v.iter().enumerate() {
            out[self.real_index(n, k, false)] = z.re;
            out[self.real_index(n, k, true)] = z.im;
        }
        out
    }

    pub fn to_complex(self, x: &[f64]) -> Vec<C64> {
        let n = x.len() / 2;
        (0..n)
            .map(|k| C64::new(x[self.real_index(n, k, false)], x[self.real_index(n, k, true)]))
            .collect()
    }

    /// Regroups per-dimension symbol indices into `(re, im)` pairs per antenna.
    pub fn pair_indices(self, symbols: &[usize]) -> Vec<(usize, usize)> {
        let n = symbols.len() / 2;
        (0..n)
            .map(|k| {
                (
                    symbols[self.real_index(n, k, false)],
                    symbols[self.real_index(n, k, true)],
                )
            })
            .collect()
    }

    pub fn name(self) -> &'static str {
        match self {
            Representation::Stacked => "stacked",
            Representation::Interleaved => "interleaved",
        }
    }
}

impl std::str::FromStr for Representation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "stacked" => Ok(Representation::Stacked),
            "interleaved" => Ok(Representation::Interleaved),
            other => Err(Error::InvalidConfig(format!(
                "unknown representation `{other}` (expected stacked or interleaved)"
            ))),
        }
    }
}

/// Real-valued model `y = H̄·x + n` of size `2N`.
#[derive(Debug, Clone, PartialEq)]
pub struct RealLattice {
    pub representation: Representation,
    pub hbar: DMatrix<f64>,
    pub y: DVector<f64>,
}

impl RealLattice {
    pub fn dim(&self) -> usize {
        self.hbar.nrows()
    }

    /// Same channel, new observation.
    pub fn with_observation(&self, r: &[C64]) -> Result<Self> {
        if 2 * r.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim() / 2,
                actual: r.len(),
            });
        }
        Ok(Self {
            representation: self.representation,
            hbar: self.hbar.clone(),
            y: DVector::from_vec(self.representation.to_real(r)),
        })
    }
}

/// Real-valued model of `r = H·s + v` in the given layout.
pub fn to_real_lattice(ch: &ComplexChannel, r: &[C64], rep: Representation) -> Result<RealLattice> {
    let n = ch.n();
    if r.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            actual: r.len(),
        });
    }
    let mut hbar = DMatrix::zeros(2 * n, 2 * n);
    for i in 0..n {
        let (row_re, row_im) = (rep.real_index(n, i, false), rep.real_index(n, i, true));
        for j in 0..n {
            let (col_re, col_im) = (rep.real_index(n, j, false), rep.real_index(n, j, true));
            let h = ch.entries[(i, j)];
            hbar[(row_re, col_re)] = h.re;
            hbar[(row_re, col_im)] = -h.im;
            hbar[(row_im, col_re)] = h.im;
            hbar[(row_im, col_im)] = h.re;
        }
    }
    Ok(RealLattice {
        representation: rep,
        hbar,
        y: DVector::from_vec(rep.to_real(r)),
    })
}

/// Block form `[[Re H, -Im H], [Im H, Re H]]` with `y = [Re r; Im r]`.
pub fn to_stacked_real(ch: &ComplexChannel, r: &[C64]) -> Result<RealLattice> {
    to_real_lattice(ch, r, Representation::Stacked)
}

/// One `[[Re h, -Im h], [Im h, Re h]]` block per complex coefficient, with
/// the real and imaginary part of each receive antenna on adjacent rows.
pub fn to_interleaved_real(ch: &ComplexChannel, r: &[C64]) -> Result<RealLattice> {
    to_real_lattice(ch, r, Representation::Interleaved)
}

/// Householder QR of `hbar` normalized so that every `r(i,i)` is
/// non-negative. No snapping is applied.
pub fn positive_diagonal_qr(hbar: &DMatrix<f64>) -> (DMatrix<f64>, DMatrix<f64>) {
    let qr = hbar.clone().qr();
    let mut q = qr.q();
    let mut r = qr.r();
    for i in 0..r.nrows() {
        if r[(i, i)] < 0.0 {
            r.row_mut(i).neg_mut();
            q.column_mut(i).neg_mut();
        }
    }
    (q, r)
}

/// QR factors of a real lattice with structural zeros snapped to exact 0.
#[derive(Debug, Clone, PartialEq)]
pub struct QrFactors {
    pub representation: Representation,
    pub q: DMatrix<f64>,
    pub r: DMatrix<f64>,
    /// `Qᵀ·y` for the observation the lattice was built with.
    pub ybar: DVector<f64>,
    /// `true` wherever `r` is exactly zero, including the lower triangle.
    pub zero_mask: DMatrix<bool>,
    /// Number of nonzero upper-triangular entries of `r`.
    pub n_nonzero: usize,
    /// `max |H̄(i,j)|`, the scale for the snapping and rank thresholds.
    pub scale: f64,
}

impl QrFactors {
    pub fn dim(&self) -> usize {
        self.r.nrows()
    }

    #[inline]
    pub fn is_zero(&self, i: usize, j: usize) -> bool {
        self.zero_mask[(i, j)]
    }

    /// `Qᵀ·y`.
    pub fn rotate(&self, y: &[f64]) -> Vec<f64> {
        let dim = self.dim();
        (0..dim)
            .map(|j| (0..dim).map(|i| self.q[(i, j)] * y[i]).sum())
            .collect()
    }

    /// Cost of one [`rotate`](Self::rotate) call. It is the same for every
    /// decoder and is reported apart from the search counts.
    pub fn rotation_cost(&self) -> OpCount {
        let dim = self.dim() as u64;
        OpCount {
            real_mults: dim * dim,
            real_adds: dim * (dim - 1),
            ..OpCount::default()
        }
    }
}

/// Factors `lat.hbar = Q·R` with `r(i,i) > 0`, snaps entries with
/// `|r(i,j)| ≤ 1e-10·max|H̄|` to exact zero and rotates `lat.y`.
pub fn qr_factor(lat: &RealLattice) -> Result<QrFactors> {
    let dim = lat.dim();
    if lat.y.len() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            actual: lat.y.len(),
        });
    }
    let scale = lat.hbar.amax();
    let (q, mut r) = positive_diagonal_qr(&lat.hbar);
    for i in 0..dim {
        let d = r[(i, i)];
        if d.is_nan() || d <= RANK_TOL * scale {
            return Err(Error::RankDeficient { index: i, value: d });
        }
    }

    let snap = ZERO_SNAP_TOL * scale;
    let mut zero_mask = DMatrix::from_element(dim, dim, false);
    let mut n_nonzero = 0;
    for i in 0..dim {
        for j in 0..dim {
            if j < i || r[(i, j)].abs() <= snap {
                r[(i, j)] = 0.0;
                zero_mask[(i, j)] = true;
            } else {
                n_nonzero += 1;
            }
        }
    }

    let ybar = q.tr_mul(&lat.y);
    Ok(QrFactors {
        representation: lat.representation,
        q,
        r,
        ybar,
        zero_mask,
        n_nonzero,
        scale,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_channel(rng: &mut ChaCha8Rng, n: usize) -> ComplexChannel {
        let data: Vec<C64> = (0..n * n)
            .map(|_| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
            .collect();
        ComplexChannel::from_row_slice(n, &data).unwrap()
    }

    #[test]
    fn constellation_alphabets() {
        let c = make_constellation(16).unwrap();
        assert_eq!(c.omega(), &[-3.0, -1.0, 1.0, 3.0]);
        assert_eq!(c.omega_neg(), &[-3.0, -1.0]);
        assert_eq!(c.omega_pos(), &[1.0, 3.0]);
        assert_eq!(c.symbol_energy(), 10.0);

        let c = make_constellation(4).unwrap();
        assert_eq!(c.omega(), &[-1.0, 1.0]);
        assert_eq!(c.symbol_energy(), 2.0);

        let c = make_constellation(64).unwrap();
        assert_eq!(c.omega(), &[-7.0, -5.0, -3.0, -1.0, 1.0, 3.0, 5.0, 7.0]);
        // enumerate all 64 points
        let mean: f64 = (0..8)
            .flat_map(|a| (0..8).map(move |b| (a, b)))
            .map(|(a, b)| c.symbol(a, b).norm_sqr())
            .sum::<f64>()
            / 64.0;
        assert_eq!(mean, 42.0);
        assert_eq!(c.symbol_energy(), mean);
    }

    #[test]
    fn halves_mirror_each_other() {
        for m in [4, 16, 64] {
            let c = make_constellation(m).unwrap();
            assert_eq!(c.size() * c.size(), m);
            for (neg, pos) in c.omega_neg().iter().zip(c.omega_pos().iter().rev()) {
                assert_eq!(-neg, *pos);
            }
        }
    }

    #[test]
    fn rejects_unsupported_order() {
        for m in [0, 2, 8, 32, 128, 256] {
            assert!(matches!(
                make_constellation(m),
                Err(Error::UnsupportedModulation(x)) if x == m
            ));
        }
    }

    #[test]
    fn scalar_channel_both_layouts() {
        let ch = ComplexChannel::from_row_slice(1, &[C64::new(1.0, 1.0)]).unwrap();
        let r = [C64::new(2.0, 3.0)];
        for lat in [to_stacked_real(&ch, &r).unwrap(), to_interleaved_real(&ch, &r).unwrap()] {
            assert_eq!(lat.hbar, DMatrix::from_row_slice(2, 2, &[1.0, -1.0, 1.0, 1.0]));
            assert_eq!(lat.y.as_slice(), &[2.0, 3.0]);
        }
    }

    #[test]
    fn zero_channel_gives_zero_hbar() {
        let ch = ComplexChannel::new(DMatrix::from_element(3, 3, C64::new(0.0, 0.0))).unwrap();
        let lat = to_stacked_real(&ch, &[C64::new(0.0, 0.0); 3]).unwrap();
        assert!(lat.hbar.iter().all(|&v| v == 0.0));
        assert!(matches!(qr_factor(&lat), Err(Error::RankDeficient { .. })));
    }

    #[test]
    fn dimension_errors() {
        let ch = ComplexChannel::from_row_slice(2, &[C64::new(1.0, 0.0); 4]).unwrap();
        assert!(matches!(
            to_stacked_real(&ch, &[C64::new(0.0, 0.0); 3]),
            Err(Error::DimensionMismatch { expected: 2, actual: 3 })
        ));
        assert!(to_interleaved_real(&ch, &[C64::new(0.0, 0.0)]).is_err());
        assert!(ComplexChannel::new(DMatrix::from_element(2, 3, C64::new(1.0, 0.0))).is_err());
        assert!(ComplexChannel::from_row_slice(1, &[C64::new(f64::NAN, 0.0)]).is_err());
    }

    #[test]
    fn real_image_matches_complex_product() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for n in [1, 2, 3, 4] {
            let ch = random_channel(&mut rng, n);
            for rep in [Representation::Stacked, Representation::Interleaved] {
                let lat = to_real_lattice(&ch, &vec![C64::new(0.0, 0.0); n], rep).unwrap();
                for _ in 0..10 {
                    let s: Vec<C64> = (0..n)
                        .map(|_| C64::new(rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0)))
                        .collect();
                    let hs = rep.to_real(&ch.apply(&s).unwrap());
                    let hx = &lat.hbar * DVector::from_vec(rep.to_real(&s));
                    for (a, b) in hs.iter().zip(hx.iter()) {
                        assert!((a - b).abs() < 1e-12);
                    }
                }
            }
        }
    }

    #[test]
    fn interleaved_row_order() {
        let r = [C64::new(1.0, 2.0), C64::new(3.0, 4.0)];
        assert_eq!(Representation::Interleaved.to_real(&r), vec![1.0, 2.0, 3.0, 4.0]);
        assert_eq!(Representation::Stacked.to_real(&r), vec![1.0, 3.0, 2.0, 4.0]);
        for rep in [Representation::Stacked, Representation::Interleaved] {
            assert_eq!(rep.to_complex(&rep.to_real(&r)), r.to_vec());
        }
    }

    #[test]
    fn interleaved_column_pairs_are_orthogonal() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..100 {
            let ch = random_channel(&mut rng, 3);
            let lat = to_interleaved_real(&ch, &[C64::new(0.0, 0.0); 3]).unwrap();
            for j in 0..3 {
                // the two products in each row pair cancel exactly
                let dot = lat.hbar.column(2 * j).dot(&lat.hbar.column(2 * j + 1));
                assert!(dot.abs() < 1e-15);
            }
        }
    }

    #[test]
    fn scalar_interleaved_qr() {
        let ch = ComplexChannel::from_row_slice(1, &[C64::new(1.0, 1.0)]).unwrap();
        let qr = qr_factor(&to_interleaved_real(&ch, &[C64::new(0.0, 0.0)]).unwrap()).unwrap();
        let s2 = 2f64.sqrt();
        assert!((qr.r[(0, 0)] - s2).abs() < 1e-15);
        assert!((qr.r[(1, 1)] - s2).abs() < 1e-15);
        assert_eq!(qr.r[(0, 1)], 0.0);
        assert!(qr.is_zero(0, 1));
        assert_eq!(qr.n_nonzero, 2);
    }

    #[test]
    fn two_by_two_interleaved_zero_pattern() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let ch = random_channel(&mut rng, 2);
        let qr = qr_factor(&to_interleaved_real(&ch, &[C64::new(0.0, 0.0); 2]).unwrap()).unwrap();
        assert!(qr.is_zero(0, 1));
        assert!(qr.is_zero(2, 3));
        assert!(!qr.is_zero(0, 2) && !qr.is_zero(0, 3) && !qr.is_zero(1, 2) && !qr.is_zero(1, 3));
        assert_eq!(qr.n_nonzero, 8);
    }

    #[test]
    fn stacked_has_one_structural_zero() {
        // columns 0 and N of [[A, -B], [B, A]] are orthogonal, nothing else is
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for n in [2, 3, 4] {
            let ch = random_channel(&mut rng, n);
            let qr = qr_factor(&to_stacked_real(&ch, &vec![C64::new(0.0, 0.0); n]).unwrap()).unwrap();
            let zeros: Vec<(usize, usize)> = (0..2 * n)
                .flat_map(|i| (i..2 * n).map(move |j| (i, j)))
                .filter(|&(i, j)| qr.is_zero(i, j))
                .collect();
            assert_eq!(zeros, vec![(0, n)]);
            assert_eq!(qr.n_nonzero, n * (2 * n + 1) - 1);
        }
    }

    #[test]
    fn rotation_matches_stored_ybar() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let ch = random_channel(&mut rng, 2);
        let r = [C64::new(0.3, -1.2), C64::new(2.0, 0.5)];
        let qr = qr_factor(&to_interleaved_real(&ch, &r).unwrap()).unwrap();
        let y = Representation::Interleaved.to_real(&r);
        let rotated = qr.rotate(&y);
        for (a, b) in rotated.iter().zip(qr.ybar.iter()) {
            assert!((a - b).abs() < 1e-14);
        }
        assert_eq!(qr.rotation_cost().real_mults, 16);
        assert_eq!(qr.rotation_cost().real_adds, 12);
    }
}
