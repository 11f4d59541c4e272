//! Burst-structured Monte-Carlo link simulation over Rayleigh flat fading.
//!
//! Each (SNR point, realization) pair is one burst: a fresh channel, one QR
//! factorization and check-table per representation, then
//! `symbols_per_realization` uniformly drawn QAM vectors decoded by every
//! configured detector. Every burst draws from its own ChaCha stream derived
//! from `(seed, snr index, realization index)`, so results do not depend on
//! how bursts are scheduled across threads.

use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::decoder::{check_brute_force, ml_brute_force, Features, OpCount, SearchContext};
use crate::error::{Error, Result};
use crate::lattice::{
    make_constellation, qr_factor, to_interleaved_real, to_real_lattice, ComplexChannel,
    Constellation, QrFactors, RealLattice, Representation, C64,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum DecoderKind {
    /// Direct evaluation, no complexity reductions.
    Conventional,
    /// Exhaustive search on the unrotated lattice.
    Ml,
    /// Interleaved lattice with the configured features.
    Proposed,
}

impl DecoderKind {
    pub fn name(self) -> &'static str {
        match self {
            DecoderKind::Conventional => "conventional",
            DecoderKind::Ml => "ml",
            DecoderKind::Proposed => "proposed",
        }
    }
}

impl fmt::Display for DecoderKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for DecoderKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "conventional" => Ok(DecoderKind::Conventional),
            "proposed" => Ok(DecoderKind::Proposed),
            "ml" => Ok(DecoderKind::Ml),
            other => Err(Error::InvalidConfig(format!(
                "unknown decoder `{other}` (expected conventional, proposed or ml)"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub n: usize,
    pub modulation: usize,
    pub snr_db: Vec<f64>,
    pub realizations: usize,
    pub symbols_per_realization: usize,
    pub seed: u64,
    pub decoders: Vec<DecoderKind>,
    /// Features of the proposed decoder.
    pub features: Features,
    /// Lattice layout the conventional decoder searches.
    pub conventional_representation: Representation,
    /// Multiplier on the initial squared radius.
    pub radius_scale: f64,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            n: 2,
            modulation: 4,
            snr_db: snr_grid(0.0, 20.0, 4.0),
            realizations: 100,
            symbols_per_realization: 200,
            seed: 1,
            decoders: vec![DecoderKind::Conventional, DecoderKind::Proposed],
            features: Features::ALL,
            conventional_representation: Representation::Stacked,
            radius_scale: 1.0,
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<Constellation> {
        let c = make_constellation(self.modulation)?;
        let bad = |msg: &str| Err(Error::InvalidConfig(msg.to_string()));
        if self.n == 0 {
            return bad("n must be at least 1");
        }
        if self.realizations == 0 {
            return bad("realizations must be at least 1");
        }
        if self.symbols_per_realization == 0 {
            return bad("symbols per realization must be at least 1");
        }
        if self.snr_db.is_empty() || self.snr_db.iter().any(|s| !s.is_finite()) {
            return bad("SNR points must be finite and non-empty");
        }
        if self.decoders.is_empty() {
            return bad("at least one decoder is required");
        }
        if !(self.radius_scale > 0.0 && self.radius_scale.is_finite()) {
            return bad("radius scale must be positive");
        }
        if self.decoders.contains(&DecoderKind::Ml) {
            check_brute_force(self.n, &c)?;
        }
        Ok(c)
    }
}

/// `start, start+step, …` up to and including `stop` (within rounding).
pub fn snr_grid(start: f64, stop: f64, step: f64) -> Vec<f64> {
    let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
    (0..count).map(|i| start + i as f64 * step).collect()
}

/// Tallies of one decoder at one SNR point.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecoderTally {
    pub kind: DecoderKind,
    pub ops: OpCount,
    /// Decoded vector symbols.
    pub decodes: u64,
    /// Decoded complex scalar symbols (`N` per vector).
    pub symbols: u64,
    pub symbol_errors: u64,
    pub vector_errors: u64,
    /// Decodes that needed at least one radius increase.
    pub restart_decodes: u64,
    /// Check-table construction, summed over bursts.
    pub preprocessing: OpCount,
    pub bursts: u64,
}

impl DecoderTally {
    fn new(kind: DecoderKind) -> Self {
        Self {
            kind,
            ops: OpCount::default(),
            decodes: 0,
            symbols: 0,
            symbol_errors: 0,
            vector_errors: 0,
            restart_decodes: 0,
            preprocessing: OpCount::default(),
            bursts: 0,
        }
    }

    fn merge(&mut self, other: &DecoderTally) {
        debug_assert_eq!(self.kind, other.kind);
        self.ops += other.ops;
        self.decodes += other.decodes;
        self.symbols += other.symbols;
        self.symbol_errors += other.symbol_errors;
        self.vector_errors += other.vector_errors;
        self.restart_decodes += other.restart_decodes;
        self.preprocessing += other.preprocessing;
        self.bursts += other.bursts;
    }

    fn per_decode(&self, v: u64) -> f64 {
        v as f64 / self.decodes as f64
    }

    pub fn avg_mults(&self) -> f64 {
        self.per_decode(self.ops.real_mults)
    }

    pub fn avg_adds(&self) -> f64 {
        self.per_decode(self.ops.real_adds)
    }

    pub fn avg_visited(&self) -> f64 {
        self.per_decode(self.ops.visited_nodes)
    }

    pub fn avg_restarts(&self) -> f64 {
        self.per_decode(self.ops.restarts)
    }

    pub fn ser(&self) -> f64 {
        self.symbol_errors as f64 / self.symbols as f64
    }

    pub fn ver(&self) -> f64 {
        self.per_decode(self.vector_errors)
    }

    pub fn preprocessing_mults_per_burst(&self) -> f64 {
        self.preprocessing.real_mults as f64 / self.bursts as f64
    }
}

/// Results of one SNR point.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialRecord {
    pub snr_db: f64,
    pub n: usize,
    pub modulation: usize,
    /// Complex noise variance per receive antenna.
    pub noise_variance: f64,
    /// Initial squared radius handed to the tree searches.
    pub radius_sq: f64,
    pub tallies: Vec<DecoderTally>,
    /// Channels rejected as rank-deficient and redrawn.
    pub redraws: u64,
    /// Cost of `ȳ = Qᵀy` per decode; identical for both tree searches and
    /// excluded from their counts.
    pub rotation_per_symbol: OpCount,
}

impl TrialRecord {
    pub fn tally(&self, kind: DecoderKind) -> Option<&DecoderTally> {
        self.tallies.iter().find(|t| t.kind == kind)
    }
}

/// Rayleigh channel: entries `CN(0, 1)`.
pub fn draw_channel<R: Rng + ?Sized>(rng: &mut R, n: usize) -> ComplexChannel {
    let entries = DMatrix::from_fn(n, n, |_, _| complex_gaussian(rng, 1.0));
    ComplexChannel::new(entries).expect("gaussian draws are finite")
}

/// Circularly symmetric complex Gaussian with total variance `variance`.
pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R, variance: f64) -> C64 {
    let scale = variance.sqrt() * FRAC_1_SQRT_2;
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C64::new(scale * re, scale * im)
}

/// Complex noise variance per receive antenna for an average per-antenna
/// receive SNR of `snr_db`: `σ² = N·E_s / 10^(snr/10)`.
pub fn noise_variance(snr_db: f64, c: &Constellation, n: usize) -> f64 {
    n as f64 * c.symbol_energy() / 10f64.powf(snr_db / 10.0)
}

/// `δ² = 2·N·σ²` with `σ²` the complex per-antenna noise variance.
pub fn initial_radius_sq(noise_variance: f64, n: usize) -> f64 {
    2.0 * n as f64 * noise_variance
}

/// Stream id of one burst.
pub fn burst_stream(snr_index: usize, realization: usize) -> u64 {
    ((snr_index as u64) << 32) | realization as u64
}

pub fn burst_rng(seed: u64, snr_index: usize, realization: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(burst_stream(snr_index, realization));
    rng
}

struct Burst {
    tallies: Vec<DecoderTally>,
    redraws: u64,
}

struct Factored {
    stacked: RealLattice,
    conventional: QrFactors,
    interleaved: QrFactors,
}

fn factor_channel(ch: &ComplexChannel, conventional: Representation) -> Result<Factored> {
    let zeros = vec![C64::new(0.0, 0.0); ch.n()];
    let stacked = to_real_lattice(ch, &zeros, Representation::Stacked)?;
    let interleaved = qr_factor(&to_interleaved_real(ch, &zeros)?)?;
    let conventional = match conventional {
        Representation::Interleaved => interleaved.clone(),
        Representation::Stacked => qr_factor(&stacked)?,
    };
    Ok(Factored {
        stacked,
        conventional,
        interleaved,
    })
}

fn count_errors(sent: &[(usize, usize)], decoded: &[(usize, usize)]) -> u64 {
    sent.iter().zip(decoded).filter(|(a, b)| a != b).count() as u64
}

fn simulate_burst(
    cfg: &ExperimentConfig,
    c: &Constellation,
    snr_index: usize,
    realization: usize,
    noise_var: f64,
    radius_sq: f64,
) -> Result<Burst> {
    let mut rng = burst_rng(cfg.seed, snr_index, realization);
    let n = cfg.n;
    let q = c.size();

    let mut redraws = 0;
    let (ch, factored) = loop {
        let ch = draw_channel(&mut rng, n);
        match factor_channel(&ch, cfg.conventional_representation) {
            Ok(f) => break (ch, f),
            Err(Error::RankDeficient { .. }) => redraws += 1,
            Err(e) => return Err(e),
        }
    };
    let Factored {
        mut stacked,
        conventional,
        interleaved,
    } = factored;

    let mut searches: Vec<(DecoderKind, SearchContext<'_>)> = Vec::new();
    for &kind in &cfg.decoders {
        match kind {
            DecoderKind::Conventional => searches.push((
                kind,
                SearchContext::new(&conventional, c, Features::NONE),
            )),
            DecoderKind::Proposed => {
                searches.push((kind, SearchContext::new(&interleaved, c, cfg.features)))
            }
            DecoderKind::Ml => {}
        }
    }

    let mut tallies: Vec<DecoderTally> = cfg.decoders.iter().map(|&k| DecoderTally::new(k)).collect();
    for t in tallies.iter_mut() {
        t.bursts = 1;
        if let Some((_, ctx)) = searches.iter().find(|(k, _)| *k == t.kind) {
            t.preprocessing = ctx.preprocessing_cost();
        }
    }

    let mut sent = vec![(0usize, 0usize); n];
    let mut s = vec![C64::new(0.0, 0.0); n];
    for _ in 0..cfg.symbols_per_realization {
        for k in 0..n {
            sent[k] = (rng.random_range(0..q), rng.random_range(0..q));
            s[k] = c.symbol(sent[k].0, sent[k].1);
        }
        let mut r = ch.apply(&s)?;
        for rk in r.iter_mut() {
            *rk += complex_gaussian(&mut rng, noise_var);
        }

        for tally in tallies.iter_mut() {
            let (res, rep) = match tally.kind {
                DecoderKind::Ml => {
                    stacked.y = DVector::from_vec(Representation::Stacked.to_real(&r));
                    (ml_brute_force(&stacked, c)?, Representation::Stacked)
                }
                kind => {
                    let (_, ctx) = searches
                        .iter_mut()
                        .find(|(k, _)| *k == kind)
                        .expect("context exists for every tree decoder");
                    let rep = ctx.qr().representation;
                    let ybar = ctx.qr().rotate(&rep.to_real(&r));
                    (ctx.decode(&ybar, radius_sq), rep)
                }
            };
            let errors = count_errors(&sent, &rep.pair_indices(&res.symbols));
            tally.ops += res.ops;
            tally.decodes += 1;
            tally.symbols += n as u64;
            tally.symbol_errors += errors;
            tally.vector_errors += u64::from(errors > 0);
            tally.restart_decodes += u64::from(res.ops.restarts > 0);
        }
    }
    Ok(Burst { tallies, redraws })
}

/// Runs every SNR point of `cfg`. Realizations are spread over the current
/// rayon pool.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<Vec<TrialRecord>> {
    let c = cfg.validate()?;
    let dim = 2 * cfg.n as u64;
    let mut records = Vec::with_capacity(cfg.snr_db.len());
    for (snr_index, &snr_db) in cfg.snr_db.iter().enumerate() {
        let noise_var = noise_variance(snr_db, &c, cfg.n);
        let radius_sq = initial_radius_sq(noise_var, cfg.n) * cfg.radius_scale;
        let bursts: Vec<Burst> = (0..cfg.realizations)
            .into_par_iter()
            .map(|real| simulate_burst(cfg, &c, snr_index, real, noise_var, radius_sq))
            .collect::<Result<_>>()?;

        let mut tallies: Vec<DecoderTally> =
            cfg.decoders.iter().map(|&k| DecoderTally::new(k)).collect();
        let mut redraws = 0;
        for b in &bursts {
            redraws += b.redraws;
            for (acc, t) in tallies.iter_mut().zip(&b.tallies) {
                acc.merge(t);
            }
        }
        records.push(TrialRecord {
            snr_db,
            n: cfg.n,
            modulation: cfg.modulation,
            noise_variance: noise_var,
            radius_sq,
            tallies,
            redraws,
            rotation_per_symbol: OpCount {
                real_mults: dim * dim,
                real_adds: dim * (dim - 1),
                ..OpCount::default()
            },
        });
    }
    Ok(records)
}
