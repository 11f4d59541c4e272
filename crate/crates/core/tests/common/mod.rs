#![allow(dead_code)]

use rand::Rng;
use spherekit_core::decoder::{ml_brute_force, DecodeResult, Features, SearchContext};
use spherekit_core::lattice::{
    qr_factor, to_interleaved_real, to_stacked_real, ComplexChannel, Constellation, RealLattice,
    C64,
};
use spherekit_core::sim::{complex_gaussian, draw_channel, initial_radius_sq, noise_variance};

pub struct Instance {
    pub ch: ComplexChannel,
    pub sent: Vec<(usize, usize)>,
    pub r: Vec<C64>,
    pub noise_var: f64,
}

pub fn instance<R: Rng>(rng: &mut R, n: usize, c: &Constellation, snr_db: f64) -> Instance {
    let ch = draw_channel(rng, n);
    let q = c.size();
    let sent: Vec<(usize, usize)> = (0..n)
        .map(|_| (rng.random_range(0..q), rng.random_range(0..q)))
        .collect();
    let s: Vec<C64> = sent.iter().map(|&(a, b)| c.symbol(a, b)).collect();
    let noise_var = noise_variance(snr_db, c, n);
    let r = ch
        .apply(&s)
        .unwrap()
        .into_iter()
        .map(|v| v + complex_gaussian(rng, noise_var))
        .collect();
    Instance {
        ch,
        sent,
        r,
        noise_var,
    }
}

/// Best and runner-up `‖y − H̄x‖²` over every candidate, by plain enumeration.
pub fn two_best(lat: &RealLattice, c: &Constellation) -> (f64, f64) {
    let dim = lat.dim();
    let omega = c.omega();
    let total = omega.len().pow(dim as u32);
    let mut best = (f64::INFINITY, f64::INFINITY);
    for code in 0..total {
        let mut rest = code;
        let x: Vec<f64> = (0..dim)
            .map(|_| {
                let v = omega[rest % omega.len()];
                rest /= omega.len();
                v
            })
            .collect();
        let w: f64 = (0..dim)
            .map(|i| {
                let e = lat.y[i] - (0..dim).map(|k| lat.hbar[(i, k)] * x[k]).sum::<f64>();
                e * e
            })
            .sum();
        if w < best.0 {
            best = (w, best.0);
        } else if w < best.1 {
            best.1 = w;
        }
    }
    best
}

pub struct Outcome {
    pub conventional: DecodeResult,
    pub proposed: DecodeResult,
    pub ml: DecodeResult,
    pub conventional_pairs: Vec<(usize, usize)>,
    pub proposed_pairs: Vec<(usize, usize)>,
    pub ml_pairs: Vec<(usize, usize)>,
    pub unique: bool,
}

pub fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}

/// Conventional search on the stacked lattice, proposed search on the
/// interleaved lattice and brute force, all on one received vector.
pub fn decode_three_ways(inst: &Instance, c: &Constellation, features: Features) -> Outcome {
    let n = inst.ch.n();
    let radius = initial_radius_sq(inst.noise_var, n);
    let stacked = to_stacked_real(&inst.ch, &inst.r).unwrap();
    let interleaved = to_interleaved_real(&inst.ch, &inst.r).unwrap();
    let qs = qr_factor(&stacked).unwrap();
    let qi = qr_factor(&interleaved).unwrap();

    let conventional = SearchContext::new(&qs, c, Features::NONE).decode(qs.ybar.as_slice(), radius);
    let proposed = SearchContext::new(&qi, c, features).decode(qi.ybar.as_slice(), radius);
    let ml = ml_brute_force(&stacked, c).unwrap();
    let (b0, b1) = two_best(&stacked, c);
    assert!(rel_close(b0, ml.weight, 1e-12));
    Outcome {
        conventional_pairs: qs.representation.pair_indices(&conventional.symbols),
        proposed_pairs: qi.representation.pair_indices(&proposed.symbols),
        ml_pairs: stacked.representation.pair_indices(&ml.symbols),
        unique: !rel_close(b0, b1, 1e-12),
        conventional,
        proposed,
        ml,
    }
}
